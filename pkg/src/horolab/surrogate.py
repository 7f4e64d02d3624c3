"""Quasihyperbolic grid surrogate for planar domains without a closed form.

The graph has a node at every interior point of an ``h``-grid and joins
8-neighbours whose connecting segment is certified interior (the boundary
distance balls at the endpoints and the midpoint cover it).  An edge costs
``length / delta(midpoint)``; edges touching the band ``delta < 2h`` use the
two quarter points instead.  Query points are attached to nearby nodes on
demand, so every answer is a shortest path between the actual points.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .domains import Domain
from .errors import ConvergenceError, GridResolutionError

# worst-case ratio of an 8-neighbour path to the straight segment
OCTILE_EXCESS = float(np.sqrt(4.0 - 2.0 * np.sqrt(2.0)) - 1.0)
ATTACH_RADIUS = 2
SOURCE_CHUNK = 64
_STEPS = ((1, 0), (0, 1), (1, 1), (1, -1))


def planar_inside(domain: Domain, z) -> np.ndarray:
    # explicit column shape: a length-1 planar array would otherwise read as one point
    return domain.contains_many(np.asarray(z, complex).reshape(-1, 1)).reshape(np.shape(z))


def planar_delta(domain: Domain, z) -> np.ndarray:
    return domain.delta_many(np.asarray(z, complex).reshape(-1, 1)).reshape(np.shape(z))


class GridGraph:
    def __init__(self, domain: Domain, h: float):
        self.domain = domain
        self.h = float(h)
        x0, x1, y0, y1 = domain.bbox()
        cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        mx = int(np.ceil(0.5 * (x1 - x0) / h))
        my = int(np.ceil(0.5 * (y1 - y0) / h))
        self.origin = complex(cx - mx * h, cy - my * h)
        self.shape = (2 * mx + 1, 2 * my + 1)
        ii, jj = np.meshgrid(np.arange(self.shape[0]), np.arange(self.shape[1]), indexing="ij")
        pts = self.origin + h * (ii + 1j * jj)
        inside = planar_inside(domain, pts.ravel()).reshape(self.shape)
        self.index = -np.ones(self.shape, dtype=np.int64)
        self.index[inside] = np.arange(int(inside.sum()))
        self.nodes = pts[inside]
        self.delta = planar_delta(domain, self.nodes)
        rows, cols, wts = [], [], []
        nx, ny = self.shape
        for di, dj in _STEPS:
            ja, jb = (slice(0, ny - dj), slice(dj, ny)) if dj >= 0 else (slice(-dj, ny), slice(0, ny + dj))
            a = self.index[0 : nx - di, ja]
            b = self.index[di:nx, jb]
            keep = (a >= 0) & (b >= 0)
            a, b = a[keep], b[keep]
            w, ok = self.segment_cost(self.nodes[a], self.nodes[b], self.delta[a], self.delta[b])
            rows.append(a[ok])
            cols.append(b[ok])
            wts.append(w[ok])
        self.rows = np.concatenate(rows)
        self.cols = np.concatenate(cols)
        self.wts = np.concatenate(wts)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def segment_cost(self, a, b, da, db) -> tuple[np.ndarray, np.ndarray]:
        """Quasihyperbolic cost of straight segments and whether each is certified interior."""
        a = np.asarray(a, complex)
        b = np.asarray(b, complex)
        L = np.abs(b - a)
        m = 0.5 * (a + b)
        inside = planar_inside(self.domain, m)
        dm = np.where(inside, planar_delta(self.domain, m), 0.0)
        ok = inside & (dm > 0) & (da + dm >= 0.5 * L) & (dm + db >= 0.5 * L)
        w = np.full(L.shape, np.inf)
        near = np.minimum(da, db) < 2 * self.h
        far = ok & ~near
        w[far] = L[far] / dm[far]
        sub = ok & near
        if np.any(sub):
            q1 = a[sub] + 0.25 * (b[sub] - a[sub])
            q3 = a[sub] + 0.75 * (b[sub] - a[sub])
            d1 = planar_delta(self.domain, q1)
            d3 = planar_delta(self.domain, q3)
            w[sub] = 0.5 * L[sub] * (1.0 / d1 + 1.0 / d3)
        ok &= np.isfinite(w) & (w >= 0)
        return w, ok

    def _locate(self, q: complex) -> tuple[int, int]:
        rel = (q - self.origin) / self.h
        return int(round(rel.real)), int(round(rel.imag))

    def _attachments(self, Q: np.ndarray, dq: np.ndarray):
        """Edges from each query point to grid nodes in a small window."""
        rows, cols, wts = [], [], []
        offs = np.arange(-ATTACH_RADIUS, ATTACH_RADIUS + 1)
        for k, q in enumerate(Q):
            ci, cj = self._locate(q)
            ii = np.clip(ci + offs, 0, self.shape[0] - 1)
            jj = np.clip(cj + offs, 0, self.shape[1] - 1)
            ids = np.unique(self.index[np.ix_(ii, jj)].ravel())
            ids = ids[ids >= 0]
            if len(ids) == 0:
                raise GridResolutionError(f"query point {q} has no grid neighbour at h={self.h}")
            w, ok = self.segment_cost(np.full(len(ids), q), self.nodes[ids], np.full(len(ids), dq[k]), self.delta[ids])
            if not np.any(ok):
                raise GridResolutionError(f"query point {q} cannot be linked to the grid at h={self.h}")
            rows.append(np.full(int(ok.sum()), k))
            cols.append(ids[ok])
            wts.append(w[ok])
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(wts)

    def _augmented(self, Q: np.ndarray):
        Q = np.asarray(Q, complex).ravel()
        if not np.all(planar_inside(self.domain, Q)):
            from .errors import NotInteriorError

            raise NotInteriorError("query point outside the domain")
        dq = planar_delta(self.domain, Q)
        if np.any(dq < self.h):
            raise GridResolutionError(
                f"grid spacing h={self.h} is coarser than the boundary distance {dq.min():.3g} of a query point"
            )
        n = self.n_nodes
        qr, qc, qw = self._attachments(Q, dq)
        rows = [self.rows, qr + n]
        cols = [self.cols, qc]
        wts = [self.wts, qw]
        # direct links between close query points keep tiny distances accurate
        if len(Q) > 1:
            diff = np.abs(Q[:, None] - Q[None, :])
            a, b = np.nonzero(np.triu(diff <= 2 * self.h, 1))
            if len(a):
                w, ok = self.segment_cost(Q[a], Q[b], dq[a], dq[b])
                rows.append(a[ok] + n)
                cols.append(b[ok] + n)
                wts.append(w[ok])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        wts = np.concatenate(wts)
        # zero-cost edges would be dropped by the sparse format
        wts = np.maximum(wts, 1e-300)
        size = n + len(Q)
        graph = coo_matrix((wts, (rows, cols)), shape=(size, size)).tocsr()
        return graph, dq

    def error_bound(self, values: np.ndarray, dz: np.ndarray, dw: np.ndarray) -> np.ndarray:
        """Additive error model: octile anisotropy plus one cell of attachment slack per end."""
        return OCTILE_EXCESS * values + self.h / dz + self.h / dw

    def cross_values(self, A, B) -> tuple[np.ndarray, np.ndarray]:
        A = np.asarray(A, complex).ravel()
        B = np.asarray(B, complex).ravel()
        Q, inv = np.unique(np.concatenate([A, B]), return_inverse=True)
        ia, ib = inv[: len(A)], inv[len(A) :]
        graph, dq = self._augmented(Q)
        n = self.n_nodes
        src_is_a = len(np.unique(ia)) <= len(np.unique(ib))
        src_q = np.unique(ia if src_is_a else ib)
        table = np.empty((len(src_q), len(Q)))
        for start in range(0, len(src_q), SOURCE_CHUNK):
            chunk = src_q[start : start + SOURCE_CHUNK]
            d = dijkstra(graph, directed=False, indices=chunk + n)
            table[start : start + len(chunk)] = d[:, n:]
        pos = {q: k for k, q in enumerate(src_q)}
        if src_is_a:
            rows = np.array([pos[q] for q in ia])
            vals = table[rows][:, ib]
        else:
            rows = np.array([pos[q] for q in ib])
            vals = table[rows][:, ia].T
        same = ia[:, None] == ib[None, :]
        vals = np.where(same, 0.0, vals)
        if not np.all(np.isfinite(vals)):
            raise ConvergenceError("grid graph is disconnected between query points")
        err = np.where(same, 0.0, self.error_bound(vals, dq[ia][:, None], dq[ib][None, :]))
        return vals, err

    def pair_values(self, Z, W) -> tuple[np.ndarray, np.ndarray]:
        Z = np.asarray(Z, complex).ravel()
        W = np.asarray(W, complex).ravel()
        Q, inv = np.unique(np.concatenate([Z, W]), return_inverse=True)
        iz, iw = inv[: len(Z)], inv[len(Z) :]
        graph, dq = self._augmented(Q)
        n = self.n_nodes
        srcs = np.unique(iz)
        out = np.zeros(len(Z))
        for start in range(0, len(srcs), SOURCE_CHUNK):
            chunk = srcs[start : start + SOURCE_CHUNK]
            d = dijkstra(graph, directed=False, indices=chunk + n)
            for r, q in enumerate(chunk):
                sel = iz == q
                out[sel] = d[r, n + iw[sel]]
        out[iz == iw] = 0.0
        if not np.all(np.isfinite(out)):
            raise ConvergenceError("grid graph is disconnected between query points")
        err = np.where(iz == iw, 0.0, self.error_bound(out, dq[iz], dq[iw]))
        return out, err

    def shortest_path(self, z: complex, w: complex) -> np.ndarray:
        """Vertices of the cheapest graph path from ``z`` to ``w`` (endpoints included)."""
        Q = np.array([z, w], complex)
        graph, _ = self._augmented(Q)
        n = self.n_nodes
        _, pred = dijkstra(graph, directed=False, indices=n, return_predecessors=True)
        path = [n + 1]
        while path[-1] != n:
            p = pred[path[-1]]
            if p < 0:
                raise ConvergenceError("no grid path between the points")
            path.append(int(p))
        path.reverse()
        allpts = np.concatenate([self.nodes, Q])
        return allpts[np.array(path)]

    def path_cost(self, pts: np.ndarray) -> float:
        pts = np.asarray(pts, complex)
        d = planar_delta(self.domain, pts)
        w, ok = self.segment_cost(pts[:-1], pts[1:], d[:-1], d[1:])
        if not np.all(ok):
            return float("inf")
        return float(np.sum(w))


@lru_cache(maxsize=16)
def grid_graph(domain: Domain, h: float) -> GridGraph:
    """Build (or reuse) the grid graph for ``(domain, h)``."""
    return GridGraph(domain, h)
