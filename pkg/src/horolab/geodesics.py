"""Geodesic segments and rays, convex quasi-geodesics, constant fitting and cluster sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domains import BoundaryPoint, Domain, project_boundary_point
from .errors import ConvergenceError, PreconditionError
from .metric import MetricBackend
from .surrogate import planar_delta, planar_inside

SEGMENT_SAMPLES = 65
MAX_RAY_TIME = 16.0
LANDING_TOL = 1e-3
DESCENT_CAP = 10_000


@dataclass
class Path:
    """A sampled curve ``t -> points[i]`` with its invariant length.

    ``kind_claim`` is ``geodesic``, ``quasi_geodesic`` (with ``alpha``/``beta``)
    or ``plain``.  Exact constructions keep an evaluator so the curve can be
    queried at any parameter.
    """

    ts: np.ndarray
    points: np.ndarray
    backend: MetricBackend
    kind_claim: str = "plain"
    alpha: float | None = None
    beta: float | None = None
    evaluator: Callable | None = None
    target: BoundaryPoint | None = None
    diagnostics: dict = field(default_factory=dict)
    _length: float | None = None

    def __post_init__(self):
        self.ts = np.asarray(self.ts, float)
        self.points = self.backend.domain.as_points(self.points).reshape(len(self.ts), self.backend.domain.dim)
        if len(self.ts) < 2 or np.any(np.diff(self.ts) <= 0):
            raise PreconditionError("path parameters must be strictly increasing with at least two samples")

    @property
    def length(self) -> float:
        if self._length is None:
            v, _ = self.backend.values(self.points[:-1], self.points[1:])
            self._length = float(np.sum(v))
        return self._length

    def at(self, t) -> np.ndarray:
        if self.evaluator is None:
            raise PreconditionError("path has no evaluator; only its samples are known")
        return self.evaluator(np.asarray(t, float))

    def distance_matrix(self, idx=None) -> np.ndarray:
        P = self.points if idx is None else self.points[idx]
        v, _ = self.backend.matrix(P, P)
        return v

    def certify_geodesic(self, pairs: int = 200, seed: int = 0) -> float:
        """Largest ``|d(g(s), g(t)) - |s - t||`` over random parameter pairs."""
        if self.evaluator is None:
            D = self.distance_matrix()
            return float(np.max(np.abs(D - np.abs(self.ts[:, None] - self.ts[None, :]))))
        rng = np.random.default_rng(seed)
        s = rng.uniform(self.ts[0], self.ts[-1], pairs)
        t = rng.uniform(self.ts[0], self.ts[-1], pairs)
        d, _ = self.backend.values(self.at(s), self.at(t))
        return float(np.max(np.abs(d - np.abs(s - t))))

    def rows(self) -> list[dict]:
        out = []
        for t, p in zip(self.ts, self.points):
            row = {"t": float(t)}
            for j, c in enumerate(p):
                row[f"re{j}"], row[f"im{j}"] = float(c.real), float(c.imag)
            out.append(row)
        return out


# -- disc and ball building blocks ------------------------------------------------------


def _mobius(u, a):
    return (u - a) / (1 - np.conj(a) * u)


def _mobius_inv(v, a):
    return (v + a) / (1 + np.conj(a) * v)


def disc_geodesic_eval(a: complex, b: complex):
    """Unit-speed disc geodesic from ``a`` to ``b`` and its length."""
    m = _mobius(b, a)
    L = float(np.arctanh(abs(m))) if abs(m) < 1 else np.inf
    direction = m / abs(m) if m != 0 else 1.0
    return (lambda s: _mobius_inv(np.tanh(s) * direction, a)), L


def disc_ray_eval(a: complex, xi: complex):
    direction = _mobius(xi, a)
    direction = direction / abs(direction)
    return lambda s: _mobius_inv(np.tanh(s) * direction, a)


def _ball_slice(z: np.ndarray, v: np.ndarray):
    """The affine disc ``{z + lam v}`` in the ball as ``(mu, rho)``: ``lam = rho*zeta - mu``."""
    mu = complex(np.vdot(v, z))
    rho = float(np.sqrt(max(1 - np.vdot(z, z).real + abs(mu) ** 2, 0.0)))
    return mu, rho


def _ball_line_eval(z, w_or_x, ray: bool):
    z = np.asarray(z, complex)
    far = np.asarray(w_or_x, complex)
    v = (far - z) / np.linalg.norm(far - z)
    mu, rho = _ball_slice(z, v)

    def to_zeta(p):
        return (np.vdot(v, p - z) + mu) / rho

    def from_zeta(zeta):
        zeta = np.asarray(zeta, complex)
        return z + (rho * zeta - mu)[..., None] * v

    a, b = to_zeta(z), to_zeta(far)
    if ray:
        f = disc_ray_eval(a, b / abs(b))
        return (lambda s: from_zeta(f(s))), np.inf
    f, L = disc_geodesic_eval(a, b)
    return (lambda s: from_zeta(f(s))), L


def _polydisc_eval(z, w):
    parts = [disc_geodesic_eval(complex(a), complex(b)) for a, b in zip(z, w)]
    L = max(p[1] for p in parts)

    def f(s):
        s = np.asarray(s, float)
        cols = [p[0](s * (p[1] / L)) if p[1] > 0 else np.full(s.shape, complex(z[j])) for j, p in enumerate(parts)]
        return np.stack(cols, axis=-1)

    return f, L


def _polydisc_ray_eval(o, x):
    funcs = []
    for j, (a, b) in enumerate(zip(o, x)):
        a, b = complex(a), complex(b)
        if abs(abs(b) - 1) <= 1e-12:
            funcs.append(disc_ray_eval(a, b / abs(b)))
        else:
            f, L = disc_geodesic_eval(a, b)
            funcs.append((lambda s, f=f, L=L, a=a: f(np.minimum(s, L)) if L > 0 else np.full(np.shape(s), a)))

    def ray(s):
        s = np.asarray(s, float)
        return np.stack([np.asarray(f(s), complex) * np.ones(s.shape) for f in funcs], axis=-1)

    return ray


def _sample(evaluator, L, n, backend):
    ts = np.linspace(0.0, L, n)
    return ts, backend.domain.as_points(evaluator(ts)).reshape(n, backend.domain.dim)


def geodesic_segment(backend: MetricBackend, z, w, n: int = SEGMENT_SAMPLES) -> Path:
    dom = backend.domain
    z = dom.as_points(z).reshape(dom.dim)
    w = dom.as_points(w).reshape(dom.dim)
    backend.check_interior(z, w)
    if np.array_equal(z, w):
        raise PreconditionError("geodesic segment needs distinct endpoints")
    d, _ = backend.values(z, w)
    if d < 1e-6:
        return Path(np.array([0.0, float(d)]), np.stack([z, w]), backend, "geodesic", 1.0, 0.0, _length=float(d))
    mode = backend.mode
    if mode == "ExactDisc":
        f, L = disc_geodesic_eval(complex(z[0]), complex(w[0]))
        ev = lambda s: f(s)[..., None]
    elif mode == "ExactBall":
        ev, L = _ball_line_eval(z, w, ray=False)
    elif mode == "ExactPolydiscMax":
        ev, L = _polydisc_eval(z, w)
    elif mode == "ConformalPullback":
        m = backend.pullback
        f, L = disc_geodesic_eval(complex(m.forward(z[0])), complex(m.forward(w[0])))
        ev = lambda s: m.inverse(f(s))[..., None]
    else:
        return surrogate_segment(backend, complex(z[0]), complex(w[0]), n)
    ts, pts = _sample(ev, L, n, backend)
    pts[0], pts[-1] = z, w
    return Path(ts, pts, backend, "geodesic", 1.0, 0.0, evaluator=ev, _length=float(L))


def geodesic_ray(backend: MetricBackend, o, x: BoundaryPoint, T_max: float = 8.0, n: int = 161) -> Path:
    """Unit-speed ray from ``o`` landing at ``x`` (exact backends only)."""
    dom = backend.domain
    o = dom.as_points(o).reshape(dom.dim)
    backend.check_interior(o)
    if T_max > MAX_RAY_TIME:
        raise PreconditionError(f"T_max above {MAX_RAY_TIME} leaves double precision")
    mode = backend.mode
    if mode == "ExactDisc":
        f = disc_ray_eval(complex(o[0]), complex(x.coords[0]))
        ev = lambda s: f(s)[..., None]
    elif mode == "ExactBall":
        ev, _ = _ball_line_eval(o, x.coords, ray=True)
    elif mode == "ExactPolydiscMax":
        ev = _polydisc_ray_eval(o, x.coords)
    elif mode == "ConformalPullback":
        m = backend.pullback
        f = disc_ray_eval(complex(m.forward(o[0])), m.boundary_value(x))
        ev = lambda s: m.inverse(f(s))[..., None]
    else:
        raise PreconditionError("rays need an exact or pullback backend")
    ts = np.linspace(0.0, T_max, n)
    pts = dom.as_points(ev(ts)).reshape(n, dom.dim)
    if not np.all(dom.contains_many(pts)):
        raise ConvergenceError("ray samples left the domain; lower T_max")
    path = Path(ts, pts, backend, "geodesic", 1.0, 0.0, evaluator=ev, target=x)
    certify_landing(path, x)
    return path


def certify_landing(path: Path, x: BoundaryPoint, tol: float = LANDING_TOL) -> bool:
    """Three decreasing checkpoints toward ``x``; otherwise attach cluster diagnostics."""
    T = path.ts[-1]
    checks = [path.at(T * f) if path.evaluator else path.points[int(f * (len(path.ts) - 1))] for f in (1 / 3, 2 / 3, 1.0)]
    gaps = [float(np.linalg.norm(np.asarray(c).reshape(-1) - x.coords)) for c in checks]
    landed = gaps[0] > gaps[1] > gaps[2] and gaps[2] < tol
    path.diagnostics["landing_gaps"] = gaps
    path.diagnostics["landed"] = landed
    if not landed:
        path.diagnostics["cluster_set"] = [(bp.label(), f) for bp, f in cluster_set(path)]
    return landed


def oscillating_polydisc_ray(backend: MetricBackend, T_max: float = 8.0, n: int = 1601, amplitude: float = 0.5) -> Path:
    """``(tanh t, a cos t)``: a unit-speed ray of the bidisc whose second coordinate never settles.

    The second coordinate has disc speed at most ``a / (1 - a^2) <= 1`` for
    ``a <= 1/2``, so the max metric keeps the first coordinate in charge.
    """
    if backend.mode != "ExactPolydiscMax" or backend.domain.dim != 2:
        raise PreconditionError("needs the bidisc")
    if amplitude > 0.5:
        raise PreconditionError("amplitude above 1/2 breaks the unit-speed bound")

    def ev(s):
        s = np.asarray(s, float)
        return np.stack([np.tanh(s) + 0j, amplitude * np.cos(s) + 0j], axis=-1)

    ts = np.linspace(0.0, T_max, n)
    return Path(ts, ev(ts), backend, "geodesic", 1.0, 0.0, evaluator=ev)


# -- convex quasi-geodesics -----------------------------------------------------------------


def convex_quasi_geodesic_point(domain: Domain, o, x: BoundaryPoint, t) -> np.ndarray:
    """``x + exp(-2t)(o - x)``; points of shape ``(..., dim)``."""
    if not domain.convex:
        raise PreconditionError(f"{domain.kind} is not convex")
    o = domain.as_points(o).reshape(domain.dim)
    t = np.asarray(t, float)
    return x.coords + np.exp(-2.0 * t)[..., None] * (o - x.coords)


def sigma_path(backend: MetricBackend, o, x: BoundaryPoint, T: float, n: int = 41) -> Path:
    dom = backend.domain
    ts = np.linspace(0.0, T, n)
    ev = lambda t: convex_quasi_geodesic_point(dom, o, x, t)
    return Path(ts, ev(ts), backend, "plain", evaluator=ev, target=x)


@dataclass(frozen=True)
class QuasiGeodesicFit:
    alpha: float
    beta: float
    growth: float
    pairs: int


def _envelope_beta(dt, D, alpha):
    return float(np.max(np.maximum(np.maximum(dt / alpha - D, D - alpha * dt), 0.0)))


def fit_quasi_geodesic_constants(path: Path, idx=None, growth_tol: float = 0.05, alpha_max: float = 100.0) -> QuasiGeodesicFit:
    """Fit ``(alpha, beta)`` with ``|s-t|/alpha - beta <= d <= alpha|s-t| + beta``.

    Every ``alpha`` admits some ``beta`` on a finite sample, so ``alpha`` is
    chosen as the smallest value whose optimal ``beta`` does not grow by more
    than ``growth_tol`` when the parameter range is doubled; ``beta`` is then
    the optimal additive constant on the full range.
    """
    idx = np.arange(len(path.ts)) if idx is None else np.asarray(idx)
    if len(idx) < 10:
        raise PreconditionError("quasi-geodesic fit needs at least 10 samples")
    ts = path.ts[idx]
    D = path.distance_matrix(idx)
    dt = np.abs(ts[:, None] - ts[None, :])
    half = ts <= ts[0] + 0.5 * (ts[-1] - ts[0])
    Dh, dth = D[np.ix_(half, half)], dt[np.ix_(half, half)]

    def growth(a):
        return _envelope_beta(dt, D, a) - _envelope_beta(dth, Dh, a)

    if growth(1.0) <= growth_tol:
        alpha = 1.0
    else:
        if growth(alpha_max) > growth_tol:
            raise ConvergenceError(f"no quasi-geodesic constants with alpha <= {alpha_max}")
        lo, hi = 1.0, alpha_max
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if growth(mid) <= growth_tol:
                hi = mid
            else:
                lo = mid
        alpha = hi
    beta = _envelope_beta(dt, D, alpha)
    path.alpha, path.beta = alpha, beta
    return QuasiGeodesicFit(alpha, beta, growth(alpha), int(len(idx) * (len(idx) - 1) // 2))


# -- surrogate paths -------------------------------------------------------------------------


def _descend(grid, pts: np.ndarray, rel_tol: float = 1e-6, cap: int = DESCENT_CAP):
    """Coordinate-wise descent on interior vertices, alternating parities."""
    pts = pts.copy()
    cost = grid.path_cost(pts)
    step = 0.5 * grid.h
    moves = np.array([1, -1, 1j, -1j])
    dom = grid.domain
    it = 0
    while it < cap:
        it += 1
        before = cost
        for parity in (1, 2):
            idx = np.arange(parity, len(pts) - 1, 2)
            if len(idx) == 0:
                continue
            prev, cur, nxt = pts[idx - 1], pts[idx], pts[idx + 1]

            def local(c):
                dc = np.where(planar_inside(dom, c), planar_delta(dom, c), -1.0)
                w1, ok1 = grid.segment_cost(prev, c, planar_delta(dom, prev), dc)
                w2, ok2 = grid.segment_cost(c, nxt, dc, planar_delta(dom, nxt))
                return np.where(ok1 & ok2 & (dc > 0), w1 + w2, np.inf)

            best = local(cur)
            choice = cur.copy()
            for mv in moves:
                cand = cur + step * mv
                c = local(cand)
                better = c < best
                best = np.where(better, c, best)
                choice = np.where(better, cand, choice)
            pts[idx] = choice
        cost = grid.path_cost(pts)
        if before - cost <= rel_tol * before:
            if step < grid.h / 256:
                return pts, cost, it, True
            step *= 0.5
    return pts, cost, it, False


def surrogate_segment(backend: MetricBackend, z: complex, w: complex, n: int = SEGMENT_SAMPLES, fit_samples: int = 24) -> Path:
    grid = backend.grid
    raw = grid.shortest_path(z, w)
    pts, cost, iters, converged = _descend(grid, raw)
    d = planar_delta(backend.domain, pts)
    w_seg, _ = grid.segment_cost(pts[:-1], pts[1:], d[:-1], d[1:])
    ts = np.concatenate([[0.0], np.cumsum(w_seg)])
    keep = np.concatenate([[True], np.diff(ts) > 0])
    path = Path(ts[keep], pts[keep], backend, "quasi_geodesic" if converged else "plain", _length=float(cost))
    path.diagnostics.update({"descent_iterations": iters, "converged": converged, "graph_length": grid.path_cost(raw)})
    if converged and len(path.ts) >= 10:
        idx = np.unique(np.linspace(0, len(path.ts) - 1, min(fit_samples, len(path.ts))).astype(int))
        if len(idx) >= 10:
            try:
                fit_quasi_geodesic_constants(path, idx)
            except ConvergenceError:
                path.kind_claim = "plain"
    return path


# -- cluster sets -------------------------------------------------------------------------------


def cluster_points(P: np.ndarray, tol: float) -> list[tuple[np.ndarray, int]]:
    """Greedy clustering in sample order: ``(representative, count)`` pairs."""
    reps: list[np.ndarray] = []
    counts: list[int] = []
    for p in P:
        for k, r in enumerate(reps):
            if np.linalg.norm(p - r) <= tol:
                counts[k] += 1
                break
        else:
            reps.append(p.copy())
            counts.append(1)
    return list(zip(reps, counts))


def cluster_set(path: Path, tail: int | None = None, tol: float = LANDING_TOL) -> list[tuple[BoundaryPoint, float]]:
    """Boundary accumulation points of the tail of ``path`` with visit frequencies."""
    dom = path.backend.domain
    tail = tail or max(len(path.ts) // 3, 1)
    P = path.points[-tail:]
    win = dom.window()
    if win is not None:
        z = P[:, 0]
        if np.any((z.real < win[0]) | (z.real > win[1]) | (z.imag < win[2]) | (z.imag > win[3])):
            raise PreconditionError("path tail leaves the window")
    proj = np.array([dom.nearest_boundary(p) for p in P])
    out = []
    for rep, count in cluster_points(proj, tol):
        k = int(np.argmin(np.linalg.norm(proj - rep, axis=-1)))
        out.append((project_boundary_point(dom, P[k]), count / len(P)))
    return out
