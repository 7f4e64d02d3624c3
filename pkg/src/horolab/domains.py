"""Catalog of model domains and their Euclidean geometry.

Points are complex numpy arrays whose last axis is the complex dimension.
Planar domains also accept plain complex scalars.  Every domain is an
immutable dataclass; the vectorised primitives ``contains_many`` and
``delta_many`` operate on arrays of shape ``(..., dim)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, ClassVar, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionError, InadmissibleSchemeError, NotInteriorError, PreconditionError

TAKAGI_DEPTH = 52
BOUNDARY_TOL = 1e-10
UNIMODULAR_TOL = 1e-12


def takagi(t, depth: int = TAKAGI_DEPTH):
    """Truncated Takagi (blancmange) function ``sum_{j<depth} 2^-j dist(2^j t, Z)``.

    The omitted tail is bounded by ``2**(1 - depth)``.  Works elementwise on
    arrays; every doubling step is exact in binary floating point.
    """
    arr = np.asarray(t, dtype=float)
    x = arr - np.floor(arr)
    total = np.zeros_like(x)
    for j in range(depth):
        total = total + np.abs(x - np.round(x)) * 2.0 ** (-j)
        x = 2.0 * x
        x = x - np.floor(x)
    if np.ndim(t) == 0:
        return float(total)
    return total


def takagi_tail_bound(depth: int = TAKAGI_DEPTH) -> float:
    return 2.0 ** (1 - depth)


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A boundary point together with an admissible inward direction.

    ``coords + t * inward`` is interior for ``0 < t <= t0``.  Two-sided
    boundary points (a slit seen from above or below) carry ``side_tag``.
    """

    coords: np.ndarray
    domain: "Domain"
    inward: np.ndarray
    t0: float
    side_tag: str | None = None
    component: int = 0
    smooth: bool = True

    @property
    def planar(self) -> complex:
        return complex(self.coords[0])

    def same_location(self, other: "BoundaryPoint", tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coords - other.coords)) <= tol)

    def label(self) -> str:
        parts = ",".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.coords)
        return f"({parts})" + (f"[{self.side_tag}]" if self.side_tag else "")

    def __repr__(self) -> str:
        return f"BoundaryPoint{self.label()}"


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n


class Domain:
    """Base class.  Subclasses are frozen dataclasses."""

    kind: ClassVar[str] = "abstract"
    convex: ClassVar[bool] = False
    bounded: ClassVar[bool] = True
    exact_delta: ClassVar[bool] = True

    @property
    def dim(self) -> int:
        return 1

    @property
    def planar(self) -> bool:
        return self.dim == 1

    # -- vectorised primitives -------------------------------------------------
    def as_points(self, p) -> np.ndarray:
        arr = np.asarray(p, dtype=complex)
        if self.dim == 1:
            if arr.ndim == 0:
                return arr.reshape(1)
            if arr.shape[-1] != 1:
                return arr[..., None]
            return arr
        if arr.ndim == 0 or arr.shape[-1] != self.dim:
            raise DimensionError(f"{self.kind} expects points of dimension {self.dim}, got shape {arr.shape}")
        return arr

    def contains_many(self, P) -> np.ndarray:
        return self._inside(self.as_points(P))

    def delta_many(self, P) -> np.ndarray:
        """Boundary distance; meaningful only for interior points."""
        return self._delta(self.as_points(P))

    def _inside(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _delta(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def nearest_boundary(self, p) -> np.ndarray:
        """A boundary point realising the Euclidean distance to the complement."""
        raise NotImplementedError

    def bbox(self) -> tuple[float, float, float, float]:
        raise PreconditionError(f"{self.kind} has no planar bounding box")

    def params(self) -> dict:
        return {}

    def window(self):
        return None

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim, "params": self.params(), "window": self.window()}

    # -- boundary points --------------------------------------------------------
    def boundary_point(self, coords, side_tag: str | None = None) -> BoundaryPoint:
        x = self.as_points(coords).reshape(self.dim).astype(complex)
        d0 = float(self._delta_boundary(x))
        if d0 > BOUNDARY_TOL:
            raise PreconditionError(f"{x} is not a boundary point of {self.kind} (distance {d0:.3g})")
        direction, smooth, component = self._inward(x, side_tag)
        t0 = self._admissible_depth(x, direction)
        return BoundaryPoint(x, self, direction, t0, side_tag, component, smooth)

    def _delta_boundary(self, x: np.ndarray) -> float:
        return float(np.abs(self._delta(x[None, :])[0]))

    def _inward(self, x: np.ndarray, side_tag: str | None) -> tuple[np.ndarray, bool, int]:
        raise NotImplementedError

    def _admissible_depth(self, x: np.ndarray, direction: np.ndarray, start: float = 1.0) -> float:
        t = start
        fractions = np.linspace(0.0, 1.0, 17)[1:]
        for _ in range(40):
            pts = x[None, :] + (t * fractions)[:, None] * direction[None, :]
            if np.all(self._inside(pts)):
                return t
            t *= 0.5
        raise InadmissibleSchemeError(f"no interior segment from {x} along {direction}")

    def siblings(self, x: BoundaryPoint) -> list[BoundaryPoint]:
        """All side-tagged copies of a boundary location (just ``[x]`` if one-sided)."""
        return [x]

    def sample_boundary(self, count: int, seed: int) -> list[BoundaryPoint]:
        if count < 1:
            raise PreconditionError("count must be >= 1")
        rng = np.random.default_rng(seed)
        return self._sample_boundary(count, rng)

    def _sample_boundary(self, count: int, rng: np.random.Generator) -> list[BoundaryPoint]:
        raise NotImplementedError

    def sample_interior(self, count: int, seed: int, min_delta: float = 0.0) -> np.ndarray:
        """Rejection sample ``count`` interior points with ``delta >= min_delta``."""
        rng = np.random.default_rng(seed)
        out: list[np.ndarray] = []
        have = 0
        while have < count:
            cand = self._proposal(max(64, 2 * (count - have)), rng)
            ok = self._inside(cand)
            cand = cand[ok]
            if min_delta > 0:
                cand = cand[self._delta(cand) >= min_delta]
            out.append(cand)
            have += len(cand)
        return np.concatenate(out)[:count]

    def _proposal(self, n: int, rng: np.random.Generator) -> np.ndarray:
        x0, x1, y0, y1 = self.bbox()
        return (rng.uniform(x0, x1, n) + 1j * rng.uniform(y0, y1, n))[:, None]


# ---------------------------------------------------------------------------------
# Balls, discs and polydiscs
# ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class EuclideanBall(Domain):
    n: int = 2
    kind: ClassVar[str] = "EuclideanBall"
    convex: ClassVar[bool] = True

    @property
    def dim(self) -> int:
        return self.n

    def params(self) -> dict:
        return {"dim": self.n}

    def _inside(self, P):
        return np.linalg.norm(P, axis=-1) < 1.0

    def _delta(self, P):
        return 1.0 - np.linalg.norm(P, axis=-1)

    def nearest_boundary(self, p):
        p = self.as_points(p)
        r = np.linalg.norm(p)
        if r == 0:
            q = np.zeros(self.dim, complex)
            q[0] = 1.0
            return q
        return p / r

    def bbox(self):
        if self.dim != 1:
            return super().bbox()
        return (-1.0, 1.0, -1.0, 1.0)

    def _inward(self, x, side_tag):
        return -_unit(x), True, 0

    def _sample_boundary(self, count, rng):
        if self.dim == 1:
            theta = 2 * np.pi * (np.arange(count) + rng.uniform()) / count
            pts = np.exp(1j * theta)[:, None]
        else:
            g = rng.normal(size=(count, self.dim)) + 1j * rng.normal(size=(count, self.dim))
            pts = g / np.linalg.norm(g, axis=-1, keepdims=True)
        return [self.boundary_point(p) for p in pts]

    def _proposal(self, n, rng):
        return rng.uniform(-1, 1, (n, self.dim)) + 1j * rng.uniform(-1, 1, (n, self.dim))


@dataclass(frozen=True)
class UnitDisc(EuclideanBall):
    n: int = 1
    kind: ClassVar[str] = "UnitDisc"

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class Polydisc(Domain):
    n: int = 2
    kind: ClassVar[str] = "Polydisc"
    convex: ClassVar[bool] = True

    @property
    def dim(self) -> int:
        return self.n

    def params(self) -> dict:
        return {"dim": self.n}

    def _inside(self, P):
        return np.max(np.abs(P), axis=-1) < 1.0

    def _delta(self, P):
        return 1.0 - np.max(np.abs(P), axis=-1)

    def nearest_boundary(self, p):
        p = self.as_points(p).copy()
        j = int(np.argmax(np.abs(p)))
        p[j] = p[j] / abs(p[j]) if p[j] != 0 else 1.0
        return p

    def unimodular_mask(self, x: np.ndarray) -> np.ndarray:
        return np.abs(np.abs(x) - 1.0) <= UNIMODULAR_TOL

    def is_shilov(self, x: BoundaryPoint) -> bool:
        return bool(np.all(self.unimodular_mask(x.coords)))

    def _inward(self, x, side_tag):
        mask = self.unimodular_mask(x)
        direction = np.where(mask, -x / np.where(mask, np.abs(x), 1.0), 0.0).astype(complex)
        return direction, int(mask.sum()) == 1, int(np.argmax(mask))

    def _sample_boundary(self, count, rng):
        """Alternates Shilov points (all coordinates unimodular) with face points."""
        out = []
        for i in range(count):
            theta = rng.uniform(0, 2 * np.pi, self.n)
            if i % 2 == 0:
                pts = np.exp(1j * theta)
            else:
                face = (i // 2) % self.n
                rad = np.sqrt(rng.uniform(0, 1, self.n)) * 0.999
                pts = rad * np.exp(1j * theta)
                pts[face] = np.exp(1j * theta[face])
            out.append(self.boundary_point(pts))
        return out

    def _proposal(self, n, rng):
        r = np.sqrt(rng.uniform(0, 1, (n, self.n)))
        return r * np.exp(1j * rng.uniform(0, 2 * np.pi, (n, self.n)))


@dataclass(frozen=True)
class PuncturedBall(EuclideanBall):
    """Ball minus one point.  The puncture is a removable (pluripolar) set."""

    n: int = 2
    puncture: tuple = (0j, 0j)
    kind: ClassVar[str] = "PuncturedBall"
    convex: ClassVar[bool] = False

    def __post_init__(self):
        if len(self.puncture) != self.n:
            raise DimensionError("puncture dimension mismatch")
        if np.linalg.norm(np.asarray(self.puncture, complex)) >= 1:
            raise PreconditionError("puncture must lie inside the ball")

    @cached_property
    def _p(self) -> np.ndarray:
        return np.asarray(self.puncture, complex)

    def params(self):
        return {"dim": self.n, "puncture": [[c.real, c.imag] for c in map(complex, self.puncture)]}

    def _inside(self, P):
        return (np.linalg.norm(P, axis=-1) < 1.0) & (np.linalg.norm(P - self._p, axis=-1) > 0.0)

    def _delta(self, P):
        return np.minimum(1.0 - np.linalg.norm(P, axis=-1), np.linalg.norm(P - self._p, axis=-1))

    def nearest_boundary(self, p):
        p = self.as_points(p)
        if np.linalg.norm(p - self._p) <= 1 - np.linalg.norm(p):
            return self._p.copy()
        return super().nearest_boundary(p)

    def _inward(self, x, side_tag):
        if np.linalg.norm(x - self._p) <= BOUNDARY_TOL:
            e = np.zeros(self.n, complex)
            e[0] = 1.0
            return e, False, 1
        return -_unit(x), True, 0

    def _sample_boundary(self, count, rng):
        out = super()._sample_boundary(max(count - 1, 1), rng)
        return out + [self.boundary_point(self._p)]


# ---------------------------------------------------------------------------------
# Planar domains
# ---------------------------------------------------------------------------------


def _segment_distance(z: np.ndarray, a: complex, b: complex) -> np.ndarray:
    ab = b - a
    t = np.clip(((z - a) * np.conj(ab)).real / abs(ab) ** 2, 0.0, 1.0)
    return np.abs(z - (a + t * ab))


@dataclass(frozen=True)
class SlitDisc(Domain):
    """The unit disc with the segment ``[0, 1)`` removed."""

    kind: ClassVar[str] = "SlitDisc"

    def _inside(self, P):
        z = P[..., 0]
        on_slit = (z.imag == 0) & (z.real >= 0) & (z.real < 1)
        return (np.abs(z) < 1.0) & ~on_slit

    def _delta(self, P):
        z = P[..., 0]
        return np.minimum(1.0 - np.abs(z), _segment_distance(z, 0.0, 1.0))

    def bbox(self):
        return (-1.0, 1.0, -1.0, 1.0)

    def nearest_boundary(self, p):
        z = complex(self.as_points(p)[0])
        dc = 1 - abs(z)
        s = min(max(z.real, 0.0), 1.0)
        if abs(z - s) < dc:
            return np.array([complex(s, 0.0)])
        return np.array([z / abs(z) if z != 0 else 1.0 + 0j])

    def _inward(self, x, side_tag):
        z = complex(x[0])
        on_circle = abs(abs(z) - 1) <= UNIMODULAR_TOL
        if on_circle and abs(z - 1) > 1e-12:
            return np.array([-z / abs(z)]), True, 0
        if abs(z) <= 1e-15:
            return np.array([-1.0 + 0j]), False, 1
        if side_tag not in ("above", "below"):
            raise PreconditionError("slit points need side_tag 'above' or 'below'")
        if abs(z - 1) <= 1e-12:
            d = (-1 + 1j) if side_tag == "above" else (-1 - 1j)
            return np.array([d / abs(d)]), False, 1
        return np.array([1j if side_tag == "above" else -1j]), True, 1

    def _admissible_depth(self, x, direction, start=1.0):
        z = complex(x[0])
        if abs(z.imag) <= 1e-15 and 0 < z.real < 1:
            # keep the probe segment shorter than the distance to either slit end
            start = min(start, z.real, 1 - z.real)
        return super()._admissible_depth(x, direction, start)

    def siblings(self, x):
        z = complex(x.coords[0])
        if x.side_tag is None:
            return [x]
        return [self.boundary_point(z, "above"), self.boundary_point(z, "below")]

    def _sample_boundary(self, count, rng):
        n_circle = (count + 1) // 2
        n_slit = count - n_circle
        theta = 2 * np.pi * (np.arange(n_circle) + rng.uniform(0.05, 0.95)) / n_circle
        out = [self.boundary_point(np.exp(1j * t)) for t in theta]
        if n_slit:
            s = (np.arange(n_slit) + rng.uniform(0.1, 0.9, n_slit)) / n_slit
            for v in s:
                out.append(self.boundary_point(complex(v), "above"))
                out.append(self.boundary_point(complex(v), "below"))
        return out


@dataclass(frozen=True)
class HalfDisc(Domain):
    """Upper half of the unit disc."""

    kind: ClassVar[str] = "HalfDisc"
    convex: ClassVar[bool] = True

    def _inside(self, P):
        z = P[..., 0]
        return (np.abs(z) < 1.0) & (z.imag > 0)

    def _delta(self, P):
        z = P[..., 0]
        return np.minimum(1.0 - np.abs(z), z.imag)

    def bbox(self):
        return (-1.0, 1.0, 0.0, 1.0)

    def nearest_boundary(self, p):
        z = complex(self.as_points(p)[0])
        if z.imag <= 1 - abs(z):
            return np.array([complex(z.real, 0.0)])
        return np.array([z / abs(z)])

    def _inward(self, x, side_tag):
        z = complex(x[0])
        if abs(z - 1) <= 1e-12 or abs(z + 1) <= 1e-12:
            d = -z + 1j
            return np.array([d / abs(d)]), False, 0
        if abs(z.imag) <= 1e-15:
            return np.array([1j]), True, 1
        return np.array([-z / abs(z)]), True, 0

    def _sample_boundary(self, count, rng):
        n_arc = (count + 1) // 2
        n_dia = count - n_arc
        theta = np.pi * (np.arange(n_arc) + rng.uniform(0.05, 0.95, n_arc)) / n_arc
        out = [self.boundary_point(np.exp(1j * t)) for t in theta]
        s = -1 + 2 * (np.arange(n_dia) + rng.uniform(0.05, 0.95, n_dia)) / max(n_dia, 1)
        out += [self.boundary_point(complex(v)) for v in s]
        return out


@dataclass(frozen=True)
class ConvexPolygon(Domain):
    vertices: tuple = (1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j)
    kind: ClassVar[str] = "ConvexPolygon"
    convex: ClassVar[bool] = True

    def __post_init__(self):
        v = np.asarray(self.vertices, complex)
        if len(v) < 3:
            raise PreconditionError("polygon needs at least 3 vertices")
        area = 0.5 * np.sum((v * np.conj(np.roll(v, -1))).imag) * -1
        if area < 0:
            object.__setattr__(self, "vertices", tuple(v[::-1]))
            v = v[::-1]
        e = np.roll(v, -1) - v
        cross = (np.conj(e) * np.roll(e, -1)).imag
        if np.any(cross <= 0):
            raise PreconditionError("vertices do not form a strictly convex polygon")

    @cached_property
    def _v(self) -> np.ndarray:
        return np.asarray(self.vertices, complex)

    def params(self):
        return {"vertices": [[c.real, c.imag] for c in self._v]}

    def _edge_normals(self):
        e = np.roll(self._v, -1) - self._v
        return 1j * e / np.abs(e)

    def _signed(self, z):
        n = self._edge_normals()
        return ((z[..., None] - self._v) * np.conj(n)).real

    def _inside(self, P):
        return np.all(self._signed(P[..., 0]) > 0, axis=-1)

    def _delta(self, P):
        return np.min(self._signed(P[..., 0]), axis=-1)

    def bbox(self):
        return (self._v.real.min(), self._v.real.max(), self._v.imag.min(), self._v.imag.max())

    def nearest_boundary(self, p):
        z = complex(self.as_points(p)[0])
        s = self._signed(np.array(z))
        k = int(np.argmin(s))
        return np.array([z - s[k] * self._edge_normals()[k]])

    def _inward(self, x, side_tag):
        z = complex(x[0])
        n = self._edge_normals()
        for k, v in enumerate(self._v):
            if abs(z - v) <= 1e-12:
                d = n[k] + n[k - 1]
                return np.array([d / abs(d)]), False, 0
        k = int(np.argmin(np.abs(self._signed(np.array(z)))))
        return np.array([n[k]]), True, 0

    def edge_midpoint(self, k: int = 0) -> BoundaryPoint:
        return self.boundary_point(0.5 * (self._v[k] + self._v[(k + 1) % len(self._v)]))

    def _sample_boundary(self, count, rng):
        v = self._v
        lengths = np.abs(np.roll(v, -1) - v)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        s = (np.arange(count) + rng.uniform(0.05, 0.95, count)) / count * cum[-1]
        out = []
        for si in s:
            k = int(np.searchsorted(cum, si, side="right") - 1)
            frac = (si - cum[k]) / lengths[k]
            out.append(self.boundary_point(v[k] + frac * (v[(k + 1) % len(v)] - v[k])))
        return out


def square(half_width: float = 1.0) -> ConvexPolygon:
    h = half_width
    return ConvexPolygon((h + h * 1j, -h + h * 1j, -h - h * 1j, h - h * 1j))


@dataclass(frozen=True)
class LatticeDiscComplement(Domain):
    """Plane minus closed discs of radius 1/4 at the Gaussian integers, cut to a box window."""

    window_half_width: float | None = 4.0
    hole_radius: float = 0.25
    kind: ClassVar[str] = "LatticeDiscComplement"
    bounded: ClassVar[bool] = False

    def __post_init__(self):
        if self.hole_radius != 0.25:
            raise PreconditionError("hole radius is fixed at 1/4")

    def window(self):
        w = self.window_half_width
        return None if w is None else [-w, w, -w, w]

    def params(self):
        return {"hole_radius": self.hole_radius}

    def _W(self) -> float:
        if self.window_half_width is None:
            raise PreconditionError("LatticeDiscComplement needs a finite window for this operation")
        return float(self.window_half_width)

    def hole_centers(self) -> np.ndarray:
        W = int(math.floor(self._W()))
        m = np.arange(-W, W + 1)
        return (m[:, None] + 1j * m[None, :]).ravel()

    def _hole_gap(self, z):
        g = np.round(z.real) + 1j * np.round(z.imag)
        return np.abs(z - g) - self.hole_radius

    def _inside(self, P):
        z = P[..., 0]
        ok = self._hole_gap(z) > 0
        if self.window_half_width is not None:
            W = self._W()
            ok &= (np.abs(z.real) < W) & (np.abs(z.imag) < W)
        return ok

    def _delta(self, P):
        z = P[..., 0]
        d = self._hole_gap(z)
        if self.window_half_width is not None:
            W = self._W()
            d = np.minimum(d, np.minimum(W - np.abs(z.real), W - np.abs(z.imag)))
        return d

    def bbox(self):
        W = self._W()
        return (-W, W, -W, W)

    def nearest_boundary(self, p):
        z = complex(self.as_points(p)[0])
        g = complex(round(z.real), round(z.imag))
        gap = abs(z - g) - self.hole_radius
        W = self._W()
        fx, fy = W - abs(z.real), W - abs(z.imag)
        if gap <= min(fx, fy):
            u = (z - g) / abs(z - g)
            return np.array([g + self.hole_radius * u])
        if fx <= fy:
            return np.array([complex(math.copysign(W, z.real), z.imag)])
        return np.array([complex(z.real, math.copysign(W, z.imag))])

    def _inward(self, x, side_tag):
        z = complex(x[0])
        W = self._W()
        if abs(abs(z.real) - W) <= 1e-12:
            return np.array([complex(-math.copysign(1, z.real), 0)]), abs(abs(z.imag) - W) > 1e-12, 1
        if abs(abs(z.imag) - W) <= 1e-12:
            return np.array([complex(0, -math.copysign(1, z.imag))]), True, 1
        g = complex(round(z.real), round(z.imag))
        return np.array([(z - g) / abs(z - g)]), True, 2

    def _admissible_depth(self, x, direction, start=1.0):
        return super()._admissible_depth(x, direction, start=0.25)

    def _sample_boundary(self, count, rng):
        W = self._W()
        n_frame = max(count // 4, 1)
        out = []
        s = (np.arange(n_frame) + rng.uniform(0.05, 0.95, n_frame)) / n_frame * 8 * W
        for si in s:
            side, off = divmod(si, 2 * W)
            off -= W
            z = [complex(W, off), complex(-off, W), complex(-W, -off), complex(off, -W)][int(side)]
            if self._hole_gap(np.array(z)) > 0:
                out.append(self.boundary_point(z))
        centers = self.hole_centers()
        inner = centers[(np.abs(centers.real) < W - 0.25) & (np.abs(centers.imag) < W - 0.25)]
        k = 0
        while len(out) < count:
            g = inner[rng.integers(len(inner))]
            out.append(self.boundary_point(g + self.hole_radius * np.exp(1j * rng.uniform(0, 2 * np.pi))))
            k += 1
        return out


@dataclass(frozen=True)
class TakagiDomain(Domain):
    """Region between the Takagi graph and the line ``y = 2`` over ``0 < t < 1``.

    Points are ``t + i y``.  Boundary distances use the dyadic polyline of level
    ``polyline_level``; they are exact up to ``2**-polyline_level``.
    """

    depth: int = TAKAGI_DEPTH
    polyline_level: int = 12
    kind: ClassVar[str] = "TakagiDomain"
    exact_delta: ClassVar[bool] = False

    def params(self):
        return {"depth": self.depth, "polyline_level": self.polyline_level}

    @cached_property
    def _polyline(self):
        n = self.polyline_level
        t = np.arange(2**n + 1) / 2**n
        y = takagi(t, min(self.depth, n))
        return t, y, cKDTree(np.column_stack([t, y]))

    @property
    def delta_error(self) -> float:
        return 2.0 ** (-min(self.depth, self.polyline_level))

    def graph_distance(self, z: np.ndarray) -> np.ndarray:
        t, y, tree = self._polyline
        pts = np.column_stack([np.ravel(z.real), np.ravel(z.imag)])
        _, idx = tree.query(pts, k=4)
        best = np.full(len(pts), np.inf)
        zz = np.ravel(z)
        for col in range(idx.shape[1]):
            i = idx[:, col]
            for a_i, b_i in ((i - 1, i), (i, i + 1)):
                a_i = np.clip(a_i, 0, len(t) - 1)
                b_i = np.clip(b_i, 0, len(t) - 1)
                a = t[a_i] + 1j * y[a_i]
                b = t[b_i] + 1j * y[b_i]
                ab = b - a
                denom = np.where(np.abs(ab) > 0, np.abs(ab) ** 2, 1.0)
                s = np.clip(((zz - a) * np.conj(ab)).real / denom, 0, 1)
                best = np.minimum(best, np.abs(zz - (a + s * ab)))
        return best.reshape(np.shape(z))

    def _inside(self, P):
        z = P[..., 0]
        tt, yy = z.real, z.imag
        inside = (tt > 0) & (tt < 1) & (yy < 2)
        out = np.zeros(z.shape, bool)
        if np.any(inside):
            out[inside] = yy[inside] > takagi(tt[inside], self.depth)
        return out

    def _delta(self, P):
        z = P[..., 0]
        d = np.minimum(np.minimum(z.real, 1 - z.real), 2 - z.imag)
        return np.minimum(d, self.graph_distance(z))

    def bbox(self):
        return (0.0, 1.0, 0.0, 2.0)

    def nearest_boundary(self, p):
        z = complex(self.as_points(p)[0])
        t, y, tree = self._polyline
        cands = [complex(0, z.imag), complex(1, z.imag), complex(z.real, 2)]
        _, i = tree.query([z.real, z.imag])
        cands.append(complex(t[i], y[i]))
        return np.array([min(cands, key=lambda c: abs(c - z))])

    def _delta_boundary(self, x):
        z = complex(x[0])
        if 0 <= z.real <= 1 and abs(z.imag - takagi(z.real, self.depth)) <= BOUNDARY_TOL:
            return 0.0
        return float(abs(min(z.real, 1 - z.real, 2 - z.imag)))

    def _inward(self, x, side_tag):
        z = complex(x[0])
        if abs(z.imag - takagi(z.real, self.depth)) <= BOUNDARY_TOL and 0 < z.real < 1:
            return np.array([1j]), False, 0
        if abs(z.real) <= 1e-12:
            return np.array([1.0 + 0j]), True, 1
        if abs(z.real - 1) <= 1e-12:
            return np.array([-1.0 + 0j]), True, 1
        return np.array([-1j]), True, 1

    def _sample_boundary(self, count, rng):
        n_graph = max(count // 2, 1)
        t = (np.arange(n_graph) + rng.uniform(0.05, 0.95, n_graph)) / n_graph
        out = [self.boundary_point(complex(ti, takagi(ti, self.depth))) for ti in t]
        rest = count - n_graph
        for k in range(rest):
            u = rng.uniform(0.05, 0.95)
            side = k % 3
            z = [complex(0, 2 * u), complex(1, 2 * u), complex(u, 2)][side]
            out.append(self.boundary_point(z))
        return out


# ---------------------------------------------------------------------------------
# Functional API
# ---------------------------------------------------------------------------------


def contains(domain: Domain, p) -> bool:
    P = domain.as_points(p)
    if P.shape != (domain.dim,):
        raise DimensionError(f"expected a single point of dimension {domain.dim}")
    return bool(domain._inside(P[None, :])[0])


def boundary_distance(domain: Domain, p) -> float:
    if not contains(domain, p):
        raise NotInteriorError(f"{p} is not an interior point of {domain.kind}")
    return float(domain._delta(domain.as_points(p)[None, :])[0])


def project_boundary_point(domain: Domain, p) -> BoundaryPoint:
    """Nearest boundary point to ``p``; two-sided points take the side ``p`` lies on."""
    q = domain.nearest_boundary(p)
    try:
        return domain.boundary_point(q)
    except PreconditionError:
        side = "above" if complex(domain.as_points(p)[0]).imag >= 0 else "below"
        return domain.boundary_point(q, side)


def sample_boundary(domain: Domain, count: int, seed: int) -> list[BoundaryPoint]:
    return domain.sample_boundary(count, seed)


# ---------------------------------------------------------------------------------
# Approach schemes
# ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class Scheme:
    """How an approach sequence ``w_k -> x`` is generated.

    ``normal``: along the inward direction with depth ``t0 * ratio**k``.
    ``cone``: inward direction rotated by ``angle`` (radians, ``|angle| < pi/2``).
    ``tangential``: depth ``r`` along the normal plus ``c*sqrt(r)`` along the
    complex tangent; needs a smooth point.
    ``skew``: for several variables, coordinate ``coord`` moves at depth ``r``
    while the others move at depth ``sqrt(r)``.
    ``custom``: ``func(k) -> point`` for ``k = 1..n``.
    """

    kind: str = "normal"
    angle: float = 0.0
    coord: int = 0
    func: Callable | None = field(default=None, compare=False)

    @classmethod
    def parse(cls, spec) -> "Scheme":
        if isinstance(spec, Scheme):
            return spec
        if callable(spec):
            return cls("custom", func=spec)
        name, _, arg = str(spec).partition(":")
        if name == "normal":
            return cls("normal")
        if name == "cone":
            return cls("cone", angle=float(arg or 0.5))
        if name == "tangential":
            return cls("tangential")
        if name == "skew":
            return cls("skew", coord=int(arg or 0))
        raise InadmissibleSchemeError(f"unknown scheme {spec!r}")

    def name(self) -> str:
        if self.kind == "cone":
            return f"cone:{self.angle:g}"
        if self.kind == "skew":
            return f"skew:{self.coord}"
        return self.kind


def approach_sequence(
    domain: Domain,
    x: BoundaryPoint,
    scheme="normal",
    n: int = 40,
    ratio: float = 0.5,
    floor: float = 0.0,
) -> np.ndarray:
    """Interior points ``w_1..w_n`` converging to ``x``; shape ``(n, dim)``.

    With ``floor > 0`` the sequence is cut before the first point whose
    boundary distance drops below ``floor``.
    """
    if n < 2:
        raise PreconditionError("n must be >= 2")
    sch = Scheme.parse(scheme)
    k = np.arange(1, n + 1)
    r = x.t0 * ratio**k
    d = x.inward
    if sch.kind == "normal":
        W = x.coords + r[:, None] * d
    elif sch.kind == "cone":
        if abs(sch.angle) >= np.pi / 2:
            raise InadmissibleSchemeError("cone angle must be below pi/2")
        if not x.smooth:
            raise InadmissibleSchemeError("cone approach needs a smooth boundary point")
        W = None
        scale = np.cos(sch.angle)
        for _ in range(12):
            W = x.coords + (scale * r)[:, None] * (d * np.exp(1j * sch.angle))
            if np.all(domain._inside(W)):
                break
            scale *= 0.5
    elif sch.kind == "tangential":
        if not x.smooth:
            raise InadmissibleSchemeError("tangential approach needs a smooth boundary point")
        tangent = 1j * d
        c = 0.5 * math.sqrt(x.t0)
        for _ in range(12):
            W = x.coords + r[:, None] * d + (c * np.sqrt(r))[:, None] * tangent
            if np.all(domain._inside(W)):
                break
            c *= 0.5
    elif sch.kind == "skew":
        if domain.dim < 2 or not (0 <= sch.coord < domain.dim):
            raise InadmissibleSchemeError("skew approach needs a coordinate of a product domain")
        if d[sch.coord] == 0:
            raise InadmissibleSchemeError(f"coordinate {sch.coord} does not reach the boundary at {x.label()}")
        depth = np.sqrt(r)[:, None] * np.sqrt(x.t0) * np.ones(domain.dim)
        depth[:, sch.coord] = r
        W = x.coords + depth * d
    elif sch.kind == "custom":
        W = domain.as_points(np.array([sch.func(int(j)) for j in k]))
    else:
        raise InadmissibleSchemeError(sch.kind)
    W = np.asarray(W, complex).reshape(n, domain.dim)
    inside = domain._inside(W)
    if floor > 0:
        keep = inside & (domain._delta(W) >= floor)
        stop = int(np.argmin(keep)) if not np.all(keep) else n
        if stop < 2:
            raise InadmissibleSchemeError("approach sequence truncated to fewer than 2 points")
        return W[:stop]
    if not np.all(inside):
        raise InadmissibleSchemeError(f"scheme {sch.name()} leaves the domain at {x.label()}")
    return W


def domain_from_json(spec: dict) -> Domain:
    kind = spec["kind"]
    params = spec.get("params", {}) or {}
    dim = spec.get("dim", 1)
    if kind == "UnitDisc":
        return UnitDisc()
    if kind == "EuclideanBall":
        return EuclideanBall(int(params.get("dim", dim)))
    if kind == "Polydisc":
        return Polydisc(int(params.get("dim", dim)))
    if kind == "SlitDisc":
        return SlitDisc()
    if kind == "HalfDisc":
        return HalfDisc()
    if kind == "ConvexPolygon":
        return ConvexPolygon(tuple(complex(a, b) for a, b in params["vertices"]))
    if kind == "LatticeDiscComplement":
        win = spec.get("window")
        W = params.get("window_half_width", None if win is None else float(win[1]))
        return LatticeDiscComplement(4.0 if W is None else float(W), float(params.get("hole_radius", 0.25)))
    if kind == "TakagiDomain":
        return TakagiDomain(int(params.get("depth", TAKAGI_DEPTH)), int(params.get("polyline_level", 12)))
    if kind == "PuncturedBall":
        p = params.get("puncture", [[0, 0]] * int(params.get("dim", dim)))
        return PuncturedBall(len(p), tuple(complex(a, b) for a, b in p))
    raise PreconditionError(f"unknown domain kind {kind!r}")


def boundary_samples_rows(points: Sequence[BoundaryPoint]) -> list[dict]:
    """Rows for the boundary-sample CSV (planar: re, im, component_id, side_tag)."""
    rows = []
    for bp in points:
        row: dict = {}
        if bp.domain.dim == 1:
            row["re"], row["im"] = bp.coords[0].real, bp.coords[0].imag
        else:
            for j, c in enumerate(bp.coords):
                row[f"re{j}"], row[f"im{j}"] = c.real, c.imag
        row["component_id"] = bp.component
        row["side_tag"] = bp.side_tag or ""
        rows.append(row)
    return rows
