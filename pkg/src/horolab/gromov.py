"""Gromov products, four-point hyperbolicity, visibility and the small-horosphere witness."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import BoundaryPoint, Scheme, approach_sequence
from .errors import PreconditionError
from .geodesics import Path
from .horospheres import MembershipVerdict, horosphere_membership
from .metric import MetricBackend

SLOPE_TOL = 0.05
SLOPE_STEPS = 10
MAX_SAMPLE = 200


def gromov_product(backend: MetricBackend, o, z, w) -> tuple[float, float]:
    """``(k(o,z) + k(o,w) - k(z,w)) / 2`` with its propagated error."""
    backend.check_interior(o, z, w)
    oz, e1 = backend.values(o, z)
    ow, e2 = backend.values(o, w)
    zw, e3 = backend.values(z, w)
    return float(0.5 * (oz + ow - zw)), float(0.5 * (e1 + e2 + e3))


def gromov_products(backend: MetricBackend, o, Z, W) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise products for paired rows of ``Z`` and ``W``."""
    oz, e1 = backend.values(o, Z)
    ow, e2 = backend.values(o, W)
    zw, e3 = backend.values(Z, W)
    return 0.5 * (oz + ow - zw), 0.5 * (e1 + e2 + e3)


@dataclass
class GromovReport:
    o: np.ndarray
    x: BoundaryPoint
    y: BoundaryPoint
    products: np.ndarray
    errors: np.ndarray
    verdict: str
    bound: float | None = None
    growth: float | None = None
    delta: float | None = None
    schedules: tuple = ()

    def to_json(self) -> dict:
        return {
            "x": self.x.label(),
            "y": self.y.label(),
            "verdict": self.verdict,
            "bound": self.bound,
            "growth": self.growth,
            "delta": self.delta,
            "schedules": list(self.schedules),
            "products": [float(v) for v in self.products],
        }


def _tail_slope(vals: np.ndarray, steps: int = SLOPE_STEPS) -> float:
    tail = vals[-steps:]
    return float(np.polyfit(np.arange(len(tail)), tail, 1)[0])


def _paired(backend, x, y, schedules, n_max):
    if x.same_location(y) and x.side_tag == y.side_tag:
        raise PreconditionError("visibility needs two distinct boundary points")
    sx, sy = schedules
    Zs = approach_sequence(backend.domain, x, sx, n_max)
    Ws = approach_sequence(backend.domain, y, sy, n_max)
    return Zs, Ws


def visibility_probe(backend: MetricBackend, o, x: BoundaryPoint, y: BoundaryPoint,
                     schedules=("normal", "normal"), n_max: int = 40) -> GromovReport:
    """Gromov products ``<z_k | w_k>_o`` along paired approach schedules.

    Divergence is declared when the last ten products climb faster than 0.05
    per step; otherwise the running maximum is reported as the bound.
    """
    Zs, Ws = _paired(backend, x, y, schedules, n_max)
    prod, err = gromov_products(backend, o, Zs, Ws)
    slope = _tail_slope(prod)
    names = tuple(Scheme.parse(s).name() for s in schedules)
    o = backend.domain.as_points(o).reshape(backend.domain.dim)
    if slope > SLOPE_TOL:
        return GromovReport(o, x, y, prod, err, "DivergenceEvidence", growth=slope, schedules=names)
    return GromovReport(o, x, y, prod, err, "BoundedEvidence", bound=float(np.max(prod + err)), growth=slope,
                        schedules=names)


@dataclass(frozen=True)
class EmbeddingEstimate:
    liminf: float
    positive: bool
    margin: float


def hyperbolic_embedding_probe(backend: MetricBackend, x: BoundaryPoint, y: BoundaryPoint,
                               schedules=("normal", "normal"), n_max: int = 40, tail: int = 8,
                               margin: float = 1e-3) -> EmbeddingEstimate:
    """Smallest distance between tail points of the two approach sequences."""
    Zs, Ws = _paired(backend, x, y, schedules, n_max)
    D, E = backend.matrix(Zs[-tail:], Ws[-tail:])
    low = float(np.min(D - E))
    return EmbeddingEstimate(low, low > margin, margin)


def four_point_delta(backend: MetricBackend, S) -> float:
    """Largest four-point defect over all quadruples of the sample.

    For every base point ``w`` this is ``max_{x,y} [max_z min((x|z)_w, (z|y)_w) - (x|y)_w]``,
    which equals half the gap between the two largest pair sums of a quadruple.
    """
    S = backend.domain.as_points(S).reshape(-1, backend.domain.dim)
    n = len(S)
    if n < 4:
        raise PreconditionError("four-point delta needs at least 4 points")
    if n > MAX_SAMPLE:
        raise PreconditionError(f"sample above the exhaustive cap of {MAX_SAMPLE}")
    G, _ = backend.matrix(S, S)
    G = 0.5 * (G + G.T)
    np.fill_diagonal(G, 0.0)
    return delta_from_matrix(G)


def delta_from_matrix(G: np.ndarray) -> float:
    n = len(G)
    best = 0.0
    for w in range(n):
        P = 0.5 * (G[w][:, None] + G[w][None, :] - G)
        # (max, min) product: M[x, y] = max_z min(P[x, z], P[z, y])
        M = np.max(np.minimum(P[:, :, None], P[None, :, :]), axis=1)
        best = max(best, float(np.max(M - P)))
    return best


@dataclass(frozen=True)
class Witness:
    T: float
    z_T: np.ndarray
    verdict: MembershipVerdict
    delta: float
    R: float


def small_horosphere_witness(backend: MetricBackend, ray: Path, delta: float, R: float) -> Witness:
    """Point ``ray(T)`` with ``T = 10*delta - 1/2 log R + 0.1`` and its small-horosphere verdict."""
    if ray.kind_claim != "geodesic" or not ray.diagnostics.get("landed", False) or ray.target is None:
        raise PreconditionError("witness needs a certified geodesic ray with a landing point")
    if delta < 0 or R <= 0:
        raise PreconditionError("delta must be >= 0 and R > 0")
    T = 10 * delta - 0.5 * np.log(R) + 0.1
    z_T = np.asarray(ray.at(np.array([T])), complex).reshape(-1)
    o = ray.points[0]
    verdict = horosphere_membership(backend, o, ray.target, R, z_T, "small")
    return Witness(float(T), z_T, verdict, float(delta), float(R))


@dataclass
class DeltaTable:
    rows: list = field(default_factory=list)

    def increasing(self) -> bool:
        d = [r["delta"] for r in self.rows]
        return all(b > a for a, b in zip(d, d[1:]))
