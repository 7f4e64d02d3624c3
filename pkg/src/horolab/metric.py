"""Distance oracles and the distance bounds fitted on top of them."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import conformal
from .domains import (
    BoundaryPoint,
    Domain,
    EuclideanBall,
    HalfDisc,
    Polydisc,
    PuncturedBall,
    SlitDisc,
    UnitDisc,
)
from .errors import DimensionError, NotInteriorError, PreconditionError

EXACT_MODES = ("ExactDisc", "ExactBall", "ExactPolydiscMax")
MODES = EXACT_MODES + ("ConformalPullback", "GridSurrogate")
PULLBACK_ERROR = 1e-10
COMPARABILITY = 4.0


@dataclass(frozen=True)
class DistanceValue:
    value: float
    error: float = 0.0
    comparability: float | None = None

    def __float__(self) -> float:
        return self.value


def disc_distance(u, v) -> np.ndarray:
    """Poincare distance with curvature -4 (``arctanh`` of the pseudo-distance)."""
    u = np.asarray(u, complex)
    v = np.asarray(v, complex)
    return np.arcsinh(np.abs(u - v) / np.sqrt(conformal.disc_defect(u) * conformal.disc_defect(v)))


def disc_distance_from_defects(fu, fv, du, dv) -> np.ndarray:
    return np.arcsinh(np.abs(fu - fv) / np.sqrt(du * dv))


def _cmul(a, b):
    # real arithmetic: numpy's fused complex multiply can round a*b and b*a differently
    return (a.real * b.real - a.imag * b.imag) + 1j * (a.real * b.imag + a.imag * b.real)


def ball_distance(Z, W) -> np.ndarray:
    """Kobayashi distance of the unit ball; points on the last axis."""
    Z = np.asarray(Z, complex)
    W = np.asarray(W, complex)
    Z, W = np.broadcast_arrays(Z, W)
    n = Z.shape[-1]
    diff2 = np.sum(np.abs(Z - W) ** 2, axis=-1)
    gram = np.zeros(diff2.shape)
    for i in range(n):
        for j in range(i + 1, n):
            gram = gram + np.abs(_cmul(Z[..., i], W[..., j]) - _cmul(Z[..., j], W[..., i])) ** 2
    rz = np.linalg.norm(Z, axis=-1)
    rw = np.linalg.norm(W, axis=-1)
    dz = (1 - rz) * (1 + rz)
    dw = (1 - rw) * (1 + rw)
    return np.arcsinh(np.sqrt(np.maximum(diff2 - gram, 0.0) / (dz * dw)))


def polydisc_distance(Z, W) -> np.ndarray:
    return np.max(disc_distance(Z, W), axis=-1)


@dataclass(frozen=True)
class MetricBackend:
    """A distance oracle on ``domain``.

    ``mode`` is one of ``ExactDisc``, ``ExactBall``, ``ExactPolydiscMax``,
    ``ConformalPullback`` (with ``map_id``) or ``GridSurrogate`` (with grid
    spacing ``h``).  Surrogate values carry the comparability factor 4.
    """

    domain: Domain
    mode: str
    map_id: str | None = None
    h: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise PreconditionError(f"unknown backend mode {self.mode!r}")
        if self.mode == "ConformalPullback" and self.map_id is None:
            raise PreconditionError("ConformalPullback needs a map id")
        if self.mode == "GridSurrogate":
            if self.h is None or self.h <= 0:
                raise PreconditionError("GridSurrogate needs a positive spacing h")
            if not self.domain.planar:
                raise PreconditionError("GridSurrogate is planar only")

    @property
    def exact(self) -> bool:
        return self.mode in EXACT_MODES

    @property
    def comparability(self) -> float | None:
        return COMPARABILITY if self.mode == "GridSurrogate" else None

    @property
    def label(self) -> str:
        if self.mode == "ConformalPullback":
            return f"ConformalPullback({self.map_id})"
        if self.mode == "GridSurrogate":
            return f"GridSurrogate(h={self.h:g}, comparability={COMPARABILITY:g})"
        return self.mode

    @property
    def limit_exists(self) -> bool:
        """Whether horofunction limits exist at every boundary point (strongly convex model)."""
        return self.mode in ("ExactDisc", "ExactBall") and not isinstance(self.domain, PuncturedBall)

    @cached_property
    def pullback(self) -> conformal.MapDescriptor:
        return conformal.pullback_map(self.map_id)

    @cached_property
    def grid(self):
        from .surrogate import grid_graph

        return grid_graph(self.domain, self.h)

    def to_disc(self, P) -> tuple[np.ndarray, np.ndarray]:
        """Pulled-back disc coordinates and their accurate defects."""
        z = self.domain.as_points(P)[..., 0]
        m = self.pullback
        return m.forward(z), m.to_disc_defect(z)

    def values(self, Z, W) -> tuple[np.ndarray, np.ndarray]:
        """Elementwise distances for broadcastable point arrays; returns ``(value, error)``."""
        Z = self.domain.as_points(Z)
        W = self.domain.as_points(W)
        if self.mode == "ExactDisc":
            v = disc_distance(Z[..., 0], W[..., 0])
        elif self.mode == "ExactBall":
            v = ball_distance(Z, W)
        elif self.mode == "ExactPolydiscMax":
            v = polydisc_distance(Z, W)
        elif self.mode == "ConformalPullback":
            fz, dz = self.to_disc(Z)
            fw, dw = self.to_disc(W)
            v = disc_distance_from_defects(fz, fw, dz, dw)
            return v, np.full(v.shape, PULLBACK_ERROR)
        else:
            Zb, Wb = np.broadcast_arrays(Z, W)
            flatZ = Zb.reshape(-1, 1)
            flatW = Wb.reshape(-1, 1)
            v, e = self.grid.pair_values(flatZ[:, 0], flatW[:, 0])
            return v.reshape(Zb.shape[:-1]), e.reshape(Zb.shape[:-1])
        return v, np.zeros(np.shape(v))

    def matrix(self, A, B) -> tuple[np.ndarray, np.ndarray]:
        """All distances between rows of ``A`` and rows of ``B``."""
        A = self.domain.as_points(A).reshape(-1, self.domain.dim)
        B = self.domain.as_points(B).reshape(-1, self.domain.dim)
        if self.mode == "GridSurrogate":
            return self.grid.cross_values(A[:, 0], B[:, 0])
        return self.values(A[:, None, :], B[None, :, :])

    def check_interior(self, *points) -> None:
        for p in points:
            P = self.domain.as_points(p).reshape(-1, self.domain.dim)
            if not np.all(self.domain._inside(P)):
                raise NotInteriorError(f"point outside {self.domain.kind}")

    def to_json(self) -> dict:
        out = {"mode": self.mode, "domain": self.domain.to_json()}
        if self.map_id:
            out["map_id"] = self.map_id
        if self.h:
            out["h"] = self.h
            out["comparability"] = COMPARABILITY
        return out


def make_backend(domain: Domain, mode: str | None = None, h: float = 0.02, map_id: str | None = None) -> MetricBackend:
    """Pick the most accurate backend available for ``domain`` unless ``mode`` is forced."""
    if mode is None:
        if isinstance(domain, UnitDisc):
            mode = "ExactDisc"
        elif isinstance(domain, EuclideanBall):
            mode = "ExactDisc" if domain.dim == 1 else "ExactBall"
        elif isinstance(domain, Polydisc):
            mode = "ExactPolydiscMax"
        elif isinstance(domain, SlitDisc):
            mode, map_id = "ConformalPullback", "slit_disc"
        elif isinstance(domain, HalfDisc):
            mode, map_id = "ConformalPullback", "half_disc"
        else:
            mode = "GridSurrogate"
    return MetricBackend(domain, mode, map_id, h if mode == "GridSurrogate" else None)


def distance(backend: MetricBackend, z, w) -> DistanceValue:
    dim = backend.domain.dim
    for p in (z, w):
        if backend.domain.as_points(p).shape != (dim,):
            raise DimensionError(f"expected single points of dimension {dim}")
    backend.check_interior(z, w)
    v, e = backend.values(z, w)
    return DistanceValue(float(v), float(e), backend.comparability)


def kobayashi_ball_contains(backend: MetricBackend, o, r: float, z) -> bool:
    d = distance(backend, o, z)
    return d.value + d.error < r


@dataclass
class FitResult:
    """A fitted constant with the values seen along a refinement sequence."""

    value: float
    history: list[float] = field(default_factory=list)
    stable: bool = True
    details: dict = field(default_factory=dict)


def localization_gap(backend_global: MetricBackend, backend_local: MetricBackend, Z, W) -> FitResult:
    """Largest sampled ``k_local - k_global``; flags pairs violating ``k_global <= k_local``."""
    backend_global.check_interior(Z, W)
    backend_local.check_interior(Z, W)
    vg, eg = backend_global.values(Z, W)
    vl, el = backend_local.values(Z, W)
    gap = vl - vg
    violations = int(np.sum(gap < -(eg + el + 1e-12)))
    return FitResult(
        float(np.max(gap)) if gap.size else 0.0,
        details={"violations": violations, "pairs": int(gap.size), "min_gap": float(np.min(gap))},
        stable=violations == 0,
    )


def _require_convex(domain: Domain) -> None:
    if not (domain.convex and domain.bounded):
        raise PreconditionError(f"{domain.kind} is not a bounded convex domain")


def mercer_excess(backend: MetricBackend, o, W) -> np.ndarray:
    """``k(o, w) - 1/2 log(1/delta(w))`` for each sample."""
    W = backend.domain.as_points(W)
    k, _ = backend.values(o, W)
    return k - 0.5 * np.log(1.0 / backend.domain.delta_many(W))


def mercer_constant_fit(backend: MetricBackend, o, W, refinements: int = 3) -> FitResult:
    """Best sampled Mercer constant ``min_w k(o,w) - 1/2 log(1/delta(w))``.

    The history holds the minimum over nested prefixes of the sample; the fit
    is flagged unstable if the last refinement still moves it by more than 0.05.
    """
    _require_convex(backend.domain)
    backend.check_interior(o, W)
    ex = mercer_excess(backend, o, W)
    n = len(ex)
    sizes = [max(1, n >> (refinements - 1 - i)) for i in range(refinements)]
    history = [float(np.min(ex[:s])) for s in sizes]
    stable = len(history) < 2 or abs(history[-1] - history[-2]) <= 0.05
    return FitResult(history[-1], history, stable, {"argmin": int(np.argmin(ex))})


def nikolov_andreev_fit(backend: MetricBackend, x: BoundaryPoint, eps: float, Z, W) -> FitResult:
    """Smallest ``c`` with ``k(z,w) <= log(1 + c|z-w| / sqrt(delta(z) delta(w)))`` on the pairs.

    Stability compares the fit on the first half of the pairs with the full fit.
    """
    _require_convex(backend.domain)
    dom = backend.domain
    Z = dom.as_points(Z)
    W = dom.as_points(W)
    for P in (Z, W):
        if np.any(np.linalg.norm(P - x.coords, axis=-1) > eps):
            raise PreconditionError("sample pair outside the patch")
    backend.check_interior(Z, W)
    k, err = backend.values(Z, W)
    sep = np.linalg.norm(Z - W, axis=-1)
    scale = np.sqrt(dom.delta_many(Z) * dom.delta_many(W))
    ok = sep > 0
    need = np.zeros(len(k))
    need[ok] = np.expm1(k[ok] + err[ok]) * scale[ok] / sep[ok]
    half = max(1, len(need) // 2)
    c_half = float(np.max(need[:half]))
    c_full = float(np.max(need))
    ratio = c_full / c_half if c_half > 0 else (1.0 if c_full == 0 else np.inf)
    return FitResult(c_full, [c_half, c_full], bool(ratio < 1.1), {"ratio": ratio, "pairs": int(len(need))})
