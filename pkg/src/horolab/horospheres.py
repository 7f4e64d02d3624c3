"""Horofunction estimates, small/big horosphere membership and boundary probes.

For a pole ``o``, an observation point ``z`` and a target ``x`` the lab follows
``k(z, w) - k(o, w)`` along a finite menu of approach schemes ``w -> x``.  The
largest stabilised tail value over the menu stands in for the limsup (small
horosphere) and the smallest for the liminf (big horosphere).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import conformal
from .domains import (
    BoundaryPoint,
    Domain,
    Polydisc,
    PuncturedBall,
    Scheme,
    approach_sequence,
)
from .errors import InadmissibleSchemeError, PreconditionError
from .metric import MetricBackend

WINDOW = 8
OSCILLATION_TOL = 1e-4
N_MAX = 60
DEPTH_FLOOR = 1e-12
MARGIN = 1e-6
TRACE_DEPTH = 10
PERSISTENCE = 5
R_SCHEDULE = tuple(float(np.exp(0.5 * k)) for k in range(-8, 9))

IN, OUT, UNDETERMINED = 1, -1, 0
STATUS_NAMES = {IN: "In", OUT: "Out", UNDETERMINED: "Undetermined"}


# -- closed forms on the disc --------------------------------------------------------------


def disc_horofunction_exact(z, x) -> np.ndarray:
    """``1/2 log(|x - z|^2 / (1 - |z|^2))`` for pole 0 and unimodular ``x``."""
    z = np.asarray(z, complex)
    return np.log(np.abs(x - z)) - 0.5 * np.log(conformal.disc_defect(z))


def disc_horoball_geometry(x: complex, R: float) -> tuple[complex, float]:
    """Centre and radius of the horodisc ``{z : horofunction < 1/2 log R}``."""
    if R <= 0:
        raise PreconditionError("R must be positive")
    return complex(x) / (1 + R), R / (1 + R)


def in_disc_horoball(u, xi: complex, R: float) -> np.ndarray:
    c, r = disc_horoball_geometry(xi, R)
    return np.abs(np.asarray(u, complex) - c) < r


def horoball_raster_check(x: complex, R: float, backend: MetricBackend, resolution: int = 600, band: float = 2.0,
                          schemes=("normal",), chunk: int = 40_000) -> dict:
    """Compare estimator verdicts on a raster of the disc with the Euclidean horodisc.

    Pixels closer than ``band`` pixels to the horocircle are skipped; every
    other interior pixel must be In inside the disc and Out outside it.
    """
    xs = -1 + (np.arange(resolution) + 0.5) * 2 / resolution
    Z = (xs[None, :] + 1j * xs[:, None]).ravel()
    Z = Z[np.abs(Z) < 1 - 1e-9]
    c, r = disc_horoball_geometry(x, R)
    dist = np.abs(Z - c) - r
    px = 2 / resolution
    check = np.abs(dist) > band * px
    target = backend.domain.boundary_point(x)
    Zc = Z[check]
    status = np.empty(len(Zc), int)
    for start in range(0, len(Zc), chunk):
        b = horofunction_bounds(backend, 0.0, Zc[start : start + chunk], target, schemes)
        status[start : start + chunk] = b.classify(R, "small")
    inside = dist[check] < 0
    return {
        "pixels": int(len(Z)),
        "checked": int(check.sum()),
        "missed_inside": int(np.sum(inside & (status != IN))),
        "extra_outside": int(np.sum(~inside & (status != OUT))),
    }


# -- scheme menus ---------------------------------------------------------------------------


def default_schemes(domain: Domain, x: BoundaryPoint) -> list:
    if isinstance(domain, Polydisc):
        mask = domain.unimodular_mask(x.coords)
        if mask.sum() >= 2:
            return ["normal"] + [f"skew:{j}" for j in np.flatnonzero(mask)]
        return ["normal"]
    if isinstance(domain, PuncturedBall) and not x.smooth:
        return ["normal"] + puncture_schemes(domain, x)
    if x.smooth:
        return ["normal", "cone:0.6", "cone:-0.6"]
    return ["normal"]


def puncture_schemes(domain: PuncturedBall, x: BoundaryPoint) -> list:
    """Straight approaches to the puncture from several coordinate directions."""
    out = []
    for j in range(domain.dim):
        for u in (-1.0, 1j):
            d = np.zeros(domain.dim, complex)
            d[j] = u
            out.append(Scheme("custom", func=lambda k, d=d: x.coords + 0.5 * 2.0**-k * d))
    return out


# -- estimates ------------------------------------------------------------------------------


@dataclass
class SchemeTail:
    name: str
    tail_inf: np.ndarray
    tail_sup: np.ndarray
    last: np.ndarray
    oscillation: np.ndarray
    err: np.ndarray
    n_used: int


@dataclass
class HorofunctionBatch:
    """Horofunction brackets for many observation points at once."""

    lo: np.ndarray
    hi: np.ndarray
    err: np.ndarray
    tails: list[SchemeTail]
    collapsed: bool

    @property
    def flagged(self) -> np.ndarray:
        return np.any([t.oscillation >= OSCILLATION_TOL for t in self.tails], axis=0)

    def scheme_upper(self) -> np.ndarray:
        if self.collapsed:
            return self.hi[None, :]
        return np.stack([t.tail_sup for t in self.tails])

    def classify(self, R: float, flavor: str, margin: float = MARGIN) -> np.ndarray:
        """Verdict codes (1 In, -1 Out, 0 Undetermined) at radius ``R``."""
        if R <= 0:
            raise PreconditionError("R must be positive")
        thr = 0.5 * np.log(R)
        out = np.zeros(self.lo.shape, int)
        if flavor == "small":
            out[self.hi + self.err <= thr - margin] = IN
            out[self.hi - self.err >= thr + margin] = OUT
        elif flavor == "big":
            out[self.lo - self.err >= thr + margin] = OUT
            certified = np.any(self.scheme_upper() + self.err <= thr - margin, axis=0)
            out[certified] = IN
        else:
            raise PreconditionError(f"unknown flavor {flavor!r}")
        return out


def _targets(domain: Domain, x: BoundaryPoint, both_sides: bool) -> list[BoundaryPoint]:
    return domain.siblings(x) if both_sides else [x]


def approach_menu(domain: Domain, x: BoundaryPoint, schemes=None, n_max: int = N_MAX, both_sides: bool = False):
    """``(name, points)`` for every admissible scheme at every side of ``x``."""
    seqs = []
    for tgt in _targets(domain, x, both_sides):
        for s in schemes if schemes is not None else default_schemes(domain, tgt):
            sch = Scheme.parse(s)
            try:
                W = approach_sequence(domain, tgt, sch, n_max, floor=DEPTH_FLOOR)
            except InadmissibleSchemeError:
                continue
            tag = f"@{tgt.side_tag}" if tgt.side_tag else ""
            seqs.append((sch.name() + tag, W))
    if not seqs:
        raise InadmissibleSchemeError(f"no admissible scheme at {x.label()}")
    return seqs


def horofunction_bounds(backend: MetricBackend, o, Z, x: BoundaryPoint, schemes=None, n_max: int = N_MAX,
                        both_sides: bool = False) -> HorofunctionBatch:
    dom = backend.domain
    o = dom.as_points(o).reshape(dom.dim)
    Z = dom.as_points(Z).reshape(-1, dom.dim)
    backend.check_interior(o, Z)
    tails = []
    for name, W in approach_menu(dom, x, schemes, n_max, both_sides):
        kz, ez = backend.matrix(Z, W)
        ko, eo = backend.values(o, W)
        vals = kz - ko[None, :]
        errs = ez + eo[None, :]
        tail = vals[:, -WINDOW:]
        tails.append(
            SchemeTail(
                name,
                tail.min(axis=1),
                tail.max(axis=1),
                vals[:, -1],
                tail.max(axis=1) - tail.min(axis=1),
                errs[:, -WINDOW:].max(axis=1),
                W.shape[0],
            )
        )
    err = np.max([t.err for t in tails], axis=0)
    lo = np.min([t.tail_inf for t in tails], axis=0)
    hi = np.max([t.tail_sup for t in tails], axis=0)
    collapsed = backend.limit_exists
    if collapsed:
        # the limit exists, so every tail value brackets the same number
        centre = tails[0].last
        err = err + np.maximum(hi - centre, centre - lo)
        lo = hi = centre
    return HorofunctionBatch(lo, hi, err, tails, collapsed)


@dataclass
class HorofunctionEstimate:
    lo: float
    hi: float
    err: float
    o: np.ndarray
    z: np.ndarray
    x: BoundaryPoint
    schemes: list[str]
    oscillation: dict[str, float]
    flagged: bool
    spread: float

    @property
    def interval(self) -> tuple[float, float]:
        return (self.lo, self.hi)


def horofunction_interval(backend: MetricBackend, o, z, x: BoundaryPoint, schemes=None, n_max: int = N_MAX,
                          both_sides: bool = False) -> HorofunctionEstimate:
    b = horofunction_bounds(backend, o, z, x, schemes, n_max, both_sides)
    dom = backend.domain
    raw_lo = min(float(t.tail_inf[0]) for t in b.tails)
    raw_hi = max(float(t.tail_sup[0]) for t in b.tails)
    return HorofunctionEstimate(
        float(b.lo[0]),
        float(b.hi[0]),
        float(b.err[0]),
        dom.as_points(o).reshape(dom.dim),
        dom.as_points(z).reshape(dom.dim),
        x,
        [t.name for t in b.tails],
        {t.name: float(t.oscillation[0]) for t in b.tails},
        bool(b.flagged[0]),
        raw_hi - raw_lo,
    )


@dataclass(frozen=True)
class MembershipVerdict:
    status: str
    margin: float
    interval: tuple[float, float]

    def __str__(self) -> str:
        if self.status == "Undetermined":
            return f"Undetermined[{self.interval[0]:.6g}, {self.interval[1]:.6g}]"
        return self.status


def horosphere_membership(backend: MetricBackend, o, x: BoundaryPoint, R: float, z, flavor: str = "small",
                          schemes=None, margin: float = MARGIN, both_sides: bool = False) -> MembershipVerdict:
    b = horofunction_bounds(backend, o, z, x, schemes, both_sides=both_sides)
    code = int(b.classify(R, flavor, margin)[0])
    thr = 0.5 * np.log(R)
    bound = b.hi[0] if flavor == "small" else b.lo[0]
    return MembershipVerdict(STATUS_NAMES[code], float(thr - bound), (float(b.lo[0] - b.err[0]), float(b.hi[0] + b.err[0])))


# -- reports --------------------------------------------------------------------------------


@dataclass
class ProbeReport:
    """Outcome of a probe: parameters, verdict counts, witnesses and per-row data."""

    name: str
    params: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    passed: bool | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "counts": self.counts,
            "witnesses": self.witnesses,
            "passed": self.passed,
            "notes": self.notes,
        }


def probe_points(y: BoundaryPoint, depth: int = TRACE_DEPTH) -> np.ndarray:
    k = np.arange(1, depth + 1)
    return y.coords + (y.t0 * 2.0**-k)[:, None] * y.inward


def boundary_trace_probe(backend: MetricBackend, o, x: BoundaryPoint, R: float, flavor: str,
                         samples: Sequence[BoundaryPoint], depth: int = TRACE_DEPTH,
                         persistence: int = PERSISTENCE, schemes=None) -> ProbeReport:
    """Which boundary samples lie in the closure of the horosphere.

    Each sample ``y`` is probed at depths ``t0 * 2^-k`` (``k = 1..depth``)
    along its inward direction.  ``y`` is in the trace when the probes are In
    at every level of the last ``persistence`` depths and excluded when the
    deepest probe is Out.
    """
    dom = backend.domain
    P = np.concatenate([probe_points(y, depth) for y in samples])
    b = horofunction_bounds(backend, o, P, x, schemes)
    status = b.classify(R, flavor).reshape(len(samples), depth)
    rows, trace, witnesses = [], [], []
    excluded = 0
    for i, y in enumerate(samples):
        in_trace = bool(np.all(status[i, depth - persistence :] == IN))
        out = bool(status[i, -1] == OUT)
        excluded += out
        rows.append(
            {
                "index": i,
                "label": y.label(),
                "in_trace": in_trace,
                "excluded": out,
                "is_target": y.same_location(x) and y.side_tag == x.side_tag,
                "statuses": "".join({IN: "I", OUT: "O", UNDETERMINED: "U"}[s] for s in status[i]),
            }
        )
        if in_trace:
            trace.append(y)
            pt = P[i * depth + depth - 1]
            witnesses.append({"sample": y.label(), "probe": [[c.real, c.imag] for c in np.atleast_1d(pt)]})
    return ProbeReport(
        "boundary_trace",
        {"R": R, "flavor": flavor, "depth": depth, "persistence": persistence, "target": x.label(),
         "backend": backend.label, "samples": len(samples)},
        {"in_trace": len(trace), "excluded": excluded, "undetermined": len(samples) - len(trace) - excluded},
        witnesses,
        rows,
    )


# -- thresholds -------------------------------------------------------------------------------


@dataclass(frozen=True)
class EmptinessThreshold:
    M: float
    R_threshold: float
    applicable: bool
    slopes: dict


def emptiness_threshold(backend: MetricBackend, o, x: BoundaryPoint, schemes=None, n_max: int = N_MAX,
                        slope_tol: float = 0.05) -> EmptinessThreshold:
    """``M = limsup k(o, w)`` over the scheme menu and the radius ``exp(-2M)``.

    A scheme along which ``k(o, w_k)`` still climbs faster than ``slope_tol``
    per step over the last ten steps marks ``M`` as divergent (complete case).
    """
    dom = backend.domain
    sups, slopes = [], {}
    for name, W in approach_menu(dom, x, schemes, n_max):
        k, e = backend.values(o, W)
        tail = k[-10:]
        slope = float(np.polyfit(np.arange(len(tail)), tail, 1)[0])
        slopes[name] = slope
        sups.append(float(np.max(k[-WINDOW:] + e[-WINDOW:])))
    if max(slopes.values()) > slope_tol:
        return EmptinessThreshold(float("inf"), 0.0, False, slopes)
    M = max(sups)
    return EmptinessThreshold(M, float(np.exp(-2 * M)), True, slopes)


def pole_change_constant(backend: MetricBackend, o, p, x: BoundaryPoint, schemes=None) -> float:
    """``L`` with ``1/2 log L = limsup k(p, w) - k(o, w)``."""
    est = horofunction_interval(backend, o, p, x, schemes)
    return float(np.exp(2 * est.hi))


def pole_change_check(backend: MetricBackend, o, p, x: BoundaryPoint, Rs, Z, schemes=None) -> ProbeReport:
    """Sampled inclusion ``H^b_p(x, R) in H^b_o(x, L R)``."""
    L = pole_change_constant(backend, o, p, x, schemes)
    bp = horofunction_bounds(backend, p, Z, x, schemes)
    bo = horofunction_bounds(backend, o, Z, x, schemes)
    viol, hits = 0, 0
    for R in Rs:
        inp = bp.classify(R, "big") == IN
        ino = bo.classify(L * R, "big") == IN
        hits += int(inp.sum())
        viol += int(np.sum(inp & ~ino))
    return ProbeReport("pole_change", {"L": L, "R": list(Rs)}, {"in_p": hits, "violations": viol}, passed=viol == 0)


def scan_counts(batch: HorofunctionBatch, Rs, flavor: str) -> list[int]:
    return [int(np.sum(batch.classify(R, flavor) == IN)) for R in Rs]


def slit_horofunction_closed(o, Z, x: BoundaryPoint) -> np.ndarray:
    """Two-sided limsup on the slit disc from the pulled-back disc horofunctions."""
    m = conformal.slit_disc_to_disc()
    fo = complex(m.forward(complex(np.ravel(o)[0])))
    fz = m.forward(np.asarray(Z, complex).reshape(-1))
    vals = []
    for y in x.domain.siblings(x):
        xi = m.boundary_value(y)
        vals.append(disc_horofunction_exact(fz, xi) - disc_horofunction_exact(fo, xi))
    return np.max(vals, axis=0)


def slit_emptiness_scan(backend: MetricBackend, o, x: BoundaryPoint, Rs=R_SCHEDULE, Z=None) -> ProbeReport:
    """Small-horosphere scan at a slit point using both one-sided approaches jointly."""
    if backend.mode != "ConformalPullback" or backend.map_id != "slit_disc":
        raise PreconditionError("needs the slit-disc pullback backend")
    if x.side_tag is None:
        raise PreconditionError(f"{x.label()} is not a slit point; the scan needs a two-sided boundary point")
    if Z is None:
        Z = slit_scan_grid()
    both = horofunction_bounds(backend, o, Z, x, ["normal"], both_sides=True)
    small = scan_counts(both, Rs, "small")
    big = scan_counts(both, Rs, "big")
    hi_closed = slit_horofunction_closed(o, Z, x)
    R_emp = float(np.exp(2 * np.min(hi_closed)))
    m = conformal.slit_disc_to_disc()
    xis = [m.boundary_value(y) for y in x.domain.siblings(x)]
    fo = complex(m.forward(complex(np.ravel(o)[0])))
    R_tangent = abs(xis[0] - xis[1]) / 2 if abs(fo) < 1e-12 else None
    # explicit big-horosphere witnesses: probes straight toward x from its own side
    probes = probe_points(x, 30)
    pb = horofunction_bounds(backend, o, probes, x, ["normal"], both_sides=True)
    probe_big = scan_counts(pb, Rs, "big")
    rows = [{"R": R, "in_small": s, "in_big": g, "in_big_probe": q} for R, s, g, q in zip(Rs, small, big, probe_big)]
    below = [r for r in rows if r["R"] < R_emp]
    passed = all(r["in_small"] == 0 and r["in_big"] + r["in_big_probe"] > 0 for r in below)
    return ProbeReport(
        "slit_emptiness",
        {"x": x.label(), "grid": int(len(np.ravel(Z))), "R_empirical": R_emp, "R_tangent": R_tangent,
         "preimages": [[xi.real, xi.imag] for xi in xis]},
        {"schedule_below_R0": len(below), "first_in_small_R": next((r["R"] for r in rows if r["in_small"] > 0), None)},
        [{"R": r["R"], "small_in": r["in_small"], "big_in": r["in_big"], "big_in_probe": r["in_big_probe"]} for r in below],
        rows,
        passed,
    )


def slit_scan_grid(n_radial: int = 100, n_angular: int = 100) -> np.ndarray:
    """``psi`` image of a polar grid of the disc: 10^4 interior points of the slit disc."""
    r = (np.arange(n_radial) + 0.5) / n_radial
    t = 2 * np.pi * (np.arange(n_angular) + 0.5) / n_angular
    U = (r[:, None] * np.exp(1j * t[None, :])).ravel()
    return conformal.disc_to_slit(U)
