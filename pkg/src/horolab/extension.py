"""Boundary behaviour of biholomorphisms: cluster sets, extension verdicts, horosphere transport."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .conformal import MapDescriptor
from .domains import BoundaryPoint, approach_sequence
from .errors import InadmissibleSchemeError, PreconditionError
from .geodesics import cluster_points
from .horospheres import (
    IN,
    MARGIN,
    ProbeReport,
    disc_horoball_geometry,
    disc_horofunction_exact,
    horofunction_bounds,
    slit_emptiness_scan,
)
from .metric import MetricBackend

CLUSTER_TOL = 1e-3
APPROACH_STEPS = 30
TAIL = 4
EXTENSION_SCHEMES = ("normal", "cone:0.6", "cone:-0.6")


@dataclass
class ClusterSet:
    location: BoundaryPoint
    points: list[complex]
    counts: list[int]
    inconclusive: bool = False

    @property
    def singleton(self) -> bool:
        return len(self.points) == 1 and not self.inconclusive


def _group_locations(samples: Sequence[BoundaryPoint]) -> list[list[BoundaryPoint]]:
    groups: list[list[BoundaryPoint]] = []
    for s in samples:
        for g in groups:
            if g[0].same_location(s):
                if not any(t.side_tag == s.side_tag for t in g):
                    g.append(s)
                break
        else:
            groups.append([s])
    return groups


def boundary_cluster_set(fmap: MapDescriptor, x: BoundaryPoint, schemes=EXTENSION_SCHEMES,
                         tol: float = CLUSTER_TOL, both_sides: bool = True, n: int = APPROACH_STEPS) -> ClusterSet:
    """Limits of ``f`` along approach sequences to ``x`` (every side of a two-sided point)."""
    dom = fmap.source
    sides = dom.siblings(x) if both_sides else [x]
    limits, inconclusive = [], False
    for side in sides:
        for s in schemes:
            try:
                W = approach_sequence(dom, side, s, n)
            except InadmissibleSchemeError:
                continue
            img = np.asarray(fmap.forward(W[:, 0]), complex)
            tail = img[-TAIL:]
            if np.max(np.abs(tail - tail[-1])) > tol:
                inconclusive = True
            limits.append(tail[-1])
    if not limits:
        raise InadmissibleSchemeError(f"no admissible scheme at {x.label()}")
    groups = cluster_points(np.array(limits)[:, None], tol)
    return ClusterSet(x, [complex(r[0]) for r, _ in groups], [c for _, c in groups], inconclusive)


@dataclass
class ExtensionReport:
    verdict: str
    forward: list[ClusterSet] = field(default_factory=list)
    inverse: list[ClusterSet] = field(default_factory=list)
    witnesses: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "forward_clusters": [[p.real, p.imag] for c in self.forward for p in c.points],
            "multi_forward": sum(not c.singleton for c in self.forward),
            "multi_inverse": sum(not c.singleton for c in self.inverse),
            "witnesses": self.witnesses,
        }

    def correspondence_rows(self) -> list[dict]:
        rows = []
        for c in self.forward:
            src = complex(c.location.coords[0])
            for k, p in enumerate(c.points):
                rows.append({"source_angle": float(np.angle(src)), "target_re": p.real, "target_im": p.imag,
                             "cluster_id": k})
        return rows


def extension_verdict(fmap: MapDescriptor, source_samples: Sequence[BoundaryPoint],
                      target_samples: Sequence[BoundaryPoint], tol: float = CLUSTER_TOL) -> ExtensionReport:
    """Classify the boundary behaviour of ``fmap`` on sampled boundary points.

    A forward cluster set with several points means no continuous extension.
    With singleton forward clusters, a target point whose inverse clusters
    split into several source points (each mapped back onto it) witnesses a
    non-injective extension.  Otherwise the sampled boundary map must be
    injective with singleton inverse clusters for a homeomorphic verdict.
    """
    fwd = [boundary_cluster_set(fmap, g[0], tol=tol) for g in _group_locations(source_samples)]
    inv_map = fmap.inverted()
    inv = [boundary_cluster_set(inv_map, g[0], tol=tol) for g in _group_locations(target_samples)]
    report = ExtensionReport("Inconclusive", fwd, inv)
    multi = [c for c in fwd if not c.singleton and not c.inconclusive]
    if multi:
        c = multi[0]
        report.verdict = "NoContinuousExtension"
        report.witnesses.append({"kind": "multi_cluster", "at": c.location.label(),
                                 "clusters": [[p.real, p.imag] for p in c.points]})
        return report
    if any(c.inconclusive for c in fwd):
        return report
    # duality: several inverse limits that all map forward onto the same target point
    for c in inv:
        if len(c.points) < 2 or c.inconclusive:
            continue
        y = complex(c.location.coords[0])
        images = []
        for p in c.points:
            src = fmap.source.boundary_point(fmap.source.nearest_boundary(p))
            cs = boundary_cluster_set(fmap, src, tol=tol)
            images.append(cs.points[0] if cs.singleton else None)
        if all(im is not None and abs(im - y) <= 2 * tol for im in images):
            report.verdict = "ExtendsContinuouslyOnly"
            report.witnesses.append({"kind": "shared_image", "target": c.location.label(), "value": [y.real, y.imag],
                                     "preimages": [[p.real, p.imag] for p in c.points]})
    if report.witnesses:
        return report
    # sampled injectivity: images closer than 2*tol are settled by the inverse cluster set there
    vals = np.array([c.points[0] for c in fwd])
    gaps = np.abs(vals[:, None] - vals[None, :])
    for i, j in zip(*np.nonzero(np.triu(gaps <= 2 * tol, 1))):
        tgt = fmap.target
        y = tgt.boundary_point(tgt.nearest_boundary(0.5 * (vals[i] + vals[j])))
        back = boundary_cluster_set(inv_map, y, tol=tol)
        if back.inconclusive:
            return report
        if not back.singleton:
            report.verdict = "ExtendsContinuouslyOnly"
            report.witnesses.append({"kind": "shared_image", "target": y.label(), "value": [y.coords[0].real, y.coords[0].imag],
                                     "preimages": [[p.real, p.imag] for p in back.points]})
            return report
    if all(c.singleton for c in inv):
        report.verdict = "ExtendsHomeomorphically"
    return report


def disc_pole_radius(o: complex, xi: complex, R: float) -> float:
    """Radius ``R'`` with ``H_o(xi, R) = H_0(xi, R')`` in the disc."""
    return float(R * np.exp(2 * disc_horofunction_exact(o, xi)))


def horosphere_pushforward_check(backend: MetricBackend, fmap: MapDescriptor, p, x: BoundaryPoint, Rs, Z,
                                 flavor: str = "big", xi: complex | None = None) -> ProbeReport:
    """Check ``f(H_p(x, R)) in H_{f(p)}(xi, R)`` on the sample ``Z`` (target is the disc)."""
    dom = backend.domain
    Z = dom.as_points(Z).reshape(-1, dom.dim)
    o = complex(fmap.forward(complex(dom.as_points(p).reshape(-1)[0])))
    if xi is None:
        cs = boundary_cluster_set(fmap, x, both_sides=False)
        if not cs.singleton:
            raise PreconditionError(f"cluster set of {fmap.name} at {x.label()} is not a single point")
        xi = cs.points[0]
        xi = xi / abs(xi)
    b = horofunction_bounds(backend, p, Z, x)
    fz = np.asarray(fmap.forward(Z[:, 0]), complex)
    hits = violations = 0
    worst = -np.inf
    rows = []
    for R in Rs:
        mask = b.classify(R, flavor, MARGIN) == IN
        c, r = disc_horoball_geometry(xi, disc_pole_radius(o, xi, R))
        gap = np.abs(fz[mask] - c) - r
        v = int(np.sum(gap >= 0))
        hits += int(mask.sum())
        violations += v
        if gap.size:
            worst = max(worst, float(gap.max()))
        rows.append({"R": R, "in": int(mask.sum()), "violations": v})
    report = ProbeReport(
        "pushforward",
        {"map": fmap.name, "flavor": flavor, "x": x.label(), "xi": [xi.real, xi.imag], "R": list(Rs)},
        {"in": hits, "violations": violations, "worst_margin": worst if hits else None},
        rows=rows,
        passed=violations == 0,
    )
    if hits == 0:
        report.notes.append("vacuous: no sampled point is in the horosphere")
    return report


def metrically_regular_probe(backend: MetricBackend, pairs, Rs, Z=None, raster: int = 400) -> ProbeReport:
    """Limit existence and horodisc separation on the disc.

    For each pair ``(xi1, xi2)`` the horodiscs ``H(xi1, R)`` and ``H(xi2, R)``
    are disjoint exactly when ``R <= |xi1 - xi2| / 2``; the raster confirms
    emptiness below that threshold.
    """
    if backend.mode != "ExactDisc":
        raise PreconditionError("metric regularity probe runs on the exact disc")
    dom = backend.domain
    if Z is None:
        Z = dom.sample_interior(50, 0)
    spreads = []
    for xi, _ in pairs:
        b = horofunction_bounds(backend, 0.0, Z, dom.boundary_point(xi))
        raw_lo = np.min([t.tail_inf for t in b.tails], axis=0)
        raw_hi = np.max([t.tail_sup for t in b.tails], axis=0)
        spreads.append(float(np.max(raw_hi - raw_lo)))
    g = -1 + (np.arange(raster) + 0.5) * 2 / raster
    U = (g[None, :] + 1j * g[:, None]).ravel()
    U = U[np.abs(U) < 1]
    rows = []
    ok = True
    for xi1, xi2 in pairs:
        if abs(xi1 - xi2) < 1e-12:
            raise PreconditionError("separation needs distinct boundary points")
        thr = abs(xi1 - xi2) / 2
        for R in Rs:
            both = int(np.sum((disc_horofunction_exact(U, xi1) < 0.5 * np.log(R))
                              & (disc_horofunction_exact(U, xi2) < 0.5 * np.log(R))))
            expect_empty = R <= thr
            if expect_empty and both:
                ok = False
            rows.append({"xi1": str(xi1), "xi2": str(xi2), "R": R, "threshold": thr, "intersection_pixels": both})
    ok = ok and max(spreads) < 1e-6
    return ProbeReport("metric_regularity", {"pairs": len(pairs)}, {"max_limit_spread": max(spreads)}, rows=rows,
                       passed=ok)


@dataclass
class DichotomyReport:
    horn: int
    extension: ExtensionReport
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"horn": self.horn, "extension": self.extension.to_json(), "witness": self.witness}


def jordan_dichotomy_report(to_disc: MapDescriptor, source_samples, target_samples,
                            backend: MetricBackend | None = None, prefer: complex | None = None) -> DichotomyReport:
    """Which side of the Jordan / empty-small-horosphere dichotomy the evidence supports.

    ``to_disc`` maps the planar domain onto the disc; its inverse is tested for
    homeomorphic extension.  When that fails with a two-preimage witness, the
    witness point is scanned for an empty small horosphere (horn 2).  Horn 0
    means the evidence settles neither side.  ``prefer`` picks the witness
    closest to a given boundary value.
    """
    psi = to_disc.inverted()
    ext = extension_verdict(psi, target_samples, source_samples)
    if ext.verdict == "ExtendsHomeomorphically":
        return DichotomyReport(1, ext)
    shared = [w for w in ext.witnesses if w["kind"] == "shared_image"]
    if prefer is not None:
        shared.sort(key=lambda w: abs(complex(*w["value"]) - prefer))
    witness = shared[0] if shared else None
    if backend is None or witness is None:
        return DichotomyReport(0, ext)
    loc = next(c.location for c in ext.inverse if c.location.label() == witness["target"])
    o = complex(psi.forward(np.array([0.0 + 0j]))[0])
    scan = slit_emptiness_scan(backend, o, loc)
    if not scan.passed or not scan.witnesses:
        return DichotomyReport(0, ext)
    R = max(w["R"] for w in scan.witnesses)
    return DichotomyReport(2, ext, {"x": loc.label(), "R": R, "R_empirical": scan.params["R_empirical"],
                                    "grid": scan.params["grid"]})
