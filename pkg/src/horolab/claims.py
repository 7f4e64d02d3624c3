"""Registry of reproducible claims, one pinned experiment per acceptance id."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import conformal, extension, geodesics, gromov, horospheres as hs
from .domains import LatticeDiscComplement, Polydisc, PuncturedBall, SlitDisc, UnitDisc, square
from .errors import PreconditionError
from .metric import make_backend, mercer_constant_fit, nikolov_andreev_fit

DEFAULT_SEED = 20240601


@dataclass
class ClaimResult:
    claim_id: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    elapsed: float = 0.0  # wall time, kept out of reports so reruns are byte-identical

    def summary(self) -> str:
        keys = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items() if not isinstance(v, (list, dict)))
        return f"{'PASS' if self.passed else 'FAIL'} {self.claim_id}: {keys}"

    def to_json(self) -> dict:
        return {"claim": self.claim_id, "passed": self.passed, "metrics": self.metrics, "notes": self.notes}


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


@dataclass(frozen=True)
class Claim:
    claim_id: str
    description: str
    run: Callable[[int], ClaimResult]


REGISTRY: dict[str, Claim] = {}


def claim(claim_id: str, description: str):
    def wrap(fn):
        REGISTRY[claim_id] = Claim(claim_id, description, fn)
        return fn

    return wrap


def known_ids() -> list[str]:
    return list(REGISTRY)


def get_claim(claim_id: str) -> Claim:
    try:
        return REGISTRY[claim_id]
    except KeyError:
        raise PreconditionError(f"unknown claim id {claim_id!r}; known ids: {', '.join(REGISTRY)}") from None


def reproduce(claim_id: str, seed: int | None = None) -> ClaimResult:
    c = get_claim(claim_id)
    t = time.perf_counter()
    res = c.run(DEFAULT_SEED if seed is None else seed)
    res.notes.append(f"seed={DEFAULT_SEED if seed is None else seed}")
    res.elapsed = time.perf_counter() - t
    return res


def _log_uniform(rng, lo, hi, n=None):
    return np.exp(rng.uniform(lo, hi, n))


# -- 1 ------------------------------------------------------------------------------------


@claim("disc-horofunction-closed-form", "estimator matches the disc closed form on 100 random (z, x)")
def _disc_closed_form(seed: int) -> ClaimResult:
    rng = np.random.default_rng(seed)
    disc = UnitDisc()
    be = make_backend(disc)
    Z = disc.sample_interior(100, seed)[:, 0]
    theta = rng.uniform(0, 2 * np.pi, 100)
    errs = []
    rows = []
    for z, t in zip(Z, theta):
        x = np.exp(1j * t)
        est = hs.horofunction_interval(be, 0.0, z, disc.boundary_point(x), n_max=60)
        exact = float(hs.disc_horofunction_exact(z, x))
        e = max(abs(est.lo - exact), abs(est.hi - exact))
        errs.append(e)
        rows.append({"z_re": z.real, "z_im": z.imag, "x_angle": t, "exact": exact, "lo": est.lo, "hi": est.hi})
    worst = float(max(errs))
    return ClaimResult("disc-horofunction-closed-form", worst < 1e-3, {"max_abs_error": worst, "samples": 100}, rows)


# -- 2 ------------------------------------------------------------------------------------


@claim("disc-horoball-geometry", "rasterised horodiscs equal the Euclidean discs x/(1+R), R/(1+R)")
def _disc_geometry(seed: int) -> ClaimResult:
    be = make_backend(UnitDisc())
    rows = []
    for R in (0.5, 1.0, 3.0):
        r = hs.horoball_raster_check(1.0, R, be, resolution=600, band=2)
        c, rad = hs.disc_horoball_geometry(1.0, R)
        rows.append({"R": R, "center": c.real, "radius": rad, **r})
    ok = all(r["missed_inside"] == 0 and r["extra_outside"] == 0 for r in rows)
    mis = sum(r["missed_inside"] + r["extra_outside"] for r in rows)
    return ClaimResult("disc-horoball-geometry", ok, {"mismatched_pixels": mis, "resolution": 600, "band_px": 2}, rows)


# -- 3 ------------------------------------------------------------------------------------


def _axiom_group(be, o, p, x, Z, Rs) -> dict:
    """Violation counts of the six horosphere properties for one (o, p, x) and many z."""
    dom = be.domain
    bo = hs.horofunction_bounds(be, o, Z, x)
    bp = hs.horofunction_bounds(be, p, Z, x)
    L = hs.pole_change_constant(be, o, p, x)
    koz, eoz = be.values(o, Z)
    v = dict.fromkeys(["inclusion", "monotone", "ball_in", "ball_out", "exhaustion", "pole_change"], 0)
    for R, R2 in zip(Rs, Rs * np.exp(np.abs(np.random.default_rng(len(Z)).normal(size=len(Rs))))):
        s1, b1 = bo.classify(R, "small"), bo.classify(R, "big")
        s2, b2 = bo.classify(R2, "small"), bo.classify(R2, "big")
        v["inclusion"] += int(np.sum((s1 == hs.IN) & (b1 != hs.IN)))
        v["monotone"] += int(np.sum((s1 == hs.IN) & (s2 != hs.IN)) + np.sum((b1 == hs.IN) & (b2 != hs.IN)))
        thr = 0.5 * np.log(R)
        if R > 1:
            ball = koz + eoz + bo.err + hs.MARGIN < thr
            v["ball_in"] += int(np.sum(ball & (s1 != hs.IN)))
        if R < 1:
            ball = koz + eoz + hs.MARGIN < -thr
            v["ball_out"] += int(np.sum(ball & (b1 == hs.IN)))
        for flavor in ("small", "big"):
            inp = bp.classify(R, flavor) == hs.IN
            ino = bo.classify(L * R, flavor) == hs.IN
            v["pole_change"] += int(np.sum(inp & ~ino))
    # exhaustion: each z is In(small) for large R and Out(big) for small R
    big_R = np.exp(2 * (koz + eoz + 1.0))
    small_R = np.exp(-2 * (koz + eoz + 1.0))
    for k in range(len(Z)):
        sk = hs.horofunction_bounds(be, o, Z[k : k + 1], x)
        if sk.classify(float(big_R[k]), "small")[0] != hs.IN or sk.classify(float(small_R[k]), "big")[0] != hs.OUT:
            v["exhaustion"] += 1
    return v


@claim("horosphere-axioms", "the six basic horosphere properties on 10^3 random queries per backend")
def _axioms(seed: int) -> ClaimResult:
    rng = np.random.default_rng(seed)
    totals = {}
    rows = []
    queries = 0
    for dom in (UnitDisc(), Polydisc(2)):
        be = make_backend(dom)
        xs = dom.sample_boundary(50, seed)
        for g in range(50):
            o = dom.sample_interior(1, seed + 7 * g + 1)[0] * 0.8
            p = dom.sample_interior(1, seed + 7 * g + 2)[0] * 0.8
            Z = dom.sample_interior(20, seed + 7 * g + 3)
            Rs = _log_uniform(rng, -4, 4, 20)
            v = _axiom_group(be, o, p, xs[g], Z, Rs)
            queries += len(Z)
            rows.append({"domain": dom.kind, "group": g, **v})
            for k, n in v.items():
                totals[f"{dom.kind}.{k}"] = totals.get(f"{dom.kind}.{k}", 0) + n
    total = sum(totals.values())
    return ClaimResult("horosphere-axioms", total == 0, {"violations": total, "queries": queries, **totals}, rows)


# -- 4 ------------------------------------------------------------------------------------


def polydisc_normal_limit(z, x) -> np.ndarray:
    """Max over the unimodular coordinates ``j`` of the disc horofunction of ``z_j`` at ``x_j``."""
    z = np.asarray(z, complex)
    x = np.asarray(x, complex)
    mask = np.abs(np.abs(x) - 1) < 1e-12
    return np.max([hs.disc_horofunction_exact(z[..., j], x[j]) for j in np.flatnonzero(mask)], axis=0)


@claim("polydisc-shilov-dichotomy", "bidisc traces: singleton at a Shilov point, larger at a face point")
def _shilov(seed: int) -> ClaimResult:
    dom = Polydisc(2)
    be = make_backend(dom)
    R = 1.0
    samples = dom.sample_boundary(192, seed)
    out = {}
    rows = []
    for label, coords, flavor in (("shilov", (1, 1), "small"), ("face", (1, 0), "big")):
        x = dom.boundary_point(coords)
        rep = hs.boundary_trace_probe(be, np.zeros(2), x, R, flavor, samples + [x])
        deep = np.array([hs.probe_points(y)[-1] for y in samples + [x]])
        oracle = polydisc_normal_limit(deep, x.coords) < 0.5 * np.log(R)
        trace = [r for r in rep.rows if r["in_trace"]]
        extra = [r for r in trace if not r["is_target"]]
        agree = all(bool(oracle[r["index"]]) for r in trace)
        out[label] = {"trace": len(trace), "extra": len(extra), "x_in": rep.rows[-1]["in_trace"], "oracle_agrees": agree}
        for r in rep.rows:
            rows.append({"case": label, "sample": r["label"], "in_trace": r["in_trace"], "oracle_in": bool(oracle[r["index"]])})
    ok = (out["shilov"]["x_in"] and out["shilov"]["extra"] == 0
          and out["face"]["x_in"] and out["face"]["extra"] >= 3 and out["face"]["oracle_agrees"])
    # distance of the generic samples to the fibres {1} x clos(H) and clos(H) x {1}
    c, r = hs.disc_horoball_geometry(1.0, R)
    P = np.array([y.coords for y in samples])
    fib = np.min([np.abs(P[:, j] - 1) + np.maximum(np.abs(P[:, 1 - j] - c) - r, 0) for j in (0, 1)], axis=0)
    metrics = {"shilov_extra": out["shilov"]["extra"], "shilov_oracle_agrees": out["shilov"]["oracle_agrees"],
               "fibre_gap": float(fib.min()), "face_extra": out["face"]["extra"],
               "face_oracle_agrees": out["face"]["oracle_agrees"], "samples": len(samples)}
    return ClaimResult("polydisc-shilov-dichotomy", ok, metrics, rows)


# -- 5 ------------------------------------------------------------------------------------


def harmonic_boundary_sample(dom: SlitDisc, count: int, seed: int):
    """Boundary points of the slit disc spread evenly in harmonic measure from ``psi(0)``.

    Equally spaced angles (one random shift) are pushed through ``psi``;
    slit images keep the side given by their preimage.
    """
    rng = np.random.default_rng(seed)
    u = np.exp(2j * np.pi * (np.arange(count) + rng.uniform()) / count)
    w = conformal.disc_to_slit(u)
    out = []
    for ui, wi in zip(u, w):
        if abs(wi) > 1 - 1e-9:
            out.append(dom.boundary_point(wi / abs(wi)))
        else:
            t = float(np.clip(wi.real, 1e-12, 1 - 1e-12))
            above, _ = conformal.slit_preimages(t)
            side = "above" if abs(ui - above) < abs(ui - np.conj(above)) else "below"
            out.append(dom.boundary_point(complex(t), side))
    return out


@claim("visibility-singleton-trace", "big-horosphere traces are {x} on the disc and the slit disc")
def _singleton_trace(seed: int) -> ClaimResult:
    rng = np.random.default_rng(seed)
    rows = []
    bad = 0
    for dom, o in ((UnitDisc(), 0.0), (SlitDisc(), conformal.SLIT_POLE)):
        be = make_backend(dom)
        for trial in range(20):
            if isinstance(dom, SlitDisc):
                samples = harmonic_boundary_sample(dom, 24, seed + trial)
            else:
                samples = dom.sample_boundary(24, seed + trial)
            k = int(rng.integers(len(samples)))
            x = samples[k]
            R = float(_log_uniform(rng, -2, 2))
            rep = hs.boundary_trace_probe(be, o, x, R, "big", samples)
            x_ok = rep.rows[k]["in_trace"]
            others = [r for i, r in enumerate(rep.rows) if i != k]
            fails = sum(not r["excluded"] for r in others)
            bad += fails + (not x_ok)
            rows.append({"domain": dom.kind, "trial": trial, "x": x.label(), "R": R, "x_in_all_depths": x_ok,
                         "non_x": len(others), "non_x_not_out": fails})
    return ClaimResult("visibility-singleton-trace", bad == 0, {"failures": bad, "trials": len(rows)}, rows)


# -- 6 ------------------------------------------------------------------------------------


@claim("emptiness-threshold", "punctured ball: M = 1/2 log 3 and the exp(-2M) emptiness threshold")
def _emptiness(seed: int) -> ClaimResult:
    dom = PuncturedBall(2)
    be = make_backend(dom)
    o = np.array([0.5, 0.0], complex)
    x = dom.boundary_point(np.zeros(2))
    th = hs.emptiness_threshold(be, o, x)
    Z = dom.sample_interior(10_000, seed)
    b = hs.horofunction_bounds(be, o, Z, x)
    in_03 = int(np.sum(b.classify(0.3, "big") == hs.IN))
    in_2 = int(np.sum(b.classify(2.0, "big") == hs.IN))
    err_M = abs(th.M - 0.5 * np.log(3))
    ok = th.applicable and err_M <= 1e-6 and in_03 == 0 and in_2 >= 1
    return ClaimResult("emptiness-threshold", ok, {"M": th.M, "M_error": err_M, "R_threshold": th.R_threshold,
                                                   "in_big_R0.3": in_03, "in_big_R2": in_2, "grid": len(Z)})


# -- 7 ------------------------------------------------------------------------------------


@claim("slit-small-empty", "slit disc at x = 1/2: small horospheres empty below R0, big ones not")
def _slit_empty(seed: int) -> ClaimResult:
    dom = SlitDisc()
    be = make_backend(dom)
    rep = hs.slit_emptiness_scan(be, conformal.SLIT_POLE, dom.boundary_point(0.5, "above"))
    return ClaimResult("slit-small-empty", bool(rep.passed),
                       {"R_empirical": rep.params["R_empirical"], "grid": rep.params["grid"],
                        "radii_below_R0": rep.counts["schedule_below_R0"]}, rep.rows)


# -- 8 ------------------------------------------------------------------------------------


def _stable(a, b) -> bool:
    return abs(a.alpha - b.alpha) / a.alpha < 0.05 and abs(a.beta - b.beta) <= 0.05 * max(a.beta, 1.0)


@claim("convex-quasi-geodesic", "the convex approach curve is a quasi-geodesic (disc exact, square surrogate)")
def _quasi(seed: int) -> ClaimResult:
    disc = UnitDisc()
    be = make_backend(disc)
    fit_d = geodesics.fit_quasi_geodesic_constants(geodesics.sigma_path(be, 0.0, disc.boundary_point(1.0), 5.0))
    sq = square(1.0)
    x = sq.edge_midpoint(0)
    fits = []
    rows = [{"domain": "disc", "h": None, "alpha": fit_d.alpha, "beta": fit_d.beta}]
    for h in (0.01, 0.005):
        bs = make_backend(sq, "GridSurrogate", h=h)
        f = geodesics.fit_quasi_geodesic_constants(geodesics.sigma_path(bs, 0.0, x, 1.6, n=33))
        fits.append(f)
        rows.append({"domain": "square", "h": h, "alpha": f.alpha, "beta": f.beta})
    disc_ok = fit_d.alpha == 1.0 and fit_d.beta <= 0.5 * np.log(2) + 1e-6
    ok = disc_ok and _stable(fits[0], fits[1])
    return ClaimResult("convex-quasi-geodesic", ok,
                       {"disc_alpha": fit_d.alpha, "disc_beta": fit_d.beta, "square_alpha": fits[-1].alpha,
                        "square_beta": fits[-1].beta, "square_alpha_coarse": fits[0].alpha,
                        "square_beta_coarse": fits[0].beta}, rows,
                       ["square values come from the quasihyperbolic grid surrogate (comparability 4)"])


# -- 9 ------------------------------------------------------------------------------------


@claim("gromov-witness", "the ray point at T = 10 delta - 1/2 log R + 0.1 lies in the small horosphere")
def _witness(seed: int) -> ClaimResult:
    disc = UnitDisc()
    be = make_backend(disc)
    S = disc.sample_interior(50, seed)
    S = 0.99 * S
    delta = gromov.four_point_delta(be, S)
    x = disc.boundary_point(np.exp(1j * np.random.default_rng(seed).uniform(0, 2 * np.pi)))
    rows = []
    for R in (np.exp(-2), 1.0, np.exp(2)):
        T = 10 * delta - 0.5 * np.log(R) + 0.1
        ray = geodesics.geodesic_ray(be, 0.0, x, T_max=min(geodesics.MAX_RAY_TIME, max(8.0, np.ceil(T) + 1)))
        w = gromov.small_horosphere_witness(be, ray, delta, R)
        rows.append({"R": R, "T": w.T, "verdict": w.verdict.status, "margin": w.verdict.margin})
    ok = all(r["verdict"] == "In" for r in rows)
    return ClaimResult("gromov-witness", ok, {"delta": delta, "verdicts": "/".join(r["verdict"] for r in rows)}, rows)


# -- 10 -----------------------------------------------------------------------------------


@claim("polydisc-nonvisibility", "diverging Gromov products on the bidisc, bounded ones on the disc")
def _nonvisibility(seed: int) -> ClaimResult:
    bi = Polydisc(2)
    rp = gromov.visibility_probe(make_backend(bi), np.zeros(2), bi.boundary_point((1, 0)), bi.boundary_point((1, 0.5)))
    disc = UnitDisc()
    rd = gromov.visibility_probe(make_backend(disc), 0.0, disc.boundary_point(1.0), disc.boundary_point(-1.0))
    ok = rp.verdict == "DivergenceEvidence" and rd.verdict == "BoundedEvidence"
    return ClaimResult("polydisc-nonvisibility", ok,
                       {"bidisc": rp.verdict, "bidisc_growth": rp.growth, "disc": rd.verdict, "disc_bound": rd.bound},
                       [rp.to_json(), rd.to_json()])


# -- 11 -----------------------------------------------------------------------------------


def lattice_cell_sample(dom: LatticeDiscComplement, count: int, seed: int) -> np.ndarray:
    """Centres of distinct unit cells in the window (the points farthest from the holes)."""
    W = dom.window_half_width
    m = np.arange(-W / 2, W / 2) + 0.5
    cells = (m[:, None] + 1j * m[None, :]).ravel()
    rng = np.random.default_rng(seed)
    pick = rng.choice(len(cells), size=min(count, len(cells)), replace=False)
    return np.sort_complex(cells[pick])


@claim("lattice-delta-growth", "surrogate four-point delta grows with the window on the lattice complement")
def _lattice(seed: int) -> ClaimResult:
    rows = []
    for W in (4.0, 8.0, 16.0):
        dom = LatticeDiscComplement(window_half_width=W)
        be = make_backend(dom, "GridSurrogate", h=0.1)
        S = lattice_cell_sample(dom, 50, seed)
        rows.append({"window": W, "points": len(S), "delta": gromov.four_point_delta(be, S), "backend": be.label})
    table = gromov.DeltaTable(rows)
    return ClaimResult("lattice-delta-growth", table.increasing(),
                       {"deltas": [r["delta"] for r in rows], "backend": rows[0]["backend"],
                        **{f"delta_W{int(r['window'])}": r["delta"] for r in rows}}, rows,
                       ["qualitative evidence from the quasihyperbolic grid surrogate"])


# -- 12 -----------------------------------------------------------------------------------


@claim("slit-extension-dichotomy", "boundary extension verdicts for automorphisms, half-disc and slit maps")
def _extension(seed: int) -> ClaimResult:
    disc = UnitDisc()
    slit = SlitDisc()
    rng = np.random.default_rng(seed)
    a = 0.6 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    auto = conformal.disc_automorphism(a, rng.uniform(0, 2 * np.pi))
    src = disc.sample_boundary(24, seed)
    tgt = disc.sample_boundary(24, seed + 1)
    r_auto = extension.extension_verdict(auto, src, tgt)
    half = conformal.half_disc_map()
    r_half = extension.extension_verdict(half, half.source.sample_boundary(24, seed), tgt)
    psi = conformal.slit_disc_riemann_map()
    pre = [disc.boundary_point(p) for p in conformal.slit_preimages(0.25)]
    quarter = slit.siblings(slit.boundary_point(0.25, "above"))
    r_psi = extension.extension_verdict(psi, src + pre, slit.sample_boundary(12, seed) + quarter)
    phi = conformal.slit_disc_to_disc()
    r_phi = extension.extension_verdict(phi, slit.siblings(slit.boundary_point(0.5, "above")), tgt)
    w14 = [w for w in r_psi.witnesses if w["kind"] == "shared_image" and abs(complex(*w["value"]) - 0.25) < 1e-9]
    expect = [slit_pre for slit_pre in conformal.slit_preimages(0.25)]
    witness_ok = bool(w14) and all(min(abs(complex(*q) - e) for q in w14[0]["preimages"]) < 1e-3 for e in expect)
    ok = (r_auto.verdict == "ExtendsHomeomorphically" and r_half.verdict == "ExtendsHomeomorphically"
          and r_psi.verdict == "ExtendsContinuouslyOnly" and witness_ok and r_phi.verdict == "NoContinuousExtension")
    rows = [{"map": m.name, **r.to_json()} for m, r in ((auto, r_auto), (half, r_half), (psi, r_psi), (phi, r_phi))]
    return ClaimResult("slit-extension-dichotomy", ok,
                       {"automorphism": r_auto.verdict, "half_disc": r_half.verdict, "slit_psi": r_psi.verdict,
                        "quarter_witness": witness_ok, "slit_phi": r_phi.verdict}, rows)


# -- 13 -----------------------------------------------------------------------------------


@claim("pushforward-inclusions", "biholomorphisms push horospheres into disc horodiscs")
def _pushforward(seed: int) -> ClaimResult:
    rng = np.random.default_rng(seed)
    Rs = (0.5, 1.0, 2.0)
    disc = UnitDisc()
    slit = SlitDisc()
    rows = []
    total_in = total_v = 0
    for trial in range(3):
        a = 0.5 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        auto = conformal.disc_automorphism(a, rng.uniform(0, 2 * np.pi))
        p = complex(disc.sample_interior(1, seed + trial)[0, 0]) * 0.5
        x = disc.boundary_point(np.exp(2j * np.pi * rng.uniform()))
        for flavor in ("small", "big"):
            r = extension.horosphere_pushforward_check(make_backend(disc), auto, p, x, Rs,
                                                       disc.sample_interior(1000, seed + 10 + trial), flavor)
            rows.append({"map": auto.name, "flavor": flavor, **r.counts})
            total_in += r.counts["in"]
            total_v += r.counts["violations"]
    phi = conformal.slit_disc_to_disc()
    for trial in range(3):
        x = slit.boundary_point(np.exp(1j * rng.uniform(0.3, 2 * np.pi - 0.3)))
        p = complex(slit.sample_interior(1, seed + 20 + trial)[0, 0])
        for flavor in ("small", "big"):
            r = extension.horosphere_pushforward_check(make_backend(slit), phi, p, x, Rs,
                                                       slit.sample_interior(1000, seed + 30 + trial), flavor)
            rows.append({"map": phi.name, "flavor": flavor, **r.counts})
            total_in += r.counts["in"]
            total_v += r.counts["violations"]
    ok = total_v == 0 and total_in > 0
    return ClaimResult("pushforward-inclusions", ok, {"violations": total_v, "in_samples": total_in}, rows)


# -- 14 -----------------------------------------------------------------------------------


@claim("mercer-dini-bounds", "Mercer and Nikolov-Andreev constants on the disc")
def _dini(seed: int) -> ClaimResult:
    disc = UnitDisc()
    be = make_backend(disc)
    rng = np.random.default_rng(seed)
    depth = 10.0 ** rng.uniform(-8, -0.05, 400)
    W = (1 - depth) * np.exp(2j * np.pi * rng.uniform(size=400))
    mer = mercer_constant_fit(be, 0.0, W[:, None])
    x = disc.boundary_point(1.0)
    eps = 0.2

    def patch(n):
        P = []
        while len(P) < n:
            q = 1 + eps * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            if abs(q) < 1 - 1e-9:
                P.append(q)
        return np.array(P)[:, None]

    na = nikolov_andreev_fit(be, x, eps, patch(400), patch(400))
    ok = -1e-9 <= mer.value <= 0.5 * np.log(2) and na.stable
    return ClaimResult("mercer-dini-bounds", ok, {"mercer_C": mer.value, "mercer_history": mer.history,
                                                  "na_c": na.value, "na_ratio": na.details["ratio"]})
