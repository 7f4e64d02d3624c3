"""Schema-validated scenario files and their execution."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import claims, conformal, extension, gromov, horospheres as hs, io, render
from .domains import Domain, domain_from_json
from .errors import (
    BranchCutError,
    ConvergenceError,
    DimensionError,
    GridResolutionError,
    HorolabError,
    InadmissibleSchemeError,
    NotInteriorError,
    PreconditionError,
)
from .metric import make_backend

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3
NUMERICAL_ERRORS = (ConvergenceError, GridResolutionError, InadmissibleSchemeError, BranchCutError,
                    FloatingPointError)
CONFIG_ERRORS = (PreconditionError, DimensionError, NotInteriorError, KeyError, TypeError)


class ScenarioError(HorolabError, ValueError):
    """The scenario file is missing, malformed or violates the schema."""


@dataclass
class Outcome:
    status: int
    report: dict
    files: list[Path] = field(default_factory=list)


def schema() -> dict:
    return json.loads(resources.files("horolab").joinpath("schemas/scenario.json").read_text())


def bundled_scenarios() -> list[str]:
    return sorted(p.name for p in resources.files("horolab").joinpath("scenarios").iterdir() if p.name.endswith(".json"))


def resolve_config(path) -> Path:
    """The path itself if it exists, otherwise a bundled scenario of that name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("horolab").joinpath("scenarios", p.name)
    if bundled.is_file():
        return Path(str(bundled))
    raise ScenarioError(f"no scenario file {path!s}; bundled: {', '.join(bundled_scenarios())}")


def load_scenario(path) -> dict:
    p = resolve_config(path)
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{p}: invalid JSON ({exc})") from None
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    try:
        jsonschema.validate(cfg, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(k) for k in exc.absolute_path) or "<root>"
        raise ScenarioError(f"schema violation at {where}: {exc.message}") from None
    if "claim" in cfg and cfg["claim"] not in claims.REGISTRY:
        raise ScenarioError(f"unknown claim id {cfg['claim']!r}; known ids: {', '.join(claims.known_ids())}")


# -- parameter decoding ----------------------------------------------------------------------


def point(spec, dom: Domain) -> np.ndarray:
    """``[re, im]`` for planar domains, a list of ``[re, im]`` pairs otherwise."""
    arr = np.asarray(spec, float)
    if arr.shape[-1] != 2:
        raise PreconditionError(f"points are [re, im] pairs, got {spec!r}")
    return dom.as_points(arr[..., 0] + 1j * arr[..., 1]).reshape(dom.dim)


def points(spec, dom: Domain) -> np.ndarray:
    arr = np.asarray(spec, float)
    z = arr[..., 0] + 1j * arr[..., 1]
    return dom.as_points(z).reshape(-1, dom.dim)


def _boundary(params: dict, dom: Domain, key: str = "x"):
    return dom.boundary_point(point(params[key], dom), params.get(f"{key}_side", params.get("side_tag")))


# -- operations ------------------------------------------------------------------------------


def _op_horoball_raster(be, p, seed):
    dom = be.domain
    x = _boundary(p, dom)
    o = point(p.get("o", [0, 0]), dom)
    codes, box = render.membership_raster(be, o, x, float(p["R"]), p.get("flavor", "small"),
                                          int(p.get("resolution", 200)), p.get("both_sides"))
    report = {"operation": "horoball_raster", "x": x.label(), "R": p["R"], "flavor": p.get("flavor", "small"),
              "counts": render.raster_counts(codes)}
    marks = []
    if be.mode == "ExactDisc" and abs(o[0]) == 0:
        c, r = hs.disc_horoball_geometry(complex(x.coords[0]), float(p["R"]))
        marks.append(c)
        report["euclidean_center"], report["euclidean_radius"] = c, r
    svg = render.raster_svg(codes, box, dom, x, f"{p.get('flavor', 'small')} horosphere at {x.label()}, R={p['R']:g}",
                            marks=marks)
    return report, [], svg, None


def _op_boundary_trace(be, p, seed):
    dom = be.domain
    x = _boundary(p, dom)
    samples = dom.sample_boundary(int(p.get("samples", 48)), seed) + [x]
    rep = hs.boundary_trace_probe(be, point(p.get("o", [[0, 0]] * dom.dim if dom.dim > 1 else [0, 0]), dom), x,
                                  float(p["R"]), p.get("flavor", "big"), samples, int(p.get("depth", hs.TRACE_DEPTH)))
    rows = []
    for r, y in zip(rep.rows, samples):
        row = {"index": r["index"], "label": r["label"], "in_trace": r["in_trace"], "excluded": r["excluded"],
               "statuses": r["statuses"]}
        for j, c in enumerate(y.coords):
            row[f"re{j}"], row[f"im{j}"] = c.real, c.imag
        rows.append(row)
    return rep.to_json(), rows, None, None


def _op_horofunction(be, p, seed):
    dom = be.domain
    x = _boundary(p, dom)
    Z = points(p["z"], dom)
    b = hs.horofunction_bounds(be, point(p.get("o", [0, 0]) if dom.dim == 1 else p["o"], dom), Z, x,
                               p.get("schemes"), int(p.get("n_max", hs.N_MAX)), bool(p.get("both_sides", False)))
    rows = [{"index": i, "lo": float(b.lo[i]), "hi": float(b.hi[i]), "err": float(b.err[i]),
             "flagged": bool(b.flagged[i])} for i in range(len(Z))]
    return {"operation": "horofunction", "x": x.label(), "backend": be.label, "collapsed": b.collapsed}, rows, None, None


def _op_distance_batch(be, p, seed):
    dom = be.domain
    if "input_csv" in p:
        Z, W = io.read_distance_batch(p["input_csv"])
    else:
        Z, W = points(p["z"], dom)[:, 0], points(p["w"], dom)[:, 0]
    rows = io.distance_batch_rows(be, Z, W)
    return {"operation": "distance_batch", "pairs": len(rows), "backend": be.label}, rows, None, list(io.DISTANCE_OUT)


def _op_visibility(be, p, seed):
    dom = be.domain
    x, y = _boundary(p, dom, "x"), _boundary(p, dom, "y")
    o = point(p.get("o", [0, 0]) if dom.dim == 1 else p["o"], dom)
    rep = gromov.visibility_probe(be, o, x, y, tuple(p.get("schedules", ("normal", "normal"))))
    rows = [{"k": k, "product": float(v), "error": float(e)} for k, (v, e) in enumerate(zip(rep.products, rep.errors))]
    return rep.to_json(), rows, None, None


def _op_four_point_delta(be, p, seed):
    dom = be.domain
    if p.get("points") == "lattice_cells":
        S = claims.lattice_cell_sample(dom, int(p.get("count", 50)), seed)
    elif "z" in p:
        S = points(p["z"], dom)
    else:
        S = dom.sample_interior(int(p.get("count", 50)), seed) * float(p.get("scale", 1.0))
    delta = gromov.four_point_delta(be, S)
    W = dom.window()
    row = {"window": None if W is None else W[1], "points": int(len(S)), "delta": delta, "backend": be.label}
    return {"operation": "four_point_delta", **row}, [row], None, None


def _op_emptiness_threshold(be, p, seed):
    dom = be.domain
    th = hs.emptiness_threshold(be, point(p["o"], dom), _boundary(p, dom))
    return {"operation": "emptiness_threshold", "M": th.M, "R_threshold": th.R_threshold, "applicable": th.applicable,
            "slopes": th.slopes}, [], None, None


def _op_slit_emptiness(be, p, seed):
    dom = be.domain
    rep = hs.slit_emptiness_scan(be, point(p.get("o", [conformal.SLIT_POLE, 0]), dom), _boundary(p, dom))
    return rep.to_json(), rep.rows, None, None


MAPS = {
    "half_disc": conformal.half_disc_map,
    "slit_psi": conformal.slit_disc_riemann_map,
    "slit_phi": conformal.slit_disc_to_disc,
}


def _op_extension(be, p, seed):
    name = p.get("map", "automorphism")
    if name == "automorphism":
        a = p.get("a", [0, 0])
        m = conformal.disc_automorphism(complex(a[0], a[1]), float(p.get("theta", 0.0)))
    elif name in MAPS:
        m = MAPS[name]()
    else:
        raise PreconditionError(f"unknown map {name!r}; known: automorphism, {', '.join(MAPS)}")
    n = int(p.get("samples", 24))
    rep = extension.extension_verdict(m, m.source.sample_boundary(n, seed), m.target.sample_boundary(n, seed + 1))
    return {"operation": "extension", "map": m.name, **rep.to_json()}, rep.correspondence_rows(), None, None


OPERATIONS = {
    "horoball_raster": _op_horoball_raster,
    "boundary_trace": _op_boundary_trace,
    "horofunction": _op_horofunction,
    "distance_batch": _op_distance_batch,
    "visibility": _op_visibility,
    "four_point_delta": _op_four_point_delta,
    "emptiness_threshold": _op_emptiness_threshold,
    "slit_emptiness": _op_slit_emptiness,
    "extension": _op_extension,
}


# -- runner ------------------------------------------------------------------------------------


def _backend_for(cfg: dict, dom: Domain):
    b = cfg.get("backend", {})
    return make_backend(dom, b.get("mode"), b.get("h", 0.02), b.get("map_id"))


def execute(cfg: dict, out_dir, stem: str = "scenario") -> Outcome:
    """Run a validated scenario and write its artifacts under ``out_dir``."""
    out_dir = Path(out_dir)
    outputs = cfg.get("outputs", {})
    seed = int(cfg.get("seed", claims.DEFAULT_SEED if "claim" in cfg else 0))
    files = []
    try:
        if "claim" in cfg:
            res = claims.reproduce(cfg["claim"], cfg.get("seed"))
            report = res.to_json()
            files.append(io.write_json(out_dir / outputs.get("json", f"{stem}.json"), report))
            if res.rows:
                files.append(io.write_csv(out_dir / outputs.get("csv", f"{stem}.csv"), res.rows))
            return Outcome(EXIT_PASS if res.passed else EXIT_FAIL, report, files)
        dom = domain_from_json(cfg["domain"])
        be = _backend_for(cfg, dom)
        report, rows, svg, columns = OPERATIONS[cfg["operation"]](be, cfg.get("params", {}), seed)
    except NUMERICAL_ERRORS as exc:
        report = {"error": type(exc).__name__, "message": str(exc), "scenario": cfg}
        files.append(io.write_json(out_dir / f"{stem}.error.json", report))
        return Outcome(EXIT_NUMERICAL, report, files)
    except CONFIG_ERRORS as exc:
        raise ScenarioError(f"{type(exc).__name__}: {exc}") from None
    report = {"scenario": cfg, "backend": be.to_json(), "seed": seed, **report}
    files.append(io.write_json(out_dir / outputs.get("json", f"{stem}.json"), report))
    if rows:
        files.append(io.write_csv(out_dir / outputs.get("csv", f"{stem}.csv"), rows, columns))
    if svg is not None:
        path = out_dir / outputs.get("svg", f"{stem}.svg")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(svg)
        files.append(path)
    passed = report.get("passed")
    return Outcome(EXIT_FAIL if passed is False else EXIT_PASS, report, files)


def run_scenario(path, out_dir=None) -> Outcome:
    cfg = load_scenario(path)
    p = resolve_config(path)
    out = Path(out_dir) if out_dir is not None else Path.cwd() / f"{p.stem}_out"
    return execute(cfg, out, p.stem)
