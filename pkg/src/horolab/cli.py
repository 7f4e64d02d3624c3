"""Command line entry point: ``horolab run | reproduce | render | list-claims``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import claims, io
from .domains import domain_from_json
from .errors import HorolabError, PreconditionError
from .metric import make_backend
from .render import render_horosphere_raster
from .scenario import (
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_NUMERICAL,
    EXIT_PASS,
    NUMERICAL_ERRORS,
    ScenarioError,
    run_scenario,
)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="horolab", description="Horosphere laboratory for model domains.")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file (or a bundled scenario by name)")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (default: ./<config-stem>_out)")

    rep = sub.add_parser("reproduce", help="reproduce one claim with pinned seeds")
    rep.add_argument("claim_id")
    rep.add_argument("--seed", type=int, default=None)
    rep.add_argument("--out", help="directory for the JSON report and CSV rows")

    ren = sub.add_parser("render", help="SVG raster of horosphere membership on a planar domain")
    ren.add_argument("--domain", default="UnitDisc", help="UnitDisc, SlitDisc, HalfDisc, ... (planar kinds)")
    ren.add_argument("--mode", default=None, help="backend mode; defaults to the most accurate available")
    ren.add_argument("--h", type=float, default=0.02, help="grid spacing for the surrogate backend")
    ren.add_argument("--o", type=float, nargs=2, default=(0.0, 0.0), metavar=("RE", "IM"))
    ren.add_argument("--x", type=float, nargs=2, default=(1.0, 0.0), metavar=("RE", "IM"))
    ren.add_argument("--side", choices=("above", "below"), default=None)
    ren.add_argument("--R", type=float, default=1.0)
    ren.add_argument("--flavor", choices=("small", "big"), default="small")
    ren.add_argument("--resolution", type=int, default=200)
    ren.add_argument("--timestamp", action="store_true", help="embed a generation timestamp")
    ren.add_argument("--out", default="horosphere.svg")

    sub.add_parser("list-claims", help="list the reproducible claim ids")
    return ap


def _cmd_run(args) -> int:
    outcome = run_scenario(args.config, args.out)
    for f in outcome.files:
        print(f)
    if outcome.status == EXIT_NUMERICAL:
        print(f"numerical failure: {outcome.report['error']}: {outcome.report['message']}", file=sys.stderr)
    elif "passed" in outcome.report and outcome.report["passed"] is not None:
        print("PASS" if outcome.report["passed"] else "FAIL")
    return outcome.status


def _cmd_reproduce(args) -> int:
    res = claims.reproduce(args.claim_id, args.seed)
    print(res.summary())
    if args.out:
        out = Path(args.out)
        io.write_json(out / f"{args.claim_id}.json", res.to_json())
        if res.rows:
            io.write_csv(out / f"{args.claim_id}.csv", res.rows)
    return EXIT_PASS if res.passed else EXIT_FAIL


def _cmd_render(args) -> int:
    dom = domain_from_json({"kind": args.domain})
    if not dom.planar:
        raise PreconditionError(f"{dom.kind} is not planar; rasters need a planar domain")
    be = make_backend(dom, args.mode, args.h)
    x = dom.boundary_point(complex(*args.x), args.side)
    svg = render_horosphere_raster(be, complex(*args.o), x, args.R, args.flavor, args.resolution,
                                   timestamp=args.timestamp)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg)
    print(out)
    return EXIT_PASS


def _cmd_list(args) -> int:
    for cid in claims.known_ids():
        print(f"{cid}\t{claims.REGISTRY[cid].description}")
    return EXIT_PASS


COMMANDS = {"run": _cmd_run, "reproduce": _cmd_reproduce, "render": _cmd_render, "list-claims": _cmd_list}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ScenarioError, HorolabError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
