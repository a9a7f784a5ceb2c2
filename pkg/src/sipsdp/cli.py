"""Command line front end: ``sipsdp solve|boundary|check|homogenize|export-sdpa``.

Exit codes: 0 success, 1 usage or parse error, 2 solver failure,
3 precondition violation.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Sequence

import numpy as np

from . import grid as gridmod
from .io import ProblemFileError, dumps, load_problem, parse_schedule, problem_to_dict
from .poly import X, Y
from .preprocess import GENERIC_CAVEAT, extended_slater_check, homogenize_instance, slater_margin
from .problem import PreconditionError, SipProblem, half_up
from .relax import KINDS, build_relaxation, resolve_mode, run_hierarchy, support_value
from .sdp import Settings, export_sdpa
from .sos import SolverError, eps_star, is_sos_convex

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_PRECONDITION = 0, 1, 2, 3


_UNSIGNED = r"(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?"


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let points such as "-0.5,0" pass as values rather than options
        self._negative_number_matcher = re.compile(rf"^-{_UNSIGNED}(,-?{_UNSIGNED})*$")

    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


class _UsageError(Exception):
    pass


def _tol_pairs(items: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise _UsageError(f"--tol expects KEY=VAL, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def _settings(prob: SipProblem, args) -> Settings:
    values = dict(prob.options.get("tolerances", {}) or {})
    values.update(_tol_pairs(getattr(args, "tol", None)))
    try:
        return Settings.from_mapping(values)
    except (KeyError, ValueError) as exc:
        raise _UsageError(f"bad solver setting: {exc}") from exc


def _with_mode(prob: SipProblem, args) -> SipProblem:
    mode = getattr(args, "mode", None)
    return prob.with_mode(mode) if mode else prob


def _grid(prob: SipProblem, args) -> int:
    g = getattr(args, "grid", None)
    return int(g if g is not None else prob.options.get("grid_density", gridmod.DEFAULT_DENSITY))


def _schedule(prob: SipProblem, mode: str, args) -> list[tuple[int | None, int]] | None:
    if args.schedule:
        sched = parse_schedule(args.schedule)
    elif args.r is not None or args.t is not None:
        r, t = args.r, args.t
        if mode == "sosconvex":
            sched = [(None, t if t is not None else prob.d_K)]
        else:
            if r is None:
                r = max(half_up(prob.d_P), prob.d_K)
            if t is None:
                t = prob.d_K if prob.univariate_interval_mode else r
            sched = [(r, t)]
    elif "schedule" in prob.options:
        sched = parse_schedule(prob.options["schedule"])
    else:
        return None
    if mode != "sosconvex":
        fixed = []
        for r, t in sched:
            fixed.append((r if r is not None else max(half_up(prob.d_P), t), t))
        sched = fixed
    return sched


def cmd_solve(args) -> int:
    prob = _with_mode(load_problem(args.file), args)
    settings = _settings(prob, args)
    mode = resolve_mode(prob, settings=settings)
    if mode.mode == "general":
        prob.require_tau()
    sched = _schedule(prob, mode.mode, args)
    report = run_hierarchy(prob, sched, settings, n_jobs=args.jobs, mode=mode,
                           grid_density=_grid(prob, args))
    doc = report.to_dict(timing=not args.no_timing)
    doc["settings"] = {k: getattr(settings, k) for k in ("feas_tol", "gap_tol", "max_iter")}
    _emit(dumps(doc), args.output)
    return EXIT_OK if report.all_ok and report.best is not None else EXIT_SOLVER


def _fmt(x: float) -> str:
    return "%.17g" % x


def cmd_boundary(args) -> int:
    prob = _with_mode(load_problem(args.file), args)
    if prob.m != 2:
        raise PreconditionError(f"boundary sampling needs exactly 2 x variables, got {prob.m}")
    if args.directions < 0:
        raise _UsageError("-N must be nonnegative")
    prob.require_tau()
    settings = _settings(prob, args)
    default = max(half_up(prob.d_x), prob.d_K, 1)
    r = args.r if args.r is not None else default
    t = args.t if args.t is not None else default
    lines = ["angle,x1,x2,support_value"]
    for k in range(args.directions):
        angle = 2 * np.pi * k / args.directions
        res = support_value(prob, (np.cos(angle), np.sin(angle)), r, t, args.all_theta, settings)
        lines.append(",".join(_fmt(v) for v in (angle, res.point[0], res.point[1], res.value)))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_check(args) -> int:
    prob = load_problem(args.file)
    settings = _settings(prob, args)
    what = args.what
    if what == "sos-convex":
        f_ok = is_sos_convex(prob.f, X, settings)
        ygrid = gridmod.sample_set(prob.generator_terms(), prob.n, prob.bounding_box(), _grid(prob, args))
        rng = np.random.default_rng(0)
        pick = ygrid[rng.choice(len(ygrid), size=min(args.samples, len(ygrid)), replace=False)]
        per = [bool(is_sos_convex(-prob.p.partial_evaluate(Y, y), X, settings)) for y in pick]
        doc = {"check": "sos-convex", "objective": bool(f_ok),
               "negated_constraint_on_samples": all(per), "samples": pick.tolist(),
               "per_sample": per,
               "note": "the constraint check covers sampled index points only"}
    elif what == "slater":
        if not args.arg:
            raise _UsageError("slater needs a point, e.g. 'slater -0.5,0'")
        try:
            u = np.array([float(v) for v in args.arg.split(",")])
        except ValueError as exc:
            raise _UsageError(f"cannot parse point {args.arg!r}") from exc
        if u.size != prob.m:
            raise _UsageError(f"point has {u.size} entries, expected {prob.m}")
        density = _grid(prob, args)
        basic = slater_margin(prob, u, density, certify_order=prob.d_K, settings=settings)
        ext = extended_slater_check(prob, u, density)
        doc = {"check": "slater", "point": u.tolist(), "slater": basic.to_dict(),
               "extended": ext.to_dict()}
    elif what == "eps-star":
        if not args.arg:
            raise _UsageError("eps-star needs an order r")
        try:
            r = int(args.arg)
        except ValueError as exc:
            raise _UsageError(f"order must be an integer, got {args.arg!r}") from exc
        if 2 * r < prob.f.degree():
            raise PreconditionError(f"r = {r} is below ceil(deg f / 2)")
        doc = {"check": "eps-star", "r": r, "eps_star": eps_star(prob.f, r, settings),
               "polynomial": "objective"}
    else:
        raise _UsageError(f"unknown check {what!r}")
    _emit(dumps(doc), args.output)
    return EXIT_OK


def cmd_homogenize(args) -> int:
    prob = load_problem(args.file)
    hom = homogenize_instance(prob).to_problem()
    doc = problem_to_dict(hom)
    doc["generic_equality"] = GENERIC_CAVEAT
    _emit(dumps(doc), args.output)
    return EXIT_OK


def cmd_export_sdpa(args) -> int:
    prob = load_problem(args.file)
    kind = args.relaxation
    r = args.r
    t = args.t if args.t is not None else prob.d_K
    if kind in ("dsdp", "psdp"):
        if r is None:
            r = max(half_up(prob.d_P), t)
    sdp = build_relaxation(prob, kind, r, t)
    export_sdpa(sdp, args.output)
    print(dumps({"relaxation": kind, "r": r, "t": t, "path": args.output, **sdp.size_summary()}), end="")
    return EXIT_OK


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", help="problem file (JSON)")
    p.add_argument("--tol", action="append", default=[], metavar="KEY=VAL",
                   help="solver setting, e.g. feas_tol=1e-9 (repeatable)")
    p.add_argument("--grid", type=int, default=None, help="grid points per y coordinate")
    p.add_argument("--output", "-o", default=None, help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sipsdp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="run the relaxation hierarchy")
    _common(p)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--schedule", default=None, help="r1:t1,r2:t2,...")
    p.add_argument("--mode", choices=("auto", "general", "sosconvex"), default=None)
    p.add_argument("--jobs", type=int, default=1, help="solve schedule points in parallel")
    p.add_argument("--no-timing", action="store_true", help="omit timings (deterministic output)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("boundary", help="sample the outer approximation's boundary (CSV)")
    _common(p)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("-N", "--directions", type=int, default=64)
    p.add_argument("--mode", choices=("auto", "general", "sosconvex"), default=None)
    p.add_argument("--all-theta", action="store_true",
                   help="impose the perturbation bound at every order, not only r")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("check", help="sos-convex | slater X1,X2,... | eps-star R")
    _common(p)
    p.add_argument("what", choices=("sos-convex", "slater", "eps-star"))
    p.add_argument("arg", nargs="?", default=None)
    p.add_argument("--samples", type=int, default=10, help="index points for the sos-convex check")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("homogenize", help="write the sphere-compactified problem file")
    p.add_argument("file")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_homogenize)

    p = sub.add_parser("export-sdpa", help="write one relaxation in SDPA sparse format")
    p.add_argument("file")
    p.add_argument("--relaxation", choices=KINDS, default="dsdp")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--output", "-o", required=True)
    p.set_defaults(func=cmd_export_sdpa)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ProblemFileError as exc:
        print(f"sipsdp: problem file error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"sipsdp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"sipsdp: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (SolverError, gridmod.EmptyGridError) as exc:
        print(f"sipsdp: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
