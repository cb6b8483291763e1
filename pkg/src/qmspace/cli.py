"""File-based command line front end.

Every report embeds the resolved command (subcommand plus all options) so a
run can be repeated from its own output. Exit codes: 0 success, 1 domain or
validation failure, 2 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import core, crossratio, hypapprox, inversion, maps, metrize, perfectness
from .core import DomainError, MalformedInputError, QuasiMetricError, QuasiMetricSpace

SIG_DIGITS = 12


def rational(text: str) -> Fraction:
    """Exact parse of '1/3', '0.25' or '2'."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def real(text: str) -> float:
    return float(rational(text))


def tidy(obj):
    """Round floats to 12 significant digits; non-finite values become strings."""
    if isinstance(obj, dict):
        return {str(k): tidy(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [tidy(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return tidy(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def resolved_command(args: argparse.Namespace) -> dict:
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in ("cmd", "func")}
    return {"subcommand": args.cmd, "options": tidy({k: str(v) if isinstance(v, Path) else v
                                                      for k, v in opts.items()})}


def emit(args, payload: dict, out: Path | None = None) -> None:
    text = json.dumps({"command": resolved_command(args), **tidy(payload)}, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def write_space(args, space: QuasiMetricSpace, out: Path | None) -> None:
    # space files keep full precision so file pipelines match library calls
    obj = {"command": resolved_command(args), **space.to_json()}
    text = json.dumps(obj) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def read_json(path: Path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise MalformedInputError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc})") from None


def read_space(path: Path) -> QuasiMetricSpace:
    return QuasiMetricSpace.from_json(read_json(path))


def window_of(args, space: QuasiMetricSpace) -> perfectness.ScaleWindow:
    if args.rmin is None and args.rmax is None:
        return perfectness.full_window(space)
    full = perfectness.full_window(space)
    return perfectness.ScaleWindow(args.rmin if args.rmin is not None else full.r_min,
                                   args.rmax if args.rmax is not None else full.r_max)


# ---------------------------------------------------------------- subcommands

def cmd_gen(args) -> int:
    if args.kind == "cantor":
        spec = core.SpaceGeneratorSpec("cantor", {"ratio": args.ratio, "depth": args.depth})
    elif args.kind == "geometric":
        spec = core.SpaceGeneratorSpec("geometric", {"base": args.base, "mode": args.mode, "count": args.count})
    elif args.kind == "snowflake":
        if args.base_space is None:
            raise core.SpecError("snowflake needs --base-space")
        spec = core.SpaceGeneratorSpec("snowflake", {"base": read_space(args.base_space), "exponent": args.exponent})
    elif args.kind == "grid":
        if args.count is None:
            raise core.SpecError("grid needs --count")
        write_space(args, core.arithmetic_grid(args.count), args.out)
        return 0
    elif args.kind == "perturbed":
        if args.count is None:
            raise core.SpecError("perturbed needs --count")
        write_space(args, core.perturbed_metric_space(args.count, args.seed), args.out)
        return 0
    else:
        if args.coords is None:
            raise core.SpecError("euclidean_cloud needs --coords")
        spec = core.SpaceGeneratorSpec("euclidean_cloud", {"coords": read_json(args.coords)})
    write_space(args, core.generate_space(spec), args.out)
    return 0


def cmd_validate(args) -> int:
    obj = read_json(args.input)
    rho = obj.get("rho") if isinstance(obj, dict) else obj
    if rho is None:
        raise MalformedInputError("space JSON needs a 'rho' matrix")
    report = core.validate_space(rho)
    emit(args, {"report": report.to_dict()}, args.out)
    return 0 if report.passed else 1


def cmd_metrize(args) -> int:
    space = read_space(args.input)
    res = metrize.chain_metric(space, args.eps)
    frink = metrize.verify_frink_bounds(space, args.eps)
    if args.space_out is not None:
        write_space(args, res.as_space(space), args.space_out)
    emit(args, {"metrization": res.to_dict(), "bounds": frink.to_dict(),
                "triangle_violations": metrize.triangle_violations(res.d_matrix)}, args.out)
    return 0


def cmd_up(args) -> int:
    space = read_space(args.input)
    w = window_of(args, space)
    rep = perfectness.up_constant(space, w)
    payload = {"report": rep.to_dict()}
    if args.grid_step is not None:
        payload["grid_mu"] = perfectness.up_constant_grid(space, w, args.grid_step)
    emit(args, payload, args.out)
    return 0


def cmd_hd(args) -> int:
    space = read_space(args.input)
    floor = args.floor if args.floor is not None else perfectness.full_window(space).r_min
    if args.lambda1 is not None or args.lambda2 is not None:
        if args.lambda1 is None or args.lambda2 is None:
            raise DomainError("give both --lambda1 and --lambda2")
        rep = perfectness.hd_interval(space, args.lambda1, args.lambda2, floor)
    else:
        rep = perfectness.hd_search(space, floor)
    emit(args, {"report": rep.to_dict()}, args.out)
    return 0


def cmd_cond4(args) -> int:
    space = read_space(args.input)
    if args.mu1 is not None or args.mu2 is not None:
        if args.mu1 is None or args.mu2 is None:
            raise DomainError("give both --mu1 and --mu2")
        rep = perfectness.condition4_interval(space, args.mu1, args.mu2, args.budget, args.seed, args.floor)
    else:
        rep = perfectness.condition4_search(space, args.budget, args.seed, args.floor)
    emit(args, {"report": rep.to_dict()}, args.out)
    return 0


def cmd_sigma(args) -> int:
    space = read_space(args.input)
    rep = perfectness.sigma_estimate(space, args.pair_budget, args.seed, args.floor, triple_budget=args.budget)
    emit(args, {"report": rep.to_dict()}, args.out)
    return 0


def cmd_equiv(args) -> int:
    space = read_space(args.input)
    rep = perfectness.equivalence_report(space, window_of(args, space), args.budget, args.seed, args.pair_budget)
    emit(args, {"window": window_of(args, space).to_dict(), "report": rep.to_dict(),
                "all_positive": rep.all_positive, "all_degraded": rep.all_degraded}, args.out)
    return 0


def read_map(args) -> maps.PointMap:
    src, tgt = read_space(args.source), read_space(args.target)
    if args.bijection is None:
        return maps.PointMap.identity(src, tgt)
    return maps.PointMap(src, tgt, read_json(args.bijection))


def cmd_envelope(args) -> int:
    fmap = read_map(args)
    if args.kind == maps.SYMMETRIC:
        env = maps.qs_envelope(fmap, args.budget, args.seed)
    else:
        env = maps.qm_envelope(fmap, args.budget, args.seed)
    if args.csv is not None:
        Path(args.csv).write_text(env.to_csv())
    payload = {"kind": env.kind, "points": len(env)}
    if args.three_point:
        payload["three_point"] = maps.three_point_lambda(fmap).to_dict()
    emit(args, payload, args.out)
    return 0


def read_envelope_csv(path: Path, kind: str) -> maps.DistortionEnvelope:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise MalformedInputError(f"{path}: no such file") from None
    try:
        rows = list(csv.DictReader(io.StringIO(text)))
        t = np.array([float(r["t"]) for r in rows])
        s = np.array([float(r["s"]) for r in rows])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"{path}: expected CSV columns t,s ({exc})") from None
    ts, ss = maps.staircase(t, s)
    return maps.DistortionEnvelope(ts, ss, kind)


def read_control(path: Path) -> maps.PowerControl:
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise MalformedInputError(f"{path}: control must be a JSON object")
    return maps.PowerControl.from_dict(obj.get("control", obj))


def cmd_fit(args) -> int:
    env = read_envelope_csv(args.envelope, args.kind)
    grid = None
    if args.alpha_min is not None or args.alpha_max is not None or args.alpha_count is not None:
        grid = np.geomspace(args.alpha_min or 1.0, args.alpha_max or 8.0, args.alpha_count or 64)
    ctl = maps.fit_power_control(env, grid)
    emit(args, {"control": ctl.to_dict()}, args.out)
    return 0


def cmd_convert(args) -> int:
    ctl = read_control(args.control)
    if args.to == "qm":
        out = maps.qs_to_qm_control(ctl, args.k)
    else:
        if args.lam is None:
            raise DomainError("conversion to a symmetric control needs --lam")
        out = maps.qm_to_qs_control(ctl, args.k, args.lam)
    emit(args, {"control": out.to_dict()}, args.out)
    return 0


def cmd_compose(args) -> int:
    first, second = read_control(args.first), read_control(args.second)
    out = maps.compose_controls(first, second, args.mode, args.k)
    emit(args, {"control": out.to_dict()}, args.out)
    return 0


def resolve_center(space: QuasiMetricSpace, text: str) -> int:
    labels = [str(x) for x in space.labels]
    if text in labels:
        return labels.index(text)
    try:
        return int(text)
    except ValueError:
        raise DomainError(f"no point labelled {text!r}") from None


def cmd_invert(args) -> int:
    space = read_space(args.input)
    params = inversion.InversionParams(resolve_center(space, args.center), args.radius)
    write_space(args, inversion.invert_space(space, params, args.keep_center), args.out)
    return 0


def cmd_hyp(args) -> int:
    space = read_space(args.input)
    graph = hypapprox.build_hyperbolic_approximation(space, args.r, args.levels)
    est = hypapprox.boundary_quasimetric(graph, args.a)
    if args.graph_out is not None:
        Path(args.graph_out).write_text(json.dumps(graph.to_json()) + "\n")
    if args.space_out is not None:
        write_space(args, est.space, args.space_out)
    emit(args, {"level_counts": graph.level_counts(), "edges": len(graph.edges),
                "boundary": est.to_dict()}, args.out)
    return 0


def cmd_compare(args) -> int:
    cmp = hypapprox.boundary_comparison(read_space(args.original), read_space(args.boundary))
    emit(args, {"comparison": cmp.to_dict()}, args.out)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmspace", description="Finite quasi-metric space toolkit.")
    sub = parser.add_subparsers(dest="cmd", metavar="command")
    sub.required = True

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
        return p

    def space_in(p):
        p.add_argument("--in", dest="input", type=Path, required=True, help="space JSON file")

    def window(p):
        p.add_argument("--rmin", type=real, default=None)
        p.add_argument("--rmax", type=real, default=None)

    def budget(p, default):
        p.add_argument("--budget", type=int, default=default)
        p.add_argument("--seed", type=int, default=0)

    p = add("gen", cmd_gen, "generate a space file")
    p.add_argument("--kind", required=True,
                   choices=["cantor", "geometric", "snowflake", "grid", "perturbed", "euclidean_cloud"])
    p.add_argument("--ratio", type=rational, default=Fraction(1, 3))
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--base", type=rational, default=Fraction(1, 2))
    p.add_argument("--mode", choices=["linear", "squared"], default="linear")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--exponent", type=real, default=2.0)
    p.add_argument("--base-space", type=Path, default=None, help="space file to snowflake")
    p.add_argument("--coords", type=Path, default=None, help="JSON list of coordinates")
    p.add_argument("--seed", type=int, default=0)

    p = add("validate", cmd_validate, "check the quasi-metric axioms")
    space_in(p)

    p = add("metrize", cmd_metrize, "chain metrization at exponent eps")
    space_in(p)
    p.add_argument("--eps", type=real, required=True)
    p.add_argument("--space-out", type=Path, default=None)

    p = add("up", cmd_up, "uniform perfectness constant on a window")
    space_in(p)
    window(p)
    p.add_argument("--grid-step", type=real, default=None, help="also run the grid sweep with this step factor")

    p = add("hd", cmd_hd, "homogeneous density interval")
    space_in(p)
    p.add_argument("--floor", type=real, default=None, help="pair floor (default: smallest distance)")
    p.add_argument("--lambda1", type=real, default=None)
    p.add_argument("--lambda2", type=real, default=None)

    p = add("cond4", cmd_cond4, "cross-ratio interval condition")
    space_in(p)
    budget(p, perfectness.DEFAULT_TRIPLE_BUDGET)
    p.add_argument("--floor", type=real, default=0.0)
    p.add_argument("--mu1", type=real, default=None)
    p.add_argument("--mu2", type=real, default=None)

    p = add("sigma", cmd_sigma, "sigma-density estimate from greedy chains")
    space_in(p)
    budget(p, perfectness.DEFAULT_TRIPLE_BUDGET)
    p.add_argument("--floor", type=real, default=0.0)
    p.add_argument("--pair-budget", type=int, default=perfectness.DEFAULT_PAIR_BUDGET)

    p = add("equiv", cmd_equiv, "all four perfectness estimators on one window")
    space_in(p)
    window(p)
    budget(p, perfectness.DEFAULT_TRIPLE_BUDGET)
    p.add_argument("--pair-budget", type=int, default=perfectness.DEFAULT_PAIR_BUDGET)

    p = add("envelope", cmd_envelope, "distortion envelope of a point map")
    p.add_argument("--source", type=Path, required=True)
    p.add_argument("--target", type=Path, required=True)
    p.add_argument("--bijection", type=Path, default=None, help="JSON index list (default: identity)")
    p.add_argument("--kind", choices=list(maps.KINDS), default=maps.SYMMETRIC)
    budget(p, 200_000)
    p.add_argument("--csv", type=Path, default=None, help="write the staircase as CSV")
    p.add_argument("--three-point", action="store_true", help="also report the three-point constant")

    p = add("fit", cmd_fit, "fit a power control to an envelope CSV")
    p.add_argument("--envelope", type=Path, required=True)
    p.add_argument("--kind", choices=list(maps.KINDS), default=maps.SYMMETRIC)
    p.add_argument("--alpha-min", type=real, default=None)
    p.add_argument("--alpha-max", type=real, default=None)
    p.add_argument("--alpha-count", type=int, default=None)

    p = add("convert", cmd_convert, "convert a power control between symmetric and mobius forms")
    p.add_argument("--control", type=Path, required=True)
    p.add_argument("--to", choices=["qm", "qs"], required=True)
    p.add_argument("--k", type=real, required=True, help="quasi-metric coefficient")
    p.add_argument("--lam", type=real, default=None, help="three-point constant (for --to qs)")

    p = add("compose", cmd_compose, "dominating control of a composition")
    p.add_argument("--first", type=Path, required=True)
    p.add_argument("--second", type=Path, required=True)
    p.add_argument("--mode", choices=[maps.QM_QM, maps.QS_QM, "qm-qm", "qs-qm"], default=maps.QM_QM)
    p.add_argument("--k", type=real, default=None)

    p = add("invert", cmd_invert, "invert a space about one of its points")
    space_in(p)
    p.add_argument("--center", required=True, help="point label or index")
    p.add_argument("--radius", type=real, default=None, help="default: the diameter")
    p.add_argument("--keep-center", action="store_true")

    p = add("hyp", cmd_hyp, "hyperbolic approximation and boundary quasi-metric")
    space_in(p)
    p.add_argument("--r", type=real, required=True)
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--a", type=real, default=None, help="visual base (default 1/r)")
    p.add_argument("--graph-out", type=Path, default=None)
    p.add_argument("--space-out", type=Path, default=None)

    p = add("compare", cmd_compare, "compare a boundary space with the original")
    p.add_argument("--original", type=Path, required=True)
    p.add_argument("--boundary", type=Path, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "mode", None) in ("qm-qm", "qs-qm"):
        args.mode = args.mode.replace("-", "∘")
    try:
        return args.func(args)
    except (MalformedInputError, core.SpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuasiMetricError, crossratio.DegenerateQuadrupleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
