"""Command-line interface.

Subcommands: ``generate``, ``fit``, ``eval``, ``plot`` and ``geodesic``.
Exit codes: 0 success, 2 usage or invalid configuration, 3 I/O failure,
4 numerical failure.

Fit configuration file grammar: one ``key = value`` per line, ``#`` starts a
comment, blank lines ignored. Keys: ``metric``, ``dispersion``, ``rho``,
``estimation`` (alias ``fit_smoother``), ``prediction`` (alias
``predict_smoother``), ``init``, ``grid_size``, ``max_iterations``,
``rel_tolerance``, ``seed``, ``samples``, ``recipe``. Command-line flags
override the file.
"""

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import GeneratorSpec, cloud_to_csv_text, generate, load_csv, write_text_atomic
from .dispersion import DispersionSpec
from .errors import InsufficientData, InvalidSpec, IoError, MpcError, ParseError, RaggedRows
from .evaluation import evaluate_fit
from .geodesics import integrate_geodesic, metric_length, parse_field, shoot_geodesic
from .metrics import MetricSpec
from .mpc import Init, MpcConfig, fit, predict_curve
from .recipes import recipe
from .results import (
    config_from_dict,
    curve_from_document,
    curve_to_csv_text,
    dumps,
    fit_document,
    sha256_of,
)
from .smoothers import SmootherSpec, fit_curve
from .svg import scatter_with_curve

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

CONFIG_KEYS = {
    "metric": "metric",
    "dispersion": "dispersion",
    "rho": "rho",
    "estimation": "estimation",
    "fit_smoother": "estimation",
    "prediction": "prediction",
    "predict_smoother": "prediction",
    "init": "init",
    "grid_size": "grid_size",
    "max_iterations": "max_iterations",
    "rel_tolerance": "rel_tolerance",
    "seed": "seed",
    "samples": "samples",
    "recipe": "recipe",
}


class UsageError(Exception):
    pass


def parse_config_text(text, source="<config>"):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip().strip('"').strip("'")
        if not sep or not key:
            raise UsageError(f"{source}:{lineno}: expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise UsageError(f"{source}:{lineno}: unknown key {key!r}")
        values[CONFIG_KEYS[key]] = value
    return values


def build_config(values):
    """Validate every key and assemble an :class:`MpcConfig` plus the sample count."""
    try:
        seed = int(values.get("seed", 0))
        base = recipe(values["recipe"], seed=seed) if "recipe" in values else MpcConfig(seed=seed)
        fields = {}
        if "metric" in values:
            fields["metric"] = MetricSpec.parse(values["metric"])
        if "dispersion" in values:
            fields["dispersion"] = DispersionSpec.parse(values["dispersion"])
        if "rho" in values:
            fields["rho"] = float(values["rho"])
        if "estimation" in values:
            fields["estimation_smoother"] = SmootherSpec.parse(values["estimation"])
        if "prediction" in values:
            fields["prediction_smoother"] = SmootherSpec.parse(values["prediction"])
        if "init" in values:
            fields["init"] = Init.parse(values["init"])
        if "grid_size" in values:
            fields["grid_size"] = int(values["grid_size"])
        if "max_iterations" in values:
            fields["max_iterations"] = int(values["max_iterations"])
        if "rel_tolerance" in values:
            fields["rel_tolerance"] = float(values["rel_tolerance"])
        samples = int(values.get("samples", 200))
        if samples < 2:
            raise InvalidSpec("samples must be >= 2")
        return replace(base, **fields), samples
    except (InvalidSpec, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _floats(text, name):
    try:
        return np.array([float(s) for s in text.split(",")], dtype=float)
    except ValueError:
        raise UsageError(f"--{name} expects comma-separated numbers, got {text!r}") from None


def _load_fit_doc(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args):
    try:
        spec = GeneratorSpec(args.kind, n=args.n, sigma=args.sigma, seed=args.seed)
    except InvalidSpec as exc:
        raise UsageError(str(exc)) from None
    cloud = generate(spec)
    write_text_atomic(args.out, cloud_to_csv_text(cloud))
    print(f"wrote {cloud.n} points ({spec.kind}, sigma={spec.sigma}, seed={spec.seed}) to {args.out}")
    return EXIT_OK


def _fit_values(args):
    values = {}
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(f"cannot read config {args.config}: {exc}") from None
        values.update(parse_config_text(text, args.config))
    for key in ("recipe", "metric", "dispersion", "rho", "estimation", "prediction", "init",
                "grid_size", "max_iterations", "rel_tolerance", "seed", "samples"):
        v = getattr(args, key)
        if v is not None:
            values[key] = str(v)
    return values


def cmd_fit(args):
    config, samples = build_config(_fit_values(args))
    if not Path(args.input).exists():
        raise IoError(f"input file not found: {args.input}")
    cloud = load_csv(args.input)
    out = Path(args.out)
    curve_out = Path(args.curve_out) if args.curve_out else out.with_suffix(".curve.csv")
    meta = {"input_sha256": sha256_of(args.input), "samples": samples}
    try:
        result = fit(config, cloud.data)
        curve = predict_curve(config, cloud.data, result, samples)
        report = evaluate_fit(cloud.data, result, curve, config.metric, cloud.ground_truth_t)
    except MpcError as exc:
        if isinstance(exc, (InvalidSpec, ParseError, RaggedRows, IoError, InsufficientData)):
            raise
        doc = {"meta": {"artifact": "mpcurve", "version": __version__, **meta},
               "error": f"{type(exc).__name__}: {exc}",
               "objective_trace": [float(v) for v in getattr(exc, "objective_trace", [])]}
        write_text_atomic(out, dumps(doc))
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    write_text_atomic(out, dumps(fit_document(config, result, curve, report, meta)))
    write_text_atomic(curve_out, curve_to_csv_text(curve))
    summary = (
        f"objective {result.objective_trace[0]:.6g} -> {result.objective_trace[-1]:.6g} "
        f"in {result.iterations_used} iterations"
        f" ({'converged' if result.converged else 'max iterations reached'})"
        f", rmse {report.rmse:.4g}"
    )
    if report.kendall_tau_abs is not None:
        summary += f", |tau| {report.kendall_tau_abs:.4f}"
    print(summary)
    if not result.converged:
        print("warning: relative tolerance not reached", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args):
    doc = _load_fit_doc(args.fit)
    if "config" not in doc or "lambdas" not in doc:
        raise UsageError(f"{args.fit} is not a fit result")
    config = config_from_dict(doc["config"])
    cloud = load_csv(args.input)
    lam = np.array(doc["lambdas"], dtype=float)
    if lam.size != cloud.n:
        raise UsageError(f"fit has {lam.size} indices but {args.input} has {cloud.n} points")

    class _Fit:
        lambdas = lam
        estimation_curve = fit_curve(config.estimation_smoother, lam, cloud.data)
        objective_trace = doc["objective_trace"]

    report = evaluate_fit(cloud.data, _Fit, curve_from_document(doc), config.metric, cloud.ground_truth_t)
    text = json.dumps({"eval": report.to_dict()}, indent=2) + "\n"
    if args.out:
        write_text_atomic(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_plot(args):
    doc = _load_fit_doc(args.fit)
    cloud = load_csv(args.input)
    curve = curve_from_document(doc)
    p = cloud.p
    if curve.points.shape[1] != p:
        raise UsageError(f"curve dimension {curve.points.shape[1]} does not match cloud dimension {p}")
    if args.axes:
        try:
            i, j = (int(s) for s in args.axes.split(","))
        except ValueError:
            raise UsageError("--axes expects two 1-based column numbers like 2,3") from None
        if i == j or not (1 <= i <= p and 1 <= j <= p):
            raise UsageError(f"invalid axes {args.axes!r}: need two distinct columns in 1..{p}")
        pairs = [(i - 1, j - 1)]
    elif p == 3:
        pairs = [(0, 1), (0, 2), (1, 2)]
    elif p >= 2:
        pairs = [(0, 1)]
    else:
        raise UsageError("plotting needs at least two coordinates")
    write_text_atomic(args.out, scatter_with_curve(cloud.data, curve.points, pairs))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_geodesic(args):
    try:
        field = parse_field(args.field)
    except InvalidSpec as exc:
        raise UsageError(str(exc)) from None
    if args.steps < 8:
        raise UsageError("--steps must be >= 8")
    if args.frm is not None and args.to is not None:
        x, y = _floats(args.frm, "from"), _floats(args.to, "to")
        if x.size != field.dim or y.size != field.dim:
            raise UsageError(f"endpoints must have {field.dim} coordinates")
        path = shoot_geodesic(field, x, y, args.steps, args.max_newton)
    elif args.x0 is not None and args.v0 is not None:
        x0, v0 = _floats(args.x0, "x0"), _floats(args.v0, "v0")
        if x0.size != field.dim or v0.size != field.dim:
            raise UsageError(f"initial conditions must have {field.dim} coordinates")
        path = integrate_geodesic(field, x0, v0, args.steps)
    else:
        raise UsageError("give either --from and --to, or --x0 and --v0")
    length = metric_length(field, path)
    if args.out:
        d = field.dim
        header = ["t"] + [f"x{k + 1}" for k in range(d)] + [f"v{k + 1}" for k in range(d)]
        rows = [",".join(header)]
        for t, xk, vk in zip(path.times, path.positions, path.velocities):
            rows.append(",".join(format(float(v), ".17g") for v in [t, *xk, *vk]))
        write_text_atomic(args.out, "\n".join(rows) + "\n")
    print(f"length {length:.12g}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="mpcurve", description="Metric-based principal curves.")
    parser.add_argument("--version", action="version", version=f"mpcurve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic point cloud as CSV")
    g.add_argument("--kind", required=True, choices=["seven", "spiral", "bridge"])
    g.add_argument("--n", type=int, default=120)
    g.add_argument("--sigma", type=float, default=0.1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    f = sub.add_parser("fit", help="fit a principal curve to a CSV point cloud")
    f.add_argument("--in", dest="input", required=True)
    f.add_argument("--out", required=True, help="JSON result path")
    f.add_argument("--curve-out", help="curve CSV path (default: <out>.curve.csv)")
    f.add_argument("--config", help="key = value configuration file")
    f.add_argument("--recipe", choices=["seven", "spiral", "bridge"])
    f.add_argument("--metric")
    f.add_argument("--dispersion")
    f.add_argument("--rho", type=float)
    f.add_argument("--estimation")
    f.add_argument("--prediction")
    f.add_argument("--init")
    f.add_argument("--grid-size", dest="grid_size", type=int)
    f.add_argument("--max-iterations", dest="max_iterations", type=int)
    f.add_argument("--rel-tolerance", dest="rel_tolerance", type=float)
    f.add_argument("--seed", type=int)
    f.add_argument("--samples", type=int, help="number of curve samples (default 200)")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="recompute diagnostics for a fit result")
    e.add_argument("--fit", required=True)
    e.add_argument("--in", dest="input", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot", help="SVG scatter of a cloud with its fitted curve")
    p.add_argument("--fit", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--axes", help="two 1-based columns, e.g. 2,3")
    p.set_defaults(func=cmd_plot)

    q = sub.add_parser("geodesic", help="integrate or shoot a geodesic")
    q.add_argument("--field", required=True,
                   help="euclidean:<d> | diag:<a1>,.. | constant:<m11>,.. | conformal:<a>[,<d>]")
    q.add_argument("--from", dest="frm")
    q.add_argument("--to")
    q.add_argument("--x0")
    q.add_argument("--v0")
    q.add_argument("--steps", type=int, default=64)
    q.add_argument("--max-newton", dest="max_newton", type=int, default=50)
    q.add_argument("--out")
    q.set_defaults(func=cmd_geodesic)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IoError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParseError, RaggedRows, InvalidSpec, InsufficientData) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MpcError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
