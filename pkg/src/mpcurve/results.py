"""JSON and CSV serialization of fit results."""

import csv
import hashlib
import io
import json

import numpy as np

from . import __version__
from .dispersion import DispersionSpec
from .errors import InvalidSpec
from .metrics import MetricSpec
from .mpc import Curve, Init, MpcConfig
from .smoothers import SmootherSpec


def config_to_dict(config):
    d = config.to_dict()
    if config.metric.kind == "mahalanobis":
        d["metric_precision"] = config.metric.precision.tolist()
    return d


def config_from_dict(d):
    try:
        if d["metric"] == "mahalanobis":
            metric = MetricSpec.mahalanobis(np.array(d["metric_precision"], dtype=float))
        else:
            metric = MetricSpec.parse(d["metric"])
        return MpcConfig(
            metric=metric,
            dispersion=DispersionSpec.parse(d["dispersion"]),
            rho=float(d["rho"]),
            estimation_smoother=SmootherSpec.parse(d["estimation"]),
            prediction_smoother=SmootherSpec.parse(d["prediction"]),
            init=Init.parse(d["init"]),
            grid_size=int(d["grid_size"]),
            max_iterations=int(d["max_iterations"]),
            rel_tolerance=float(d["rel_tolerance"]),
            seed=int(d["seed"]),
        )
    except KeyError as exc:
        raise InvalidSpec(f"fit document lacks config key {exc}") from None


def sha256_of(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def fit_document(config, fit_result, curve, report=None, meta_extra=None):
    meta = {"artifact": "mpcurve", "version": __version__, "seed": int(config.seed)}
    meta["config"] = config_to_dict(config)
    if meta_extra:
        meta.update(meta_extra)
    doc = {
        "meta": meta,
        "config": config_to_dict(config),
        "lambdas": [float(v) for v in fit_result.lambdas],
        "objective_trace": [float(v) for v in fit_result.objective_trace],
        "converged": bool(fit_result.converged),
        "iterations_used": int(fit_result.iterations_used),
        "curve": {
            "lambdas": [float(v) for v in curve.lambdas],
            "points": [[float(v) for v in row] for row in curve.points],
        },
    }
    if report is not None:
        doc["eval"] = report.to_dict()
    return doc


def dumps(doc):
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def curve_from_document(doc):
    c = doc["curve"]
    return Curve(np.array(c["lambdas"], dtype=float), np.array(c["points"], dtype=float))


def curve_to_csv_text(curve):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    p = curve.points.shape[1]
    w.writerow(["lambda"] + [f"y{j + 1}" for j in range(p)])
    for lam, row in zip(curve.lambdas, curve.points):
        w.writerow([format(float(lam), ".17g")] + [format(float(v), ".17g") for v in row])
    return buf.getvalue()
