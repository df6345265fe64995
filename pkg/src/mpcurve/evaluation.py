"""Diagnostics for fitted curves: reconstruction error, ordering recovery, length."""

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, InsufficientData
from .metrics import MetricSpec, evaluate_metric_many


@dataclass
class EvalReport:
    rmse: float
    mean_metric_distance: float
    curve_length: float
    objective_first: float
    objective_last: float
    kendall_tau_abs: Optional[float] = None

    def to_dict(self):
        d = asdict(self)
        if d["kendall_tau_abs"] is None:
            del d["kendall_tau_abs"]
        return d


def reconstruction_error(Y, curve, lambdas, metric=None):
    """Return ``(rmse, mean_metric_distance)`` of ``Y`` against ``curve(lambdas)``.

    ``rmse`` is always Euclidean; the mean distance uses ``metric`` (L2 when
    omitted).
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (Y.shape[0],):
        raise DimensionMismatch(f"{lam.size} indices for {Y.shape[0]} points")
    fitted = curve.predict(lam) if hasattr(curve, "predict") else np.asarray(curve, dtype=float)
    if fitted.shape != Y.shape:
        raise DimensionMismatch(f"reconstruction shape {fitted.shape} does not match {Y.shape}")
    resid = Y - fitted
    rmse = float(np.sqrt(np.mean(np.sum(resid * resid, axis=1))))
    metric = MetricSpec.l2() if metric is None else metric
    mean_dist = float(np.mean(evaluate_metric_many(metric, Y, fitted)))
    return rmse, mean_dist


def _pair_counts(a, b):
    da = np.sign(a[:, None] - a[None, :])
    db = np.sign(b[:, None] - b[None, :])
    iu = np.triu_indices(a.size, k=1)
    sa, sb = da[iu], db[iu]
    prod = sa * sb
    concordant = int(np.count_nonzero(prod > 0))
    discordant = int(np.count_nonzero(prod < 0))
    untied_a = int(np.count_nonzero(sa))
    untied_b = int(np.count_nonzero(sb))
    return concordant, discordant, untied_a, untied_b


def kendall_tau(a, b):
    """Kendall's tau-b.

    Pairs tied in either vector count as neither concordant nor discordant;
    the denominator is ``sqrt(n1 * n2)`` with ``n1``/``n2`` the number of
    pairs untied in ``a``/``b``. Returns 0 when either vector is constant.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size != b.size:
        raise DimensionMismatch(f"lengths differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise InsufficientData("kendall_tau needs at least 2 observations")
    c, d, n1, n2 = _pair_counts(a, b)
    if n1 == 0 or n2 == 0:
        return 0.0
    return (c - d) / np.sqrt(float(n1) * float(n2))


def polyline_length(curve):
    """Sum of Euclidean segment lengths of a sampled curve (``Curve`` or ``(m, p)`` array)."""
    P = np.asarray(getattr(curve, "points", curve), dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] < 2:
        raise InsufficientData("a polyline needs at least 2 samples")
    seg = np.diff(P, axis=0)
    return float(np.sum(np.sqrt(np.sum(seg * seg, axis=1))))


def evaluate_fit(Y, fit_result, curve, metric=None, ground_truth_t=None):
    """Bundle the diagnostics of one fit into an :class:`EvalReport`."""
    rmse, mean_dist = reconstruction_error(Y, fit_result.estimation_curve, fit_result.lambdas, metric)
    tau = None
    if ground_truth_t is not None:
        tau = min(1.0, abs(kendall_tau(fit_result.lambdas, ground_truth_t)))
    return EvalReport(
        rmse=rmse,
        mean_metric_distance=mean_dist,
        curve_length=polyline_length(curve),
        objective_first=float(fit_result.objective_trace[0]),
        objective_last=float(fit_result.objective_trace[-1]),
        kendall_tau_abs=tau,
    )
