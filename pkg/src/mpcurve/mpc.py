"""Metric-based principal curve fitting.

The fitter assigns each observation a projection index and minimizes

    mean_i d(Y_i, Yhat(lambda_i)) + rho * phi(lambda)

where ``Yhat`` is a per-coordinate smoother fit on ``(lambda, Y)``, ``d`` a
metric and ``phi`` a dispersion penalty on the sorted indices. Minimization
alternates two steps: refit the curve for fixed indices, then run one sweep
of grid-based coordinate descent over the indices with the curve held fixed.
The indices are renormalized to ``[0, 1]`` after every sweep.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .dispersion import DispersionSpec, evaluate_dispersion, evaluate_dispersion_many
from .errors import DegenerateData, InsufficientData, InvalidSpec, MpcError, NonFiniteObjective
from .metrics import MetricSpec, evaluate_metric_many
from .rng import Xoshiro256
from .smoothers import CurveModel, SmootherSpec, fit_curve

# scores closer than this (relative) count as ties; ties go to the smaller index
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class Init:
    """Index initialization: ``"pca"``, ``"coordinate"`` (with ``column``),
    ``"random"`` or ``"graph"`` (geodesic distance on a nearest-neighbour graph)."""

    kind: str = "graph"
    column: int = 0

    def __post_init__(self):
        if self.kind not in ("pca", "coordinate", "random", "graph"):
            raise InvalidSpec(f"unknown init {self.kind!r}")
        if self.column < 0:
            raise InvalidSpec("init column must be >= 0")

    @classmethod
    def parse(cls, text):
        name, _, arg = text.strip().partition(":")
        if name == "coordinate":
            try:
                return cls("coordinate", int(arg or 0))
            except ValueError:
                raise InvalidSpec(f"bad init {text!r}") from None
        if arg:
            raise InvalidSpec(f"bad init {text!r}")
        return cls(name)

    def to_string(self):
        return f"coordinate:{self.column}" if self.kind == "coordinate" else self.kind


@dataclass(frozen=True)
class MpcConfig:
    metric: MetricSpec = field(default_factory=MetricSpec.l2)
    dispersion: DispersionSpec = field(default_factory=DispersionSpec)
    rho: float = 0.01
    estimation_smoother: SmootherSpec = field(default_factory=lambda: SmootherSpec.lowess(0.4))
    prediction_smoother: SmootherSpec = field(default_factory=lambda: SmootherSpec.lowess(0.4))
    init: Init = field(default_factory=Init)
    grid_size: int = 256
    max_iterations: int = 50
    rel_tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.init, str):
            object.__setattr__(self, "init", Init.parse(self.init))
        if not self.rho >= 0:
            raise InvalidSpec(f"rho must be >= 0, got {self.rho}")
        if int(self.grid_size) != self.grid_size or self.grid_size < 16:
            raise InvalidSpec(f"grid_size must be an integer >= 16, got {self.grid_size}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise InvalidSpec(f"max_iterations must be a positive integer, got {self.max_iterations}")
        if not self.rel_tolerance >= 0:
            raise InvalidSpec("rel_tolerance must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")

    def to_dict(self):
        return {
            "metric": self.metric.to_string(),
            "dispersion": self.dispersion.to_string(),
            "rho": self.rho,
            "estimation": self.estimation_smoother.to_string(),
            "prediction": self.prediction_smoother.to_string(),
            "init": self.init.to_string(),
            "grid_size": int(self.grid_size),
            "max_iterations": int(self.max_iterations),
            "rel_tolerance": self.rel_tolerance,
            "seed": int(self.seed),
        }


@dataclass
class MpcFit:
    lambdas: np.ndarray
    estimation_curve: CurveModel
    objective_trace: list
    converged: bool
    iterations_used: int


@dataclass
class Curve:
    """A principal curve sampled at increasing indices."""

    lambdas: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] != self.lambdas.size:
            raise InvalidSpec("curve points must be an (m, p) array matching lambdas")
        if self.lambdas.size > 1 and np.any(np.diff(self.lambdas) <= 0):
            raise InvalidSpec("curve lambdas must be strictly increasing")


def _as_matrix(Y):
    Y = np.asarray(getattr(Y, "data", Y), dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.ndim != 2:
        raise InvalidSpec("point cloud must be an (n, p) matrix")
    return Y


def rescale_unit(values):
    """Affine map onto ``[0, 1]``; min goes to exactly 0 and max to exactly 1."""
    v = np.asarray(values, dtype=float)
    lo, hi = v.min(), v.max()
    if not hi > lo:
        raise DegenerateData("cannot rescale: all values are identical")
    out = (v - lo) / (hi - lo)
    out[v == lo] = 0.0
    out[v == hi] = 1.0
    return out


def initialize_lambda(Y, init=None, seed=0):
    """Starting projection indices in ``[0, 1]``."""
    Y = _as_matrix(Y)
    init = Init() if init is None else (Init.parse(init) if isinstance(init, str) else init)
    n = Y.shape[0]
    if n < 4:
        raise InsufficientData(f"need at least 4 points, got {n}")
    if np.all(Y == Y[0]):
        raise DegenerateData("all points are identical")
    if init.kind == "pca":
        Yc = Y - Y.mean(axis=0)
        _, _, vt = np.linalg.svd(Yc, full_matrices=False)
        v = vt[0]
        # fix the sign so results do not depend on the LAPACK build
        k = np.argmax(np.abs(v))
        if v[k] < 0:
            v = -v
        return rescale_unit(Yc @ v)
    if init.kind == "coordinate":
        if init.column >= Y.shape[1]:
            raise InvalidSpec(f"init column {init.column} out of range for p={Y.shape[1]}")
        return rescale_unit(Y[:, init.column])
    if init.kind == "graph":
        return rescale_unit(graph_order(Y))
    rng = Xoshiro256(seed)
    return np.array([rng.uniform() for _ in range(n)])


def graph_order(Y, k=None):
    """Geodesic position of each point along a k-nearest-neighbour graph.

    The graph uses Euclidean edge lengths; ``k`` starts at
    ``max(4, ceil(log2 n))`` and grows until the graph is connected. The
    origin is the point farthest (in graph distance) from point 0, a standard
    double sweep for locating an end of a path-like graph.
    """
    Y = _as_matrix(Y)
    n = Y.shape[0]
    D = np.sqrt(np.sum((Y[:, None, :] - Y[None, :, :]) ** 2, axis=-1))
    order = np.argsort(D, axis=1, kind="stable")
    k = max(4, int(np.ceil(np.log2(n)))) if k is None else int(k)
    while True:
        k = min(k, n - 1)
        rows = np.repeat(np.arange(n), k)
        cols = order[:, 1:k + 1].ravel()
        W = np.zeros((n, n))
        W[rows, cols] = D[rows, cols]
        W = np.maximum(W, W.T)
        ncomp, _ = connected_components(csr_matrix(W), directed=False)
        if ncomp == 1 or k == n - 1:
            break
        k += 1
    G = csr_matrix(W)
    d0 = shortest_path(G, directed=False, indices=0)
    start = int(np.argmax(np.where(np.isfinite(d0), d0, -1.0)))
    return shortest_path(G, directed=False, indices=start)


def objective(config, Y, curve, lambdas):
    """Mean metric distance to the curve plus ``rho`` times the dispersion."""
    Y = _as_matrix(Y)
    lam = np.asarray(lambdas, dtype=float)
    fitted = curve.predict(lam)
    dist = evaluate_metric_many(config.metric, Y, fitted)
    value = float(np.mean(dist))
    if config.rho:
        value += config.rho * evaluate_dispersion(config.dispersion, lam)
    return value


def _candidate_scores(config, dist_row, others, index, grid, n):
    """Per-candidate objective terms that depend on ``lambda[index]``."""
    score = dist_row / n
    if config.rho:
        L = np.repeat(others[None, :], grid.size, axis=0)
        L[:, index] = grid
        score = score + config.rho * evaluate_dispersion_many(config.dispersion, L)
    return score


def _argmin_low(score):
    best = score.min()
    tol = TIE_RTOL * max(1.0, abs(best))
    return int(np.flatnonzero(score <= best + tol)[0])


def project_point(config, curve, y, grid, others, index):
    """Best grid value for ``lambda[index]`` with every other index held fixed.

    Minimizes ``d(y, Yhat(g)) / n + rho * phi(lambda with lambda[index] = g)``
    over ``g`` in ``grid`` where ``n = len(others)``. Near-ties (relative
    1e-12) resolve to the smallest ``g``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise InvalidSpec("grid must be a non-empty strictly increasing vector")
    others = np.asarray(others, dtype=float)
    G = curve.predict(grid)
    dist = evaluate_metric_many(config.metric, np.asarray(y, dtype=float)[None, :], G)
    score = _candidate_scores(config, dist, others, index, grid, others.size)
    if not np.all(np.isfinite(score)):
        raise NonFiniteObjective("non-finite objective while projecting a point")
    return float(grid[_argmin_low(score)])


def _sweep(config, Y, curve, lam, rng, grid):
    """One pass of coordinate descent in a random order; updates ``lam`` in place.

    The curve is fixed during the sweep so point-to-grid distances are computed
    once. A move is accepted only if it does not raise the objective relative
    to the current value of that coordinate.
    """
    n = Y.shape[0]
    G = curve.predict(grid)
    D = evaluate_metric_many(config.metric, Y[:, None, :], G[None, :, :])
    own = evaluate_metric_many(config.metric, Y, curve.predict(lam))
    if not (np.all(np.isfinite(D)) and np.all(np.isfinite(own))):
        raise NonFiniteObjective("non-finite distance during coordinate descent")
    for i in rng.permutation(n):
        score = _candidate_scores(config, D[i], lam, i, grid, n)
        k = _argmin_low(score)
        current = own[i] / n
        if config.rho:
            current += config.rho * evaluate_dispersion(config.dispersion, lam)
        if score[k] <= current:
            lam[i] = grid[k]
            own[i] = D[i, k]
    return lam


def fit(config, Y):
    """Fit a metric-based principal curve to the rows of ``Y``.

    Each iteration refits the estimation curve on the current indices, records
    the objective, and stops once the relative improvement falls below
    ``rel_tolerance`` (``converged=True``) or after ``max_iterations``
    sweeps. Because a refit can undo part of a sweep's progress, the returned
    indices are those of the best recorded iterate; if that is not the last
    one its objective is appended to the trace once more, so the trace always
    ends with the objective of the returned fit.
    """
    Y = _as_matrix(Y)
    n = Y.shape[0]
    if n < 4:
        raise InsufficientData(f"need at least 4 points, got {n}")
    if not np.all(np.isfinite(Y)):
        raise NonFiniteObjective("point cloud contains non-finite values")
    lam = initialize_lambda(Y, config.init, config.seed)
    grid = np.linspace(0.0, 1.0, int(config.grid_size))
    rng = Xoshiro256(config.seed)

    trace = []
    try:
        best, converged, iterations = _alternate(config, Y, lam, grid, rng, trace)
    except MpcError as exc:
        exc.objective_trace = list(trace)
        raise

    value, lam_best, curve_best = best
    if value != trace[-1]:
        trace.append(value)
    return MpcFit(
        lambdas=lam_best,
        estimation_curve=curve_best,
        objective_trace=trace,
        converged=converged,
        iterations_used=iterations,
    )


def _alternate(config, Y, lam, grid, rng, trace):
    best = None
    converged = False
    iterations = 0
    while True:
        curve = fit_curve(config.estimation_smoother, lam, Y)
        value = objective(config, Y, curve, lam)
        if not np.isfinite(value):
            raise NonFiniteObjective(f"objective is {value} at iteration {iterations}")
        trace.append(value)
        if best is None or value < best[0]:
            best = (value, lam.copy(), curve)
        if len(trace) > 1:
            prev = trace[-2]
            improvement = (prev - value) / abs(prev) if prev != 0 else 0.0
            if improvement < config.rel_tolerance:
                converged = True
                break
        if iterations >= config.max_iterations:
            break
        lam = _sweep(config, Y, curve, lam, rng, grid)
        if lam.max() > lam.min():
            lam = rescale_unit(lam)
        iterations += 1
    return best, converged, iterations


def predict_curve(config, Y, fit_result, m=200):
    """Refit with the prediction smoother on the fitted indices and sample ``m``
    equispaced indices in ``[0, 1]``."""
    if m < 2:
        raise InvalidSpec("need at least 2 curve samples")
    Y = _as_matrix(Y)
    model = fit_curve(config.prediction_smoother, fit_result.lambdas, Y)
    lams = np.linspace(0.0, 1.0, int(m))
    return Curve(lams, model.predict(lams))
