import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from mpcurve.datasets import GeneratorSpec, generate
from mpcurve.dispersion import DispersionSpec
from mpcurve.errors import DegenerateData, InsufficientData, InvalidSpec, NonFiniteObjective
from mpcurve.evaluation import kendall_tau, polyline_length, reconstruction_error
from mpcurve.metrics import MetricSpec
from mpcurve.mpc import (
    Curve,
    Init,
    MpcConfig,
    _sweep,
    fit,
    initialize_lambda,
    objective,
    predict_curve,
    project_point,
)
from mpcurve.recipes import recipe
from mpcurve.rng import Xoshiro256
from mpcurve.smoothers import SmootherSpec, fit_curve


class FixedCurve:
    """Stand-in curve with a known closed form."""

    def __init__(self, f):
        self.f = f

    def predict(self, lam):
        return self.f(np.asarray(lam, dtype=float))


identity_line = FixedCurve(lambda lam: np.column_stack([lam, lam]))


def offset_curve(offsets):
    """Reconstruction at the i-th index lies ``offsets[i]`` away in the first coordinate."""
    offsets = np.asarray(offsets, dtype=float)
    return FixedCurve(lambda lam: np.column_stack([offsets, np.zeros_like(offsets)]))


def test_init_pca_collinear():
    Y = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.5, 0.0]])
    lam = initialize_lambda(Y, Init("pca"))
    assert np.allclose(lam, [0, 0.5, 1, 0.75]) or np.allclose(lam, [1, 0.5, 0, 0.25])


def test_init_coordinate():
    Y = np.array([[3.0, 9.0], [1.0, 4.0], [2.0, 0.0], [2.5, 1.0]])
    assert np.allclose(initialize_lambda(Y, Init("coordinate", 0)), [1, 0, 0.5, 0.75])
    with pytest.raises(InvalidSpec):
        initialize_lambda(Y, Init("coordinate", 2))


def test_init_random_deterministic():
    Y = np.random.default_rng(0).normal(size=(20, 3))
    a = initialize_lambda(Y, Init("random"), seed=5)
    b = initialize_lambda(Y, Init("random"), seed=5)
    assert np.array_equal(a, b)
    assert np.all((a >= 0) & (a < 1))
    assert not np.array_equal(a, initialize_lambda(Y, Init("random"), seed=6))


def test_init_graph_orders_a_curve():
    t = np.linspace(0, 1, 60)
    Y = np.column_stack([t, 2 * t * np.cos(6 * t), 2 * t * np.sin(6 * t)])
    lam = initialize_lambda(Y, Init("graph"))
    assert abs(kendall_tau(lam, t)) == 1.0
    assert lam.min() == 0.0 and lam.max() == 1.0


def test_init_errors():
    with pytest.raises(InsufficientData):
        initialize_lambda(np.zeros((3, 2)), Init("pca"))
    with pytest.raises(DegenerateData):
        initialize_lambda(np.ones((6, 2)), Init("pca"))


def test_init_parse_roundtrip():
    for text in ("pca", "random", "graph", "coordinate:2"):
        assert Init.parse(text).to_string() == text
    with pytest.raises(InvalidSpec):
        Init.parse("spectral")


@pytest.mark.parametrize(
    "offsets, rho, expected",
    [([0, 0, 0], 0.5, 0.2), ([1, 2, 3], 0.0, 2.0), ([1, 2, 3], 0.5, 2.2)],
)
def test_objective_examples(offsets, rho, expected):
    # lambdas spread 0.4 so the L1-gap dispersion is 0.4
    lam = np.array([0.1, 0.3, 0.5])
    Y = np.zeros((3, 2))
    config = MpcConfig(rho=rho)
    assert objective(config, Y, offset_curve(offsets), lam) == pytest.approx(expected, abs=1e-12)


def test_project_point_exact():
    config = MpcConfig(rho=0.0)
    grid = np.linspace(0, 1, 21)
    got = project_point(config, identity_line, np.array([0.5, 0.5]), grid, np.zeros(4), 0)
    assert got == 0.5


def test_project_point_tie_goes_low():
    config = MpcConfig(rho=0.0)
    grid = np.array([0.1, 0.3, 0.7, 0.9])
    got = project_point(config, identity_line, np.array([0.5, 0.5]), grid, np.zeros(4), 0)
    assert got == 0.3


@given(st.floats(-1, 2), st.floats(-1, 2))
@settings(max_examples=100, deadline=None)
def test_project_point_rho_zero_is_nearest_grid_point(a, b):
    config = MpcConfig(rho=0.0)
    grid = np.linspace(0, 1, 33)
    y = np.array([a, b])
    got = project_point(config, identity_line, y, grid, np.zeros(5), 2)
    d = np.linalg.norm(np.column_stack([grid, grid]) - y, axis=1)
    assert got == grid[np.flatnonzero(d <= d.min() * (1 + 1e-12) + 1e-15)[0]]


def test_project_point_penalty_pulls_inward():
    # with a huge rho the range-type penalty dominates: stay inside the others' hull
    config = MpcConfig(rho=100.0)
    grid = np.linspace(0, 1, 11)
    others = np.array([0.0, 0.3, 0.6, 0.5])
    got = project_point(config, identity_line, np.array([1.0, 1.0]), grid, others, 3)
    assert got == pytest.approx(0.6)


def test_project_point_rejects_bad_grid():
    with pytest.raises(InvalidSpec):
        project_point(MpcConfig(), identity_line, np.zeros(2), [0.5, 0.2], np.zeros(4), 0)


def _noisy_cloud(seed=0, n=40):
    return generate(GeneratorSpec("bridge", n=n, sigma=0.1, seed=seed)).data


@pytest.mark.parametrize("dispersion", ["l1_gaps", "squared_gaps", "max_gap", "cv"])
def test_descent_within_a_sweep(dispersion):
    Y = _noisy_cloud()
    config = MpcConfig(dispersion=DispersionSpec(dispersion), rho=0.05, estimation_smoother=SmootherSpec.lowess(0.3))
    lam = initialize_lambda(Y, Init("pca"))
    lam = 0.05 + 0.9 * lam  # keep the cv penalty well defined
    curve = fit_curve(config.estimation_smoother, lam, Y)
    grid = np.linspace(0, 1, 64)

    # replay the sweep one coordinate at a time through project_point
    order = Xoshiro256(3).permutation(len(lam))
    replay = lam.copy()
    value = objective(config, Y, curve, replay)
    for i in order:
        g = project_point(config, curve, Y[i], grid, replay, i)
        trial = replay.copy()
        trial[i] = g
        new = objective(config, Y, curve, trial)
        if new <= value + 1e-12:
            replay = trial
            value = new

    # the vectorized sweep makes the same moves, and none of them raised the objective
    swept = _sweep(config, Y, curve, lam.copy(), Xoshiro256(3), grid)
    assert np.array_equal(swept, replay)
    assert not np.array_equal(swept, lam)
    assert objective(config, Y, curve, swept) <= objective(config, Y, curve, lam) + 1e-12


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_fit_invariants(seed):
    Y = _noisy_cloud(seed, n=50)
    config = MpcConfig(seed=seed, estimation_smoother=SmootherSpec.lowess(0.3), max_iterations=15)
    result = fit(config, Y)
    assert len(result.objective_trace) >= 1
    assert result.objective_trace[-1] <= result.objective_trace[0]
    assert abs(result.lambdas.min()) <= 1e-12 and abs(result.lambdas.max() - 1) <= 1e-12
    assert result.iterations_used <= config.max_iterations
    # the trace ends with the objective of the returned indices and curve
    assert objective(config, Y, result.estimation_curve, result.lambdas) == pytest.approx(result.objective_trace[-1],
                                                                                         rel=1e-12)


def test_fit_deterministic():
    Y = _noisy_cloud(4, n=50)
    config = MpcConfig(seed=9, estimation_smoother=SmootherSpec.spline(1.0), max_iterations=10)
    a, b = fit(config, Y), fit(config, Y)
    assert np.array_equal(a.lambdas, b.lambdas)
    assert a.objective_trace == b.objective_trace
    assert (a.converged, a.iterations_used) == (b.converged, b.iterations_used)
    q = np.linspace(0, 1, 9)
    assert np.array_equal(a.estimation_curve.predict(q), b.estimation_curve.predict(q))


def test_fit_max_iterations_is_not_an_error():
    Y = _noisy_cloud(0, n=40)
    result = fit(MpcConfig(max_iterations=1, rel_tolerance=0.0, estimation_smoother=SmootherSpec.lowess(0.3)), Y)
    assert result.iterations_used == 1
    assert not result.converged


def test_fit_rejects_small_and_nonfinite():
    with pytest.raises(InsufficientData):
        fit(MpcConfig(), np.random.default_rng(0).normal(size=(3, 2)))
    Y = _noisy_cloud()
    Y[3, 1] = np.nan
    with pytest.raises(NonFiniteObjective):
        fit(MpcConfig(), Y)


def test_config_validation():
    with pytest.raises(InvalidSpec):
        MpcConfig(grid_size=8)
    with pytest.raises(InvalidSpec):
        MpcConfig(rho=-1)
    with pytest.raises(InvalidSpec):
        MpcConfig(max_iterations=0)
    assert MpcConfig(init="coordinate:1").init == Init("coordinate", 1)


def test_collinear_exact_default_config():
    s = np.sort(np.random.default_rng(3).uniform(size=10))
    Y = np.array([0.5, 1.0, 2.0]) + s[:, None] * np.array([1.0, 2.0, 0.5])
    result = fit(MpcConfig(), Y)
    rmse, _ = reconstruction_error(Y, result.estimation_curve, result.lambdas)
    assert rmse < 1e-3
    assert abs(kendall_tau(result.lambdas, s)) == 1.0


def test_predict_curve_two_samples_and_own_lambdas():
    Y = _noisy_cloud(1, n=40)
    config = MpcConfig(estimation_smoother=SmootherSpec.lowess(0.3), prediction_smoother=SmootherSpec.spline(1.0))
    result = fit(config, Y)
    curve = predict_curve(config, Y, result, m=2)
    model = fit_curve(config.prediction_smoother, result.lambdas, Y)
    assert np.array_equal(curve.lambdas, [0.0, 1.0])
    assert np.array_equal(curve.points, model.predict(np.array([0.0, 1.0])))
    # sampled at its own indices, the curve rows are the model predictions
    m = 200
    curve = predict_curve(config, Y, result, m=m)
    assert np.array_equal(curve.points, model.predict(np.linspace(0, 1, m)))
    with pytest.raises(InvalidSpec):
        predict_curve(config, Y, result, m=1)


def test_curve_validation():
    with pytest.raises(InvalidSpec):
        Curve([0.0, 0.0], np.zeros((2, 2)))
    with pytest.raises(InvalidSpec):
        Curve([0.0, 1.0], np.zeros((3, 2)))


def _spiral_arc_length():
    def speed(t):
        dx2 = 2 * np.cos(6 * t) - 12 * t * np.sin(6 * t)
        dx3 = 2 * np.sin(6 * t) + 12 * t * np.cos(6 * t)
        return np.sqrt(1 + dx2 ** 2 + dx3 ** 2)

    return quad(speed, 0, 1, epsabs=1e-12, limit=200)[0]


@pytest.mark.parametrize("seed", range(5))
def test_spiral_curve_length_near_truth(seed):
    true_length = _spiral_arc_length()
    assert true_length == pytest.approx(6.5995, abs=1e-3)
    config = recipe("spiral", seed=seed)
    Y = generate(GeneratorSpec("spiral", n=120, sigma=0.1, seed=seed)).data
    result = fit(config, Y)
    curve = predict_curve(config, Y, result, m=200)
    assert abs(polyline_length(curve) - true_length) <= 0.2 * true_length


def test_reversal_symmetry_of_objective():
    Y = _noisy_cloud(2, n=40)
    config = MpcConfig(estimation_smoother=SmootherSpec.spline(1.0))
    lam = initialize_lambda(Y, Init("pca"))
    a = objective(config, Y, fit_curve(config.estimation_smoother, lam, Y), lam)
    b = objective(config, Y, fit_curve(config.estimation_smoother, 1 - lam, Y), 1 - lam)
    assert a == pytest.approx(b, rel=1e-8)


def test_metric_choice_changes_objective_only_through_distance():
    Y = _noisy_cloud(3, n=30)
    lam = initialize_lambda(Y, Init("pca"))
    curve = fit_curve(SmootherSpec.lowess(0.4), lam, Y)
    base = objective(MpcConfig(rho=0.0, metric=MetricSpec.l1()), Y, curve, lam)
    fitted = curve.predict(lam)
    assert base == pytest.approx(np.mean(np.abs(Y - fitted).sum(axis=1)), rel=1e-12)
