import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mpcurve.errors import DimensionMismatch, InsufficientData
from mpcurve.evaluation import EvalReport, _pair_counts, kendall_tau, polyline_length, reconstruction_error
from mpcurve.metrics import MetricSpec
from mpcurve.mpc import Curve


def brute_tau(a, b):
    """Tau-b by explicit double loop over pairs."""
    n = len(a)
    conc = disc = untied_a = untied_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            da = (a[i] > a[j]) - (a[i] < a[j])
            db = (b[i] > b[j]) - (b[i] < b[j])
            untied_a += da != 0
            untied_b += db != 0
            if da * db > 0:
                conc += 1
            elif da * db < 0:
                disc += 1
    return conc, disc, untied_a, untied_b


def test_rmse_examples():
    Y = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert reconstruction_error(Y, Y.copy(), [0.1, 0.2]) == (0.0, 0.0)
    assert reconstruction_error(np.array([[3.0, 0.0]]), np.zeros((1, 2)), [0.5])[0] == pytest.approx(3.0)
    rmse, mean_l2 = reconstruction_error(np.array([[3.0, 0.0], [0.0, 4.0]]), np.zeros((2, 2)), [0.0, 1.0])
    assert rmse == pytest.approx(math.sqrt(12.5), abs=1e-12)
    assert mean_l2 == pytest.approx(3.5)


def test_mean_distance_uses_metric():
    Y = np.array([[3.0, 4.0], [1.0, 1.0]])
    _, d = reconstruction_error(Y, np.zeros((2, 2)), [0.0, 1.0], MetricSpec.l1())
    assert d == pytest.approx(4.5)
    with pytest.raises(DimensionMismatch):
        reconstruction_error(Y, np.zeros((2, 2)), [0.0, 0.5, 1.0])


def test_tau_examples():
    assert kendall_tau([1, 2, 3], [1, 2, 3]) == 1.0
    assert kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0
    assert kendall_tau([1, 1, 1], [1, 2, 3]) == 0.0
    with pytest.raises(InsufficientData):
        kendall_tau([1], [1])
    with pytest.raises(DimensionMismatch):
        kendall_tau([1, 2], [1, 2, 3])


@pytest.mark.parametrize("seed", range(20))
def test_tau_matches_brute_force_exactly(seed):
    rng = np.random.default_rng(seed)
    a = rng.integers(0, 8, 50).astype(float)
    b = rng.integers(0, 5, 50).astype(float)
    c, d, n1, n2 = brute_tau(a.tolist(), b.tolist())
    assert _pair_counts(a, b) == (c, d, n1, n2)
    assert kendall_tau(a, b) == (c - d) / math.sqrt(n1 * n2)


def test_tau_known_tied_value():
    # by hand: 3 concordant, 1 discordant, 5 pairs untied in each vector
    a = [1, 2, 2, 3]
    b = [1, 3, 2, 2]
    assert brute_tau(a, b) == (3, 1, 5, 5)
    assert kendall_tau(a, b) == pytest.approx(2 / 5)


vec = arrays(np.float64, st.integers(2, 30), elements=st.integers(-20, 20).map(float))


@given(vec, st.data())
@settings(max_examples=100, deadline=None)
def test_tau_invariant_under_monotone_maps(a, data):
    b = data.draw(arrays(np.float64, a.size, elements=st.integers(-20, 20).map(float)))
    tau = kendall_tau(a, b)
    assert kendall_tau(np.exp(a / 10) * 3 + 1, b) == tau
    assert kendall_tau(a, b ** 3 + b) == tau
    assert abs(kendall_tau(-a, b)) == abs(tau)
    assert -1.0 <= tau <= 1.0


def test_polyline_examples():
    assert polyline_length(np.array([[0.0, 0.0], [3.0, 4.0]])) == 5.0
    line = np.linspace(0, 1, 37)[:, None] * np.array([3.0, 4.0])
    assert polyline_length(line) == pytest.approx(5.0, abs=1e-12)
    theta = np.linspace(0, 2 * np.pi, 1000)
    circle = np.column_stack([np.cos(theta), np.sin(theta)])
    assert polyline_length(circle) == pytest.approx(2 * np.pi, abs=1e-4)
    assert polyline_length(Curve(np.array([0.0, 1.0]), np.array([[0.0, 0.0], [3.0, 4.0]]))) == 5.0
    with pytest.raises(InsufficientData):
        polyline_length(np.zeros((1, 2)))


@given(st.integers(2, 60), st.integers(1, 4))
def test_polyline_length_grows_under_refinement(m, factor):
    def sample(k):
        t = np.linspace(0, 1, k)
        return np.column_stack([t, np.sin(5 * t), t ** 2])

    coarse = polyline_length(sample(m))
    fine = polyline_length(sample((m - 1) * factor + 1))
    assert fine >= coarse - 1e-12


def test_report_dict_omits_missing_tau():
    r = EvalReport(0.1, 0.2, 3.0, 1.0, 0.5)
    assert "kendall_tau_abs" not in r.to_dict()
    assert EvalReport(0.1, 0.2, 3.0, 1.0, 0.5, 0.9).to_dict()["kendall_tau_abs"] == 0.9
