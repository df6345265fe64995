import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mpcurve.dispersion import DispersionSpec, evaluate_dispersion, evaluate_dispersion_many
from mpcurve.errors import InsufficientData, InvalidSpec, ZeroMean

L1, SQ, MAX, CV = (DispersionSpec(k) for k in ("l1_gaps", "squared_gaps", "max_gap", "cv"))

lams = arrays(np.float64, st.integers(2, 40), elements=st.floats(-100, 100))


@pytest.mark.parametrize(
    "spec, values, expected",
    [
        (L1, [0.2, 0.9, 0.5], 0.7),
        (SQ, [0.2, 0.5, 0.9], 0.25),
        (MAX, [0.2, 0.5, 0.9], 0.4),
        (CV, [1, 2, 3], 0.5),
    ],
)
def test_examples(spec, values, expected):
    assert evaluate_dispersion(spec, values) == pytest.approx(expected, abs=1e-12)


def _sorted_gaps(v):
    s = sorted(v)
    return [b - a for a, b in zip(s, s[1:])]


@given(lams)
def test_l1_is_sum_of_sorted_gaps_and_range(v):
    assert evaluate_dispersion(L1, v) == pytest.approx(sum(_sorted_gaps(v)), abs=1e-9)
    assert evaluate_dispersion(L1, v) == pytest.approx(v.max() - v.min(), abs=1e-12)


@given(lams)
def test_against_explicit_gaps(v):
    gaps = _sorted_gaps(v)
    assert evaluate_dispersion(SQ, v) == pytest.approx(sum(g * g for g in gaps), rel=1e-12, abs=1e-12)
    assert evaluate_dispersion(MAX, v) == pytest.approx(max(gaps), abs=1e-12)


@given(lams, st.floats(-50, 50))
def test_translation_invariance(v, c):
    for spec in (L1, SQ, MAX):
        base = evaluate_dispersion(spec, v)
        scale = max(1.0, np.abs(v).max() + abs(c)) ** (2 if spec is SQ else 1)
        assert evaluate_dispersion(spec, v + c) == pytest.approx(base, abs=1e-11 * scale * v.size)


@given(lams, st.floats(-5, 5))
def test_scale_equivariance(v, a):
    assert evaluate_dispersion(L1, a * v) == pytest.approx(abs(a) * evaluate_dispersion(L1, v), rel=1e-12, abs=1e-10)
    assert evaluate_dispersion(MAX, a * v) == pytest.approx(abs(a) * evaluate_dispersion(MAX, v), rel=1e-12, abs=1e-10)
    assert evaluate_dispersion(SQ, a * v) == pytest.approx(a * a * evaluate_dispersion(SQ, v), rel=1e-10, abs=1e-8)


@given(arrays(np.float64, st.integers(2, 30), elements=st.floats(0.1, 10)), st.floats(0.01, 100))
def test_cv_scale_invariant(v, a):
    assert evaluate_dispersion(CV, a * v) == pytest.approx(evaluate_dispersion(CV, v), rel=1e-9, abs=1e-12)


def test_cv_not_translation_invariant():
    v = np.array([1.0, 2.0, 3.0])
    assert evaluate_dispersion(CV, v + 10) < evaluate_dispersion(CV, v)


def test_cv_uses_absolute_mean():
    assert evaluate_dispersion(CV, [-1, -2, -3]) == pytest.approx(0.5)


@given(lams, st.randoms(use_true_random=False))
def test_permutation_invariance(v, rnd):
    w = list(v)
    rnd.shuffle(w)
    for spec in (L1, SQ, MAX):
        assert evaluate_dispersion(spec, w) == evaluate_dispersion(spec, v)
    assume(abs(v.mean()) > 1e-6)
    assert evaluate_dispersion(CV, w) == pytest.approx(evaluate_dispersion(CV, v), rel=1e-12)


def test_many_matches_single():
    rng = np.random.default_rng(2)
    L = rng.uniform(0, 1, (25, 12))
    for spec in (L1, SQ, MAX, CV):
        assert np.allclose(evaluate_dispersion_many(spec, L), [evaluate_dispersion(spec, r) for r in L])


def test_errors():
    with pytest.raises(InsufficientData):
        evaluate_dispersion(L1, [0.3])
    with pytest.raises(ZeroMean):
        evaluate_dispersion(CV, [-1.0, 1.0])
    with pytest.raises(InvalidSpec):
        DispersionSpec("variance")
