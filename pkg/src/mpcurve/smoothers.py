"""Univariate scatterplot smoothers and the per-coordinate curve model.

Four smoothers are available:

``spline``
    Penalized cubic B-spline regression (P-spline). Interior knots sit at
    empirical quantiles (at most 35 of them) and ``penalty`` weights the sum
    of squared second differences of the coefficients. The differences are
    taken over the Greville abscissae so linear functions are never
    penalized, even with uneven knots.
``lowess``
    Local linear regression with tricube weights. A bandwidth in ``(0, 1]`` is
    a span (fraction of the data in each window, at least 4 points); a
    bandwidth above 1 is a number of nearest neighbours (rounded up).
``kernel_ridge``
    RBF kernel ridge regression on mean-centred targets.
``nw``
    Nadaraya-Watson estimator with a Gaussian kernel.

Every fitted model is defined on the whole real line: outside the training
range it continues linearly with the value and slope at the nearest boundary.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import linalg
from scipy.interpolate import BSpline

from .errors import DegenerateInputs, InsufficientData, InvalidSpec, SingularSystem

KINDS = ("spline", "lowess", "kernel_ridge", "nw")

MAX_INTERIOR_KNOTS = 35
MIN_LOWESS_WINDOW = 4
MEDIAN_SUBSAMPLE = 500
JITTER_SCALE = 1e-9
# knots closer than this (on the unit-rescaled axis) are merged
MIN_KNOT_GAP = 1e-6


@dataclass(frozen=True)
class SmootherSpec:
    kind: str
    penalty: float = 1.0
    bandwidth: float = 0.4
    iterations: int = 0
    alpha: float = 1.0
    lengthscale: Union[float, str] = "median"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown smoother kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "spline" and not self.penalty >= 0:
            raise InvalidSpec(f"spline penalty must be >= 0, got {self.penalty}")
        if self.kind in ("lowess", "nw") and not self.bandwidth > 0:
            raise InvalidSpec(f"bandwidth must be > 0, got {self.bandwidth}")
        if self.kind == "lowess" and (int(self.iterations) != self.iterations or self.iterations < 0):
            raise InvalidSpec(f"LOWESS iterations must be a nonnegative integer, got {self.iterations}")
        if self.kind == "kernel_ridge":
            if not self.alpha >= 0:
                raise InvalidSpec(f"kernel ridge alpha must be >= 0, got {self.alpha}")
            if self.lengthscale != "median" and not (
                isinstance(self.lengthscale, (int, float)) and self.lengthscale > 0
            ):
                raise InvalidSpec(f"lengthscale must be > 0 or 'median', got {self.lengthscale!r}")

    @classmethod
    def spline(cls, penalty=1.0):
        return cls("spline", penalty=float(penalty))

    @classmethod
    def lowess(cls, bandwidth=0.4, iterations=0):
        return cls("lowess", bandwidth=float(bandwidth), iterations=int(iterations))

    @classmethod
    def kernel_ridge(cls, alpha=1.0, lengthscale="median"):
        if lengthscale != "median":
            lengthscale = float(lengthscale)
        return cls("kernel_ridge", alpha=float(alpha), lengthscale=lengthscale)

    @classmethod
    def nw(cls, bandwidth):
        return cls("nw", bandwidth=float(bandwidth))

    @classmethod
    def parse(cls, text):
        """Parse ``spline:<penalty>``, ``lowess:<bw>[,<iters>]``,
        ``kernel_ridge:<alpha>[,<lengthscale>]`` or ``nw:<bw>``."""
        name, _, arg = text.strip().partition(":")
        name = name.strip().lower()
        args = [a.strip() for a in arg.split(",")] if arg.strip() else []
        try:
            if name == "spline" and len(args) <= 1:
                return cls.spline(*(float(a) for a in args))
            if name == "lowess" and len(args) <= 2:
                bw = float(args[0]) if args else 0.4
                iters = args[1] if len(args) > 1 else "0"
                if not iters.isdigit():
                    raise InvalidSpec(f"LOWESS iterations must be an integer in {text!r}")
                return cls.lowess(bw, int(iters))
            if name == "kernel_ridge" and len(args) <= 2:
                alpha = float(args[0]) if args else 1.0
                ls = args[1] if len(args) > 1 else "median"
                return cls.kernel_ridge(alpha, ls)
            if name == "nw" and len(args) == 1:
                return cls.nw(float(args[0]))
        except ValueError:
            raise InvalidSpec(f"cannot parse smoother {text!r}") from None
        raise InvalidSpec(f"cannot parse smoother {text!r}")

    def to_string(self):
        if self.kind == "spline":
            return f"spline:{self.penalty!r}"
        if self.kind == "lowess":
            s = f"lowess:{self.bandwidth!r}"
            return s + (f",{self.iterations}" if self.iterations else "")
        if self.kind == "kernel_ridge":
            ls = self.lengthscale if self.lengthscale == "median" else repr(self.lengthscale)
            return f"kernel_ridge:{self.alpha!r},{ls}"
        return f"nw:{self.bandwidth!r}"


# ---------------------------------------------------------------------------
# models


class SmootherModel:
    """A fitted smoother. Subclasses implement ``_value_slope`` on the training range."""

    spec: SmootherSpec

    def _finish(self, xs, ys):
        self.xs = xs
        self.ys = ys
        self.x_min = float(xs[0])
        self.x_max = float(xs[-1])
        v, s = self._value_slope(np.array([self.x_min, self.x_max]))
        self._lo = (float(v[0]), float(s[0]))
        self._hi = (float(v[1]), float(s[1]))

    def _value_slope(self, q):
        raise NotImplementedError

    def predict(self, lam):
        """Fitted value(s) at ``lam`` (scalar or array)."""
        q = np.asarray(lam, dtype=float)
        scalar = q.ndim == 0
        q = np.atleast_1d(q).ravel()
        out = np.empty_like(q)
        below = q < self.x_min
        above = q > self.x_max
        inside = ~(below | above)
        if inside.any():
            out[inside] = self._value_slope(q[inside])[0]
        if below.any():
            v, s = self._lo
            out[below] = v + s * (q[below] - self.x_min)
        if above.any():
            v, s = self._hi
            out[above] = v + s * (q[above] - self.x_max)
        return float(out[0]) if scalar else out

    __call__ = predict


class SplineModel(SmootherModel):
    def __init__(self, spec, xs, ys):
        self.spec = spec
        lo, hi = xs[0], xs[-1]
        self._shift = lo
        self._scale = hi - lo
        u = (xs - lo) / self._scale
        n = u.size
        k_int = min(n, MAX_INTERIOR_KNOTS)
        levels = np.arange(1, k_int + 1) / (k_int + 1)
        interior = _separated(np.quantile(u, levels), MIN_KNOT_GAP)
        t = np.concatenate([np.zeros(4), interior, np.ones(4)])
        nb = t.size - 4
        B = BSpline.design_matrix(np.clip(u, 0.0, 1.0), t, 3).toarray()
        greville = (t[1:nb + 1] + t[2:nb + 2] + t[3:nb + 3]) / 3.0
        D = _second_divided_difference(greville)
        A = B.T @ B + spec.penalty * (D.T @ D)
        rhs = B.T @ ys
        with warnings.catch_warnings():
            warnings.simplefilter("error", linalg.LinAlgWarning)
            try:
                coef = linalg.solve(A, rhs, assume_a="pos")
            except (np.linalg.LinAlgError, linalg.LinAlgWarning) as exc:
                raise SingularSystem(
                    f"penalized spline system is singular ({exc}); increase the penalty"
                ) from None
        self.knots = t
        self.coef = coef
        self._spl = BSpline(t, coef, 3, extrapolate=True)
        self._dspl = self._spl.derivative()
        self._finish(xs, ys)

    def _value_slope(self, q):
        u = (q - self._shift) / self._scale
        return self._spl(u), self._dspl(u) / self._scale


def _separated(knots, gap):
    """Sorted knots in (0, 1) at least ``gap`` apart from each other and the ends."""
    kept = []
    last = 0.0
    for k in np.sort(knots):
        if k - last >= gap and 1.0 - k >= gap:
            kept.append(k)
            last = k
    return np.array(kept)


def _second_divided_difference(g):
    """Second differences of spline coefficients taken at the Greville abscissae.

    Each row is a second divided difference multiplied by the squared mean
    spacing, so on evenly spaced abscissae it is the plain ``c[j-1] - 2 c[j] +
    c[j+1]``. Coefficients of a linear function are annihilated for any
    spacing.
    """
    m = g.size
    if m < 3:
        return np.zeros((0, m))
    h = np.diff(g)
    hbar2 = np.mean(h) ** 2
    D = np.zeros((m - 2, m))
    for j in range(1, m - 1):
        w = 2.0 * hbar2 / (h[j - 1] + h[j])
        D[j - 1, j - 1] = w / h[j - 1]
        D[j - 1, j] = -w * (1.0 / h[j - 1] + 1.0 / h[j])
        D[j - 1, j + 1] = w / h[j]
    return D


class LowessModel(SmootherModel):
    def __init__(self, spec, xs, ys):
        self.spec = spec
        n = xs.size
        bw = spec.bandwidth
        k = math.ceil(bw * n) if bw <= 1.0 else math.ceil(bw)
        self.window = min(n, max(MIN_LOWESS_WINDOW, int(k)))
        self.robustness = np.ones(n)
        self.xs, self.ys = xs, ys
        for _ in range(spec.iterations):
            fitted = self._value_slope(xs)[0]
            resid = ys - fitted
            s = np.median(np.abs(resid))
            if s <= 0.0:
                break
            r = np.clip(resid / (6.0 * s), -1.0, 1.0)
            self.robustness = (1.0 - r * r) ** 2
        self._finish(xs, ys)

    def _value_slope(self, q):
        x, y = self.xs, self.ys
        dist = np.abs(q[:, None] - x[None, :])
        h = np.partition(dist, self.window - 1, axis=1)[:, self.window - 1]
        h = np.where(h > 0, h, 1.0)
        r = np.minimum(dist / h[:, None], 1.0)
        w = (1.0 - r**3) ** 3 * self.robustness[None, :]
        return _weighted_line(w, x, y, q)


def _weighted_line(w, x, y, q):
    """Weighted least-squares line per row of ``w``; value and slope at ``q``."""
    sw = w.sum(axis=1)
    sw = np.where(sw > 0, sw, 1.0)
    xbar = (w @ x) / sw
    ybar = (w @ y) / sw
    xc = x[None, :] - xbar[:, None]
    sxx = np.sum(w * xc * xc, axis=1)
    sxy = np.sum(w * xc * (y[None, :] - ybar[:, None]), axis=1)
    tiny = 1e-14 * np.maximum(np.sum(w * x[None, :] ** 2, axis=1), 1e-300)
    slope = np.where(sxx > tiny, sxy / np.where(sxx > tiny, sxx, 1.0), 0.0)
    return ybar + slope * (q - xbar), slope


class KernelRidgeModel(SmootherModel):
    def __init__(self, spec, xs, ys):
        self.spec = spec
        if spec.lengthscale == "median":
            self.lengthscale = median_lengthscale(xs)
        else:
            self.lengthscale = float(spec.lengthscale)
        self.offset = float(np.mean(ys))
        K = _rbf(xs, xs, self.lengthscale)
        K[np.diag_indices_from(K)] += spec.alpha
        try:
            c, low = linalg.cho_factor(K)
            self.dual = linalg.cho_solve((c, low), ys - self.offset)
        except np.linalg.LinAlgError:
            raise SingularSystem("kernel ridge system is singular; increase alpha") from None
        if not np.all(np.isfinite(self.dual)):
            raise SingularSystem("kernel ridge solve produced non-finite weights")
        self._finish(xs, ys)

    def _value_slope(self, q):
        Kq = _rbf(q, self.xs, self.lengthscale)
        value = self.offset + Kq @ self.dual
        dK = Kq * (-(q[:, None] - self.xs[None, :]) / self.lengthscale**2)
        return value, dK @ self.dual


def _rbf(a, b, ell):
    d = a[:, None] - b[None, :]
    return np.exp(-(d * d) / (2.0 * ell * ell))


def median_lengthscale(xs):
    """Median pairwise absolute difference over an evenly spaced subsample of <= 500 points."""
    xs = np.sort(np.asarray(xs, dtype=float))
    if xs.size > MEDIAN_SUBSAMPLE:
        idx = np.round(np.linspace(0, xs.size - 1, MEDIAN_SUBSAMPLE)).astype(int)
        xs = xs[idx]
    i, j = np.triu_indices(xs.size, k=1)
    ell = float(np.median(np.abs(xs[i] - xs[j])))
    if not ell > 0:
        raise DegenerateInputs("median pairwise distance is zero")
    return ell


class NadarayaWatsonModel(SmootherModel):
    def __init__(self, spec, xs, ys):
        self.spec = spec
        self._finish(xs, ys)

    def _value_slope(self, q):
        h = self.spec.bandwidth
        z = (q[:, None] - self.xs[None, :]) / h
        e = -0.5 * z * z
        w = np.exp(e - e.max(axis=1, keepdims=True))
        sw = w.sum(axis=1)
        value = (w @ self.ys) / sw
        dw = w * (-z / h)
        slope = (dw @ self.ys) / sw - value * dw.sum(axis=1) / sw
        return value, slope


_MODELS = {
    "spline": SplineModel,
    "lowess": LowessModel,
    "kernel_ridge": KernelRidgeModel,
    "nw": NadarayaWatsonModel,
}


def fit_smoother(spec, xs, ys):
    """Fit one smoother on the pairs ``(xs[i], ys[i])``.

    Inputs are sorted by ``xs`` (stable) before fitting. Raises
    ``InsufficientData`` for fewer than 4 points and ``DegenerateInputs`` if
    every ``xs`` is identical.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.size != ys.size:
        raise InsufficientData(f"xs and ys differ in length ({xs.size} vs {ys.size})")
    if xs.size < 4:
        raise InsufficientData(f"smoothers need at least 4 points, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise InvalidSpec("smoother inputs must be finite")
    order = np.argsort(xs, kind="stable")
    xs, ys = xs[order], ys[order]
    if xs[0] == xs[-1]:
        raise DegenerateInputs("all xs are identical")
    return _MODELS[spec.kind](spec, xs, ys)


def jitter_ties(lambdas):
    """Separate tied values by ``j * 1e-9 * range`` for the j-th member of each
    tie group (members taken in index order)."""
    lam = np.asarray(lambdas, dtype=float).copy()
    span = lam.max() - lam.min() if lam.size else 0.0
    if span <= 0:
        return lam
    order = np.argsort(lam, kind="stable")
    s = lam[order]
    rank_in_group = np.zeros(lam.size)
    for k in range(1, s.size):
        if s[k] == s[k - 1]:
            rank_in_group[k] = rank_in_group[k - 1] + 1
    lam[order] = s + rank_in_group * JITTER_SCALE * span
    return lam


class CurveModel:
    """One fitted smoother per coordinate, all sharing the same indices."""

    def __init__(self, models, lambdas):
        self.models = list(models)
        self.lambdas = lambdas

    @property
    def dim(self):
        return len(self.models)

    def predict(self, lam):
        """``(m, p)`` reconstruction for an array of indices, ``(p,)`` for a scalar."""
        q = np.asarray(lam, dtype=float)
        cols = [np.atleast_1d(m.predict(q)) for m in self.models]
        out = np.column_stack(cols)
        return out[0] if q.ndim == 0 else out

    __call__ = predict


def fit_curve(spec, lambdas, Y):
    """Fit ``spec`` to every column of ``Y`` against the shared (tie-jittered) indices."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    lam = np.asarray(lambdas, dtype=float).ravel()
    if lam.size != Y.shape[0]:
        raise InsufficientData(f"{lam.size} indices for {Y.shape[0]} points")
    if lam.size < 4:
        raise InsufficientData(f"curve fitting needs at least 4 points, got {lam.size}")
    lam = jitter_ties(lam)
    models = []
    for j in range(Y.shape[1]):
        try:
            models.append(fit_smoother(spec, lam, Y[:, j]))
        except Exception as exc:
            if hasattr(exc, "args") and type(exc).__module__.startswith("mpcurve"):
                raise type(exc)(f"coordinate {j}: {exc}") from exc
            raise
    return CurveModel(models, lam)
