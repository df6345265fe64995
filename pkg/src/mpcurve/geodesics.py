"""Geodesics under a Riemannian metric field on R^d.

For a metric field ``M(x)`` (symmetric positive definite), critical points of
the length functional satisfy the Euler-Lagrange system

    M(g) g'' = 1/2 J(g)^T (g' kron g') - (dM/dt) g',   dM/dt = unvec(J(g) g')

where ``J(x) = d vec M(x) / dx`` is the ``d^2 x d`` Jacobian of the
column-stacked metric. ``J`` is analytic for the built-in fields and obtained
by central differences for user-supplied ones.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from .errors import InvalidSpec, NoConvergence, NonFinite, SingularMetric

SYMMETRY_TOL = 1e-10
RESIDUAL_TOL = 1e-8


class MetricField:
    """A smooth map ``x -> M(x)`` from R^d to SPD matrices.

    Use the constructors :meth:`euclidean`, :meth:`constant`,
    :meth:`conformal` or :meth:`from_function`.
    """

    def __init__(self, dim, kind, func, jacobian=None, params=None):
        if int(dim) != dim or dim < 1:
            raise InvalidSpec("dimension must be a positive integer")
        self.dim = int(dim)
        self.kind = kind
        self._func = func
        self._jac = jacobian
        self.params = params or {}

    @classmethod
    def euclidean(cls, dim):
        eye = np.eye(dim)
        return cls(dim, "euclidean", lambda x: eye, lambda x: np.zeros((dim * dim, dim)))

    @classmethod
    def constant(cls, matrix):
        A = np.array(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidSpec("constant metric must be a square matrix")
        d = A.shape[0]
        field = cls(d, "constant", lambda x: A, lambda x: np.zeros((d * d, d)), {"matrix": A.tolist()})
        field.evaluate(np.zeros(d))
        return field

    @classmethod
    def conformal(cls, a, dim=2):
        """``M(x) = exp(2 a x_1) I``."""
        a = float(a)
        eye = np.eye(dim)

        def func(x):
            return np.exp(2.0 * a * x[0]) * eye

        def jac(x):
            J = np.zeros((dim * dim, dim))
            J[:, 0] = 2.0 * a * np.exp(2.0 * a * x[0]) * eye.ravel(order="F")
            return J

        return cls(dim, "conformal", func, jac, {"a": a})

    @classmethod
    def from_function(cls, func, dim, jacobian=None):
        return cls(dim, "user", func, jacobian)

    def evaluate(self, x):
        """``M(x)``; raises :class:`SingularMetric` unless symmetric positive definite."""
        return self.factor(x)[0]

    def factor(self, x):
        """``(M(x), L)`` with ``L`` the lower Cholesky factor of ``M(x)``."""
        x = np.asarray(x, dtype=float)
        M = np.asarray(self._func(x), dtype=float)
        if M.shape != (self.dim, self.dim):
            raise InvalidSpec(f"metric returned shape {M.shape}, expected {(self.dim, self.dim)}")
        if not np.isfinite(M).all():
            raise NonFinite(f"metric is not finite at {x}")
        scale = max(1.0, float(np.abs(M).max()))
        if np.abs(M - M.T).max() > SYMMETRY_TOL * scale:
            raise SingularMetric(f"metric is not symmetric at {x}")
        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            raise SingularMetric(f"metric is not positive definite at {x}") from None
        return M, L

    def jacobian(self, x):
        """``d vec M / dx`` as a ``(d*d, d)`` array (column-major ``vec``)."""
        x = np.asarray(x, dtype=float)
        if self._jac is not None:
            return np.asarray(self._jac(x), dtype=float)
        return finite_difference_jacobian(self._func, x)


def finite_difference_jacobian(func, x):
    """Central differences with step ``1e-5 * (1 + max|x|)``."""
    x = np.asarray(x, dtype=float)
    d = x.size
    h = 1e-5 * (1.0 + np.max(np.abs(x)))
    J = np.empty((d * d, d))
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        Mp = np.asarray(func(x + e), dtype=float)
        Mm = np.asarray(func(x - e), dtype=float)
        J[:, k] = ((Mp - Mm) / (2.0 * h)).ravel(order="F")
    return J


def geodesic_rhs(field, x, v):
    """Acceleration of the geodesic through ``x`` with velocity ``v``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    d = field.dim
    _, L = field.factor(x)
    J = field.jacobian(x)
    dM_dt = (J @ v).reshape(d, d, order="F")
    rhs = 0.5 * (J.T @ np.outer(v, v).ravel(order="F")) - dM_dt @ v
    acc = linalg.cho_solve((L, True), rhs, check_finite=False)
    if not np.isfinite(acc).all():
        raise NonFinite(f"non-finite acceleration at {x}")
    return acc


@dataclass
class GeodesicPath:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    @property
    def start(self):
        return self.positions[0]

    @property
    def end(self):
        return self.positions[-1]


def integrate_geodesic(field, x0, v0, steps=64):
    """Classical RK4 on ``(g, g')`` over ``t in [0, 1]`` with ``steps`` equal steps."""
    if int(steps) != steps or steps < 8:
        raise InvalidSpec("steps must be an integer >= 8")
    steps = int(steps)
    x = np.array(x0, dtype=float)
    v = np.array(v0, dtype=float)
    if x.shape != (field.dim,) or v.shape != (field.dim,):
        raise InvalidSpec(f"x0 and v0 must have length {field.dim}")
    h = 1.0 / steps
    times = np.linspace(0.0, 1.0, steps + 1)
    X = np.empty((steps + 1, field.dim))
    V = np.empty_like(X)
    X[0], V[0] = x, v
    for k in range(steps):
        try:
            a1 = geodesic_rhs(field, x, v)
            x2, v2 = x + 0.5 * h * v, v + 0.5 * h * a1
            a2 = geodesic_rhs(field, x2, v2)
            x3, v3 = x + 0.5 * h * v2, v + 0.5 * h * a2
            a3 = geodesic_rhs(field, x3, v3)
            x4, v4 = x + h * v3, v + h * a3
            a4 = geodesic_rhs(field, x4, v4)
        except (SingularMetric, NonFinite) as exc:
            raise type(exc)(f"at t={times[k]:.6g}: {exc}") from exc
        x = x + (h / 6.0) * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        X[k + 1], V[k + 1] = x, v
    return GeodesicPath(times, X, V)


def shoot_geodesic(field, x, y, steps=64, max_newton=50, v0=None):
    """Solve the two-point problem ``g(0) = x, g(1) = y`` by shooting.

    Damped Newton on the initial velocity with a forward-difference Jacobian
    of the endpoint map; the starting guess is ``y - x`` unless ``v0`` is
    given. Raises :class:`NoConvergence` if the endpoint residual is not
    below 1e-8 after ``max_newton`` iterations.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = (y - x).copy() if v0 is None else np.array(v0, dtype=float)

    def residual(vel):
        path = integrate_geodesic(field, x, vel, steps)
        return path, path.end - y

    path, r = residual(v)
    norm = np.linalg.norm(r)
    for _ in range(max_newton):
        if norm < RESIDUAL_TOL:
            return path
        d = field.dim
        J = np.empty((d, d))
        for k in range(d):
            eps = 1e-7 * (1.0 + abs(v[k]))
            e = np.zeros(d)
            e[k] = eps
            J[:, k] = (residual(v + e)[1] - r) / eps
        try:
            step = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            raise NoConvergence("singular shooting Jacobian (conjugate point?)") from None
        t = 1.0
        while True:
            try:
                cand_path, cand_r = residual(v + t * step)
                cand_norm = np.linalg.norm(cand_r)
            except (SingularMetric, NonFinite):
                cand_norm = np.inf
            if cand_norm < norm or t < 1e-6:
                break
            t *= 0.5
        if not np.isfinite(cand_norm):
            raise NoConvergence("shooting left the domain of the metric")
        v = v + t * step
        path, r, norm = cand_path, cand_r, cand_norm
    if norm < RESIDUAL_TOL:
        return path
    raise NoConvergence(
        f"endpoint residual {norm:.3g} after {max_newton} Newton steps; "
        "try more steps or a better initial velocity"
    )


def metric_length(field, path):
    """Trapezoidal estimate of the length of ``path`` under ``field``."""
    speeds = np.array(
        [np.sqrt(max(v @ field.evaluate(x) @ v, 0.0)) for x, v in zip(path.positions, path.velocities)]
    )
    if speeds.size == 1:
        return 0.0
    return float(np.sum(0.5 * (speeds[1:] + speeds[:-1]) * np.diff(path.times)))


def parse_field(text):
    """Parse ``euclidean:<d>``, ``diag:<a1>,<a2>,...``, ``constant:<m11>,...`` (row
    major, square) or ``conformal:<a>[,<d>]``."""
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    try:
        vals = [float(s) for s in arg.split(",")] if arg.strip() else []
        if name == "euclidean":
            d = int(vals[0]) if vals else 2
            if not vals or vals[0] != d:
                raise ValueError
            return MetricField.euclidean(d)
        if name == "diag" and vals:
            return MetricField.constant(np.diag(vals))
        if name == "constant" and vals:
            d = int(round(np.sqrt(len(vals))))
            if d * d != len(vals):
                raise ValueError
            return MetricField.constant(np.array(vals).reshape(d, d))
        if name == "conformal" and 1 <= len(vals) <= 2:
            d = int(vals[1]) if len(vals) == 2 else 2
            return MetricField.conformal(vals[0], d)
    except (ValueError, IndexError, SingularMetric):
        pass
    raise InvalidSpec(f"cannot parse metric field {text!r}")
