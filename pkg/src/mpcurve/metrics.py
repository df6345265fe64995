"""Distances between an observation and its reconstruction on the curve.

Supported kinds: ``lp`` (any order >= 1), ``mahalanobis`` (given a precision
matrix), ``chebyshev``, ``canberra`` and ``hellinger`` (elementwise
nonnegative vectors, no normalization required).
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, DomainError, InvalidSpec

KINDS = ("lp", "mahalanobis", "chebyshev", "canberra", "hellinger")

_MAX_COND = 1e12


@dataclass(frozen=True, eq=False)
class MetricSpec:
    kind: str
    order: float = 2.0
    precision: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown metric kind {self.kind!r}")
        if self.kind == "lp":
            order = float(self.order)
            if not order >= 1.0:
                raise InvalidSpec(f"Lp order must be >= 1, got {self.order}")
            object.__setattr__(self, "order", order)
        if self.kind == "mahalanobis":
            if self.precision is None:
                raise InvalidSpec("Mahalanobis metric needs a precision matrix")
            P = np.array(self.precision, dtype=float)
            if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
                raise InvalidSpec("precision matrix must be square")
            if not np.allclose(P, P.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(P).max())):
                raise InvalidSpec("precision matrix must be symmetric")
            try:
                np.linalg.cholesky(P)
            except np.linalg.LinAlgError:
                raise InvalidSpec("precision matrix is not positive definite") from None
            P.setflags(write=False)
            object.__setattr__(self, "precision", P)

    # constructors -----------------------------------------------------

    @classmethod
    def lp(cls, order):
        return cls("lp", order=order)

    @classmethod
    def l2(cls):
        return cls("lp", order=2.0)

    @classmethod
    def l1(cls):
        return cls("lp", order=1.0)

    @classmethod
    def chebyshev(cls):
        return cls("chebyshev")

    @classmethod
    def canberra(cls):
        return cls("canberra")

    @classmethod
    def hellinger(cls):
        return cls("hellinger")

    @classmethod
    def mahalanobis(cls, precision):
        return cls("mahalanobis", precision=precision)

    @classmethod
    def from_covariance(cls, covariance):
        """Mahalanobis metric from a covariance matrix (inverted here)."""
        C = np.asarray(covariance, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise InvalidSpec("covariance matrix must be square")
        cond = np.linalg.cond(C)
        if not np.isfinite(cond) or cond > _MAX_COND:
            raise InvalidSpec(f"covariance is ill-conditioned (cond={cond:.3g})")
        P = np.linalg.inv(C)
        return cls.mahalanobis(0.5 * (P + P.T))

    @classmethod
    def parse(cls, text):
        """Parse the config grammar, e.g. ``"l2"``, ``"lp:3"``, ``"mahalanobis:P.csv"``."""
        text = text.strip()
        name, _, arg = text.partition(":")
        name = name.strip().lower()
        if name == "l2" and not arg:
            return cls.l2()
        if name == "l1" and not arg:
            return cls.l1()
        if name == "lp":
            try:
                return cls.lp(float(arg))
            except ValueError:
                raise InvalidSpec(f"bad Lp order in {text!r}") from None
        if name in ("chebyshev", "canberra", "hellinger") and not arg:
            return cls(name)
        if name == "mahalanobis" and arg:
            try:
                P = np.loadtxt(Path(arg), delimiter=",", ndmin=2)
            except (OSError, ValueError) as exc:
                raise InvalidSpec(f"cannot read precision matrix {arg!r}: {exc}") from None
            return cls.mahalanobis(P)
        raise InvalidSpec(f"cannot parse metric {text!r}")

    def to_string(self):
        if self.kind == "lp":
            if self.order == 2.0:
                return "l2"
            if self.order == 1.0:
                return "l1"
            return f"lp:{self.order!r}"
        if self.kind == "mahalanobis":
            return "mahalanobis"
        return self.kind

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "lp":
            d["order"] = self.order
        if self.kind == "mahalanobis":
            d["precision"] = self.precision.tolist()
        return d

    @classmethod
    def from_dict(cls, d):
        if d["kind"] == "mahalanobis":
            return cls.mahalanobis(np.array(d["precision"], dtype=float))
        return cls(d["kind"], order=d.get("order", 2.0))


def evaluate_metric_many(spec, X, Y):
    """Row-wise distances ``d(X[k], Y[k])`` with numpy broadcasting.

    ``X`` and ``Y`` are ``(..., p)`` arrays; the result has the broadcast
    leading shape.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape[-1] != Y.shape[-1]:
        raise DimensionMismatch(f"vector lengths differ: {X.shape[-1]} vs {Y.shape[-1]}")
    if X.shape[-1] < 1:
        raise DimensionMismatch("vectors must have length >= 1")
    kind = spec.kind
    if kind == "lp":
        diff = np.abs(X - Y)
        q = spec.order
        if q == 2.0:
            return np.sqrt(np.sum(diff * diff, axis=-1))
        if q == 1.0:
            return np.sum(diff, axis=-1)
        # scale by the largest gap so very large orders do not overflow
        m = np.max(diff, axis=-1)
        safe = np.where(m > 0, m, 1.0)
        ratio = diff / safe[..., None]
        return m * np.sum(ratio**q, axis=-1) ** (1.0 / q)
    if kind == "chebyshev":
        return np.max(np.abs(X - Y), axis=-1)
    if kind == "canberra":
        num = np.abs(X - Y)
        den = np.abs(X) + np.abs(Y)
        with np.errstate(invalid="ignore", divide="ignore"):
            terms = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        return np.sum(terms, axis=-1)
    if kind == "mahalanobis":
        P = spec.precision
        if P.shape[0] != X.shape[-1]:
            raise DimensionMismatch(
                f"precision is {P.shape[0]}x{P.shape[0]} but vectors have length {X.shape[-1]}"
            )
        diff = X - Y
        q = np.einsum("...i,ij,...j->...", diff, P, diff)
        return np.sqrt(np.maximum(q, 0.0))
    if kind == "hellinger":
        if np.any(X < 0) or np.any(Y < 0):
            raise DomainError("Hellinger distance needs elementwise nonnegative vectors")
        diff = np.sqrt(X) - np.sqrt(Y)
        return np.sqrt(np.sum(diff * diff, axis=-1)) / np.sqrt(2.0)
    raise InvalidSpec(f"unknown metric kind {kind!r}")  # pragma: no cover


def evaluate_metric(spec, x, y):
    """Distance between two vectors of equal length."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise DimensionMismatch("evaluate_metric expects 1-D vectors")
    if x.shape != y.shape:
        raise DimensionMismatch(f"vector lengths differ: {x.size} vs {y.size}")
    return float(evaluate_metric_many(spec, x, y))
