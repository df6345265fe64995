"""Dispersion penalties on the order statistics of projection indices."""

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidSpec, ZeroMean

KINDS = ("l1_gaps", "squared_gaps", "max_gap", "cv")


@dataclass(frozen=True)
class DispersionSpec:
    kind: str = "l1_gaps"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown dispersion kind {self.kind!r}; expected one of {KINDS}")

    @classmethod
    def parse(cls, text):
        return cls(text.strip().lower())

    def to_string(self):
        return self.kind


def evaluate_dispersion_many(spec, L):
    """Dispersion of every row of the 2-D array ``L``."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2:
        raise ValueError("expected a 2-D array of candidate index vectors")
    if L.shape[1] < 2:
        raise InsufficientData(f"dispersion needs at least 2 values, got {L.shape[1]}")
    kind = spec.kind
    if kind == "l1_gaps":
        # sum of sorted gaps telescopes
        return L.max(axis=1) - L.min(axis=1)
    if kind == "cv":
        mean = L.mean(axis=1)
        if np.any(mean == 0.0):
            raise ZeroMean("coefficient of variation is undefined for zero mean")
        sd = L.std(axis=1, ddof=1)
        return sd / np.abs(mean)
    gaps = np.diff(np.sort(L, axis=1), axis=1)
    if kind == "squared_gaps":
        return np.sum(gaps * gaps, axis=1)
    if kind == "max_gap":
        return gaps.max(axis=1)
    raise InvalidSpec(f"unknown dispersion kind {kind!r}")  # pragma: no cover


def evaluate_dispersion(spec, lambdas):
    """Dispersion of one vector of projection indices.

    Parameters
    ----------
    spec : DispersionSpec
    lambdas : array_like, shape (n,)
        Any order; a sorted copy is used.

    Returns
    -------
    float
        ``l1_gaps``: sum of consecutive gaps, ``squared_gaps``: sum of squared
        gaps, ``max_gap``: largest gap, ``cv``: sample standard deviation
        (divisor n-1) over the absolute mean.
    """
    lam = np.asarray(lambdas, dtype=float).ravel()
    if lam.size < 2:
        raise InsufficientData(f"dispersion needs at least 2 values, got {lam.size}")
    return float(evaluate_dispersion_many(spec, lam[None, :])[0])
