"""Fit configurations for the three synthetic benchmarks.

All use the L2 metric, the summed-gap dispersion and ``rho = 0.01`` (the
weight is not given with the original experiments; 0.01 is our default).

========  ======================  ======================
dataset   estimation smoother     prediction smoother
========  ======================  ======================
seven     ``spline:1.0``          ``lowess:0.4``
spiral    ``lowess:5``            ``lowess:0.4``
bridge    ``kernel_ridge:10``     ``spline:1.0``
========  ======================  ======================
"""

from .dispersion import DispersionSpec
from .errors import InvalidSpec
from .metrics import MetricSpec
from .mpc import Init, MpcConfig
from .smoothers import SmootherSpec

DEFAULT_RHO = 0.01

_SMOOTHERS = {
    "seven": ("spline:1.0", "lowess:0.4"),
    "spiral": ("lowess:5", "lowess:0.4"),
    "bridge": ("kernel_ridge:10", "spline:1.0"),
}


def recipe(kind, seed=0, **overrides):
    if kind not in _SMOOTHERS:
        raise InvalidSpec(f"no recipe for {kind!r}; expected one of {sorted(_SMOOTHERS)}")
    est, pred = _SMOOTHERS[kind]
    fields = dict(
        metric=MetricSpec.l2(),
        dispersion=DispersionSpec("l1_gaps"),
        rho=DEFAULT_RHO,
        estimation_smoother=SmootherSpec.parse(est),
        prediction_smoother=SmootherSpec.parse(pred),
        init=Init("graph"),
        seed=seed,
    )
    fields.update(overrides)
    return MpcConfig(**fields)
