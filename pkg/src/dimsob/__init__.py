"""Dimension-free Sobolev inequalities in rearrangement-invariant spaces, checked numerically.

Modules:

* :mod:`dimsob.rearrange`  decreasing rearrangements of step functions and samples
* :mod:`dimsob.rispace`    r.i. norms, Hardy operators, dilation norms and Boyd indices
* :mod:`dimsob.isoprofile` isoperimetric estimators and the transference constants
* :mod:`dimsob.oracle`     brute-force checks used to cross-validate the fast paths
* :mod:`dimsob.harness`    test-function families and the theorem verifier
* :mod:`dimsob.cli`        the ``dimsob`` command
"""

__version__ = "0.1.0"

from .rearrange import StepProfile, WeightedSample, decreasing_rearrangement, maximal_average  # noqa: E402
from .rispace import parse_space, ri_norm  # noqa: E402
from .isoprofile import geometry_constant, geometry_limit, transference_integral  # noqa: E402
from .harness import ExperimentConfig, verify  # noqa: E402

__all__ = [
    "StepProfile",
    "WeightedSample",
    "decreasing_rearrangement",
    "maximal_average",
    "parse_space",
    "ri_norm",
    "geometry_constant",
    "geometry_limit",
    "transference_integral",
    "ExperimentConfig",
    "verify",
]
