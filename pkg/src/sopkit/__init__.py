"""Skew-orthogonal polynomials in the complex plane and their Pfaffian kernels."""

import os as _os

# SOPKIT_THREADS caps the BLAS/OpenMP pools; it must be applied before
# numpy first loads, which is why it lives at the top of the package.
_cap = _os.environ.get("SOPKIT_THREADS")
if _cap and _cap.isdigit() and int(_cap) > 0:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                 "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
        _os.environ.setdefault(_var, _cap)
    del _var
del _os, _cap

from .special import (
    NumericalError,
    DomainError,
    OverflowSignal,
    QuadratureError,
)
from .ensembles import make_ensemble, ENSEMBLE_NAMES

__version__ = "0.1.0"

__all__ = [
    "NumericalError",
    "DomainError",
    "OverflowSignal",
    "QuadratureError",
    "make_ensemble",
    "ENSEMBLE_NAMES",
    "__version__",
]
