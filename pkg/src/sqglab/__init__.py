"""Vortex instability, self-similar continuation and box simulations for alpha-SQG.

Modules: ``kernels`` (radial Biot-Savart kernels), ``vortex`` (two-step vortex
and its 2x2 stability matrix), ``regularize`` (smoothed vortex and eigenvalue
corrections), ``radial_ops`` (radial grids and integral operators), ``eigen``
(radial eigenproblems and continuation in b), ``selfsimilar`` (coordinates,
scaling laws, forces), ``simulate`` (periodic pseudo-spectral solver) and
``cli``.
"""

from __future__ import annotations

import os as _os

# cap BLAS/OpenMP threads before numpy is first imported
_threads = _os.environ.get("SQGLAB_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DivergenceError,
    DomainError,
    ResolutionError,
    SqglabError,
)

__all__ = [
    "__version__",
    "SqglabError",
    "DomainError",
    "DivergenceError",
    "ConvergenceError",
    "ResolutionError",
]
