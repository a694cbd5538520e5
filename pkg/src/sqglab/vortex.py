"""Two-step piecewise-constant vortex and its 2x2 stability problem.

The vortex takes the value ``c`` on ``(0, sigma]``, ``-1`` on ``(sigma, 1]`` and
zero beyond; zero mean forces ``(1 + c) sigma^2 = 1``.  Perturbations
concentrated on the two jumps reduce to the eigenproblem ``A h = z h`` of a real
2x2 matrix, and an eigenvalue with ``Im z > 0`` gives the growing mode
``lambda = -i n C_alpha z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import biot_savart_constant, i_kernel, j_kernel

__all__ = [
    "AnnularVortex",
    "StabilityMatrix",
    "EigenPair",
    "build_vortex",
    "build_matrix",
    "discriminant",
    "discriminant_at_1",
    "scan_discriminant",
    "instability_onset",
    "most_unstable_sigma",
    "unstable_eigenpair",
]


@dataclass(frozen=True)
class AnnularVortex:
    """Zero-mean profile with jumps at ``r1 = sigma`` and ``r2 = 1``."""

    sigma: float
    c: float

    @property
    def radii(self) -> tuple[float, float]:
        return (self.sigma, 1.0)

    @property
    def jumps(self) -> tuple[float, float]:
        """Jump sizes ``(c1, c2) = (-(1 + c), 1)``."""
        return (-(1.0 + self.c), 1.0)

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= self.sigma, self.c, np.where(r <= 1.0, -1.0, 0.0))

    def mean(self) -> float:
        """``int_0^inf theta r dr``, zero by construction."""
        return 0.5 * (self.c * self.sigma**2 - (1.0 - self.sigma**2))


@dataclass(frozen=True)
class StabilityMatrix:
    A: np.ndarray
    n: int
    alpha: float
    sigma: float

    @property
    def trace(self) -> float:
        return float(self.A[0, 0] + self.A[1, 1])

    @property
    def det(self) -> float:
        a = self.A
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])

    @property
    def discriminant(self) -> float:
        return self.trace**2 - 4.0 * self.det


@dataclass(frozen=True)
class EigenPair:
    z: complex
    h: np.ndarray
    lam: complex
    n: int
    alpha: float
    sigma: float


def build_vortex(sigma: float) -> AnnularVortex:
    if not 0.5 < sigma < 1.0:
        raise DomainError(f"sigma must lie in (1/2, 1), got {sigma}")
    return AnnularVortex(sigma=float(sigma), c=1.0 / sigma**2 - 1.0)


def _check_mode(n: int, alpha: float) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not 0.0 <= alpha < 2.0:
        raise DomainError(f"alpha must satisfy 0 <= alpha < 2, got {alpha}")


def build_matrix(v: AnnularVortex, n: int, alpha: float) -> StabilityMatrix:
    _check_mode(n, alpha)
    s = v.sigma
    j1 = float(j_kernel(n, alpha, 1.0))
    i1 = float(i_kernel(1, alpha, s))
    i_n = float(i_kernel(n, alpha, s))
    A = np.array(
        [
            [s ** (-(2.0 + alpha)) * j1 - i1 / s, i_n / s],
            [-i_n / s, -j1 + i1 / s],
        ]
    )
    return StabilityMatrix(A=A, n=int(n), alpha=float(alpha), sigma=s)


def discriminant(n: int, alpha: float, sigma) -> np.ndarray:
    """Discriminant of the stability matrix, vectorised over sigma in (0, 1].

    Uses the factorisation

        sigma^2 Delta = (X - 2 I_1 - 2 I_n)(X - 2 J_n(sigma)),
        X = (sigma + sigma^{-(1+alpha)}) J_n(1),

    whose second factor stays accurate near sigma = 1 where ``I_1`` and
    ``I_n`` grow without bound for alpha >= 1.
    """
    _check_mode(n, alpha)
    s = np.asarray(sigma, dtype=float)
    if np.any((s <= 0) | (s > 1)):
        raise DomainError("discriminant is evaluated for 0 < sigma <= 1")
    if n == 1:
        return np.zeros_like(s)
    j1 = float(j_kernel(n, alpha, 1.0))
    x = (s + s ** (-(1.0 + alpha))) * j1
    inner = s < 1.0
    out = np.zeros_like(s)
    si = s[inner]
    if si.size:
        i1 = i_kernel(1, alpha, si)
        i_n = i_kernel(n, alpha, si)
        jn = j_kernel(n, alpha, si)
        xi = x[inner]
        out[inner] = (xi - 2 * i1 - 2 * i_n) * (xi - 2 * jn) / si**2
    return out


def discriminant_at_1(n: int, alpha: float) -> float:
    """``Delta(1)`` from the closed-form kernel values (alpha < 1).

    Evaluated in the expanded form ``(X - 2 I_1)^2 - (2 I_n)^2`` so that the
    cancellation forced by zero mean is actually exercised.
    """
    if alpha >= 1.0:
        raise DomainError("Delta(1) is a closed-form value only for alpha < 1")
    j1 = float(j_kernel(n, alpha, 1.0))
    i1 = float(i_kernel(1, alpha, 1.0))
    i_n = float(i_kernel(n, alpha, 1.0))
    return (2.0 * j1 - 2.0 * i1) ** 2 - (2.0 * i_n) ** 2


def scan_discriminant(n: int, alpha: float, sigma_grid=None) -> list[tuple[float, float]]:
    """Discriminant sampled on ``sigma_grid`` (default 2000 points on (0.5, 1 - 1e-6))."""
    if sigma_grid is None:
        sigma_grid = np.linspace(0.5, 1.0 - 1e-6, 2001)[1:]
    grid = np.asarray(sigma_grid, dtype=float)
    if np.any((grid <= 0.5) | (grid >= 1.0)):
        raise DomainError("scan grid must lie inside (1/2, 1)")
    d = discriminant(n, alpha, grid)
    return list(zip(grid.tolist(), d.tolist()))


def instability_onset(n: int, alpha: float, scan, tol: float = 1e-8) -> float | None:
    """Smallest sigma of the window ``{Delta < 0}`` adjacent to sigma = 1.

    Starting from the right end of ``scan`` the last sign change is refined by
    bisection.  Returns the left end of the scan when the window covers it and
    ``None`` when no negative value was sampled.
    """
    sig = np.array([p[0] for p in scan])
    d = np.array([p[1] for p in scan])
    if not np.any(d < 0):
        return None
    k = len(d) - 1
    while k > 0 and d[k] < 0:
        k -= 1
    if d[k] < 0:
        return float(sig[0])
    lo, hi = sig[k], sig[k + 1]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if discriminant(n, alpha, np.array([mid]))[0] < 0:
            hi = mid
        else:
            lo = mid
    return float(hi)


def most_unstable_sigma(n: int, alpha: float, scan=None) -> float:
    """``argmin Delta`` over the scan, the default vortex carried forward."""
    if scan is None:
        scan = scan_discriminant(n, alpha)
    d = np.array([p[1] for p in scan])
    k = int(np.argmin(d))
    if d[k] >= 0:
        raise DomainError(f"no sigma with Delta < 0 found for n={n}, alpha={alpha}")
    return float(scan[k][0])


def unstable_eigenpair(m: StabilityMatrix) -> EigenPair:
    """Root ``z = (tr A + i sqrt(-Delta))/2`` and a unit null vector of ``A - z``."""
    delta = m.discriminant
    if not delta < 0:
        raise DomainError(f"Delta = {delta:.3e} >= 0: the vortex is not unstable for this mode")
    z = complex(0.5 * m.trace, 0.5 * math.sqrt(-delta))
    a = m.A
    h = np.array([a[0, 1], z - a[0, 0]], dtype=complex)
    h /= np.linalg.norm(h)
    lam = -1j * m.n * biot_savart_constant(m.alpha) * z
    return EigenPair(z=z, h=h, lam=lam, n=m.n, alpha=m.alpha, sigma=m.sigma)
