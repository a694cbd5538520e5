"""Parametric singular kernels of the alpha-SQG Biot-Savart law.

For a frequency ``n >= 1``, an exponent ``0 <= alpha < 2`` and a ratio
``sigma = R/S >= 0`` the kernel is

    I_{n,alpha}(sigma) = (1/alpha) * int_{-pi}^{pi} cos(n b) |sigma - e^{ib}|^{-alpha} db,

with the alpha = 0 member defined through the equivalent form

    I_{n,alpha}(sigma) = (sigma/n) * K_{n,alpha}(sigma),
    K_{n,alpha}(sigma) = int_{-pi}^{pi} sin(b) sin(n b) |sigma - e^{ib}|^{-(2+alpha)} db.

``J_{n,alpha} = I_{1,alpha} - I_{n,alpha}`` stays finite at sigma = 1 for
alpha < 3.

Quadrature
----------
The integrand is even and periodic in ``b``; for sigma != 1 it is analytic with
complex singularities at ``b = +-i|log sigma|``.  We integrate over
``[0, pi]`` after the graded change of variables ``b = s sinh(kappa u)``,
``s = |log sigma|``, ``kappa = asinh(pi/s)``, which maps those singularities to
``u = +-i pi/(2 kappa)``; composite Gauss-Legendre panels in ``u`` then
converge geometrically with a rate independent of how close sigma is to 1.
Everything is vectorised over sigma, which is what the Nystrom assemblies
downstream need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DivergenceError, DomainError

__all__ = [
    "KernelQuery",
    "GammaClosedForm",
    "biot_savart_constant",
    "closed_form_at_1",
    "eval_I",
    "eval_I_at_1",
    "eval_J",
    "eval_J_prime_at_1",
    "eval_K",
    "eval_with_error",
    "i_kernel",
    "j_kernel",
    "k_kernel",
    "log_expansion_remainder",
]

_GL_POINTS = 12
_S_FLOOR = 1e-16
_S_CEIL = 40.0
_CHUNK = 1 << 21


@dataclass(frozen=True)
class KernelQuery:
    """The triple ``(n, alpha, sigma)`` addressing one kernel value."""

    n: int
    alpha: float
    sigma: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if not 0.0 <= self.alpha < 2.0:
            raise DomainError(f"alpha must satisfy 0 <= alpha < 2, got {self.alpha}")
        if not self.sigma >= 0.0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma}")


@dataclass(frozen=True)
class GammaClosedForm:
    """Pieces of ``I_{n,alpha}(1) = D_alpha F_n(alpha) / (1 - alpha)``."""

    n: int
    alpha: float
    D_alpha: float
    f_k: tuple[float, ...]
    F_n: float

    @property
    def value(self) -> float:
        if self.alpha >= 1.0:
            raise DivergenceError(f"I_(n,alpha)(1) is infinite for alpha={self.alpha} >= 1")
        return self.D_alpha * self.F_n / (1.0 - self.alpha)


def biot_savart_constant(alpha: float) -> float:
    """``C_alpha = 2^alpha/(2 pi) * Gamma(1 + alpha/2) / Gamma(1 - alpha/2)``."""
    if not 0.0 <= alpha < 2.0:
        raise DomainError(f"C_alpha needs 0 <= alpha < 2, got {alpha}")
    return 2.0**alpha / (2.0 * math.pi) * math.gamma(1.0 + alpha / 2) / math.gamma(1.0 - alpha / 2)


def _d_alpha(alpha: float) -> float:
    return 2.0 * math.sqrt(math.pi) * math.gamma((3.0 - alpha) / 2) / (
        2.0**alpha * math.gamma(2.0 - alpha / 2)
    )


def _f_factors(n: int, alpha: float) -> tuple[float, ...]:
    return tuple((2 * k + alpha) / (2 * k + 2 - alpha) for k in range(1, n))


def closed_form_at_1(n: int, alpha: float) -> GammaClosedForm:
    """Gamma-function data of the kernel at sigma = 1.

    The product runs over ``k = 1..n-1``; with that convention ``F_1 = 1`` and
    ``I_{n,0}(1) = pi/n`` as required by the explicit alpha = 0 kernel.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not 0.0 <= alpha < 3.0:
        raise DomainError(f"closed form needs 0 <= alpha < 3, got {alpha}")
    f = _f_factors(int(n), alpha)
    return GammaClosedForm(int(n), alpha, _d_alpha(alpha), f, math.prod(f))


def eval_I_at_1(n: int, alpha: float) -> float:
    """Closed form of ``I_{n,alpha}(1)`` for ``0 <= alpha < 1``."""
    if alpha >= 1.0:
        raise DomainError(f"I_(n,alpha)(1) is finite only for alpha < 1, got {alpha}")
    return closed_form_at_1(n, alpha).value


def _j_at_1(n: int, alpha: float) -> float:
    if n == 1:
        return 0.0
    cf = closed_form_at_1(n, alpha)
    if alpha == 1.0:
        # F_n'(1) = sum_k f_k'(1) because every f_k(1) = 1, and
        # f_k'(alpha) = (4k + 2) / (2k + 2 - alpha)^2.
        return cf.D_alpha * sum(2.0 / (2 * k + 1) for k in range(1, n))
    one_minus_f = -math.expm1(sum(math.log(f) for f in cf.f_k))
    return cf.D_alpha * one_minus_f / (1.0 - alpha)


def eval_J_prime_at_1(n: int, alpha: float) -> float:
    """``J'_{n,alpha}(1) = -(alpha/2) J_{n,alpha}(1)`` for ``0 <= alpha < 2``."""
    if not 0.0 <= alpha < 2.0:
        raise DomainError(f"J'(1) identity needs 0 <= alpha < 2, got {alpha}")
    return -0.5 * alpha * _j_at_1(n, alpha)


@lru_cache(maxsize=None)
def _u_rule(panels: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(_GL_POINTS)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wu = (half[:, None] * w[None, :]).ravel()
    return u, wu


def _panel_count(s: np.ndarray, freq: int) -> np.ndarray:
    kappa = np.arcsinh(np.pi / s)
    # resolve the image of the complex singularity and the oscillation of
    # cos(n b), whose frequency in u grows like n * kappa * pi near u = 1
    p = np.maximum(np.ceil(2.2 * kappa) + 2, np.ceil(0.7 * freq * kappa) + 4)
    # bucket the sizes so that the number of distinct rules stays small
    buckets = np.array([8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256])
    idx = np.searchsorted(buckets, p)
    return buckets[np.minimum(idx, len(buckets) - 1)]


def _integrate(form: str, n: int, alpha: float, sigma: np.ndarray, boost: int = 0) -> np.ndarray:
    """Return ``int_{-pi}^{pi}`` of the requested integrand for every sigma."""
    sig = np.asarray(sigma, dtype=float)
    flat = sig.ravel()
    out = np.empty_like(flat)
    with np.errstate(divide="ignore"):
        s = np.clip(np.abs(np.log(flat)), _S_FLOOR, _S_CEIL)
    freq = n if form in ("I", "K") else max(n, 1)
    pcount = _panel_count(s, freq) + boost
    for p in np.unique(pcount):
        sel = np.nonzero(pcount == p)[0]
        u, wu = _u_rule(int(p))
        step = max(1, _CHUNK // u.size)
        for start in range(0, sel.size, step):
            idx = sel[start : start + step]
            out[idx] = _integrate_block(form, n, alpha, flat[idx], s[idx], u, wu)
    return out.reshape(sig.shape)


def _integrate_block(
    form: str, n: int, alpha: float, sig: np.ndarray, s: np.ndarray, u: np.ndarray, wu: np.ndarray
) -> np.ndarray:
    kappa = np.arcsinh(np.pi / s)[:, None]
    ku = kappa * u[None, :]
    beta = s[:, None] * np.sinh(ku)
    jac = s[:, None] * kappa * np.cosh(ku) * wu[None, :]
    sg = sig[:, None]
    q = (1.0 - sg) ** 2 + 4.0 * sg * np.sin(0.5 * beta) ** 2
    if form == "K":
        g = np.sin(beta) * np.sin(n * beta) * q ** (-(1.0 + 0.5 * alpha))
    elif form == "I":
        if alpha == 0.0:
            g = (sg / n) * np.sin(beta) * np.sin(n * beta) / q
        else:
            g = np.cos(n * beta) * q ** (-0.5 * alpha) / alpha
    elif form == "J":
        if alpha == 0.0:
            g = sg * np.sin(beta) * (np.sin(beta) - np.sin(n * beta) / n) / q
        else:
            g = (np.cos(beta) - np.cos(n * beta)) * q ** (-0.5 * alpha) / alpha
    else:  # pragma: no cover - guarded by callers
        raise ValueError(form)
    return 2.0 * np.sum(g * jac, axis=1)


def _check(n: int, alpha: float, limit: float = 2.0) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not 0.0 <= alpha < limit:
        raise DomainError(f"alpha must satisfy 0 <= alpha < {limit:g}, got {alpha}")


def i_kernel(n: int, alpha: float, sigma) -> np.ndarray:
    """Vectorised ``I_{n,alpha}(sigma)``.

    Entries with ``sigma == 1`` use the Gamma closed form when alpha < 1 and
    raise :class:`DivergenceError` otherwise.
    """
    _check(n, alpha)
    sig = np.asarray(sigma, dtype=float)
    if np.any(sig < 0):
        raise DomainError("sigma must be non-negative")
    at1 = sig == 1.0
    if np.any(at1) and alpha >= 1.0:
        raise DivergenceError(f"I_({n},{alpha}) diverges at sigma = 1")
    out = _integrate("I", int(n), alpha, np.where(at1, 0.5, sig))
    if np.any(at1):
        out = np.where(at1, eval_I_at_1(n, alpha), out)
    return out


def j_kernel(n: int, alpha: float, sigma) -> np.ndarray:
    """Vectorised ``J_{n,alpha} = I_{1,alpha} - I_{n,alpha}`` (finite at sigma = 1)."""
    _check(n, alpha)
    sig = np.asarray(sigma, dtype=float)
    if np.any(sig < 0):
        raise DomainError("sigma must be non-negative")
    if n == 1:
        return np.zeros_like(sig)
    at1 = sig == 1.0
    out = _integrate("J", int(n), alpha, np.where(at1, 0.5, sig))
    if np.any(at1):
        out = np.where(at1, _j_at_1(int(n), alpha), out)
    return out


def k_kernel(n: int, alpha: float, sigma) -> np.ndarray:
    """Vectorised ``K_{n,alpha}(sigma)`` for sigma != 1."""
    _check(n, alpha)
    sig = np.asarray(sigma, dtype=float)
    if np.any(sig == 1.0):
        raise DivergenceError("K_(n,alpha) is evaluated only away from sigma = 1")
    return _integrate("K", int(n), alpha, sig)


def eval_I(q: KernelQuery) -> float:
    """``I_{n,alpha}(sigma)`` for a single query."""
    return float(i_kernel(q.n, q.alpha, q.sigma))


def eval_J(q: KernelQuery) -> float:
    """``J_{n,alpha}(sigma)`` for a single query."""
    return float(j_kernel(q.n, q.alpha, q.sigma))


def eval_K(q: KernelQuery) -> float:
    """``K_{n,alpha}(sigma)`` for a single query."""
    return float(k_kernel(q.n, q.alpha, q.sigma))


def eval_with_error(q: KernelQuery, form: str = "I") -> tuple[float, float]:
    """Value together with an a-posteriori error estimate.

    The estimate is the difference between the production rule and a rule
    with more panels; closed-form values report zero.
    """
    form = form.upper()
    fns = {"I": eval_I, "J": eval_J, "K": eval_K}
    if form not in fns:
        raise DomainError(f"form must be one of I, J, K, got {form!r}")
    value = fns[form](q)
    if q.sigma == 1.0 or (form == "J" and q.n == 1):
        return value, 0.0
    finer = float(_integrate(form, q.n, q.alpha, np.array([q.sigma]), boost=16)[0])
    return value, abs(finer - value)


def log_expansion_remainder(n: int, sigma: float) -> float:
    """``R(sigma) = I_{n,1}(sigma) + (2/sqrt(sigma)) log|1 - sigma|``.

    Defined for ``0 < |sigma - 1| <= 1/2``; the logarithmic divergence of the
    alpha = 1 kernel is removed and the remainder extends continuously to
    sigma = 1.
    """
    if not 0.0 < abs(sigma - 1.0) <= 0.5:
        raise DomainError(f"remainder is defined for 0 < |sigma-1| <= 1/2, got {sigma}")
    value = float(i_kernel(n, 1.0, sigma))
    return value + 2.0 / math.sqrt(sigma) * math.log(abs(1.0 - sigma))
