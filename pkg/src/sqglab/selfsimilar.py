"""Self-similar variables, Sobolev scaling and the forces built from a vortex.

With parameters ``0 < a, b <= 1``

    tau = log(t)/(ab),   X = x/(abt)^(1/a),
    theta(t, x) = (abt)^(alpha/a - 1) Theta(tau, X),
    f(t, x)     = (abt)^(alpha/a - 2) F(tau, X),

and ``(Theta, F)`` solves

    d_tau Theta + V.grad Theta - b((a - alpha) + X.grad) Theta = F.

A vortex ``Theta_bar(R)`` is stationary for the Vishik force
``F = -b((a - alpha) + R d_R) Theta_bar``.  Adding the quadratic self-interaction
of a linear mode, ``G = F + V_lin.grad Theta_lin``, makes both
``Theta_bar + Theta_lin`` and ``Theta_bar - Theta_lin`` exact solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .radial_ops import RadialField, lagrange_weights, nystrom_matrix

__all__ = [
    "ScalingLaw",
    "ForceProfile",
    "GolovkinForce",
    "to_selfsimilar",
    "from_selfsimilar",
    "sobolev_scaling",
    "sobolev_seminorm",
    "default_a",
    "vishik_force",
    "physical_force",
    "stationary_residual",
    "golovkin_force",
]


def _check_ab(a: float, b: float) -> None:
    if not (0.0 < a <= 1.0 and 0.0 < b <= 1.0):
        raise DomainError(f"a and b must lie in (0, 1], got a={a}, b={b}")


def to_selfsimilar(t, x, a: float, b: float):
    """``(t, x) -> (tau, X)``; ``x`` may be any array of coordinates."""
    _check_ab(a, b)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("self-similar time needs t > 0")
    tau = np.log(t) / (a * b)
    X = np.asarray(x, dtype=float) / (a * b * t) ** (1.0 / a)
    return tau, X


def from_selfsimilar(tau, X, a: float, b: float):
    """Inverse of :func:`to_selfsimilar`."""
    _check_ab(a, b)
    tau = np.asarray(tau, dtype=float)
    t = np.exp(a * b * tau)
    x = np.asarray(X, dtype=float) * (a * b * t) ** (1.0 / a)
    return t, x


@dataclass(frozen=True)
class ScalingLaw:
    """Exponents relating physical and self-similar ``W^{s,p}`` seminorms."""

    alpha: float
    a: float
    b: float
    s: float
    p: float

    def __post_init__(self) -> None:
        _check_ab(self.a, self.b)
        if not (self.p >= 1.0):
            raise DomainError(f"p must be >= 1, got {self.p}")

    @property
    def critical(self) -> float:
        """``alpha + 2/p - s``; the force is integrable at t = 0 iff ``a`` lies below it."""
        return self.alpha + (0.0 if math.isinf(self.p) else 2.0 / self.p) - self.s

    @property
    def exponent_theta(self) -> float:
        return self.critical / self.a - 1.0

    @property
    def exponent_f(self) -> float:
        return self.critical / self.a - 2.0

    @property
    def force_integrable(self) -> bool:
        return self.exponent_theta > 0.0

    def theta_norm(self, norm_Theta: float, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("t must be positive")
        return (self.a * self.b * t) ** self.exponent_theta * norm_Theta

    def force_norm(self, norm_F: float, t):
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError("t must be positive")
        return (self.a * self.b * t) ** self.exponent_f * norm_F

    def force_integral(self, norm_F: float, t: float) -> float:
        """``int_0^t ||f(t')|| dt'``, infinite when the exponent is not positive."""
        e = self.exponent_theta
        if e <= 0.0:
            return math.inf
        ab = self.a * self.b
        return (ab * t) ** e / (ab * e) * norm_F

    def force_integral_from(self, norm_F: float, t0: float, t: float) -> float:
        """``int_{t0}^t ||f(t')|| dt'`` for ``0 < t0 < t`` (closed form)."""
        if not 0.0 < t0 < t:
            raise DomainError("need 0 < t0 < t")
        e = self.exponent_theta
        ab = self.a * self.b
        if e == 0.0:
            return math.log(t / t0) / ab * norm_F
        return ((ab * t) ** e - (ab * t0) ** e) / (ab * e) * norm_F


def sobolev_scaling(norm_Theta: float, t, law: ScalingLaw):
    """``||theta(t)|| = (abt)^((alpha + 2/p - s)/a - 1) ||Theta(tau)||``."""
    return law.theta_norm(norm_Theta, t)


def default_a(alpha: float, s: float, p: float) -> float:
    """Half the critical value ``alpha + 2/p - s``, clamped to ``(0, 1]``."""
    crit = alpha + (0.0 if math.isinf(p) else 2.0 / p) - s
    if crit <= 0.0:
        raise DomainError(f"no admissible a: alpha + 2/p - s = {crit:.4g} <= 0")
    return min(0.5 * crit, 1.0)


def sobolev_seminorm(values: np.ndarray, box: float, s: float, p: float = 2.0) -> float:
    """``||f||_{W^{s,p}}`` seminorm of grid samples on a periodic square of side ``box``.

    Uses the multiplier ``|k|^s``; ``p = 2`` by Plancherel and ``p = inf`` as the
    maximum of the filtered field.  Other ``p`` are not supported.
    """
    f = np.asarray(values, dtype=float)
    N = f.shape[0]
    if f.shape != (N, N):
        raise DomainError("expected square grid samples")
    k = 2.0 * np.pi * np.fft.fftfreq(N, d=box / N)
    kk = np.hypot(*np.meshgrid(k, k, indexing="ij"))
    with np.errstate(divide="ignore"):
        mult = np.where(kk > 0, kk**s, 0.0 if s != 0 else 1.0)
    g = np.fft.ifft2(mult * np.fft.fft2(f)).real
    cell = (box / N) ** 2
    if p == 2:
        return float(np.sqrt(cell * np.sum(g * g)))
    if math.isinf(p):
        return float(np.max(np.abs(g)))
    raise DomainError("only p = 2 and p = inf are supported on the grid")


@dataclass(frozen=True)
class ForceProfile:
    """Radial force samples ``F(R)``."""

    R: np.ndarray
    F: np.ndarray = field(repr=False)
    a: float
    b: float
    alpha: float

    def __call__(self, R):
        return np.interp(np.asarray(R, dtype=float), self.R, self.F, right=0.0)


def vishik_force(theta_bar, a: float, b: float, alpha: float, R) -> ForceProfile:
    """``F = -b((a - alpha) theta + R theta')`` sampled at ``R``."""
    R = np.asarray(R, dtype=float)
    F = -b * ((a - alpha) * theta_bar.profile(R) + R * theta_bar.dprofile(R))
    return ForceProfile(R=R, F=F, a=a, b=b, alpha=alpha)


def physical_force(force: ForceProfile, t, r):
    """``f(t, x) = (abt)^(alpha/a - 2) F(x/(abt)^(1/a))`` at radius ``r``."""
    a, b, alpha = force.a, force.b, force.alpha
    _, X = to_selfsimilar(t, r, a, b)
    return (a * b * np.asarray(t, dtype=float)) ** (alpha / a - 2.0) * force(np.abs(X))


def stationary_residual(theta_bar, force: ForceProfile) -> float:
    """Max of ``|V.grad Theta - b((a-alpha) + R d_R)Theta - F|`` on the force samples.

    For a vortex ``V.grad Theta`` vanishes identically (the velocity is
    angular), so this checks the force against the profile.
    """
    R = force.R
    lhs = -force.b * ((force.a - force.alpha) * theta_bar.profile(R) + R * theta_bar.dprofile(R))
    return float(np.max(np.abs(lhs - force.F)))


@dataclass(frozen=True)
class GolovkinForce:
    """``G(tau) = F + V_lin.grad Theta_lin`` for ``Theta_lin = Re(e^{lambda tau} W e^{i n phi})``.

    The quadratic term only has angular modes ``0`` and ``+-2n``:

        V_lin.grad Theta_lin = e^{2 Re(lambda) tau} q0(R)
                               + Re(e^{2 lambda tau} q2(R) e^{2 i n phi}).
    """

    base: ForceProfile
    n: int
    lam: complex
    R: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    q0: np.ndarray = field(repr=False)
    q2: np.ndarray = field(repr=False)

    def _radial(self, values, R):
        R = np.asarray(R, dtype=float)
        flat = R.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        inside = (flat >= self.R[0]) & (flat <= self.R[-1])
        if np.any(inside):
            idx, w = lagrange_weights(self.R, flat[inside], 5)
            out[inside] = np.sum(w * values[idx], axis=1)
        return out.reshape(R.shape)

    def quadratic(self, tau: float, R, phi):
        """``V_lin.grad Theta_lin`` at polar points."""
        R = np.asarray(R, dtype=float)
        phi = np.asarray(phi, dtype=float)
        lam = self.lam
        return (math.exp(2.0 * lam.real * tau) * self._radial(self.q0, R).real
                + (np.exp(2.0 * lam * tau) * self._radial(self.q2, R)
                   * np.exp(2j * self.n * phi)).real)

    def __call__(self, tau: float, R, phi):
        return self.base(R) + self.quadratic(tau, R, phi)

    def cartesian(self, tau: float, X, Y):
        return self(tau, np.hypot(X, Y), np.arctan2(Y, X))

    def theta_lin(self, tau: float, R, phi):
        """``Re(e^{lambda tau} W(R) e^{i n phi})`` at polar points."""
        return (np.exp(self.lam * tau) * self._radial(self.W, R)
                * np.exp(1j * self.n * np.asarray(phi, dtype=float))).real

    def theta_lin_cartesian(self, tau: float, X, Y):
        return self.theta_lin(tau, np.hypot(X, Y), np.arctan2(Y, X))

    def mode_coefficients(self, tau: float, R: float, samples: int = 64) -> np.ndarray:
        """Fourier coefficients in ``phi`` of ``G(tau, R, .)``, index ``k`` at ``[k]``."""
        phi = 2.0 * np.pi * np.arange(samples) / samples
        vals = self(tau, np.full(samples, R), phi)
        return np.fft.fft(vals) / samples


def _derivative_matrix(x: np.ndarray, degree: int = 5) -> np.ndarray:
    """Derivative of the local Lagrange interpolant at the nodes."""
    N = x.size
    D = np.zeros((N, N))
    half = (degree + 1) // 2
    for i in range(N):
        start = min(max(i - half, 0), N - degree - 1)
        s = x[start:start + degree + 1]
        for j in range(degree + 1):
            others = [k for k in range(degree + 1) if k != j]
            denom = np.prod([s[j] - s[k] for k in others])
            num = 0.0
            for p in others:
                num += np.prod([x[i] - s[k] for k in others if k != p])
            D[i, start + j] = num / denom
    return D


def golovkin_force(theta_bar, W: RadialField, lam: complex, n: int, a: float, b: float,
                   alpha: float) -> GolovkinForce:
    """Build ``G`` from a mode ``W`` (typically ``RadialEigenSolution.W``).

    The stream function ``psi = V_{n,alpha}[W]`` is taken on the nodes of
    ``W`` through the Nystrom block and differentiated with the same local
    interpolation; the velocity of ``W e^{i n phi}`` is
    ``(i n psi/R, -psi')`` in polar components.
    """
    x = W.nodes
    w = W.values
    psi = nystrom_matrix(x, n, alpha, np.arange(x.size)) @ w
    D = _derivative_matrix(x)
    dw, dpsi = D @ w, D @ psi
    q0 = -(n / (2.0 * x)) * (D @ (psi * np.conj(w))).imag
    q2 = (1j * n / (2.0 * x)) * (psi * dw - dpsi * w)
    base = vishik_force(theta_bar, a, b, alpha, x)
    return GolovkinForce(base=base, n=int(n), lam=complex(lam), R=x, W=w,
                         q0=q0.astype(complex), q2=q2)
