"""Smooth zero-mean vortex and the eigenvalue correction it induces.

The jumps of the piecewise vortex are smoothed with an even bump ``eta`` whose
first three moments are ``(1, 0, 0)``; the moment conditions keep the smoothed
vortex at zero mean.  Zooming into ``B_eps(r_j)`` with ``r = r_j + eps*rho``
turns the stability equation into ``A^eps g = z^eps g`` for a pair of profiles
on ``(-1, 1)``, and ``z^eps = z + eps*y`` is obtained by a contraction
mapping started from the piecewise eigenpair ``(z, h)``.

Discretisation: the unknowns are the values of each profile at ``N``
Gauss-Legendre nodes.  Integrals against the kernels are taken by product
integration: the profile is replaced by its global interpolating polynomial and
the kernel is integrated with a rule graded toward the target node, which
resolves the ``|rho - rho'|^(1-alpha)`` or logarithmic behaviour of
``I_{1,alpha}`` on the diagonal blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError
from .kernels import biot_savart_constant, i_kernel, j_kernel
from .vortex import AnnularVortex, EigenPair, build_matrix, unstable_eigenpair

__all__ = [
    "Mollifier",
    "SmoothVortex",
    "DiscretizedOperator",
    "CorrectedEigenpair",
    "build_mollifier",
    "smooth_vortex",
    "admissible_eps",
    "assemble_A_eps",
    "corrected_eigenvalue",
    "solve_fixed_point_sub",
    "solve_fixed_point_sqg",
    "solve_fixed_point",
]


@lru_cache(maxsize=None)
def _composite_gl(a: float, b: float, panels: int, points: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(points)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[1:] + edges[:-1])[:, None]
    return (mid + half * x).ravel(), (half * w).ravel()


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    # 1/(t(1-t)) overflows for subnormal t; exp(-inf) = 0 is the right limit
    with np.errstate(over="ignore"):
        out[inside] = np.exp(-1.0 / (ti * (1.0 - ti)))
    return out


def _bump_slope(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < 1)
    ti = t[inside]
    with np.errstate(over="ignore", invalid="ignore"):
        slope = np.exp(-1.0 / (ti * (1.0 - ti))) * (1.0 - 2.0 * ti) / (ti * (1.0 - ti)) ** 2
    out[inside] = np.nan_to_num(slope, nan=0.0, posinf=0.0, neginf=0.0)
    return out


@dataclass(frozen=True)
class Mollifier:
    """Even bump ``eta = (3 chi + rho chi')/4`` built from a unit-mass ``chi`` on (0, 1).

    ``nodes``/``weights`` form the high-order rule on (-1, 1) used for moments,
    and ``values`` are the samples of eta at those nodes.
    """

    norm: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def chi(self, t):
        return _bump(t) / self.norm

    def chi_prime(self, t):
        return _bump_slope(t) / self.norm

    def __call__(self, rho):
        a = np.abs(np.asarray(rho, dtype=float))
        return 0.25 * (3.0 * self.chi(a) + a * self.chi_prime(a))

    def chi_mass(self, x):
        """``int_0^x chi`` for ``0 <= x <= 1``."""
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        t, w = _composite_gl(0.0, 1.0, 8, 24)
        return x * (self.chi(np.multiply.outer(x, t)) @ w)

    def cumulative(self, x):
        """``E(x) = int_{-1}^{x} eta``; the smoothed unit step."""
        x = np.asarray(x, dtype=float)
        a = np.minimum(np.abs(x), 1.0)
        half = 0.25 * (2.0 * self.chi_mass(a) + a * self.chi(a))
        return np.where(x >= 1.0, 1.0, np.where(x <= -1.0, 0.0, 0.5 + np.sign(x) * half))

    def moments(self, orders=(0, 1, 2)) -> tuple[float, ...]:
        return tuple(float(np.sum(self.weights * self.values * self.nodes**k)) for k in orders)


def build_mollifier(panels: int = 16, points: int = 24) -> Mollifier:
    """Default mollifier from the normalised bump ``exp(-1/(t(1-t)))``."""
    t, w = _composite_gl(0.0, 1.0, panels, points)
    norm = float(np.sum(w * _bump(t)))
    half_t, half_w = _composite_gl(0.0, 1.0, panels, points)
    nodes = np.concatenate([-half_t[::-1], half_t])
    weights = np.concatenate([half_w[::-1], half_w])
    proto = Mollifier(norm, nodes, weights, np.zeros_like(nodes))
    moll = Mollifier(norm, nodes, weights, proto(nodes))
    # the rule must reproduce the unit mass of chi itself
    check = float(np.sum(w * moll.chi(t)))
    if abs(check - 1.0) > 1e-12:
        raise ConvergenceError(f"bump normalisation drifted by {abs(check - 1.0):.2e}")
    return moll


def admissible_eps(v: AnnularVortex) -> float:
    """Upper bound ``min(r1, r2 - r1)/3`` on the smoothing width."""
    return min(v.sigma, 1.0 - v.sigma) / 3.0


@dataclass(frozen=True)
class SmoothVortex:
    """``theta^eps = c + (c1 1_[r1,inf) + c2 1_[r2,inf)) * eta^eps``."""

    vortex: AnnularVortex
    mollifier: Mollifier
    eps: float
    sign: float = 1.0

    @property
    def support(self) -> tuple[tuple[float, float], tuple[float, float]]:
        r1, r2 = self.vortex.radii
        return ((r1 - self.eps, r1 + self.eps), (r2 - self.eps, r2 + self.eps))

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, self.vortex.c)
        for rj, cj in zip(self.vortex.radii, self.vortex.jumps):
            out = out + cj * self.mollifier.cumulative((r - rj) / self.eps)
        return self.sign * out

    def dprofile(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape)
        for rj, cj in zip(self.vortex.radii, self.vortex.jumps):
            out = out + cj * self.mollifier((r - rj) / self.eps) / self.eps
        return self.sign * out

    def mean(self) -> float:
        """``int theta^eps r dr = -(1/2) sum_j c_j int eta (r_j + eps rho)^2``."""
        m = self.mollifier
        total = 0.0
        for rj, cj in zip(self.vortex.radii, self.vortex.jumps):
            total += cj * float(np.sum(m.weights * m.values * (rj + self.eps * m.nodes) ** 2))
        return -0.5 * self.sign * total

    def negated(self) -> "SmoothVortex":
        """The vortex ``-theta^eps`` (used by symmetry checks)."""
        return SmoothVortex(self.vortex, self.mollifier, self.eps, -self.sign)


def smooth_vortex(v: AnnularVortex, eps: float, mollifier: Mollifier | None = None) -> SmoothVortex:
    if not 0.0 < eps < admissible_eps(v):
        raise DomainError(
            f"eps must satisfy 0 < eps < min(r1, r2-r1)/3 = {admissible_eps(v):.6g}, got {eps}"
        )
    return SmoothVortex(v, mollifier or build_mollifier(), float(eps))


# --------------------------------------------------------------------------- Nystrom


def _gl_nodes(N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(N)
    bary = (-1.0) ** np.arange(N) * np.sqrt((1.0 - x**2) * w)
    return x, w, bary


def _interp_matrix(x: np.ndarray, bary: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Barycentric Lagrange basis on nodes ``x`` evaluated at points ``t``."""
    diff = t[:, None] - x[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    terms = bary[None, :] / diff
    P = terms / terms.sum(axis=1, keepdims=True)
    rows = np.nonzero(exact.any(axis=1))[0]
    if rows.size:
        P[rows] = exact[rows].astype(float)
    return P


def _graded_rule(x0: np.ndarray, uniform: int = 12, levels: int = 16, ratio: float = 0.3,
                 points: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite rules on (-1, 1), one per entry of ``x0``, graded toward ``x0``.

    Each side ``[-1, x0]`` and ``[x0, 1]`` is cut into ``uniform`` equal panels
    away from ``x0`` followed by ``levels`` geometrically shrinking panels.
    Returns arrays of shape ``(len(x0), Q)``.
    """
    g, gw = np.polynomial.legendre.leggauss(points)
    x0 = np.asarray(x0, dtype=float)[:, None]
    geo = ratio ** np.arange(1, levels + 1)
    frac = np.concatenate([np.linspace(1.0, ratio, uniform + 1), geo[1:], [0.0]])
    # side edges measured as distance from x0: length * frac, descending
    nodes, weights = [], []
    for end in (-1.0, 1.0):
        length = np.abs(end - x0)
        edges = x0 + np.sign(end) * length * frac[None, :]
        a, b = edges[:, :-1], edges[:, 1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes.append((mid[:, :, None] + half[:, :, None] * g).reshape(len(x0), -1))
        weights.append((np.abs(half)[:, :, None] * gw).reshape(len(x0), -1))
    return np.concatenate(nodes, axis=1), np.concatenate(weights, axis=1)


@dataclass(frozen=True)
class DiscretizedOperator:
    """Nystrom matrices on ``L^2(-1,1)^2`` sampled at ``N`` nodes per copy.

    ``A_eps`` is the full operator, ``A1_eps`` its singular self-interaction
    part and ``A_limit`` the eps -> 0 operator ``D + C``; for alpha = 1
    ``A1`` is the coefficient of ``log eps`` in ``A1_eps``.
    """

    n: int
    alpha: float
    eps: float
    sigma: float
    nodes: np.ndarray = field(repr=False)
    mean_weights: np.ndarray = field(repr=False)
    A_eps: np.ndarray = field(repr=False)
    A1_eps: np.ndarray = field(repr=False)
    A0_limit: np.ndarray = field(repr=False)
    A1_limit: np.ndarray = field(repr=False)
    D_diag: np.ndarray = field(repr=False)
    C_coef: np.ndarray = field(repr=False)

    @property
    def N(self) -> int:
        return self.nodes.size

    @property
    def A0_eps(self) -> np.ndarray:
        return self.A_eps - self.A1_eps

    @property
    def A_limit(self) -> np.ndarray:
        return self.A0_limit + (self.A1_limit if self.alpha < 1 else 0.0)

    @property
    def B0(self) -> np.ndarray:
        return (self.A0_eps - self.A0_limit) / self.eps

    @property
    def B1(self) -> np.ndarray:
        if self.alpha < 1:
            return (self.A1_eps - self.A1_limit) * (1.0 - self.alpha) / self.eps ** (1.0 - self.alpha)
        return self.A1_eps - math.log(self.eps) * self.A1_limit

    def constants(self, mu) -> np.ndarray:
        """Embed ``mu in C^2`` as a profile constant on each copy."""
        return np.repeat(np.asarray(mu, dtype=complex), self.N)

    def mean(self, f) -> np.ndarray:
        """``int f_j eta`` for each copy."""
        f = np.asarray(f).reshape(2, self.N)
        return f @ self.mean_weights


def assemble_A_eps(v: AnnularVortex, n: int, alpha: float, eps: float, N: int = 64,
                   mollifier: Mollifier | None = None) -> DiscretizedOperator:
    if not 0.0 < eps < admissible_eps(v):
        raise DomainError(
            f"eps must satisfy 0 < eps < min(r1, r2-r1)/3 = {admissible_eps(v):.6g}, got {eps}"
        )
    if N < 16:
        raise DomainError(f"need at least 16 nodes per copy, got {N}")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must satisfy 0 <= alpha <= 1, got {alpha}")
    moll = mollifier or build_mollifier()
    x, _, bary = _gl_nodes(N)
    radii = v.radii
    jumps = v.jumps

    t, w = _graded_rule(x)
    eta_t = moll(t)
    P = _interp_matrix(x, bary, t.ravel()).reshape(N, t.shape[1], N)
    # eta-weighted mean: int eta L_l over (-1, 1) with the regular rule
    ft, fw = _composite_gl(-1.0, 1.0, 32, 16)
    mean_w = (fw * moll(ft)) @ _interp_matrix(x, bary, ft)
    mean_w /= mean_w.sum()

    Mn = np.zeros((2, 2, N, N))
    M1 = np.zeros((2, 2, N, N))
    for j in range(2):
        r_t = radii[j] + eps * x  # targets
        for k in range(2):
            r_s = radii[k] + eps * t  # sources, shape (N, Q)
            sig = r_t[:, None] / r_s
            if alpha >= 1.0:
                # graded nodes can round onto the target; the log singularity is
                # integrable and such nodes carry negligible weight
                sig = np.where(sig == 1.0, np.nextafter(1.0, 2.0), sig)
            base = w * eta_t * r_s ** (1.0 - alpha) / r_t[:, None]
            Mn[j, k] = np.einsum("iq,iql->il", base * i_kernel(n, alpha, sig), P)
            M1[j, k] = np.einsum("iq,iql->il", base * i_kernel(1, alpha, sig), P)

    A = np.zeros((2 * N, 2 * N))
    A1 = np.zeros((2 * N, 2 * N))
    blk = lambda j, k: (slice(j * N, (j + 1) * N), slice(k * N, (k + 1) * N))  # noqa: E731
    for j in range(2):
        diag = np.zeros(N)
        for k in range(2):
            A[blk(j, k)] += jumps[k] * Mn[j, k]
            diag += jumps[k] * M1[j, k].sum(axis=1)
        A[blk(j, j)] -= np.diag(diag)
        A1[blk(j, j)] = jumps[j] * (M1[j, j] - np.diag(M1[j, j].sum(axis=1)))

    # eps -> 0 operators
    avg = np.outer(np.ones(N), mean_w)
    eye = np.eye(N)
    A0 = np.zeros((2 * N, 2 * N))
    A1_lim = np.zeros((2 * N, 2 * N))
    D = np.zeros(2)
    C = np.zeros((2, 2))
    for j in range(2):
        rj = radii[j]
        for k in range(2):
            rk, ck = radii[k], jumps[k]
            pref = ck * rk ** (1.0 - alpha) / rj
            if k == j:
                A0[blk(j, j)] -= pref * float(j_kernel(n, alpha, 1.0)) * avg
                if alpha < 1:
                    i1 = float(i_kernel(1, alpha, 1.0))
                    C[j, k] = pref * float(i_kernel(n, alpha, 1.0))
                    D[j] -= pref * i1
                    A1_lim[blk(j, j)] = pref * i1 * (avg - eye)
                else:
                    A1_lim[blk(j, j)] = 2.0 * ck / rj * (eye - avg)
            else:
                s = rj / rk
                i_n = float(i_kernel(n, alpha, s))
                i_1 = float(i_kernel(1, alpha, s))
                A0[blk(j, k)] += pref * i_n * avg
                A0[blk(j, j)] -= pref * i_1 * eye
                C[j, k] = pref * i_n
                D[j] -= pref * i_1
    return DiscretizedOperator(
        n=int(n), alpha=float(alpha), eps=float(eps), sigma=v.sigma, nodes=x,
        mean_weights=mean_w, A_eps=A, A1_eps=A1, A0_limit=A0, A1_limit=A1_lim,
        D_diag=D, C_coef=C,
    )


# --------------------------------------------------------------------------- fixed point


@dataclass(frozen=True)
class CorrectedEigenpair:
    """Result of the eigenvalue correction ``z^eps = z + eps*y``."""

    z: complex
    z_eps: complex
    y: complex
    gamma: complex
    eps: float
    g: np.ndarray = field(repr=False)
    iterations: int
    residual: float
    equation_residual: float
    increments: tuple[float, ...] = field(repr=False)
    iterate_norms: tuple[float, ...] = field(repr=False)
    f: np.ndarray | None = field(default=None, repr=False)
    n_mode: int = 0
    c_alpha: float = 0.0

    @property
    def lam(self) -> complex:
        return -1j * self.n_mode * self.c_alpha * self.z_eps


def _decompose(h: np.ndarray, v: np.ndarray) -> tuple[complex, complex]:
    """Coefficients ``(a, b)`` with ``v = a h + b conj(h)``."""
    basis = np.column_stack([h, np.conj(h)])
    a, b = np.linalg.solve(basis, v)
    return complex(a), complex(b)


def _equation_residual(op: DiscretizedOperator, h_eps: np.ndarray, z_eps: complex) -> float:
    r = op.A_eps @ h_eps - z_eps * h_eps
    return float(np.linalg.norm(r) / np.linalg.norm(h_eps))


def _iterate(step: Callable, state, tol: float, max_iter: int):
    increments: list[float] = []
    norms: list[float] = []
    for it in range(1, max_iter + 1):
        new_state, inc, norm = step(state)
        increments.append(inc)
        norms.append(norm)
        state = new_state
        if not np.isfinite(inc):
            break
        if inc <= tol:
            return state, it, increments, norms
        if it > 3 and increments[-1] > 0.9 * increments[-2] and increments[-1] > 1e3 * tol:
            raise ConvergenceError(
                f"fixed-point map is not contracting (ratio {increments[-1] / increments[-2]:.3f}); "
                "try a smaller eps"
            )
    raise ConvergenceError(f"no convergence in {max_iter} iterations (last increment {increments[-1]:.2e})")


def solve_fixed_point_sub(v: AnnularVortex, n: int, alpha: float, eps: float, N: int = 64,
                          tol: float = 1e-10, max_iter: int = 200,
                          op: DiscretizedOperator | None = None) -> CorrectedEigenpair:
    """Correction for ``0 <= alpha < 1``.

    Unknowns ``(g, y)`` with ``h^eps = h + eps g`` and ``z^eps = z + eps y``.
    One step computes

        f = (D - z)^{-1} (-B0 h + eps y g - (A^eps - A) g),
        C f = y h + 2 i Im(z) gamma conj(h),
        g <- f + gamma conj(h),

    where ``C f`` is constant on each copy, so the second line is a 2x2 solve.
    """
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"sub-SQG correction needs 0 <= alpha < 1, got {alpha}")
    pair = unstable_eigenpair(build_matrix(v, n, alpha))
    op = op or assemble_A_eps(v, n, alpha, eps, N)
    z, h2 = pair.z, pair.h
    h = op.constants(h2)
    hc = op.constants(np.conj(h2))
    B0h = (op.A_eps @ h - z * h) / eps
    dA = op.A_eps - op.A_limit
    dz = np.repeat(op.D_diag, op.N) - z

    def step(state):
        g, y = state
        f = (-B0h + eps * y * g - dA @ g) / dz
        cf = op.C_coef @ op.mean(f)
        y_new, b = _decompose(h2, cf)
        gamma = b / (2j * z.imag)
        g_new = f + gamma * hc
        inc = max(float(np.linalg.norm(g_new - g) / math.sqrt(2 * op.N)), abs(y_new - y))
        return (g_new, y_new), inc, float(np.linalg.norm(g_new) / math.sqrt(2 * op.N))

    (g, y), its, incs, norms = _iterate(step, (np.zeros(2 * op.N, complex), 0j), tol, max_iter)
    f = (-B0h + eps * y * g - dA @ g) / dz
    _, b = _decompose(h2, op.C_coef @ op.mean(f))
    gamma = b / (2j * z.imag)
    z_eps = z + eps * y
    return CorrectedEigenpair(
        z=z, z_eps=z_eps, y=y, gamma=gamma, eps=eps, g=g, iterations=its, residual=incs[-1],
        equation_residual=_equation_residual(op, h + eps * g, z_eps), increments=tuple(incs),
        iterate_norms=tuple(norms), f=f, n_mode=int(n), c_alpha=biot_savart_constant(alpha),
    )


def solve_fixed_point_sqg(v: AnnularVortex, n: int, eps: float, N: int = 64, tol: float = 1e-10,
                          max_iter: int = 200, op: DiscretizedOperator | None = None,
                          f_bar=(0.0, 0.0)) -> CorrectedEigenpair:
    """Correction for alpha = 1, where ``A1^eps = (log eps) A1 + B1``.

    With ``g = mu + f/log eps`` and ``mu = gamma conj(h)`` the equation becomes
    ``A1 f = P(f, y, gamma)``; solvability (``int P eta = 0`` on each copy)
    fixes ``(y, gamma)`` and ``A1 f = (2 c_j / r_j)(f_j - int f_j eta)`` is
    inverted on profiles with prescribed means ``f_bar``.
    """
    if math.log(eps) > -10.0:
        raise DomainError(f"alpha = 1 correction needs |log eps| >= 10, got eps={eps}")
    pair = unstable_eigenpair(build_matrix(v, n, 1.0))
    op = op or assemble_A_eps(v, n, 1.0, eps, N)
    z, h2 = pair.z, pair.h
    L = math.log(eps)
    N2 = op.N
    h = op.constants(h2)
    hc = op.constants(np.conj(h2))
    B0h = (op.A_eps @ h - z * h) / eps
    B0hc = (op.A_eps @ hc - np.conj(z) * hc) / eps
    mean_B0h = op.mean(B0h)
    mean_B0hc = op.mean(B0hc)
    bounded = op.A_eps - L * op.A1_limit
    d = np.repeat([2.0 * c / r for c, r in zip(v.jumps, v.radii)], N2)
    fbar = op.constants(f_bar)

    def parts(f, y, gamma):
        q = ((z + eps * y) * f - bounded @ f) / L
        mu = gamma * hc
        return q, mu

    def step(state):
        f, y, gamma = state
        q, _ = parts(f, y, gamma)
        # <P> = y h + gamma (2i Im z conj(h) - eps <B0 conj h> + eps y conj(h)) - <B0 h> + <q> = 0
        rhs = mean_B0h - op.mean(q)
        col = 2j * z.imag * np.conj(h2) - eps * mean_B0hc + eps * y * np.conj(h2)
        y_new, gamma_new = np.linalg.solve(np.column_stack([h2, col]), rhs)
        mu = gamma_new * hc
        P = (y_new * h - B0h) - (op.A_eps @ mu - z * mu) + eps * y_new * mu + q
        mP = op.constants(op.mean(P))
        f_new = fbar + (P - mP) / d
        inc = max(float(np.linalg.norm(f_new - f) / math.sqrt(2 * N2)), abs(y_new - y),
                  abs(gamma_new - gamma))
        return (f_new, complex(y_new), complex(gamma_new)), inc, float(
            np.linalg.norm(f_new) / math.sqrt(2 * N2))

    (f, y, gamma), its, incs, norms = _iterate(step, (fbar.copy(), 0j, 0j), tol, max_iter)
    g = gamma * hc + f / L
    z_eps = z + eps * y
    return CorrectedEigenpair(
        z=z, z_eps=z_eps, y=y, gamma=gamma, eps=eps, g=g, iterations=its, residual=incs[-1],
        equation_residual=_equation_residual(op, h + eps * g, z_eps), increments=tuple(incs),
        iterate_norms=tuple(norms), f=f, n_mode=int(n), c_alpha=biot_savart_constant(1.0),
    )


def solve_fixed_point(v: AnnularVortex, n: int, alpha: float, eps: float | None = None,
                      N: int = 64, tol: float = 1e-10, max_iter: int = 200,
                      min_eps: float = 1e-9) -> CorrectedEigenpair:
    """Dispatch on alpha; with ``eps=None`` halve from a default until the map contracts."""
    if eps is None:
        eps = 0.05 * min(v.sigma, 1.0 - v.sigma)
        if alpha == 1.0:
            eps = min(eps, math.exp(-10.0))
        auto = True
    else:
        auto = False
    while True:
        try:
            if alpha < 1.0:
                return solve_fixed_point_sub(v, n, alpha, eps, N, tol, max_iter)
            return solve_fixed_point_sqg(v, n, eps, N, tol, max_iter)
        except ConvergenceError:
            if not auto or eps / 2 < min_eps:
                raise
            eps /= 2


def corrected_eigenvalue(op: DiscretizedOperator, pair: EigenPair) -> tuple[complex, np.ndarray]:
    """Eigenvalue of the discrete ``A^eps`` closest to the piecewise ``z``.

    A dense solve, independent of the fixed-point iteration.
    """
    vals, vecs = np.linalg.eig(op.A_eps)
    k = int(np.argmin(np.abs(vals - pair.z)))
    return complex(vals[k]), vecs[:, k]
