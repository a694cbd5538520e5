"""Linear stability of a smooth vortex on purely n-fold modes.

On ``W(R) e^{i n phi}`` the (self-similar) linearised operator reads

    L_b W = b(a - alpha) W + b R W' - i n (V_phi/R) W - i n (d theta/dR) V_{n,alpha}[W] / R,

with ``b = 0`` giving the Eulerian problem.  Discretisation on a
:class:`~sqglab.radial_ops.RadialGrid`:

* the multiplier terms are diagonal;
* ``R d/dR`` is the one-sided fourth order difference in ``log R`` that only
  looks outward (``i .. i+4``).  Characteristics of ``b R d/dR`` run toward the
  origin, so this is the upwind direction, and ``W`` is taken to vanish beyond
  the last node;
* the nonlocal term uses the Nystrom block of
  :func:`~sqglab.radial_ops.nystrom_matrix`, needed only on rows where
  ``d theta/dR != 0``.

The eigenproblem is solved densely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import ConvergenceError, DomainError, ResolutionError
from .kernels import biot_savart_constant
from .radial_ops import (
    RadialField,
    RadialGrid,
    build_radial_grid,
    near_origin_rate,
    _interval_weights,
    nystrom_matrix,
    vortex_velocity,
)

__all__ = [
    "SelfSimilarParams",
    "StabilityOperator",
    "RadialEigenSolution",
    "ContractionTable",
    "assemble_Lb",
    "leading_eigen",
    "solve_mode",
    "grid_drift",
    "continue_in_b",
    "power_law_fit",
    "winding_monotone",
    "transport_matrix",
    "transport_contraction_check",
]


@dataclass(frozen=True)
class SelfSimilarParams:
    """Scaling parameters ``a``, ``b``, the exponent ``alpha`` and Sobolev index ``m``."""

    a: float
    b: float
    alpha: float
    m: int = 5

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must satisfy 0 <= alpha <= 1, got {self.alpha}")
        if not 0.0 < self.a < 1.0 + self.alpha:
            raise DomainError(f"a must lie in (0, 1 + alpha) = (0, {1 + self.alpha}), got {self.a}")
        if self.b < 0.0:
            raise DomainError(f"b must be non-negative, got {self.b}")
        if int(self.m) != self.m or self.m < 5:
            raise DomainError(f"Sobolev index m must be an integer >= 5, got {self.m}")

    def b_cap(self, re_lambda: float) -> float:
        """Largest admissible ``b`` for a growth rate: ``Re lambda/(m + 3)``."""
        return re_lambda / (self.m + 3)


def _derivative_weights(s: np.ndarray, s0: float) -> np.ndarray:
    """Weights of ``d/ds`` at ``s0`` from the Lagrange interpolant through ``s``."""
    k = s.size
    w = np.zeros(k)
    for j in range(k):
        others = [i for i in range(k) if i != j]
        denom = np.prod([s[j] - s[i] for i in others])
        num = 0.0
        for p in others:
            num += np.prod([s0 - s[i] for i in others if i != p])
        w[j] = num / denom
    return w


def transport_matrix(nodes: np.ndarray, width: int = 5) -> np.ndarray:
    """``R d/dR`` with the outward one-sided stencil and zero ghosts past the end."""
    x = np.asarray(nodes, dtype=float)
    N = x.size
    h_end = x[-1] - x[-2]
    ext = np.concatenate([x, x[-1] + h_end * np.arange(1, width)])
    s = np.log(ext)
    D = np.zeros((N, N))
    for i in range(N):
        w = _derivative_weights(s[i:i + width], s[i])
        cols = np.arange(i, i + width)
        keep = cols < N
        D[i, cols[keep]] = w[keep]
    return D


@dataclass(frozen=True)
class StabilityOperator:
    """Pieces of ``L_b`` kept apart so that ``b`` can change without reassembly."""

    grid: RadialGrid
    n: int
    alpha: float
    a: float
    b: float
    m: int
    multiplier: np.ndarray = field(repr=False)   # -i n V_phi / R
    nonlocal_: np.ndarray = field(repr=False)    # -i n theta' V_n[.] / R
    transport: np.ndarray = field(repr=False)    # R d/dR
    dtheta: np.ndarray = field(repr=False)
    vphi: np.ndarray = field(repr=False)

    @property
    def params(self) -> SelfSimilarParams:
        return SelfSimilarParams(self.a, self.b, self.alpha, self.m)

    @property
    def matrix(self) -> np.ndarray:
        L = self.nonlocal_.astype(complex)
        L[np.diag_indices_from(L)] += self.multiplier + self.b * (self.a - self.alpha)
        if self.b:
            L += self.b * self.transport
        return L

    def with_b(self, b: float) -> "StabilityOperator":
        SelfSimilarParams(self.a, b, self.alpha, self.m)
        return replace(self, b=float(b))

    def negated(self) -> "StabilityOperator":
        """Operator of the vortex ``-theta``."""
        return replace(self, multiplier=-self.multiplier, nonlocal_=-self.nonlocal_,
                       dtheta=-self.dtheta, vphi=-self.vphi)


def assemble_Lb(theta_bar, params: SelfSimilarParams, n_mode: int,
                grid: RadialGrid | None = None, nodes: int = 400, degree: int = 5,
                near: int = 6, layer_share: float = 0.7) -> StabilityOperator:
    """Assemble the discrete ``L_b`` for the mode ``n_mode`` of ``theta_bar``.

    For ``b > 0`` the eigenfunction oscillates on the whole of ``(0, r1)``,
    so a smaller ``layer_share`` (about 0.5) with 800 nodes is advisable.
    """
    if grid is None:
        grid = build_radial_grid(theta_bar, nodes, layer_share=layer_share)
    x = grid.nodes
    (a1, b1), (a2, b2) = theta_bar.support
    layer = np.sum((x >= a1) & (x <= b1)) + np.sum((x >= a2) & (x <= b2))
    if layer < 200:
        raise ResolutionError(f"only {layer} nodes resolve the layers; need at least 200")
    n = int(n_mode)
    alpha = params.alpha
    dtheta = theta_bar.dprofile(x)
    N = x.size
    nonlocal_ = np.zeros((N, N), dtype=complex)
    if n != 0:
        vphi = vortex_velocity(theta_bar, alpha, x).values.real
        rows = np.nonzero(dtheta != 0.0)[0]
        M = nystrom_matrix(x, n, alpha, rows, degree=degree, near=near)
        nonlocal_[rows] = (-1j * n * dtheta[rows] / x[rows])[:, None] * M
        multiplier = -1j * n * vphi / x
    else:
        vphi = np.zeros(N)
        multiplier = np.zeros(N, dtype=complex)
    return StabilityOperator(
        grid=grid, n=n, alpha=float(alpha), a=float(params.a), b=float(params.b), m=int(params.m),
        multiplier=multiplier, nonlocal_=nonlocal_, transport=transport_matrix(x),
        dtheta=dtheta, vphi=vphi,
    )


@dataclass(frozen=True)
class RadialEigenSolution:
    """Leading eigenpair of ``L_b`` on the mode ``mode``."""

    W: RadialField
    lambda_b: complex
    residual: float
    mode: int
    b: float
    threshold: float
    unstable: bool
    support_radius: float
    a: float = 0.0
    alpha: float = 0.0

    @property
    def growth(self) -> float:
        return self.lambda_b.real

    @property
    def predicted_exponent(self) -> float:
        """``(Re lambda - b(a - alpha))/b``, the decay exponent of ``|W|`` at the origin."""
        if self.b <= 0:
            return float("inf")
        return (self.lambda_b.real - self.b * (self.a - self.alpha)) / self.b


def _finish(op: StabilityOperator, lam: complex, w: np.ndarray, threshold: float,
            residual_fn) -> RadialEigenSolution:
    x = op.grid.nodes
    # fix the phase at the largest entry and normalise
    j = int(np.argmax(np.abs(w)))
    w = w * (abs(w[j]) / w[j])
    w = w / op.grid.norm(w)
    big = np.abs(w) > 1e-10 * np.max(np.abs(w))
    support = float(x[np.nonzero(big)[0][-1]])
    return RadialEigenSolution(
        W=RadialField(x, w), lambda_b=lam, residual=float(residual_fn(w)), mode=op.n, b=op.b,
        threshold=float(threshold), unstable=bool(lam.real > threshold), support_radius=support,
        a=op.a, alpha=op.alpha,
    )


class _Propagator:
    """Exact inward propagator of the transport part of ``L_b`` (``b > 0``).

    Off the nonlocal source ``f = -i n theta' V_n[W]/R`` the eigen equation is
    the first order ODE ``b R W' = (lambda - b(a - alpha) - mult) W - f`` with
    ``W = 0`` past the outer layer, so

        W(R) = int_R^Rmax exp(Q(R) - Q(S)) f(S) / (b S) dS,
        Q(R) = ((lambda - b(a - alpha))/b) log R - (1/b) int^R mult(t)/t dt.

    Substituting back gives ``f = T(lambda) f`` on the layer nodes, a small
    nonlinear eigenproblem in ``lambda``.  Unlike the finite difference matrix,
    whose spectrum for ``b > 0`` is polluted by grid-scale modes, this map
    depends smoothly on ``lambda``.
    """

    def __init__(self, op: StabilityOperator) -> None:
        x = op.grid.nodes
        N = x.size
        idx, wm = _interval_weights(x, 5)
        Wm = np.zeros((N - 1, N))
        np.put_along_axis(Wm, idx, wm, axis=1)
        tail = np.cumsum(Wm[::-1], axis=0)[::-1]
        self.tail = np.vstack([tail, np.zeros((1, N))])   # int_{x_i}^{x_N} weights
        self.rows = np.nonzero(op.dtheta != 0.0)[0]
        self.coupling = op.nonlocal_[self.rows]
        self.logx = np.log(x)
        self.mint = np.concatenate([[0.0], np.cumsum(Wm @ (op.multiplier / x))])
        self.x = x
        self.op = op

    def P(self, lam: complex) -> np.ndarray:
        op, r = self.op, self.rows
        b = op.b
        Q = (lam - b * (op.a - op.alpha)) / b * self.logx - self.mint / b
        w = self.tail[:, r]
        dq = Q[:, None] - Q[r][None, :]
        live = w != 0.0
        out = np.zeros(w.shape, dtype=complex)
        # Re dq > 0 only when Re lambda < b(a - alpha); clamp so the iteration can recover
        d = dq[live]
        out[live] = w[live] * np.exp(np.minimum(d.real, 600.0) + 1j * d.imag)
        return out / (b * self.x[r])[None, :]

    def T(self, lam: complex) -> np.ndarray:
        return self.coupling @ self.P(lam)

    def closest_to_one(self, lam: complex) -> tuple[complex, np.ndarray]:
        vals, vecs = np.linalg.eig(self.T(lam))
        k = int(np.argmin(np.abs(vals - 1.0)))
        return complex(vals[k]), vecs[:, k]


def _selfsimilar_eigen(op: StabilityOperator, guess: complex, tol: float = 1e-12,
                       max_iter: int = 60) -> tuple[complex, np.ndarray, _Propagator]:
    prop = _Propagator(op)
    l0, l1 = complex(guess), complex(guess) * (1.0 + 1e-4) + 1e-6
    f0 = prop.closest_to_one(l0)[0] - 1.0
    for _ in range(max_iter):
        nu, vec = prop.closest_to_one(l1)
        f1 = nu - 1.0
        if f1 == f0:
            break
        l0, l1, f0 = l1, l1 - f1 * (l1 - l0) / (f1 - f0), f1
        if abs(l1 - l0) <= tol * max(1.0, abs(l1)):
            nu, vec = prop.closest_to_one(l1)
            return l1, prop.P(l1) @ vec, prop
    raise ConvergenceError(f"secant iteration for lambda_b stalled near {l1:.6g}")


def leading_eigen(op: StabilityOperator, threshold: float | None = None,
                  target: complex | None = None) -> RadialEigenSolution:
    """Eigenpair with the largest real part, or the one closest to ``target``.

    ``threshold`` defaults to ``1e-3 n C_alpha``; an eigenvalue below it is
    still returned, flagged ``unstable=False``.  ``target`` selects a branch,
    typically ``-i n C_alpha z`` of the piecewise vortex: for alpha = 1 and
    thin layers the smooth vortex also carries faster modes localised in a
    single layer.

    For ``b = 0`` the matrix is diagonalised densely.  For ``b > 0`` the
    eigenvalue is continued from the ``b = 0`` one (or from ``target``)
    through the propagator formulation of :class:`_Propagator`.
    """
    if threshold is None:
        threshold = 1e-3 * max(abs(op.n), 1) * biot_savart_constant(op.alpha)
    if op.b == 0.0 or op.n == 0:
        L = op.matrix
        vals, vecs = np.linalg.eig(L)
        k = int(np.argmax(vals.real)) if target is None else int(np.argmin(np.abs(vals - target)))
        lam = complex(vals[k])
        return _finish(op, lam, vecs[:, k], threshold,
                       lambda w: op.grid.norm(L @ w - lam * w))
    if target is None:
        target = leading_eigen(op.with_b(0.0)).lambda_b
    lam, w, prop = _selfsimilar_eigen(op, target)

    def residual(v):
        return op.grid.norm(v - prop.P(lam) @ (prop.coupling @ v))

    return _finish(op, lam, w, threshold, residual)


def solve_mode(theta_bar, n: int, alpha: float, b: float = 0.0, a: float | None = None,
               nodes: int = 400, m: int = 5) -> RadialEigenSolution:
    """Assemble and solve in one call; ``a`` defaults to ``alpha/2 + 1/4``."""
    a = alpha / 2.0 + 0.25 if a is None else a
    op = assemble_Lb(theta_bar, SelfSimilarParams(a, b, alpha, m), n, nodes=nodes)
    return leading_eigen(op)


def grid_drift(theta_bar, params: SelfSimilarParams, n: int, nodes: int = 400,
               tol: float = 1e-4, strict: bool = False) -> tuple[complex, complex, float]:
    """Leading eigenvalue at ``nodes`` and ``2 nodes`` and their distance.

    With ``strict`` a drift above ``tol`` raises :class:`ResolutionError`.
    """
    l1 = leading_eigen(assemble_Lb(theta_bar, params, n, nodes=nodes)).lambda_b
    l2 = leading_eigen(assemble_Lb(theta_bar, params, n, nodes=2 * nodes)).lambda_b
    drift = abs(l2 - l1)
    if strict and drift > tol:
        raise ResolutionError(f"leading eigenvalue moved by {drift:.2e} under node doubling")
    return l1, l2, drift


def continue_in_b(op: StabilityOperator, tol: float = 1e-7, max_iter: int = 80,
                  target: complex | None = None) -> tuple[float, RadialEigenSolution, RadialEigenSolution]:
    """Solve ``Re lambda_b = (m + 3) b`` for ``b`` by bisection.

    Returns ``(b_star, solution at b = 0, solution at b_star)`` where
    ``b_star`` is the lower end of the final bracket, so the cap
    ``Re lambda_b > (m + 3) b`` holds there.  Every trial ``b`` starts the
    eigenvalue iteration from the solution at the closest ``b`` already
    solved, which keeps the same branch throughout.
    """
    base = leading_eigen(op.with_b(0.0), target=target)
    if not base.unstable:
        raise DomainError("no unstable eigenvalue at b = 0 to continue from")
    k = op.m + 3
    solved: dict[float, complex] = {0.0: base.lambda_b}

    def g(b: float) -> tuple[float, RadialEigenSolution]:
        near = min(solved, key=lambda bb: abs(bb - b))
        sol = leading_eigen(op.with_b(b), target=solved[near])
        solved[b] = sol.lambda_b
        return sol.lambda_b.real - k * b, sol

    # march up to the bracket so the branch is followed continuously
    step = base.lambda_b.real / k / 4.0
    lo, hi = 0.0, step
    ghi, _ = g(hi)
    while ghi > 0:
        lo, hi = hi, hi + step
        ghi, _ = g(hi)
        if hi > 64 * step:
            raise ConvergenceError("could not bracket the b cap")
    it = 0
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        gm, _ = g(mid)
        if gm > 0:
            lo = mid
        else:
            hi = mid
        it += 1
        if it > max_iter:
            raise ConvergenceError("bisection on b did not converge")
    if lo == 0.0:
        raise ConvergenceError("the cap fails for every trial b > 0")
    _, sol = g(lo)
    return lo, base, sol


def power_law_fit(sol: RadialEigenSolution, R_max: float,
                  R_min: float | None = None) -> tuple[float, float]:
    """Least squares slope of ``log|W|`` against ``log R`` on ``[R_min, R_max]``.

    Returns ``(slope, predicted)`` with ``predicted = sol.predicted_exponent``.
    """
    x = sol.W.nodes
    lo = x[0] if R_min is None else R_min
    sel = (x >= lo) & (x <= R_max)
    if sel.sum() < 3:
        raise DomainError("fit window holds fewer than three nodes")
    y = np.log(np.abs(sol.W.values[sel]))
    slope = float(np.polyfit(np.log(x[sel]), y, 1)[0])
    return slope, sol.predicted_exponent


def winding_monotone(sol: RadialEigenSolution, R_max: float) -> bool:
    """Whether the phase of ``W`` winds monotonically on ``(R_min, R_max]``."""
    x = sol.W.nodes
    sel = x <= R_max
    phase = np.unwrap(np.angle(sol.W.values[sel]))
    d = np.diff(phase)
    return bool(np.all(d > 0) or np.all(d < 0))


# --------------------------------------------------------------------------- transport semigroup


@dataclass(frozen=True)
class ContractionTable:
    """Eulerian ``L^2`` norms of a transported field and flow-map Jacobians."""

    tau: np.ndarray
    norms: np.ndarray
    jacobians: np.ndarray
    b: float

    @property
    def fitted_rate(self) -> float:
        """Slope of ``log(norm)`` against ``tau``; ``-b`` for the exact flow."""
        return float(np.polyfit(self.tau, np.log(self.norms), 1)[0])

    @property
    def jacobian_error(self) -> float:
        expected = np.exp(-2.0 * self.b * self.tau)[:, None]
        return float(np.max(np.abs(self.jacobians - expected)))


def _angular_rate(theta_bar, alpha: float, R_far: float, samples: int = 600) -> CubicSpline:
    """Spline of ``Omega(R) = V_phi(R)/R`` on ``[0, R_far]``."""
    (a1, b1), (a2, b2) = theta_bar.support
    R = np.unique(np.concatenate([
        np.geomspace(1e-3, R_far, samples // 2),
        np.linspace(a1, b1, samples // 4),
        np.linspace(a2, b2, samples // 4),
    ]))
    omega = vortex_velocity(theta_bar, alpha, R).values.real / R
    c0 = near_origin_rate(theta_bar, alpha)
    return CubicSpline(np.concatenate([[0.0], R]), np.concatenate([[c0], omega]))


def transport_contraction_check(theta_bar, alpha: float, b: float, tau_grid, *,
                                box: float = 1.5, cells: int = 192,
                                center: tuple[float, float] = (0.15, 0.1), width: float = 0.12,
                                probes: int = 8, rtol: float = 1e-10) -> ContractionTable:
    """Transport a Gaussian by ``V_b = V - b X`` and record its norm.

    The field at time ``tau`` is ``theta_0`` composed with the backward flow
    map, evaluated on a Cartesian grid over ``[-box, box]^2``.  The Jacobian
    of the forward map is integrated along ``probes`` trajectories through
    the variational equation.
    """
    if b < 0:
        raise DomainError("b must be non-negative")
    tau = np.asarray(tau_grid, dtype=float)
    if tau[0] != 0.0 or np.any(np.diff(tau) <= 0):
        raise DomainError("tau_grid must start at 0 and increase")
    omega = _angular_rate(theta_bar, alpha, R_far=2.0 * box * math.sqrt(2.0) * math.exp(b * tau[-1]))
    domega = omega.derivative()

    def theta0(X, Y):
        return np.exp(-((X - center[0]) ** 2 + (Y - center[1]) ** 2) / width**2)

    h = 2.0 * box / cells
    g = -box + h * (np.arange(cells) + 0.5)
    X0, Y0 = np.meshgrid(g, g, indexing="ij")
    P = X0.size

    def backward(_, z):
        X, Y = z[:P], z[P:]
        om = omega(np.hypot(X, Y))
        return np.concatenate([om * Y + b * X, -om * X + b * Y])

    sol = solve_ivp(backward, (0.0, tau[-1]), np.concatenate([X0.ravel(), Y0.ravel()]),
                    t_eval=tau, method="DOP853", rtol=rtol, atol=rtol)
    if not sol.success:
        raise ConvergenceError(f"characteristic integration failed: {sol.message}")
    norms = np.array([
        math.sqrt(h * h * float(np.sum(theta0(sol.y[:P, k], sol.y[P:, k]) ** 2)))
        for k in range(tau.size)
    ])

    ang = np.linspace(0.0, 2.0 * math.pi, probes, endpoint=False)
    rad = np.linspace(0.2, 1.2, probes)
    starts = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)

    def forward(_, z):
        X, Y = z[0], z[1]
        J = z[2:].reshape(2, 2)
        R = math.hypot(X, Y)
        om = float(omega(R))
        dom = float(domega(R)) / R if R > 0 else 0.0
        vel = np.array([-om * Y - b * X, om * X - b * Y])
        grad = np.array([
            [-dom * X * Y - b, -om - dom * Y * Y],
            [om + dom * X * X, dom * X * Y - b],
        ])
        return np.concatenate([vel, (grad @ J).ravel()])

    jac = np.empty((tau.size, probes))
    for p, (x0, y0) in enumerate(starts):
        s = solve_ivp(forward, (0.0, tau[-1]), np.array([x0, y0, 1.0, 0.0, 0.0, 1.0]),
                      t_eval=tau, method="DOP853", rtol=rtol, atol=1e-13)
        if not s.success:
            raise ConvergenceError(f"variational integration failed: {s.message}")
        J = s.y[2:].T.reshape(-1, 2, 2)
        jac[:, p] = np.linalg.det(J)
    return ContractionTable(tau=tau, norms=norms, jacobians=jac, b=float(b))
