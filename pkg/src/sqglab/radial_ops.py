"""Radial Biot-Savart operators for vortices and purely n-fold modes.

For a radial profile ``f`` and an integer ``n >= 1``

    V_{n,alpha}[f](R) = C_alpha int_0^inf I_{n,alpha}(R/S) f(S) S^(1-alpha) dS.

A vortex ``theta(R)`` has the purely angular velocity
``V_phi = -V_{1,alpha}[d theta/dR]`` and a mode ``W(R) e^{i n phi}`` has radial
velocity ``i n V_{n,alpha}[W](R)/R e^{i n phi}``.

The kernel behaves like ``|1 - sigma|^(1-alpha)`` (logarithmically for
alpha = 1) at ``S = R``.  All integrals below are product rules: panels that
touch the target are cut into geometrically shrinking sub-panels, which
integrates the singular factor to full accuracy without subtracting it
explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError
from .kernels import biot_savart_constant, i_kernel

__all__ = [
    "RadialGrid",
    "RadialField",
    "build_radial_grid",
    "lagrange_weights",
    "apply_V_n_alpha",
    "vortex_velocity",
    "radial_velocity_mode",
    "near_origin_rate",
    "nystrom_matrix",
]

_GRADE_LEVELS = 18
_GRADE_RATIO = 0.3


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radial nodes with positive trapezoid weights."""

    nodes: np.ndarray
    weights: np.ndarray = field(repr=False)
    layers: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        x = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if x.ndim != 1 or x.size < 8:
            raise DomainError("a radial grid needs at least 8 nodes")
        if x[0] <= 0 or np.any(np.diff(x) <= 0):
            raise DomainError("grid nodes must be positive and strictly increasing")
        if w.shape != x.shape or np.any(w <= 0):
            raise DomainError("grid weights must be positive and match the nodes")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    @property
    def N(self) -> int:
        return self.nodes.size

    @property
    def R_min(self) -> float:
        return float(self.nodes[0])

    @property
    def R_max(self) -> float:
        return float(self.nodes[-1])

    def norm(self, values) -> float:
        """Discrete ``L^2(R dR)`` norm."""
        v = np.asarray(values)
        return float(np.sqrt(np.sum(self.weights * self.nodes * np.abs(v) ** 2)))


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    h = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def build_radial_grid(theta_bar, nodes: int = 400, R_min: float | None = None,
                      R_max: float | None = None, layer_share: float = 0.7) -> RadialGrid:
    """Grid on ``[R_min, R_max]`` refined in the layers of a smooth vortex.

    The node density is a blend of a log-uniform background and smooth
    plateaus over ``[r_j - 1.25 eps, r_j + 1.25 eps]``; ``layer_share`` of the
    nodes go to the plateaus.  Nodes are placed by inverting the cumulative
    density, so spacing varies smoothly, which the finite difference stencils
    of the self-similar operator rely on.
    """
    (a1, b1), (a2, b2) = theta_bar.support
    eps = theta_bar.eps
    r1, r2 = theta_bar.vortex.radii
    R_min = r1 / 20.0 if R_min is None else float(R_min)
    R_max = r2 + 2.0 * eps if R_max is None else float(R_max)
    if not 0 < R_min < a1 - eps or R_max < b2 + eps - 1e-12:
        raise DomainError("grid must cover [r1 - 2 eps, r2 + 2 eps] with R_min > 0")
    if not 0.0 <= layer_share < 1.0:
        raise DomainError("layer_share must lie in [0, 1)")
    mesh = np.unique(np.concatenate([
        np.geomspace(R_min, R_max, 20001),
        np.linspace(a1 - eps, b1 + eps, 4001),
        np.linspace(a2 - eps, b2 + eps, 4001),
    ]))
    base = 1.0 / mesh
    base /= np.trapezoid(base, mesh)
    plateau = np.zeros_like(mesh)
    width = 0.15 * eps
    for rj in (r1, r2):
        d = np.abs(mesh - rj) - 1.25 * eps
        plateau += 0.5 * (1.0 - np.tanh(d / width))
    plateau /= np.trapezoid(plateau, mesh)
    dens = (1.0 - layer_share) * base + layer_share * plateau
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(mesh))])
    cdf /= cdf[-1]
    x = np.interp(np.linspace(0.0, 1.0, nodes), cdf, mesh)
    x[0], x[-1] = R_min, R_max
    return RadialGrid(x, _trapezoid_weights(x), layers=tuple(theta_bar.support))


# --------------------------------------------------------------------------- interpolation


def _stencil_start(N: int, interval: np.ndarray, degree: int) -> np.ndarray:
    return np.clip(interval - (degree - 1) // 2, 0, N - degree - 1)


def lagrange_weights(nodes: np.ndarray, t, degree: int = 5,
                     interval: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Local Lagrange interpolation of degree ``degree`` at points ``t``.

    Returns ``(idx, w)`` of shape ``(len(t), degree+1)`` so that
    ``f(t) ~ sum(w * f[idx], axis=1)``.  The stencil is centred on the node
    interval containing ``t`` (or the one given in ``interval``).
    """
    x = np.asarray(nodes, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    N = x.size
    if N < degree + 1:
        raise DomainError(f"need at least {degree + 1} nodes for degree {degree}")
    if interval is None:
        interval = np.clip(np.searchsorted(x, t, side="right") - 1, 0, N - 2)
    start = _stencil_start(N, np.asarray(interval), degree)
    idx = start[:, None] + np.arange(degree + 1)[None, :]
    xs = x[idx]
    w = np.ones(idx.shape)
    for j in range(degree + 1):
        for k in range(degree + 1):
            if k != j:
                w[:, j] *= (t - xs[:, k]) / (xs[:, j] - xs[:, k])
    return idx, w


@dataclass(frozen=True)
class RadialField:
    """Samples of a complex radial profile with local Lagrange interpolation.

    With ``compact=True`` the profile is taken to vanish outside the node range,
    otherwise evaluation there is an error.
    """

    nodes: np.ndarray
    values: np.ndarray
    degree: int = 5
    compact: bool = True

    def __post_init__(self) -> None:
        x = np.asarray(self.nodes, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.shape != v.shape or x.ndim != 1:
            raise DomainError("nodes and values must be 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise DomainError("nodes must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("field samples must be finite")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "values", v)

    @property
    def support(self) -> tuple[float, float]:
        return (float(self.nodes[0]), float(self.nodes[-1]))

    def __call__(self, R):
        R = np.asarray(R, dtype=float)
        flat = np.atleast_1d(R).ravel()
        lo, hi = self.support
        inside = (flat >= lo) & (flat <= hi)
        if not self.compact and not np.all(inside):
            raise DomainError("evaluation outside the sampled range of a non-compact field")
        out = np.zeros(flat.shape, dtype=complex)
        if np.any(inside):
            idx, w = lagrange_weights(self.nodes, flat[inside], self.degree)
            out[inside] = np.sum(w * self.values[idx], axis=1)
        return out.reshape(R.shape) if R.ndim else out[0]


# --------------------------------------------------------------------------- quadrature


@lru_cache(maxsize=None)
def _gl(points: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(points)


@lru_cache(maxsize=None)
def _graded_fractions(levels: int, ratio: float) -> np.ndarray:
    """Panel edges on [0, 1] shrinking geometrically toward 0."""
    return np.concatenate([[1.0], ratio ** np.arange(1, levels + 1), [0.0]])[::-1]


def _panels(a, b, points: int):
    g, gw = _gl(points)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * g, np.abs(half) * gw


def _graded(a, b, points: int):
    """Rules on ``[a, b]`` graded toward ``a`` (``a`` may exceed ``b``)."""
    frac = _graded_fractions(_GRADE_LEVELS, _GRADE_RATIO)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    edges = a + (b - a) * frac
    s, w = _panels(edges[..., :-1], edges[..., 1:], points)
    return s.reshape(*s.shape[:-2], -1), w.reshape(*w.shape[:-2], -1)


def _source_rule(breaks: np.ndarray, R: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule over ``[breaks[0], breaks[-1]]`` graded toward ``R``."""
    lo, hi = breaks[0], breaks[-1]
    if lo < R < hi and not np.any(breaks == R):
        breaks = np.sort(np.append(breaks, R))
    a, b = breaks[:-1], breaks[1:]
    touch_left = a == R
    touch_right = b == R
    plain = ~(touch_left | touch_right)
    s0, w0 = _panels(a[plain], b[plain], points)
    parts_s, parts_w = [s0.ravel()], [w0.ravel()]
    if np.any(touch_left):
        s, w = _graded(a[touch_left], b[touch_left], points)
        parts_s.append(s.ravel())
        parts_w.append(w.ravel())
    if np.any(touch_right):
        s, w = _graded(b[touch_right], a[touch_right], points)
        parts_s.append(s.ravel())
        parts_w.append(w.ravel())
    return np.concatenate(parts_s), np.concatenate(parts_w)


def _kernel_values(n: int, alpha: float, sigma: np.ndarray) -> np.ndarray:
    """``I_{|n|,alpha}`` with the symmetric extension to negative ``n``."""
    m = abs(int(n))
    if m == 0:
        raise DomainError("V_{0,alpha} is not used: mode 0 carries no radial velocity")
    if alpha >= 1.0:
        # graded nodes may round onto the target; the singularity is integrable
        sigma = np.where(sigma == 1.0, np.nextafter(1.0, 2.0), sigma)
    return i_kernel(m, alpha, sigma)


def apply_V_n_alpha(f, n: int, alpha: float, R, *, support: tuple[float, float] | None = None,
                    breaks=None, panels: int = 64, points: int = 10):
    """``V_{n,alpha}[f](R)`` by graded product quadrature.

    ``f`` is a :class:`RadialField` (its nodes become panel breaks) or a
    callable together with ``support`` and optionally explicit ``breaks``.
    Vectorised over ``R``; returns a complex array of the same shape.
    """
    if not 0.0 <= alpha < 2.0:
        raise DomainError(f"alpha must satisfy 0 <= alpha < 2, got {alpha}")
    if isinstance(f, RadialField):
        func: Callable = f
        br = f.nodes
    else:
        if breaks is not None:
            br = np.asarray(breaks, dtype=float)
        elif support is not None:
            br = np.linspace(support[0], support[1], panels + 1)
        else:
            raise DomainError("a callable profile needs its support or explicit breaks")
        func = f
    if br[0] <= 0:
        raise DomainError("the source support must lie in R > 0")
    R = np.asarray(R, dtype=float)
    flat = np.atleast_1d(R).ravel()
    if np.any(flat <= 0):
        raise DomainError("V_{n,alpha} is evaluated for R > 0")
    c = biot_savart_constant(alpha)
    out = np.empty(flat.shape, dtype=complex)
    for i, r in enumerate(flat):
        s, w = _source_rule(br, r, points)
        out[i] = c * np.sum(w * _kernel_values(n, alpha, r / s) * s ** (1.0 - alpha) * func(s))
    return out.reshape(R.shape) if R.ndim else out[0]


def vortex_velocity(theta_bar, alpha: float, R, per_layer: int = 32) -> RadialField:
    """Angular velocity ``V_phi = -V_{1,alpha}[d theta/dR]`` of a smooth vortex.

    ``theta_bar`` is a smooth vortex exposing ``dprofile`` and ``support``;
    the result is sampled at the radii ``R``.
    """
    R = np.asarray(R, dtype=float)
    total = np.zeros(R.shape, dtype=complex)
    for a, b in theta_bar.support:
        br = np.linspace(a, b, per_layer + 1)
        total += apply_V_n_alpha(theta_bar.dprofile, 1, alpha, R, breaks=br)
    return RadialField(R, -total.real, compact=False)


def radial_velocity_mode(W, n: int, alpha: float, R, **kw):
    """``i n V_{n,alpha}[W](R) / R``; the factor ``e^{i n phi}`` is left to the caller."""
    R = np.asarray(R, dtype=float)
    return 1j * n * apply_V_n_alpha(W, n, alpha, R, **kw) / R


def near_origin_rate(theta_bar, alpha: float, per_layer: int = 64, points: int = 10) -> float:
    """``C = lim_{R -> 0} V_phi(R)/R``.

    For ``R`` below the support ``I_{1,alpha}(sigma) = kappa sigma + O(sigma^3)``
    with ``kappa = lim I_{1,alpha}(sigma)/sigma``, so
    ``C = -C_alpha kappa int d theta/dS S^(-alpha) dS``.
    """
    h = 1e-4
    # odd expansion: Richardson on sigma and 2 sigma removes the sigma^2 term
    k1 = float(i_kernel(1, alpha, h)) / h
    k2 = float(i_kernel(1, alpha, 2 * h)) / (2 * h)
    kappa = (4.0 * k1 - k2) / 3.0
    total = 0.0
    for a, b in theta_bar.support:
        s, w = _panels(np.linspace(a, b, per_layer + 1)[:-1], np.linspace(a, b, per_layer + 1)[1:], points)
        s, w = s.ravel(), w.ravel()
        total += float(np.sum(w * theta_bar.dprofile(s) * s ** (-alpha)))
    return -biot_savart_constant(alpha) * kappa * total


# --------------------------------------------------------------------------- Nystrom block


def _interval_weights(x: np.ndarray, degree: int, points: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Per-interval weights of the composite rule built from local interpolation.

    Returns ``(idx, w)`` of shape ``(N-1, degree+1)``: ``int_{x_m}^{x_{m+1}} g``
    is approximated by ``sum(w[m] * g[idx[m]])``.
    """
    m = np.arange(x.size - 1)
    s, ws = _panels(x[:-1], x[1:], points)
    idx, lw = lagrange_weights(x, s.ravel(), degree, interval=np.repeat(m, points))
    lw = lw.reshape(m.size, points, degree + 1)
    return idx.reshape(m.size, points, degree + 1)[:, 0, :], np.einsum("mq,mql->ml", ws, lw)


def nystrom_matrix(nodes, n: int, alpha: float, rows, degree: int = 5, near: int = 6,
                   points: int = 12) -> np.ndarray:
    """Matrix ``M`` with ``V_{n,alpha}[W](x_i) ~ (M @ W)_i`` for ``i in rows``.

    ``W`` is represented by its samples on ``nodes`` and local Lagrange
    interpolation of the given degree, vanishing outside the node range.
    Intervals within ``near`` of the target are integrated with sub-panels
    (graded on the two intervals touching it); the rest use node values
    weighted by the interpolatory composite rule.
    """
    x = np.asarray(nodes, dtype=float)
    rows = np.asarray(rows, dtype=int)
    N = x.size
    c = biot_savart_constant(alpha)
    idx, wm = _interval_weights(x, degree)
    # dense interval-to-node weights, (N-1, N)
    Wm = np.zeros((N - 1, N))
    np.put_along_axis(Wm, idx, wm, axis=1)
    m = np.arange(N - 1)
    far = (m[None, :] < rows[:, None] - near - 1) | (m[None, :] > rows[:, None] + near)
    F = far.astype(float) @ Wm
    R = x[rows]
    sig = R[:, None] / x[None, :]
    diag = rows[:, None] == np.arange(N)[None, :]
    sig = np.where(diag, 0.5, sig)  # placeholder, weight is structurally zero
    K = _kernel_values(n, alpha, sig) * x[None, :] ** (1.0 - alpha)
    M = np.where(diag, 0.0, F * K)

    # near field: intervals m with rows-near-1 <= m <= rows+near
    offs = np.arange(-near - 1, near + 1)
    mm = rows[:, None] + offs[None, :]
    valid = (mm >= 0) & (mm <= N - 2)
    mm_c = np.clip(mm, 0, N - 2)
    a, b = x[mm_c], x[mm_c + 1]
    left_touch = (offs == 0)[None, :] & valid      # [x_i, x_{i+1}] graded toward a
    right_touch = (offs == -1)[None, :] & valid    # [x_{i-1}, x_i] graded toward b
    plain = valid & ~left_touch & ~right_touch
    for mask, kind in ((plain, "plain"), (left_touch, "left"), (right_touch, "right")):
        ri, oi = np.nonzero(mask)
        if ri.size == 0:
            continue
        aa, bb = a[ri, oi], b[ri, oi]
        if kind == "plain":
            s, w = _panels(aa, bb, points)
        elif kind == "left":
            s, w = _graded(aa, bb, points)
        else:
            s, w = _graded(bb, aa, points)
        Q = s.shape[1]
        interval = np.repeat(mm_c[ri, oi], Q)
        li, lw = lagrange_weights(x, s.ravel(), degree, interval=interval)
        kv = _kernel_values(n, alpha, np.repeat(R[ri], Q) / s.ravel()) * s.ravel() ** (1.0 - alpha)
        contrib = (w.ravel() * kv)[:, None] * lw
        np.add.at(M, (np.repeat(ri, Q)[:, None], li), contrib)
    return c * M
