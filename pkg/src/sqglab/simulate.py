"""Pseudo-spectral alpha-SQG solver on a periodic square.

The scalar is advanced in the form

    d_tau Theta = -V.grad Theta + F,    V_hat = -i k_perp |k|^(alpha-2) Theta_hat,

with ``k_perp = (-k_y, k_x)``, classical RK4 in time and the 2/3 rule.  The
Fourier coefficients are kept inside the dealiased band at all times, which
makes the semi-discrete flow conserve the Hamiltonian
``H = 1/2 sum |k|^(alpha-2) |Theta_hat|^2`` and ``E_2`` exactly when ``F = 0``.

Fields are stored as ``rfft2`` arrays of real ``N x N`` samples indexed
``[i, j] = (x_i, y_j)`` with ``x_i = -L/2 + i L/N``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import DomainError, ResolutionError, SqglabError
from .radial_ops import RadialField
from .selfsimilar import GolovkinForce, golovkin_force, vishik_force, to_selfsimilar

__all__ = [
    "SpectralGrid",
    "SpectralState",
    "StepWork",
    "DiagnosticSeries",
    "GrowthRun",
    "GolovkinRun",
    "CFLError",
    "biot_savart_spectral",
    "step_rk4",
    "diagnostics",
    "radial_state",
    "mode_state",
    "offfamily_energy",
    "angular_mode_energies",
    "run_linear_growth",
    "run_golovkin_pair",
    "run_vishik_physical",
    "write_svg",
]


class CFLError(SqglabError):
    """The time step violates ``dt <= 0.5 dx / max|V|``."""


@dataclass(frozen=True)
class SpectralGrid:
    """Wavenumbers, dealias mask and optional filter for an ``N x N`` box."""

    N: int
    L: float
    alpha: float
    filtered: bool = False
    kx: np.ndarray = field(init=False, repr=False)
    ky: np.ndarray = field(init=False, repr=False)
    k2: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)
    ham: np.ndarray = field(init=False, repr=False)
    weight: np.ndarray = field(init=False, repr=False)
    filter: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        N = int(self.N)
        if N < 16 or N & (N - 1):
            raise DomainError(f"N must be a power of two >= 16, got {self.N}")
        if not self.L > 0:
            raise DomainError("box side must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        mx = np.fft.fftfreq(N, 1.0 / N)
        my = np.fft.rfftfreq(N, 1.0 / N)
        unit = 2.0 * np.pi / self.L
        kx = (unit * mx)[:, None] * np.ones((1, my.size))
        ky = np.ones((N, 1)) * (unit * my)[None, :]
        k2 = kx**2 + ky**2
        mask = (np.abs(mx)[:, None] < N / 3.0) & (np.abs(my)[None, :] < N / 3.0)
        ham = np.zeros_like(k2)
        nz = k2 > 0
        ham[nz] = k2[nz] ** ((self.alpha - 2.0) / 2.0)
        # rfft2 stores half the lattice: interior columns stand for two modes
        weight = np.full(k2.shape, 2.0)
        weight[:, 0] = 1.0
        weight[:, -1] = 1.0
        kappa = np.sqrt(k2) / (unit * N / 3.0)
        filt = np.where(kappa > 0.8, np.exp(-36.0 * ((kappa - 0.8) / 0.2) ** 4), 1.0)
        for name, val in (("kx", kx), ("ky", ky), ("k2", k2), ("mask", mask), ("ham", ham),
                          ("weight", weight), ("filter", filt)):
            object.__setattr__(self, name, val)

    @property
    def dx(self) -> float:
        return self.L / self.N

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        x = -0.5 * self.L + self.dx * np.arange(self.N)
        return np.meshgrid(x, x, indexing="ij")

    def forward(self, values: np.ndarray) -> np.ndarray:
        """Real samples to masked coefficients with zero mean."""
        h = np.fft.rfft2(values) * self.mask
        h[0, 0] = 0.0
        return h

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.irfft2(coeffs, s=(self.N, self.N))

    def inner(self, a: np.ndarray, b: np.ndarray, multiplier=None) -> float:
        """``int f g dx`` from coefficients, optionally through a Fourier multiplier."""
        prod = (a * np.conj(b)).real * self.weight
        if multiplier is not None:
            prod = prod * multiplier
        return float(np.sum(prod) * self.L**2 / self.N**4)


@dataclass(frozen=True)
class StepWork:
    """RK4-weighted forcing work of one step, paired with ``H`` and ``E_2``."""

    hamiltonian: float = 0.0
    e2: float = 0.0


@dataclass(frozen=True)
class SpectralState:
    grid: SpectralGrid
    theta_hat: np.ndarray = field(repr=False)
    tau: float = 0.0
    work: StepWork = StepWork()

    @property
    def N(self) -> int:
        return self.grid.N

    @property
    def L(self) -> float:
        return self.grid.L

    @property
    def mask(self) -> np.ndarray:
        return self.grid.mask

    def values(self) -> np.ndarray:
        return self.grid.inverse(self.theta_hat)

    def l2(self) -> float:
        return math.sqrt(self.grid.inner(self.theta_hat, self.theta_hat))


def biot_savart_spectral(state: SpectralState) -> tuple[np.ndarray, np.ndarray]:
    """Velocity coefficients ``(u_hat, v_hat)`` of ``V = -grad_perp Lambda^(alpha-2) Theta``."""
    g = state.grid
    psi = g.ham * state.theta_hat
    return 1j * g.ky * psi, -1j * g.kx * psi


def _advection(g: SpectralGrid, h: np.ndarray, velocity=None) -> tuple[np.ndarray, float]:
    if velocity is None:
        psi = g.ham * h
        u = g.inverse(1j * g.ky * psi)
        v = g.inverse(-1j * g.kx * psi)
    else:
        u, v = velocity
    tx = g.inverse(1j * g.kx * h)
    ty = g.inverse(1j * g.ky * h)
    out = np.fft.rfft2(u * tx + v * ty) * g.mask
    out[0, 0] = 0.0
    speed = float(np.sqrt(np.max(np.asarray(u) ** 2 + np.asarray(v) ** 2)))
    return out, speed


def step_rk4(state: SpectralState, forcing: Callable[[float], np.ndarray] | None, dt: float,
             *, velocity=None, cfl: float = 0.5) -> SpectralState:
    """One RK4 step; ``forcing(tau)`` returns masked force coefficients or ``None``.

    ``velocity`` overrides the Biot-Savart law with a prescribed field
    ``(u, v)`` (arrays or scalars).  Raises :class:`CFLError` when
    ``dt > cfl dx / max|V|`` at the start of the step.
    """
    g = state.grid
    t0 = state.tau
    h0 = state.theta_hat

    def rhs(h, t):
        adv, speed = _advection(g, h, velocity)
        f = forcing(t) if forcing is not None else None
        return (-adv if f is None else f - adv), f, speed

    k1, f1, speed = rhs(h0, t0)
    if speed > 0 and dt > cfl * g.dx / speed:
        raise CFLError(f"dt={dt:.3e} exceeds {cfl} dx/max|V| = {cfl * g.dx / speed:.3e} "
                       f"at tau={t0:.4f}")
    h2 = h0 + 0.5 * dt * k1
    k2, f2, _ = rhs(h2, t0 + 0.5 * dt)
    h3 = h0 + 0.5 * dt * k2
    k3, f3, _ = rhs(h3, t0 + 0.5 * dt)
    h4 = h0 + dt * k3
    k4, f4, _ = rhs(h4, t0 + dt)
    h = h0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    work = StepWork()
    if forcing is not None:
        stages = ((h0, f1, 1.0), (h2, f2, 2.0), (h3, f3, 2.0), (h4, f4, 1.0))
        wh = sum(c * g.inner(s, f, g.ham) for s, f, c in stages if f is not None)
        we = sum(c * g.inner(s, f) for s, f, c in stages if f is not None)
        work = StepWork(hamiltonian=dt / 6.0 * wh, e2=dt / 6.0 * we)
    if g.filtered:
        h = h * g.filter
    h = h * g.mask
    h[0, 0] = 0.0
    return SpectralState(grid=g, theta_hat=h, tau=t0 + dt, work=work)


@dataclass
class DiagnosticSeries:
    """Append-only per-step records."""

    columns: tuple[str, ...]
    rows: list[tuple[float, ...]] = field(default_factory=list)

    def append(self, **values: float) -> None:
        row = tuple(float(values[c]) for c in self.columns)
        if not all(math.isfinite(v) or math.isnan(v) for v in row):
            raise SqglabError(f"non-finite diagnostic {row}")
        if self.rows and row[0] < self.rows[-1][0]:
            raise SqglabError("time stamps must be monotone")
        self.rows.append(row)

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([repr(v) for v in r])


def diagnostics(state: SpectralState) -> dict[str, float]:
    """``L^2`` norm, ``H = 1/2 ||Theta||^2_{H^{(alpha-2)/2}}`` and ``E_q = ||Theta||_q^q / q``."""
    g = state.grid
    vals = state.values()
    cell = g.dx**2
    return {
        "tau": state.tau,
        "l2": state.l2(),
        "hamiltonian": 0.5 * g.inner(state.theta_hat, state.theta_hat, g.ham),
        "e2": 0.5 * float(np.sum(vals * vals)) * cell,
        "e4": 0.25 * float(np.sum(vals**4)) * cell,
    }


def radial_state(grid: SpectralGrid, profile: Callable, tau: float = 0.0) -> SpectralState:
    """Masked state sampled from a radial profile ``profile(R)``."""
    X, Y = grid.coords()
    vals = np.real(profile(np.hypot(X, Y)))
    return SpectralState(grid=grid, theta_hat=grid.forward(vals), tau=tau)


def _mode_values(grid: SpectralGrid, W: RadialField, n: int, phase: complex = 1.0) -> np.ndarray:
    X, Y = grid.coords()
    R = np.hypot(X, Y)
    return (phase * W(R) * np.exp(1j * n * np.arctan2(Y, X))).real


def mode_state(grid: SpectralGrid, W: RadialField, n: int, phase: complex = 1.0) -> SpectralState:
    """``Re(phase W(R) e^{i n phi})`` as a masked state."""
    return SpectralState(grid=grid, theta_hat=grid.forward(_mode_values(grid, W, n, phase)))


def offfamily_energy(state: SpectralState, n: int) -> float:
    """Relative energy of ``Theta - Theta o rot(2 pi/n)``; exact grid rotations only (n = 1, 2, 4)."""
    v = state.values()
    if n == 1:
        return 0.0
    if n == 2:
        rot = np.roll(v[::-1, ::-1], 1, axis=(0, 1))
    elif n == 4:
        rot = np.roll(v.T[::-1, :], 1, axis=0)
    else:
        raise DomainError("the square grid is only invariant under rotations by pi/2 multiples")
    total = float(np.sum(v * v))
    return float(np.sum((v - rot) ** 2)) / total if total > 0 else 0.0


def angular_mode_energies(state: SpectralState, radii, k_max: int = 16,
                          samples: int = 128) -> np.ndarray:
    """Energy per angular wavenumber ``0..k_max`` on circles, by exact trigonometric interpolation."""
    g = state.grid
    radii = np.asarray(radii, dtype=float)
    phi = 2.0 * np.pi * np.arange(samples) / samples
    px = (radii[:, None] * np.cos(phi)[None, :]).ravel() + 0.5 * g.L
    py = (radii[:, None] * np.sin(phi)[None, :]).ravel() + 0.5 * g.L
    h = state.theta_hat * g.weight
    # sum over kx of h e^{i kx x} for each point, then over ky
    ex = np.exp(1j * np.outer(px, g.kx[:, 0]))
    ey = np.exp(1j * np.outer(py, g.ky[0, :]))
    vals = np.einsum("pk,kl,pl->p", ex, h, ey).real / g.N**2
    coef = np.fft.rfft(vals.reshape(radii.size, samples), axis=1) / samples
    energy = np.sum(np.abs(coef[:, : k_max + 1]) ** 2 * radii[:, None], axis=0)
    return energy


def _choose_dt(state: SpectralState, span: float, dt: float | None, cfl: float = 0.4) -> tuple[float, int]:
    if dt is None:
        _, speed = _advection(state.grid, state.theta_hat)
        dt = min(cfl * state.grid.dx / max(speed, 1e-12), 0.02)
    steps = max(1, int(math.ceil(span / dt - 1e-9)))
    return span / steps, steps


def _fit_rate(tau: np.ndarray, dev: np.ndarray) -> float:
    if tau.size < 3:
        return float("nan")
    return float(np.polyfit(tau, np.log(dev), 1)[0])


@dataclass
class GrowthRun:
    series: DiagnosticSeries
    fit_rate: float
    fit_window: tuple[float, float]
    frequency: float
    dt: float
    filtered: bool


def run_linear_growth(theta_bar, W: RadialField, lam: complex, eps_amp: float, tau_span,
                      *, n: int, alpha: float, N: int = 256, L: float = 8.0,
                      dt: float | None = None, filtered: bool = False) -> GrowthRun:
    """Evolve ``Theta_bar + eps_amp Re(W e^{i n phi})`` and fit the deviation growth.

    The perturbation is scaled to unit ``L^2`` norm on the grid, so the
    deviation starts at ``eps_amp``.  The deviation is measured against an
    unperturbed reference run on the same grid, which removes the slow drift
    of the truncated vortex.  The growth rate is fitted where the deviation
    lies in ``[2 eps_amp, 0.1 ||Theta_bar||]``; ``frequency`` is the slope of the
    unwrapped phase of the deviation's projection on ``W e^{i n phi}``.
    """
    tau0, tau1 = map(float, tau_span)
    grid = SpectralGrid(N, L, alpha, filtered)
    base = radial_state(grid, theta_bar.profile, tau0)
    pert = mode_state(grid, W, n)
    scale = pert.l2()
    if scale == 0:
        raise DomainError("perturbation vanishes on the grid")
    norm_bar = base.l2()
    if eps_amp > 1e-3 * norm_bar:
        raise DomainError(f"eps_amp must not exceed 1e-3 ||Theta_bar|| = {1e-3 * norm_bar:.3e}")
    ref = base
    run = replace(base, theta_hat=base.theta_hat + eps_amp / scale * pert.theta_hat)
    # real and imaginary parts of Z = W e^{i n phi}; <Re(e^{lam tau} Z), Z> ~ e^{lam tau}
    z_re = grid.forward(_mode_values(grid, W, n, 1.0))
    z_im = grid.forward(_mode_values(grid, W, n, -1j))
    dt, steps = _choose_dt(base, tau1 - tau0, dt)
    cols = ("tau", "l2_dev", "hamiltonian", "e2", "e4", "fit_rate_running")
    series = DiagnosticSeries(cols)
    taus, devs, phases = [], [], []
    lo, hi = 2.0 * eps_amp, 0.1 * norm_bar
    for k in range(steps + 1):
        if k:
            run = step_rk4(run, None, dt)
            ref = step_rk4(ref, None, dt)
        d = run.theta_hat - ref.theta_hat
        dev = math.sqrt(grid.inner(d, d))
        phases.append(complex(grid.inner(d, z_re), -grid.inner(d, z_im)))
        diag = diagnostics(run)
        taus.append(run.tau)
        devs.append(dev)
        t_arr, d_arr = np.array(taus), np.array(devs)
        win = (d_arr >= lo) & (d_arr <= hi)
        rate = _fit_rate(t_arr[win], d_arr[win]) if win.sum() >= 3 else float("nan")
        series.append(tau=run.tau, l2_dev=dev, hamiltonian=diag["hamiltonian"], e2=diag["e2"],
                      e4=diag["e4"], fit_rate_running=rate)
    t_arr, d_arr = np.array(taus), np.array(devs)
    win = (d_arr >= lo) & (d_arr <= hi)
    if win.sum() < 3:
        raise SqglabError("fit window is empty: the deviation never enters "
                          f"[{lo:.3e}, {hi:.3e}]")
    rate = _fit_rate(t_arr[win], d_arr[win])
    ph = np.unwrap(np.angle(np.array(phases)[win]))
    freq = float(np.polyfit(t_arr[win], ph, 1)[0])
    return GrowthRun(series=series, fit_rate=rate, fit_window=(float(t_arr[win][0]),
                     float(t_arr[win][-1])), frequency=freq, dt=dt, filtered=filtered)


@dataclass
class GolovkinRun:
    plus: DiagnosticSeries
    minus: DiagnosticSeries
    relative_error: np.ndarray
    difference_rate: float
    hamiltonian_residual: tuple[float, float]
    dt: float


def _grid_force(force: GolovkinForce, grid: SpectralGrid):
    """Precompute the radial pieces of ``G`` on the grid; returns ``tau -> coefficients``."""
    X, Y = grid.coords()
    R = np.hypot(X, Y)
    e2 = np.exp(2j * force.n * np.arctan2(Y, X))
    base = force.base(R)
    q0 = force._radial(force.q0, R).real
    q2 = force._radial(force.q2, R) * e2
    lam = force.lam

    def coeffs(tau: float) -> np.ndarray:
        vals = base + math.exp(2.0 * lam.real * tau) * q0 + (np.exp(2.0 * lam * tau) * q2).real
        return grid.forward(vals)

    return coeffs


def run_golovkin_pair(theta_bar, W: RadialField, lam: complex, n: int, a: float, b: float,
                      alpha: float, tau0: float, tau1: float, *, N: int = 256, L: float = 8.0,
                      dt: float | None = None, filtered: bool = False) -> GolovkinRun:
    """Evolve ``Theta_bar +- Theta_lin(tau0)`` under the shared force ``G``.

    In the plane both branches are exact solutions, so ``Theta_+ - Theta_-``
    equals ``2 Theta_lin(tau)``; the run reports the relative mismatch on the
    grid, the fitted growth rate of the difference and, per branch, the
    largest per-step residual of the discrete Hamiltonian balance relative
    to ``|H|``.  The self-similar drift term is not periodic, so on the box
    only ``b = 0`` is supported.
    """
    if b != 0:
        raise DomainError("the self-similar drift is not periodic; use b = 0 on the box "
                          "(see run_vishik_physical for b > 0)")
    grid = SpectralGrid(N, L, alpha, filtered)
    force = golovkin_force(theta_bar, W, lam, n, a, b, alpha)
    G = _grid_force(force, grid)
    bar = radial_state(grid, theta_bar.profile, tau0)

    def lin(tau):
        return mode_state(grid, W, n, complex(np.exp(lam * tau))).theta_hat

    plus = replace(bar, theta_hat=bar.theta_hat + lin(tau0))
    minus = replace(bar, theta_hat=bar.theta_hat - lin(tau0))
    if dt is None:
        # the linear part grows, so take the step from the faster end state
        late = replace(bar, theta_hat=bar.theta_hat + lin(tau1))
        dt = min(_choose_dt(plus, tau1 - tau0, None)[0], _choose_dt(late, tau1 - tau0, None)[0])
    dt, steps = _choose_dt(plus, tau1 - tau0, dt)
    cols = ("tau", "l2_dev", "hamiltonian", "e2", "e4", "hamiltonian_residual")
    s_plus, s_minus = DiagnosticSeries(cols), DiagnosticSeries(cols)
    rel, taus, diffs = [], [], []
    worst = [0.0, 0.0]
    for k in range(steps + 1):
        if k:
            new = []
            for i, st in enumerate((plus, minus)):
                h_old = 0.5 * grid.inner(st.theta_hat, st.theta_hat, grid.ham)
                nxt = step_rk4(st, G, dt)
                h_new = 0.5 * grid.inner(nxt.theta_hat, nxt.theta_hat, grid.ham)
                res = abs(h_new - h_old - nxt.work.hamiltonian) / abs(h_new)
                worst[i] = max(worst[i], res)
                new.append((nxt, res))
            (plus, rp), (minus, rm) = new
        else:
            rp = rm = 0.0
        target = 2.0 * lin(plus.tau)
        d = plus.theta_hat - minus.theta_hat
        err = d - target
        tnorm = math.sqrt(grid.inner(target, target))
        rel.append(math.sqrt(grid.inner(err, err)) / tnorm)
        taus.append(plus.tau)
        diffs.append(math.sqrt(grid.inner(d, d)))
        for st, series, res in ((plus, s_plus, rp), (minus, s_minus, rm)):
            dv = st.theta_hat - bar.theta_hat
            diag = diagnostics(st)
            series.append(tau=st.tau, l2_dev=math.sqrt(grid.inner(dv, dv)),
                          hamiltonian=diag["hamiltonian"], e2=diag["e2"], e4=diag["e4"],
                          hamiltonian_residual=res)
    rate = _fit_rate(np.array(taus), np.array(diffs))
    return GolovkinRun(plus=s_plus, minus=s_minus, relative_error=np.array(rel),
                       difference_rate=rate, hamiltonian_residual=(worst[0], worst[1]), dt=dt)


def run_vishik_physical(theta_bar, a: float, b: float, alpha: float, k: float, t1: float,
                        *, N: int = 256, L: float = 8.0, steps: int = 400) -> DiagnosticSeries:
    """Physical-time run of the self-similar vortex under the Vishik force.

    Starts at ``t_k = e^{-abk}`` from ``theta = (abt)^(alpha/a-1) Theta_bar(x/(abt)^(1/a))``
    and forces with ``f = (abt)^(alpha/a-2) F(x/(abt)^(1/a))``.  The exact
    solution stays self-similar; column ``l2_dev`` is the relative distance
    to it.
    """
    if b <= 0:
        raise DomainError("the Vishik force needs b > 0")
    t0 = math.exp(-a * b * k)
    if not t1 > t0:
        raise DomainError(f"t1 must exceed t_k = {t0:.4g}")
    grid = SpectralGrid(N, L, alpha)
    X, Y = grid.coords()
    R = np.hypot(X, Y)
    F = vishik_force(theta_bar, a, b, alpha, np.linspace(0.0, 4.0, 4001))

    def exact(t):
        _, Rs = to_selfsimilar(t, R, a, b)
        return grid.forward((a * b * t) ** (alpha / a - 1.0) * theta_bar.profile(Rs))

    def force(t):
        _, Rs = to_selfsimilar(t, R, a, b)
        return grid.forward((a * b * t) ** (alpha / a - 2.0) * F(Rs))

    state = SpectralState(grid=grid, theta_hat=exact(t0), tau=t0)
    dt = (t1 - t0) / steps
    series = DiagnosticSeries(("tau", "l2_dev", "hamiltonian", "e2", "e4"))
    for j in range(steps + 1):
        if j:
            state = step_rk4(state, force, dt)
        ex = exact(state.tau)
        d = state.theta_hat - ex
        diag = diagnostics(state)
        series.append(tau=state.tau, l2_dev=math.sqrt(grid.inner(d, d) / grid.inner(ex, ex)),
                      hamiltonian=diag["hamiltonian"], e2=diag["e2"], e4=diag["e4"])
    return series


def write_svg(path, x, y, *, title: str = "", xlabel: str = "tau", ylabel: str = "",
              log: bool = True, width: int = 640, height: int = 400) -> None:
    """Self-contained SVG line chart of ``y`` (log10 if ``log``) against ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y) & ((y > 0) if log else True)
    x, y = x[keep], y[keep]
    if log:
        y = np.log10(y)
    if x.size < 2:
        raise DomainError("need at least two finite points to plot")
    pad = 50
    x0, x1 = float(x.min()), float(x.max())
    y0, y1 = float(y.min()), float(y.max())
    if y1 == y0:
        y1 = y0 + 1.0
    px = pad + (x - x0) / (x1 - x0) * (width - 2 * pad)
    py = height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    ylab = f"log10 {ylabel}" if log else ylabel
    svg = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<polyline fill="none" stroke="#1f5fa8" stroke-width="1.5" points="{pts}"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="13">{xlabel}</text>',
        f'<text x="14" y="{height / 2}" font-size="13" transform="rotate(-90 14 {height / 2})" '
        f'text-anchor="middle">{ylab}</text>',
        f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="11">{x0:.3g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" font-size="11" text-anchor="end">{x1:.3g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" font-size="11" text-anchor="end">{y0:.3g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" font-size="11" text-anchor="end">{y1:.3g}</text>',
        "</svg>",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(svg) + "\n")
