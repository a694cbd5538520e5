from __future__ import annotations

import math

import numpy as np
import pytest

from sqglab.eigen import solve_mode
from sqglab.errors import DomainError, SqglabError
from sqglab.radial_ops import RadialField
from sqglab.simulate import (
    CFLError,
    DiagnosticSeries,
    SpectralGrid,
    SpectralState,
    angular_mode_energies,
    biot_savart_spectral,
    diagnostics,
    mode_state,
    offfamily_energy,
    radial_state,
    run_golovkin_pair,
    run_linear_growth,
    run_vishik_physical,
    step_rk4,
    write_svg,
)


def state_from(grid, vals, tau=0.0):
    return SpectralState(grid=grid, theta_hat=grid.forward(vals), tau=tau)


def smooth_field(grid):
    X, Y = grid.coords()
    return np.exp(-((X - 0.3) ** 2 + Y**2) / 0.4) - np.exp(-((X + 0.2) ** 2 + (Y - 0.4) ** 2) / 0.3) \
        + 0.4 * np.cos(2 * np.pi * X / grid.L) * np.sin(4 * np.pi * Y / grid.L)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
def test_single_mode_velocity(alpha):
    g = SpectralGrid(32, 2 * np.pi, alpha)
    X, Y = g.coords()
    m = 3
    st = state_from(g, np.cos(m * X))
    u, v = (g.inverse(c) for c in biot_savart_spectral(st))
    # psi = m^(alpha-2) cos(m x), V = (d_y psi, -d_x psi)
    assert np.max(np.abs(u)) < 1e-13
    assert np.allclose(v, m ** (alpha - 1) * np.sin(m * X), atol=1e-13)


def test_velocity_divergence_free_and_real():
    g = SpectralGrid(64, 8.0, 0.5)
    st = state_from(g, smooth_field(g))
    uh, vh = biot_savart_spectral(st)
    assert np.max(np.abs(g.kx * uh + g.ky * vh)) < 1e-12 * np.max(np.abs(uh))
    u = g.inverse(uh)
    assert np.allclose(np.fft.rfft2(u), uh, atol=1e-10)


def test_euler_multiplier_is_inverse_laplacian():
    g = SpectralGrid(32, 8.0, 0.0)
    nz = g.k2 > 0
    assert np.allclose(g.ham[nz] * g.k2[nz], 1.0)
    assert g.ham[0, 0] == 0


def test_grid_validation():
    with pytest.raises(DomainError):
        SpectralGrid(48, 8.0, 0.5)
    with pytest.raises(DomainError):
        SpectralGrid(64, 8.0, 1.5)
    with pytest.raises(DomainError):
        SpectralGrid(64, -1.0, 0.5)


def translate(m, dt, T=1.0):
    g = SpectralGrid(32, 2 * np.pi, 0.0)
    X, Y = g.coords()
    st = state_from(g, np.sin(m * X + 2 * Y))
    u0, v0 = 1.0, -0.5
    for _ in range(int(round(T / dt))):
        st = step_rk4(st, None, dt, velocity=(u0, v0))
    exact = np.sin(m * (X - u0 * T) + 2 * (Y - v0 * T))
    return np.max(np.abs(st.values() - exact))


def test_constant_velocity_translation():
    assert translate(1, 0.005) < 1e-10


def test_rk4_fourth_order():
    e1, e2 = translate(4, 0.02), translate(4, 0.01)
    assert math.log2(e1 / e2) == pytest.approx(4.0, abs=0.15)


def test_radial_field_is_steady():
    g = SpectralGrid(64, 8.0, 0.5)
    w = 0.5
    st = radial_state(g, lambda R: (1 - R**2 / w**2) * np.exp(-R**2 / w**2))
    v0 = st.values()
    for _ in range(50):
        st = step_rk4(st, None, 0.02)
    assert np.max(np.abs(st.values() - v0)) <= 1e-6


@pytest.mark.parametrize("alpha", [0.0, 1.0])
def test_unforced_invariants(alpha):
    g = SpectralGrid(64, 8.0, alpha)
    st = state_from(g, smooth_field(g))
    d0 = diagnostics(st)
    for _ in range(40):
        st = step_rk4(st, None, 0.01)
    d1 = diagnostics(st)
    assert abs(d1["hamiltonian"] - d0["hamiltonian"]) < 1e-9 * d0["hamiltonian"]
    assert abs(d1["e2"] - d0["e2"]) < 1e-6 * d0["e2"]


def test_forced_energy_balance():
    g = SpectralGrid(64, 8.0, 0.5)
    X, Y = g.coords()
    fhat = g.forward(np.exp(-(X**2 + Y**2)) * np.cos(X))
    st = state_from(g, smooth_field(g))
    worst = 0.0
    for _ in range(20):
        h0 = 0.5 * g.inner(st.theta_hat, st.theta_hat, g.ham)
        st = step_rk4(st, lambda t: fhat * math.cos(t), 0.01)
        h1 = 0.5 * g.inner(st.theta_hat, st.theta_hat, g.ham)
        worst = max(worst, abs(h1 - h0 - st.work.hamiltonian) / abs(h1))
    assert worst < 1e-9


def test_mask_and_zero_mean_kept():
    g = SpectralGrid(32, 8.0, 0.5, filtered=True)
    st = state_from(g, smooth_field(g) + 3.0)
    st = step_rk4(st, None, 0.01)
    assert st.theta_hat[0, 0] == 0
    assert np.all(st.theta_hat[~g.mask] == 0)


def test_cfl_guard():
    g = SpectralGrid(32, 2 * np.pi, 0.0)
    st = state_from(g, smooth_field(g))
    with pytest.raises(CFLError):
        step_rk4(st, None, 1.0, velocity=(5.0, 0.0))


def two_fold_field():
    x = np.linspace(0.05, 3.0, 300)
    return RadialField(x, x**2 * np.exp(-(x - 1.0) ** 2 / 0.1) * (1 + 0.5j))


@pytest.mark.parametrize("n", [2, 4])
def test_offfamily_energy_of_symmetric_modes(n):
    g = SpectralGrid(64, 8.0, 0.5)
    st = mode_state(g, two_fold_field(), n)
    assert offfamily_energy(st, n) <= 1e-10
    assert offfamily_energy(mode_state(g, two_fold_field(), 1), 2) > 0.5
    with pytest.raises(DomainError):
        offfamily_energy(st, 3)


def test_angular_mode_energies_concentrate():
    g = SpectralGrid(64, 8.0, 0.5)
    e = angular_mode_energies(mode_state(g, two_fold_field(), 3), [0.8, 1.0, 1.2], k_max=8)
    assert np.argmax(e) == 3
    assert (e.sum() - e[3]) < 1e-6 * e[3]


def test_diagnostic_series(tmp_path):
    s = DiagnosticSeries(("tau", "x"))
    s.append(tau=0.0, x=1.0)
    s.append(tau=0.5, x=0.1)
    with pytest.raises(SqglabError):
        s.append(tau=0.2, x=1.0)
    with pytest.raises(SqglabError):
        s.append(tau=1.0, x=math.inf)
    s.to_csv(tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text() == "tau,x\n0.0,1.0\n0.5,0.1\n"
    write_svg(tmp_path / "p.svg", s.column("tau"), s.column("x"))
    assert (tmp_path / "p.svg").read_text().startswith("<svg")


@pytest.fixture(scope="module")
def euler_mode(box_vortex):
    return solve_mode(box_vortex, 2, 0.0)


def test_deviation_is_linear_in_amplitude(box_vortex, euler_mode):
    """Coarse grid: the deviation from the reference run scales with the amplitude."""
    sol = euler_mode
    runs = [run_linear_growth(box_vortex, sol.W, sol.lambda_b, e, (0, 6), n=2, alpha=0.0, N=64)
            for e in (1e-5, 2e-5)]
    d1, d2 = (r.series.column("l2_dev") for r in runs)
    assert np.max(np.abs(d2 / d1 - 2)) < 1e-6
    assert runs[0].fit_rate == pytest.approx(runs[1].fit_rate, rel=1e-6)


def test_growth_amplitude_guard(box_vortex, euler_mode):
    with pytest.raises(DomainError):
        run_linear_growth(box_vortex, euler_mode.W, euler_mode.lambda_b, 1.0, (0, 1),
                          n=2, alpha=0.0, N=64)


def test_golovkin_needs_b_zero(box_vortex, euler_mode):
    with pytest.raises(DomainError):
        run_golovkin_pair(box_vortex, euler_mode.W, euler_mode.lambda_b, 2, 0.25, 0.1, 0.0,
                          -8, -7, N=64)


def test_golovkin_pair_coarse(box_vortex, euler_mode):
    """Short coarse run: Hamiltonian balance holds per step regardless of resolution."""
    run = run_golovkin_pair(box_vortex, euler_mode.W, euler_mode.lambda_b, 2, 0.25, 0.0, 0.0,
                            -8, -7, N=64)
    assert max(run.hamiltonian_residual) < 1e-10
    assert run.relative_error.size == len(run.plus.rows)


def test_vishik_physical_stays_selfsimilar(box_vortex):
    # N=256 brings the deviation down to about 0.5%
    s = run_vishik_physical(box_vortex, 0.25, 1.0, 0.0, 0.0, 1.1, N=128, steps=40)
    assert s.column("l2_dev").max() < 0.02
    with pytest.raises(DomainError):
        run_vishik_physical(box_vortex, 0.25, 0.0, 0.0, 0.0, 1.1, N=64)
