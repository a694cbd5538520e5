from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from sqglab.errors import DomainError
from sqglab.eigen import solve_mode
from sqglab.radial_ops import apply_V_n_alpha
from sqglab.selfsimilar import (
    ScalingLaw,
    default_a,
    from_selfsimilar,
    golovkin_force,
    physical_force,
    sobolev_scaling,
    sobolev_seminorm,
    stationary_residual,
    to_selfsimilar,
    vishik_force,
)

ab = st.floats(0.05, 1.0)


@settings(max_examples=60, deadline=None)
@given(a=ab, b=ab, t=st.floats(1e-3, 50.0), x=st.floats(-5, 5))
def test_round_trip(a, b, t, x):
    tau, X = to_selfsimilar(t, x, a, b)
    t2, x2 = from_selfsimilar(tau, X, a, b)
    assert float(t2) == pytest.approx(t, rel=1e-12)
    assert float(x2) == pytest.approx(x, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("k", [0.5, 3.0, 10.0])
def test_exponential_time_maps_to_negative_tau(k):
    a, b = 0.5, 0.4
    tau, _ = to_selfsimilar(math.exp(-a * b * k), 1.0, a, b)
    assert float(tau) == pytest.approx(-k)


def test_domain_checks():
    with pytest.raises(DomainError):
        to_selfsimilar(0.0, 1.0, 0.5, 0.5)
    with pytest.raises(DomainError):
        to_selfsimilar(1.0, 1.0, 1.5, 0.5)
    with pytest.raises(DomainError):
        ScalingLaw(0.5, 0.5, 0.5, 1.0, 0.5)
    with pytest.raises(DomainError):
        default_a(0.0, 1.5, 2.0)


def test_exponents():
    law = ScalingLaw(alpha=0.5, a=0.5, b=1.0, s=1.0, p=2.0)
    assert law.critical == pytest.approx(0.5)
    assert law.exponent_theta == pytest.approx(0.0)
    assert law.exponent_f == pytest.approx(-1.0)
    assert not law.force_integrable
    assert math.isinf(law.force_integral(1.0, 1.0))
    assert ScalingLaw(0.0, 1.0, 1.0, 0.0, math.inf).critical == 0.0
    assert default_a(1.0, 1.0, 2.0) == pytest.approx(0.5)
    assert default_a(0.5, 0.0, math.inf) == pytest.approx(0.25)
    assert default_a(1.0, -2.0, 2.0) == 1.0


@pytest.mark.parametrize("a", [0.3, 0.49, 0.51, 0.8])
def test_force_integrability_boundary(a):
    law = ScalingLaw(alpha=0.5, a=a, b=0.7, s=1.0, p=2.0)
    assert law.force_integrable == (a < law.critical)
    val = quad(lambda t: float(law.force_norm(2.0, t)), 1e-3, 2.0, limit=200)[0]
    assert law.force_integral_from(2.0, 1e-3, 2.0) == pytest.approx(val, rel=1e-8)
    if law.force_integrable:
        assert law.force_integral(2.0, 2.0) >= law.force_integral_from(2.0, 1e-3, 2.0)


def test_force_integral_log_case():
    law = ScalingLaw(alpha=0.5, a=0.5, b=0.5, s=1.0, p=2.0)
    assert law.force_integral_from(1.0, 0.5, 2.0) == pytest.approx(math.log(4.0) / 0.25)


def gauss(X, Y):
    return np.exp(-(X**2 + 2 * Y**2)) * (1 + 0.3 * X)


@pytest.mark.parametrize("s,p", [(1.0, 2.0), (0.5, 2.0), (0.0, math.inf), (1.0, math.inf)])
@pytest.mark.parametrize("t", [0.2, 1.7])
def test_seminorm_scaling_identity(s, p, t):
    """Seminorm of the physical field equals the predicted rescaling of the profile's."""
    a, b, alpha, N, box = 0.6, 0.8, 0.5, 128, 16.0
    law = ScalingLaw(alpha, a, b, s, p)
    ell = (a * b * t) ** (1.0 / a)
    g = -box / 2 + box / N * np.arange(N)
    XX, YY = np.meshgrid(g, g, indexing="ij")
    Theta = gauss(XX, YY)
    # physical samples on the box scaled by ell share the same profile values
    theta = (a * b * t) ** (alpha / a - 1.0) * Theta
    lhs = sobolev_seminorm(theta, box * ell, s, p)
    rhs = sobolev_scaling(sobolev_seminorm(Theta, box, s, p), t, law)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_seminorm_plancherel():
    N, box = 64, 2 * math.pi
    g = box / N * np.arange(N)
    X, Y = np.meshgrid(g, g, indexing="ij")
    f = np.cos(3 * X) * np.sin(4 * Y)
    # |k| = 5 and ||f||_2^2 = box^2 / 4
    assert sobolev_seminorm(f, box, 1.0) == pytest.approx(5 * box / 2, rel=1e-12)
    with pytest.raises(DomainError):
        sobolev_seminorm(f, box, 1.0, p=3.0)


def test_vishik_force(box_vortex):
    R = np.linspace(0.01, 1.5, 400)
    assert np.all(vishik_force(box_vortex, 0.25, 0.0, 0.0, R).F == 0)
    f = vishik_force(box_vortex, 0.7, 0.5, 0.2, R)
    assert f.F[0] == pytest.approx(-0.5 * 0.5 * float(box_vortex.profile(0.01)))
    assert stationary_residual(box_vortex, f) == 0.0
    r = np.array([0.1, 0.5])
    t = 0.3
    val = physical_force(f, t, r)
    scale = 0.35 * t
    assert np.allclose(val, scale ** (0.2 / 0.7 - 2) * f(r / scale ** (1 / 0.7)))


@pytest.fixture(scope="module")
def gforce(box_vortex):
    sol = solve_mode(box_vortex, 2, 0.0)
    return golovkin_force(box_vortex, sol.W, sol.lambda_b, 2, 0.25, 1e-12, 0.0), sol


def test_golovkin_mode_content(gforce):
    G, _ = gforce
    for R in (0.55, 0.65, 0.95):  # inside the layers, where W lives
        c = G.mode_coefficients(-3.0, R)
        keep = np.zeros(c.size, bool)
        keep[[0, 4, -4]] = True
        assert np.max(np.abs(c[~keep])) < 1e-10 * np.max(np.abs(c))
        assert np.abs(c[4]) > 0


def test_golovkin_decay_rate(gforce):
    G, sol = gforce
    tau = np.linspace(-10, -5, 11)
    R = np.linspace(0.3, 1.0, 40)
    phi = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    RR, PP = np.meshgrid(R, phi)
    diff = [np.max(np.abs(G(t, RR, PP) - G.base(RR))) for t in tau]
    rate = np.polyfit(tau, np.log(diff), 1)[0]
    assert rate == pytest.approx(2 * sol.lambda_b.real, rel=0.03)


def test_golovkin_zero_mode_reduces_to_vishik(box_vortex, gforce):
    _, sol = gforce
    zero = type(sol.W)(sol.W.nodes, np.zeros_like(sol.W.values))
    G = golovkin_force(box_vortex, zero, sol.lambda_b, 2, 0.25, 0.1, 0.0)
    R = np.linspace(0.1, 1.0, 7)
    assert np.array_equal(G(-1.0, R, 0.3 * np.ones(7)), G.base(R))


def test_golovkin_quadratic_against_direct_transport(gforce):
    """V_lin . grad Theta_lin from fresh quadrature of the stream function."""
    # the force differentiates the nodal interpolant; the reference uses centered
    # differences of independent quadrature, so agreement is at discretisation level
    G, sol = gforce
    n, h, tau = 2, 1e-4, -1.0
    E = np.exp(sol.lambda_b * tau)
    for R in (0.5, 0.62, 0.7):
        psi = apply_V_n_alpha(sol.W, n, 0.0, np.array([R - h, R, R + h]))
        dpsi = (psi[2] - psi[0]) / (2 * h)
        W = sol.W(np.array([R - h, R, R + h]))
        dW = (W[2] - W[0]) / (2 * h)
        for phi in (0.0, 0.4, 1.3):
            e = np.exp(1j * n * phi)
            VR = (E * 1j * n * psi[1] / R * e).real
            Vphi = (-E * dpsi * e).real
            dR = (E * dW * e).real
            dphi = (E * 1j * n * W[1] * e).real
            direct = VR * dR + Vphi * dphi / R
            assert float(G.quadratic(tau, R, phi)) == pytest.approx(direct, abs=1e-3 * abs(E) ** 2)
