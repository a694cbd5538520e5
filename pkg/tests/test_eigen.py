from __future__ import annotations

import numpy as np
import pytest

from sqglab.errors import DomainError, ResolutionError
from sqglab.eigen import (
    SelfSimilarParams,
    assemble_Lb,
    leading_eigen,
    power_law_fit,
    solve_mode,
    transport_contraction_check,
    transport_matrix,
    winding_monotone,
)
from sqglab.kernels import biot_savart_constant
from sqglab.radial_ops import apply_V_n_alpha, vortex_velocity
from sqglab.regularize import solve_fixed_point

from conftest import smooth


@pytest.fixture(scope="module")
def euler_mode(box_vortex):
    return solve_mode(box_vortex, 2, 0.0)


def test_params_validation():
    with pytest.raises(DomainError):
        SelfSimilarParams(0.5, 0.0, 1.2)
    with pytest.raises(DomainError):
        SelfSimilarParams(2.5, 0.0, 1.0)
    with pytest.raises(DomainError):
        SelfSimilarParams(0.5, -0.1, 0.5)
    with pytest.raises(DomainError):
        SelfSimilarParams(0.5, 0.1, 0.5, m=4)
    assert SelfSimilarParams(0.5, 0.1, 0.5).b_cap(0.8) == pytest.approx(0.1)


def test_transport_matrix_is_fourth_order_in_log_r():
    x = np.geomspace(0.05, 2.0, 120)
    s = np.log(x)
    D = transport_matrix(x)
    # cubic polynomials in log R are differentiated exactly away from the zero ghosts
    f = s**3 - 2 * s
    assert np.allclose((D @ f)[:-4], (3 * s**2 - 2)[:-4], atol=1e-9)
    # outward stencil: strictly upper-banded
    assert np.all(np.tril(D, -1) == 0)


def test_too_few_layer_nodes(box_vortex):
    with pytest.raises(ResolutionError):
        assemble_Lb(box_vortex, SelfSimilarParams(0.25, 0.0, 0.0), 2, nodes=120)


def test_eigen_equation_with_independent_velocity(euler_mode, box_vortex):
    """Residual of the continuous equation using fresh product quadrature for V_n."""
    sol = euler_mode
    x = sol.W.nodes
    (a1, b1), _ = box_vortex.support
    R = x[(x > a1) & (x < b1)][::25]
    vphi = vortex_velocity(box_vortex, 0.0, R).values.real
    VW = apply_V_n_alpha(sol.W, 2, 0.0, R)
    LW = -2j * vphi / R * sol.W(R) - 2j * box_vortex.dprofile(R) * VW / R
    res = np.abs(LW - sol.lambda_b * sol.W(R))
    assert np.max(res) < 1e-6 * np.max(np.abs(sol.W.values))


def test_euler_mode_normalised_and_unstable(euler_mode):
    sol = euler_mode
    assert sol.unstable and sol.residual < 1e-10
    x = sol.W.nodes
    w = np.r_[x[1:] - x[:-1], 0] * 0.5 + np.r_[0, x[1:] - x[:-1]] * 0.5
    assert np.sqrt(np.sum(w * x * np.abs(sol.W.values) ** 2)) == pytest.approx(1.0)


def test_b0_matches_regularised_fixed_point():
    tb = smooth(0.6197497605, 0.05)
    sol = solve_mode(tb, 2, 0.5)
    fp = solve_fixed_point(tb.vortex, 2, 0.5, 0.05)
    lam_fp = -2j * biot_savart_constant(0.5) * fp.z_eps
    assert abs(sol.lambda_b - lam_fp) < 0.01 * abs(lam_fp)


def test_selfsimilar_mode_power_law(box_vortex):
    op = assemble_Lb(box_vortex, SelfSimilarParams(0.25, 0.02, 0.0), 2, nodes=400)
    sol = leading_eigen(op)
    assert sol.residual < 1e-10
    assert sol.lambda_b.real > (op.m + 3) * op.b
    slope, predicted = power_law_fit(sol, 0.3, 0.05)
    assert slope == pytest.approx(predicted, rel=1e-3)
    assert winding_monotone(sol, 0.3)


def test_target_selects_branch(box_vortex, euler_mode):
    op = assemble_Lb(box_vortex, SelfSimilarParams(0.25, 0.0, 0.0), 2)
    # the decaying partner of the growing mode is -conj(lambda) on the same n
    partner = -np.conj(euler_mode.lambda_b)
    other = leading_eigen(op, target=partner)
    assert other.lambda_b == pytest.approx(partner, abs=1e-8)
    assert not other.unstable


def test_transport_contraction(box_vortex):
    tab = transport_contraction_check(box_vortex, 0.0, 0.05, np.linspace(0, 2, 5))
    assert tab.fitted_rate == pytest.approx(-0.05, abs=1e-4)
    assert tab.jacobian_error < 1e-8
    with pytest.raises(DomainError):
        transport_contraction_check(box_vortex, 0.0, 0.05, [0.5, 1.0])
