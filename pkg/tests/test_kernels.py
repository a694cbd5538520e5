from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqglab.errors import DivergenceError, DomainError
from sqglab.kernels import (
    KernelQuery,
    biot_savart_constant,
    closed_form_at_1,
    eval_I,
    eval_I_at_1,
    eval_J_prime_at_1,
    eval_with_error,
    i_kernel,
    j_kernel,
    k_kernel,
    log_expansion_remainder,
)


def mp_I(n, alpha, sigma):
    """Independent arbitrary-precision quadrature, split at the near-singular point."""
    mp.mp.dps = 30
    if alpha == 0:
        f = lambda b: mp.sin(b) * mp.sin(n * b) * abs(sigma - mp.expj(b)) ** -2
        return float(sigma / n * 2 * mp.quad(f, [0, mp.pi / 8, mp.pi]))
    f = lambda b: mp.cos(n * b) * abs(sigma - mp.expj(b)) ** (-alpha)
    return float(2 * mp.quad(f, [0, mp.mpf(1) / 64, mp.pi / 8, mp.pi]) / alpha)


def test_biot_savart_constant_known_values():
    assert biot_savart_constant(0.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    # Gamma(3/2)/Gamma(1/2) = 1/2
    assert biot_savart_constant(1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_euler_kernel_is_explicit(n):
    sig = np.array([0.1, 0.4, 0.77, 0.95, 1.05, 1.6, 2.0])
    exact = math.pi / n * np.minimum(sig, 1 / sig) ** n
    assert np.max(np.abs(i_kernel(n, 0.0, sig) - exact)) < 1e-12


@pytest.mark.parametrize("n,alpha,sigma", [
    (1, 0.5, 0.3), (2, 0.5, 0.9), (3, 1.0, 0.97), (2, 1.5, 1.2), (4, 0.25, 1.03), (5, 1.0, 0.5),
])
def test_against_mpmath(n, alpha, sigma):
    assert float(i_kernel(n, alpha, sigma)) == pytest.approx(mp_I(n, alpha, sigma), rel=1e-10)


@pytest.mark.parametrize("n", [1, 2, 5])
@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_closed_form_matches_mpmath_at_one(n, alpha):
    mp.mp.dps = 30
    # b = u^m with m = 1/(1 - alpha) removes the endpoint singularity b^{-alpha}
    m = 1 / mp.mpf(1 - alpha)

    def f(u):
        b = u**m
        return mp.cos(n * b) * (2 * mp.sin(b / 2) / b) ** (-alpha) * m

    ref = float(2 * mp.quad(f, [0, mp.pi ** (1 / m)]) / alpha)
    assert eval_I_at_1(n, alpha) == pytest.approx(ref, rel=1e-12)


def test_closed_form_alpha_zero_and_product_convention():
    for n in range(1, 6):
        cf = closed_form_at_1(n, 0.0)
        assert len(cf.f_k) == n - 1
        assert cf.value == pytest.approx(math.pi / n, rel=1e-14)


def test_divergence_at_one_for_sqg():
    with pytest.raises(DivergenceError):
        i_kernel(2, 1.0, 1.0)
    with pytest.raises(DivergenceError):
        k_kernel(2, 0.5, 1.0)


def test_domain_errors():
    with pytest.raises(DomainError):
        i_kernel(0, 0.5, 0.5)
    with pytest.raises(DomainError):
        i_kernel(2, 2.0, 0.5)
    with pytest.raises(DomainError):
        KernelQuery(2, 0.5, -1.0)


def test_j_finite_at_one_and_continuous():
    for alpha in (0.5, 1.0, 1.5):
        j1 = float(j_kernel(3, alpha, 1.0))
        near = j_kernel(3, alpha, np.array([1 - 1e-7, 1 + 1e-7]))
        assert np.all(np.abs(near - j1) < 1e-4 * max(1.0, abs(j1)))


def test_sqg_j_at_one_series():
    # J_{n,1}(1) = D_1 sum_{k<n} 2/(2k+1) with D_1 = 2
    for n in (2, 3, 4):
        expected = 2.0 * sum(2.0 / (2 * k + 1) for k in range(1, n))
        assert float(j_kernel(n, 1.0, 1.0)) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("alpha", [0.25, 1.0, 1.5])
def test_derivative_identity_centered(n, alpha):
    # the centered difference converges like h^(3 - alpha) for alpha > 1
    errs = []
    for h in (1e-3, 1e-4, 1e-5):
        d = (float(j_kernel(n, alpha, 1 + h)) - float(j_kernel(n, alpha, 1 - h))) / (2 * h)
        errs.append(abs(d - eval_J_prime_at_1(n, alpha)))
    assert errs[2] < 1e-6
    assert errs[1] < errs[0] and errs[2] < errs[1]


def test_log_remainder_extends_continuously():
    r = [log_expansion_remainder(2, 1 + s * h) for h in (1e-3, 1e-4, 1e-5) for s in (-1, 1)]
    assert np.ptp(r) < 1e-2
    with pytest.raises(DomainError):
        log_expansion_remainder(2, 1.0)


def test_error_estimate_is_small():
    v, err = eval_with_error(KernelQuery(3, 0.7, 0.999))
    assert err < 1e-10 * abs(v)
    assert eval_with_error(KernelQuery(3, 0.7, 1.0))[1] == 0.0


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 6), alpha=st.floats(0.05, 1.9), sigma=st.floats(0.05, 0.95))
def test_inversion_symmetry(n, alpha, sigma):
    # |1/s - e^{ib}| = |s - e^{-ib}|/s  =>  I(1/s) = s^alpha I(s)
    a = float(i_kernel(n, alpha, 1 / sigma))
    b = sigma**alpha * float(i_kernel(n, alpha, sigma))
    assert a == pytest.approx(b, rel=1e-10)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 6), alpha=st.floats(0.0, 1.9), sigma=st.floats(0.05, 0.9))
def test_vectorised_matches_scalar(n, alpha, sigma):
    arr = i_kernel(n, alpha, np.array([sigma, 0.5]))
    assert arr[0] == eval_I(KernelQuery(n, alpha, sigma))
