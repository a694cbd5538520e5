from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqglab.errors import DomainError
from sqglab.kernels import biot_savart_constant, i_kernel, j_kernel
from sqglab.vortex import (
    build_matrix,
    build_vortex,
    discriminant,
    discriminant_at_1,
    instability_onset,
    most_unstable_sigma,
    scan_discriminant,
    unstable_eigenpair,
)

# argmin of the discriminant on the default 2000-point scan, frozen from a verified run
GOLDEN_SIGMA_STAR = {
    (2, 0.0): 0.60499979, (2, 0.5): 0.6197497605, (2, 1.0): 0.637499725,
    (3, 0.5): 0.742999514, (4, 0.5): 0.805999388,
}


@settings(max_examples=50, deadline=None)
@given(sigma=st.floats(0.501, 0.999))
def test_zero_mean(sigma):
    v = build_vortex(sigma)
    assert abs(v.mean()) < 1e-14
    assert v.jumps == pytest.approx((-(1 + v.c), 1.0))


def test_build_vortex_domain():
    for bad in (0.5, 1.0, 0.2):
        with pytest.raises(DomainError):
            build_vortex(bad)


def test_matrix_entries():
    v = build_vortex(0.7)
    m = build_matrix(v, 3, 0.5)
    s = 0.7
    j1 = float(j_kernel(3, 0.5, 1.0))
    assert m.A[0, 1] == pytest.approx(float(i_kernel(3, 0.5, s)) / s)
    assert m.A[1, 1] == pytest.approx(-j1 + float(i_kernel(1, 0.5, s)) / s)
    assert m.A[0, 0] == pytest.approx(s**-2.5 * j1 - float(i_kernel(1, 0.5, s)) / s)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), alpha=st.sampled_from([0.0, 0.3, 0.5, 0.8, 1.0]),
       sigma=st.floats(0.51, 0.99))
def test_factored_discriminant_matches_matrix(n, alpha, sigma):
    m = build_matrix(build_vortex(sigma), n, alpha)
    d = float(discriminant(n, alpha, np.array([sigma]))[0])
    assert d == pytest.approx(m.discriminant, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75])
def test_discriminant_vanishes_at_one(n, alpha):
    assert abs(discriminant_at_1(n, alpha)) < 1e-10


def test_sqg_one_sided_limit():
    d = discriminant(3, 1.0, np.array([1 - 1e-4, 1 - 1e-5, 1 - 1e-6]))
    assert abs(d[-1]) < abs(d[0])
    assert abs(d[-1]) < 1e-3


def test_n1_is_neutral():
    assert np.all(discriminant(1, 0.5, np.array([0.6, 0.9])) == 0)


@pytest.mark.parametrize("key", sorted(GOLDEN_SIGMA_STAR))
def test_golden_sigma_star(key):
    n, alpha = key
    assert most_unstable_sigma(n, alpha) == pytest.approx(GOLDEN_SIGMA_STAR[key], abs=1e-9)


def test_onset_brackets_sign_change():
    scan = scan_discriminant(2, 0.5)
    s0 = instability_onset(2, 0.5, scan)
    d = discriminant(2, 0.5, np.array([s0 - 1e-6, s0 + 1e-6]))
    assert d[0] > 0 > d[1]


def test_euler_onset_close_to_half():
    # for alpha = 0 the n = 2 window reaches down to sigma just above 1/2
    assert instability_onset(2, 0.0, scan_discriminant(2, 0.0)) < 0.51


def test_eigenpair():
    m = build_matrix(build_vortex(0.62), 2, 0.5)
    p = unstable_eigenpair(m)
    assert p.z.imag > 0
    assert np.linalg.norm(m.A @ p.h - p.z * p.h) < 1e-13
    assert p.lam == pytest.approx(-1j * 2 * biot_savart_constant(0.5) * p.z)
    assert p.lam.real > 0


def test_stable_vortex_has_no_eigenpair():
    with pytest.raises(DomainError):
        unstable_eigenpair(build_matrix(build_vortex(0.51), 4, 0.5))


def test_scan_grid_validation():
    with pytest.raises(DomainError):
        scan_discriminant(2, 0.5, [0.4, 0.6])
    assert len(scan_discriminant(2, 0.5)) == 2000
    assert math.isclose(scan_discriminant(2, 0.5)[-1][0], 1 - 1e-6)
