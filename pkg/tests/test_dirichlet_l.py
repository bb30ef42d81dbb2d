import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from double_ell.characters import character, enumerate_characters, primitive_characters
from double_ell.dirichlet_l import (
    _euler_maclaurin,
    hurwitz_zeta,
    hyperbola_dirichlet_sum,
    l_function,
    product_bound,
    truncated_product,
)
from double_ell.errors import DomainError, PoleError

mp.mp.dps = 30

CHI3 = enumerate_characters(3)[1]
CHI4 = enumerate_characters(4)[1]


def l_reference(s, chi):
    """mpmath Dirichlet L-value (its own Hurwitz sum at 30 digits)."""
    q = chi.modulus
    if s == 1:
        # mpmath's Hurwitz sum breaks down at the cancelled pole; use digamma
        return complex(-mp.fsum(mp.mpc(complex(chi(a))) * mp.digamma(mp.mpf(a) / q) for a in range(1, q)) / q)
    coeffs = [mp.mpc(complex(chi(a))) for a in range(q)]
    return complex(mp.dirichlet(mp.mpc(s), coeffs))


def test_hurwitz_examples():
    assert hurwitz_zeta(2, 1) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert hurwitz_zeta(2, 0.5) == pytest.approx(math.pi**2 / 2, rel=1e-14)


def test_hurwitz_cutoff_independence():
    s, a = 0.5 + 10j, 1 / 3
    v50 = _euler_maclaurin(s, [a], 50)[0][0]
    v200 = _euler_maclaurin(s, [a], 200)[0][0]
    assert abs(v50 - v200) < 1e-11


def test_hurwitz_errors():
    with pytest.raises(PoleError):
        hurwitz_zeta(1 + 1e-12, 0.5)
    with pytest.raises(DomainError):
        hurwitz_zeta(-2.5, 0.5)
    with pytest.raises(DomainError):
        hurwitz_zeta(2, 1.5)


@settings(max_examples=60, deadline=None)
@given(st.floats(-1.9, 6), st.floats(-60, 60), st.floats(0.01, 1))
def test_hurwitz_against_mpmath(x, y, a):
    s = complex(x, y)
    if abs(s - 1) < 1e-3:
        return
    ref = complex(mp.zeta(mp.mpc(x, y), a))
    assert abs(hurwitz_zeta(s, a) - ref) < 1e-11 * max(1, abs(ref))


@settings(max_examples=30, deadline=None)
@given(st.floats(-1.9, 4), st.floats(-30, 30), st.floats(0.05, 1), st.integers(1, 5))
def test_hurwitz_shift_ladder(x, y, a, k):
    s = complex(x, y)
    if abs(s - 1) < 1e-3:
        return
    # zeta(s, a) = sum_{j<k} (a+j)^-s + zeta(s, a+k); a + k lies outside our
    # (0, 1] range, so the shifted value comes from mpmath
    lhs = hurwitz_zeta(s, a)
    head = sum((a + j) ** (-s) for j in range(k))
    shifted = complex(mp.zeta(mp.mpc(x, y), a + k))
    assert abs(lhs - head - shifted) < 1e-11 * max(1, abs(lhs), abs(head))


def test_l_function_examples():
    assert l_function(1, CHI4).value == pytest.approx(math.pi / 4, rel=1e-14)
    assert l_function(2, CHI4).value == pytest.approx(0.915965594177219, rel=1e-14)
    assert l_function(1, CHI3).value == pytest.approx(math.pi / (3 * math.sqrt(3)), rel=1e-14)


def test_l_function_errors():
    with pytest.raises(DomainError):
        l_function(2, enumerate_characters(5)[0])
    with pytest.raises(DomainError):
        l_function(-2.5, CHI3)
    with pytest.raises(DomainError):
        l_function(1.0, CHI3, method="direct-series")


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 12])
@pytest.mark.parametrize("s", [1.0, 0.5 + 14j, 2.5 + 3j, -1.5 + 7j, 0.3, 1.5 + 320j, 26 + 300j])
def test_l_function_against_mpmath(q, s):
    for chi in enumerate_characters(q)[1:]:
        res = l_function(s, chi)
        ref = l_reference(s, chi)
        err = abs(res.value - ref)
        assert err < 1e-11 * max(1, abs(ref))
        assert err <= res.error_estimate + 1e-15 * abs(ref)


@pytest.mark.parametrize("s", [1.3, 2 + 5j, 3.5 - 20j])
def test_cross_method_agreement(s):
    for chi in primitive_characters(7):
        a = l_function(s, chi)
        b = l_function(s, chi, method="direct-series")
        assert abs(a.value - b.value) <= max(1e-10, b.error_estimate)
        if s.real >= 2:
            assert abs(a.value - b.value) < 1e-10


def test_truncated_product_example_mod3():
    res = truncated_product(2, 2, CHI3, CHI3, 1e4)
    assert res.residual < 1e-3
    assert res.residual / res.bound_prediction < 1
    assert res.residual == abs(res.true_product - res.truncated_sum)


def test_truncated_product_tau_two():
    z1, z2 = 1.5 + 1j, 0.8 - 2j
    res = truncated_product(z1, z2, CHI3, CHI3, 2)
    expected = 1 + CHI3(2) * 2 ** (-z1) + CHI3(2) * 2 ** (-z2)
    assert abs(res.truncated_sum - expected) < 1e-15


def test_truncated_product_theorem_substitution():
    # z1 = 1, z2 = s1 + s2 at (s1, s2) = (0.5, 0.5 + 30i)
    for tau in (1e2, 1e3, 1e4):
        res = truncated_product(1, 1 + 30j, CHI3, CHI3, tau)
        assert res.residual <= res.bound_prediction


def test_truncated_product_errors():
    chi5 = enumerate_characters(5)
    with pytest.raises(DomainError):
        truncated_product(0.4, 0.5, CHI3, CHI3, 10)
    with pytest.raises(DomainError):
        truncated_product(2, 2, CHI3, chi5[1], 10)
    with pytest.raises(DomainError):
        truncated_product(2, 2, chi5[0], chi5[1], 10)
    with pytest.raises(DomainError):
        truncated_product(2, 2, CHI3, CHI3, 1.5)


def test_bound_cases():
    assert product_bound(3, 0.5, 5, 100)[1] == "diff>1"
    assert product_bound(1.5, 0.5, 5, 100)[1] == "diff=1"
    assert product_bound(1.5 + 1e-10, 0.5, 5, 100)[1] == "diff=1"
    assert product_bound(1.0, 0.5, 5, 100)[1] == "diff<1"


def test_residual_trend_decreases():
    chi = primitive_characters(5)[0]
    taus = [2**k * 100 for k in range(6)]
    res = [truncated_product(1.2 + 3j, 0.9 - 1j, chi, chi, t).residual for t in taus]
    assert np.median(res[3:]) < np.median(res[:3])


def test_hyperbola_dirichlet_sum_brute_force():
    chi = primitive_characters(7)[1]
    z1, z2, tau = 0.7 + 2j, 1.1 - 1j, 200.5
    brute = sum(
        chi(m) * chi(n) * m ** (-z1) * n ** (-z2)
        for m in range(1, 201) for n in range(1, int(tau // m) + 1)
    )
    assert abs(hyperbola_dirichlet_sum(z1, z2, chi, chi, tau) - brute) < 1e-12


@pytest.mark.parametrize("q,l2", [(5, (2,)), (7, (3,)), (3, (1,))])
def test_residual_within_bound(q, l2):
    chi1 = character(q, (1,))
    chi2 = character(q, l2)
    for z1, z2 in [(2.5 + 3j, 0.6 - 2j), (1.5 + 2j, 0.5 - 3j), (1, 0.75 + 20j)]:
        for tau in (100, 1000):
            res = truncated_product(z1, z2, chi1, chi2, tau)
            assert res.residual <= res.bound_prediction
