import cmath
import math

import numpy as np
import pytest

from double_ell.characters import character, enumerate_characters, primitive_characters
from double_ell.double_l import (
    EvalRequest,
    _lattice_count,
    direct_sum,
    direct_term,
    evaluate,
    integral_repr,
    integral_term,
    psi_series,
    theorem1_bound_check,
    theorem2_main_term,
)
from double_ell.errors import DomainError
from double_ell.special_fn import oscillatory_integral

CHI3 = enumerate_characters(3)[1]
CHI4 = enumerate_characters(4)[1]
CHI5 = primitive_characters(5)  # labels 1 (odd), 2 (even, order 2), 3 (odd)
EVEN5 = character(5, (2,))


def brute(s1, s2, z, chi1, chi2, size=3000):
    """Square truncation of the defining series, independent of the library code."""
    m = np.arange(1, size + 1)[:, None]
    n = np.arange(1, size + 1)[None, :]
    q = chi1.modulus
    c1 = np.array([chi1(k) for k in range(q)])[m % q]
    c2 = np.array([chi2(k) for k in range(q)])[n % q]
    terms = c1 * c2 * np.exp(-s1 * np.log(m) - z * np.log(n) - s2 * np.log(m + n))
    return complex(terms.sum())


def req(s1, s2, chi1, chi2, **kw):
    return EvalRequest.for_characters(s1, s2, chi1, chi2, **kw)


# ---------------------------------------------------------------- requests


def test_request_normalizes():
    r = EvalRequest(2, "3", 5, "1", (2,), method="psi")
    assert r.s1 == 2 + 0j and r.s2 == 3 + 0j
    assert r.chi1_label == (1,) and r.chi2_label == (2,)
    assert r.method == "psi-series"
    with pytest.raises(ValueError):
        EvalRequest(2, 3, 5, "1", "2", method="bogus")
    with pytest.raises(ValueError):
        EvalRequest(2, 3, 5, "1", "2", tolerance=0)


# ---------------------------------------------------------------- direct


def test_direct_against_brute_force_mod3():
    res = direct_sum(req(2, 3, CHI3, CHI3, method="direct", m_direct=10_000))
    assert res.error_estimate < 1e-8
    assert abs(res.value - brute(2, 3, 0, CHI3, CHI3)) < 1e-9


def test_direct_interpolated_against_brute_force_mod4():
    res = direct_sum(req(2, 2.5, CHI4, CHI4, z=-0.5, method="direct"))
    assert math.isfinite(abs(res.value))
    assert abs(res.value - brute(2, 2.5, -0.5, CHI4, CHI4)) < 1e-6


def test_single_term():
    s1, s2 = 2 + 1j, 3 - 2j
    assert direct_term(s1, s2, 0, CHI3, CHI3, 1, 1) == pytest.approx(2 ** (-s2), abs=1e-16)


def test_z_zero_is_plain_double_series():
    a = direct_sum(req(2.5, 3 + 10j, CHI3, CHI3, method="direct"))
    b = direct_sum(req(2.5, 3 + 10j, CHI3, CHI3, z=0j, method="direct"))
    assert a.value == b.value


@pytest.mark.parametrize(
    "s1,s2,z,needle",
    [
        (2, 1.1, 0, "Re(s2)"),
        (0.7, 1.5, 0, "Re(s1) + Re(s2)"),
        (2, 1.5, -0.5, "Re(s2)"),
    ],
)
def test_direct_domain_errors_name_inequality(s1, s2, z, needle):
    with pytest.raises(DomainError) as info:
        direct_sum(req(s1, s2, CHI3, CHI3, z=z, method="direct"))
    assert needle in str(info.value)


def test_direct_needs_nonprincipal_chi2():
    principal = enumerate_characters(3)[0]
    with pytest.raises(DomainError):
        direct_sum(req(2, 3, CHI3, principal, method="direct"))


# ---------------------------------------------------------------- psi series


@pytest.mark.parametrize(
    "s1,s2,z,chi1,chi2",
    [
        (2, 2.5, 0, CHI3, CHI3),
        (2, 2, -0.5, CHI4, CHI4),
        (2.5, 3 + 10j, 0, CHI5[0], EVEN5),
        (2, 2.5 + 5j, -0.5, CHI5[2], CHI5[0]),
    ],
)
def test_psi_agrees_with_direct(s1, s2, z, chi1, chi2):
    p = psi_series(req(s1, s2, chi1, chi2, z=z))
    d = direct_sum(req(s1, s2, chi1, chi2, z=z, method="direct"))
    assert abs(p.value - d.value) <= p.error_estimate + d.error_estimate + 1e-12


@pytest.mark.parametrize("point", [(2, 2.5, 0), (1, 0.5 + 10j, 0), (0.3, 0.5 + 3j, -0.3)])
def test_psi_order_invariance(point):
    s1, s2, z = point
    vals = [psi_series(req(s1, s2, CHI5[0], EVEN5, z=z, n_order=n)).value for n in range(2, 7)]
    assert max(abs(v - vals[0]) for v in vals) < 1e-8


def test_psi_interpolation_is_smooth_in_z():
    s1, s2 = 1.5, 0.5 + 8j
    f = lambda z: psi_series(req(s1, s2, CHI3, CHI3, z=z)).value  # noqa: E731
    h = 1e-6
    d_plus = (f(h) - f(0)) / h
    d_minus = (f(0) - f(-h)) / h
    assert abs(d_plus - d_minus) < 1e-3 * max(1, abs(d_plus))
    assert abs(d_plus) < 1e3


@pytest.mark.parametrize("method", ["psi-series", "direct", "integral"])
def test_conjugation_symmetry(method):
    s1, s2 = (2.5 + 1j, 3 + 10j) if method == "direct" else (1.5 + 1j, 0.6 + 7j)
    chi1, chi2 = CHI5[0], CHI5[2]
    a = evaluate(req(s1, s2, chi1, chi2, method=method))
    b = evaluate(req(s1.conjugate(), s2.conjugate(), chi1.conjugate(), chi2.conjugate(), method=method))
    assert abs(a.value - b.value.conjugate()) < 1e-9


def test_psi_domain_errors():
    with pytest.raises(DomainError):
        psi_series(req(-0.6, 0.5 + 3j, CHI3, CHI3))
    with pytest.raises(DomainError):
        psi_series(req(2, 2.5, CHI3, CHI3, z=1.2))
    nonprimitive = character(9, (3,))  # induced from mod 3
    assert not nonprimitive.primitive
    with pytest.raises(DomainError):
        psi_series(req(2, 2.5, nonprimitive, nonprimitive))
    with pytest.raises(DomainError):
        psi_series(req(2, 3.0, CHI3, CHI3))  # 2 - s2 - z = -1 is an integer


# ---------------------------------------------------------------- integral representation


@pytest.mark.parametrize("chi1,chi2", [(CHI3, CHI3), (CHI5[0], EVEN5)])
def test_integral_agrees_with_psi(chi1, chi2):
    r = req(2, 0.75 + 5j, chi1, chi2)
    p = psi_series(r)
    i = integral_repr(r)
    assert abs(p.value - i.value) <= p.error_estimate + i.error_estimate + 1e-12


@pytest.mark.parametrize("chi2", [CHI3, EVEN5])
def test_integral_single_term_and_parity_branch(chi2):
    s2 = 0.6
    q = chi2.modulus
    xi = 2 * math.pi / q
    r = oscillatory_integral(xi, s2)
    eps = complex(cmath.exp(0))
    from double_ell.characters import gauss_sum

    eps = gauss_sum(chi2).epsilon_factor
    pref = 2 * (2 * math.pi) ** (s2 - 1) * q ** (0.5 - s2) * eps
    if chi2.parity == 0:
        comb = math.cos(xi) * r.cosine_part + math.sin(xi) * r.sine_part
    else:
        comb = -math.sin(xi) * r.cosine_part + math.cos(xi) * r.sine_part
    assert abs(integral_term(2, s2, chi2, chi2, 1, 1) - pref * comb) < 1e-14


def test_integral_domain_errors():
    with pytest.raises(DomainError):
        integral_repr(req(0.5, 0.6 + 3j, CHI3, CHI3))
    with pytest.raises(DomainError):
        integral_repr(req(2, 0.6 + 3j, CHI3, CHI3, z=-0.2))


# ---------------------------------------------------------------- main term


def test_main_term_empty_sum():
    res = theorem2_main_term(1, 0.5 + 2j, CHI3, CHI3, with_reference=False)
    assert res.main_term == 0
    assert res.lattice_points == 0
    assert res.cutoff == pytest.approx(6 / (2 * math.pi))


def test_lattice_count_independent():
    for cutoff in (0.9, 1, 7.5, 48.3, 1000):
        brute_count = sum(1 for m in range(1, 1001) for n in range(1, 1001) if m * n <= cutoff)
        assert _lattice_count(math.floor(cutoff)) == brute_count
    res = theorem2_main_term(1, 0.5 + 50j, CHI3, CHI3, with_reference=False)
    top = math.floor(res.cutoff)
    assert res.lattice_points == sum(top // m for m in range(1, top + 1))


def test_main_term_matches_explicit_double_sum():
    # hyperbola-wise (m, n) sum written out, against the library's grouped form
    s1, s2 = 0.75, 0.5 + 40j
    for chi1, chi2 in ((CHI3, CHI3), (CHI5[0], EVEN5)):
        q, kappa = chi2.modulus, chi2.parity
        cutoff = q * 40 / (2 * math.pi)
        from double_ell.characters import gauss_sum
        from double_ell.special_fn import complex_gamma

        total = 0j
        for m in range(1, int(cutoff) + 1):
            for n in range(1, int(cutoff // m) + 1):
                arg = math.pi * s2 / 2 + 2 * math.pi * m * n / q
                trig = cmath.sin(arg) if kappa == 0 else cmath.cos(arg)
                total += chi1(m) * chi2(n).conjugate() * trig * m ** (-s1) * n ** (s2 - 1)
        pref = 2 * (2 * math.pi) ** (s2 - 1) * gauss_sum(chi2).value * complex_gamma(1 - s2) / q**s2
        if kappa:
            pref /= 1j
        res = theorem2_main_term(s1, s2, chi1, chi2, with_reference=False)
        assert abs(res.main_term - pref * total) < 1e-10 * max(1, abs(res.main_term))


@pytest.mark.parametrize(
    "s1,s2,chi1,chi2", [(1, 0.5 + 50j, CHI3, CHI3), (0.75, 0.5 + 40j, CHI5[0], EVEN5)]
)
def test_main_term_residual_is_measured(s1, s2, chi1, chi2):
    res = theorem2_main_term(s1, s2, chi1, chi2)
    assert res.reference_method == "psi-series"
    assert res.delta == pytest.approx(max(0, 1 - s1 - s2.real))
    q = chi2.modulus
    allowance = q**0.5 * (q * abs(s2.imag)) ** (res.delta + 0.1)
    constant = abs(res.residual) / allowance
    assert math.isfinite(constant) and constant > 0


def test_main_term_errors():
    with pytest.raises(DomainError):
        theorem2_main_term(1, 0.5 + 1j, CHI3, CHI3)
    with pytest.raises(DomainError):
        theorem2_main_term(1, 1.5 + 10j, CHI3, CHI3)
    with pytest.raises(DomainError):
        theorem2_main_term(1, 0.5 + 10j, character(9, (3,)), character(9, (3,)))


def test_bound_check_ratio_positive():
    val = psi_series(req(0.5, 0.5 + 20j, CHI3, CHI3)).value
    cmp = theorem1_bound_check(0.5, 0.5 + 20j, CHI3, CHI3, val)
    assert cmp.ratio > 0 and math.isfinite(cmp.ratio)
    assert cmp.parity_branch == 1


# ---------------------------------------------------------------- three-way agreement


@pytest.mark.parametrize("chi1,chi2", [(CHI3, CHI3), (CHI5[1], EVEN5), (CHI5[2], CHI5[0])])
def test_three_way_agreement(chi1, chi2):
    for s1, s2 in [(2, 2.5 + 1j), (1.5, 2.4 - 3j)]:
        results = {}
        for method in ("direct", "psi-series", "integral"):
            try:
                results[method] = evaluate(req(s1, s2, chi1, chi2, method=method))
            except DomainError:
                continue
        assert len(results) >= 2
        vals = list(results.values())
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-9


@pytest.mark.parametrize("s1,limit", [(0.5, 0.7), (0.0, 1.1)])
def test_growth_ladder_mod3(s1, limit):
    # sigma2 = 0.5; delta = 0 at s1 = 0.5 and delta = 0.5 at s1 = 0
    ts = [10, 20, 40, 80, 160]
    vals = [psi_series(req(s1, 0.5 + 1j * t, CHI3, CHI3)).value for t in ts]
    slope = np.polyfit(np.log([3 * t for t in ts]), np.log(np.abs(vals)), 1)[0]
    assert slope <= limit
    for t, v in zip(ts, vals):
        assert theorem1_bound_check(s1, 0.5 + 1j * t, CHI3, CHI3, v).ratio > 0
