import cmath
import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from double_ell.characters import (
    character,
    enumerate_characters,
    euler_phi,
    gauss_sum,
    hyperbola_sum,
    hyperbola_sum_matrix,
    is_primitive,
    partial_sum_max,
    primitive_characters,
)
from double_ell.errors import DomainError


def mobius(n):
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def primitive_count_mobius(q):
    return sum(mobius(q // d) * euler_phi(d) for d in range(1, q + 1) if q % d == 0)


def test_mod3_characters():
    chars = enumerate_characters(3)
    assert len(chars) == 2
    principal, chi = chars
    assert principal.is_principal
    assert chi(1) == pytest.approx(1)
    assert chi(2) == pytest.approx(-1)


def test_mod4_nonprincipal_is_odd():
    chars = enumerate_characters(4)
    assert len(chars) == 2
    chi = chars[1]
    assert chi(3) == pytest.approx(-1)
    assert chi.parity == 1


def test_mod8_two_primitive():
    chars = enumerate_characters(8)
    assert len(chars) == 4
    assert sum(c.primitive for c in chars) == 2


def test_mod8_against_brute_force_homomorphisms():
    units = [1, 3, 5, 7]
    # every map to {+1, -1} that is multiplicative is a character of (Z/8)*
    homs = []
    for signs in product((1, -1), repeat=4):
        table = dict(zip(units, signs))
        if table[1] == 1 and all(table[a * b % 8] == table[a] * table[b] for a in units for b in units):
            homs.append(table)
    assert len(homs) == 4
    ours = sorted(tuple(round(c(u).real) for u in units) for c in enumerate_characters(8))
    assert ours == sorted(tuple(h[u] for u in units) for h in homs)
    # primitive iff not induced from mod 4 (or mod 2): chi(5) must be -1
    for c in enumerate_characters(8):
        assert c.primitive == (round(c(5).real) == -1)


def test_primitivity_examples():
    principal, chi = enumerate_characters(3)
    assert is_primitive(chi)
    assert not is_primitive(principal)
    # the character mod 9 induced from chi mod 3
    induced = [c for c in enumerate_characters(9) if all(
        abs(c(a) - chi(a)) < 1e-12 for a in range(9) if math.gcd(a, 9) == 1)]
    assert len(induced) == 1
    assert not is_primitive(induced[0])


def test_small_modulus_rejected():
    with pytest.raises(DomainError):
        enumerate_characters(1)


@pytest.mark.parametrize("q", range(2, 201))
def test_counts_and_gauss_sums(q):
    chars = enumerate_characters(q)
    assert len(chars) == euler_phi(q)
    prim = [c for c in chars if c.primitive]
    assert len(prim) == primitive_count_mobius(q)
    for c in prim:
        g = gauss_sum(c)
        assert abs(g.magnitude - math.sqrt(q)) < 1e-9
        assert abs(abs(g.epsilon_factor) - 1) < 1e-10
        # tau(conj chi) = chi(-1) conj(tau(chi))
        gbar = gauss_sum(c.conjugate()).value
        assert abs(gbar - c(q - 1) * g.value.conjugate()) < 1e-10


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9, 12, 15, 16, 20, 24, 27, 32, 35])
def test_character_invariants(q):
    units = [a for a in range(q) if math.gcd(a, q) == 1]
    for c in enumerate_characters(q):
        v = c.values
        for a in units:
            for b in units:
                assert abs(v[a * b % q] - v[a] * v[b]) < 1e-12
        assert all((v[a] == 0) == (math.gcd(a, q) > 1) for a in range(q))
        assert abs(v[q - 1] - (-1) ** c.parity) < 1e-12
        for a in units:
            assert abs(v[a] ** c.order - 1) < 1e-12
        total = abs(v.sum())
        assert (total < 1e-9) == (not c.is_principal)


def test_orthogonality():
    for q in (7, 12, 16):
        chars = enumerate_characters(q)
        M = np.array([c.values for c in chars])
        gram = M @ M.conj().T
        assert np.allclose(gram, euler_phi(q) * np.eye(len(chars)), atol=1e-9)


def test_canonical_generators_two_power():
    # for 2^e, e >= 3 the label is over (-1, 5)
    chars = enumerate_characters(16)
    assert len(chars[0].label) == 2
    odd = character(16, (1, 0))
    assert odd(15) == pytest.approx(-1)
    assert odd(5) == pytest.approx(1)


def test_gauss_examples():
    chi3 = enumerate_characters(3)[1]
    g = gauss_sum(chi3)
    assert abs(g.value - 1j * math.sqrt(3)) < 1e-12
    assert abs(g.epsilon_factor - 1) < 1e-12
    chi4 = enumerate_characters(4)[1]
    g = gauss_sum(chi4)
    assert abs(g.value - 2j) < 1e-12
    assert abs(g.epsilon_factor - 1) < 1e-12


def test_partial_sum_max_examples():
    assert partial_sum_max(enumerate_characters(3)[1]) == pytest.approx(1)
    assert partial_sum_max(enumerate_characters(4)[1]) == pytest.approx(1)
    with pytest.raises(DomainError):
        partial_sum_max(enumerate_characters(5)[0])


def test_polya_vinogradov_small():
    for q in range(3, 120):
        for c in primitive_characters(q):
            assert partial_sum_max(c) <= math.sqrt(q) * math.log(q)


def brute_hyperbola(chi1, chi2, tau, xi):
    total = 0j
    for m in range(1, int(xi) + 1):
        for n in range(1, int(tau // m) + 1):
            total += chi1(m) * chi2(n)
    return total


def test_hyperbola_examples():
    chi = enumerate_characters(3)[1]
    assert abs(hyperbola_sum(chi, chi, 10, 3) - 1) < 1e-12
    for q in (3, 5, 8):
        for c1 in primitive_characters(q):
            assert abs(hyperbola_sum(c1, c1, 1, 1) - 1) < 1e-12


def test_hyperbola_errors():
    c3 = enumerate_characters(3)[1]
    c5 = enumerate_characters(5)[1]
    with pytest.raises(DomainError):
        hyperbola_sum(c3, c3, 2, 5)
    with pytest.raises(DomainError):
        hyperbola_sum(c3, c5, 10, 2)


@settings(max_examples=40, deadline=None)
@given(
    q=st.sampled_from([3, 4, 5, 7, 8, 11]),
    tau=st.floats(1, 400),
    frac=st.floats(0, 1),
    i=st.integers(0, 100),
    j=st.integers(0, 100),
)
def test_hyperbola_matches_brute_force(q, tau, frac, i, j):
    prim = primitive_characters(q)
    c1, c2 = prim[i % len(prim)], prim[j % len(prim)]
    xi = 1 + frac * (tau - 1)
    assert abs(hyperbola_sum(c1, c2, tau, xi) - brute_hyperbola(c1, c2, tau, xi)) < 1e-9


def test_hyperbola_full_equals_xi_tau():
    for q in (5, 7):
        for c1 in primitive_characters(q):
            for c2 in primitive_characters(q):
                full = brute_hyperbola(c1, c2, 300, 300)
                assert abs(hyperbola_sum(c1, c2, 300, 300) - full) < 1e-9


def test_hyperbola_matrix_agrees():
    prim = primitive_characters(7)
    mat = hyperbola_sum_matrix(prim, prim, 1000, 100)
    for a, c1 in enumerate(prim):
        for b, c2 in enumerate(prim):
            assert abs(mat[a, b] - hyperbola_sum(c1, c2, 1000, 100)) < 1e-9


def test_roots_are_exact_angles():
    c = character(101, (1,))
    z = c.values[c.values != 0]
    angles = np.angle(z) / (2 * np.pi) * 100
    assert np.allclose(angles, np.round(angles), atol=1e-12)
    assert all(abs(abs(v) - 1) < 1e-15 for v in z)
    assert cmath.isclose(c(2) ** 100, 1, abs_tol=1e-12)
