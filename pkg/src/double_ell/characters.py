"""Dirichlet characters modulo q as eagerly materialized value tables.

Characters are labelled by exponent vectors over a fixed choice of
generators of (Z/qZ)*: for each prime power p^e || q (primes ascending)
the least primitive root when p is odd, 3 for 4, and the pair (-1, 5) for
2^e with e >= 3. A label v means chi(g_i) = exp(2 pi i v_i / n_i), n_i the
order of g_i.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import product

import numpy as np

from .errors import DomainError
from .summation import csum


def factorize(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n):
    result = n
    for p, _ in factorize(n):
        result -= result // p
    return result


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _multiplicative_order(g, m):
    k, x = 1, g % m
    while x != 1:
        x = x * g % m
        k += 1
    return k


def _least_primitive_root(m):
    phi = euler_phi(m)
    for g in range(2, m):
        if math.gcd(g, m) == 1 and _multiplicative_order(g, m) == phi:
            return g
    raise AssertionError(f"no primitive root mod {m}")


def _component_logs(p, e):
    """Generators, their orders, and a map unit -> exponent tuple for Z/p^e."""
    m = p**e
    if p == 2 and e == 1:
        return [], [], {1: ()}
    if p == 2 and e == 2:
        return [3], [2], {1: (0,), 3: (1,)}
    if p == 2:
        n5 = 2 ** (e - 2)
        logs = {}
        for i in range(2):
            for j in range(n5):
                logs[(-1) ** i * pow(5, j, m) % m] = (i, j)
        return [m - 1, 5], [2, n5], logs
    g = _least_primitive_root(m)
    n = euler_phi(m)
    logs = {}
    x = 1
    for k in range(n):
        logs[x] = (k,)
        x = x * g % m
    return [g], [n], logs


@dataclass(frozen=True)
class _Group:
    modulus: int
    orders: tuple
    exponent: int
    logs: np.ndarray  # shape (q, r); -1 rows for non-units
    units: np.ndarray  # boolean mask


@lru_cache(maxsize=None)
def _unit_group(q):
    parts = [(p**e, _component_logs(p, e)) for p, e in factorize(q)]
    orders = tuple(n for _, (_, ns, _) in parts for n in ns)
    r = len(orders)
    logs = -np.ones((q, r), dtype=np.int64)
    units = np.zeros(q, dtype=bool)
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        units[a] = True
        vec = []
        for m, (_, _, table) in parts:
            vec.extend(table[a % m])
        logs[a] = vec
    exponent = reduce(_lcm, orders, 1)
    logs.setflags(write=False)
    units.setflags(write=False)
    return _Group(q, orders, exponent, logs, units)


@lru_cache(maxsize=None)
def _roots_of_unity(order):
    # one angle division per root; exact values on the axes
    roots = np.empty(order, dtype=complex)
    for j in range(order):
        if (4 * j) % order == 0:
            roots[j] = (1, 1j, -1, -1j)[(4 * j) // order]
        else:
            roots[j] = cmath.exp(2j * math.pi * j / order)
    roots.setflags(write=False)
    return roots


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    modulus: int
    label: tuple
    values: np.ndarray = field(repr=False)
    parity: int
    order: int
    conductor: int

    @property
    def primitive(self):
        return self.conductor == self.modulus

    @property
    def is_principal(self):
        return self.order == 1

    @property
    def label_str(self):
        return ",".join(str(v) for v in self.label)

    def __call__(self, n):
        return self.values[n % self.modulus]

    def at(self, n):
        """Vectorized evaluation on an integer array."""
        return self.values[np.asarray(n) % self.modulus]

    def conjugate(self):
        group = _unit_group(self.modulus)
        return character(self.modulus, tuple((-v) % n for v, n in zip(self.label, group.orders)))

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.modulus == other.modulus
            and self.label == other.label
        )

    def __hash__(self):
        return hash((self.modulus, self.label))


def _conductor(values, units, q):
    a = np.arange(q)
    for d in (d for d in range(1, q + 1) if q % d == 0):
        mask = units & (a % d == 1 % d)
        if np.all(np.abs(values[mask] - 1) < 1e-9):
            return d
    return q


@lru_cache(maxsize=4096)
def character(q, label):
    """The character mod q with the given exponent-vector label."""
    if q < 2:
        raise DomainError(f"modulus must be >= 2, got {q}")
    group = _unit_group(q)
    label = tuple(int(v) for v in label)
    if len(label) != len(group.orders) or any(
        not 0 <= v < n for v, n in zip(label, group.orders)
    ):
        raise DomainError(f"label {label} invalid for modulus {q} (generator orders {group.orders})")
    E = group.exponent
    scale = np.array([E // n for n in group.orders], dtype=np.int64)
    idx = (group.logs * (np.array(label, dtype=np.int64) * scale)).sum(axis=1) % E
    values = np.where(group.units, _roots_of_unity(E)[idx], 0j)
    values.setflags(write=False)
    order = reduce(_lcm, (n // math.gcd(n, v) for v, n in zip(label, group.orders)), 1)
    parity = 0 if values[q - 1].real > 0 else 1
    return DirichletCharacter(q, label, values, parity, order, _conductor(values, group.units, q))


@lru_cache(maxsize=64)
def _enumerate(q):
    group = _unit_group(q)
    return tuple(character(q, lab) for lab in product(*(range(n) for n in group.orders)))


def enumerate_characters(q):
    """All phi(q) characters mod q, ordered lexicographically by label."""
    if q < 2:
        raise DomainError(f"modulus must be >= 2, got {q}")
    return list(_enumerate(q))


def primitive_characters(q):
    return [c for c in _enumerate(q) if c.primitive]


def parse_label(text):
    text = text.strip()
    if not text:
        return ()
    return tuple(int(v) for v in text.split(","))


def is_primitive(chi):
    return chi.primitive


@dataclass(frozen=True)
class GaussSumResult:
    value: complex
    epsilon_factor: complex
    magnitude: float


def gauss_sum(chi):
    q = chi.modulus
    a = np.arange(q)
    twiddle = np.cos(2 * np.pi * a / q) + 1j * np.sin(2 * np.pi * a / q)
    tau = csum(chi.values * twiddle)
    eps = tau / ((1j) ** chi.parity * math.sqrt(q))
    return GaussSumResult(tau, eps, abs(tau))


def partial_sum_max(chi):
    """max over 1 <= x <= q of |sum_{n<=x} chi(n)|."""
    if chi.is_principal:
        raise DomainError("partial sums of the principal character grow linearly")
    partial = np.cumsum(np.roll(chi.values, -1))  # chi(1), ..., chi(q)
    return float(np.abs(partial).max())


def _character_prefix(chi, x):
    """sum_{n<=x} chi(n) for an integer array x >= 0."""
    q = chi.modulus
    # prefix[r] = sum_{n=1}^{r} chi(n), r = 0..q
    prefix = np.concatenate(([0j], np.cumsum(np.roll(chi.values, -1))))
    x = np.asarray(x, dtype=np.int64)
    return (x // q) * prefix[q] + prefix[x % q]


def _check_pair(chi1, chi2, tau, xi):
    if chi1.modulus != chi2.modulus:
        raise DomainError(f"moduli differ: {chi1.modulus} vs {chi2.modulus}")
    if tau < xi:
        raise DomainError(f"need tau >= xi, got tau={tau}, xi={xi}")
    if xi < 1:
        raise DomainError("xi must be >= 1")


def hyperbola_sum(chi1, chi2, tau, xi):
    """sum over m <= xi, mn <= tau of chi1(m) chi2(n)."""
    _check_pair(chi1, chi2, tau, xi)
    m = np.arange(1, int(math.floor(xi)) + 1)
    inner = _character_prefix(chi2, np.floor(tau / m).astype(np.int64))
    return csum(chi1.at(m) * inner)


def hyperbola_sum_matrix(chars1, chars2, tau, xi):
    """hyperbola_sum for every pair, as a len(chars1) x len(chars2) array.

    Groups m by residue class so the cost is O(xi + q^2) per chi2.
    """
    q = chars1[0].modulus
    _check_pair(chars1[0], chars2[0], tau, xi)
    m = np.arange(1, int(math.floor(xi)) + 1)
    cuts = np.floor(tau / m).astype(np.int64)
    residues = m % q
    x1 = np.array([c.values for c in chars1])
    out = np.empty((len(chars1), len(chars2)), dtype=complex)
    for j, c2 in enumerate(chars2):
        inner = _character_prefix(c2, cuts)
        binned = np.bincount(residues, weights=inner.real, minlength=q) + 1j * np.bincount(
            residues, weights=inner.imag, minlength=q
        )
        out[:, j] = x1 @ binned
    return out
