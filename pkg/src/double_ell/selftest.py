"""Identity checks for the special functions, runnable without test tooling."""

from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special

from .special_fn import (
    X0,
    complex_gamma,
    kummer_1f1,
    tricomi_psi,
    upper_incomplete_gamma,
)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    points: int
    max_error: float
    tolerance: float
    passed: bool

    def as_dict(self):
        return asdict(self)


def _check(name, errors, tol):
    worst = float(max(errors)) if errors else 0.0
    return IdentityCheck(name, len(errors), worst, tol, worst <= tol)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _lower_gamma_series(a, z):
    """gamma(a, z) = z^a sum_k (-z)^k / (k! (a+k)), for moderate |z|."""
    total, term, k = 0j, 1 + 0j, 0
    while True:
        piece = term / (a + k)
        total += piece
        if abs(piece) < 1e-18 * abs(total) and k > abs(z):
            return cmath.exp(a * cmath.log(z)) * total
        k += 1
        term *= -z / k


def kummer_transform_check(rng, n, tol=1e-9):
    errors = []
    for _ in range(n):
        s2 = complex(rng.uniform(0.1, 1.5), rng.uniform(-20, 20))
        z = complex(rng.uniform(-1, 0.5), rng.uniform(-1, 1)) if rng.random() < 0.5 else 0j
        a, c = 1 - z, 2 - s2 - z
        x = rng.uniform(0.5, 2 * X0) * cmath.exp(1j * rng.choice([0.5, -0.5, 0.25, 0.0]) * math.pi)
        lhs = tricomi_psi(a, c, x).value
        rhs = cmath.exp((1 - c) * cmath.log(x)) * tricomi_psi(a - c + 1, 2 - c, x).value
        errors.append(_rel(lhs, rhs))
    return _check("kummer-transform", errors, tol)


def incomplete_gamma_check(rng, n, tol=1e-9):
    """Psi route against scipy (real arguments) and the lower-gamma series (complex)."""
    errors = []
    for i in range(n):
        if i % 2 == 0:
            a, z = rng.uniform(0.2, 5), rng.uniform(0.1, 20)
            ref = special.gammaincc(a, z) * special.gamma(a)
        else:
            a = complex(rng.uniform(0.2, 2), rng.uniform(-8, 8))
            z = complex(rng.uniform(-3, 3), rng.uniform(-6, 6))
            ref = complex_gamma(a) - _lower_gamma_series(a, z)
        errors.append(_rel(upper_incomplete_gamma(a, z), ref))
    return _check("incomplete-gamma-relation", errors, tol)


def recurrence_check(rng, n, tol=1e-9):
    errors = []
    for _ in range(n):
        a = complex(rng.uniform(-0.9, 2), rng.uniform(-20, 20))
        z = rng.uniform(0.5, 60) * cmath.exp(1j * rng.uniform(-0.5, 0.5) * math.pi)
        lhs = upper_incomplete_gamma(a + 1, z)
        rhs = a * upper_incomplete_gamma(a, z) + cmath.exp(a * cmath.log(z) - z)
        errors.append(_rel(lhs, rhs))
    return _check("gamma-recurrence", errors, tol)


def golden_1f1_check(tol=1e-10):
    cases = [
        (kummer_1f1(2, 5, 0), 1.0),
        (kummer_1f1(1.7, 1.7, 1), math.e),
        (kummer_1f1(1, 2, 1), math.e - 1),
        (kummer_1f1(1, 2, 3j), (cmath.exp(3j) - 1) / 3j),
        (kummer_1f1(0.5, 1.5, -1), math.sqrt(math.pi) * math.erf(1) / 2),
        (kummer_1f1(-3, 2, 2.5), 1 - 3 * 2.5 / 2 + 3 * 2.5**2 / 6 - 2.5**3 / 24),
    ]
    return _check("1f1-golden-values", [_rel(v, ref) for v, ref in cases], tol)


def gamma_recurrence_check(rng, n, tol=1e-10):
    errors = []
    for _ in range(n):
        s = complex(rng.uniform(-3, 3), rng.uniform(-30, 30))
        errors.append(_rel(complex_gamma(s + 1), s * complex_gamma(s)))
    return _check("complete-gamma-recurrence", errors, tol)


def identity_suite(grid_size=200, seed=0):
    """Run every identity check on a seeded random grid."""
    rng = np.random.default_rng(seed)
    return [
        kummer_transform_check(rng, grid_size),
        incomplete_gamma_check(rng, max(grid_size // 4, 4)),
        recurrence_check(rng, max(grid_size // 4, 4)),
        golden_1f1_check(),
        gamma_recurrence_check(rng, max(grid_size // 4, 4)),
    ]
