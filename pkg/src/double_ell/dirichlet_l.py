"""Dirichlet L-functions and the hyperbola-truncated product of two of them."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli, factorial

from .errors import DomainError, PoleError
from .summation import csum

# B_2j/(2j)! for j = 1..EM_TERMS; the series is cut at its least term
EM_TERMS = 30
_J = np.arange(1, EM_TERMS + 2)
_EM_COEFFS = bernoulli(2 * EM_TERMS + 2)[2::2] / factorial(2 * _J)
EM_TOL = 1e-15


def _expm1_over(w):
    """(e^w - 1)/w elementwise, stable at w -> 0."""
    w = np.asarray(w, dtype=complex)
    small = np.abs(w) < 1e-5
    safe = np.where(small, 1.0, w)
    return np.where(small, 1 + w / 2 + w * w / 6, np.expm1(safe) / safe)


def _em_corrections(s, logb):
    """sum_j B_2j/(2j)! (s)_(2j-1) b^(-s-2j+1) up to the least term.

    Returns the correction per column of ``logb`` and the magnitude of the
    first omitted term (doubled), which sizes the truncation error.
    """
    logb = np.asarray(logb, dtype=float)
    inv_b2 = np.exp(-2 * logb)
    term = s * np.exp(-(s + 1) * logb)  # (s)_1 b^(-s-1)
    corr = np.zeros(logb.shape, dtype=complex)
    prev = np.inf
    for j in range(EM_TERMS):
        piece = _EM_COEFFS[j] * term
        mag = float(np.abs(piece).max())
        if mag >= prev:
            return corr, 2 * np.abs(piece)
        corr += piece
        prev = mag
        term = term * (s + 2 * j + 1) * (s + 2 * j + 2) * inv_b2
    return corr, 2 * np.abs(_EM_COEFFS[EM_TERMS] * term)


def _euler_maclaurin(s, alphas, m, weights=None):
    """Euler-Maclaurin sums for zeta(s, alpha) at cutoff m, weighted over alphas.

    With ``weights`` summing to zero the pole term is replaced by its
    regular part, so s = 1 is allowed.
    """
    alphas = np.asarray(alphas, dtype=float)
    n = np.arange(m)[:, None] + alphas[None, :]
    head = np.exp(-s * np.log(n))
    big = m + alphas
    logb = np.log(big)
    if weights is None:
        pole = np.exp((1 - s) * logb) / (s - 1)
    else:
        pole = -logb * _expm1_over((1 - s) * logb)
    bern, nxt = _em_corrections(s, logb)
    corr = np.exp(-s * logb) / 2 + bern
    # roundoff of the head sum matters once Re(s) < 0
    noise = 4 * 2.0**-52 * (np.abs(head).sum(axis=0) + np.abs(pole))
    if weights is None:
        cols = [csum(head[:, i]) + pole[i] + corr[i] for i in range(alphas.size)]
        return np.array(cols), nxt, noise
    w = np.asarray(weights)
    total = csum(head * w[None, :]) + csum(w * (pole + corr))
    aw = np.abs(w)
    return total, float(aw @ nxt), float(aw @ noise)


def _check_s(s):
    if s.real <= -2:
        raise DomainError(f"continuation supported for Re(s) > -2 only, got s={s}")


def _em_cutoff(s, alpha):
    # the Bernoulli terms shrink like |s|^2 / (2 pi b)^2, so b ~ |s|/4 suffices
    return max(8, int(abs(s) / 4) + 8 - int(alpha))


def hurwitz_zeta(s, a):
    """zeta(s, a) = sum_{n>=0} (n+a)^-s, continued to Re(s) > -2."""
    s = complex(s)
    if abs(s - 1) < 1e-9:
        raise PoleError("zeta(s, a) has a pole at s = 1", 1)
    _check_s(s)
    if not 0 < a <= 1:
        raise DomainError(f"a must lie in (0, 1], got {a}")
    m = _em_cutoff(s, a)
    while True:
        val, trunc, noise = _euler_maclaurin(s, [a], m)
        if trunc[0] <= max(EM_TOL * abs(val[0]), noise[0]) or m > 10**7:
            return complex(val[0])
        m *= 2


@dataclass(frozen=True)
class LValue:
    s: complex
    character_label: str
    value: complex
    method: str
    error_estimate: float


def l_function(s, chi, method="hurwitz-continuation", terms=10**6):
    """L(s, chi) for nonprincipal chi.

    ``hurwitz-continuation``: q^-s sum_a chi(a) zeta(s, a/q) (all Re(s) > -2).
    ``direct-series``: partial sum over n <= terms (Re(s) > 1), with a
    partial-summation tail bound.
    """
    s = complex(s)
    if chi.is_principal:
        raise DomainError("L(s, chi) is evaluated for nonprincipal chi only")
    _check_s(s)
    q = chi.modulus
    if method == "direct-series":
        if s.real <= 1:
            raise DomainError("direct series needs Re(s) > 1")
        n_max = (terms // q) * q
        n = np.arange(1, n_max + 1)
        value = csum(chi.at(n) * np.exp(-s * np.log(n)))
        partial = np.abs(np.cumsum(np.roll(chi.values, -1))).max()
        err = partial * (1 + abs(s) / s.real) * n_max ** (-s.real)
        return LValue(s, chi.label_str, value, method, float(err))
    if method != "hurwitz-continuation":
        raise ValueError(f"unknown method {method!r}")
    residues = np.array([a for a in range(1, q + 1) if chi.values[a % q] != 0])
    weights = chi.values[residues % q]
    m = _em_cutoff(s, 0)
    while True:
        total, trunc, noise = _l_series(s, q, residues, weights, m)
        if trunc <= max(EM_TOL * abs(total), noise) or m > 10**7:
            break
        m *= 2
    return LValue(s, chi.label_str, total, method, float(trunc + noise))


def _l_series(s, q, residues, weights, m):
    """sum_n chi(n) n^-s: n <= q m summed directly, the rest by Euler-Maclaurin.

    Forming n^-s directly (rather than q^-s (j + a/q)^-s) keeps the phase
    error of each term at eps |s| log n.
    """
    n = np.arange(m)[:, None] * q + residues[None, :]
    logn = np.log(n)
    head = weights[None, :] * np.exp(-s * logn)
    big = m + residues / q
    logb = np.log(big)
    bern, nxt = _em_corrections(s, logb)
    corr = -logb * _expm1_over((1 - s) * logb) + np.exp(-s * logb) / 2 + bern
    scale = cmath.exp(-s * math.log(q))
    tail = scale * csum(weights * corr)
    trunc = abs(scale) * float(np.abs(weights) @ nxt)
    # independent rounding of each term, each off by about eps (1 + |s log n|)
    spread = np.abs(head) * (1 + abs(s) * logn)
    noise = 4 * 2.0**-52 * (
        math.sqrt(float((spread * spread).sum()))
        + float(spread.max())
        + abs(tail) * (1 + abs(s) * math.log(q * m + q))
    )
    return csum(head) + tail, trunc, noise


def l_tail(s, chi, start):
    """sum_{n >= start} chi(n) n^-s (nonprincipal chi, continued)."""
    q = chi.modulus
    s = complex(s)
    residues = np.arange(start, start + q)
    weights = chi.at(residues)
    keep = weights != 0
    alphas = residues[keep] / q  # zeta(s, (start+r)/q) includes n = start + r + qj
    m = max(4, _em_cutoff(s, start / q))
    while True:
        total, trunc, noise = _euler_maclaurin(s, alphas, m, weights[keep])
        if trunc <= max(EM_TOL * abs(total), noise) or m > 10**7:
            break
        m *= 2
    return total * cmath.exp(-s * math.log(q))


# ---------------------------------------------------------------- product approximation


@dataclass(frozen=True)
class ProductApproximation:
    truncated_sum: complex
    true_product: complex
    residual: float
    bound_prediction: float
    case: str


def hyperbola_dirichlet_sum(z1, z2, chi1, chi2, tau):
    """sum_{mn <= tau} chi1(m) chi2(n) m^-z1 n^-z2."""
    top = int(math.floor(tau))
    if top < 1:
        return 0j
    n = np.arange(1, top + 1)
    inner = np.concatenate(([0j], np.cumsum(chi2.at(n) * np.exp(-z2 * np.log(n)))))
    cuts = np.floor(tau / n).astype(np.int64)
    return csum(chi1.at(n) * np.exp(-z1 * np.log(n)) * inner[cuts])


def product_bound(z1, z2, q, tau, band=1e-9):
    x1, x2 = z1.real, z2.real
    lq = math.log(q)
    first = (1 + abs(z1) + abs(z2) + abs(z1 * z2)) * q * lq**2 * tau ** (-min(x1, x2))
    diff = (z1 - z2).real
    if abs(diff - 1) < band:
        case, shape = "diff=1", tau ** (-x2) * math.log(tau)
    elif diff > 1:
        case, shape = "diff>1", tau ** (-x2)
    else:
        case, shape = "diff<1", tau ** ((1 - x1 - x2) / 2)
    return first + (1 + abs(z1 - z2)) * math.sqrt(q) * lq * shape, case


def truncated_product(z1, z2, chi1, chi2, tau):
    z1, z2 = complex(z1), complex(z2)
    if chi1.modulus != chi2.modulus:
        raise DomainError("characters must share a modulus")
    if chi1.is_principal or chi2.is_principal:
        raise DomainError("both characters must be nonprincipal")
    if not (z1.real > 0 and z2.real > 0 and z1.real + z2.real > 1):
        raise DomainError("need Re(z1) > 0, Re(z2) > 0, Re(z1) + Re(z2) > 1")
    if tau < 2:
        raise DomainError("tau must be >= 2")
    trunc = hyperbola_dirichlet_sum(z1, z2, chi1, chi2, tau)
    true = l_function(z1, chi1).value * l_function(z2, chi2).value
    bound, case = product_bound(z1, z2, chi1.modulus, tau)
    return ProductApproximation(trunc, true, abs(true - trunc), bound, case)
