"""Double L-functions L2(s1, s2; chi1, chi2) and the interpolation L2~(z).

The continued evaluators group the lattice (m, n) by l = mn. The weight of
l is a Dirichlet convolution of the two characters, so the far tail of
every sum collapses onto products of ordinary L-functions.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .characters import character, gauss_sum, parse_label, partial_sum_max
from .dirichlet_l import l_function
from .errors import DomainError
from .special_fn import (
    ASYMPTOTIC_CAP,
    PSI_TOL,
    complex_gamma,
    gamma_trig,
    oscillatory_integral,
    pochhammer,
    tricomi_psi,
)
from .summation import csum

_EPS = 2.0**-52
TWO_PI = 2 * math.pi
MARGIN = 0.2
METHODS = ("direct", "psi-series", "integral")
_ALIASES = {"psi": "psi-series", "psi_series": "psi-series", "integral-repr": "integral"}
REFERENCE_PRIORITY = ("psi-series", "integral", "direct")

# Gauss-Legendre rule for the short integrals in the periodic tail correction
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)
_EM_COEFFS = (1 / 12, -1 / 720, 1 / 30240)
_EM_NEXT = 1 / 1209600


@dataclass(frozen=True)
class EvalRequest:
    s1: complex
    s2: complex
    modulus: int
    chi1_label: tuple
    chi2_label: tuple
    z: complex = 0j
    method: str = "psi-series"
    tolerance: float = 1e-12
    m_direct: int = 4000
    m_remainder: int | None = None
    n_order: int = 3

    def __post_init__(self):
        for name in ("s1", "s2", "z"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for name in ("chi1_label", "chi2_label"):
            label = getattr(self, name)
            if isinstance(label, str):
                label = parse_label(label)
            object.__setattr__(self, name, tuple(int(v) for v in label))
        method = _ALIASES.get(self.method, self.method)
        if method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        object.__setattr__(self, "method", method)
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def for_characters(cls, s1, s2, chi1, chi2, **kw):
        if chi1.modulus != chi2.modulus:
            raise DomainError("characters must share a modulus")
        return cls(s1, s2, chi1.modulus, chi1.label, chi2.label, **kw)

    def characters(self):
        return character(self.modulus, self.chi1_label), character(self.modulus, self.chi2_label)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    method: str
    error_estimate: float
    terms_summed: int
    elapsed: float
    partitions: int = 1


@dataclass(frozen=True)
class MainTermResult:
    main_term: complex
    cutoff: float
    lattice_points: int
    residual: complex | None
    delta: float
    parity_branch: int
    reference_method: str | None = None
    reference_error: float | None = None


@dataclass(frozen=True)
class BoundComparison:
    ratio: float
    predicted: float
    delta: float
    parity_branch: int
    epsilon: float


def evaluate(req):
    """Dispatch on ``req.method``."""
    return {"direct": direct_sum, "psi-series": psi_series, "integral": integral_repr}[req.method](req)


# ---------------------------------------------------------------- shared pieces


def _primitive_pair(req):
    chi1, chi2 = req.characters()
    for name, chi in (("chi1", chi1), ("chi2", chi2)):
        if not chi.primitive:
            raise DomainError(f"{name} = {chi.label_str} mod {chi.modulus} is not primitive")
    return chi1, chi2


def _ell_weights(chi1, chi2, w, top):
    """a(l) = sum_{mn=l} chi1(m) conj(chi2(n)) m^w for l <= top, and a bound on |a(l)|."""
    q = chi1.modulus
    ms = np.arange(1, top + 1)
    # every (m, n) with mn <= top, m-major so bincount accumulates in a fixed order
    counts = top // ms
    m = np.repeat(ms, counts)
    n = np.arange(m.size) - np.repeat(np.cumsum(counts) - counts, counts) + 1
    ell = m * n
    head = chi1.values[m % q] * np.exp(w * np.log(m))
    c2 = np.conj(chi2.values)[n % q]
    terms = head * c2
    out = np.bincount(ell, terms.real, top + 1) + 1j * np.bincount(ell, terms.imag, top + 1)
    mag = np.bincount(ell, np.abs(head) * np.abs(c2), top + 1)
    return out, mag


def _lattice_count(top):
    return int((top // np.arange(1, top + 1)).sum()) if top >= 1 else 0


def _divisor_tail(p, start):
    """Generous bound for sum_{l > start} d(l) l^-p, p > 1."""
    if p <= 1:
        return math.inf
    lo = math.log(start)
    return 2 * start ** (1 - p) * ((lo + 1.2) / (p - 1) + 1 / (p - 1) ** 2)


def _asymptotic_threshold(a, b, cap, rel=1e-16):
    """|x| beyond which cap terms of the expansion of Psi resolve it to ``rel``."""
    r = [max(abs(a + k) * abs(b + k) / (k + 1), 1e-300) for k in range(cap)]
    geo = math.exp((sum(math.log(v) for v in r) - math.log(rel)) / cap)
    return max(max(r), geo)


@lru_cache(maxsize=4096)
def _lval(s, chi):
    r = l_function(s, chi)
    return r.value, r.error_estimate


def _tail(weights, coeffs, exps, ks, L1, L2, growth, product):
    """sum_k coeffs[k] sum_{l > L1} a(l) l^-exps[k].

    Each k either uses the closed form (product(k) minus the head up to L1)
    or sums the band L1 < l <= L2 and bounds the rest, whichever error is
    smaller.
    """
    a, mag = weights
    logl = np.log(np.arange(1, L2 + 1))
    parts, err = [], 0.0
    for k in ks:
        ck = coeffs[k]
        if ck == 0:
            continue
        pw = np.exp(-exps[k] * logl)
        terms = a[1:] * pw
        abs_terms = mag[1:] * np.abs(pw)
        head, band = csum(terms[:L1]), csum(terms[L1:])
        band_err = abs(ck) * (
            _divisor_tail(exps[k].real - growth, L2) + 8 * _EPS * float(abs_terms[L1:].sum())
        )
        ll, ll_err = product(k)
        diff_err = abs(ck) * (8 * _EPS * (abs(ll) + float(abs_terms[:L1].sum())) + ll_err)
        if diff_err <= band_err:
            parts.append(ck * (ll - head))
            err += diff_err
        else:
            parts.append(ck * band)
            err += band_err
    return csum(parts), err


# ---------------------------------------------------------------- direct summation


def _g_derivative(order, z, s2, m, u, magnitude=False):
    """d^order/du^order of u^-z (m+u)^-s2 (m a column, u a row)."""
    logu, logmu = np.log(u), np.log(m + u)
    total = 0
    for i in range(order + 1):
        c = math.comb(order, i) * pochhammer(z, i) * pochhammer(s2, order - i)
        if magnitude:
            total = total + abs(c) * np.exp(-(z.real + i) * logu - (s2.real + order - i) * logmu)
        else:
            total = total + c * np.exp(-(z + i) * logu - (s2 + order - i) * logmu)
    return total if magnitude else (-1) ** order * total


def _periodic_tail(chi2, z, s2, m, n_head):
    """sum_{n > n_head} chi2(n) n^-z (m+n)^-s2 per m, for q | n_head.

    Euler-Maclaurin on each residue class; the integral terms cancel across
    a full period except for short pieces over [n_head, n_head + r].
    """
    q = chi2.modulus
    r = np.arange(1, q + 1)
    c = chi2.at(r)
    m = m[:, None]
    nodes = (n_head + np.arange(q)[:, None] + (_GL_X + 1) / 2).ravel()
    g = np.exp(-z * np.log(nodes) - s2 * np.log(m + nodes)) * np.tile(_GL_W / 2, q)
    pieces = np.cumsum(g.reshape(m.shape[0], q, _GL_X.size).sum(axis=2), axis=1)
    u = (n_head + r).astype(float)
    part = -(pieces * c).sum(axis=1) / q + (_g_derivative(0, z, s2, m, u) * c).sum(axis=1) / 2
    for j, b in enumerate(_EM_COEFFS):
        k = 2 * j + 1
        part = part - b * q**k * (_g_derivative(k, z, s2, m, u) * c).sum(axis=1)
    nxt = _EM_NEXT * q**7 * (_g_derivative(7, z, s2, m, u, magnitude=True) * np.abs(c)).sum(axis=1)
    return part, 2 * nxt


def _power_tail(alpha, start, with_log=False):
    """int_start^inf u^-alpha (log u if with_log) du, alpha > 1."""
    d = alpha - 1
    head = start ** (-d)
    if with_log:
        return head * (math.log(start) / d + 1 / d**2)
    return head / d


def _n_head(q, s2, z):
    """Columns summed directly; a multiple of q well past the derivative scale."""
    return q * math.ceil(max(64 / q, 2 * (abs(s2) + abs(z) + 8)))


def _direct_domain(s1, s2, z):
    x = z.real
    checks = (
        (s2.real > 1 + max(0.0, -x) + MARGIN, "Re(s2) > 1 + max(0, -Re z) + 0.2"),
        (s1.real + s2.real + x > 2 + MARGIN, "Re(s1) + Re(s2) + Re(z) > 2.2"),
        (s2.real + x > 1 + MARGIN, "Re(s2) + Re(z) > 1.2"),
        (s1.real + s2.real > 1 + MARGIN, "Re(s1) + Re(s2) > 1.2"),
    )
    for ok, text in checks:
        if not ok:
            raise DomainError(f"direct summation needs {text} (s1={s1}, s2={s2}, z={z})")


def direct_term(s1, s2, z, chi1, chi2, m, n):
    """One lattice term chi1(m) chi2(n) m^-s1 n^-z (m+n)^-s2."""
    s1, s2, z = complex(s1), complex(s2), complex(z)
    return complex(
        chi1(m) * chi2(n) * cmath.exp(-s1 * math.log(m) - z * math.log(n) - s2 * math.log(m + n))
    )


def direct_sum(req):
    """The defining double series, head summed exactly.

    Rows m <= M are summed over n <= n_head directly and beyond n_head by a
    periodic Euler-Maclaurin correction; rows m > M are bounded by partial
    summation against chi2.
    """
    start = time.perf_counter()
    chi1, chi2 = req.characters()
    if chi2.is_principal:
        raise DomainError("direct summation needs a nonprincipal chi2")
    s1, s2, z = req.s1, req.s2, req.z
    _direct_domain(s1, s2, z)
    q = req.modulus
    big_m = int(req.m_direct)
    if big_m < 1:
        raise DomainError("M_direct must be positive")
    n_head = _n_head(q, s2, z)
    n = np.arange(1, n_head + 1)
    logn = np.log(n)
    c2n = chi2.at(n)
    rows, row_noise, em_err = [], 0.0, 0.0
    ms = np.arange(1, big_m + 1)
    ms = ms[chi1.at(ms) != 0]
    for block in np.array_split(ms, max(1, ms.size // 512)):
        logm = np.log(block)[:, None]
        terms = c2n * np.exp(-z * logn - s2 * np.log(block[:, None] + n))
        tail, tail_err = _periodic_tail(chi2, z, s2, block.astype(float), n_head)
        weight = chi1.at(block) * np.exp(-s1 * logm[:, 0])
        rows.append(weight * (terms.sum(axis=1) + tail))
        aw = np.abs(weight)
        row_noise += float(aw @ np.abs(terms).sum(axis=1))
        em_err += float(aw @ tail_err)
    value = csum(np.concatenate(rows)) if rows else 0j

    x, s2r, sig = z.real, s2.real, s1.real + s2.real
    amp = abs(z) + abs(s2)
    bound = _power_tail(sig - max(0.0, -x), big_m)
    if x >= 0:
        bound += amp * _power_tail(sig, big_m, with_log=True)
    else:
        bound += amp / -x * _power_tail(sig + x, big_m)
    bound += amp / (x + s2r) * _power_tail(sig + x, big_m)
    bound *= partial_sum_max(chi2)
    err = bound + em_err + 8 * _EPS * row_noise
    return EvalResult(
        value, "direct", float(err), big_m * n_head, time.perf_counter() - start
    )


# ---------------------------------------------------------------- Psi-series continuation


@lru_cache(maxsize=64)
def _psi_table(a, c, q, top):
    """Psi(a, c; +-2 pi i l/q) for l = 1..top with their error bounds."""
    out = np.empty((4, top), dtype=complex)
    for ell in range(1, top + 1):
        x = TWO_PI * ell / q
        plus, minus = tricomi_psi(a, c, 1j * x), tricomi_psi(a, c, -1j * x)
        out[:, ell - 1] = plus.value, minus.value, plus.remainder_bound, minus.remainder_bound
    out.setflags(write=False)
    return out


def _ell_bounds(L1, m_remainder):
    L2 = max(8000, 4 * L1) if m_remainder is None else int(m_remainder)
    if L2 < L1:
        raise DomainError(f"M_remainder={L2} is below the Psi-table cutoff {L1}")
    return L2


def psi_series(req):
    """Continuation through the confluent hypergeometric function Psi.

    value = eps(chi2) Gamma(1-z)/sqrt(q) [ sum_{k<N} c_k L(s1+s2+k, chi1) L(k+1-z, conj chi2) + R_N ]
    """
    start = time.perf_counter()
    chi1, chi2 = _primitive_pair(req)
    s1, s2, z = req.s1, req.s2, req.z
    if not s1.real + s2.real > 0:
        raise DomainError("psi-series needs Re(s1) + Re(s2) > 0")
    if not z.real < 1:
        raise DomainError("psi-series needs Re(z) < 1")
    a, c = 1 - z, 2 - s2 - z
    if abs(c - round(c.real)) < 1e-6:
        raise DomainError(f"2 - s2 - z = {c} is (nearly) an integer")
    big_k = ASYMPTOTIC_CAP
    big_n = int(req.n_order)
    if not 1 <= big_n < big_k:
        raise DomainError(f"N_order must lie in [1, {big_k - 1}], got {big_n}")
    q, kappa = req.modulus, chi2.parity
    b = s2
    L1 = max(1, math.ceil(_asymptotic_threshold(a, b, big_k) * q / TWO_PI))
    L2 = _ell_bounds(L1, req.m_remainder)

    log_step = math.log(TWO_PI / q)
    coeffs, exps, poch = [], [], 1 + 0j
    for k in range(big_k + 1):
        e = k + 1 - z
        trig = 2 * cmath.cos(math.pi * (z - k - 1 + kappa) / 2)
        coeffs.append((-1) ** k * poch * cmath.exp(-e * log_step) * trig)
        exps.append(e)
        poch *= (a + k) * (b + k) / (k + 1)
    # |coefficient| of the first neglected term, without the cosine factor
    rho_k = abs(coeffs[big_k]) / max(abs(cmath.cos(math.pi * (z - big_k - 1 + kappa) / 2)), 1e-300) / 2

    w = 1 - s1 - s2 - z
    weights = _ell_weights(chi1, chi2, w, L2)
    growth = max(0.0, w.real)
    chi2c = chi2.conjugate()

    def product(k):
        l1, e1 = _lval(s1 + s2 + k, chi1)
        l2, e2 = _lval(complex(k + 1 - z), chi2c)
        return l1 * l2, abs(l1) * e2 + abs(l2) * e1

    main, main_err = [], 0.0
    for k in range(big_n):
        ll, ll_err = product(k)
        main.append(coeffs[k] * ll)
        main_err += abs(coeffs[k]) * (ll_err + 4 * _EPS * abs(ll))

    table = _psi_table(a, c, q, L1)
    ell = np.arange(1, L1 + 1)
    logl = np.log(ell)
    phi = 1j**kappa * table[0] + (-1j) ** kappa * table[1]
    asym = np.zeros(L1, dtype=complex)
    asym_abs = np.zeros(L1)
    for k in range(big_n):
        t = coeffs[k] * np.exp(-exps[k] * logl)
        asym += t
        asym_abs += np.abs(t)
    aw, mag = weights[0][1 : L1 + 1], weights[1][1 : L1 + 1]
    head = csum(aw * (phi - asym))
    head_err = float(mag @ (table[2].real + table[3].real)) + 8 * _EPS * float(
        mag @ (np.abs(phi) + asym_abs)
    )

    tail, tail_err = _tail(weights, coeffs, exps, range(big_n, big_k), L1, L2, growth, product)
    neglect = 4 * rho_k * _divisor_tail(big_k + 1 - z.real - growth, L1)

    bracket = csum(main) + head + tail
    pref = gauss_sum(chi2).epsilon_factor * complex_gamma(1 - z) / math.sqrt(q)
    value = pref * bracket
    err = abs(pref) * (main_err + head_err + tail_err + neglect) + 8 * _EPS * abs(value)
    return EvalResult(value, "psi-series", float(err), _lattice_count(L2), time.perf_counter() - start)


# ---------------------------------------------------------------- integral representation


def _osc_combination(xi, cos_part, sin_part, kappa):
    if kappa == 0:
        return math.cos(xi) * cos_part + math.sin(xi) * sin_part
    return -math.sin(xi) * cos_part + math.cos(xi) * sin_part


@lru_cache(maxsize=64)
def _oscillatory_table(s2, q, top):
    out = np.empty((2, top), dtype=complex)
    for ell in range(1, top + 1):
        r = oscillatory_integral(TWO_PI * ell / q, s2)
        out[:, ell - 1] = r.cosine_part, r.sine_part
    out.setflags(write=False)
    return out


def integral_term(s1, s2, chi1, chi2, m, n):
    """One (m, n) term of the integral representation, prefactor included."""
    s1, s2 = complex(s1), complex(s2)
    q = chi2.modulus
    xi = TWO_PI * m * n / q
    r = oscillatory_integral(xi, s2)
    f = _osc_combination(xi, r.cosine_part, r.sine_part, chi2.parity)
    coef = chi1(m) * np.conj(chi2(n)) * cmath.exp(-s1 * math.log(m) + (s2 - 1) * math.log(n))
    return complex(_integral_prefactor(s2, chi2) * coef * f)


def _integral_prefactor(s2, chi2):
    q = chi2.modulus
    return 2 * cmath.exp((s2 - 1) * math.log(TWO_PI) + (0.5 - s2) * math.log(q)) * gauss_sum(
        chi2
    ).epsilon_factor


def integral_repr(req):
    """Representation through oscillatory integral tails.

    Terms with 2 pi l/q below the asymptotic threshold use the integrals
    themselves; beyond it their large-xi expansions are summed in closed
    form.
    """
    start = time.perf_counter()
    chi1, chi2 = _primitive_pair(req)
    s1, s2 = req.s1, req.s2
    if req.z != 0:
        raise DomainError("integral representation is implemented for z = 0 only")
    if not s2.real > 0:
        raise DomainError("integral representation needs Re(s2) > 0")
    if not s1.real + s2.real > 1 + MARGIN:
        raise DomainError("integral representation needs Re(s1) + Re(s2) > 1.2")
    big_k = ASYMPTOTIC_CAP
    q, kappa = req.modulus, chi2.parity
    L1 = max(1, math.ceil(_asymptotic_threshold(1, s2, big_k) * q / TWO_PI))
    L2 = _ell_bounds(L1, req.m_remainder)

    w = 1 - s1 - s2
    weights = _ell_weights(chi1, chi2, w, L2)
    growth = max(0.0, w.real)
    chi2c = chi2.conjugate()

    table = _oscillatory_table(s2, q, L1)
    ell = np.arange(1, L1 + 1)
    xi = TWO_PI * ell / q
    if kappa == 0:
        f = np.cos(xi) * table[0] + np.sin(xi) * table[1]
    else:
        f = -np.sin(xi) * table[0] + np.cos(xi) * table[1]
    lift = np.exp((s2 - 1) * np.log(ell))
    aw, mag = weights[0][1 : L1 + 1], weights[1][1 : L1 + 1]
    head = csum(aw * lift * f)
    scale = mag * np.abs(lift) * (np.abs(table[0]) + np.abs(table[1]))
    head_err = (PSI_TOL + 8 * _EPS) * float(scale.sum())

    # sum_l b(l) xi^(-s2-k) = (2 pi/q)^(-s2-k) sum_l a(l) l^(-k-1)
    log_step = math.log(TWO_PI / q)
    coeffs, exps, poch = [], [], 1 + 0j
    for k in range(big_k + 1):
        sign = (1, 0, -1, 0)[(k + 1 - kappa) % 4]
        coeffs.append((-1) ** k * sign * poch * cmath.exp(-(s2 + k) * log_step))
        exps.append(complex(k + 1))
        poch *= s2 + k

    def product(k):
        l1, e1 = _lval(s1 + s2 + k, chi1)
        l2, e2 = _lval(complex(k + 1), chi2c)
        return l1 * l2, abs(l1) * e2 + abs(l2) * e1

    tail, tail_err = _tail(weights, coeffs, exps, range(big_k), L1, L2, growth, product)
    nxt = max(abs(coeffs[big_k]), abs(coeffs[big_k - 1]) * abs(s2 + big_k) / (TWO_PI / q))
    neglect = 4 * nxt * _divisor_tail(big_k + 1 - growth, L1)

    pref = _integral_prefactor(s2, chi2)
    value = pref * (head + tail)
    err = abs(pref) * (head_err + tail_err + neglect) + 8 * _EPS * abs(value)
    return EvalResult(value, "integral", float(err), _lattice_count(L2), time.perf_counter() - start)


# ---------------------------------------------------------------- explicit main term


def theorem2_main_term(s1, s2, chi1, chi2, with_reference=True):
    """Explicit finite sum over mn <= q|t2|/2pi approximating L2 in the strip."""
    s1, s2 = complex(s1), complex(s2)
    if not 0 < s2.real < 1:
        raise DomainError("main term needs 0 < Re(s2) < 1")
    if not s1.real + s2.real > 0:
        raise DomainError("main term needs Re(s1) + Re(s2) > 0")
    if abs(s2.imag) < 2:
        raise DomainError("main term needs |t2| >= 2")
    if chi1.modulus != chi2.modulus:
        raise DomainError("characters must share a modulus")
    for name, chi in (("chi1", chi1), ("chi2", chi2)):
        if not chi.primitive:
            raise DomainError(f"{name} = {chi.label_str} mod {chi.modulus} is not primitive")
    q, kappa = chi2.modulus, chi2.parity
    cutoff = q * abs(s2.imag) / TWO_PI
    top = math.floor(cutoff)
    delta = max(0.0, 1 - s1.real - s2.real)
    main = 0j
    if top >= 1:
        a, _ = _ell_weights(chi1, chi2, 1 - s1 - s2, top)
        ell = np.arange(1, top + 1)
        # Gamma(1-s2) (sin, cos)(pi s2/2 + 2 pi r/q) per residue r of l
        trig = np.array([gamma_trig(s2, TWO_PI * r / q)[kappa] for r in range(q)])
        terms = a[1:] * np.exp((s2 - 1) * np.log(ell)) * trig[ell % q]
        pref = 2 * cmath.exp((s2 - 1) * math.log(TWO_PI) - s2 * math.log(q)) * gauss_sum(chi2).value
        if kappa:
            pref /= 1j
        main = pref * csum(terms)

    residual = ref_method = ref_err = None
    if with_reference:
        for method in REFERENCE_PRIORITY:
            try:
                ref = evaluate(EvalRequest.for_characters(s1, s2, chi1, chi2, method=method))
            except DomainError:
                continue
            residual, ref_method, ref_err = ref.value - main, method, ref.error_estimate
            break
    return MainTermResult(
        main, cutoff, _lattice_count(top), residual, delta, kappa, ref_method, ref_err
    )


def theorem1_predicted(q, s1, s2, kappa, epsilon=0.1):
    """Growth allowance (q|t2|)^(1/2+delta+eps), plus the odd-case term."""
    s1, s2 = complex(s1), complex(s2)
    delta = max(0.0, 1 - s1.real - s2.real)
    qt = q * abs(s2.imag)
    pred = qt ** (0.5 + delta + epsilon)
    if kappa:
        pred += (1 + abs(s1.imag + s2.imag)) * q ** (1.5 + epsilon) * qt ** (
            -min(1.0, (s1.real + s2.real) / 2) + epsilon
        )
    return pred, delta


def theorem1_bound_check(s1, s2, chi1, chi2, value, epsilon=0.1):
    pred, delta = theorem1_predicted(chi2.modulus, s1, s2, chi2.parity, epsilon)
    return BoundComparison(abs(complex(value)) / pred, pred, delta, chi2.parity, epsilon)
