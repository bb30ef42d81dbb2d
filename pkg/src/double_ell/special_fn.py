"""Complex-argument special functions.

Gamma, Kummer's 1F1, the Tricomi function Psi(a, c; x) (also written U),
the upper incomplete gamma function and the oscillatory tails

    C(xi, s) = int_xi^inf u^-s cos u du,   S(xi, s) = int_xi^inf u^-s sin u du.

Psi is evaluated in one of three regimes:

* ``convergent-series``: the two-term 1F1 combination. Exact in principle,
  but on the imaginary axis the series terms grow like e^|x| before
  cancelling, so the regime is used only when the measured cancellation
  leaves the requested accuracy.
* ``asymptotic``: the large-|x| expansion truncated at its least term.
* ``contour-quadrature``: Gauss-Legendre panels on the Laplace integral
  Psi(a,c;x) = Gamma(a)^-1 int_0^inf e^{-xt} t^{a-1} (1+t)^{c-a-1} dt,
  with the path bent through the saddle of the integrand so that its
  modulus never exceeds the modulus of the result by much.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma as _sp_loggamma

from .errors import DomainError, PoleError, RegimeError
from .summation import KahanAccumulator

X0 = 40.0
ASYMPTOTIC_CAP = 25
PSI_TOL = 1e-13
_EPS = 2.0**-52

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _finite(z, what="value"):
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ArithmeticError(f"non-finite {what}: {z}")
    return z


def _nearest_nonpositive_int(z, tol):
    n = round(z.real)
    if n <= 0 and abs(z - n) < tol:
        return n
    return None


def log_gamma(s):
    s = complex(s)
    pole = _nearest_nonpositive_int(s, 1e-9)
    if pole is not None:
        raise PoleError(f"Gamma has a pole at {pole}", pole)
    return complex(_sp_loggamma(s))


def complex_gamma(s):
    """Gamma(s) for complex s away from the poles 0, -1, -2, ..."""
    return _finite(cmath.exp(log_gamma(s)), "Gamma")


def rgamma(s):
    """1/Gamma(s), zero at the poles."""
    s = complex(s)
    if _nearest_nonpositive_int(s, 1e-13) is not None:
        return 0j
    return cmath.exp(-complex(_sp_loggamma(s)))


def _exp_over_gamma(logc, s):
    """exp(logc) / Gamma(s), formed in log space; inf when it overflows."""
    s = complex(s)
    if _nearest_nonpositive_int(s, 1e-13) is not None:
        return 0j
    e = logc - complex(_sp_loggamma(s))
    if e.real > 700:
        return complex(math.inf, 0.0)
    return cmath.exp(e)


def pochhammer(a, k):
    out = 1 + 0j
    for j in range(k):
        out *= a + j
    return out


def gamma_trig(s, phase=0.0):
    """Gamma(1-s) * (sin(pi s/2 + phase), cos(pi s/2 + phase)).

    Computed in log space: for large |Im s| the Gamma factor and the
    trigonometric factor are individually near under/overflow.
    """
    s = complex(s)
    lg = log_gamma(1 - s)
    w = 1j * (math.pi * s / 2 + phase)
    up = cmath.exp(lg + w)
    down = cmath.exp(lg - w)
    return (up - down) / 2j, (up + down) / 2


# ---------------------------------------------------------------- 1F1


def _kummer_series(a, c, x):
    """Sum of the defining series with its largest |term| and sum of |terms|."""
    acc = KahanAccumulator()
    term = 1 + 0j
    k = 0
    max_term = abs_sum = 0.0
    while True:
        acc.add(term)
        mag = abs(term)
        max_term = max(max_term, mag)
        abs_sum += mag
        if abs(a + k) < 1e-15:
            break  # terminating series
        term *= (a + k) * x / ((c + k) * (k + 1))
        k += 1
        if k > abs(c) + 1:
            r = abs(x) * max(1.0, (k + abs(a)) / (k + 1)) / (k - abs(c))
            if r < 0.5 and abs(term) / (1 - r) < 1e-16 * abs(acc.value):
                break
            if term == 0:
                break
        if k > 100_000:
            raise ArithmeticError("1F1 series did not converge")
    return acc.value, max_term, abs_sum, k


def kummer_1f1(a, c, x, x0=X0):
    """Kummer's confluent hypergeometric series 1F1(a, c; x) for |x| <= x0."""
    a, c, x = complex(a), complex(c), complex(x)
    pole = _nearest_nonpositive_int(c, 1e-9)
    if pole is not None:
        raise PoleError(f"1F1 undefined: c={c} is at a nonpositive integer", pole)
    if abs(x) > x0:
        raise RegimeError(f"|x|={abs(x):.4g} exceeds the series cutoff {x0}; use the asymptotic path")
    if x.real < 0 and _nearest_nonpositive_int(a, 1e-12) is None:
        # Kummer's transformation: the series in -x has no e^|x| cancellation
        # (a terminating series is exact as it stands)
        return _finite(cmath.exp(x) * _kummer_series(c - a, c, -x)[0], "1F1")
    return _finite(_kummer_series(a, c, x)[0], "1F1")


# ---------------------------------------------------------------- Psi


@dataclass(frozen=True)
class PsiEvaluation:
    value: complex
    regime: str
    terms_used: int
    remainder_bound: float


def _psi_series(a, c, x):
    if abs(c - round(c.real)) < 1e-6:
        raise DomainError(f"c={c} within 1e-6 of an integer: the two-term formula degenerates")
    f1, _, abs1, n1 = _kummer_series(a, c, x)
    f2, _, abs2, n2 = _kummer_series(a - c + 1, 2 - c, x)
    l1, l2 = log_gamma(1 - c), log_gamma(c - 1) + (1 - c) * cmath.log(x)
    p1 = _exp_over_gamma(l1, a - c + 1)
    p2 = _exp_over_gamma(l2, a)
    if math.isinf(abs(p1)) or math.isinf(abs(p2)):
        return complex(math.nan, math.nan), math.inf, n1 + n2
    value = p1 * f1 + p2 * f2
    # exp(log Gamma) carries an absolute error ~eps*|log Gamma| in the exponent
    err = 16 * _EPS * (abs(p1) * abs1 * (1 + abs(l1)) + abs(p2) * abs2 * (1 + abs(l2)))
    return value, err, n1 + n2


def asymptotic_terms(a, c, x, n):
    """First n terms (-1)^k (a)_k (a-c+1)_k / k! x^(-a-k) of the expansion of Psi."""
    a, c, x = complex(a), complex(c), complex(x)
    b = a - c + 1
    out = np.empty(n, dtype=complex)
    term = cmath.exp(-a * cmath.log(x))
    for k in range(n):
        out[k] = term
        term *= -(a + k) * (b + k) / ((k + 1) * x)
    return out


def _psi_asymptotic(a, c, x, cap):
    b = a - c + 1
    acc = KahanAccumulator()
    lead = -a * cmath.log(x)
    term = cmath.exp(lead)
    abs_sum = 0.0
    for k in range(cap):
        acc.add(term)
        abs_sum += abs(term)
        nxt = term * (-(a + k) * (b + k) / ((k + 1) * x))
        # x^-a carries eps |a log x|; each recursion step adds a few eps
        noise = 4 * _EPS * (1 + abs(lead) + k) * abs_sum
        if nxt == 0:
            return acc.value, noise, k + 1
        if abs(nxt) >= abs(term):
            # least term reached; the next one is the first omitted
            return acc.value, 2 * abs(nxt) + noise, k + 1
        term = nxt
    return acc.value, 2 * abs(term) + noise, cap


def _contour_nodes(a, p, x):
    """Quadrature nodes/weights for int_0^inf e^{-xt} t^{a-1} (1+t)^{-p} dt."""

    def logf(t):
        return -x * t + (a - 1) * cmath.log(t) - p * cmath.log(1 + t) if t != 0 else 0j

    def dlogf(t):
        return -x + (a - 1) / t - p / (1 + t)

    def d2logf(t):
        return -(a - 1) / t**2 + p / (1 + t) ** 2

    direction = x.conjugate() / abs(x)
    turn = (-p / x).real - 1.0  # real part of the saddle of e^{-xt}(1+t)^{-p}
    legs = [(0.0, 1 + 0j, turn), (turn, direction, math.inf)] if turn > 0 else [(0.0, direction, math.inf)]

    nodes, weights = [], []
    peak = -math.inf
    head = 1e-14 / (abs(x) + abs(p) + abs(a) + 1)
    for origin, dirn, r_end in legs:
        if origin == 0.0:
            r = head
            edges = [r]
        else:
            r = 0.0
            edges = [0.0]
        while len(edges) < 200_000:
            t = origin + dirn * r
            g1 = abs(dlogf(t))
            g2 = abs(d2logf(t))
            h = 1.0 / g1 if g1 > 0 else math.inf
            if g2 > 0:
                h = min(h, 1.0 / math.sqrt(g2))
            h = min(h, 0.5 * abs(1 + t))
            if origin == 0.0:
                h = min(h, r)
            r_next = r + h
            if r_next >= r_end:
                edges.append(r_end)
                break
            edges.append(r_next)
            r = r_next
            # panels scale with |t|, so |f t| measures their contribution
            tt = origin + dirn * r
            lf = logf(tt).real + math.log(abs(tt))
            peak = max(peak, lf)
            if r_end == math.inf and lf < peak - 45 and (dlogf(origin + dirn * r) * dirn).real < 0:
                break
        else:
            raise ArithmeticError("contour quadrature: too many panels")
        e = np.asarray(edges)
        lo, hi = e[:-1], e[1:]
        half = (hi - lo)[:, None] / 2
        rr = (lo[:, None] + half) + half * _GL_NODES[None, :]
        nodes.append((origin + dirn * rr).ravel())
        weights.append((dirn * half * _GL_WEIGHTS[None, :]).ravel())
    return np.concatenate(nodes), np.concatenate(weights), head, legs[0][1]


def _psi_contour(a, c, x):
    if a.real <= 0:
        raise RegimeError(f"contour representation needs Re(a) > 0, got a={a}")
    if x.imag == 0 and x.real < 0:
        raise RegimeError("contour representation needs x off the negative real axis")
    p = a + 1 - c
    t, w, rho, dirn = _contour_nodes(a, p, x)
    logf = -x * t + (a - 1) * np.log(t) - p * np.log1p(t)
    shift = logf.real.max()
    vals = np.exp(logf - shift) * w
    # the piece over [0, rho] from two terms of the integrand's expansion at 0
    lead = cmath.exp(a * (cmath.log(dirn) + math.log(rho)) - shift)
    head = lead * (1 / a - (x + p) * dirn * rho / (a + 1))
    total = complex(math.fsum(vals.real), math.fsum(vals.imag)) + head
    scale = math.fsum(np.abs(vals)) + abs(head)
    pref = cmath.exp(shift - log_gamma(a))
    value = total * pref
    err = 64 * _EPS * scale * abs(pref) + 1e-15 * abs(value)
    return value, err, t.size


def tricomi_psi(a, c, x, x0=X0, tol=PSI_TOL, cap=ASYMPTOTIC_CAP, regime=None):
    """Psi(a, c; x) on the principal branch.

    ``regime`` forces one evaluation path; by default the cheapest path whose
    own error estimate meets ``tol`` (relative) is used.
    """
    a, c, x = complex(a), complex(c), complex(x)
    if x == 0:
        raise DomainError("Psi(a, c; x) needs x != 0")
    if regime == "convergent-series":
        v, e, n = _psi_series(a, c, x)
        if math.isinf(e):
            raise RegimeError(f"the series prefactors overflow at a={a}, c={c}")
        return PsiEvaluation(_finite(v), regime, n, e)
    if regime == "asymptotic":
        v, e, n = _psi_asymptotic(a, c, x, cap)
        return PsiEvaluation(_finite(v), regime, n, e)
    if regime == "contour-quadrature":
        v, e, n = _psi_contour(a, c, x)
        return PsiEvaluation(_finite(v), regime, n, e)
    if regime is not None:
        raise ValueError(f"unknown regime {regime!r}")

    if abs(x) <= x0:
        if abs(c - round(c.real)) >= 1e-6:
            v, e, n = _psi_series(a, c, x)
            if e <= tol * abs(v):
                return PsiEvaluation(_finite(v), "convergent-series", n, e)
    else:
        v, e, n = _psi_asymptotic(a, c, x, cap)
        if e <= tol * abs(v):
            return PsiEvaluation(_finite(v), "asymptotic", n, e)
    # The Kummer transformation offers a second parameter pair; a large
    # |Im a| costs cancellation on a rotated ray, so try the smaller first.
    pairs = [(a, c, 1.0), (a - c + 1, 2 - c, None)]
    pairs = sorted((pr for pr in pairs if pr[0].real > 0), key=lambda pr: abs(pr[0].imag))
    best = None
    for a2, c2, f in pairs:
        if f is None:
            log_f = (1 - c) * cmath.log(x)
            if log_f.real > 700:
                continue  # the prefactor overflows; this pair cannot help
            f = cmath.exp(log_f)
        v, e, n = _psi_contour(a2, c2, x)
        v, e = v * f, e * abs(f)
        if best is None or e / max(abs(v), 1e-300) < best[1] / max(abs(best[0]), 1e-300):
            best = (v, e, n)
        if e <= tol * abs(v):
            break
    if best is None:
        raise RegimeError(f"no evaluation regime reaches tol={tol} at a={a}, c={c}, x={x}")
    return PsiEvaluation(_finite(best[0]), "contour-quadrature", best[2], best[1])


def psi_asymptotic_remainder(a, c, x, n, **kw):
    """rho_N: Psi minus the first N terms of its asymptotic expansion."""
    if n < 1:
        raise DomainError("N must be a positive integer")
    psi = tricomi_psi(a, c, x, **kw).value
    terms = asymptotic_terms(a, c, x, n)
    return psi - complex(math.fsum(terms.real), math.fsum(terms.imag))


# ---------------------------------------------------------------- incomplete gamma


def log_upper_incomplete_gamma(a, z, **kw):
    """log Gamma(a, z) (any branch of the log), via z^a e^-z Psi(1, a+1; z)."""
    a, z = complex(a), complex(z)
    if z == 0:
        raise DomainError("Gamma(a, z) is evaluated here only for z != 0")
    psi = tricomi_psi(1, a + 1, z, **kw).value
    return a * cmath.log(z) - z + cmath.log(psi)


def upper_incomplete_gamma(a, z, **kw):
    """Gamma(a, z) = int_z^inf e^-t t^(a-1) dt, principal branch."""
    return _finite(cmath.exp(log_upper_incomplete_gamma(a, z, **kw)), "Gamma(a, z)")


# ---------------------------------------------------------------- oscillatory tails


@dataclass(frozen=True)
class OscillatoryIntegralResult:
    cosine_part: complex
    sine_part: complex
    regime: str


def hl_regime(xi, t, a0=0.5, a1=2.0):
    t = abs(t)
    if t == 0:
        return "HL-5"
    if xi < a0 * t:
        return "HL-1"
    if a0 * t < xi < t:
        return "HL-2"
    if t < xi < a1 * t:
        return "HL-3"
    if xi > a1 * t:
        return "HL-4"
    return "HL-5"  # on a regime boundary only the universal bound applies


def oscillatory_integral(xi, s, a0=0.5, a1=2.0, **kw):
    """C = int_xi^inf u^-s cos u du and S = int_xi^inf u^-s sin u du.

    From e^{-i pi (1-s)/2} Gamma(1-s, i xi) = C - iS and
    e^{+i pi (1-s)/2} Gamma(1-s, -i xi) = C + iS; the phase factors are
    folded into the logarithms so large |Im s| cannot overflow.
    """
    s = complex(s)
    if not xi > 0:
        raise DomainError(f"xi must be positive, got {xi}")
    if not 0 < a0 < 1 < a1:
        raise DomainError("need 0 < A0 < 1 < A1")
    h = 1j * math.pi * (1 - s) / 2
    minus = cmath.exp(log_upper_incomplete_gamma(1 - s, 1j * xi, **kw) - h)  # C - iS
    plus = cmath.exp(log_upper_incomplete_gamma(1 - s, -1j * xi, **kw) + h)  # C + iS
    return OscillatoryIntegralResult((plus + minus) / 2, (plus - minus) / 2j, hl_regime(xi, s.imag, a0, a1))


def hl_estimates(xi, s, a0=0.5, a1=2.0):
    """Main term and error scale of the Hardy-Littlewood estimate for (C, S).

    Returns (regime, (main_C, main_S), specific_scale, universal_scale) where
    the estimate reads |I - main| <= c * specific_scale, and in any case
    |I| <= c * universal_scale.
    """
    s = complex(s)
    sigma, t = s.real, abs(s.imag)
    regime = hl_regime(xi, t, a0, a1)
    universal = xi ** (1 - sigma) * math.sqrt(t)
    if regime in ("HL-1", "HL-2"):
        main = gamma_trig(s)
        scale = xi ** (1 - sigma) / t if regime == "HL-1" else xi ** (2 - sigma) / (t * (t - xi))
        return regime, main, scale, universal
    if regime == "HL-3":
        return regime, (0j, 0j), xi ** (1 - sigma) / (xi - t), universal
    if regime == "HL-4":
        return regime, (0j, 0j), xi ** (1 - sigma), universal
    return regime, (0j, 0j), universal, universal
