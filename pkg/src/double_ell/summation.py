"""Compensated accumulation helpers.

Array sums go through :func:`math.fsum`, which is correctly rounded and
therefore independent of summation order. Streaming series use
:class:`KahanAccumulator` (Neumaier's variant).
"""

import math

import numpy as np


def csum(values):
    """Correctly rounded sum of a complex (or real) array."""
    arr = np.asarray(values)
    if arr.size == 0:
        return 0j
    if np.iscomplexobj(arr):
        return complex(math.fsum(arr.real.ravel()), math.fsum(arr.imag.ravel()))
    return complex(math.fsum(arr.ravel()), 0.0)


def abs_sum(values):
    return math.fsum(np.abs(np.asarray(values)).ravel())


class KahanAccumulator:
    """Running complex sum with Neumaier compensation on each component."""

    __slots__ = ("_re", "_im", "_cre", "_cim")

    def __init__(self, value=0j):
        self._re = float(value.real)
        self._im = float(value.imag)
        self._cre = 0.0
        self._cim = 0.0

    @staticmethod
    def _two_sum(s, c, x):
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        return t, c

    def add(self, value):
        self._re, self._cre = self._two_sum(self._re, self._cre, value.real)
        self._im, self._cim = self._two_sum(self._im, self._cim, value.imag)
        return self

    @property
    def value(self):
        return complex(self._re + self._cre, self._im + self._cim)
