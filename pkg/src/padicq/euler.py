"""Euler numbers E_n = E_n(0), the moments of the fermionic measure at q = 1."""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb


@lru_cache(maxsize=None)
def euler_reference(n: int) -> Fraction:
    """E_n from ``E_0 = 1`` and ``sum_{k<=n} C(n,k) E_k + E_n = 0`` for n >= 1.

    >>> [str(euler_reference(k)) for k in range(4)]
    ['1', '-1/2', '0', '1/4']
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return Fraction(1)
    return -sum(comb(n, k) * euler_reference(k) for k in range(n)) / 2
