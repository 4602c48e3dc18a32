"""Fixed absolute precision arithmetic in Z_p.

Every element is stored as its canonical residue modulo ``p**N``.  A zero
residue means "indistinguishable from 0 at precision N", so its valuation is
reported as ``N`` rather than infinity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime

from .errors import ContextMismatch, InvalidSpec, NonUnit, NonUnitDenominator

DEFAULT_PRECISION = 12

IntLike = Union[int, "PadicInt"]


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicContext:
    p: int
    N: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not isinstance(self.p, int) or not isprime(self.p) or self.p == 2:
            raise InvalidSpec(f"p must be an odd prime, got {self.p!r}")
        if not isinstance(self.N, int) or self.N < 1:
            raise InvalidSpec(f"precision N must be an integer >= 1, got {self.N!r}")

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    @property
    def zero(self) -> PadicInt:
        return PadicInt(self, 0)

    @property
    def one(self) -> PadicInt:
        return PadicInt(self, 1)

    def from_int(self, i: int) -> PadicInt:
        return PadicInt(self, i)

    def from_ratio(self, s: int, t: int) -> PadicInt:
        if t == 0:
            raise ZeroDivisionError("denominator is zero")
        if t % self.p == 0:
            raise NonUnitDenominator(f"{self.p} divides the denominator {t}")
        M = self.modulus
        return PadicInt(self, s * pow(t, -1, M))

    def parse(self, literal: str) -> PadicInt:
        return parse_literal(literal, self)


class PadicInt:
    """Element of Z_p known modulo p**N.  Immutable."""

    __slots__ = ("ctx", "r")

    def __init__(self, ctx: PadicContext, r: int):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "r", r % ctx.modulus)

    def __setattr__(self, name, value):
        raise AttributeError("PadicInt is immutable")

    def _coerce(self, other: IntLike) -> PadicInt:
        if isinstance(other, PadicInt):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        if isinstance(other, int):
            return PadicInt(self.ctx, other)
        return NotImplemented

    def __add__(self, other: IntLike) -> PadicInt:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, self.r + o.r)

    __radd__ = __add__

    def __sub__(self, other: IntLike) -> PadicInt:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, self.r - o.r)

    def __rsub__(self, other: IntLike) -> PadicInt:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, o.r - self.r)

    def __mul__(self, other: IntLike) -> PadicInt:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PadicInt(self.ctx, self.r * o.r)

    __rmul__ = __mul__

    def __neg__(self) -> PadicInt:
        return PadicInt(self.ctx, -self.r)

    def __pow__(self, e: int) -> PadicInt:
        if e < 0:
            return self.inv() ** (-e)
        return PadicInt(self.ctx, pow(self.r, e, self.ctx.modulus))

    def __truediv__(self, other: IntLike) -> PadicInt:
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __eq__(self, other) -> bool:
        if isinstance(other, PadicInt):
            return self.ctx == other.ctx and self.r == other.r
        if isinstance(other, int):
            return self.r == other % self.ctx.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.r))

    def __repr__(self):
        return f"PadicInt({self.r} mod {self.ctx.p}^{self.ctx.N})"

    def __str__(self):
        return self.digits()

    def is_unit(self) -> bool:
        return self.r % self.ctx.p != 0

    def inv(self) -> PadicInt:
        if not self.is_unit():
            raise NonUnit(f"{self!r} is not a unit")
        return PadicInt(self.ctx, pow(self.r, -1, self.ctx.modulus))

    def valuation(self) -> int:
        if self.r == 0:
            return self.ctx.N
        return vp(self.r, self.ctx.p)

    def norm(self) -> Fraction:
        return Fraction(1, self.ctx.p ** self.valuation())

    def digit_list(self) -> list[int]:
        p, r = self.ctx.p, self.r
        out = []
        for _ in range(self.ctx.N):
            r, d = divmod(r, p)
            out.append(d)
        return out

    def digits(self) -> str:
        """Little-endian digit string ``d0.d1...d(N-1)_p``."""
        return ".".join(map(str, self.digit_list())) + f"_{self.ctx.p}"


def from_int(i: int, ctx: PadicContext) -> PadicInt:
    return ctx.from_int(i)


def from_ratio(s: int, t: int, ctx: PadicContext) -> PadicInt:
    return ctx.from_ratio(s, t)


def valuation(x: PadicInt) -> int:
    return x.valuation()


def norm(x: PadicInt) -> Fraction:
    return x.norm()


def agreement_exponent(x: PadicInt, y: PadicInt) -> int:
    """Valuation of ``x - y``; ``N`` means equal at working precision."""
    return (x - y).valuation()


def congruent(x: PadicInt, y: PadicInt, k: int) -> bool:
    if not 0 <= k <= x.ctx.N:
        raise ValueError(f"congruence exponent must lie in [0, {x.ctx.N}]")
    return agreement_exponent(x, y) >= k


_RATIO = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")
_INT = re.compile(r"^\s*([+-]?\d+)\s*$")
_DIGITS = re.compile(r"^\s*(\d+(?:\.\d+)*)_(\w+)\s*$")


def parse_literal(text: str, ctx: PadicContext) -> PadicInt:
    """Parse ``"s/t"``, ``"k"`` or a little-endian digit string ``"d0.d1.d2_p"``.

    The suffix of a digit string is either the literal letter ``p`` or the
    prime itself, which must match the context.
    """
    text = str(text)
    m = _RATIO.match(text)
    if m:
        s, t = int(m.group(1)), int(m.group(2))
        if t == 0:
            raise InvalidSpec(f"zero denominator in {text!r}")
        try:
            return ctx.from_ratio(s, t)
        except NonUnitDenominator as exc:
            raise InvalidSpec(f"{text!r}: {exc}") from exc
    m = _INT.match(text)
    if m:
        return ctx.from_int(int(m.group(1)))
    m = _DIGITS.match(text)
    if m:
        suffix = m.group(2)
        if suffix != "p" and suffix != str(ctx.p):
            raise InvalidSpec(f"digit string {text!r} is not base {ctx.p}")
        digits = [int(d) for d in m.group(1).split(".")]
        if any(d >= ctx.p for d in digits):
            raise InvalidSpec(f"digit out of range in {text!r}")
        return ctx.from_int(sum(d * ctx.p ** i for i, d in enumerate(digits)))
    raise InvalidSpec(f"cannot parse p-adic literal {text!r}")
