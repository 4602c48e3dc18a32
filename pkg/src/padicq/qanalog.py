"""q-numbers, weight powers and the algebraic congruences they satisfy."""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import InvalidSpec
from .padic import PadicContext, PadicInt, agreement_exponent, vp


@dataclass(frozen=True)
class WeightedContext:
    """The parameters q and omega, both congruent to 1 modulo p."""

    ctx: PadicContext
    q: PadicInt
    omega: PadicInt

    def __post_init__(self):
        for name in ("q", "omega"):
            x = getattr(self, name)
            if x.ctx != self.ctx:
                raise InvalidSpec(f"{name} lives in a different context")
            if (x - 1).valuation() < 1:
                raise InvalidSpec(f"{name} = {x.r} is not congruent to 1 mod {self.ctx.p}")

    @classmethod
    def from_literals(cls, p: int, q: str, omega: str, N: int) -> WeightedContext:
        ctx = PadicContext(p, N)
        return cls(ctx, ctx.parse(q), ctx.parse(omega))

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def neg_q(self) -> PadicInt:
        return -self.q


def q_int(x: int, base: PadicInt) -> PadicInt:
    """The q-number ``[x]_base = 1 + base + ... + base**(x-1)``.

    Uses the closed form ``(base**x - 1) / (base - 1)`` on the integer lift
    of ``base``, carrying ``v_p(base - 1)`` extra digits so the division by
    the non-unit part is exact.
    """
    if x < 0:
        raise ValueError("q_int needs a nonnegative integer")
    ctx = base.ctx
    if x == 0:
        return ctx.zero
    b = base.r
    if b == 1:
        return ctx.from_int(x)
    d = b - 1
    v = vp(d, ctx.p)
    pv = ctx.p ** v
    ext = ctx.modulus * pv
    num = (pow(b, x, ext) - 1) % ext
    return PadicInt(ctx, (num // pv) * pow(d // pv, -1, ctx.modulus))


def q_bracket_power_expansion(a: int, i: int, n: int, k: int,
                              wctx: WeightedContext) -> tuple[PadicInt, PadicInt]:
    """Return ``([a + i p^n]_q^k, binomial expansion of the same)``.

    The expansion is
    ``sum_j C(k,j) [a]_q^(k-j) q^(aj) [p^n]_q^j [i]_{q^(p^n)}^j``
    and the two entries must coincide exactly.
    """
    q = wctx.q
    pn = wctx.p ** n
    direct = q_int(a + i * pn, q) ** k
    qa = q_int(a, q)
    qpn = q_int(pn, q)
    qi = q_int(i, q ** pn)
    expanded = wctx.ctx.zero
    for j in range(k + 1):
        expanded += comb(k, j) * qa ** (k - j) * q ** (a * j) * qpn ** j * qi ** j
    return direct, expanded


def weight_congruence_exponent(w: PadicInt, a: int, i: int, n: int) -> int:
    """Agreement exponent of ``w**(a + i p^n)`` and ``w**a``."""
    if (w - 1).valuation() < 1:
        raise InvalidSpec("weight must be congruent to 1 mod p")
    e = a + i * w.ctx.p ** n
    return agreement_exponent(w ** e, w ** a)


def neg_q_congruence_exponent(q: PadicInt, a: int, i: int, n: int) -> int:
    """Agreement exponent of ``(-q)**(a + i p^n)`` and ``(-q)**a``."""
    if (q - 1).valuation() < 1:
        raise InvalidSpec("q must be congruent to 1 mod p")
    e = a + i * q.ctx.p ** n
    return agreement_exponent((-q) ** e, (-q) ** a)
