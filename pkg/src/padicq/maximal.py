"""Function norms and the weighted q-Hardy-Littlewood-type maximal operator.

The twisted averages behind the maximal operator tend to 0 as the level
grows: the factor ``(-q)^(-xi)`` cancels the alternating fermionic weight and
leaves plain sums of ``omega^xi f(xi)``, which vanish p-adically.  Everything
here is therefore evaluated at a finite level ``m`` (numerator and
denominator at the same level), and the bounds are checked at that level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .errors import BadLevel, NonUnit, PrecisionLoss
from .fermionic import (DEFAULT_BUDGET, CosetQuery, _check_budget, _transfer_prefactor,
                        _transfer_rhs_integrand, restricted_sum, riemann_sum)
from .functions import PadicFunction, exp_weight, neg_q_inverse_power, product
from .padic import PadicInt, agreement_exponent, vp
from .qanalog import WeightedContext, q_int


@dataclass
class NormEstimate:
    sup_norm: Fraction
    lip_norm: Fraction
    depth: int
    grid: str = ""

    @property
    def norm(self) -> Fraction:
        """``||f||_1``, the larger of the sup norm and the difference-quotient norm."""
        return max(self.sup_norm, self.lip_norm)


@dataclass
class ScaleAverage:
    n: int
    m: int
    value: PadicInt
    numerator: PadicInt
    denominator: PadicInt


@dataclass
class MaximalResult:
    a: int
    m: int
    scales: list[ScaleAverage] = field(default_factory=list)
    sup_abs: Fraction = Fraction(0)
    argmax_n: int = 0


def _residue_valuation(r: int, p: int, N: int) -> int:
    return N if r == 0 else vp(r, p)


def sup_norm(f: PadicFunction, depth: int, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Largest ``|f(xi)|_p`` over ``xi < p^depth``."""
    ctx = f.ctx
    _check_budget(ctx.p, depth, budget)
    low = ctx.N
    for xi in range(ctx.p ** depth):
        low = min(low, _residue_valuation(f.raw(xi) % ctx.modulus, ctx.p, ctx.N))
        if low == 0:
            break
    return Fraction(1, ctx.p ** low)


def difference_quotient(f: PadicFunction, shift: int, x: int) -> PadicInt:
    """``(f(x + shift) - f(x)) / shift``.

    The p-part of ``shift`` is divided out of the numerator exactly, so the
    result is only determined modulo ``p^(N - v_p(shift))``; the missing top
    digits are zero.
    """
    ctx = f.ctx
    if shift <= 0:
        raise ValueError("shift must be a positive integer")
    s = vp(shift, ctx.p)
    if s >= ctx.N:
        raise PrecisionLoss(f"shift {shift} is divisible by p^N")
    num = f(x + shift) - f(x)
    if num.valuation() < s:
        raise PrecisionLoss(f"numerator valuation {num.valuation()} below shift valuation {s}")
    return PadicInt(ctx, num.r // ctx.p ** s) * ctx.from_int(shift // ctx.p ** s).inv()


def lipschitz_norm(f: PadicFunction, depth: int, budget: int = DEFAULT_BUDGET) -> NormEstimate:
    """Sampled ``||f||_1`` over pairs ``x, x + h < p^depth`` with ``1 <= h <= p^ceil(depth/2)``.

    Quotients whose numerator has smaller valuation than ``h`` are kept (their
    norm exceeds 1) instead of raising as :func:`difference_quotient` does.
    """
    ctx = f.ctx
    p, N, M = ctx.p, ctx.N, ctx.modulus
    top = p ** depth
    max_shift = min(p ** ceil(depth / 2), top - 1)
    _check_budget(p, depth, budget)
    if top * max_shift > budget:
        raise PrecisionLoss(f"Lipschitz grid of {top * max_shift} pairs exceeds budget")
    sup = sup_norm(f, depth, budget)
    values = [f.raw(x) % M for x in range(top)]
    best = None
    for h in range(1, max_shift + 1):
        s = vp(h, p)
        for x in range(top - h):
            d = values[x + h] - values[x]
            if d % M == 0:
                continue
            e = _residue_valuation(d % M, p, N) - s
            if best is None or e < best:
                best = e
    if best is None:
        lip = Fraction(0)
    else:
        lip = Fraction(p ** -best) if best < 0 else Fraction(1, p ** best)
    return NormEstimate(sup, lip, depth, f"x+h<{p}^{depth}, 1<=h<={max_shift}")


def scale_average(f: PadicFunction, wctx: WeightedContext, a: int, n: int, m: int,
                  budget: int = DEFAULT_BUDGET) -> ScaleAverage:
    """Level-m average of ``omega^xi (-q)^(-xi) f(xi)`` over ``a + p^n Z_p``,
    normalised by the level-m weighted volume of the same coset."""
    c = CosetQuery(a, n, wctx.p)
    if m < n:
        raise BadLevel(f"level m={m} below scale n={n}")
    integrand = product(exp_weight(wctx.omega), neg_q_inverse_power(wctx.q), f)
    num = restricted_sum(integrand, c, m, wctx, budget)
    den = restricted_sum(exp_weight(wctx.omega), c, m, wctx, budget)
    if not den.is_unit():
        raise NonUnit(f"weighted volume of {a}+{wctx.p}^{n}Z_p is not a unit at level {m}")
    return ScaleAverage(n, m, num * den.inv(), num, den)


def maximal_function(f: PadicFunction, wctx: WeightedContext, a: int, n_max: int, m: int,
                     budget: int = DEFAULT_BUDGET) -> MaximalResult:
    """Scale averages for ``n = 0..n_max`` around the point ``a`` and the largest norm.

    At scale n the coset containing ``a`` is ``(a mod p^n) + p^n Z_p``.
    Ties for the maximum go to the smallest n.
    """
    if m < n_max:
        raise BadLevel(f"level m={m} below n_max={n_max}")
    res = MaximalResult(a, m)
    for n in range(n_max + 1):
        sa = scale_average(f, wctx, a % wctx.p ** n, n, m, budget)
        res.scales.append(sa)
        nrm = sa.value.norm()
        if nrm > res.sup_abs:
            res.sup_abs = nrm
            res.argmax_n = n
    return res


def thm2_closed_form_check(f: PadicFunction, wctx: WeightedContext, a: int, n: int, m: int,
                           variant: str = "printed", budget: int = DEFAULT_BUDGET) -> dict:
    """Compare a scale average with its closed form after reindexing.

    printed:   ``(-1)^a / (2 q^a) * (1 + omega^(p^n) q^(p^n)) * J``
    candidate: ``(1 + omega^(p^n) q^(p^n)) / ((-q)^a (1 + q) [p^n]_{-q}) * J'``

    where J, J' are the level ``m - n`` integrals against ``mu_{-q^(p^n)}``
    of the reindexed integrands (weight ``omega^xi`` for printed,
    ``omega^(p^n xi)`` for candidate).  Level ``m - n`` after reindexing
    covers the same sample points as level m on the coset.
    """
    sa = scale_average(f, wctx, a, n, m, budget)
    c = CosetQuery(a, n, wctx.p)
    pn = wctx.p ** n
    g = _transfer_rhs_integrand(f, c, wctx, variant)
    J = riemann_sum(g, m - n, wctx, t=n, budget=budget)
    tail = 1 + wctx.omega ** pn * wctx.q ** pn
    if variant == "printed":
        pref = (-1) ** a * (2 * wctx.q ** a).inv() * tail
    else:
        pref = tail * (wctx.neg_q ** a * (1 + wctx.q) * q_int(pn, wctx.neg_q)).inv()
    rhs = pref * J
    return {"lhs": sa.value, "rhs": rhs, "measured": agreement_exponent(sa.value, rhs)}


def l1_twist_norm(wctx: WeightedContext, n: int, m: int,
                  budget: int = DEFAULT_BUDGET) -> tuple[PadicInt, Fraction]:
    """Level-m integral of ``xi -> (-q^(p^n) / omega)^(-xi)`` against
    ``mu_{-q^(p^n)}`` and its p-adic norm."""
    Q = wctx.q ** (wctx.p ** n)
    base = (-Q * wctx.omega.inv()).inv()
    value = riemann_sum(exp_weight(base), m, wctx, t=n, budget=budget)
    return value, value.norm()


def bound_constant(wctx: WeightedContext, a: int, n_max: int) -> Fraction:
    """``K = |(-1)^a / (2 q^a)|_p * max_n |1 + omega^(p^n) q^(p^n)|_p``."""
    head = (2 * wctx.q ** a).inv().norm()
    tail = max((1 + wctx.omega ** (wctx.p ** n) * wctx.q ** (wctx.p ** n)).norm()
               for n in range(n_max + 1))
    return head * tail


def boundedness_check(f: PadicFunction, wctx: WeightedContext, sample_as, n_max: int, m: int,
                      depth: int = 4, budget: int = DEFAULT_BUDGET) -> list[dict]:
    """One row per sampled point: ``sup_n |average|`` against ``K ||f||_1 ||twist||_L1``.

    The twist norm at scale n is taken at level ``m - n``, the level that
    the scale-n average reaches after reindexing to Z_p.
    """
    rows = []
    sample_as = list(sample_as)
    if not sample_as:
        return rows
    lip = lipschitz_norm(f, depth, budget)
    l1 = max(l1_twist_norm(wctx, n, m - n, budget)[1] for n in range(n_max + 1))
    for a in sample_as:
        res = maximal_function(f, wctx, a, n_max, m, budget)
        K = bound_constant(wctx, a, n_max)
        rhs = K * lip.norm * l1
        rows.append({
            "a": a,
            "lhs": res.sup_abs,
            "rhs": rhs,
            "K": K,
            "lip_norm": lip.norm,
            "l1_norm": l1,
            "argmax_n": res.argmax_n,
            "holds": res.sup_abs <= rhs,
            "grid": lip.grid,
        })
    return rows
