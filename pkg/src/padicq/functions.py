"""Sampled functions Z_p -> Z_p and their combinators.

A :class:`PadicFunction` wraps a fast integer evaluator ``raw(xi) -> int``
(any integer; reduction mod p**N happens on use) so the Riemann-sum loops
never allocate :class:`PadicInt` objects per term.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Union

from .errors import InvalidSpec
from .padic import PadicContext, PadicInt, vp

Scalar = Union[int, Fraction, PadicInt]


@dataclass(frozen=True)
class PadicFunction:
    ctx: PadicContext
    raw: Callable[[int], int]
    description: str

    def __call__(self, xi: int) -> PadicInt:
        return PadicInt(self.ctx, self.raw(xi))

    def __repr__(self):
        return f"PadicFunction({self.description})"

    def __mul__(self, other: PadicFunction) -> PadicFunction:
        return product(self, other)

    def __add__(self, other: PadicFunction) -> PadicFunction:
        return linear_combination([(1, self), (1, other)])

    def scaled(self, alpha: Scalar) -> PadicFunction:
        return linear_combination([(alpha, self)])

    def precompose(self, a: int, step: int) -> PadicFunction:
        return precompose_affine(self, a, step)


def _residue(c: Scalar, ctx: PadicContext) -> int:
    if isinstance(c, PadicInt):
        if c.ctx != ctx:
            raise InvalidSpec("scalar lives in a different context")
        return c.r
    if isinstance(c, Fraction):
        return ctx.from_ratio(c.numerator, c.denominator).r
    return c % ctx.modulus


def const(c: Scalar, ctx: PadicContext) -> PadicFunction:
    r = _residue(c, ctx)
    return PadicFunction(ctx, lambda xi: r, f"const({r})")


def monomial(k: int, ctx: PadicContext) -> PadicFunction:
    if k < 0:
        raise InvalidSpec(f"monomial degree must be nonnegative, got {k}")
    M = ctx.modulus
    return PadicFunction(ctx, lambda xi: pow(xi, k, M), f"monomial({k})")


def q_number_evaluator(base: PadicInt) -> Callable[[int], int]:
    """Integer evaluator of ``xi -> [xi]_base`` (same exact-cancellation trick as q_int)."""
    ctx = base.ctx
    M = ctx.modulus
    b = base.r
    if b == 1:
        return lambda xi: xi % M
    d = b - 1
    pv = ctx.p ** vp(d, ctx.p)
    ext = M * pv
    uinv = pow(d // pv, -1, M)

    def evaluate(xi: int) -> int:
        return ((pow(b, xi, ext) - 1) % ext) // pv * uinv % M

    return evaluate


def q_monomial(k: int, q: PadicInt) -> PadicFunction:
    """``xi -> [xi]_q ** k``."""
    if k < 0:
        raise InvalidSpec(f"q_monomial degree must be nonnegative, got {k}")
    M = q.ctx.modulus
    qn = q_number_evaluator(q)
    return PadicFunction(q.ctx, lambda xi: pow(qn(xi), k, M), f"q_monomial({k})")


def exp_weight(w: PadicInt) -> PadicFunction:
    """``xi -> w ** xi``."""
    M = w.ctx.modulus
    r = w.r
    return PadicFunction(w.ctx, lambda xi: pow(r, xi, M), f"exp_weight({r})")


def neg_q_inverse_power(q: PadicInt) -> PadicFunction:
    """``xi -> (-q) ** (-xi)``."""
    M = q.ctx.modulus
    r = (-q).inv().r
    return PadicFunction(q.ctx, lambda xi: pow(r, xi, M), "neg_q_inverse_power")


def product(*fs: PadicFunction) -> PadicFunction:
    if not fs:
        raise ValueError("product of no functions")
    ctx = fs[0].ctx
    if any(f.ctx != ctx for f in fs):
        raise InvalidSpec("functions live in different contexts")
    M = ctx.modulus
    raws = [f.raw for f in fs]

    def evaluate(xi: int) -> int:
        acc = 1
        for g in raws:
            acc = acc * g(xi) % M
        return acc

    return PadicFunction(ctx, evaluate, "*".join(f.description for f in fs))


def linear_combination(terms: Iterable[tuple[Scalar, PadicFunction]]) -> PadicFunction:
    terms = list(terms)
    if not terms:
        raise ValueError("empty linear combination")
    ctx = terms[0][1].ctx
    if any(f.ctx != ctx for _, f in terms):
        raise InvalidSpec("functions live in different contexts")
    M = ctx.modulus
    pairs = [(_residue(c, ctx), f.raw) for c, f in terms]

    def evaluate(xi: int) -> int:
        return sum(c * g(xi) for c, g in pairs) % M

    desc = " + ".join(f"{c}*{f.description}" for (c, _), (_, f) in zip(pairs, terms))
    return PadicFunction(ctx, evaluate, desc)


def precompose_affine(f: PadicFunction, a: int, step: int) -> PadicFunction:
    """``xi -> f(a + step * xi)``."""
    g = f.raw
    return PadicFunction(f.ctx, lambda xi: g(a + step * xi), f"{f.description}({a}+{step}*x)")


def parse_function(label: str, wctx) -> PadicFunction:
    """Build a function from a CLI label.

    Accepted labels: ``const:c``, ``monomial:k``, ``q_monomial:k``,
    ``exp_weight`` (uses omega) or ``exp_weight:w``, ``neg_q_inverse_power``.
    """
    ctx = wctx.ctx
    name, _, arg = label.partition(":")
    name = name.strip().replace("-", "_")
    try:
        if name == "const":
            return const(ctx.parse(arg or "1"), ctx)
        if name == "monomial":
            return monomial(int(arg or 1), ctx)
        if name in ("q_monomial", "qmonomial"):
            return q_monomial(int(arg or 1), wctx.q)
        if name in ("exp_weight", "expweight"):
            return exp_weight(ctx.parse(arg) if arg else wctx.omega)
        if name in ("neg_q_inverse_power", "negqinv"):
            return neg_q_inverse_power(wctx.q)
    except ValueError as exc:
        raise InvalidSpec(f"bad function label {label!r}: {exc}") from exc
    raise InvalidSpec(f"unknown function label {label!r}")
