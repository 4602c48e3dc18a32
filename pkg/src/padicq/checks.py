"""Registry of identity/congruence checks and the parameter grids they run on.

Every check turns one grid point into one :class:`IdentityReport`.  Grids are
ordered dicts of lists; rows come out in the lexicographic order of the
cartesian product, so reports are reproducible byte for byte.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import log
from typing import Callable, Optional

from .errors import InvalidSpec, PadicError
from .euler import euler_reference
from .fermionic import (DEFAULT_BUDGET, CosetQuery, coset_volume_candidate, coset_volume_printed,
                        default_max_level, integrate, invariance_defect, poly_measure_congruence, restricted_sum,
                        riemann_sum, transfer_identity_check, weighted_measure)
from .functions import (const, exp_weight, linear_combination, monomial, parse_function, product,
                        q_monomial)
from .maximal import boundedness_check, thm2_closed_form_check
from .padic import DEFAULT_PRECISION, agreement_exponent
from .qanalog import (WeightedContext, neg_q_congruence_exponent, q_bracket_power_expansion,
                      weight_congruence_exponent)
from .report import ERROR, IdentityReport, ReportBundle, classify

EULER_TARGET = 8
DEFECT_TARGET = 8


@dataclass
class Config:
    p: int = 3
    q: str = "4"
    omega: str = "7"
    prec: int = DEFAULT_PRECISION
    budget: int = DEFAULT_BUDGET
    target: int = 6
    max_level: Optional[int] = None
    n_max: int = 3
    level: int = 6
    grid: dict = field(default_factory=dict)

    def meta(self) -> dict:
        return {"p": self.p, "q": self.q, "omega": self.omega, "prec": self.prec,
                "budget": self.budget}

    def validate(self) -> WeightedContext:
        return WeightedContext.from_literals(self.p, self.q, self.omega, self.prec)


@dataclass
class CheckSpec:
    id: str
    grid: dict


@dataclass
class _Check:
    grid: Callable[[Config], dict]
    row: Callable[[Config, dict], IdentityReport]
    valid: Callable[[dict], bool] = lambda params: True


def _wctx(params: dict, q: Optional[str] = None, omega: Optional[str] = None) -> WeightedContext:
    return WeightedContext.from_literals(
        params["p"], q if q is not None else params["q"],
        omega if omega is not None else params["omega"], params["N"])


def _base(cfg: Config, *keys: str) -> dict:
    g = {"p": [cfg.p]}
    if "q" in keys:
        g["q"] = [cfg.q]
    if "omega" in keys:
        g["omega"] = [cfg.omega]
    g["N"] = [cfg.prec]
    return g


def _coset_ok(params: dict) -> bool:
    return params["a"] < params["p"] ** params["n"]


def _report(check_id, params, lhs, rhs, measured, claimed, N, notes="") -> IdentityReport:
    return IdentityReport(check_id, dict(params), lhs, rhs, measured, claimed,
                          classify(measured, claimed, N), notes)


# -- individual checks ------------------------------------------------------

def _const_exactness(cfg, P):
    w = _wctx(P, omega="1")
    v = riemann_sum(const(1, w.ctx), P["m"], w, t=P["t"], budget=cfg.budget)
    one = w.ctx.one
    return _report("const-exactness", P, v, one, agreement_exponent(v, one), "exact", w.ctx.N)


def _partition(cfg, P):
    w = _wctx(P)
    f = parse_function(P["f"], w)
    p, n, m = P["p"], P["n"], P["m"]
    total = w.ctx.zero
    for a in range(p ** n):
        total += restricted_sum(f, CosetQuery(a, n, p), m, w, cfg.budget)
    whole = riemann_sum(f, m, w, budget=cfg.budget)
    return _report("partition", P, total, whole, agreement_exponent(total, whole), "exact",
                   w.ctx.N)


def _euler(cfg, P):
    w = _wctx(P, q="1", omega="1")
    N = w.ctx.N
    claimed = min(EULER_TARGET, N)
    res = integrate(monomial(P["k"], w.ctx), w, target_k=max(1, min(claimed - 1, N)),
                    m_max=cfg.max_level or 9, budget=cfg.budget)
    E = euler_reference(P["k"])
    ref = w.ctx.from_ratio(E.numerator, E.denominator)
    return _report("euler-crosscheck", P, res.value, ref, agreement_exponent(res.value, ref),
                   claimed, N, f"E_{P['k']} = {E}; stabilized at level {res.levels_used}")


def _eq7(cfg, P):
    w = _wctx(P, omega="1")
    direct, expanded = q_bracket_power_expansion(P["a"], P["i"], P["n"], P["k"], w)
    return _report("eq7-expansion", P, direct, expanded, agreement_exponent(direct, expanded),
                   "exact", w.ctx.N)


def _eq8(cfg, P):
    w = _wctx(P, q="1")
    e = P["a"] + P["i"] * P["p"] ** P["n"]
    got = weight_congruence_exponent(w.omega, P["a"], P["i"], P["n"])
    return _report("eq8-weight-cong", P, w.omega ** e, w.omega ** P["a"], got, P["n"], w.ctx.N,
                   "claimed mod p^n")


def _eq9(cfg, P):
    w = _wctx(P, omega="1")
    e = P["a"] + P["i"] * P["p"] ** P["n"]
    got = neg_q_congruence_exponent(w.q, P["a"], P["i"], P["n"])
    notes = "claimed mod p^n"
    if P["i"] % 2:
        notes += "; (-1)^(i p^n) = -1 for odd i"
    return _report("eq9-negq-cong", P, (-w.q) ** e, (-w.q) ** P["a"], got, P["n"], w.ctx.N, notes)


def _poly_measure(cfg, P):
    w = _wctx(P)
    c = CosetQuery(P["a"], P["n"], P["p"])
    r = poly_measure_congruence(P["k"], c, w, cfg.target, cfg.max_level, cfg.budget)
    measured = min(r["measured"], r["stabilization"])
    return _report("poly-measure-cong", P, r["lhs"], r["rhs"], measured, r["claimed"], w.ctx.N,
                   f"stabilization exponent {r['stabilization']} at level {r['levels']}")


LINEARITY_ALPHA, LINEARITY_BETA = 2, 3


def _prop1_linearity(cfg, P):
    w = _wctx(P)
    f = q_monomial(1, w.q)
    g = monomial(2, w.ctx)
    h = linear_combination([(LINEARITY_ALPHA, f), (LINEARITY_BETA, g)])
    c = CosetQuery(P["a"], P["n"], P["p"])
    wt = exp_weight(w.omega)
    worst = w.ctx.N
    lhs = rhs = None
    for m in range(max(c.n, 1), max(c.n, 1) + 4):
        lhs = restricted_sum(product(wt, h), c, m, w, cfg.budget)
        rhs = (LINEARITY_ALPHA * restricted_sum(product(wt, f), c, m, w, cfg.budget)
               + LINEARITY_BETA * restricted_sum(product(wt, g), c, m, w, cfg.budget))
        worst = min(worst, agreement_exponent(lhs, rhs))
    return _report("prop1-linearity", P, lhs, rhs, worst, "exact", w.ctx.N,
                   f"f=q_monomial(1), g=monomial(2), alpha={LINEARITY_ALPHA}, "
                   f"beta={LINEARITY_BETA}; levels n..n+3")


def _prop1_defect(cfg, P):
    w = _wctx(P)
    f = parse_function(P["f"], w)
    v, d = invariance_defect(f, P["a"], P["n"], w, target_k=min(DEFECT_TARGET, w.ctx.N),
                             budget=cfg.budget)
    C = Fraction(P["p"] ** P["n"], P["p"] ** v)
    claimed = max(0, P["n"] - 2)
    return _report("prop1-defect", P, d, w.ctx.zero, v, claimed, w.ctx.N,
                   f"|defect| <= C p^-n read with C = p^2; p^n |defect| = {C}")


def _thm1a(variant):
    def row(cfg, P):
        w = _wctx(P)
        f = parse_function(P["f"], w)
        c = CosetQuery(P["a"], P["n"], P["p"])
        r = transfer_identity_check(f, c, w, variant, cfg.target, cfg.max_level,
                                    cfg.budget)
        claimed = r["precision"] if variant == "printed" else "n/a"
        return _report(f"thm1a-{variant}", P, r["lhs"], r["rhs"], r["measured"], claimed,
                       w.ctx.N, f"matched-level agreement {r['matched']}; "
                                f"stabilization exponent {r['precision']}")
    return row


def _thm1b(variant):
    def row(cfg, P):
        w = _wctx(P)
        c = CosetQuery(P["a"], P["n"], P["p"])
        res = weighted_measure(const(1, w.ctx), c, w, cfg.target, cfg.max_level,
                               cfg.budget)
        closed = (coset_volume_printed if variant == "printed" else coset_volume_candidate)(c, w)
        measured = min(agreement_exponent(res.value, closed), res.achieved_exponent)
        claimed = res.achieved_exponent if variant == "printed" else "n/a"
        return _report(f"thm1b-{variant}", P, res.value, closed, measured, claimed, w.ctx.N,
                       f"oracle: weighted measure stabilized to {res.achieved_exponent} "
                       f"at level {res.levels_used}")
    return row


def _thm2a(cfg, P):
    w = _wctx(P)
    f = parse_function(P["f"], w)
    r = thm2_closed_form_check(f, w, P["a"], P["n"], P["m"], P["variant"], cfg.budget)
    claimed = "exact" if P["variant"] == "printed" else "n/a"
    return _report("thm2a", P, r["lhs"], r["rhs"], r["measured"], claimed, w.ctx.N,
                   f"finite level m={P['m']}; average has valuation {r['lhs'].valuation()}")


def _p_exponent(x: Fraction, p: int) -> int:
    """Integer e with ``x = p^-e`` (x is a power of p)."""
    e = round(-log(x) / log(p))
    assert Fraction(p) ** -e == x, (x, p)
    return e


def _bound_row(check_id, P, rows, N):
    p = P["p"]
    lhs = max(r["lhs"] for r in rows)
    rhs = max(r["rhs"] for r in rows)
    r0 = rows[0]
    notes = (f"K={max(r['K'] for r in rows)}, ||f||_1={r0['lip_norm']}, "
             f"||twist||_L1={r0['l1_norm']}, grid {r0['grid']}")
    return _report(check_id, P, lhs, rhs, _p_exponent(lhs, p), _p_exponent(rhs, p), N, notes)


def _thm2b(cfg, P):
    w = _wctx(P)
    f = parse_function(P["f"], w)
    rows = boundedness_check(f, w, [P["a"]], cfg.n_max, P["m"], P["depth"], cfg.budget)
    return _bound_row("thm2b-bound", P, rows, w.ctx.N)


def _cor1(cfg, P):
    w = _wctx(P)
    f = parse_function(P["f"], w)
    p = P["p"]
    rows = boundedness_check(f, w, range(p * p), cfg.n_max, P["m"], P["depth"], cfg.budget)
    return _bound_row("cor1-bound", P, rows, w.ctx.N)


# -- grids ------------------------------------------------------------------

def _grid(cfg, keys, **extra):
    g = _base(cfg, *keys)
    g.update(extra)
    return g


def _const_grid(cfg):
    return _grid(cfg, "q", t=[0, 1, 2],
                 m=list(range(1, (cfg.max_level or default_max_level(cfg.p)) + 1)))


REGISTRY: dict[str, _Check] = {
    "prop1-linearity": _Check(
        lambda c: _grid(c, ("q", "omega"), n=[0, 1, 2], a=[0, 1]),
        _prop1_linearity, _coset_ok),
    "prop1-defect": _Check(
        lambda c: _grid(c, ("q", "omega"),
                        f=["const:1", "q_monomial:1", "q_monomial:2", "exp_weight"],
                        a=[0, 1], n=[1, 2, 3, 4]),
        _prop1_defect, _coset_ok),
    "eq7-expansion": _Check(
        lambda c: _grid(c, ("q",), a=list(range(c.p)), i=list(range(c.p)), n=[0, 1, 2],
                        k=[0, 1, 2, 3]),
        _eq7),
    "eq8-weight-cong": _Check(
        lambda c: _grid(c, ("omega",), a=list(range(c.p)), i=list(range(c.p)), n=[0, 1, 2, 3]),
        _eq8),
    "eq9-negq-cong": _Check(
        lambda c: _grid(c, ("q",), a=list(range(c.p)), i=list(range(c.p)), n=[0, 1, 2, 3]),
        _eq9),
    "poly-measure-cong": _Check(
        lambda c: _grid(c, ("q", "omega"), k=[0, 1, 2, 3], n=[0, 1, 2], a=list(range(c.p))),
        _poly_measure, _coset_ok),
    "thm1a-printed": _Check(
        lambda c: _grid(c, ("q", "omega"), f=["const:1", "q_monomial:1"], n=[0, 1, 2],
                        a=[0, 1, 2]),
        _thm1a("printed"), _coset_ok),
    "thm1a-candidate": _Check(
        lambda c: _grid(c, ("q", "omega"), f=["const:1", "q_monomial:1"], n=[0, 1, 2],
                        a=[0, 1, 2]),
        _thm1a("candidate"), _coset_ok),
    "thm1b-printed": _Check(
        lambda c: _grid(c, ("q", "omega"), n=[0, 1, 2, 3], a=[0, 1, 2]),
        _thm1b("printed"), _coset_ok),
    "thm1b-candidate": _Check(
        lambda c: _grid(c, ("q", "omega"), n=[0, 1, 2, 3], a=[0, 1, 2]),
        _thm1b("candidate"), _coset_ok),
    "thm2a": _Check(
        lambda c: _grid(c, ("q", "omega"), f=["const:1", "q_monomial:1"], a=[0, 1, 2],
                        n=[0, 1, 2], m=[c.level], variant=["printed", "candidate"]),
        _thm2a, _coset_ok),
    "thm2b-bound": _Check(
        lambda c: _grid(c, ("q", "omega"), f=["const:1", "monomial:1", "q_monomial:1"],
                        a=list(range(c.p * c.p)), m=[c.level], depth=[4]),
        _thm2b),
    "cor1-bound": _Check(
        lambda c: _grid(c, ("q", "omega"), f=["const:1", "monomial:1", "q_monomial:1"],
                        m=[c.level], depth=[4]),
        _cor1),
    "euler-crosscheck": _Check(
        lambda c: _grid(c, (), k=list(range(7))),
        _euler),
    "partition": _Check(
        lambda c: _grid(c, ("q", "omega"),
                        f=["const:1", "monomial:1", "q_monomial:2", "exp_weight"],
                        n=[0, 1, 2, 3], m=[4]),
        _partition),
    "const-exactness": _Check(_const_grid, _const_exactness),
}

CHECK_IDS = tuple(REGISTRY)


def default_spec(check_id: str, cfg: Config) -> CheckSpec:
    """Default grid for ``check_id`` with the overrides in ``cfg.grid`` applied.

    ``cfg.grid`` may hold global overrides (``{"n": [1, 2]}``) that apply to
    every check having that key, and per-check overrides keyed by check id.
    """
    if check_id not in REGISTRY:
        raise InvalidSpec(f"unknown check id {check_id!r}")
    grid = REGISTRY[check_id].grid(cfg)
    for key, values in cfg.grid.items():
        if key in REGISTRY:
            continue
        if key in grid:
            grid[key] = list(values)
    for key, values in cfg.grid.get(check_id, {}).items():
        if key not in grid:
            raise InvalidSpec(f"{check_id} has no grid parameter {key!r}")
        grid[key] = list(values)
    return CheckSpec(check_id, grid)


def run_check(spec: CheckSpec, cfg: Optional[Config] = None) -> list[IdentityReport]:
    """One report per grid point, in cartesian-product order.

    Computation errors are recorded on their row (status ERROR) and do not
    stop the batch.
    """
    cfg = cfg or Config()
    if spec.id not in REGISTRY:
        raise InvalidSpec(f"unknown check id {spec.id!r}")
    check = REGISTRY[spec.id]
    keys = list(spec.grid)
    out = []
    for combo in itertools.product(*(spec.grid[k] for k in keys)):
        params = dict(zip(keys, combo))
        try:
            if not check.valid(params):
                continue
            out.append(check.row(cfg, params))
        except (PadicError, ValueError, ZeroDivisionError) as exc:
            out.append(IdentityReport(spec.id, params, status=ERROR,
                                      notes=f"{type(exc).__name__}: {exc}"))
    return out


def run_all(cfg: Optional[Config] = None, ids=None) -> ReportBundle:
    cfg = cfg or Config()
    bundle = ReportBundle(cfg.meta())
    try:
        cfg.validate()
    except (PadicError, ValueError) as exc:
        bundle.reports.append(IdentityReport("config", cfg.meta(), status=ERROR,
                                             notes=f"{type(exc).__name__}: {exc}"))
        return bundle
    for check_id in ids or CHECK_IDS:
        bundle.reports.extend(run_check(default_spec(check_id, cfg), cfg))
    return bundle
