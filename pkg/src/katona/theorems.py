"""Registry of circle bounds: hypothesis, search problem, closed form and extremal construction.

``verify_bound`` solves the bound's search problem exactly and compares the
optimum with the closed form.  An optimum above the bound raises
:class:`BoundViolation` carrying the counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import constructions as cons
from .certificates import butterfly_decompose, hilton_milner_circle_check
from .core import ArcFamily, DomainError, full_level
from .operators import lambda_components
from .predicates import PredicateId, is_star
from .search import BudgetExceeded, Constraint, SearchProblem, SlotSpec, maximize

P = PredicateId


class BoundViolation(AssertionError):
    """The exact optimum exceeded a registered bound."""

    def __init__(self, theorem: str, params: dict, bound, achieved, witness):
        super().__init__(f"{theorem} {params}: achieved {achieved} > bound {bound}")
        self.theorem = theorem
        self.params = params
        self.bound = bound
        self.achieved = achieved
        self.witness = witness

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": self.params,
            "bound": _plain(self.bound),
            "achieved": _plain(self.achieved),
            "counterexample": [f.to_json() for f in self.witness],
        }


def _plain(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


@dataclass
class Theorem:
    id: str
    params: tuple[str, ...]
    summary: str
    hypothesis: Callable[..., list[str]]  # returns the violated hypotheses, empty when fine
    problem: Callable[..., SearchProblem] | None
    bound: Callable[..., Fraction | int]
    construction: Callable[..., tuple] | None = None
    claims: Callable[..., dict[str, bool]] | None = None  # extra statements about the extremal set
    mode: str = "value"
    runner: Callable[..., "VerifyResult"] | None = None

    def check_hypothesis(self, **kw) -> None:
        missing = [p for p in self.params if p not in kw]
        if missing:
            raise DomainError(f"{self.id} needs parameters {missing}")
        bad = self.hypothesis(**kw)
        if bad:
            raise DomainError(f"{self.id} {kw}: hypothesis violated: {'; '.join(bad)}")


@dataclass
class VerifyResult:
    theorem: str
    params: dict
    bound: Fraction | int
    achieved: Fraction | int
    tight: bool
    extremal_count: int | None
    witnesses: list[tuple]
    construction_ok: bool | None
    claims: dict[str, bool] = field(default_factory=dict)
    nodes: int = 0
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.achieved <= self.bound and self.construction_ok is not False and all(self.claims.values())

    def to_json(self, with_witnesses: bool = True) -> dict:
        out = {
            "theorem": self.theorem,
            "params": self.params,
            "bound": _plain(self.bound),
            "achieved": _plain(self.achieved),
            "tight": self.tight,
            "extremal_count": self.extremal_count,
            "construction_ok": self.construction_ok,
            "claims": self.claims,
            "nodes": self.nodes,
            "elapsed": round(self.elapsed, 4),
            "ok": self.ok,
        }
        if with_witnesses:
            out["witnesses"] = [[f.to_json() for f in w] for w in self.witnesses]
        return out


# -- hypotheses -------------------------------------------------------------------------


def _need(cond: bool, text: str, out: list[str]) -> None:
    if not cond:
        out.append(text)


def _h_sperner(n):
    out = []
    _need(n >= 2, "n >= 2", out)
    return out


def _h_ekr(n, k):
    out = []
    _need(k >= 1, "k >= 1", out)
    _need(n >= 2 * k, "n >= 2k", out)
    return out


def _h_cross(n, k, l):
    out = []
    _need(k >= 1 and l >= 1, "k, l >= 1", out)
    _need(k + l <= n, "k + l <= n", out)
    return out


def _h_cross_union(n, ls):
    out = []
    s = len(ls)
    _need(s >= 2, "at least two families", out)
    _need(s <= n, "s <= n", out)
    _need(all(1 <= x < n for x in ls), "1 <= l_i < n", out)
    _need(sum(ls) >= n, "l_1 + ... + l_s >= n", out)
    return out


def _h_swise_union(n, l, s):
    out = []
    _need(n >= s >= 2, "n >= s >= 2", out)
    _need(1 <= l <= n - 1, "1 <= l <= n - 1", out)
    _need(n <= s * l, "n <= s*l", out)
    return out


def _h_swise_int(n, k, s):
    out = []
    _need(s >= 2, "s >= 2", out)
    _need(n > k >= 1, "n > k >= 1", out)
    _need((s - 1) * n >= s * k, "(s-1)n >= sk", out)
    return out


def _h_hm(n, k):
    out = []
    _need(k >= 1 and n >= 2 * k, "n >= 2k > 1", out)
    return out


def _h_chain(n, l):
    out = []
    _need(n >= 2, "n >= 2", out)
    _need(n >= l > 0, "n >= l > 0", out)
    return out


def _h_butterfly(n):
    out = []
    _need(n >= 3, "n >= 3", out)
    return out


def _h_hilton(n, k, s, c):
    out = []
    _need(s >= 2, "s >= 2", out)
    _need(1 <= k <= n - 1, "1 <= k <= n-1", out)
    _need((s - 1) * n >= s * k, "(s-1)n >= sk", out)
    _need(Fraction(c) >= 1, "c >= 1", out)
    return out


def _h_emc(n, k, r):
    out = []
    _need(k >= 1 and r >= 1, "k, r >= 1", out)
    _need(k <= n - 1, "k <= n-1", out)
    _need(n >= k * (r + 1), "n >= k(r+1)", out)
    return out


def _h_emc_nonuniform(n):
    out = []
    _need(n >= 3, "n >= 3", out)
    return out


def cross_union_range(n: int, k: int, r: int) -> dict:
    """Boundary arithmetic for sums over r cross-union k-uniform families.

    t is the least integer with tk >= n.  With q non-empty families, q >= t
    is handled by the tuple bound; otherwise the sum is at most (t-1)n, which
    is at most r(n-k) when t = 2 and k <= (r-1)n/r, or when t >= 3 and
    k <= 2n/(t+1).
    """
    t = -(-n // k)
    checks = {"t <= r-1": t <= r - 1}
    if t == 2:
        checks["k <= (r-1)n/r"] = r * k <= (r - 1) * n
    elif t >= 3:
        checks["k <= 2n/(t+1)"] = (t + 1) * k <= 2 * n
    checks["(t-1)n <= r(n-k)"] = (t - 1) * n <= r * (n - k)
    return {"t": t, "checks": checks}


def _h_cross_union_sum(n, k, r):
    out = []
    _need(r >= 3, "r >= 3", out)
    _need(1 <= k <= n - 1, "1 <= k <= n-1", out)
    _need(n <= (r - 1) * k, "n/(r-1) <= k", out)
    _need(r * k <= (r - 1) * n, "k <= (r-1)n/r", out)
    return out


def _h_iu(n):
    out = []
    _need(n >= 2, "n >= 2", out)
    return out


def _h_gronau(n):
    out = []
    _need(n >= 3, "n >= 3", out)
    return out


# -- claims about the extremal sets --------------------------------------------------------


def _all_full_levels(rep, n):
    return {"extremal families are full levels": all(
        len(w[0].levels) == 1 and w[0].levels[0][1] == (1 << n) - 1 for w in rep.witnesses
    )}


def _stars_only(rep, n, k):
    if n == 2 * k:
        return {}  # no uniqueness statement at n = 2k
    return {"extremal families are stars": all(is_star(w[0]) for w in rep.witnesses) and rep.extremal_count == 1}


def _consecutive(rep, n, k, l):
    if k + l >= n:
        return {}
    ok = all(lambda_components(w[0]).count == 1 and lambda_components(w[1]).count == 1 for w in rep.witnesses)
    return {"extremal pairs consist of consecutive arcs": ok}


def _pqr(rep, n):
    ok = True
    for w in rep.witnesses:
        split = butterfly_decompose(w[0])
        ok &= split.lower_ok and split.upper_ok and split.all_antichains
    return {"minimal/middle/maximal inequalities": ok}


def _antipodal(rep, n):
    lo, hi = n // 2, n - n // 2
    targets = set()
    for d in {lo, hi}:
        if 0 < d < n:
            fam = cons.d_ij(n, 1 + d, 1)
            targets.add(_key(fam))
    ok = all(_key(w[0]) in targets for w in rep.witnesses)
    return {"extremal families are antipodal d_ij": ok}


def _key(fam: ArcFamily):
    from .core import family_key, symmetry_orbit

    return family_key(symmetry_orbit(fam))


# -- registry -------------------------------------------------------------------------------


def _single(n, k, *preds):
    return SearchProblem(n, (SlotSpec.arcs(k),), tuple(Constraint(p) for p in preds))


def _multi(n, *preds):
    return SearchProblem(n, (SlotSpec.multi(n),), tuple(Constraint(p) for p in preds))


def _avoiding_point(n, k):
    """The n - k arcs of length k that miss position 1."""
    return ArcFamily.from_heads(n, k, range(2, n - k + 2))


def _hm_runner(theorem, n, k):
    rep = hilton_milner_circle_check(n, k)
    bound = rep.bound if rep.bound is not None else 0
    claims = {
        "non-star families exist iff k >= 2 and n <= 3(k-1)": rep.exists == rep.expected_exists,
        "every non-star family has three members with empty intersection": rep.all_have_empty_triple,
    }
    witnesses = [(f,) for f in rep.maximum_witnesses]
    return VerifyResult(
        theorem.id,
        {"n": n, "k": k},
        bound,
        rep.max_size,
        rep.max_size == bound,
        None,
        witnesses,
        rep.construction_tight if rep.expected_exists else None,
        claims,
    )


def _hilton_problem(n, k, s, c):
    weights = tuple([Fraction(1)] * (s - 1) + [Fraction(c)])
    return SearchProblem(
        n,
        tuple(SlotSpec.arcs(k) for _ in range(s)),
        (Constraint(P("cross-intersecting")),),
        weights,
        nested=True,
    )


def _hilton_constructions(n, k, s, c):
    star = cons.star_arcs(n, k, 1)
    empty = ArcFamily(n)
    first = tuple([full_level(ArcFamily(n).ground, k)] * (s - 1) + [empty])
    second = tuple([star] * s)
    return first, second


THEOREMS: dict[str, Theorem] = {}


def _register(t: Theorem) -> None:
    THEOREMS[t.id] = t


_register(Theorem(
    "circular-sperner", ("n",), "antichains of arcs have at most n members",
    _h_sperner, lambda n: _multi(n, P("antichain")), lambda n: n,
    lambda n: (full_level(ArcFamily(n).ground, 1),), _all_full_levels, mode="all",
))
_register(Theorem(
    "circular-EKR", ("n", "k"), "intersecting families of k-arcs have at most k members",
    _h_ekr, lambda n, k: _single(n, k, P("intersecting")), lambda n, k: k,
    lambda n, k: (cons.star_arcs(n, k, 1),), _stars_only, mode="all",
))
_register(Theorem(
    "cross-intersecting", ("n", "k", "l"), "non-empty cross-intersecting k- and l-arc families sum to at most k + l",
    _h_cross,
    lambda n, k, l: SearchProblem(n, (SlotSpec.arcs(k), SlotSpec.arcs(l)), (Constraint(P("cross-intersecting")),), nonempty=frozenset({0, 1})),
    lambda n, k, l: k + l,
    lambda n, k, l: (cons.star_arcs(n, k, 1), cons.star_arcs(n, l, 1)),
    _consecutive, mode="all",
))
_register(Theorem(
    "cross-union", ("n", "ls"), "non-empty cross-union arc families sum to at most sum(n - l_i)",
    _h_cross_union,
    lambda n, ls: SearchProblem(n, tuple(SlotSpec.arcs(x) for x in ls), (Constraint(P("cross-union")),), nonempty=frozenset(range(len(ls)))),
    lambda n, ls: sum(n - x for x in ls),
    lambda n, ls: tuple(_avoiding_point(n, x) for x in ls),
))
_register(Theorem(
    "s-wise-union", ("n", "l", "s"), "s-wise union families of l-arcs have at most n - l members",
    _h_swise_union, lambda n, l, s: _single(n, l, P("r-wise-union", s)), lambda n, l, s: n - l,
    lambda n, l, s: (_avoiding_point(n, l),),
))
_register(Theorem(
    "s-wise-intersecting", ("n", "k", "s"), "s-wise intersecting families of k-arcs have at most k members",
    _h_swise_int, lambda n, k, s: _single(n, k, P("s-wise-intersecting", s)), lambda n, k, s: k,
    lambda n, k, s: (cons.star_arcs(n, k, 1),),
))
_register(Theorem(
    "circular-HM", ("n", "k"), "non-star intersecting families of k-arcs have at most 3k - n members",
    _h_hm, None, lambda n, k: 3 * k - n if (k >= 2 and n <= 3 * (k - 1)) else 0,
    runner=_hm_runner,
))
_register(Theorem(
    "chain-free", ("n", "l"), "arc families without a chain of length l have at most l*n members",
    _h_chain, lambda n, l: _multi(n, P("chain-free", l)), lambda n, l: l * n,
    lambda n, l: (ArcFamily(n, tuple((k, (1 << n) - 1) for k in range(1, l + 1))),) if l <= n - 1 else None,
))
_register(Theorem(
    "butterfly", ("n",), "butterfly-free arc families have at most 2n members",
    _h_butterfly, lambda n: _multi(n, P("butterfly-free")), lambda n: 2 * n,
    lambda n: (ArcFamily(n, ((n // 2, (1 << n) - 1), (n // 2 + 1, (1 << n) - 1))),), _pqr,
))
_register(Theorem(
    "hilton-nested", ("n", "k", "s", "c"), "nested cross-intersecting layers: F_1 + ... + F_{s-1} + c F_s <= max{(s-1)n, (s-1+c)k}",
    _h_hilton, _hilton_problem,
    lambda n, k, s, c: max(Fraction((s - 1) * n), (s - 1 + Fraction(c)) * k),
    None,
))
_register(Theorem(
    "circular-EMC", ("n", "k", "r"), "k-arc families with matching number at most r have at most kr members",
    _h_emc, lambda n, k, r: _single(n, k, P("matching-at-most", r)), lambda n, k, r: k * r,
    lambda n, k, r: (cons.b_k_of_T(n, k, cons.spaced_points(n, k, r)),),
))
_register(Theorem(
    "emc-nonuniform", ("n",), "arc families with matching number at most 2 have at most |B(T_2)| members",
    _h_emc_nonuniform, lambda n: _multi(n, P("matching-at-most", 2)), lambda n: cons.b_T2_size(n),
    lambda n: (cons.b_T2(n),),
))
_register(Theorem(
    "cross-union-sum", ("n", "k", "r"), "r non-empty cross-union k-arc families sum to at most r(n - k)",
    _h_cross_union_sum,
    lambda n, k, r: SearchProblem(n, tuple(SlotSpec.arcs(k) for _ in range(r)), (Constraint(P("cross-union")),), nonempty=frozenset(range(r))),
    lambda n, k, r: r * (n - k),
    lambda n, k, r: tuple(_avoiding_point(n, k) for _ in range(r)),
    lambda rep, n, k, r: {f"range: {name}": v for name, v in cross_union_range(n, k, r)["checks"].items()},
))
_register(Theorem(
    "iu-circle", ("n",), "intersecting-union arc families have at most floor(n/2)*ceil(n/2) members",
    _h_iu, lambda n: _multi(n, P("iu")), lambda n: (n // 2) * (n - n // 2),
    lambda n: (cons.d_ij(n, 1 + n // 2, 1),), _antipodal, mode="all",
))
_register(Theorem(
    "gronau-circle", ("n",), "arc families where every pair meets without covering or is complementary have at most floor(n/2)*ceil(n/2) members",
    _h_gronau, lambda n: _multi(n, P("gronau")), lambda n: (n // 2) * (n - n // 2),
    lambda n: (cons.d_ij(n, 1 + n // 2, 1),),
))


def _construction_ok(problem: SearchProblem, fams: tuple, bound) -> bool:
    """Does the explicit family tuple satisfy every constraint and reach the bound?"""
    for c in problem.constraints:
        slots = c.slots if c.slots is not None else tuple(range(len(problem.slots)))
        if c.predicate.joint:
            if not c.predicate.holds(*(fams[j] for j in slots)):
                return False
        elif not all(c.predicate.holds(fams[j]) for j in slots):
            return False
    if any(len(fams[j]) == 0 for j in problem.nonempty):
        return False
    value = sum((problem.weights[j] * len(f) for j, f in enumerate(fams)), Fraction(0))
    return value == bound


def verify_bound(
    theorem_id: str,
    budget_nodes: int | None = None,
    budget_seconds: float | None = None,
    mode: str | None = None,
    **params,
) -> VerifyResult:
    """Solve the registered problem exactly and compare with the closed-form bound."""
    if theorem_id not in THEOREMS:
        raise DomainError(f"unknown theorem {theorem_id!r}; known: {sorted(THEOREMS)}")
    th = THEOREMS[theorem_id]
    params = {k: v for k, v in params.items() if k in th.params}
    if "ls" in params:
        params["ls"] = tuple(params["ls"])
    th.check_hypothesis(**params)
    if th.runner is not None:
        res = th.runner(th, **params)
        if res.achieved > res.bound:
            raise BoundViolation(th.id, params, res.bound, res.achieved, res.witnesses[0] if res.witnesses else ())
        return res
    problem = th.problem(**params)
    bound = th.bound(**params)
    rep = maximize(problem, mode=mode or th.mode, budget_nodes=budget_nodes, budget_seconds=budget_seconds)
    achieved = rep.optimum
    if achieved > bound:
        raise BoundViolation(th.id, _json_params(params), bound, achieved, rep.witnesses[0])
    construction_ok = None
    if th.id == "hilton-nested":
        construction_ok = any(_construction_ok(problem, f, bound) for f in _hilton_constructions(**params))
    elif th.construction is not None:
        fams = th.construction(**params)
        if fams is not None:
            construction_ok = _construction_ok(problem, fams, bound)
    claims = th.claims(rep, **params) if th.claims is not None else {}
    return VerifyResult(
        th.id,
        _json_params(params),
        bound,
        achieved,
        achieved == bound,
        rep.extremal_count,
        rep.witnesses,
        construction_ok,
        claims,
        rep.nodes_explored,
        rep.elapsed,
    )


def _json_params(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, Fraction):
            out[k] = _plain(v)
        elif isinstance(v, tuple):
            out[k] = list(v)
        else:
            out[k] = v
    return out


__all__ = ["THEOREMS", "Theorem", "VerifyResult", "BoundViolation", "BudgetExceeded", "verify_bound", "cross_union_range"]
