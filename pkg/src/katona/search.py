"""Exact branch-and-bound search for extremal arc and set families.

A :class:`SearchProblem` describes a tuple of families (slots), each drawn
from a universe of candidates (arcs of given lengths, or subsets of [n] of
given sizes), together with anti-monotone constraints.  Every constraint is
compiled into a list of *conflicts*: candidate sets that may not be selected
together.  Because all supported predicates are defined by a bounded number
of members (pairs, s-tuples, chains of fixed length, ...), a selection is
feasible exactly when it contains no conflict.

The engine is an include-first depth-first search with forward propagation
(a conflict with a single undecided member removes that member) and static
group bounds: the candidates are partitioned into groups whose maximum
selectable count is computed exactly, and the bound at a node is the best
weight each group could still contribute.  Bounds never come from the
theorems being checked.
"""

from __future__ import annotations

import json
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator, Sequence

from .core import ArcFamily, DomainError, SetFamily, arc_mask, bits_of, canonical_tuple, family_key, popcount
from .predicates import PredicateId, check_hereditary

DEFAULT_NODE_BUDGET = 20_000_000


class BudgetExceeded(RuntimeError):
    """The search ran out of nodes or time before proving optimality."""

    def __init__(self, message: str, best, upper_bound, nodes: int, state_space: int):
        super().__init__(message)
        self.best = best
        self.upper_bound = upper_bound
        self.nodes = nodes
        self.state_space = state_space

    def to_json(self) -> dict:
        return {
            "exact": False,
            "partial_best": _num_json(self.best),
            "upper_bound": _num_json(self.upper_bound),
            "nodes_explored": self.nodes,
            "state_space_estimate": f"2^{self.state_space.bit_length() - 1}",
            "message": str(self),
        }


class SearchError(AssertionError):
    """A witness failed independent re-verification (an engine bug)."""


# -- problem description --------------------------------------------------------


def parse_range(text: str | int | Sequence[int], low: int | None = None, high: int | None = None) -> tuple[int, ...]:
    """Accept ``5``, ``"5"``, ``"2..6"``, ``"1,3,4"`` or a list of ints."""
    if isinstance(text, int):
        return (text,)
    if not isinstance(text, str):
        return tuple(int(x) for x in text)
    text = text.strip()
    if ".." in text:
        a, b = text.split("..")
        a = int(a) if a else low
        b = int(b) if b else high
        if a is None or b is None:
            raise DomainError(f"open range {text!r} needs a default bound")
        if a > b:
            raise DomainError(f"empty range {text!r}")
        return tuple(range(a, b + 1))
    return tuple(int(x) for x in text.split(",") if x.strip())


@dataclass(frozen=True)
class SlotSpec:
    """Universe of one slot: arcs of the listed lengths, or subsets of the listed sizes."""

    kind: str  # "arcs" | "sets"
    sizes: tuple[int, ...]

    @classmethod
    def arcs(cls, *levels: int) -> "SlotSpec":
        return cls("arcs", tuple(sorted(set(levels))))

    @classmethod
    def sets(cls, *sizes: int) -> "SlotSpec":
        return cls("sets", tuple(sorted(set(sizes))))

    @classmethod
    def multi(cls, n: int) -> "SlotSpec":
        return cls("arcs", tuple(range(1, n)))

    def to_json(self) -> dict:
        return {"levels" if self.kind == "arcs" else "sets": list(self.sizes)}

    @classmethod
    def from_json(cls, data, n: int) -> "SlotSpec":
        if isinstance(data, (int, str)) and not (isinstance(data, str) and data in ("multi", "all")):
            return cls.arcs(*parse_range(data, 1, n - 1))
        if data in ("multi", "all"):
            return cls.multi(n)
        if "levels" in data:
            lv = data["levels"]
            if lv in ("multi", "all"):
                return cls.multi(n)
            return cls.arcs(*parse_range(lv, 1, n - 1))
        if "sets" in data:
            return cls.sets(*parse_range(data["sets"], 0, n))
        raise DomainError(f"slot spec needs 'levels' or 'sets': {data!r}")


@dataclass(frozen=True)
class Constraint:
    """A predicate applied to each listed slot (single) or to the slot tuple (joint).

    ``slots=None`` means every slot.
    """

    predicate: PredicateId
    slots: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        out = {"predicate": str(self.predicate)}
        if self.slots is not None:
            out["slots"] = list(self.slots)
        return out

    @classmethod
    def from_json(cls, data) -> "Constraint":
        if isinstance(data, str):
            return cls(PredicateId.parse(data))
        slots = data.get("slots")
        return cls(PredicateId.parse(data["predicate"]), None if slots is None else tuple(slots))


def _conflict_size(pid: PredicateId, arity: int) -> int | None:
    """Largest number of members a minimal violation of ``pid`` can involve."""
    t, p = pid.tag, pid.param
    if t in ("intersecting", "iu", "gronau", "antichain"):
        return 2
    if t == "s-wise-intersecting":
        return p
    if t == "r-wise-union":
        return p
    if t in ("cross-intersecting", "cross-union"):
        return arity
    if t == "s-wise-cross-intersecting":
        return p
    if t == "chain-free":
        return p + 1
    if t == "butterfly-free":
        return 4
    if t == "matching-at-most":
        return p + 1
    return None  # star: minimal violations are not bounded for general sets


@dataclass(frozen=True)
class SearchProblem:
    """Maximise a weighted sum of slot sizes subject to anti-monotone constraints.

    With ``nested`` set the slots are disjoint layers of one universe and the
    families seen by the constraints are F_i = layer_i + ... + layer_s, so that
    F_1 contains F_2 contains ... F_s.  The objective is always
    sum_i weight_i * |F_i| (measured by ``measure``: member count, or the sum of
    1/C(n, |F|) for "lym", or of 1/C(n-1, |F|-1) for "lym-shifted").
    """

    n: int
    slots: tuple[SlotSpec, ...]
    constraints: tuple[Constraint, ...] = ()
    weights: tuple[Fraction, ...] | None = None
    nonempty: frozenset[int] = frozenset()
    nested: bool = False
    measure: str = "count"

    def __post_init__(self) -> None:
        w = self.weights
        w = tuple(Fraction(1) for _ in self.slots) if w is None else tuple(Fraction(x) for x in w)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "nonempty", frozenset(self.nonempty))
        object.__setattr__(self, "slots", tuple(self.slots))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    # -- validation ---------------------------------------------------------
    def validate(self) -> None:
        n = self.n
        if not self.slots:
            raise DomainError("a search problem needs at least one slot")
        if n < 2:
            raise DomainError("ground size must be at least 2")
        if len(self.weights) != len(self.slots):
            raise DomainError("one weight per slot is required")
        if any(x <= 0 for x in self.weights):
            raise DomainError("weights must be positive")
        if self.measure not in ("count", "lym", "lym-shifted"):
            raise DomainError(f"unknown measure {self.measure!r}")
        for s in self.slots:
            if s.kind == "arcs":
                if not s.sizes or any(not 1 <= k <= n - 1 for k in s.sizes):
                    raise DomainError(f"arc levels {s.sizes} must lie in 1..{n - 1}")
            elif s.kind == "sets":
                if not s.sizes or any(not 0 <= k <= n for k in s.sizes):
                    raise DomainError(f"set sizes {s.sizes} must lie in 0..{n}")
                if self.measure == "lym" and any(k in (0, n) for k in s.sizes):
                    raise DomainError("the lym measure needs 0 < |F| < n")
            else:
                raise DomainError(f"unknown slot kind {s.kind!r}")
        if self.measure == "lym" and any(k in (0, n) for s in self.slots for k in s.sizes):
            raise DomainError("the lym measure needs 0 < |F| < n")
        if self.measure == "lym-shifted" and any(k < 1 for s in self.slots for k in s.sizes):
            raise DomainError("the shifted lym measure needs |F| >= 1")
        if self.nested and len(set(self.slots)) != 1:
            raise DomainError("nested layers must share one universe")
        if any(not 0 <= j < len(self.slots) for j in self.nonempty):
            raise DomainError("nonempty slot index out of range")
        for c in self.constraints:
            pid = c.predicate
            slots = c.slots if c.slots is not None else tuple(range(len(self.slots)))
            if any(not 0 <= j < len(self.slots) for j in slots):
                raise DomainError(f"constraint {pid} names a slot out of range")
            if pid.joint:
                need = pid.param if pid.tag == "s-wise-cross-intersecting" else 2
                if len(slots) < need:
                    raise DomainError(f"joint predicate {pid} needs at least {need} slots")
            if _conflict_size(pid, len(slots)) is None:
                raise DomainError(f"predicate {pid} has unbounded violations and cannot drive a search")
            if pid.direction != "down" or not check_hereditary(pid):
                raise DomainError(f"predicate {pid} is not anti-monotone; pruning would be unsound")

    @property
    def arc_universe(self) -> bool:
        return all(s.kind == "arcs" for s in self.slots)

    # -- JSON ---------------------------------------------------------------
    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "slots": [s.to_json() for s in self.slots],
            "constraints": [c.to_json() for c in self.constraints],
            "weights": [_frac_str(w) for w in self.weights],
            "nonempty": sorted(self.nonempty),
            "nested": self.nested,
        }
        if self.measure != "count":
            out["measure"] = self.measure
        return out

    @classmethod
    def from_json(cls, data) -> "SearchProblem":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])
        if "slots" in data:
            slots = tuple(SlotSpec.from_json(s, n) for s in data["slots"])
        elif "k" in data:
            slots = (SlotSpec.arcs(*parse_range(data["k"], 1, n - 1)),)
        else:
            slots = (SlotSpec.multi(n),)
        cons = data.get("constraints")
        if cons is None:
            pred = data.get("predicate")
            if pred is None or pred == "":
                cons = []
            elif isinstance(pred, list):
                cons = pred
            else:
                cons = [pred]
        constraints = tuple(Constraint.from_json(c) for c in cons)
        weights = data.get("weights")
        nonempty = data.get("nonempty", [])
        if nonempty is True:
            nonempty = list(range(len(slots)))
        return cls(
            n,
            slots,
            constraints,
            None if weights is None else tuple(Fraction(str(w)) for w in weights),
            frozenset(nonempty),
            bool(data.get("nested", False)),
            data.get("measure", "count"),
        )


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _num_json(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else _frac_str(x)
    return x


@dataclass
class SearchReport:
    optimum: int | Fraction
    extremal_count: int | None
    witnesses: list[tuple]  # canonical tuples of families, one per slot (derived families when nested)
    nodes_explored: int
    elapsed: float
    root_bound: int | Fraction
    mode: str
    exact: bool = True

    def to_json(self) -> dict:
        return {
            "exact": self.exact,
            "optimum": _num_json(self.optimum),
            "extremal_count": self.extremal_count,
            "witnesses": [[f.to_json() for f in w] for w in self.witnesses],
            "nodes_explored": self.nodes_explored,
            "elapsed": round(self.elapsed, 6),
            "root_bound": _num_json(self.root_bound),
            "mode": self.mode,
        }


# -- compilation -----------------------------------------------------------------


def _sets_of_size(n: int, k: int) -> list[int]:
    return [sum(1 << i for i in c) for c in combinations(range(n), k)]


@dataclass
class _Compiled:
    problem: SearchProblem
    slot: list[int]
    mask: list[int]
    level: list[int]
    head: list[int | None]
    weight: list[int]
    scale: int
    pair: list[int] = field(default_factory=list)  # pair[c]: candidates conflicting with c
    higher: list[list[int]] = field(default_factory=list)  # conflicts of size >= 3 containing c
    conflicts: set[int] = field(default_factory=set)
    dead: int = 0  # candidates that violate on their own

    @property
    def size(self) -> int:
        return len(self.mask)

    def families(self, sel: int) -> tuple:
        """The families seen by the constraints (derived families when nested)."""
        p = self.problem
        s = len(p.slots)
        per = [[] for _ in range(s)]
        for i in bits_of(sel):
            if p.nested:
                for j in range(self.slot[i] + 1):
                    per[j].append(i)
            else:
                per[self.slot[i]].append(i)
        return tuple(self._family(p.slots[j], idx) for j, idx in enumerate(per))

    def _family(self, spec: SlotSpec, idx: list[int]):
        n = self.problem.n
        if spec.kind == "arcs":
            return ArcFamily.from_arcs(n, ((self.head[i], self.level[i]) for i in idx))
        return SetFamily(n, frozenset(self.mask[i] for i in idx))

    def value(self, sel: int) -> int:
        return sum(self.weight[i] for i in bits_of(sel))


def _member_weight(p: SearchProblem, size: int) -> Fraction:
    if p.measure == "lym":
        return Fraction(1, math.comb(p.n, size))
    if p.measure == "lym-shifted":
        return Fraction(1, math.comb(p.n - 1, size - 1))
    return Fraction(1)


def compile_problem(p: SearchProblem, generic: bool = False) -> _Compiled:
    """Enumerate candidates and build the conflict lists.

    ``generic`` forces the brute-force conflict generator, which evaluates the
    predicates directly on every small candidate subset.  It is slower and is
    kept as an independent route for cross-checking the specialised one.
    """
    p.validate()
    n = p.n
    slot, mask, level, head, fw = [], [], [], [], []
    cum = [sum(p.weights[: j + 1], Fraction(0)) for j in range(len(p.slots))]
    for j, spec in enumerate(p.slots):
        for k in spec.sizes:
            if spec.kind == "arcs":
                items = [(arc_mask(h, k, n), h + 1) for h in range(n)]
            else:
                items = [(m, None) for m in _sets_of_size(n, k)]
            w = (cum[j] if p.nested else p.weights[j]) * _member_weight(p, k)
            for m, h in items:
                slot.append(j)
                mask.append(m)
                level.append(k)
                head.append(h)
                fw.append(w)
    # order: required slots first, heavier candidates first, then a stable layout
    order = sorted(
        range(len(mask)),
        key=lambda i: (slot[i] not in p.nonempty, -fw[i], slot[i], head[i] or 0, level[i], mask[i]),
    )
    slot = [slot[i] for i in order]
    mask = [mask[i] for i in order]
    level = [level[i] for i in order]
    head = [head[i] for i in order]
    fw = [fw[i] for i in order]
    scale = math.lcm(*(w.denominator for w in fw)) if fw else 1
    weight = [int(w * scale) for w in fw]
    comp = _Compiled(p, slot, mask, level, head, weight, scale)
    conflicts = _generic_conflicts(comp) if (generic or p.nested) else _specialised_conflicts(comp)
    _install_conflicts(comp, conflicts)
    return comp


def _install_conflicts(comp: _Compiled, conflicts: set[int]) -> None:
    m = comp.size
    pair = [0] * m
    higher: list[list[int]] = [[] for _ in range(m)]
    dead = 0
    for e in conflicts:
        c = popcount(e)
        if c == 1:
            dead |= e
        elif c == 2:
            a, b = bits_of(e)
            pair[a] |= 1 << b
            pair[b] |= 1 << a
    for e in conflicts:
        if popcount(e) >= 3 and not e & dead and not _has_pair(e, pair):
            for i in bits_of(e):
                higher[i].append(e)
    comp.pair, comp.higher, comp.dead = pair, higher, dead
    comp.conflicts = conflicts


def _has_pair(e: int, pair: list[int]) -> bool:
    return any(pair[i] & e for i in bits_of(e))


def _constraint_slots(p: SearchProblem, c: Constraint) -> tuple[int, ...]:
    return c.slots if c.slots is not None else tuple(range(len(p.slots)))


def _nested_exclusivity(comp: _Compiled) -> set[int]:
    out = set()
    by_member: dict[tuple, list[int]] = {}
    for i in range(comp.size):
        by_member.setdefault((comp.level[i], comp.mask[i]), []).append(i)
    for idx in by_member.values():
        for a, b in combinations(idx, 2):
            out.add(1 << a | 1 << b)
    return out


def _violates(comp: _Compiled, sel: int) -> bool:
    p = comp.problem
    fams = comp.families(sel)
    for c in p.constraints:
        slots = _constraint_slots(p, c)
        if c.predicate.joint:
            if not c.predicate.holds(*(fams[j] for j in slots)):
                return True
        else:
            for j in slots:
                if not c.predicate.holds(fams[j]):
                    return True
    return False


def _generic_conflicts(comp: _Compiled) -> set[int]:
    """Minimal violating candidate sets, found by evaluating the predicates on small subsets."""
    p = comp.problem
    limit = max((_conflict_size(c.predicate, len(_constraint_slots(p, c))) for c in p.constraints), default=0)
    found: set[int] = set()
    if p.nested:
        found |= _nested_exclusivity(comp)
        limit = max(limit, 2)
    found_list = list(found)
    for size in range(1, limit + 1):
        new = []
        for combo in combinations(range(comp.size), size):
            sel = 0
            for i in combo:
                sel |= 1 << i
            if any(f & sel == f for f in found_list):
                continue
            if _violates(comp, sel):
                new.append(sel)
        found_list.extend(new)
        found.update(new)
    return found


def _specialised_conflicts(comp: _Compiled) -> set[int]:
    p = comp.problem
    n = p.n
    full = (1 << n) - 1
    by_slot: dict[int, list[int]] = {}
    for i in range(comp.size):
        by_slot.setdefault(comp.slot[i], []).append(i)
    out: set[int] = set()
    mask = comp.mask

    def bit(*idx: int) -> int:
        r = 0
        for i in idx:
            r |= 1 << i
        return r

    for c in p.constraints:
        pid = c.predicate
        slots = _constraint_slots(p, c)
        t, s = pid.tag, pid.param
        if pid.joint:
            width = s if t == "s-wise-cross-intersecting" else len(slots)
            kind = "union" if t == "cross-union" else "meet"
            for sub in combinations(slots, width):
                # Slots that must end up non-empty can always complete a
                # transversal, so a bad partial transversal over the other
                # slots is already fatal.
                optional = [j for j in sub if j not in p.nonempty]
                forced = [j for j in sub if j in p.nonempty]
                for extra in range(len(forced) + 1):
                    for part in combinations(forced, extra):
                        cols = optional + list(part)
                        if cols:
                            _transversals([by_slot.get(j, []) for j in cols], mask, full, kind, out)
            continue
        for j in slots:
            cand = by_slot.get(j, [])
            if t in ("intersecting", "iu", "gronau", "antichain") or pid.pairwise:
                for i in cand:
                    if not pid.holds((n, [mask[i]])):
                        out.add(bit(i))
                for a, b in combinations(cand, 2):
                    if not pid.holds((n, [mask[a], mask[b]])):
                        out.add(bit(a, b))
            elif t == "s-wise-intersecting":
                _subsets_by_fold(cand, mask, s, full, lambda acc, m: acc & m, lambda acc: acc == 0, out)
            elif t == "r-wise-union":
                _subsets_by_fold(cand, mask, s, 0, lambda acc, m: acc | m, lambda acc: acc == full, out)
            elif t == "chain-free":
                _chains(cand, mask, s + 1, out)
            elif t == "matching-at-most":
                for i in cand:
                    if mask[i] == 0:
                        out.add(bit(i))
                _disjoint_sets(cand, mask, s + 1, out)
            elif t == "butterfly-free":
                _butterflies(cand, mask, out)
            else:  # pragma: no cover - validate() rejects the rest
                raise DomainError(f"no conflict generator for {pid}")
    return out


def _transversals(groups, mask, full, kind, out) -> None:
    def rec(g: int, acc: int, sel: int) -> None:
        if g == len(groups):
            if (kind == "union" and acc == full) or (kind == "meet" and acc == 0):
                out.add(sel)
            return
        for i in groups[g]:
            rec(g + 1, (acc | mask[i]) if kind == "union" else (acc & mask[i]), sel | 1 << i)

    rec(0, 0 if kind == "union" else full, 0)


def _subsets_by_fold(cand, mask, limit, start, fold, bad, out) -> None:
    """All subsets of at most ``limit`` candidates whose fold is bad, minimal ones only."""

    def rec(pos: int, acc: int, sel: int, size: int) -> None:
        for q in range(pos, len(cand)):
            i = cand[q]
            nxt = fold(acc, mask[i])
            s = sel | 1 << i
            if bad(nxt):
                out.add(s)
            elif size + 1 < limit:
                rec(q + 1, nxt, s, size + 1)

    rec(0, start, 0, 0)


def _chains(cand, mask, length, out) -> None:
    """All strictly increasing chains of ``length`` members."""
    order = sorted(cand, key=lambda i: popcount(mask[i]))

    def rec(last: int, sel: int, size: int, pos: int) -> None:
        if size == length:
            out.add(sel)
            return
        for q in range(pos, len(order)):
            i = order[q]
            m = mask[i]
            if m != mask[last] and m & mask[last] == mask[last]:
                rec(i, sel | 1 << i, size + 1, q + 1)

    for q, i in enumerate(order):
        rec(i, 1 << i, 1, q + 1)


def _disjoint_sets(cand, mask, count, out) -> None:
    def rec(pos: int, acc: int, sel: int, size: int) -> None:
        if size == count:
            out.add(sel)
            return
        for q in range(pos, len(cand)):
            i = cand[q]
            if not mask[i] & acc:
                rec(q + 1, acc | mask[i], sel | 1 << i, size + 1)

    rec(0, 0, 0, 0)


def _butterflies(cand, mask, out) -> None:
    for g, h in combinations(cand, 2):
        meet = mask[g] & mask[h]
        below = [i for i in cand if i != g and i != h and mask[i] & meet == mask[i]]
        for e, f in combinations(below, 2):
            out.add(1 << g | 1 << h | 1 << e | 1 << f)


# -- bounds ----------------------------------------------------------------------


@dataclass
class _Group:
    members: int
    cap: int
    order: list[int]  # member indices, heaviest first


def _contains_conflict(comp: _Compiled, sel: int) -> bool:
    for i in bits_of(sel):
        if comp.pair[i] & sel or (1 << i) & comp.dead:
            return True
        for e in comp.higher[i]:
            if e & sel == e:
                return True
    return False


def _max_independent(comp: _Compiled, members: list[int]) -> int:
    """Largest conflict-free subset of a small candidate list (count, not weight)."""
    best = 0

    def rec(pos: int, sel: int, size: int) -> None:
        nonlocal best
        if size + len(members) - pos <= best:
            return
        if pos == len(members):
            best = size
            return
        i = members[pos]
        s = sel | 1 << i
        if not _contains_conflict(comp, s):
            rec(pos + 1, s, size + 1)
        rec(pos + 1, sel, size)

    rec(0, 0, 0)
    return best


def _group(comp: _Compiled, members: list[int], cap: int | None = None) -> _Group:
    members = sorted(members)
    m = 0
    for i in members:
        m |= 1 << i
    if cap is None:
        cap = _max_independent(comp, members)
    return _Group(m, cap, members)


def _level_partition(comp: _Compiled) -> list[_Group]:
    by: dict[tuple[int, int], list[int]] = {}
    for i in range(comp.size):
        by.setdefault((comp.slot[i], comp.level[i]), []).append(i)
    return [_group(comp, idx) for _, idx in sorted(by.items())]


def _cover_partition(comp: _Compiled, t: int, key) -> list[_Group]:
    """Greedy partition into groups in which any t+1 members contain a conflict."""
    groups: list[list[int]] = []
    masks: list[int] = []
    for v in sorted(range(comp.size), key=key):
        placed = False
        for gi, g in enumerate(groups):
            if len(g) >= 3 * t + 6:
                continue
            ok = True
            for sub in combinations(g, t):
                s = 1 << v
                for i in sub:
                    s |= 1 << i
                if not _contains_conflict(comp, s):
                    ok = False
                    break
            if ok:
                g.append(v)
                masks[gi] |= 1 << v
                placed = True
                break
        if not placed:
            groups.append([v])
            masks.append(1 << v)
    return [_group(comp, g, min(t, len(g)) if len(g) > t else len(g)) for g in groups]


def _partitions(comp: _Compiled) -> list[list[_Group]]:
    parts = [_level_partition(comp)]
    sizes = {popcount(e) for e in comp.conflicts}
    if comp.size <= 8:
        return parts
    for t in sorted(s - 1 for s in sizes if s >= 2):
        for key in (
            lambda i: (comp.head[i] or 0, comp.slot[i], comp.level[i], comp.mask[i]),
            lambda i: (comp.slot[i], comp.level[i], comp.head[i] or 0, comp.mask[i]),
        ):
            part = _cover_partition(comp, t, key)
            if sum(g.cap for g in part) < comp.size:
                parts.append(part)
    return parts


def _bound(parts: list[list[_Group]], weight: list[int], sel: int, pool: int) -> int:
    best = None
    for part in parts:
        total = 0
        for g in part:
            room = g.cap - popcount(sel & g.members)
            live = pool & g.members
            if room <= 0 or not live:
                continue
            for i in g.order:
                if live >> i & 1:
                    total += weight[i]
                    room -= 1
                    if not room:
                        break
        if best is None or total < best:
            best = total
    return best or 0


# -- the search --------------------------------------------------------------------


class _Engine:
    def __init__(self, comp: _Compiled, mode: str, budget_nodes: int | None, budget_seconds: float | None, symmetry: bool):
        self.c = comp
        self.mode = mode
        self.budget_nodes = budget_nodes
        self.deadline = None if budget_seconds is None else time.monotonic() + budget_seconds
        self.symmetry = symmetry and comp.problem.arc_universe
        self.parts = _partitions(comp)
        self.nodes = 0
        self.best = -1
        self.best_sels: list[int] = []
        p = comp.problem
        self.required = [0] * len(p.slots)
        self.slot_mask = [0] * len(p.slots)
        for i in range(comp.size):
            self.slot_mask[comp.slot[i]] |= 1 << i
        self.req = sorted(p.nonempty)
        self.root_bound = 0

    def _tick(self) -> None:
        self.nodes += 1
        if self.budget_nodes is not None and self.nodes > self.budget_nodes:
            self._abort("node budget exhausted")
        if self.deadline is not None and not self.nodes & 1023 and time.monotonic() > self.deadline:
            self._abort("time budget exhausted")

    def _abort(self, why: str) -> None:
        scale = self.c.scale
        best = None if self.best < 0 else Fraction(self.best, scale)
        raise BudgetExceeded(
            f"{why} after {self.nodes} nodes; state space about 2^{self.c.size}",
            best,
            Fraction(self.root_bound, scale),
            self.nodes,
            1 << self.c.size,
        )

    def _include(self, sel: int, pool: int, i: int) -> tuple[int, int]:
        c = self.c
        sel |= 1 << i
        pool &= ~(1 << i) & ~c.pair[i]
        for e in c.higher[i]:
            rest = e & ~sel
            if rest and not rest & (rest - 1):
                pool &= ~rest
        return sel, pool

    def _record(self, sel: int, value: int) -> None:
        for j in self.req:
            if not sel & self.slot_mask[j]:
                return
        if value > self.best:
            self.best = value
            self.best_sels = [sel]
        elif value == self.best and self.mode == "all":
            self.best_sels.append(sel)

    def _dfs(self, sel: int, pool: int, value: int) -> None:
        self._tick()
        for j in self.req:
            if not (sel | pool) & self.slot_mask[j]:
                return
        if not pool:
            self._record(sel, value)
            return
        bound = value + _bound(self.parts, self.c.weight, sel, pool)
        if bound < self.best or (self.mode == "value" and bound == self.best):
            return
        i = (pool & -pool).bit_length() - 1
        s2, p2 = self._include(sel, pool, i)
        self._dfs(s2, p2, value + self.c.weight[i])
        self._dfs(sel, pool & ~(1 << i), value)

    def run(self) -> None:
        c = self.c
        full = (1 << c.size) - 1
        pool0 = full & ~c.dead
        self.root_bound = _bound(self.parts, c.weight, 0, pool0)
        if not self.symmetry:
            self._dfs(0, pool0, 0)
            return
        # every non-empty solution has a rotation whose first non-empty slot holds a head-1 arc
        self._record(0, 0)
        before = 0
        for j in range(len(c.problem.slots)):
            anchors = [i for i in range(c.size) if c.slot[i] == j and c.head[i] == 1 and pool0 >> i & 1]
            used = 0
            for a in anchors:
                pool = pool0 & ~before & ~used
                if any(not (pool & self.slot_mask[r]) for r in self.req if r < j):
                    break
                sel, pool = self._include(0, pool & ~(1 << a), a)
                self._dfs(sel, pool, c.weight[a])
                used |= 1 << a
            before |= self.slot_mask[j]
            if j in c.problem.nonempty:
                break


def canonical_witness(comp: _Compiled, sel: int) -> tuple:
    fams = comp.families(sel)
    if comp.problem.arc_universe:
        return canonical_tuple(fams)
    return fams


def _witness_key(fams: tuple) -> tuple:
    out = []
    for f in fams:
        if isinstance(f, ArcFamily):
            out.append(family_key(f))
        else:
            out.append(tuple(sorted(f.members)))
    return tuple(out)


def maximize(
    problem: SearchProblem,
    mode: str = "all",
    budget_nodes: int | None = None,
    budget_seconds: float | None = None,
    symmetry: bool = True,
) -> SearchReport:
    """Exact optimum of ``problem``.

    ``mode="all"`` collects every optimal selection and reports the distinct
    canonical forms; ``mode="value"`` only proves the optimum and keeps one
    witness.  Raises :class:`BudgetExceeded` when a budget runs out.
    """
    if mode not in ("all", "value"):
        raise DomainError(f"unknown search mode {mode!r}")
    if budget_seconds is None and os.environ.get("KATONA_BUDGET_SECONDS"):
        budget_seconds = float(os.environ["KATONA_BUDGET_SECONDS"])
    start = time.monotonic()
    comp = compile_problem(problem)
    eng = _Engine(comp, mode, budget_nodes, budget_seconds, symmetry)
    eng.run()
    if eng.best < 0:
        raise DomainError("no feasible selection satisfies the non-empty requirements")
    canon: dict[tuple, tuple] = {}
    for sel in eng.best_sels:
        _reverify(comp, sel, eng.best)
        w = canonical_witness(comp, sel)
        canon.setdefault(_witness_key(w), w)
    keys = sorted(canon)
    witnesses = [canon[k] for k in keys]
    optimum = Fraction(eng.best, comp.scale)
    return SearchReport(
        optimum=int(optimum) if optimum.denominator == 1 else optimum,
        extremal_count=len(witnesses) if mode == "all" else None,
        witnesses=witnesses,
        nodes_explored=eng.nodes,
        elapsed=time.monotonic() - start,
        root_bound=Fraction(eng.root_bound, comp.scale),
        mode=mode,
    )


def _reverify(comp: _Compiled, sel: int, value: int) -> None:
    p = comp.problem
    if _violates(comp, sel):
        raise SearchError(f"witness {comp.families(sel)} violates the constraints")
    fams = comp.families(sel)
    total = Fraction(0)
    for j, f in enumerate(fams):
        members = f.masks() if isinstance(f, ArcFamily) else list(f.members)
        if j in p.nonempty and not members:
            raise SearchError("witness leaves a required slot empty")
        total += p.weights[j] * sum((_member_weight(p, popcount(m)) for m in members), Fraction(0))
    if total != Fraction(value, comp.scale):
        raise SearchError(f"witness objective {total} differs from search value {Fraction(value, comp.scale)}")


def iter_feasible(problem: SearchProblem, generic: bool = False) -> Iterator[tuple]:
    """Every feasible selection, as the tuple of families the constraints see.

    No symmetry reduction and no bounding: this is the exhaustive enumeration
    used to check statements about *all* constrained families.
    """
    comp = compile_problem(problem, generic=generic)
    req = sorted(problem.nonempty)
    slot_mask = [0] * len(problem.slots)
    for i in range(comp.size):
        slot_mask[comp.slot[i]] |= 1 << i
    eng = _Engine(comp, "all", None, None, False)
    stack = [(0, ((1 << comp.size) - 1) & ~comp.dead)]
    while stack:
        sel, pool = stack.pop()
        if any(not (sel | pool) & slot_mask[j] for j in req):
            continue
        if not pool:
            yield comp.families(sel)
            continue
        i = (pool & -pool).bit_length() - 1
        stack.append((sel, pool & ~(1 << i)))
        stack.append(eng._include(sel, pool, i))


def brute_force_optimum(problem: SearchProblem) -> int | Fraction:
    """Optimum by checking every subset of the candidates directly with the predicates."""
    comp = compile_problem(problem, generic=True)
    if comp.size > 22:
        raise DomainError("brute force is limited to 22 candidates")
    # a member may sit in only one nested layer
    exclusive = list(_nested_exclusivity(comp)) if problem.nested else []
    best = None
    for sel in range(1 << comp.size):
        if any(not sel & _slot_bits(comp, j) for j in problem.nonempty):
            continue
        if any(e & sel == e for e in exclusive):
            continue
        if _violates(comp, sel):
            continue
        v = Fraction(comp.value(sel), comp.scale)
        if best is None or v > best:
            best = v
    if best is None:
        raise DomainError("no feasible selection")
    return int(best) if best.denominator == 1 else best


def _slot_bits(comp: _Compiled, j: int) -> int:
    m = 0
    for i in range(comp.size):
        if comp.slot[i] == j:
            m |= 1 << i
    return m
