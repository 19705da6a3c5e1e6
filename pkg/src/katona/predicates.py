"""Structural properties of families of subsets of [n].

Every predicate accepts an :class:`ArcFamily`, a :class:`SetFamily`, or a
``(n, masks)`` pair.  Tuple-quantified definitions (s-wise, cross) allow
repeated members, so an s-wise intersecting family is also intersecting.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from .core import ArcFamily, DomainError, SetFamily, bits_of, popcount

Family = ArcFamily | SetFamily | tuple[int, Sequence[int]]


def as_masks(fam: Family) -> tuple[int, list[int]]:
    if isinstance(fam, (ArcFamily, SetFamily)):
        return fam.n, fam.masks()
    n, masks = fam
    return n, list(masks)


def _ground(fams: Iterable[Family]) -> tuple[int, list[list[int]]]:
    ns, out = set(), []
    for f in fams:
        n, m = as_masks(f)
        ns.add(n)
        out.append(m)
    if len(ns) > 1:
        raise DomainError(f"families on different ground sets: {sorted(ns)}")
    return (ns.pop() if ns else 0), out


# -- reachable meet/join sets ------------------------------------------------
# A transversal tuple over families F_1..F_s has intersection (union) equal to
# one of the values reachable by folding & (|) across the families.  Folding
# over deduplicated values keeps this cheap for small n.


def meets(families: Sequence[Sequence[int]], start: int) -> set[int]:
    reach = {start}
    for fam in families:
        reach = {a & m for a in reach for m in fam}
        if not reach:
            break
    return reach


def joins(families: Sequence[Sequence[int]], start: int = 0) -> set[int]:
    reach = {start}
    for fam in families:
        reach = {a | m for a in reach for m in fam}
        if not reach:
            break
    return reach


# -- single-family predicates -------------------------------------------------


def is_intersecting(fam: Family) -> bool:
    _, masks = as_masks(fam)
    for i, a in enumerate(masks):
        if not a:
            return False
        for b in masks[i + 1:]:
            if not a & b:
                return False
    return True


def is_s_wise_intersecting(fam: Family, s: int) -> bool:
    if s < 2:
        raise DomainError("s must be at least 2")
    n, masks = as_masks(fam)
    if not masks:
        return True
    return 0 not in meets([masks] * s, (1 << n) - 1)


def is_r_wise_union(fam: Family, r: int) -> bool:
    if r < 1:
        raise DomainError("r must be at least 1")
    n, masks = as_masks(fam)
    if not masks:
        return True
    return (1 << n) - 1 not in joins([masks] * r)


def are_cross_intersecting(fams: Sequence[Family]) -> bool:
    if len(fams) < 2:
        raise DomainError("cross-intersection needs at least two families")
    n, lists = _ground(fams)
    if any(not m for m in lists):
        return True
    return 0 not in meets(lists, (1 << n) - 1)


def are_cross_union(fams: Sequence[Family]) -> bool:
    if len(fams) < 2:
        raise DomainError("cross-union needs at least two families")
    n, lists = _ground(fams)
    if any(not m for m in lists):
        return True
    return (1 << n) - 1 not in joins(lists)


def is_s_wise_cross_intersecting(fams: Sequence[Family], s: int) -> bool:
    if s < 2:
        raise DomainError("s must be at least 2")
    if len(fams) < s:
        raise DomainError(f"need at least s={s} families, got {len(fams)}")
    return all(are_cross_intersecting(sub) for sub in combinations(fams, s))


def longest_chain(fam: Family) -> int:
    """Length (number of strict inclusions) of the longest chain in the family."""
    _, masks = as_masks(fam)
    masks = sorted(set(masks), key=popcount)
    depth = {}
    for m in masks:
        depth[m] = max((depth[p] + 1 for p in depth if p != m and p & m == p), default=0)
    return max(depth.values(), default=0)


def is_antichain(fam: Family) -> bool:
    _, masks = as_masks(fam)
    for a, b in combinations(masks, 2):
        if a & b in (a, b):
            return False
    return True


def is_chain_free(fam: Family, length: int) -> bool:
    """No chain of the given length, i.e. no length+1 nested distinct members."""
    if length < 1:
        raise DomainError("chain length must be at least 1")
    return longest_chain(fam) < length


def contains_butterfly(fam: Family) -> bool:
    """Four distinct members E, F, G, H with E | F contained in G & H."""
    _, masks = as_masks(fam)
    masks = list(set(masks))
    if len(masks) < 4:
        return False
    for g, h in combinations(masks, 2):
        meet = g & h
        below = [m for m in masks if m != g and m != h and m & meet == m]
        if len(below) >= 2:
            return True
    return False


def star_center(fam: Family) -> int | None:
    """Smallest common element (1-based) of all members, or None."""
    n, masks = as_masks(fam)
    common = (1 << n) - 1
    for m in masks:
        common &= m
    if not masks or not common:
        return None
    return next(bits_of(common)) + 1


def is_star(fam: Family) -> bool:
    _, masks = as_masks(fam)
    return not masks or star_center(fam) is not None


def matching_number(fam: Family) -> int:
    """Maximum number of pairwise disjoint members (exact branch and bound)."""
    _, masks = as_masks(fam)
    if any(m == 0 for m in masks):
        raise DomainError("a family containing the empty set has infinite matching number")
    masks = sorted(set(masks), key=lambda m: (popcount(m), m))
    return _max_matching(masks)


def _max_matching(pool: list[int]) -> int:
    if not pool:
        return 0
    first, rest = pool[0], pool[1:]
    with_first = 1 + _max_matching([m for m in rest if not m & first])
    if len(rest) <= with_first:
        return with_first
    return max(with_first, _max_matching(rest))


def matching_at_most(fam: Family, r: int) -> bool:
    return matching_number(fam) <= r


def is_iu(fam: Family) -> bool:
    """Intersecting and union: no pair (repeats allowed) is disjoint or covers [n]."""
    n, masks = as_masks(fam)
    full = (1 << n) - 1
    for i, a in enumerate(masks):
        if not a or a == full:
            return False
        for b in masks[i + 1:]:
            if not a & b or a | b == full:
                return False
    return True


def satisfies_gronau(fam: Family) -> bool:
    """Each distinct pair either meets without covering [n] or is a complementary pair."""
    n, masks = as_masks(fam)
    full = (1 << n) - 1
    for i, a in enumerate(masks):
        if not a or a == full:
            return False
        for b in masks[i + 1:]:
            if a ^ b == full and not a & b:
                continue
            if not a & b or a | b == full:
                return False
    return True


# -- predicate identifiers ------------------------------------------------------

# hereditary direction: "down" = closed under taking subfamilies
_SPECS = {
    # tag: (param name or None, arity "single"|"joint", direction, minimum param)
    "intersecting": (None, "single", "down", None),
    "s-wise-intersecting": ("s", "single", "down", 2),
    "r-wise-union": ("r", "single", "down", 1),
    "cross-intersecting": (None, "joint", "down", None),
    "s-wise-cross-intersecting": ("s", "joint", "down", 2),
    "cross-union": (None, "joint", "down", None),
    "antichain": (None, "single", "down", None),
    "chain-free": ("l", "single", "down", 1),
    "butterfly-free": (None, "single", "down", None),
    "star": (None, "single", "down", None),
    "iu": (None, "single", "down", None),
    "gronau": (None, "single", "down", None),
    "matching-at-most": ("r", "single", "down", 0),
}


@dataclass(frozen=True)
class PredicateId:
    tag: str
    param: int | None = None

    def __post_init__(self) -> None:
        if self.tag not in _SPECS:
            raise DomainError(f"unknown predicate {self.tag!r}; known: {sorted(_SPECS)}")
        pname, _, _, low = _SPECS[self.tag]
        if pname is None and self.param is not None:
            raise DomainError(f"predicate {self.tag} takes no parameter")
        if pname is not None:
            if self.param is None:
                raise DomainError(f"predicate {self.tag} needs parameter {pname}")
            if self.param < low:
                raise DomainError(f"{self.tag}: {pname}={self.param} below minimum {low}")

    @classmethod
    def parse(cls, text: str) -> "PredicateId":
        tag, _, arg = text.strip().partition(":")
        return cls(tag, int(arg) if arg else None)

    def __str__(self) -> str:
        return self.tag if self.param is None else f"{self.tag}:{self.param}"

    @property
    def joint(self) -> bool:
        return _SPECS[self.tag][1] == "joint"

    @property
    def direction(self) -> str:
        return _SPECS[self.tag][2]

    @property
    def pairwise(self) -> bool:
        """True when the property is decided by checking pairs of members."""
        if self.tag in ("intersecting", "antichain", "iu", "gronau"):
            return True
        if self.tag == "s-wise-intersecting" and self.param == 2:
            return True
        if self.tag == "r-wise-union" and self.param in (1, 2):
            return True
        if self.tag in ("matching-at-most", "chain-free") and self.param == 1:
            return True
        return False

    def holds(self, *fams: Family) -> bool:
        """Evaluate on one family (single) or on a tuple of families (joint)."""
        t, p = self.tag, self.param
        if self.joint:
            if t == "cross-intersecting":
                return are_cross_intersecting(fams) if len(fams) >= 2 else True
            if t == "cross-union":
                return are_cross_union(fams) if len(fams) >= 2 else True
            return is_s_wise_cross_intersecting(fams, p)
        if len(fams) != 1:
            raise DomainError(f"{self} applies to one family at a time")
        fam = fams[0]
        if t == "intersecting":
            return is_intersecting(fam)
        if t == "s-wise-intersecting":
            return is_s_wise_intersecting(fam, p)
        if t == "r-wise-union":
            return is_r_wise_union(fam, p)
        if t == "antichain":
            return is_antichain(fam)
        if t == "chain-free":
            return is_chain_free(fam, p)
        if t == "butterfly-free":
            return not contains_butterfly(fam)
        if t == "star":
            return is_star(fam)
        if t == "iu":
            return is_iu(fam)
        if t == "gronau":
            return satisfies_gronau(fam)
        if t == "matching-at-most":
            _, masks = as_masks(fam)
            return 0 not in masks and matching_number(fam) <= p
        raise AssertionError(t)


def known_predicates() -> list[str]:
    return sorted(_SPECS)


@lru_cache(maxsize=None)
def check_hereditary(pid: PredicateId, n: int = 4) -> bool:
    """Exhaustively confirm that ``pid`` is closed under removing one member.

    Single-family predicates are checked on every subfamily of A(n) (all arcs
    of the n-cycle); joint predicates on every pair of subfamilies of two
    levels.  Only meaningful for predicates declared ``down``.
    """
    from .core import arc_mask

    arcs = [arc_mask(h, k, n) for k in range(1, n) for h in range(n)]
    if not pid.joint:
        for sel in range(1 << len(arcs)):
            fam = [arcs[i] for i in bits_of(sel)]
            if not pid.holds((n, fam)):
                continue
            for j in range(len(fam)):
                if not pid.holds((n, fam[:j] + fam[j + 1:])):
                    return False
        return True
    slots = 2 if pid.tag != "s-wise-cross-intersecting" else pid.param
    levels = [[arc_mask(h, k, n) for h in range(n)] for k in (1, 2, n - 1)][:slots]
    levels += [levels[-1]] * (slots - len(levels))
    sizes = [len(l) for l in levels]
    total = sum(sizes)
    for sel in range(1 << total):
        fams, off = [], 0
        for lvl, sz in zip(levels, sizes):
            fams.append([lvl[i] for i in range(sz) if sel >> (off + i) & 1])
            off += sz
        if not pid.holds(*((n, f) for f in fams)):
            continue
        for a, f in enumerate(fams):
            for j in range(len(f)):
                smaller = list(fams)
                smaller[a] = f[:j] + f[j + 1:]
                if not pid.holds(*((n, g) for g in smaller)):
                    return False
    return True
