"""Constructive certificates: the checks behind individual extremal bounds.

These do not search for optima; each builds the combinatorial object a proof
relies on (a partition, an injection, a decomposition) and verifies it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import ceil

from .constructions import b_set, m_pq, mpq_parameters
from .core import Arc, ArcFamily, DomainError, GroundSet, SetFamily, arc_mask, bits_of, popcount
from .predicates import PredicateId, as_masks, contains_butterfly, is_antichain, is_intersecting, is_star
from .search import Constraint, SearchProblem, SlotSpec, iter_feasible

# -- non-star intersecting arc families ------------------------------------------


@dataclass
class NonStarReport:
    n: int
    k: int
    exists: bool
    expected_exists: bool
    max_size: int
    bound: int | None
    families_checked: int
    all_have_empty_triple: bool
    triple_witnesses: list[tuple[tuple[int, int, int], ArcFamily]]
    maximum_witnesses: list[ArcFamily]
    construction_sizes: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def construction_tight(self) -> bool:
        return all(v == self.bound for v in self.construction_sizes.values())

    @property
    def ok(self) -> bool:
        return (
            self.exists == self.expected_exists
            and self.all_have_empty_triple
            and (not self.exists or self.max_size == self.bound)
            and self.construction_tight
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "exists": self.exists,
            "expected_exists": self.expected_exists,
            "max_size": self.max_size,
            "bound": self.bound,
            "families_checked": self.families_checked,
            "all_have_empty_triple": self.all_have_empty_triple,
            "maximum_witnesses": [f.to_json() for f in self.maximum_witnesses],
            "construction_sizes": {f"{p},{q}": v for (p, q), v in sorted(self.construction_sizes.items())},
            "ok": self.ok,
        }


def empty_triple(fam: ArcFamily) -> tuple[int, int, int] | None:
    """Indices (into fam.masks()) of three members with no common point, if any."""
    masks = fam.masks()
    for a, b, c in combinations(range(len(masks)), 3):
        if not masks[a] & masks[b] & masks[c]:
            return a, b, c
    return None


def hilton_milner_circle_check(n: int, k: int) -> NonStarReport:
    """Exhaustive facts about intersecting, non-star families of k-arcs.

    Enumerates every intersecting subfamily of A(n, k), keeps those without a
    common point, and checks that each has three members with empty
    intersection, that such families exist exactly when k >= 2 and
    n <= 3(k - 1), that their largest size is 3k - n, and that every admissible
    m_pq family has that size.
    """
    if not (n >= 2 * k and k >= 1):
        raise DomainError(f"needs n >= 2k > 1; got n={n}, k={k}")
    problem = SearchProblem(n, (SlotSpec.arcs(k),), (Constraint(PredicateId("intersecting")),))
    best = 0
    checked = 0
    all_triples = True
    triple_witnesses = []
    maxima: list[ArcFamily] = []
    for (fam,) in iter_feasible(problem):
        if is_star(fam):
            continue
        checked += 1
        tri = empty_triple(fam)
        if tri is None:
            all_triples = False
        elif len(triple_witnesses) < 5:
            triple_witnesses.append((tri, fam))
        size = len(fam)
        if size > best:
            best, maxima = size, [fam]
        elif size == best:
            maxima.append(fam)
    expected = k >= 2 and n <= 3 * (k - 1)
    bound = 3 * k - n if expected else None
    sizes = {}
    if expected:
        for p, q in mpq_parameters(n, k):
            fam = m_pq(n, k, p, q)
            if is_intersecting(fam) and not is_star(fam):
                sizes[(p, q)] = len(fam)
            else:
                sizes[(p, q)] = -1
    return NonStarReport(n, k, checked > 0, expected, best, bound, checked, all_triples, triple_witnesses, maxima, sizes)


# -- minimal / middle / maximal split of a butterfly-free family -----------------------


@dataclass
class ButterflySplit:
    n: int
    minimal: list[int]
    middle: list[int]
    maximal: list[int]
    links: dict[int, tuple[int, int]]  # middle member -> (unique minimal below, unique maximal above)

    @property
    def all_antichains(self) -> bool:
        return all(is_antichain((self.n, part)) for part in (self.minimal, self.middle, self.maximal))

    @property
    def lower_ok(self) -> bool:
        return 2 * len(self.minimal) + len(self.middle) <= 2 * self.n

    @property
    def upper_ok(self) -> bool:
        return 2 * len(self.maximal) + len(self.middle) <= 2 * self.n

    def as_families(self, arcs: bool = True):
        if arcs:
            return tuple(_arc_family(self.n, part) for part in (self.minimal, self.middle, self.maximal))
        return tuple(SetFamily(self.n, frozenset(part)) for part in (self.minimal, self.middle, self.maximal))


def _arc_family(n: int, masks) -> ArcFamily:
    arcs = []
    for m in masks:
        k = popcount(m)
        for h in range(n):
            if arc_mask(h, k, n) == m:
                arcs.append(Arc(h + 1, k))
                break
        else:
            raise DomainError(f"{m:#x} is not an arc")
    return ArcFamily.from_arcs(n, arcs)


def butterfly_decompose(fam: ArcFamily | SetFamily) -> ButterflySplit:
    """Split a butterfly-free family into minimal, middle and maximal members.

    Every middle member lies above exactly one minimal member and below
    exactly one maximal member; the links record that pair.
    """
    n, masks = as_masks(fam)
    masks = sorted(set(masks))
    if contains_butterfly((n, masks)):
        raise DomainError("family contains a butterfly")

    def below(m):
        return [x for x in masks if x != m and x & m == x]

    def above(m):
        return [x for x in masks if x != m and x & m == m]

    minimal = [m for m in masks if not below(m)]
    maximal = [m for m in masks if not above(m)]
    middle = [m for m in masks if m not in minimal and m not in maximal]
    links = {}
    for q in middle:
        lows = [x for x in below(q) if x in minimal]
        highs = [x for x in above(q) if x in maximal]
        if len(lows) != 1 or len(highs) != 1:
            raise AssertionError(f"middle member {q:#x} has {len(lows)} minimal and {len(highs)} maximal neighbours")
        links[q] = (lows[0], highs[0])
    return ButterflySplit(n, minimal, middle, maximal, links)


# -- the injection for three consecutive levels on a (3k-1)-cycle -----------------------


@dataclass
class InjectionReport:
    n: int
    k: int
    R: list[int]
    R0: list[int]
    R1: list[int]
    S: list[int]  # heads of missing k-arcs
    T: list[int]  # indices of missing B-sets
    phi: dict[int, tuple[str, int]]  # i -> ("A", head of k-arc) or ("B", index of B-set)
    injective: bool
    images_missing: bool
    trace: int

    @property
    def counting_ok(self) -> bool:
        return len(self.R) <= len(self.S) + len(self.T)

    @property
    def trace_ok(self) -> bool:
        return self.trace <= 2 * self.n

    @property
    def ok(self) -> bool:
        return self.injective and self.images_missing and self.counting_ok and self.trace_ok


def three_level_sets(n: int, k: int) -> tuple[list[int], list[int], list[int]]:
    """Masks of A(n, k-1), A(n, k) and the n sets B_{k+1}(x_i), each indexed by i - 1."""
    if k < 2 or n != 3 * k - 1:
        raise DomainError(f"needs k >= 2 and n = 3k - 1; got n={n}, k={k}")
    lo = [arc_mask(h, k - 1, n) for h in range(n)]
    mid = [arc_mask(h, k, n) for h in range(n)]
    hi = [b_set(n, k, i) for i in range(1, n + 1)]
    return lo, mid, hi


@lru_cache(maxsize=None)
def partitions_among(n: int, k: int) -> tuple[tuple[int, int, int], ...]:
    """All triples of the 3n sets that partition [n], as indices 0..3n-1."""
    sets = [m for part in three_level_sets(n, k) for m in part]
    full = (1 << n) - 1
    out = []
    for a, b, c in combinations(range(len(sets)), 3):
        x, y, z = sets[a], sets[b], sets[c]
        if not (x & y or x & z or y & z) and x | y | z == full:
            out.append((a, b, c))
    return tuple(out)


def injection_phi(n: int, k: int, member: int, r1_shift: int | None = None) -> InjectionReport:
    """Build and check the injection from present (k-1)-arcs to missing sets.

    ``member`` is a 3n-bit word: bit i-1 for A_{k-1}(x_i), bit n+i-1 for
    A_k(x_i), bit 2n+i-1 for B_{k+1}(x_i), along the identity order.  The
    family may not contain three of these sets partitioning [n].

    An index i whose partner i-k is also present is sent to B_{k+1}(x_{i+shift})
    with shift = k - 1 by default; that is the index at which the three sets
    A_{k-1}(x_i), A_{k-1}(x_{i-k}), B_{k+1}(x_{i+k-1}) partition [n].  Other
    shifts are accepted only to demonstrate that they break the argument.
    """
    three_level_sets(n, k)  # validates n and k
    if member < 0 or member >> (3 * n):
        raise DomainError("membership word wider than 3n bits")
    for tri in partitions_among(n, k):
        if all(member >> t & 1 for t in tri):
            names = [_set_name(n, k, t) for t in tri]
            raise DomainError(f"family contains the partition {names}")
    shift = k - 1 if r1_shift is None else r1_shift

    def has_lo(i):
        return bool(member >> ((i - 1) % n) & 1)

    def has_mid(i):
        return bool(member >> (n + (i - 1) % n) & 1)

    def has_hi(i):
        return bool(member >> (2 * n + (i - 1) % n) & 1)

    def w(i):
        return (i - 1) % n + 1

    R = [i for i in range(1, n + 1) if has_lo(i)]
    R0 = [i for i in R if not has_lo(i - k)]
    R1 = [i for i in R if has_lo(i - k)]
    S = [i for i in range(1, n + 1) if not has_mid(i)]
    T = [i for i in range(1, n + 1) if not has_hi(i)]
    phi: dict[int, tuple[str, int]] = {}
    missing = True
    for i in R1:
        j = w(i + shift)
        phi[i] = ("B", j)
        missing &= not has_hi(j)
    for i in R0:
        a, b = w(i - k), w(i + k - 1)
        if not has_mid(a):
            phi[i] = ("A", a)
        elif not has_mid(b):
            phi[i] = ("A", b)
        else:  # unreachable under the hypothesis
            phi[i] = ("A", a)
            missing = False
    injective = len(set(phi.values())) == len(phi)
    trace = sum(member >> t & 1 for t in range(3 * n))
    return InjectionReport(n, k, R, R0, R1, S, T, phi, injective, missing, trace)


def _set_name(n: int, k: int, t: int) -> str:
    block, i = divmod(t, n)
    return [f"A_{k - 1}({i + 1})", f"A_{k}({i + 1})", f"B_{k + 1}({i + 1})"][block]


def partition_free(member: int, partitions: list[tuple[int, int, int]]) -> bool:
    return not any(all(member >> t & 1 for t in tri) for tri in partitions)


def random_partition_free(n: int, k: int, rng: random.Random, partitions=None) -> int:
    """A random membership word, repaired by dropping one random set of each contained partition."""
    partitions = partitions_among(n, k) if partitions is None else partitions
    member = rng.getrandbits(3 * n)
    for tri in partitions:
        if all(member >> t & 1 for t in tri):
            member &= ~(1 << rng.choice(tri))
    return member


# -- rotating partitions --------------------------------------------------------------


@dataclass
class RotationReport:
    n: int
    composition: tuple[int, ...]
    r: int
    counts: list[int]
    violating: tuple[int, list[Arc]] | None  # first rotation with more than r members, and those arcs

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def bound(self) -> int:
        return self.r * self.n

    @property
    def holds(self) -> bool:
        return self.violating is None


def rotating_partition_check(n: int, composition, fam: ArcFamily, r: int) -> RotationReport:
    """Count family members among the parts of each rotation of an arc partition.

    The parts are arcs of lengths k_1, ..., k_p laid end to end starting at
    position p0 + 1 for p0 = 0..n-1.  If no rotation has more than r members
    then g_{k_1} + ... + g_{k_p} <= rn, since the counts sum to exactly that
    left side.
    """
    comp = tuple(composition)
    p = len(comp)
    if sum(comp) != n or any(not 1 <= x <= n - 1 for x in comp):
        raise DomainError(f"composition {comp} must consist of lengths in 1..{n - 1} summing to {n}")
    if not p > r >= 1:
        raise DomainError(f"needs p > r >= 1; got p={p}, r={r}")
    if fam.n != n:
        raise DomainError("family lives on a different cycle")
    g = GroundSet(n)
    counts = []
    violating = None
    for p0 in range(n):
        start = p0 + 1
        present = []
        for length in comp:
            a = Arc(g.wrap(start), length)
            if a in fam:
                present.append(a)
            start += length
        counts.append(len(present))
        if len(present) > r and violating is None:
            violating = (p0 + 1, present)
    return RotationReport(n, comp, r, counts, violating)


def level_counts(fam: ArcFamily, composition) -> int:
    return sum(popcount(fam.level(k)) for k in composition)


# -- covering the middle lengths by compositions of n ---------------------------------------


@dataclass
class PartitionCover:
    n: int
    case: str
    triples: list[tuple[int, ...]]
    marker: tuple[int, int, int] | None  # composition (q, q, 1) used instead of a last triple

    def covered(self) -> set[int]:
        out = {x for t in self.triples for x in t}
        if self.marker is not None:
            out.add(self.marker[0])
        return out

    def middle(self) -> list[int]:
        """Integers strictly between n/3 and n/2."""
        return [x for x in range(1, self.n) if 3 * x > self.n and 2 * x < self.n]

    def check(self) -> list[str]:
        """Problems with the cover; empty when every property holds."""
        n = self.n
        bad = []
        seen: set[int] = set()
        for t in self.triples:
            if len(set(t)) != len(t):
                bad.append(f"{t} repeats an element")
            if sum(t) != n:
                bad.append(f"{t} sums to {sum(t)}, not {n}")
            if any(not 1 <= x <= n // 2 for x in t):
                bad.append(f"{t} leaves [1, {n // 2}]")
            if seen & set(t):
                bad.append(f"{t} overlaps an earlier triple")
            seen |= set(t)
        if self.marker is not None:
            q = self.marker[0]
            if sum(self.marker) != n or q in seen:
                bad.append(f"marker {self.marker} is inconsistent")
        missing = set(self.middle()) - self.covered()
        if missing:
            bad.append(f"middle lengths {sorted(missing)} are not covered")
        return bad


def partition_triples(n: int) -> PartitionCover:
    """Disjoint triples of lengths summing to n that cover every length in (n/3, n/2).

    With lo = ceil(n/3) and hi = floor(n/2):
      (a) [lo, hi] has even length 2w: triples (hi-2i, hi-2i-1, n-2hi+4i+1), 0 <= i < w;
      (b) n even, [lo, n/2] of odd length 2w+1: (n/2-2i+1, n/2-2i, 4i-1), 1 <= i <= w;
      (c) n odd, [lo, hi] of odd length 2w-1: ((n-1)/2-2i+1, (n-1)/2-2i, 4i), 1 <= i <= w-1,
          and the composition ((n-1)/2, (n-1)/2, 1) covers (n-1)/2.
    """
    if n < 3:
        raise DomainError("needs n >= 3")
    lo, hi = ceil(n / 3), n // 2
    length = hi - lo + 1
    if length % 2 == 0:
        w = length // 2
        triples = [(hi - 2 * i, hi - 2 * i - 1, n - 2 * hi + 4 * i + 1) for i in range(w)]
        return PartitionCover(n, "a", triples, None)
    if n % 2 == 0:
        w = (length - 1) // 2
        triples = [(n // 2 - 2 * i + 1, n // 2 - 2 * i, 4 * i - 1) for i in range(1, w + 1)]
        return PartitionCover(n, "b", triples, None)
    w = (length + 1) // 2
    q = (n - 1) // 2
    triples = [(q - 2 * i + 1, q - 2 * i, 4 * i) for i in range(1, w)]
    return PartitionCover(n, "c", triples, (q, q, 1))


# -- splitting k(r+1) arcs into k matchings of size r+1 -------------------------------------


def matching_decomposition(n: int, k: int, heads) -> list[list[int]]:
    """Split k(r+1) distinct k-arcs into k groups of r+1 pairwise disjoint arcs.

    With heads y_1 < ... < y_{k(r+1)}, group j takes y_j, y_{j+k}, ..., y_{j+rk}.
    Raises AssertionError if some group is not pairwise disjoint.
    """
    ys = sorted(set(heads))
    if len(ys) != len(list(heads)) or len(ys) % k or any(not 1 <= y <= n for y in ys):
        raise DomainError("needs k(r+1) distinct heads in 1..n")
    if not 1 <= k <= n - 1:
        raise DomainError(f"arc length {k} outside 1..{n - 1}")
    r1 = len(ys) // k
    groups = [[ys[j + t * k] for t in range(r1)] for j in range(k)]
    for g in groups:
        masks = [arc_mask(y - 1, k, n) for y in g]
        for a, b in combinations(masks, 2):
            if a & b:
                raise AssertionError(f"group {g} is not pairwise disjoint")
    return groups


# -- levels next to a large middle level in a complement-tolerant family -----------------------


@dataclass
class MiddleLevelReport:
    n: int
    checked: int
    failures: list[tuple[list[int], int, int]]  # (middle heads, offending length, head)

    @property
    def ok(self) -> bool:
        return not self.failures


def gronau_level_check(n: int) -> MiddleLevelReport:
    """For even n = 2q: if a complement-tolerant family has q + t middle arcs, it has
    no arcs of length <= t or >= n - t.

    The condition is pairwise, so an arc of another length can join the family
    only if it is compatible with every middle arc present.  It therefore
    suffices to check, for every admissible middle level M with |M| = q + t > q,
    that no arc of a forbidden length is compatible with all of M.
    """
    if n % 2 or n < 4:
        raise DomainError("needs an even n >= 4")
    from .predicates import satisfies_gronau

    q = n // 2
    middle = [arc_mask(h, q, n) for h in range(n)]
    failures = []
    checked = 0
    for sel in range(1, 1 << n):
        size = popcount(sel)
        if size <= q:
            continue
        level = [middle[h] for h in bits_of(sel)]
        if not satisfies_gronau((n, level)):
            continue
        checked += 1
        t = size - q
        for k in list(range(1, t + 1)) + list(range(n - t, n)):
            if k == q:
                continue
            for h in range(n):
                m = arc_mask(h, k, n)
                if satisfies_gronau((n, level + [m])):
                    failures.append(([x + 1 for x in bits_of(sel)], k, h + 1))
    return MiddleLevelReport(n, checked, failures)
