"""Named extremal families, each checked against its closed-form size on build."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable

from .core import (
    Arc,
    ArcFamily,
    DomainError,
    GroundSet,
    PointSet,
    SetFamily,
    arc_mask,
    bits_of,
    popcount,
)


class SizeMismatch(AssertionError):
    """A construction disagreed with its own size formula."""


def _expect(fam, size: int, label: str):
    if len(fam) != size:
        raise SizeMismatch(f"{label}: built {len(fam)} members, formula gives {size}")
    return fam


def _level_sets(n: int, k: int) -> list[int]:
    return [sum(1 << i for i in c) for c in combinations(range(n), k)]


def star_arcs(n: int, k: int, x: int) -> ArcFamily:
    """The k arcs of length k through position x."""
    if n < 2 or not 1 <= k <= n - 1 or not 1 <= x <= n:
        raise DomainError(f"star_arcs needs n >= 2, 1 <= k <= n-1, 1 <= x <= n; got {n}, {k}, {x}")
    g = GroundSet(n)
    fam = ArcFamily.from_heads(n, k, (g.wrap(x - j) for j in range(k)))
    return _expect(fam, k, "star_arcs")


def _pencil(n: int, k: int, a: int, b: int) -> set[int]:
    """Heads of the k-arcs containing both positions a and b."""
    out = set()
    for h in range(n):
        m = arc_mask(h, k, n)
        if m >> (a - 1) & 1 and m >> (b - 1) & 1:
            out.add(h + 1)
    return out


def mpq_admissible(n: int, k: int, p: int, q: int) -> bool:
    # below n = 2k the three pencils overlap and the 3k - n count fails
    return 2 * k <= n <= 3 * (k - 1) and 1 < p <= k and p < q <= p + k - 1 and q + k - 1 > n and q <= n


def m_pq(n: int, k: int, p: int | None = None, q: int | None = None) -> ArcFamily:
    """Union of the three k-arc pencils through the pairs of {1, p, q}.

    Defaults to p = k, q = 2k - 1.  The result is intersecting, has no common
    element, and has 3k - n members.
    """
    p = k if p is None else p
    q = 2 * k - 1 if q is None else q
    if not mpq_admissible(n, k, p, q):
        raise DomainError(
            f"m_pq needs 2k <= n <= 3(k-1), p <= k, q <= p+k-1, q+k-1 > n (1 < p < q <= n); got n={n} k={k} p={p} q={q}"
        )
    heads = _pencil(n, k, 1, p) | _pencil(n, k, p, q) | _pencil(n, k, q, 1)
    return _expect(ArcFamily.from_heads(n, k, heads), 3 * k - n, "m_pq")


def mpq_parameters(n: int, k: int) -> list[tuple[int, int]]:
    return [(p, q) for p in range(2, n + 1) for q in range(p + 1, n + 1) if mpq_admissible(n, k, p, q)]


def erdos_levels(n: int, levels) -> SetFamily:
    """Union of complete levels of 2^[n]."""
    levels = sorted(set(levels))
    if any(not 0 <= k <= n for k in levels):
        raise DomainError(f"levels must lie in 0..{n}")
    members = frozenset(m for k in levels for m in _level_sets(n, k))
    return _expect(SetFamily(n, members), sum(comb(n, k) for k in levels), "erdos_levels")


def hilton_milner(n: int, k: int) -> SetFamily:
    if not (n >= 2 * k and k >= 2):
        raise DomainError(f"hilton_milner needs n >= 2k >= 4; got n={n}, k={k}")
    block = sum(1 << i for i in range(1, k + 1))  # {2, ..., k+1}
    members = {m for m in _level_sets(n, k) if m & 1 and m & block}
    members.add(block)
    size = comb(n - 1, k - 1) - comb(n - k - 1, k - 1) + 1
    return _expect(SetFamily(n, frozenset(members)), size, "hilton_milner")


def circular_distance(n: int, start: int, end: int) -> int:
    """Steps forward from ``start`` to ``end`` on the n-cycle."""
    return (end - start) % n


def d_ij(n: int, i: int, j: int) -> ArcFamily:
    """All arcs (every length) containing position i and avoiding position j."""
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise DomainError(f"d_ij needs distinct positions in 1..{n}; got {i}, {j}")
    arcs = []
    for k in range(1, n):
        for h in range(n):
            m = arc_mask(h, k, n)
            if m >> (i - 1) & 1 and not m >> (j - 1) & 1:
                arcs.append(Arc(h + 1, k))
    d = circular_distance(n, j, i)
    return _expect(ArcFamily.from_arcs(n, arcs), d * (n - d), "d_ij")


def _spaced(n: int, k: int, points: list[int]) -> bool:
    if len(points) < 2:
        return True
    pts = sorted(points)
    gaps = [b - a for a, b in zip(pts, pts[1:])] + [pts[0] + n - pts[-1]]
    return min(gaps) >= k


def b_k_of_T(n: int, k: int, T) -> ArcFamily:
    """All k-arcs meeting the point set T."""
    if not 1 <= k <= n - 1:
        raise DomainError(f"level {k} outside 1..{n - 1}")
    T = T if isinstance(T, PointSet) else PointSet.of(n, T)
    if not T.bits:
        raise DomainError("T must be non-empty")
    heads = [h + 1 for h in range(n) if arc_mask(h, k, n) & T.bits]
    fam = ArcFamily.from_heads(n, k, heads)
    if _spaced(n, k, T.to_list()) and len(fam) != len(T) * k:
        raise SizeMismatch(f"b_k_of_T: spaced T gives {len(fam)} arcs, expected {len(T) * k}")
    return fam


def spaced_points(n: int, k: int, r: int) -> list[int]:
    """Positions 1, k+1, ..., (r-1)k+1, pairwise at least k apart when n >= kr."""
    return [j * k + 1 for j in range(r)]


def b_T2_size(n: int) -> int:
    q, odd = divmod(n, 2)
    return (2 * q + 1) * q + q * (q + 1) if odd else 2 * q * q + q * (q - 1)


def b_T2(n: int) -> ArcFamily:
    """All arcs of every length meeting {floor(n/2), n}."""
    if n < 3:
        raise DomainError("b_T2 needs n >= 3")
    t = (1 << (n // 2 - 1)) | (1 << (n - 1))
    arcs = [Arc(h + 1, k) for k in range(1, n) for h in range(n) if arc_mask(h, k, n) & t]
    fam = ArcFamily.from_arcs(n, arcs)
    for k in range(1, n):
        want = n if 2 * k >= n else 2 * k
        if popcount(fam.level(k)) != want:
            raise SizeMismatch(f"b_T2: level {k} has {popcount(fam.level(k))} arcs, expected {want}")
    return _expect(fam, b_T2_size(n), "b_T2")


def kleitman_D(n: int, s: int) -> SetFamily:
    """All subsets of size at least k, where n = k(s+1) - 1."""
    k, rem = divmod(n + 1, s + 1)
    if s < 1 or rem or k < 1:
        raise DomainError(f"kleitman_D needs n = k(s+1) - 1; got n={n}, s={s}")
    members = frozenset(m for i in range(k, n + 1) for m in _level_sets(n, i))
    return _expect(SetFamily(n, members), sum(comb(n, i) for i in range(k, n + 1)), "kleitman_D")


def L_family(n: int, k: int, r: int) -> SetFamily:
    """k-subsets of [n] meeting {1..r}."""
    if not (k >= 1 and r >= 1 and n >= k * (r + 1)):
        raise DomainError(f"L_family needs n >= k(r+1); got n={n}, k={k}, r={r}")
    low = (1 << r) - 1
    members = frozenset(m for m in _level_sets(n, k) if m & low)
    return _expect(SetFamily(n, members), comb(n, k) - comb(n - r, k), "L_family")


def complete_K(k: int, r: int) -> SetFamily:
    """All k-subsets of a (k(r+1) - 1)-set."""
    if k < 1 or r < 1:
        raise DomainError("complete_K needs positive k and r")
    n = k * (r + 1) - 1
    return _expect(SetFamily(n, frozenset(_level_sets(n, k))), comb(n, k), "complete_K")


def b_set(n: int, k: int, i: int) -> int:
    """Mask of A_k(x_i) together with x_{i-k}; i is 1-based, taken mod n."""
    h = (i - 1) % n
    return arc_mask(h, k, n) | 1 << ((h - k) % n)


def b_family(n: int, k: int) -> SetFamily:
    """The n sets B_{k+1}(x_i) = A_k(x_i) + {x_{i-k}} on a (3k-1)-cycle."""
    if k < 2 or n != 3 * k - 1:
        raise DomainError(f"b_family needs k >= 2 and n = 3k - 1; got n={n}, k={k}")
    members = frozenset(b_set(n, k, i) for i in range(1, n + 1))
    return _expect(SetFamily(n, members), n, "b_family")


def b_family_partition(n: int, k: int, i: int) -> tuple[int, int, int]:
    """B_{k+1}(x_i), A_{k-1}(x_{i-k+1}), A_{k-1}(x_{i+k}) as masks."""
    if n != 3 * k - 1:
        raise DomainError("needs n = 3k - 1")
    h = (i - 1) % n
    return b_set(n, k, i), arc_mask((h - k + 1) % n, k - 1, n), arc_mask((h + k) % n, k - 1, n)


# -- string identifiers -------------------------------------------------------


@dataclass(frozen=True)
class ConstructionId:
    tag: str
    params: tuple

    @classmethod
    def parse(cls, text: str) -> "ConstructionId":
        tag, _, rest = text.strip().partition(":")
        if tag not in CONSTRUCTIONS:
            raise DomainError(f"unknown construction {tag!r}; known: {sorted(CONSTRUCTIONS)}")
        if tag == "erdos_levels":
            n, _, lv = rest.partition(",")
            return cls(tag, (int(n), tuple(int(x) for x in lv.replace("{", "").replace("}", "").split(",") if x)))
        if tag == "b_k_of_T":
            n, k, *t = rest.split(",")
            return cls(tag, (int(n), int(k), tuple(int(x) for x in t)))
        return cls(tag, tuple(int(x) for x in rest.split(",") if x))

    def __str__(self) -> str:
        flat = []
        for p in self.params:
            flat.extend(p if isinstance(p, tuple) else (p,))
        return f"{self.tag}:" + ",".join(str(x) for x in flat)

    def build(self):
        return CONSTRUCTIONS[self.tag](*self.params)


CONSTRUCTIONS: dict[str, Callable] = {
    "star_arcs": star_arcs,
    "m_pq": m_pq,
    "erdos_levels": erdos_levels,
    "hilton_milner": hilton_milner,
    "d_ij": d_ij,
    "b_k_of_T": b_k_of_T,
    "b_T2": b_T2,
    "kleitman_D": kleitman_D,
    "L": L_family,
    "complete_K": complete_K,
    "b_family": b_family,
}


def build(text: str):
    return ConstructionId.parse(text).build()


def points_of(mask: int) -> list[int]:
    return [i + 1 for i in bits_of(mask)]
