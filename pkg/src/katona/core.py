"""Ground set, arcs, arc families and point-set families on a labelled cycle.

Positions are 1-based in the public API and stored 0-based as bit indices:
position ``p`` is bit ``p - 1``.  An :class:`ArcFamily` keeps one n-bit word
per occupied length, where bit ``h - 1`` is set when the arc with head ``h``
belongs to the family.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


def popcount(x: int) -> int:
    return x.bit_count()


def bits_of(mask: int) -> Iterator[int]:
    """Yield the set bit indices of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def rotl(word: int, shift: int, n: int) -> int:
    """Rotate an n-bit word so that bit i moves to bit (i + shift) mod n."""
    shift %= n
    full = (1 << n) - 1
    return ((word << shift) | (word >> (n - shift))) & full


def reverse_bits(word: int, n: int) -> int:
    """Map bit i to bit (-i) mod n."""
    out = 0
    for i in bits_of(word):
        out |= 1 << ((-i) % n)
    return out


def arc_mask(head0: int, length: int, n: int) -> int:
    """Point mask of the arc with 0-based head ``head0``."""
    return rotl((1 << length) - 1, head0, n)


@dataclass(frozen=True)
class GroundSet:
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"ground set size must be a positive integer, got {self.n!r}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def succ(self, p: int) -> int:
        return p % self.n + 1

    def pred(self, p: int) -> int:
        return (p - 2) % self.n + 1

    def wrap(self, p: int) -> int:
        """Reduce any integer position to the range 1..n."""
        return (p - 1) % self.n + 1


@dataclass(frozen=True, order=True)
class Arc:
    head: int
    length: int

    def validate(self, g: GroundSet) -> None:
        if not 1 <= self.length <= g.n - 1:
            raise DomainError(f"arc length {self.length} outside 1..{g.n - 1}")
        if not 1 <= self.head <= g.n:
            raise DomainError(f"arc head {self.head} outside 1..{g.n}")

    def mask(self, n: int) -> int:
        return arc_mask(self.head - 1, self.length, n)


@dataclass(frozen=True)
class PointSet:
    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.bits < 0 or self.bits >> self.n:
            raise DomainError(f"bits {self.bits:#x} exceed ground size {self.n}")

    @classmethod
    def of(cls, n: int, points: Iterable[int]) -> "PointSet":
        bits = 0
        for p in points:
            if not 1 <= p <= n:
                raise DomainError(f"position {p} outside 1..{n}")
            bits |= 1 << (p - 1)
        return cls(n, bits)

    def __len__(self) -> int:
        return popcount(self.bits)

    def __iter__(self) -> Iterator[int]:
        return (i + 1 for i in bits_of(self.bits))

    def __contains__(self, p: int) -> bool:
        return 1 <= p <= self.n and bool(self.bits >> (p - 1) & 1)

    def to_list(self) -> list[int]:
        return list(self)

    def complement(self) -> "PointSet":
        return PointSet(self.n, ((1 << self.n) - 1) & ~self.bits)


def _normalise_levels(n: int, levels: Mapping[int, int] | Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    items = levels.items() if isinstance(levels, Mapping) else levels
    merged: dict[int, int] = {}
    full = (1 << n) - 1
    for k, word in items:
        if not 1 <= k <= n - 1:
            raise DomainError(f"arc length {k} outside 1..{n - 1}")
        if word < 0 or word & ~full:
            raise DomainError(f"head word for level {k} wider than {n} bits")
        merged[k] = merged.get(k, 0) | word
    return tuple(sorted((k, w) for k, w in merged.items() if w))


@dataclass(frozen=True)
class ArcFamily:
    """A family of arcs on the n-cycle, stored as one head word per length."""

    n: int
    levels: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        GroundSet(self.n)
        object.__setattr__(self, "levels", _normalise_levels(self.n, self.levels))

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Arc | tuple[int, int]]) -> "ArcFamily":
        g = GroundSet(n)
        words: dict[int, int] = {}
        for a in arcs:
            a = a if isinstance(a, Arc) else Arc(*a)
            a.validate(g)
            words[a.length] = words.get(a.length, 0) | 1 << (a.head - 1)
        return cls(n, tuple(words.items()))

    @classmethod
    def from_heads(cls, n: int, k: int, heads: Iterable[int]) -> "ArcFamily":
        return cls.from_arcs(n, (Arc(h, k) for h in heads))

    @property
    def ground(self) -> GroundSet:
        return GroundSet(self.n)

    def level(self, k: int) -> int:
        for lk, w in self.levels:
            if lk == k:
                return w
        return 0

    def lengths(self) -> list[int]:
        return [k for k, _ in self.levels]

    def is_single_level(self) -> bool:
        return len(self.levels) <= 1

    def __len__(self) -> int:
        return sum(popcount(w) for _, w in self.levels)

    def __iter__(self) -> Iterator[Arc]:
        for k, w in self.levels:
            for h in bits_of(w):
                yield Arc(h + 1, k)

    def __contains__(self, a: Arc) -> bool:
        return bool(self.level(a.length) >> (a.head - 1) & 1)

    def masks(self) -> list[int]:
        """Point masks of all members, level by level, heads ascending."""
        return [arc_mask(h, k, self.n) for k, w in self.levels for h in bits_of(w)]

    def heads(self, k: int) -> list[int]:
        return [h + 1 for h in bits_of(self.level(k))]

    def union(self, other: "ArcFamily") -> "ArcFamily":
        _same_ground(self, other)
        return ArcFamily(self.n, self.levels + other.levels)

    def restrict(self, k: int) -> "ArcFamily":
        return ArcFamily(self.n, ((k, self.level(k)),))

    def to_json(self) -> dict:
        return {"n": self.n, "levels": {str(k): self.heads(k) for k, _ in self.levels}}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "ArcFamily":
        if isinstance(data, str):
            data = json.loads(data)
        n = int(data["n"])
        arcs = [Arc(int(h), int(k)) for k, heads in data.get("levels", {}).items() for h in heads]
        return cls.from_arcs(n, arcs)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {self.heads(k)}" for k, _ in self.levels)
        return f"ArcFamily(n={self.n}, {{{body}}})"


@dataclass(frozen=True)
class SetFamily:
    """A family of distinct subsets of [n], members stored as bitmasks."""

    n: int
    members: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        GroundSet(self.n)
        members = frozenset(self.members)
        full = (1 << self.n) - 1
        for m in members:
            if m < 0 or m & ~full:
                raise DomainError(f"member {m:#x} exceeds ground size {self.n}")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int] | PointSet]) -> "SetFamily":
        out = set()
        for s in sets:
            out.add(s.bits if isinstance(s, PointSet) else PointSet.of(n, s).bits)
        return cls(n, frozenset(out))

    @classmethod
    def from_arcs(cls, fam: ArcFamily) -> "SetFamily":
        return cls(fam.n, frozenset(fam.masks()))

    @property
    def ground(self) -> GroundSet:
        return GroundSet(self.n)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.members, key=lambda m: (popcount(m), _sort_key(m))))

    def __contains__(self, item: int | PointSet) -> bool:
        return (item.bits if isinstance(item, PointSet) else item) in self.members

    def masks(self) -> list[int]:
        return list(self)

    def level_profile(self) -> list[int]:
        """Counts f_0..f_n of members of each size."""
        prof = [0] * (self.n + 1)
        for m in self.members:
            prof[popcount(m)] += 1
        return prof

    def level(self, size: int) -> "SetFamily":
        return SetFamily(self.n, frozenset(m for m in self.members if popcount(m) == size))

    def sizes(self) -> set[int]:
        return {popcount(m) for m in self.members}

    def to_json(self) -> dict:
        return {"n": self.n, "sets": [PointSet(self.n, m).to_list() for m in self]}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "SetFamily":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_sets(int(data["n"]), data.get("sets", []))

    def __repr__(self) -> str:
        return f"SetFamily(n={self.n}, {[PointSet(self.n, m).to_list() for m in self]})"


def _sort_key(mask: int) -> tuple[int, ...]:
    return tuple(bits_of(mask))


def _same_ground(a, b) -> None:
    if a.n != b.n:
        raise DomainError(f"ground sizes differ: {a.n} != {b.n}")


def load_family(data: Mapping | str) -> ArcFamily | SetFamily:
    """Parse either wire form: ``{"n", "levels"}`` for arcs, ``{"n", "sets"}`` for sets."""
    if isinstance(data, str):
        data = json.loads(data)
    if "levels" in data:
        return ArcFamily.from_json(data)
    if "sets" in data:
        return SetFamily.from_json(data)
    raise DomainError("family JSON needs a 'levels' or 'sets' key")


# -- operations ---------------------------------------------------------------


def arc_points(g: GroundSet, a: Arc) -> PointSet:
    a.validate(g)
    return PointSet(g.n, a.mask(g.n))


def arc_head_tail(g: GroundSet, a: Arc) -> tuple[int, int]:
    a.validate(g)
    return a.head, g.wrap(a.head + a.length - 1)


def complement_arc(g: GroundSet, a: Arc) -> Arc:
    a.validate(g)
    return Arc(g.wrap(a.head + a.length), g.n - a.length)


def full_level(g: GroundSet, k: int) -> ArcFamily:
    if not 1 <= k <= g.n - 1:
        raise DomainError(f"level {k} outside 1..{g.n - 1}")
    return ArcFamily(g.n, ((k, g.full),))


def complement_family(fam: ArcFamily) -> ArcFamily:
    """Replace every arc by its set complement, which is again an arc."""
    n = fam.n
    return ArcFamily(n, tuple((n - k, rotl(w, k, n)) for k, w in fam.levels))


def rotate_family(fam: ArcFamily, shift: int) -> ArcFamily:
    return ArcFamily(fam.n, tuple((k, rotl(w, shift, fam.n)) for k, w in fam.levels))


def reflect_family(fam: ArcFamily) -> ArcFamily:
    """Apply the reflection p -> -p (0-based); arc (h, k) goes to (-h-k+1, k)."""
    n = fam.n
    return ArcFamily(n, tuple((k, rotl(reverse_bits(w, n), 1 - k, n)) for k, w in fam.levels))


def family_key(fam: ArcFamily) -> tuple:
    return tuple((k, tuple(fam.heads(k))) for k, _ in fam.levels)


def dihedral_images(fam: ArcFamily, include_reflection: bool = True) -> Iterator[ArcFamily]:
    yield from (rotate_family(fam, s) for s in range(fam.n))
    if include_reflection:
        ref = reflect_family(fam)
        yield from (rotate_family(ref, s) for s in range(fam.n))


def symmetry_orbit(fam: ArcFamily, include_reflection: bool = True) -> ArcFamily:
    """Lexicographically least image of ``fam`` under rotations (and reflections)."""
    return min(dihedral_images(fam, include_reflection), key=family_key)


def canonical_tuple(fams: tuple[ArcFamily, ...], include_reflection: bool = True) -> tuple[ArcFamily, ...]:
    """Least image of a tuple of families under one common dihedral motion."""
    if not fams:
        return fams
    n = fams[0].n
    images = []
    refl = (False, True) if include_reflection else (False,)
    for r in refl:
        base = tuple(reflect_family(f) for f in fams) if r else fams
        for s in range(n):
            img = tuple(rotate_family(f, s) for f in base)
            images.append((tuple(family_key(f) for f in img), img))
    return min(images, key=lambda t: t[0])[1]
