"""Shade and shadow operators on arc families and on uniform set families."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .core import ArcFamily, DomainError, SetFamily, bits_of, rotl


@dataclass(frozen=True)
class ComponentProfile:
    count: int
    runs: tuple[tuple[int, int], ...]  # (first head, run length), 1-based heads


def _single_level(fam: ArcFamily) -> tuple[int, int]:
    if len(fam.levels) != 1:
        raise DomainError(f"expected a non-empty single-level family, got levels {fam.lengths()}")
    return fam.levels[0]


def shade_immediate(fam: ArcFamily) -> ArcFamily:
    """All (k+1)-arcs containing a member: heads h and h-1 for every member head h."""
    k, w = _single_level(fam)
    n = fam.n
    if k >= n - 1:
        raise DomainError("immediate shade is undefined for arcs of length n-1")
    return ArcFamily(n, ((k + 1, w | rotl(w, -1, n)),))


def shadow_immediate(fam: ArcFamily) -> ArcFamily:
    """All (k-1)-arcs contained in a member: heads h and h+1 for every member head h."""
    k, w = _single_level(fam)
    n = fam.n
    if k <= 1:
        raise DomainError("immediate shadow is undefined for arcs of length 1")
    return ArcFamily(n, ((k - 1, w | rotl(w, 1, n)),))


def shadow_iterated(fam: ArcFamily, target: int) -> ArcFamily:
    """Shade or shadow applied |target - k| times; the identity when target == k."""
    n = fam.n
    if not 1 <= target <= n - 1:
        raise DomainError(f"target length {target} outside 1..{n - 1}")
    if not fam.levels:
        return ArcFamily(n)
    k, _ = _single_level(fam)
    step = shade_immediate if target > k else shadow_immediate
    for _ in range(abs(target - k)):
        fam = step(fam)
    return fam


def lambda_components(fam: ArcFamily) -> ComponentProfile:
    """Maximal circular runs of consecutive heads in a single-level family.

    Components of the head-adjacency subgraph of the n-cycle; a full or empty
    level has no well-defined count and is rejected.
    """
    k, w = _single_level(fam)
    n = fam.n
    full = (1 << n) - 1
    if w == full:
        raise DomainError("component count is undefined for a full level")
    starts = w & ~rotl(w, 1, n)  # heads whose predecessor is absent
    runs = []
    for s in bits_of(starts):
        length = 0
        h = s
        while w >> h & 1:
            length += 1
            h = (h + 1) % n
        runs.append((s + 1, length))
    return ComponentProfile(len(runs), tuple(runs))


def _uniform_size(fam: SetFamily) -> int:
    sizes = fam.sizes()
    if len(sizes) != 1:
        raise DomainError(f"expected a non-empty uniform family, got sizes {sorted(sizes)}")
    return sizes.pop()


def set_shade(fam: SetFamily) -> SetFamily:
    """All (k+1)-subsets of [n] containing a member of the k-uniform family."""
    k = _uniform_size(fam)
    n = fam.n
    if k + 1 > n:
        raise DomainError("shade of the full set is empty of meaning")
    out = set()
    for m in fam.members:
        for i in range(n):
            if not m >> i & 1:
                out.add(m | 1 << i)
    return SetFamily(n, frozenset(out))


def set_shadow(fam: SetFamily) -> SetFamily:
    """All (k-1)-subsets of [n] contained in a member of the k-uniform family."""
    k = _uniform_size(fam)
    if k == 0:
        raise DomainError("the empty set has no shadow")
    out = {m & ~(1 << i) for m in fam.members for i in bits_of(m)}
    return SetFamily(fam.n, frozenset(out))


def _is_antichain(masks) -> bool:
    for a, b in combinations(masks, 2):
        if a & b in (a, b):
            return False
    return True


class PropertyViolation(DomainError):
    """A lift step destroyed a property that the caller asked to preserve."""

    def __init__(self, message: str, family: SetFamily):
        super().__init__(message)
        self.family = family


def sperner_lift(fam: SetFamily, preserve=None) -> SetFamily:
    """Replace the lowest level of an antichain by its immediate shade.

    ``preserve`` is an optional predicate on SetFamily; when given it is
    checked on the input and re-checked on the result, and a failure on the
    result raises :class:`PropertyViolation`.
    """
    if not fam.members:
        raise DomainError("cannot lift an empty family")
    if not _is_antichain(list(fam.members)):
        raise DomainError("sperner_lift needs an antichain")
    low = min(fam.sizes())
    if low >= fam.n:
        raise DomainError("lowest level is already [n]")
    bottom = fam.level(low)
    rest = fam.members - bottom.members
    out = SetFamily(fam.n, rest | set_shade(bottom).members)
    if not _is_antichain(list(out.members)):
        raise PropertyViolation("lifted family is not an antichain", out)
    if preserve is not None and preserve(fam) and not preserve(out):
        raise PropertyViolation("lift did not preserve the requested property", out)
    return out
