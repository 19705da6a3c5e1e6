"""Averaging over cyclic orders, LYM-type sums, and circle-to-binomial lifts.

Everything here is exact (``fractions.Fraction``); the Monte Carlo estimator
is the only approximate path and is labelled as such in its return value.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator

from .core import ArcFamily, DomainError, SetFamily, popcount

ENUMERATION_LIMIT = 9


@dataclass(frozen=True)
class CyclicOrder:
    """A cyclic arrangement (x_1, ..., x_n) of [n] normalised to x_1 = 1."""

    arrangement: tuple[int, ...]

    def __post_init__(self) -> None:
        arr = self.arrangement
        if sorted(arr) != list(range(1, len(arr) + 1)):
            raise DomainError(f"{arr} is not a permutation of 1..{len(arr)}")
        if arr[0] != 1:
            raise DomainError("cyclic orders are normalised with element 1 first")

    @property
    def n(self) -> int:
        return len(self.arrangement)

    @classmethod
    def identity(cls, n: int) -> "CyclicOrder":
        return cls(tuple(range(1, n + 1)))

    def arc_masks(self, k: int) -> list[int]:
        """Point masks of the n arcs of length k along this order."""
        bits = [1 << (x - 1) for x in self.arrangement]
        n = len(bits)
        out = []
        for r in range(n):
            m = 0
            for j in range(k):
                m |= bits[(r + j) % n]
            out.append(m)
        return out


def cyclic_orders(n: int) -> Iterator[CyclicOrder]:
    """All (n-1)! cyclic orders with element 1 in position 1."""
    for rest in permutations(range(2, n + 1)):
        yield CyclicOrder((1,) + rest)


def _members(fam: SetFamily | ArcFamily) -> frozenset[int]:
    if isinstance(fam, ArcFamily):
        return frozenset(fam.masks())
    return fam.members


def trace(fam: SetFamily | ArcFamily, order: CyclicOrder, k: int | None = None) -> int:
    """How many arcs of the relabelled circle belong to ``fam``.

    With ``k`` given only arcs of that length count; otherwise every length
    1..n-1 does.
    """
    n = order.n
    if fam.n != n:
        raise DomainError(f"family lives on [{fam.n}], order on [{n}]")
    members = _members(fam)
    lengths = range(1, n) if k is None else (k,)
    for length in lengths:
        if not 1 <= length <= n - 1:
            raise DomainError(f"arc length {length} outside 1..{n - 1}")
    return sum(m in members for length in lengths for m in order.arc_masks(length))


def max_trace(fam: SetFamily | ArcFamily, k: int | None = None) -> int:
    """Largest trace over all cyclic orders: the right side of the averaging bound times n."""
    _check_limit(fam.n)
    return max(trace(fam, o, k) for o in cyclic_orders(fam.n))


def _check_limit(n: int, limit: int = ENUMERATION_LIMIT) -> None:
    if n > limit:
        raise DomainError(
            f"n={n} exceeds the exact enumeration limit {limit} ({math.factorial(n - 1)} orders); "
            "use sample_average for an estimate"
        )


def exact_average(fam: SetFamily, k: int, limit: int = ENUMERATION_LIMIT) -> Fraction:
    """Mean of trace/n over every cyclic order; equals |fam| / C(n, k) for k-uniform fam."""
    n = fam.n
    _check_limit(n, limit)
    if not 1 <= k <= n - 1:
        raise DomainError(f"arc length {k} outside 1..{n - 1}")
    if any(popcount(m) != k for m in fam.members):
        raise DomainError(f"family is not {k}-uniform")
    total = 0
    count = 0
    for order in cyclic_orders(n):
        total += trace(fam, order, k)
        count += 1
    return Fraction(total, count * n)


def combine_partials(parts: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Merge (trace sum, order count) partial accumulators; order-independent."""
    total = count = 0
    for t, c in parts:
        total += t
        count += c
    return total, count


def lift_bound(circle_bound: int, n: int, k: int) -> Fraction:
    """Bound on a k-uniform family implied by a bound on its trace on every circle."""
    if circle_bound < 0:
        raise DomainError("circle bound must be non-negative")
    return Fraction(circle_bound * math.comb(n, k), n)


def lym_sum(fam: SetFamily | ArcFamily, mode: str = "standard") -> Fraction:
    """Sum of 1/C(n, |F|) (standard), 1/C(n-1, |F|-1) (shifted), or n/C(n, |F|) (circle).

    The circle mode is the expected number of members that are arcs of a
    uniformly random cyclic order.
    """
    n = fam.n
    members = _members(fam)
    if mode in ("standard", "circle"):
        for m in members:
            if not 0 < popcount(m) < n:
                raise DomainError("standard and circle sums need 0 < |F| < n for every member")
        total = sum((Fraction(1, math.comb(n, popcount(m))) for m in members), Fraction(0))
        return total * n if mode == "circle" else total
    if mode == "shifted":
        for m in members:
            if popcount(m) < 1:
                raise DomainError("shifted sum needs |F| >= 1 for every member")
        return sum((Fraction(1, math.comb(n - 1, popcount(m) - 1)) for m in members), Fraction(0))
    raise DomainError(f"unknown LYM mode {mode!r}")


@dataclass(frozen=True)
class SampleEstimate:
    estimate: Fraction
    stderr: float
    exact: Fraction
    trials: int
    seed: int

    @property
    def z_score(self) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == self.exact else math.inf
        return float(self.estimate - self.exact) / self.stderr


def random_cyclic_order(n: int, rng: random.Random) -> CyclicOrder:
    rest = list(range(2, n + 1))
    rng.shuffle(rest)
    return CyclicOrder((1, *rest))


def sample_average(fam: SetFamily, k: int, trials: int, seed: int) -> SampleEstimate:
    """Monte Carlo estimate of |fam| / C(n, k) from uniformly random cyclic orders."""
    if trials < 1:
        raise DomainError("need at least one trial")
    n = fam.n
    rng = random.Random(seed)
    values = [trace(fam, random_cyclic_order(n, rng), k) for _ in range(trials)]
    mean = Fraction(sum(values), trials * n)
    if trials > 1:
        mu = sum(values) / trials
        var = sum((v - mu) ** 2 for v in values) / (trials - 1)
        stderr = math.sqrt(var / trials) / n
    else:
        stderr = 0.0
    exact = Fraction(len(fam.members), math.comb(n, k))
    return SampleEstimate(mean, stderr, exact, trials, seed)


def fraction_report(x: Fraction) -> dict:
    return {"fraction": f"{x.numerator}/{x.denominator}", "decimal": float(x)}
