from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from katona.core import Arc, ArcFamily, DomainError, GroundSet, SetFamily, complement_family, full_level
from katona.operators import (
    PropertyViolation,
    lambda_components,
    set_shade,
    set_shadow,
    shade_immediate,
    shadow_immediate,
    shadow_iterated,
    sperner_lift,
)
from katona.predicates import is_antichain, is_s_wise_intersecting, is_star

from oracles import arc, to_sets


def brute_shade(n, k, sets):
    return {a for a in (arc(n, h, k + 1) for h in range(1, n + 1)) if any(s <= a for s in sets)}


def brute_shadow(n, k, sets):
    return {a for a in (arc(n, h, k - 1) for h in range(1, n + 1)) if any(a <= s for s in sets)}


def brute_components(n, heads):
    # connected components of the subgraph of the n-cycle induced by the heads
    heads = set(heads)
    seen, count = set(), 0
    for h in heads:
        if h in seen:
            continue
        count += 1
        stack = [h]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            for y in (x % n + 1, (x - 2) % n + 1):
                if y in heads:
                    stack.append(y)
    return count


def test_shade_and_shadow_examples():
    assert shade_immediate(ArcFamily.from_arcs(7, [Arc(3, 2)])) == ArcFamily.from_arcs(7, [Arc(3, 3), Arc(2, 3)])
    assert shade_immediate(full_level(GroundSet(6), 2)) == full_level(GroundSet(6), 3)
    assert shadow_immediate(ArcFamily.from_arcs(7, [Arc(3, 3)])) == ArcFamily.from_arcs(7, [Arc(3, 2), Arc(4, 2)])
    assert len(shadow_immediate(ArcFamily.from_arcs(8, [Arc(1, 3), Arc(5, 3)]))) == 4
    with pytest.raises(DomainError):
        shade_immediate(full_level(GroundSet(6), 5))
    with pytest.raises(DomainError):
        shadow_immediate(full_level(GroundSet(6), 1))
    with pytest.raises(DomainError):
        shade_immediate(ArcFamily.from_arcs(6, [Arc(1, 1), Arc(1, 2)]))


def test_iterated_examples():
    fam = ArcFamily.from_arcs(7, [Arc(1, 2)])
    assert shadow_iterated(fam, 2) == fam
    assert len(shadow_iterated(fam, 5)) >= 4
    assert shadow_iterated(full_level(GroundSet(7), 3), 1) == full_level(GroundSet(7), 1)
    assert shadow_iterated(ArcFamily(7), 4) == ArcFamily(7)
    with pytest.raises(DomainError):
        shadow_iterated(fam, 7)


def test_component_examples():
    assert lambda_components(ArcFamily.from_heads(8, 3, [1, 2, 3])).count == 1
    prof = lambda_components(ArcFamily.from_heads(8, 2, [1, 3, 5, 7]))
    assert prof.count == 4 and prof.runs == ((1, 1), (3, 1), (5, 1), (7, 1))
    wrap = lambda_components(ArcFamily.from_heads(8, 2, [8, 1, 2, 5]))
    assert wrap.count == 2 and sorted(wrap.runs) == [(5, 1), (8, 3)]
    with pytest.raises(DomainError):
        lambda_components(full_level(GroundSet(5), 2))
    with pytest.raises(DomainError):
        lambda_components(ArcFamily(5))


def test_exhaustive_operator_laws():
    """Brute-force shade/shadow, the component law, duality and the circular
    Kruskal-Katona bound for every non-empty level subfamily, n <= 8."""
    for n in range(3, 9):
        g = GroundSet(n)
        for k in range(1, n):
            for w in range(1, 1 << n):
                fam = ArcFamily(n, ((k, w),))
                sets = to_sets(fam)
                size = len(sets)
                lam = None if size == n else lambda_components(fam)
                if lam is not None:
                    heads = fam.heads(k)
                    assert lam.count == brute_components(n, heads)
                    assert sum(r for _, r in lam.runs) == size
                if k <= n - 2:
                    up = shade_immediate(fam)
                    assert to_sets(up) == brute_shade(n, k, sets)
                    if lam is not None:
                        assert len(up) == size + lam.count
                if k >= 2:
                    down = shadow_immediate(fam)
                    assert to_sets(down) == brute_shadow(n, k, sets)
                    if lam is not None:
                        assert len(down) == size + lam.count
                if 2 <= k <= n - 2:
                    assert complement_family(shadow_immediate(fam)) == shade_immediate(complement_family(fam))
                for target in range(1, n):
                    got = shadow_iterated(fam, target)
                    assert len(got) >= min(n, size + abs(target - k))
        assert g.n == n


def test_set_shade_and_shadow():
    fam = SetFamily.from_sets(4, [[1, 2]])
    assert set_shade(fam) == SetFamily.from_sets(4, [[1, 2, 3], [1, 2, 4]])
    level = SetFamily(5, frozenset(sum(1 << i for i in c) for c in combinations(range(5), 2)))
    assert len(set_shade(level)) == comb(5, 3)
    assert len(set_shadow(level)) == comb(5, 1)
    with pytest.raises(DomainError):
        set_shade(SetFamily.from_sets(4, [[1], [1, 2]]))
    with pytest.raises(DomainError):
        set_shadow(SetFamily(4, frozenset({0})))


def test_normalised_shadow_monotonicity_exhaustive():
    # every subfamily of every level of 2^[5]
    n = 5
    for k in range(1, n):
        level = [sum(1 << i for i in c) for c in combinations(range(n), k)]
        for sel in range(1, 1 << len(level)):
            fam = SetFamily(n, frozenset(level[i] for i in range(len(level)) if sel >> i & 1))
            alpha = Fraction(len(fam), comb(n, k))
            assert Fraction(len(set_shade(fam)), comb(n, k + 1)) >= alpha
            assert Fraction(len(set_shadow(fam)), comb(n, k - 1)) >= alpha


def test_sperner_lift_examples():
    fam = SetFamily.from_sets(4, [[1], [2, 3]])
    lifted = sperner_lift(fam)
    # {1} is replaced by its 2-supersets; {1,2} and {1,3} do not sit above {2,3}
    assert lifted == SetFamily.from_sets(4, [[1, 2], [1, 3], [1, 4], [2, 3]])
    uniform = SetFamily.from_sets(5, [[1, 2], [3, 4]])
    assert sperner_lift(uniform) == set_shade(uniform)
    with pytest.raises(DomainError):
        sperner_lift(SetFamily.from_sets(4, [[1], [1, 2]]))
    with pytest.raises(DomainError):
        sperner_lift(SetFamily(4))


def test_sperner_lift_reports_lost_property():
    fam = SetFamily.from_sets(4, [[1], [2, 3]])
    with pytest.raises(PropertyViolation) as info:
        sperner_lift(fam, preserve=lambda f: len(f) <= 2)
    assert len(info.value.family) == 4


def test_sperner_lift_keeps_three_wise_intersecting_antichains():
    # 3-wise intersecting antichains of 2^[6]; lift until uniform at level 4
    # {1,2,3} with every 4-subset of [5] that omits a point of {1,2,3}; no common point
    quads = [c for c in combinations(range(1, 6), 4) if not {1, 2, 3} <= set(c)]
    start = SetFamily.from_sets(6, [[1, 2, 3]] + [list(c) for c in quads])
    assert is_antichain(start) and is_s_wise_intersecting(start, 3)
    assert not is_star(start)
    fam = start
    while min(fam.sizes()) < 4:
        fam = sperner_lift(fam, preserve=lambda f: is_s_wise_intersecting(f, 3))
        assert is_antichain(fam) and is_s_wise_intersecting(fam, 3)
    assert fam.sizes() == {4}


@given(st.integers(3, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1), st.integers(1, (1 << n) - 1))))
def test_shade_contains_exactly_the_supersets(args):
    n, k, w = args
    fam = ArcFamily(n, ((k, w),))
    if k <= n - 2:
        assert to_sets(shade_immediate(fam)) == brute_shade(n, k, to_sets(fam))
