import random
from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from katona.averaging import (
    CyclicOrder,
    combine_partials,
    cyclic_orders,
    exact_average,
    fraction_report,
    lift_bound,
    lym_sum,
    max_trace,
    sample_average,
    trace,
)
from katona.constructions import erdos_levels, hilton_milner
from katona.core import DomainError, GroundSet, SetFamily, full_level, popcount
from katona.predicates import contains_butterfly


def level(n, k):
    return [sum(1 << i for i in c) for c in combinations(range(n), k)]


def fam_of(n, masks):
    return SetFamily(n, frozenset(masks))


def test_cyclic_orders():
    for n in range(2, 7):
        orders = list(cyclic_orders(n))
        assert len(orders) == len(set(orders)) == factorial(n - 1)
        assert all(o.arrangement[0] == 1 for o in orders)
    with pytest.raises(DomainError):
        CyclicOrder((2, 1, 3))
    with pytest.raises(DomainError):
        CyclicOrder((1, 1, 3))


def test_trace_examples():
    n = 5
    assert all(trace(fam_of(n, level(n, 2)), o, 2) == n for o in cyclic_orders(n))
    assert trace(fam_of(n, []), CyclicOrder.identity(n), 2) == 0
    assert trace(SetFamily.from_sets(5, [[1, 2], [3, 4]]), CyclicOrder.identity(5), 2) == 2
    # {1,3} is an arc of the order 1,3,5,2,4 but not of the identity
    assert trace(SetFamily.from_sets(5, [[1, 3]]), CyclicOrder((1, 3, 5, 2, 4)), 2) == 1
    assert trace(full_level(GroundSet(5), 3), CyclicOrder.identity(5)) == 5
    with pytest.raises(DomainError):
        trace(fam_of(5, []), CyclicOrder.identity(4), 2)
    with pytest.raises(DomainError):
        trace(fam_of(5, []), CyclicOrder.identity(5), 5)


def test_exact_average_examples():
    assert exact_average(SetFamily.from_sets(6, [[1, 4, 5]]), 3) == Fraction(1, 20)
    assert exact_average(fam_of(6, level(6, 2)), 2) == 1
    four = fam_of(5, level(5, 2)[:4])
    assert exact_average(four, 2) == Fraction(2, 5)
    total, count = combine_partials((trace(four, o, 2), 1) for o in cyclic_orders(5))
    assert count == 24 and Fraction(total, count * 5) == Fraction(2, 5)
    with pytest.raises(DomainError):
        exact_average(fam_of(10, level(10, 2)[:3]), 2)
    with pytest.raises(DomainError):
        exact_average(SetFamily.from_sets(5, [[1], [1, 2]]), 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 6).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1), st.data())))
def test_expectation_identity(args):
    n, k, data = args
    pool = level(n, k)
    chosen = data.draw(st.sets(st.sampled_from(pool)))
    fam = fam_of(n, chosen)
    avg = exact_average(fam, k)
    assert avg == Fraction(len(chosen), comb(n, k))
    assert Fraction(max_trace(fam, k), n) >= avg


def test_combine_partials_is_order_independent():
    parts = [(3, 1), (0, 2), (7, 5)]
    assert combine_partials(parts) == combine_partials(reversed(parts)) == (10, 8)


def test_lift_bound():
    assert lift_bound(3, 7, 3) == 15
    for n in range(3, 12):
        for k in range(1, n):
            assert lift_bound(k, n, k) == comb(n - 1, k - 1)
    assert lift_bound(6, 8, 3) == 42
    assert lift_bound(0, 9, 4) == 0
    with pytest.raises(DomainError):
        lift_bound(-1, 5, 2)


def test_lym_examples():
    assert lym_sum(full_level(GroundSet(7), 3)) == Fraction(7, 35)
    assert lym_sum(fam_of(7, level(7, 3))) == 1
    assert lym_sum(erdos_levels(5, {2, 3})) == 2
    assert lym_sum(SetFamily.from_sets(6, [[1, 2]])) == Fraction(1, 15)
    assert lym_sum(SetFamily.from_sets(6, [[1, 2]]), "shifted") == Fraction(1, 5)
    arcs = full_level(GroundSet(7), 3)
    circle = lym_sum(arcs, "circle")
    assert circle == Fraction(7, 5)
    # the circle sum is the expected multi-level trace of a random cyclic order
    orders = list(cyclic_orders(7))
    assert circle == Fraction(sum(trace(arcs, o) for o in orders), len(orders))
    with pytest.raises(DomainError):
        lym_sum(SetFamily.from_sets(4, [[1, 2, 3, 4]]))
    with pytest.raises(DomainError):
        lym_sum(SetFamily.from_sets(4, [[]]), "shifted")
    with pytest.raises(DomainError):
        lym_sum(SetFamily.from_sets(4, [[1]]), "bogus")
    assert fraction_report(Fraction(2, 5)) == {"fraction": "2/5", "decimal": 0.4}


def test_sample_average():
    n, k = 12, 4
    pool = level(n, k)
    rng = random.Random(7)
    fam = fam_of(n, rng.sample(pool, 100))
    est = sample_average(fam, k, trials=4000, seed=11)
    assert est.exact == Fraction(100, comb(12, 4))
    assert abs(est.z_score) <= 3
    assert sample_average(fam, k, 200, 5) == sample_average(fam, k, 200, 5)
    full = sample_average(fam_of(7, level(7, 3)), 3, 50, 0)
    assert full.estimate == 1 and full.stderr == 0
    assert sample_average(fam_of(7, []), 3, 10, 0).estimate == 0
    with pytest.raises(DomainError):
        sample_average(fam, k, 0, 1)


# -- lifts of circle bounds ----------------------------------------------------------


def _antichains(pool):
    def rec(start, fam):
        yield fam
        for i in range(start, len(pool)):
            x = pool[i]
            if all(x & a not in (x, a) for a in fam):
                yield from rec(i + 1, fam + [x])

    yield from rec(0, [])


def test_circular_sperner_lift_exhaustive():
    # every antichain of 2^[5] avoiding the empty and full sets
    n = 5
    pool = [m for k in range(1, n) for m in level(n, k)]
    orders = list(cyclic_orders(n))
    count = 0
    for fam in _antichains(pool):
        count += 1
        f = fam_of(n, fam)
        assert all(trace(f, o) <= n for o in orders)
        lym = lym_sum(f)
        assert lym <= 1
        if lym == 1:
            assert len(f.sizes()) == 1 and len(f) == comb(n, f.sizes().pop())
    assert count == 7581 - 2  # Dedekind number M(5), without {} and {[5]} as sole members


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 30), max_size=16, unique=True))
def test_butterfly_lift_on_random_families(masks):
    n = 5
    fam = fam_of(n, [m for m in masks if popcount(m) < n])
    if contains_butterfly(fam):
        return
    assert all(trace(fam, o) <= 2 * n for o in cyclic_orders(n))
    assert lym_sum(fam) <= 2


def test_butterfly_lift_on_greedy_maximal_families():
    # random greedy butterfly-free families are maximal, so they stress the bound
    n = 5
    pool = [m for k in range(1, n) for m in level(n, k)]
    orders = list(cyclic_orders(n))
    rng = random.Random(3)
    for _ in range(60):
        rng.shuffle(pool)
        fam = []
        for m in pool:
            if not contains_butterfly((n, fam + [m])):
                fam.append(m)
        f = fam_of(n, fam)
        assert all(trace(f, o) <= 2 * n for o in orders)
        assert lym_sum(f) <= 2


def test_shifted_lym_for_three_wise_intersecting_antichains_exhaustive():
    # levels 1..4 of 2^[6] (2n >= 3|F|); DFS over antichains that stay 3-wise intersecting
    n = 6
    pool = [m for k in range(1, 5) for m in level(n, k)]
    best, count = Fraction(0), 0

    def rec(start, fam):
        nonlocal best, count
        count += 1
        best = max(best, lym_sum(fam_of(n, fam), "shifted"))
        for i in range(start, len(pool)):
            x = pool[i]
            if any(x & a in (x, a) or not x & a for a in fam):
                continue
            if any(not x & a & b for a, b in combinations(fam, 2)):
                continue
            rec(i + 1, fam + [x])

    rec(0, [])
    assert count == 45600
    assert best == 1


def test_circle_method_is_weak_for_non_star_families():
    # the best circle sees a full star of k arcs, so the lifted bound is the EKR
    # value, strictly above the true size of the non-star family
    for n, k in [(7, 3), (8, 3)]:
        fam = hilton_milner(n, k)
        best = max_trace(fam, k)
        assert best == k
        assert lift_bound(best, n, k) == comb(n - 1, k - 1) > len(fam)
