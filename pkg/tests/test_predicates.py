import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from katona.constructions import b_k_of_T, d_ij, erdos_levels, m_pq, star_arcs
from katona.core import Arc, ArcFamily, DomainError, GroundSet, SetFamily, complement_family, full_level
from katona.predicates import (
    PredicateId,
    are_cross_intersecting,
    are_cross_union,
    check_hereditary,
    contains_butterfly,
    is_antichain,
    is_intersecting,
    is_iu,
    is_r_wise_union,
    is_s_wise_cross_intersecting,
    is_s_wise_intersecting,
    is_star,
    known_predicates,
    longest_chain,
    matching_number,
    satisfies_gronau,
    star_center,
)

from oracles import to_sets


@st.composite
def arc_subfamilies(draw, max_n=6):
    n = draw(st.integers(3, max_n))
    pool = [Arc(h, k) for k in range(1, n) for h in range(1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pool), max_size=10, unique=True))
    return ArcFamily.from_arcs(n, chosen)


@st.composite
def set_subfamilies(draw, max_n=5):
    n = draw(st.integers(2, max_n))
    masks = draw(st.lists(st.integers(1, (1 << n) - 1), max_size=9, unique=True))
    return SetFamily(n, frozenset(masks))


any_family = st.one_of(arc_subfamilies(), set_subfamilies())


# -- examples -------------------------------------------------------------------


def test_intersecting_examples():
    assert is_intersecting(ArcFamily(6))
    assert is_intersecting(star_arcs(6, 3, 1))
    assert not is_intersecting(full_level(GroundSet(6), 3))


def test_s_wise_examples():
    star = star_arcs(7, 4, 1)
    brute = oracles.s_wise_intersecting(to_sets(star), 3)
    assert is_s_wise_intersecting(star, 3) == brute
    assert brute  # every arc passes through position 1
    with pytest.raises(DomainError):
        is_s_wise_intersecting(star, 1)
    with pytest.raises(DomainError):
        is_r_wise_union(star, 0)


def test_cross_examples():
    a = ArcFamily.from_arcs(6, [Arc(1, 2)])
    assert are_cross_intersecting([a, ArcFamily.from_arcs(6, [Arc(6, 3)])])
    assert not are_cross_intersecting([a, ArcFamily.from_arcs(6, [Arc(3, 3)])])
    assert are_cross_intersecting([full_level(GroundSet(6), 1), ArcFamily(6)])
    assert are_cross_union([full_level(GroundSet(6), 5), ArcFamily(6)])
    with pytest.raises(DomainError):
        are_cross_intersecting([a])
    with pytest.raises(DomainError):
        are_cross_union([a, ArcFamily(7)])


def test_s_wise_cross_examples():
    stars = [star_arcs(6, 3, 1), ArcFamily.from_heads(6, 3, [6, 1]), ArcFamily.from_heads(6, 3, [5])]
    assert is_s_wise_cross_intersecting(stars, 2)
    full = full_level(GroundSet(6), 3)
    assert not is_s_wise_cross_intersecting([full, full, full], 2)
    with pytest.raises(DomainError):
        is_s_wise_cross_intersecting(stars[:2], 3)


def test_chain_examples():
    assert longest_chain(full_level(GroundSet(7), 3)) == 0
    nested = ArcFamily.from_arcs(5, [Arc(1, 1), Arc(1, 2), Arc(1, 3)])
    assert longest_chain(nested) == 2 and not is_antichain(nested)
    assert longest_chain(erdos_levels(5, {2, 3})) == 1


def test_butterfly_examples():
    assert not contains_butterfly(SetFamily.from_sets(5, [[1], [1, 2], [1, 2, 3]]))
    assert not contains_butterfly(erdos_levels(5, {2, 3}))
    assert contains_butterfly(SetFamily.from_sets(5, [[1], [1, 2], [1, 2, 3], [1, 2, 3, 4]]))
    assert contains_butterfly(SetFamily.from_sets(4, [[1], [2], [1, 2, 3], [1, 2, 4]]))


def test_star_examples():
    fam = star_arcs(7, 3, 2)
    assert is_star(fam) and star_center(fam) == 2
    assert not is_star(m_pq(6, 3, 3, 5))
    assert is_star(ArcFamily(5)) and star_center(ArcFamily(5)) is None


def test_matching_examples():
    assert matching_number(star_arcs(8, 3, 4)) == 1
    assert matching_number(full_level(GroundSet(6), 2)) == 3
    t = b_k_of_T(9, 3, [1, 4, 7])
    assert matching_number(t) == 3 == oracles.matching_number(to_sets(t))
    assert matching_number(ArcFamily(4)) == 0
    with pytest.raises(DomainError):
        matching_number(SetFamily.from_sets(4, [[], [1]]))


def test_iu_and_gronau_examples():
    assert is_iu(d_ij(6, 1, 4))
    square = full_level(GroundSet(4), 2)
    assert not is_iu(square) and satisfies_gronau(square)
    assert not satisfies_gronau(full_level(GroundSet(5), 2))


# -- agreement with the set oracles -----------------------------------------------


@settings(max_examples=150)
@given(any_family, st.integers(2, 4))
def test_predicates_agree_with_oracles(fam, s):
    sets = to_sets(fam)
    n = fam.n
    assert is_intersecting(fam) == oracles.intersecting(sets)
    assert is_s_wise_intersecting(fam, s) == oracles.s_wise_intersecting(sets, s)
    assert is_r_wise_union(fam, s) == oracles.r_wise_union(sets, n, s)
    assert longest_chain(fam) == oracles.longest_chain(sets)
    assert is_antichain(fam) == oracles.antichain(sets)
    assert contains_butterfly(fam) == oracles.has_butterfly(sets)
    assert matching_number(fam) == oracles.matching_number(sets)
    assert is_iu(fam) == oracles.iu(sets, n)
    assert satisfies_gronau(fam) == oracles.gronau(sets, n)
    common = frozenset.intersection(*sets) if sets else frozenset()
    assert is_star(fam) == (not sets or bool(common))


@settings(max_examples=100)
@given(st.integers(3, 6).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.sets(st.integers(1, (1 << n) - 1), max_size=5), min_size=2, max_size=3))))
def test_cross_predicates_agree_with_oracles(args):
    n, lists = args
    fams = [SetFamily(n, frozenset(m)) for m in lists]
    sets = [to_sets(f) for f in fams]
    assert are_cross_intersecting(fams) == oracles.cross_intersecting(sets)
    assert are_cross_union(fams) == oracles.cross_union(sets, n)
    if len(fams) == 3:
        pairwise = all(oracles.cross_intersecting(list(p)) for p in combinations(sets, 2))
        assert is_s_wise_cross_intersecting(fams, 2) == pairwise


# -- structural laws ------------------------------------------------------------------


@settings(max_examples=100)
@given(any_family)
def test_two_wise_is_intersecting_is_matching_one(fam):
    assert is_intersecting(fam) == is_s_wise_intersecting(fam, 2)
    if len(fam) and 0 not in fam.masks():
        assert is_intersecting(fam) == (matching_number(fam) <= 1)
    assert are_cross_intersecting([fam, fam]) == (is_intersecting(fam) or not len(fam))


def test_union_intersection_duality_exhaustive():
    # single-level arc families and their complements, n <= 7, r = 2..3
    for n in range(3, 8):
        for k in range(1, n):
            for w in range(1, 1 << n):
                fam = ArcFamily(n, ((k, w),))
                comp = complement_family(fam)
                for r in (2, 3):
                    assert is_r_wise_union(fam, r) == is_s_wise_intersecting(comp, r)


def test_butterfly_complement_invariance_exhaustive():
    # every family of at most 5 arcs from A(5)
    n = 5
    arcs = [Arc(h, k) for k in range(1, n) for h in range(1, n + 1)]
    for size in range(4, 6):
        for group in combinations(arcs, size):
            fam = ArcFamily.from_arcs(n, group)
            assert contains_butterfly(fam) == contains_butterfly(complement_family(fam))


@settings(max_examples=100)
@given(any_family, st.randoms(use_true_random=False))
def test_longest_chain_is_monotone(fam, rnd):
    masks = fam.masks()
    sub = [m for m in masks if rnd.random() < 0.5]
    assert longest_chain((fam.n, sub)) <= longest_chain(fam)


# -- identifiers and heredity -----------------------------------------------------------


def test_predicate_ids_round_trip():
    for text in ["intersecting", "s-wise-intersecting:3", "r-wise-union:2", "chain-free:2", "matching-at-most:1", "cross-union"]:
        assert str(PredicateId.parse(text)) == text
    assert "butterfly-free" in known_predicates()
    for bad in ["s-wise-intersecting:1", "intersecting:2", "chain-free", "nonsense", "chain-free:0"]:
        with pytest.raises(DomainError):
            PredicateId.parse(bad)


def test_holds_dispatch():
    star = star_arcs(6, 3, 1)
    assert PredicateId.parse("intersecting").holds(star)
    assert PredicateId.parse("matching-at-most:1").holds(star)
    assert not PredicateId.parse("matching-at-most:1").holds(full_level(GroundSet(6), 2))
    assert PredicateId.parse("cross-intersecting").holds(star, star)
    with pytest.raises(DomainError):
        PredicateId.parse("intersecting").holds(star, star)


@pytest.mark.parametrize("text", ["intersecting", "s-wise-intersecting:3", "r-wise-union:2", "antichain", "chain-free:2",
                                  "butterfly-free", "star", "iu", "gronau", "matching-at-most:1",
                                  "cross-intersecting", "cross-union", "s-wise-cross-intersecting:2"])
def test_declared_direction_is_hereditary_exhaustively(text):
    pid = PredicateId.parse(text)
    assert pid.direction == "down"
    assert check_hereditary(pid, 4)


@pytest.mark.parametrize("text", known_predicates())
def test_declared_direction_on_random_subfamilies(text):
    # random subfamily sampling in 2^[5]; a subfamily of a passing family passes
    param = {"s-wise-intersecting": 3, "r-wise-union": 2, "chain-free": 2, "matching-at-most": 2,
             "s-wise-cross-intersecting": 2}.get(text)
    pid = PredicateId(text, param)
    rng = random.Random(text)
    slots = 3 if pid.joint else 1
    for _ in range(300):
        fams = [[rng.randrange(1, 32) for _ in range(rng.randrange(0, 6))] for _ in range(slots)]
        if not pid.holds(*((5, f) for f in fams)):
            continue
        smaller = [[m for m in f if rng.random() < 0.6] for f in fams]
        assert pid.holds(*((5, f) for f in smaller))
