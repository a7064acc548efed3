import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from segal_lab import bisimp, cat, ssets
from segal_lab._core import search_maps
from segal_lab.bisimp import (
    cosk0, is_levelwise_we, is_reedy_fibration, make_dF, make_F, make_Sp, mapping_space,
    pushout_product, reduce_R, relative_matching_map,
)

B2 = (2, 2)


def words(n, d):
    return list(itertools.combinations_with_replacement(range(n + 1), d + 1))


def composable_pairs(C):
    """Independent count of composable pairs (f, g) with tgt f = src g."""
    return sum(1 for f in range(C.n_morphisms) for g in range(C.n_morphisms) if C.tgt[f] == C.src[g])


def nondeg_cat(X, m, n=0):
    return len(X.column(n).nondegenerate((m,)))


# -- generators -----------------------------------------------------------------

@pytest.mark.parametrize("m", range(4))
def test_F1_levels_are_order_maps(m):
    X = make_F(1)
    assert X.count((m, 0)) == len(words(1, m))
    assert X.level(m).nondegenerate_profile() == (len(words(1, m)), 0, 0, 0)


def test_Sp2_has_two_nondegenerate_edges():
    assert nondeg_cat(make_Sp(2), 1) == 2
    assert nondeg_cat(make_Sp(2), 2) == 0


def test_dF1_is_two_points():
    X = make_dF(1)
    assert X.count((0, 0)) == 2
    assert nondeg_cat(X, 1) == 0


# -- mapping spaces -------------------------------------------------------------

@pytest.mark.parametrize("m", range(3))
def test_yoneda_for_representables(m):
    X = cat.nerve(cat.make_I(1), B2)
    res = mapping_space(make_F(m, B2), X)
    for n in range(3):
        assert res.space.count((n,)) == X.count((m, n))


def test_map_from_F0_is_level_zero():
    X = cosk0(ssets.make_standard(1, 2), 2)
    res = mapping_space(make_F(0, B2), X)
    assert res.space.counts == X.level(0).counts


@pytest.mark.parametrize("C", [cat.make_ordinal(2), cat.cyclic_group(2), cat.make_I(1),
                               cat.product_cat(cat.make_ordinal(1), cat.make_ordinal(1))])
def test_maps_from_spine_are_composable_pairs(C):
    res = mapping_space(make_Sp(2, B2), cat.nerve(C, B2), up_to_dim=0)
    assert res.space.count((0,)) == composable_pairs(C)


def test_composable_pairs_frozen_values():
    # frozen from the independent count
    assert composable_pairs(cat.make_ordinal(2)) == 10
    assert composable_pairs(cat.cyclic_group(3)) == 9
    assert composable_pairs(cat.make_I(1)) == 8


# -- cosk0 and R ------------------------------------------------------------------

@pytest.mark.parametrize("n", range(3))
def test_cosk0_levels_are_powers(n):
    K = ssets.make_horn(2, 1, 2)
    X = cosk0(K, 3)
    for m in range(4):
        assert X.count((m, n)) == K.count((n,)) ** (m + 1)


def test_R_fixes_nerves():
    X = cat.nerve(cat.make_ordinal(2))
    R = reduce_R(X)
    assert R.counts == X.counts


def test_R_of_cosk0_interval_level_one_derived():
    K = ssets.make_standard(1, 2)
    R = reduce_R(cosk0(K, 2))
    # pairs of degenerate simplices on the two vertices: 2 x 2 in every space degree
    expected = len(list(itertools.product(range(K.count((0,))), repeat=2)))
    assert expected == 4
    assert [R.count((1, n)) for n in range(3)] == [4, 4, 4]
    assert R.level(1).nondegenerate_profile() == (4, 0, 0)


# -- matching maps --------------------------------------------------------------

def test_matching_map_at_zero_is_level_zero():
    f = cat.nerve_functor(cat.to_terminal(cat.make_ordinal(1)))
    g = relative_matching_map(f, 0)
    assert g.source.counts == f.source.level(0).counts
    assert g.target.counts == f.target.level(0).counts


def test_matching_map_of_arrow_to_point_matches_hand_count():
    f = cat.nerve_functor(cat.to_terminal(cat.make_ordinal(1)))
    g = relative_matching_map(f, 1)
    # X_1 = {id0, id1, 0->1}; the target is pairs of objects, since Y is a point
    assert g.source.count((0,)) == 3
    assert g.target.count((0,)) == 4
    assert len(set(g[(0,)].tolist())) == 3
    pairs = [tuple(g.target.label((0,), int(c))) for c in g[(0,)]]
    assert len(pairs) == 3


def test_identity_matching_maps_are_trivial_fibrations():
    X = cat.nerve(cat.make_I(1))
    f = bisimp.identity(X)
    for m in range(4):
        assert ssets.is_trivial_fibration(relative_matching_map(f, m)).is_true


@pytest.mark.parametrize("C,D", [(cat.make_ordinal(1), cat.terminal()), (cat.make_I(1), cat.cyclic_group(2))])
def test_nerve_maps_are_reedy_fibrations(C, D):
    for F in cat.enumerate_functors(C, D, limit=3):
        assert is_reedy_fibration(cat.nerve_functor(F)).is_true


def test_identity_reedy_and_levelwise():
    f = bisimp.identity(cat.nerve(cat.make_ordinal(1)))
    assert is_reedy_fibration(f).is_true
    assert is_levelwise_we(f).is_true


def test_arrow_to_point_is_not_levelwise():
    f = cat.nerve_functor(cat.to_terminal(cat.make_ordinal(1)))
    v = is_levelwise_we(f)
    assert v.is_false
    assert f.source.count((1, 0)) == 3 and f.target.count((1, 0)) == 1


# -- pushout-products -------------------------------------------------------------

def test_pushout_product_of_empty_maps():
    A, B = make_F(1, B2), make_F(2, B2)
    f = pushout_product(bisimp.from_empty(A), bisimp.from_empty(B))
    assert f.source.is_empty()
    assert f.target.counts == ssets._core.product(A, B).counts


def test_boundary_pushout_product_is_the_generator_derived():
    f = pushout_product(bisimp.cat_inclusion("boundary", 1), bisimp.space_inclusion("boundary", 1))
    # a cell (a, b) lies in the corner iff a misses a vertex or b misses a vertex
    for m in range(4):
        for n in range(4):
            total = len(words(1, m)) * len(words(1, n))
            inner = sum(1 for a in words(1, m) for b in words(1, n) if set(a) == {0, 1} and set(b) == {0, 1})
            assert f.target.count((m, n)) == total
            assert f.source.count((m, n)) == total - inner
    assert f.is_injective()


def test_vertex_corner_matches_inclusion_exclusion():
    v = bisimp.yoneda(cat.nerve_I(1, B2), 0, 0, 0)
    g = bisimp.space_inclusion("boundary", 1, B2)
    pp = pushout_product(v, g)
    BC = ssets._core.product(v.target, g.source)
    AD = ssets._core.product(v.source, g.target)
    AC = ssets._core.product(v.source, g.source)
    for d in pp.source.degrees():
        assert pp.source.count(d) == BC.count(d) + AD.count(d) - AC.count(d)


# -- properties -------------------------------------------------------------------

small_spaces = st.sampled_from([
    lambda: cat.nerve(cat.make_I(1), B2), lambda: cat.nerve(cat.make_ordinal(1), B2),
    lambda: make_F(1, B2), lambda: cosk0(ssets.make_standard(1, 2), 2),
    lambda: bisimp.make_Delta_space(1, B2), lambda: make_Sp(2, B2),
])


@settings(max_examples=10, deadline=None)
@given(make=small_spaces, m=st.integers(0, 2))
def test_yoneda_counts_on_small_objects(make, m):
    X = make()
    res = mapping_space(make_F(m, B2), X)
    assert [res.space.count((n,)) for n in range(3)] == [X.count((m, n)) for n in range(3)]


@settings(max_examples=8, deadline=None)
@given(make=small_spaces)
def test_R_is_idempotent_and_level_zero_discrete(make):
    X = make()
    R = reduce_R(X)
    assert R.level(0).nondegenerate_profile()[1:] == (0,) * X.space_trunc
    RR = reduce_R(R)
    assert RR.counts == R.counts


@settings(max_examples=6, deadline=None)
@given(make=small_spaces, K=st.sampled_from([ssets.make_standard(1, 2), ssets.make_boundary(1, 2)]))
def test_cosk0_adjunction_bijection(make, K):
    X = make()
    into_cosk = search_maps(X, cosk0(K, 2)).solutions
    on_level_zero = search_maps(X.level(0), K).solutions
    assert len(into_cosk) == len(on_level_zero)


@settings(max_examples=6, deadline=None)
@given(pair=st.sampled_from([(cat.make_ordinal(1), cat.terminal()), (cat.make_I(1), cat.make_I(1)),
                             (cat.cyclic_group(2), cat.terminal())]), m=st.integers(0, 3))
def test_matching_maps_between_nerves_are_discrete(pair, m):
    C, D = pair
    F = next(iter(cat.enumerate_functors(C, D, limit=1)))
    g = relative_matching_map(cat.nerve_functor(F), m)
    for side in (g.source, g.target):
        assert side.nondegenerate_profile()[1:] == (0,) * (side.trunc_dim)


def test_spaces_satisfy_identities():
    for X in (cosk0(ssets.make_horn(2, 0, 2), 3), make_Sp(3), reduce_R(cosk0(ssets.make_standard(1, 2), 2)),
              pushout_product(bisimp.cat_inclusion("spine", 2), bisimp.space_inclusion("horn", 1, k=0)).source):
        assert X.identity_errors() == []
    assert np.all(cosk0(ssets.make_standard(1, 2), 2).face((1, 0), 0, 0) >= 0)
