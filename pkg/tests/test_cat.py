import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from segal_lab import bisimp, cat, corpus
from segal_lab.cat import (
    categorify, find_isomorphism, functor_category, is_equivalence_cat, is_isofibration_cat,
    make_I, nerve, nerve_I,
)

CORPUS = corpus.builtin()


def iso_square_count(C):
    """Objects and morphisms of the category of isomorphisms of C, by brute force."""
    isos = [f for f in range(C.n_morphisms) if C.is_iso(f)]
    squares = 0
    for a in isos:
        for b in isos:
            for u in C.hom(int(C.src[a]), int(C.src[b])):
                for v in C.hom(int(C.tgt[a]), int(C.tgt[b])):
                    if C.table[b, u] == C.table[v, a]:
                        squares += 1
    return len(isos), squares


# -- nerves ---------------------------------------------------------------------

def test_nerve_of_terminal_is_F0():
    assert nerve(cat.terminal()).counts == bisimp.make_F(0).counts


def test_nerve_of_arrow_is_F1():
    assert nerve(cat.make_ordinal(1)).counts == bisimp.make_F(1).counts


def test_nerve_of_I1_level_two_derived():
    # functors [2] -> I[1] are all functions {0,1,2} -> {0,1}
    expected = len(list(itertools.product(range(2), repeat=3)))
    assert expected == 8
    assert nerve(make_I(1)).count((2, 0)) == expected


def test_nerve_I1_level_one_derived():
    expected = len(list(itertools.product(range(2), repeat=2)))
    assert nerve_I(1).count((1, 0)) == expected == 4


def test_nerve_is_two_coskeletal_and_discrete():
    X = nerve(cat.make_ordinal(2))
    assert X.coskeletal_from == 2
    assert X.is_space_discrete()


def test_nerve_of_relabeled_category_has_the_same_cells():
    C = cat.cyclic_group(3)
    D = corpus._stringify(C, "BZ3")
    X, Y = nerve(C), nerve(D)
    for d in X.degrees():
        assert X.count(d) == Y.count(d)
        assert np.array_equal(X.face(d, 0, 0) if d[0] else np.arange(1), Y.face(d, 0, 0) if d[0] else np.arange(1))


# -- categorify -----------------------------------------------------------------

def test_categorify_arrow():
    C = categorify(bisimp.make_F(1))
    assert find_isomorphism(C, cat.make_ordinal(1)) is not None


@pytest.mark.parametrize("name", sorted(CORPUS.categories))
def test_categorify_nerve_recovers_the_category(name):
    C = CORPUS.categories[name]
    D = categorify(cat.nerve_sset(C, 3))
    assert find_isomorphism(D, C) is not None


def paths_in_graph(n_vertices, edges):
    """Paths (including empty ones) in a finite acyclic graph: the free category."""
    count = 0
    frontier = [(v,) for v in range(n_vertices)]
    while frontier:
        count += len(frontier)
        frontier = [p + (b,) for p in frontier for a, b in edges if a == p[-1]]
    return count


def test_categorify_spine_is_free_derived():
    expected = paths_in_graph(3, [(0, 1), (1, 2)])
    assert expected == 6
    C = categorify(bisimp.make_Sp(2))
    assert (C.n_objects, C.n_morphisms) == (3, expected)
    assert find_isomorphism(C, cat.make_ordinal(2)) is not None


# -- I[m] -----------------------------------------------------------------------

def test_I0_is_terminal():
    assert find_isomorphism(make_I(0), cat.terminal()) is not None


def test_I1_has_four_morphisms():
    assert make_I(1).n_morphisms == 4


# -- functor properties -----------------------------------------------------------

def test_functor_to_terminal_is_isofibration():
    for C in CORPUS.categories.values():
        assert is_isofibration_cat(cat.to_terminal(C)).is_true


@pytest.mark.parametrize("n", [2, 3])
def test_point_into_group_is_not_isofibration_derived(n):
    G = cat.cyclic_group(n)
    F = cat.object_functor(G, 0)
    # every non-identity element is an iso out of F(*) with no preimage
    unliftable = [g for g in range(G.n_morphisms) if not G.is_identity(g)]
    assert len(unliftable) == n - 1
    assert is_isofibration_cat(F).is_false


def test_point_into_I1_is_equivalence_not_isofibration():
    F = cat.object_functor(make_I(1), 0)
    assert is_equivalence_cat(F).is_true
    assert is_isofibration_cat(F).is_false


# -- functor categories -----------------------------------------------------------

def test_exponent_point_is_identity():
    C = cat.cyclic_group(2)
    assert find_isomorphism(functor_category(C, cat.terminal()), C) is not None


def test_I1_to_the_I1_has_four_objects_derived():
    # functors out of an indiscrete category are arbitrary object functions
    expected = len(list(itertools.product(range(2), repeat=2)))
    assert functor_category(make_I(1), make_I(1)).n_objects == expected == 4


@pytest.mark.parametrize("name", ["[1]", "I[1]", "BZ2", "[2]", "disc2", "BZ3", "[1]x[1]"])
def test_exponential_by_I1_is_the_iso_category(name):
    C = CORPUS.categories[name]
    E = functor_category(C, make_I(1))
    assert (E.n_objects, E.n_morphisms) == iso_square_count(C)


# -- properties -------------------------------------------------------------------

corpus_categories = st.sampled_from(sorted(CORPUS.categories))


@settings(max_examples=15, deadline=None)
@given(name=corpus_categories)
def test_counit_of_nerve_is_an_isomorphism(name):
    C = CORPUS.categories[name]
    iso = find_isomorphism(categorify(cat.nerve_sset(C, 3)), C)
    assert iso is not None and iso.is_isomorphism()


@settings(max_examples=10, deadline=None)
@given(a=st.sampled_from(["[1]", "I[1]", "BZ2", "disc2", "[0]"]), b=st.sampled_from(["[1]", "I[1]", "BZ2", "[0]"]))
def test_nerve_preserves_products(a, b):
    C, D = CORPUS.categories[a], CORPUS.categories[b]
    lhs = nerve(cat.product_cat(C, D))
    rhs = bisimp._core.product(nerve(C), nerve(D))
    assert lhs.counts == rhs.counts


@settings(max_examples=10, deadline=None)
@given(idx=st.integers(0, len(CORPUS.functors) - 1))
def test_equivalence_invariant_under_isomorphism(idx):
    F = CORPUS.functors[idx].functor
    before = is_equivalence_cat(F)
    D = F.target
    perm = find_isomorphism(D, D)
    iso = cat.identity_functor(D) if perm is None else perm
    after = is_equivalence_cat(F.then(iso))
    assert before.status == after.status
    relabeled = corpus._stringify(F.source, "copy")
    G = cat.Functor(relabeled, D, F.obj_map, F.mor_map)
    assert is_equivalence_cat(G).status == before.status


def test_exponential_matches_internal_hom_on_small_categories():
    from segal_lab import segal
    b = (2, 2)
    for name in ("[0]", "[1]", "BZ2", "I[1]"):
        C = CORPUS.categories[name]
        H, exact, _ = bisimp.internal_hom(nerve_I(1, b), nerve(C, b))
        assert exact
        assert segal.nerve_like_isomorphism(nerve(functor_category(C, make_I(1)), b), H) is not None
