import itertools

import pytest
from hypothesis import given, settings, strategies as st

from segal_lab import bisimp, cat, corpus, segal, ssets
from segal_lab.cat import find_isomorphism
from segal_lab.segal import (
    DK_MODES, dk_equivalence, ho, ho_functor, ho_via_cR, hoeq_and_core, joyal_homotopy_category,
    mapping_object_space, segal_check,
)

CORPUS = corpus.builtin()
SPACES = CORPUS.segal_spaces()
MAPS = CORPUS.maps()


# -- segal_check ------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CORPUS.categories))
def test_nerves_are_segal(name):
    assert segal_check(SPACES[f"N{name}"]).is_true


@pytest.mark.parametrize("name", sorted(CORPUS.kan))
def test_cosk0_of_kan_complexes_is_segal(name):
    K = CORPUS.kan[name]
    X = bisimp.cosk0(K, 2)
    # the Segal map at level 2 is K^3 -> K^2 x_K K^2, a bijection
    n0 = K.count((0,))
    assert X.count((2, 0)) == n0 ** 3 == n0 ** 2 * n0 ** 2 // n0
    assert segal_check(X).is_true


@pytest.mark.parametrize("name", sorted(CORPUS.non_segal))
def test_hand_built_counterexamples_fail(name):
    v = segal_check(CORPUS.non_segal[name])
    assert v.is_false
    assert v.witness is not None


def test_spine_space_misses_composites():
    X = bisimp.make_Sp(2)
    # two composable edges but no nondegenerate 2-cell filling them
    col = X.column(0)
    assert len(col.nondegenerate((1,))) == 2
    assert len(col.nondegenerate((2,))) == 0
    assert segal_check(X).is_false


# -- mapping objects --------------------------------------------------------------

@pytest.mark.parametrize("name", ["[2]", "BZ3", "I[1]", "[1]x[1]"])
def test_mapping_object_of_nerve_is_hom_set(name):
    C = CORPUS.categories[name]
    X = SPACES[f"N{name}"]
    for x in range(C.n_objects):
        for y in range(C.n_objects):
            M = mapping_object_space(X, x, y)
            assert M.count((0,)) == len(C.hom(x, y))
            assert M.nondegenerate_profile()[1:] == (0,) * M.trunc_dim


def test_mapping_object_I1_is_a_point():
    M = mapping_object_space(cat.nerve_I(1), 0, 1)
    assert M.nondegenerate_profile() == (1, 0, 0, 0)


@pytest.mark.parametrize("name", sorted(CORPUS.kan))
def test_mapping_objects_of_cosk0_are_contractible_derived(name):
    K = CORPUS.kan[name]
    X = bisimp.cosk0(K, 2)
    n0 = K.count((0,))
    for x, y in itertools.product(range(n0), repeat=2):
        M = mapping_object_space(X, x, y)
        # fiber of K x K -> K0 x K0 over (x, y): a product of two contractible cones
        assert M.count((0,)) == 1
        assert ssets.contractibility(M).is_true


# -- homotopy categories --------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CORPUS.categories))
def test_ho_of_nerve_is_the_category(name):
    C = CORPUS.categories[name]
    X = SPACES[f"N{name}"]
    assert find_isomorphism(ho(X).category, C) is not None
    assert find_isomorphism(ho_via_cR(X), C) is not None


def test_ho_of_I1():
    X = cat.nerve_I(1)
    assert find_isomorphism(ho(X).category, cat.make_I(1)) is not None
    assert find_isomorphism(ho_via_cR(X), cat.make_I(1)) is not None


@pytest.mark.parametrize("name", sorted(CORPUS.kan))
def test_ho_of_cosk0_is_indiscrete_derived(name):
    K = CORPUS.kan[name]
    X = SPACES[f"cosk0({name})"]
    n0 = K.count((0,))
    chaotic = cat.indiscrete(range(n0))
    h = ho(X).category
    assert h.n_morphisms == n0 * n0
    assert find_isomorphism(h, chaotic) is not None
    assert find_isomorphism(ho_via_cR(X), h) is not None


def test_ho_of_cosk0_of_group_nerve_matches_both_pipelines():
    X = SPACES["cosk0(NBZ2)"]
    assert find_isomorphism(ho(X).category, cat.terminal()) is not None
    assert find_isomorphism(ho_via_cR(X), ho(X).category) is not None


@pytest.mark.parametrize("name", sorted(SPACES))
def test_joyal_relation_gives_the_same_category(name):
    X = SPACES[name]
    assert find_isomorphism(joyal_homotopy_category(X).category, ho(X).category) is not None


# -- cores ------------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CORPUS.categories))
def test_core_of_nerve_is_nerve_of_core(name):
    C = CORPUS.categories[name]
    X = SPACES[f"N{name}"]
    res = hoeq_and_core(X)
    assert res.hoeq.count((0,)) == len(C.isos())
    G = cat.core(C)[0]
    assert find_isomorphism(cat.categorify(cat.pi0_levelwise(res.core)), G) is not None
    assert res.core.counts == cat.nerve(G).counts


def test_core_of_I1_is_everything():
    X = cat.nerve_I(1)
    assert hoeq_and_core(X).core.counts == X.counts


def test_core_of_arrow_is_two_points():
    res = hoeq_and_core(cat.nerve(cat.make_ordinal(1)))
    assert res.core.counts == bisimp.make_dF(1).counts


# -- Dwyer-Kan equivalences ---------------------------------------------------------

@pytest.mark.parametrize("j", [0, 1])
def test_vertex_into_I1_is_dk(j):
    f = bisimp.yoneda(cat.nerve_I(1), 0, 0, j)
    for mode in DK_MODES:
        assert dk_equivalence(f, mode).is_true


def test_non_full_inclusion_is_not_dk():
    entries = [e for e in CORPUS.functors if "non_full" in e.tags]
    assert entries
    for e in entries:
        v = dk_equivalence(cat.nerve_functor(e.functor), "all")
        assert v.is_false


def test_identity_is_dk():
    X = SPACES["NBZ3"]
    assert dk_equivalence(bisimp.identity(X), "all").is_true


@pytest.mark.parametrize("idx", range(len(MAPS)))
def test_modes_agree_and_match_expectations(idx):
    name, f, expected = MAPS[idx]
    verdicts = [dk_equivalence(f, m) for m in DK_MODES]
    assert all(v.conclusive for v in verdicts)
    assert len({v.status for v in verdicts}) == 1
    if expected is not None:
        assert verdicts[0].is_true == expected


# -- properties -------------------------------------------------------------------

functor_maps = [(e.name, e.functor) for e in CORPUS.functors]


@settings(max_examples=15, deadline=None)
@given(i=st.integers(0, len(functor_maps) - 1), j=st.integers(0, len(functor_maps) - 1))
def test_ho_is_functorial(i, j):
    (_, F), (_, G) = functor_maps[i], functor_maps[j]
    if F.target is not G.source:
        G = cat.identity_functor(F.target)
    f, g = cat.nerve_functor(F), cat.nerve_functor(G)
    gf = f.compose(g)
    hf, hg, hgf = ho_functor(f), ho_functor(g), ho_functor(gf)
    assert hf.then(hg) == hgf


@settings(max_examples=10, deadline=None)
@given(idx=st.integers(0, len(MAPS) - 1))
def test_reedy_trivial_fibrations_are_dk(idx):
    _, f, _ = MAPS[idx]
    reedy = bisimp.is_reedy_fibration(f)
    if reedy.is_true and all(ssets.is_trivial_fibration(bisimp.relative_matching_map(f, m)).is_true
                             for m in range(f.source.cat_trunc + 1)):
        assert dk_equivalence(f, "all").is_true


@settings(max_examples=10, deadline=None)
@given(name=st.sampled_from(sorted(SPACES)))
def test_ho_agrees_with_cR(name):
    X = SPACES[name]
    assert find_isomorphism(ho(X).category, ho_via_cR(X)) is not None
