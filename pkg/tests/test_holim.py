import pytest
from hypothesis import given, settings, strategies as st

from segal_lab import bisimp, cat, corpus, segal
from segal_lab.cat import find_isomorphism
from segal_lab.holim import (
    Diagram, HolimRefused, bousfield_kan_holim, check_IR_counit, cospan_diagram, homotopy_pullback,
    iso_comma_oracle, strict_to_holim, strict_to_iso_comma,
)

CORPUS = corpus.builtin()
FUNCTORS = {e.name: e.functor for e in CORPUS.functors}


def iso_comma_counts(F, G):
    """Objects and morphisms of the iso-comma, read off the arrow category E^{I[1]}."""
    C, D, E = F.source, G.source, F.target
    A = cat.functor_category(E, cat.make_I(1))
    ends = [(P.on_object(0), P.on_object(1)) for P in A.functors]
    objs = [(c, d, a) for c in range(C.n_objects) for d in range(D.n_objects)
            for a in range(A.n_objects) if ends[a] == (F.on_object(c), G.on_object(d))]
    n_mor = 0
    for c, d, a in objs:
        for c2, d2, b in objs:
            for u in C.hom(c, c2):
                for v in D.hom(d, d2):
                    n_mor += sum(1 for (s, t, alpha) in A.morphisms
                                 if (s, t) == (a, b) and tuple(alpha) == (F(u), G(v)))
    return len(objs), n_mor


def point_into(C, x):
    return cat.object_functor(C, x)


# -- iso-comma -------------------------------------------------------------------------

CASES = [
    ("[0]->I[1]", "[0]->I[1]"),
    ("I[1]->[0]", "I[1]->[0]"),
    ("[0]->BZ2", "[0]->BZ2"),
    ("BZ2->[0]", "[1]->[0]"),
    ("[1]->[2]", "[1]->[2]"),
]


@pytest.mark.parametrize("f,g", CASES)
def test_iso_comma_matches_arrow_category(f, g):
    F, G = FUNCTORS[f], FUNCTORS[g]
    Q = iso_comma_oracle(F, G)
    assert (Q.n_objects, Q.n_morphisms) == iso_comma_counts(F, G)


def test_iso_comma_of_group_points_derived():
    # objects: the two elements of Z/2; morphisms: pairs (u, v) with phi' = v phi u^-1
    F = FUNCTORS["[0]->BZ2"]
    assert iso_comma_counts(F, F) == (2, 2)
    Q = iso_comma_oracle(F, F)
    assert (Q.n_objects, Q.n_morphisms) == (2, 2)


def test_strict_pullback_maps_into_iso_comma():
    F = point_into(cat.make_I(1), 0)
    G = point_into(cat.make_I(1), 1)
    P, _, _ = cat.pullback_cat(F, G)
    assert P.n_objects == 0
    assert iso_comma_oracle(F, G).n_objects == 1
    F = FUNCTORS["I[1]->[0]"]
    phi = strict_to_iso_comma(F, F)
    assert cat.is_equivalence_cat(phi).is_true


def test_pullback_of_identities_is_the_category():
    C = CORPUS.categories["BS3"]
    idC = cat.identity_functor(C)
    P, _, _ = cat.pullback_cat(idC, idC)
    assert find_isomorphism(P, C) is not None
    assert cat.is_equivalence_cat(strict_to_iso_comma(idC, idC)).is_true


# -- Bousfield-Kan homotopy limits --------------------------------------------------------

@pytest.mark.parametrize("name", ["[1]", "BZ2", "I[1]"])
def test_holim_over_a_point_is_the_object(name):
    C = CORPUS.categories[name]
    D = Diagram.of_functors(cat.terminal(), [C], {})
    res = bousfield_kan_holim(D)
    assert find_isomorphism(res.category, C) is not None
    assert res.comparison is None


@pytest.mark.parametrize("f,g", CASES)
def test_cospan_holim_is_the_iso_comma(f, g):
    D = cospan_diagram(FUNCTORS[f], FUNCTORS[g])
    res = bousfield_kan_holim(D)
    assert res.comparison_verdict.is_true
    assert segal.segal_check(res.space).is_true


def test_disjoint_points_have_nonempty_holim():
    F = point_into(cat.make_I(1), 0)
    G = point_into(cat.make_I(1), 1)
    res = bousfield_kan_holim(cospan_diagram(F, G))
    assert res.category.n_objects >= 1
    assert res.comparison_verdict.is_true


@pytest.mark.parametrize("f", ["I[1]->[0]", "[1]xI[1]->[1]", "BZ2->[0]"])
def test_strict_pullback_along_isofibration_is_the_holim(f):
    F = FUNCTORS[f]
    D = cospan_diagram(F, F)
    res = bousfield_kan_holim(D)
    s = strict_to_holim(D, res.category)
    assert segal.dk_equivalence(cat.nerve_functor(s), "i").is_true


def test_diagram_rejects_mismatched_maps():
    F = FUNCTORS["[1]->[0]"]
    shape = cat.make_ordinal(1)
    with pytest.raises(ValueError):
        Diagram.of_functors(shape, [cat.terminal(), F.source], {1: F})


# -- homotopy pullback along isofibrations ------------------------------------------------

@pytest.mark.parametrize("f,g", [("I[1]->[0]", "BZ2->[0]"), ("[1]xI[1]->[1]", "[2]->[1]"), ("BZ2->[0]", "[1]->[0]")])
def test_homotopy_pullback_is_segal(f, g):
    F, G = FUNCTORS[f], FUNCTORS[g]
    hp = homotopy_pullback(cat.nerve_functor(F), cat.nerve_functor(G))
    assert segal.segal_check(hp.space).is_true
    P, _, _ = cat.pullback_cat(F, G)
    assert find_isomorphism(segal.ho(hp.space).category, P) is not None


def test_pullback_rejects_legs_with_different_targets():
    F, G = FUNCTORS["[1]xI[1]->[1]"], FUNCTORS["[1]->[2]"]
    with pytest.raises(ValueError):
        bisimp.pullback(cat.nerve_functor(F), cat.nerve_functor(G))


def test_homotopy_pullback_refuses_non_isofibrations():
    F = FUNCTORS["[0]->BZ2"]
    with pytest.raises(HolimRefused) as err:
        homotopy_pullback(cat.nerve_functor(F), cat.nerve_functor(F))
    assert err.value.verdict.is_false


# -- counit of the reduction ------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CORPUS.segal_spaces()))
def test_counit_is_dk(name):
    X = CORPUS.segal_spaces()[name]
    assert check_IR_counit(X).is_true


def test_counit_unknown_off_segal_spaces():
    assert check_IR_counit(CORPUS.non_segal["Sp[2]"]).is_unknown


# -- properties -------------------------------------------------------------------

isofibrations = [e for e in CORPUS.functors if "isofibration" in e.tags]


@settings(max_examples=10, deadline=None)
@given(e=st.sampled_from(isofibrations))
def test_pullback_along_identity_changes_nothing(e):
    F = e.functor
    P, p1, _ = cat.pullback_cat(F, cat.identity_functor(F.target))
    assert p1.is_isomorphism()


@settings(max_examples=10, deadline=None)
@given(e=st.sampled_from(isofibrations))
def test_iso_comma_of_isofibration_is_equivalent_to_strict(e):
    F = e.functor
    G = cat.identity_functor(F.target)
    assert cat.is_equivalence_cat(strict_to_iso_comma(F, G)).is_true
