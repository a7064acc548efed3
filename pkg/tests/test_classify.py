import pytest
from hypothesis import given, settings, strategies as st

from segal_lab import bisimp, cat, classify, corpus, segal
from segal_lab.classify import (
    classify_trivial_fibration_equivalences, enumerate_generators, factorize, is_I_cofibration,
    is_I_fibration, is_J_fibration_fibrant, path_object, vertex_into_NI1,
)

CORPUS = corpus.builtin()
B = (2, 2)


def nerve_map(e, bounds=None):
    return cat.nerve_functor(e.functor, bounds)


def tagged(tag):
    return [e for e in CORPUS.functors if tag in e.tags]


# -- generating sets ----------------------------------------------------------------

def expected_I_count(M, N):
    boundary = sum(1 for m in range(M + 1) for n in range(N + 1) if m >= 1 or n == 0)
    horns = sum(n + 1 for n in range(N + 1))
    return boundary + horns


def expected_J0_count(M, N):
    horns = sum(n + 1 for m in range(M + 1) for n in range(1, N + 1))
    spines = sum(1 for m in range(2, M + 1) for n in range(N + 1))
    return horns + spines


@pytest.mark.parametrize("M,N", [(0, 0), (1, 1), (2, 1), (2, 2)])
def test_generator_counts(M, N):
    assert len(enumerate_generators("I", M, N, B)) == expected_I_count(M, N)
    assert len(enumerate_generators("J0", M, N, B)) == expected_J0_count(M, N)
    assert len(enumerate_generators("J", M, N, B)) == expected_J0_count(M, N) + 2


def test_generator_counts_frozen():
    # frozen from the counting formulas above
    assert expected_I_count(1, 1) == 6
    assert expected_J0_count(2, 2) == 18


def test_generators_beyond_bounds_are_rejected():
    with pytest.raises(ValueError):
        enumerate_generators("I", 3, 3, B)
    with pytest.raises(ValueError):
        enumerate_generators("K", 1, 1, B)


def test_generators_are_injective():
    for name in ("I", "J"):
        for label, f in enumerate_generators(name, 2, 2, B):
            assert f.is_injective(), label


# -- I-cofibrations ------------------------------------------------------------------

def test_I_generators_are_I_cofibrations():
    for label, f in enumerate_generators("I", 1, 1, B):
        assert is_I_cofibration(f).is_true, label


def test_collapse_is_not_an_I_cofibration():
    f = cat.nerve_functor(cat.to_terminal(cat.make_I(1)), B)
    v = is_I_cofibration(f)
    assert v.is_false
    assert v.witness is not None


# -- I-fibrations ---------------------------------------------------------------------

@pytest.mark.parametrize("e", tagged("ff_surjective"), ids=lambda e: e.name)
def test_ff_surjective_functors_are_I_fibrations(e):
    assert is_I_fibration(nerve_map(e)).is_true


@pytest.mark.parametrize("name", ["[1]->[0]", "[0]->I[1]", "disc2->[1]", "BZ2->[0]"])
def test_not_I_fibrations(name):
    e = next(e for e in CORPUS.functors if e.name == name)
    assert is_I_fibration(nerve_map(e)).is_false


@pytest.mark.parametrize("j", [0, 1])
def test_vertex_into_I1_is_cofibration_not_trivial_fibration(j):
    f = vertex_into_NI1(j, B)
    assert is_I_cofibration(f).is_true
    assert is_I_fibration(f).is_false


# -- J-fibrations between Segal spaces --------------------------------------------------

@pytest.mark.parametrize("e", tagged("isofibration"), ids=lambda e: e.name)
def test_isofibrations_are_J_fibrations(e):
    v = is_J_fibration_fibrant(nerve_map(e))
    assert v.is_true
    parts = dict(v.details)
    assert set(parts) == {"reedy", "ho_isofibration", "lifting"}
    assert all(p.is_true for p in parts.values())


@pytest.mark.parametrize("name", ["[0]->BZ2", "[0]->I[1]", "BZ2->BS3"])
def test_non_isofibrations_fail(name):
    e = next(e for e in CORPUS.functors if e.name == name)
    assert not cat.is_isofibration_cat(e.functor).is_true
    assert is_J_fibration_fibrant(nerve_map(e)).is_false


# -- trivial fibration trichotomy ------------------------------------------------------

@pytest.mark.parametrize("e", CORPUS.functors, ids=lambda e: e.name)
def test_trichotomy_agrees_on_functors(e):
    out = classify_trivial_fibration_equivalences(nerve_map(e))
    statuses = {v.status for v in out.values()}
    assert len(statuses) == 1
    assert out["i"].conclusive
    expected = "ff_surjective" in e.tags
    assert out["i"].is_true == expected


def test_trichotomy_unknown_for_non_segal_ends():
    X = CORPUS.non_segal["dF[2]"]
    out = classify_trivial_fibration_equivalences(bisimp.identity(X))
    assert all(v.is_unknown for v in out.values())


# -- factorization -------------------------------------------------------------------

def test_factor_empty_into_point():
    f = bisimp.from_empty(bisimp.make_F(0, (1, 1)))
    cert = factorize(f, "I", max_stages=4)
    assert isinstance(cert, classify.FactorizationCertificate)
    assert cert.composite_ok(f)
    assert is_I_cofibration(cert.left).is_true
    assert is_I_fibration(cert.right).is_true


@pytest.mark.parametrize("bounds", [(1, 1), (2, 2)])
def test_factor_arrow_to_point(bounds):
    f = cat.nerve_functor(cat.to_terminal(cat.make_ordinal(1)), bounds)
    cert = factorize(f, "I", max_stages=4)
    assert cert.composite_ok(f)
    assert cert.right_verdicts["lifting"].is_true
    assert is_I_cofibration(cert.left).is_true
    # higher horns lie outside the truncation, so the right map is never refuted
    assert not is_I_fibration(cert.right).is_false


def test_factor_stage_budget_gives_partial_tower():
    f = cat.nerve_functor(cat.to_terminal(cat.make_ordinal(1)), (1, 1))
    out = factorize(f, "I", max_stages=0)
    assert isinstance(out, classify.PartialTower)
    assert out.reason


# -- path objects --------------------------------------------------------------------

@pytest.mark.parametrize("name", ["[0]", "[1]", "I[1]", "BZ2"])
def test_path_object_of_nerves(name):
    po = path_object(cat.nerve(CORPUS.categories[name]))
    assert po.w_verdict.is_true
    assert po.p_verdict.is_true
    assert po.w.compose(po.p) is not None


def test_path_object_refuses_non_nerves():
    assert path_object(bisimp.make_F(1)).is_unknown


# -- properties -------------------------------------------------------------------

@settings(max_examples=12, deadline=None)
@given(e=st.sampled_from(CORPUS.functors))
def test_trivial_fibrations_are_fibrations_and_equivalences(e):
    f = nerve_map(e)
    if is_I_fibration(f).is_true:
        assert is_J_fibration_fibrant(f).is_true
        assert segal.dk_equivalence(f, "all").is_true


@settings(max_examples=12, deadline=None)
@given(e=st.sampled_from(CORPUS.functors))
def test_J_fibration_matches_isofibration_of_functors(e):
    assert is_J_fibration_fibrant(nerve_map(e)).is_true == cat.is_isofibration_cat(e.functor).is_true
