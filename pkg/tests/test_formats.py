import pytest
from hypothesis import given, settings, strategies as st

from segal_lab import bisimp, cat, corpus, formats, ssets
from segal_lab.formats import FormatError, parse, serialize

CORPUS = corpus.builtin()


def mutate(text, old, new, count=1):
    assert old in text
    return text.replace(old, new, count)


def line_of(text, needle):
    for i, raw in enumerate(text.splitlines(), 1):
        if needle in raw:
            return i
    raise AssertionError(needle)


# -- round trips -------------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(CORPUS.categories))
def test_cat_round_trip(name):
    C = CORPUS.categories[name]
    D = parse(serialize(C))
    assert cat.find_isomorphism(D, C) is not None
    assert serialize(D) == serialize(C)


@pytest.mark.parametrize("name", sorted(CORPUS.kan))
def test_ssx_round_trip(name):
    K = CORPUS.kan[name]
    L = parse(serialize(K))
    assert L.counts == K.counts
    assert serialize(L) == serialize(K)


def test_ssxmap_round_trip():
    for name, p in CORPUS.kan_fibrations.items():
        q = parse(serialize(p))
        assert q.source.counts == p.source.counts
        assert serialize(q) == serialize(p)


@pytest.mark.parametrize("name", sorted(CORPUS.non_segal))
def test_bsx_round_trip(name):
    X = CORPUS.non_segal[name]
    Y = parse(serialize(X))
    assert Y.counts == X.counts
    assert serialize(Y) == serialize(X)


def test_nerve_round_trip_keeps_flags():
    X = cat.nerve(cat.cyclic_group(2))
    Y = parse(serialize(X))
    assert Y.coskeletal_from == X.coskeletal_from
    assert Y.counts == X.counts


def test_bsxmap_round_trip():
    f = cat.nerve_functor(cat.to_terminal(cat.make_ordinal(1)), (2, 2))
    g = parse(serialize(f))
    assert g == f
    assert serialize(g) == serialize(f)


def test_content_hash_is_stable():
    C = cat.make_ordinal(2)
    assert formats.content_hash(C) == formats.content_hash(serialize(C))
    assert formats.content_hash(C) != formats.content_hash(cat.make_ordinal(1))


def test_dump_and_load(tmp_path):
    K = ssets.make_horn(2, 1, 2)
    path = tmp_path / "horn.ssx"
    formats.dump(K, path)
    assert formats.load(path).counts == K.counts


# -- errors with line numbers ------------------------------------------------------------

def test_unknown_format():
    with pytest.raises(FormatError) as err:
        parse("bogus 1\n")
    assert err.value.line == 1


def test_empty_input():
    with pytest.raises(FormatError):
        parse("# nothing\n\n")


def test_face_out_of_range_is_localized():
    text = serialize(ssets.make_standard(1, 1))
    bad = mutate(text, "d 1 1 1 -> 0", "d 1 1 1 -> 7")
    with pytest.raises(FormatError) as err:
        parse(bad)
    assert err.value.line == line_of(bad, "d 1 1 1 -> 7")


def test_simplicial_identity_violation_is_reported():
    text = serialize(ssets.make_standard(1, 1))
    bad = mutate(text, "s 0 1 0 -> 2", "s 0 1 0 -> 0")
    with pytest.raises(FormatError) as err:
        parse(bad)
    assert err.value.line > 0


def test_non_integer_token():
    text = serialize(ssets.make_standard(1, 1))
    bad = mutate(text, "dim 1: 3", "dim 1: three")
    with pytest.raises(FormatError) as err:
        parse(bad)
    assert err.value.line == line_of(bad, "three")


def test_missing_composite_is_reported():
    text = serialize(cat.cyclic_group(3))
    lines = text.splitlines()
    comps = [i for i, s in enumerate(lines) if s.startswith("comp")]
    assert comps
    del lines[comps[0]]
    with pytest.raises(FormatError) as err:
        parse("\n".join(lines) + "\n")
    assert "composition" in err.value.message


def test_undeclared_object_in_cat():
    text = serialize(cat.make_ordinal(1))
    bad = mutate(text, ": 0 -> 1", ": 0 -> 9")
    with pytest.raises(FormatError) as err:
        parse(bad)
    assert err.value.line == line_of(bad, "0 -> 9")


def test_map_that_is_not_natural():
    f = cat.nerve_functor(cat.identity_functor(cat.make_ordinal(1)), (2, 2))
    lines = serialize(f).splitlines()
    # the last component line belongs to the map itself: send its top cell to a vertex
    idx = max(i for i, s in enumerate(lines) if s.strip().startswith("at "))
    lines[idx] = lines[idx].rsplit("->", 1)[0] + "-> 0"
    with pytest.raises(FormatError):
        parse("\n".join(lines) + "\n")


# -- properties ---------------------------------------------------------------------

@settings(max_examples=20, deadline=None)
@given(n=st.integers(0, 3), trunc=st.integers(1, 3))
def test_standard_simplex_round_trip(n, trunc):
    K = ssets.make_standard(n, trunc)
    L = parse(serialize(K))
    assert L.counts == K.counts
    assert L.identity_errors() == []


@settings(max_examples=10, deadline=None)
@given(m=st.integers(0, 2), which=st.sampled_from(["F", "dF", "Sp"]))
def test_generator_spaces_round_trip(m, which):
    make = {"F": bisimp.make_F, "dF": bisimp.make_dF, "Sp": bisimp.make_Sp}[which]
    if which == "Sp" and m == 0:
        m = 1
    X = make(m, (2, 2))
    Y = parse(serialize(X))
    assert Y.counts == X.counts
    assert serialize(Y) == serialize(X)
