import json

import pytest

from segal_lab import cat, corpus, formats, segal
from segal_lab.corpus import CorpusError


@pytest.fixture(scope="module")
def builtin():
    return corpus.builtin()


@pytest.fixture(scope="module")
def written(builtin, tmp_path_factory):
    return corpus.write(builtin, tmp_path_factory.mktemp("corpus"))


def test_builtin_has_the_required_kinds(builtin):
    assert len(builtin.categories) >= 10
    assert len(builtin.functors) >= 15
    assert builtin.kan and builtin.kan_fibrations and builtin.non_segal
    assert builtin.cospans and builtin.negative_cospans and builtin.fixtures
    assert builtin.errors == []


def test_every_corpus_space_is_segal(builtin):
    for name, X in builtin.segal_spaces().items():
        assert segal.segal_check(X).is_true, name


def test_non_segal_entries_are_not_segal(builtin):
    for name, X in builtin.non_segal.items():
        assert segal.segal_check(X).is_false, name


def test_write_load_round_trip(builtin, written):
    loaded = corpus.load(written)
    assert loaded.errors == []
    assert set(loaded.categories) == set(builtin.categories)
    for name, C in builtin.categories.items():
        assert cat.find_isomorphism(loaded.categories[name], C) is not None
    assert [e.name for e in loaded.functors] == [e.name for e in builtin.functors]
    for a, b in zip(loaded.functors, builtin.functors):
        assert a.tags == b.tags and a.dk == b.dk
        assert (a.functor.source.n_morphisms, a.functor.target.n_morphisms) == \
            (b.functor.source.n_morphisms, b.functor.target.n_morphisms)
    assert set(loaded.kan) == set(builtin.kan)
    assert set(loaded.non_segal) == set(builtin.non_segal)
    assert len(loaded.cospans) == len(builtin.cospans)


def test_manifest_is_deterministic(builtin, written, tmp_path):
    again = corpus.write(builtin, tmp_path / "again")
    assert (again / "manifest.json").read_text() == (written / "manifest.json").read_text()


def test_empty_directory_has_no_instances(tmp_path):
    with pytest.raises(CorpusError) as err:
        corpus.load(tmp_path)
    assert "no instances" in str(err.value)


def test_broken_manifest(tmp_path):
    (tmp_path / "manifest.json").write_text("{oops")
    with pytest.raises(CorpusError):
        corpus.load(tmp_path)


def test_faulty_entry_is_localized(builtin, tmp_path):
    root = corpus.write(builtin, tmp_path / "c")
    manifest = json.loads((root / "manifest.json").read_text())
    rel = manifest["categories"]["BZ3"]
    lines = (root / rel).read_text().splitlines()
    comp = next(i for i, s in enumerate(lines) if s.startswith("comp"))
    del lines[comp]
    (root / rel).write_text("\n".join(lines) + "\n")
    loaded = corpus.load(root)
    keys = [k for k, _ in loaded.errors]
    assert "category:BZ3" in keys
    msg = dict(loaded.errors)["category:BZ3"]
    assert rel in msg and "line" in msg
    # entries that depend on the broken category are reported, everything else loads
    assert "BZ3" not in loaded.categories
    assert len(loaded.categories) == len(builtin.categories) - 1
    assert all(k.startswith(("category:BZ3", "functor:")) for k in keys)


def test_missing_file_is_reported(builtin, tmp_path):
    root = corpus.write(builtin, tmp_path / "c")
    manifest = json.loads((root / "manifest.json").read_text())
    (root / manifest["kan"]["pt"]).unlink()
    loaded = corpus.load(root)
    assert ("kan:pt", f"missing file {manifest['kan']['pt']}") in loaded.errors


def test_wrong_kind_is_reported(builtin, tmp_path):
    root = corpus.write(builtin, tmp_path / "c")
    manifest = json.loads((root / "manifest.json").read_text())
    formats.dump(cat.terminal(), root / manifest["kan"]["pt"])
    loaded = corpus.load(root)
    assert any(k == "kan:pt" and "wrong kind" in m for k, m in loaded.errors)
