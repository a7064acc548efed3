import io
import json
import subprocess
import sys

import pytest

from segal_lab import bisimp, cat, corpus, formats, segal
from segal_lab.cli import run


def call(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), environ=env or {}, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def machine(*argv, env=None):
    code, out, err = call("--machine", *argv, env=env)
    return code, json.loads(out) if out.strip() else None, err


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


# -- build -----------------------------------------------------------------------

def test_build_writes_a_loadable_file(workdir):
    code, out, _ = call("build", "nerve", "I", "1", "-o", "ni1.bsx")
    assert code == 0 and "ni1.bsx" in out
    X = formats.load(workdir / "ni1.bsx")
    assert X.counts == cat.nerve_I(1).counts


def test_build_to_stdout_is_parseable():
    code, out, err = call("build", "F", "2")
    assert code == 0
    assert formats.parse(out).counts == bisimp.make_F(2).counts
    assert "build F" in err


def test_build_nerve_from_cat_file(workdir):
    formats.dump(cat.cyclic_group(3), workdir / "z3.cat")
    code, _, _ = call("build", "nerve", "z3.cat", "-o", "nz3.bsx")
    assert code == 0
    assert formats.load(workdir / "nz3.bsx").coskeletal_from == 2


# -- check exit codes --------------------------------------------------------------

def test_segal_true_false_and_input_error(workdir):
    call("build", "nerve", "I", "1", "-o", "ni1.bsx")
    call("build", "dF", "2", "-o", "df2.bsx")
    assert call("check", "segal", "ni1.bsx")[0] == 0
    assert call("check", "segal", "df2.bsx")[0] == 1
    code, _, err = call("check", "segal", "missing.bsx")
    assert code == 3 and "input error" in err


def test_malformed_file_gives_line_number(workdir):
    (workdir / "bad.bsx").write_text("bsx 1\nname X\nbounds 2 x\n")
    code, _, err = call("check", "segal", "bad.bsx")
    assert code == 3
    assert "line 3" in err and "bad.bsx" in err


def test_unknown_below_the_truncation_exits_2(workdir):
    # dF[3] fails the Segal condition only in categorical degree 3
    call("build", "dF", "3", "--bounds", "2", "2", "-o", "low.bsx")
    call("build", "dF", "3", "-o", "high.bsx")
    code, report, _ = machine("check", "segal", "low.bsx")
    assert code == 2
    assert report["records"][0]["verdict"] == "unknown"
    assert call("check", "segal", "high.bsx")[0] == 1


def test_dk_all_modes_agree(workdir):
    formats.dump(cat.nerve_functor(cat.object_functor(cat.make_I(1), 0)), workdir / "v.bsxmap")
    code, report, _ = machine("check", "dk", "v.bsxmap", "--mode", "all")
    assert code == 0
    verdicts = {r["operation"]: r["verdict"] for r in report["records"]}
    assert set(verdicts.values()) == {"true"}
    assert len(report["records"]) == 5


def test_classify_reports_three_criteria(workdir):
    F = cat.to_terminal(cat.make_I(1))
    formats.dump(cat.nerve_functor(F), workdir / "f.bsxmap")
    code, report, _ = machine("check", "classify", "f.bsxmap")
    assert code == 0
    verdicts = {r["operation"]: r["verdict"] for r in report["records"]}
    assert [verdicts[f"trivial fibration ({k})"] for k in ("i", "ii", "iii")] == ["true"] * 3
    # collapsing the two objects is a trivial fibration but not a cofibration
    assert verdicts["i-cof"] == "false"


# -- machine reports ---------------------------------------------------------------

def test_machine_output_is_deterministic(workdir):
    call("build", "nerve", "ord", "2", "-o", "n2.bsx")
    first = call("--machine", "check", "ho", "n2.bsx")[1]
    second = call("check", "ho", "n2.bsx", "--machine")[1]
    assert first == second
    assert "seconds" not in first
    timed = call("--machine", "--timings", "check", "ho", "n2.bsx")[1]
    assert "seconds" in timed


def test_env_budgets_are_validated(workdir):
    call("build", "nerve", "I", "1", "-o", "ni1.bsx")
    code, _, err = call("check", "segal", "ni1.bsx", env={"SEGAL_LAB_BUDGETS": "speed=3"})
    assert code == 3 and "SEGAL_LAB_BUDGETS" in err


# -- generators, factorize, holim ------------------------------------------------------

def test_generators_lists_the_set(workdir):
    code, report, _ = machine("generators", "--set", "I", "--max-m", "1", "--max-n", "1")
    assert code == 0
    assert report["aggregates"]["count"] == 6


def test_factorize_writes_both_maps(workdir):
    formats.dump(cat.nerve_functor(cat.to_terminal(cat.make_ordinal(1)), (2, 2)), workdir / "f.bsxmap")
    code, _, _ = call("check", "factorize", "f.bsxmap", "--set", "I", "-o", "fac")
    assert code in (0, 2)
    produced = sorted(p.name for p in workdir.iterdir() if p.name.startswith("fac"))
    assert len(produced) >= 2


def test_holim_manifest(workdir):
    formats.dump(cat.make_ordinal(1), workdir / "shape.cat")
    formats.dump(cat.cyclic_group(2), workdir / "bz2.cat")
    formats.dump(cat.terminal(), workdir / "pt.cat")
    shape, C, T = (formats.load(workdir / f) for f in ("shape.cat", "bz2.cat", "pt.cat"))
    manifest = {
        "shape": "shape.cat",
        "objects": {shape.objects[0]: "bz2.cat", shape.objects[1]: "pt.cat"},
        "arrows": {shape.morphisms[1]: {"objects": {C.objects[0]: T.objects[0]},
                                       "morphisms": {g: T.morphisms[0] for g in C.morphisms}}},
    }
    (workdir / "d.json").write_text(json.dumps(manifest))
    code, report, err = machine("holim", "d.json", "-o", "h.bsx")
    assert code == 0, err
    # a limit over [1] is the value at the initial object
    H = formats.load(workdir / "h.bsx")
    assert cat.find_isomorphism(segal.ho(H).category, C) is not None


# -- suite ------------------------------------------------------------------------

def test_suite_on_empty_corpus(workdir):
    code, _, err = call("suite", str(workdir))
    assert code == 3
    assert "no instances" in err


def test_suite_localizes_a_faulty_comp_table(workdir):
    root = corpus.write(corpus.builtin(), workdir / "c")
    manifest = json.loads((root / "manifest.json").read_text())
    rel = manifest["categories"]["BZ3"]
    lines = (root / rel).read_text().splitlines()
    del lines[next(i for i, s in enumerate(lines) if s.startswith("comp"))]
    (root / rel).write_text("\n".join(lines) + "\n")
    code, out, _ = call("suite", str(root), "--only", "1")
    assert code == 1
    assert f"{rel}: line" in out
    assert "composition table not total" in out


def test_module_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "segal_lab.cli", "build", "point"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert formats.parse(proc.stdout).counts
