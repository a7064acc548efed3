"""Command-line front end: build artifacts, run checks and the acceptance suite.

Exit status: 0 True, 1 False, 2 Unknown, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance, bisimp, cat, classify, formats, holim, segal, ssets
from . import corpus as corpus_mod
from ._core import Presheaf, PresheafMap, TruncationMismatch
from .config import ConfigError, RunConfig
from .verdict import Verdict

EXIT = {"true": 0, "false": 1, "unknown": 2}
INPUT_ERROR = 3
INPUT_ERRORS = (formats.FormatError, ConfigError, corpus_mod.CorpusError, cat.CategoryError,
                TruncationMismatch, FileNotFoundError, IsADirectoryError, json.JSONDecodeError,
                holim.HolimRefused, ssets.NonCommutingSquare)


class InputError(ValueError):
    pass


# -- reports ----------------------------------------------------------------------

def describe(obj, depth: int = 0):
    """A JSON-able, deterministic summary of a witness."""
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    if isinstance(obj, np.generic):
        return obj.item()
    if depth > 6:
        return type(obj).__name__
    if isinstance(obj, np.ndarray):
        items = obj.tolist()
        return items if obj.size <= 32 else {"array": list(obj.shape), "head": obj.ravel()[:16].tolist()}
    if isinstance(obj, Verdict):
        out = {"status": obj.status.value, "witness": describe(obj.witness, depth + 1)}
        if obj.reason:
            out["reason"] = obj.reason
        return out
    if isinstance(obj, dict):
        return {str(k): describe(v, depth + 1) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else list(obj)
        return [describe(v, depth + 1) for v in items[:32]]
    if isinstance(obj, cat.FinCategory):
        return {"category": obj.name, "objects": obj.n_objects, "morphisms": obj.n_morphisms}
    if isinstance(obj, cat.Functor):
        return {"functor": obj.name, "objects": obj.obj_map.tolist(), "morphisms": obj.mor_map.tolist()}
    if isinstance(obj, PresheafMap):
        return {"map": f"{obj.source.name} -> {obj.target.name}"}
    if isinstance(obj, Presheaf):
        return {"object": obj.name, "cells": obj.total_cells}
    return type(obj).__name__


def _summary_text(value) -> str:
    return json.dumps(value, sort_keys=True, default=str)


@dataclass
class CheckRecord:
    operation: str
    inputs: tuple
    status: str
    summary: str
    payload: object = None
    seconds: float = 0.0

    def sort_key(self):
        return (self.inputs, self.operation)


@dataclass
class Report:
    command: str
    records: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)
    primary: str | None = None  # operation whose verdict sets the exit status
    stream: list = field(default_factory=list)  # artifacts bound for stdout

    def add_verdict(self, operation: str, inputs, verdict: Verdict, seconds: float = 0.0, extra=None):
        payload = describe(verdict.witness)
        if extra is not None:
            payload = {"witness": payload, **describe(extra)}
        summary = verdict.reason or _summary_text(payload)
        self.records.append(CheckRecord(operation, tuple(inputs), verdict.status.value,
                                        summary, payload, seconds))

    def sorted_records(self) -> list:
        return sorted(self.records, key=CheckRecord.sort_key)

    def render(self, output: str, timings: bool = False) -> str:
        if output == "machine":
            rows = []
            for r in self.sorted_records():
                row = {"operation": r.operation, "inputs": list(r.inputs), "verdict": r.status,
                       "summary": r.summary, "witness": r.payload}
                if timings:
                    row["seconds"] = round(r.seconds, 3)
                rows.append(row)
            doc = {"command": self.command, "records": rows, "aggregates": self.aggregates,
                   "artifacts": self.artifacts}
            return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"
        lines = [f"segal-lab {self.command}"]
        for r in self.sorted_records():
            inputs = ",".join(r.inputs) or "-"
            lines.append(f"  {r.status.upper():8s} {r.operation} [{inputs}] {r.seconds:.2f}s")
            lines.append(f"           {r.summary}")
        for a in self.artifacts:
            lines.append(f"  wrote {a}")
        for k in sorted(self.aggregates):
            lines.append(f"  {k}: {self.aggregates[k]}")
        return "\n".join(lines) + "\n"


def overall_status(report: Report) -> str:
    statuses = [r.status for r in report.records
                if report.primary is None or r.operation == report.primary]
    if "false" in statuses or "fail" in statuses:
        return "false"
    if "unknown" in statuses:
        return "unknown"
    return "true"


# -- input helpers ----------------------------------------------------------------

def _load(path: str, kinds: tuple):
    text = Path(path).read_text()
    try:
        kind = formats.kind_of(text)
    except formats.FormatError as exc:
        raise formats.FormatError(exc.line, f"{exc.message} in {path}") from None
    if kind not in kinds:
        raise InputError(f"{path}: expected {' or '.join(kinds)}, got {kind}")
    try:
        return formats.parse(text)
    except formats.FormatError as exc:
        raise formats.FormatError(exc.line, f"{exc.message} in {path}") from None


def _hash(obj) -> str:
    return formats.content_hash(obj)


def _emit(obj, out: str | None, report: Report):
    """Write an artifact to ``out`` ('-' for stdout) and record it."""
    text = formats.serialize(obj)
    if out in (None, "-"):
        report.stream.append(text)
        return
    Path(out).write_text(text)
    report.artifacts.append(f"{out} {formats.content_hash(text)}")


def _timed(fn):
    t = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - t


# -- build ------------------------------------------------------------------------

BUILDERS = {
    "F": ("m", bisimp.make_F),
    "dF": ("m", bisimp.make_dF),
    "Sp": ("m", bisimp.make_Sp),
    "Delta": ("n", bisimp.make_Delta_space),
    "dDelta": ("n", bisimp.make_partial_Delta_space),
    "NI": ("m", cat.nerve_I),
}

NAMED_CATEGORIES = {
    "ord": cat.make_ordinal,
    "I": cat.make_I,
    "Z": cat.cyclic_group,
}


def _category_from_args(args: list) -> cat.FinCategory:
    if len(args) == 1 and Path(args[0]).suffix == ".cat":
        return _load(args[0], ("cat",))
    if len(args) == 1 and args[0] in ("point", "S3"):
        return cat.terminal() if args[0] == "point" else cat.symmetric_group_3()
    if len(args) == 2 and args[0] in NAMED_CATEGORIES:
        return NAMED_CATEGORIES[args[0]](int(args[1]))
    raise InputError(f"nerve expects a .cat file, point, S3, or one of {sorted(NAMED_CATEGORIES)} with an integer")


def build_object(what: str, args: list, config: RunConfig):
    b = config.bounds
    if what in BUILDERS:
        if len(args) != 1:
            raise InputError(f"build {what} takes one integer")
        return BUILDERS[what][1](int(args[0]), b)
    if what == "horn":
        if len(args) != 2:
            raise InputError("build horn takes n and k")
        return bisimp.make_horn_space(int(args[0]), int(args[1]), b)
    if what == "point":
        return bisimp.point_space(b)
    if what == "nerve":
        return cat.nerve(_category_from_args(args), b)
    if what == "cosk0":
        if len(args) != 1:
            raise InputError("build cosk0 takes one SSX file")
        return bisimp.cosk0(_load(args[0], ("ssx",)), b[0])
    if what == "product":
        if len(args) != 2:
            raise InputError("build product takes two BSX files")
        A, B = (_load(a, ("bsx",)) for a in args)
        return bisimp.product(A, B)
    if what == "pushout":
        if len(args) != 2:
            raise InputError("build pushout takes two BSXMAP files with a common source")
        f, g = (_load(a, ("bsxmap",)) for a in args)
        return ssets.pushout(f, g)
    if what == "pushout-product":
        if len(args) != 2:
            raise InputError("build pushout-product takes two BSXMAP files")
        f, g = (_load(a, ("bsxmap",)) for a in args)
        return bisimp.pushout_product(f, g)
    if what == "nerve-functor":
        if len(args) != 3:
            raise InputError("build nerve-functor takes a source CAT, a target CAT and a JSON label map")
        C, D = _load(args[0], ("cat",)), _load(args[1], ("cat",))
        try:
            labels = json.loads(Path(args[2]).read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{args[2]}: {exc}") from None
        F = corpus_mod._functor_by_labels(C, D, labels.get("objects", {}), labels.get("morphisms", {}),
                                          Path(args[2]).stem)
        return cat.nerve_functor(F, b)
    if what == "cosk0-map":
        if len(args) != 1:
            raise InputError("build cosk0-map takes one SSXMAP file")
        return bisimp.cosk0_map(_load(args[0], ("ssxmap",)), b[0])
    if what == "generator":
        if len(args) < 2:
            raise InputError("build generator takes a set name and a label such as boundary,1,2")
        gens = classify.enumerate_generators(args[0], *config.bounds, config.bounds)
        wanted = tuple(int(t) if t.lstrip("-").isdigit() else t for t in args[1].split(","))
        for label, g in gens:
            if label == wanted:
                return g
        raise InputError(f"no generator {args[1]} in {args[0]}")
    raise InputError(f"unknown build target {what!r}")


def cmd_build(ns, config: RunConfig) -> Report:
    report = Report(f"build {ns.what}")
    obj = build_object(ns.what, ns.args, config)
    _emit(obj, ns.output_file, report)
    return report


# -- check ------------------------------------------------------------------------

CHECK_KINDS = ("segal", "reedy-fib", "i-cof", "i-fib", "j-fib", "dk", "ho", "core",
               "pushout-product", "factorize", "holim", "counit", "classify")


def _ho_record(report: Report, X, config: RunConfig):
    h = _hash(X)
    seg, dt = _timed(lambda: segal.segal_check(X, config.lifting_budget))
    if not seg.is_true:
        report.add_verdict("ho", (h,), Verdict.unknown(f"ho needs a Segal space: {seg.summary()}"), dt)
        return None
    res, dt2 = _timed(lambda: segal.ho(X))
    C = res.category
    witness = {"objects": [str(C.objects[i]) for i in range(C.n_objects)],
               "morphisms": [f"{C.morphisms[k]}: {C.objects[int(C.src[k])]} -> {C.objects[int(C.tgt[k])]}"
                             for k in range(C.n_morphisms)]}
    report.add_verdict("ho", (h,), Verdict.true(witness, f"{C.n_objects} objects, {C.n_morphisms} morphisms"),
                       dt + dt2)
    return res


def cmd_check(ns, config: RunConfig) -> Report:
    kind = ns.kind
    report = Report(f"check {kind}")
    budget = config.lifting_budget
    ins = ns.inputs
    need = {"pushout-product": 2}.get(kind, 1)
    if len(ins) != need:
        raise InputError(f"check {kind} takes {need} input file(s)")

    def single(op, obj, fn):
        v, dt = _timed(lambda: fn(obj))
        report.add_verdict(op, (_hash(obj),), v, dt)

    if kind in ("segal", "counit", "ho", "core"):
        X = _load(ins[0], ("bsx",))
        if kind == "segal":
            single("segal", X, lambda X: segal.segal_check(X, budget))
        elif kind == "counit":
            single("counit", X, lambda X: holim.check_IR_counit(X, budget))
        elif kind == "ho":
            _ho_record(report, X, config)
        else:
            res = _ho_record(report, X, config)
            if res is not None:
                c, dt = _timed(lambda: segal.hoeq_and_core(X, res))
                witness = {"core_cells": c.core.total_cells, "hoeq_cells": c.hoeq.total_cells,
                           "component_stable": c.component_stable}
                report.add_verdict("core", (_hash(X),), Verdict.true(witness, f"core has {c.core.total_cells} cells"), dt)
                if ns.output_file:
                    _emit(c.core, ns.output_file, report)
        return report
    if kind == "reedy-fib":
        obj = _load(ins[0], ("bsx", "bsxmap"))
        if isinstance(obj, bisimp.SimplicialSpace):
            single("reedy-fibrant", obj, bisimp.is_reedy_fibrant)
        else:
            single("reedy-fibration", obj, bisimp.is_reedy_fibration)
        return report
    if kind == "holim":
        return _holim(ns, config, report)
    f = _load(ins[0], ("bsxmap",))
    if kind == "i-cof":
        single("i-cof", f, lambda f: classify.is_I_cofibration(f, budget))
    elif kind == "i-fib":
        single("i-fib", f, lambda f: classify.is_I_fibration(f, budget))
    elif kind == "j-fib":
        single("j-fib", f, lambda f: classify.is_J_fibration_fibrant(f, budget))
    elif kind == "dk":
        modes = segal.DK_MODES if ns.mode == "all" else (ns.mode,)
        for m in modes:
            single(f"dk mode {m}", f, lambda f, m=m: segal.dk_equivalence(f, m, budget))
        if ns.mode == "all":
            single("dk all", f, lambda f: segal.dk_equivalence(f, "all", budget))
    elif kind == "classify":
        out, dt = _timed(lambda: classify.classify_trivial_fibration_equivalences(f, budget))
        for key in ("i", "ii", "iii"):
            report.add_verdict(f"trivial fibration ({key})", (_hash(f),), out[key], dt)
        report.primary = "trivial fibration (i)"
        single("i-cof", f, lambda f: classify.is_I_cofibration(f, budget))
        single("reedy-fibration", f, bisimp.is_reedy_fibration)
    elif kind == "pushout-product":
        g = _load(ins[1], ("bsxmap",))
        pp = bisimp.pushout_product(f, g)
        v, dt = _timed(lambda: classify.is_I_cofibration(pp, budget))
        report.add_verdict("pushout-product i-cof", (_hash(f), _hash(g)), v, dt)
        if ns.output_file:
            _emit(pp, ns.output_file, report)
    elif kind == "factorize":
        _factorize(f, ns, config, report)
    return report


def _factorize(f, ns, config: RunConfig, report: Report):
    stages = ns.stages or config.max_stages
    res, dt = _timed(lambda: classify.factorize(f, ns.set, stages, budget=config.lifting_budget))
    log = [{"stage": a.stage, "generator": list(a.generator)} for a in res.log]
    if isinstance(res, classify.FactorizationCertificate):
        witness = {"stages": res.stages, "attachments": log,
                   "right": {k: v.status.value for k, v in sorted(res.right_verdicts.items())}}
        verdict = Verdict.true(witness, f"{len(log)} cells attached in {res.stages} stage(s)")
    else:
        verdict = Verdict.unknown(res.reason, details=tuple(log))
    report.add_verdict(f"factorize {ns.set}", (_hash(f),), verdict, dt)
    if ns.output_file:
        base = Path(ns.output_file)
        for part, obj in (("left", res.left), ("right", res.right)):
            _emit(obj, str(base.with_name(f"{base.stem}.{part}.bsxmap")), report)


# -- holim manifests --------------------------------------------------------------

def load_diagram(path: str, config: RunConfig) -> holim.Diagram:
    """A diagram manifest: JSON with a shape CAT file, one file per shape object
    (CAT, or BSX carrying a category block) and one entry per non-identity arrow
    (a BSXMAP file, or a label map {"objects": {...}, "morphisms": {...}})."""
    root = Path(path).parent
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None
    for key in ("shape", "objects", "arrows"):
        if key not in doc:
            raise InputError(f"{path}: manifest is missing {key!r}")
    shape = _load(str(root / doc["shape"]), ("cat",))
    bounds = tuple(doc.get("bounds", config.bounds))
    cats = []
    for o in shape.objects:
        ref = doc["objects"].get(str(o))
        if ref is None:
            raise InputError(f"{path}: no object for shape object {o}")
        obj = _load(str(root / ref), ("cat", "bsx"))
        C = obj if isinstance(obj, cat.FinCategory) else obj.meta.get("category")
        if C is None:
            raise InputError(f"{ref}: diagram objects must be categories or nerves")
        cats.append(C)
    functors = {}
    for u in range(shape.n_morphisms):
        if shape.is_identity(u):
            continue
        name = str(shape.morphisms[u])
        ref = doc["arrows"].get(name)
        if ref is None:
            raise InputError(f"{path}: no arrow for shape morphism {name}")
        C, D = cats[int(shape.src[u])], cats[int(shape.tgt[u])]
        if isinstance(ref, dict):
            functors[u] = corpus_mod._functor_by_labels(C, D, ref.get("objects", {}),
                                                        ref.get("morphisms", {}), name)
        else:
            m = _load(str(root / ref), ("bsxmap",))
            m = bisimp.BisimplicialMap(cat.nerve(C, m.source.bounds), cat.nerve(D, m.source.bounds),
                                       {d: m[d] for d in m.source.degrees()})
            functors[u] = holim.functor_of_nerve_map(m)
    return holim.Diagram.of_functors(shape, cats, functors, bounds)


def _holim(ns, config: RunConfig, report: Report) -> Report:
    diagram = load_diagram(ns.inputs[0], config)
    res, dt = _timed(lambda: holim.bousfield_kan_holim(diagram, diagram.objects[0].bounds,
                                                        budget=config.lifting_budget))
    E = res.category
    witness = {"objects": E.n_objects, "morphisms": E.n_morphisms, "cells": res.space.total_cells}
    if res.comparison_verdict is not None:
        verdict = res.comparison_verdict
        report.add_verdict("holim vs iso-comma", (formats.content_hash(Path(ns.inputs[0]).read_text()),),
                           verdict, dt, extra={"holim": witness})
    else:
        report.add_verdict("holim", (formats.content_hash(Path(ns.inputs[0]).read_text()),),
                           Verdict.true(witness, f"end category with {E.n_objects} objects"), dt)
    out = ns.output_file
    if out:
        _emit(res.space, out, report)
    return report


# -- suite, generators ------------------------------------------------------------

def cmd_suite(ns, config: RunConfig) -> Report:
    C = corpus_mod.load(ns.corpus) if ns.corpus else corpus_mod.builtin()
    only = set(ns.only) if ns.only else None
    results = acceptance.run_suite(C, config, only)
    report = Report("suite")
    for res in results:
        op = f"criterion {res.number:02d}" if res.number else "corpus load"
        for rec in res.records:
            status = "true" if rec.ok else "false"
            report.records.append(CheckRecord(op, (rec.instance,),
                                              status, rec.detail or "ok", None, rec.seconds))
        for message, ok in res.requirements:
            report.records.append(CheckRecord(op, ("requirement",),
                                              "true" if ok else "false", message))
        report.aggregates[op] = "pass" if res.passed else "fail"
    n_pass = sum(r.passed for r in results)
    report.aggregates["passed"] = f"{n_pass}/{len(results)}"
    report.aggregates["suite"] = "pass" if n_pass == len(results) else "fail"
    return report


def cmd_generators(ns, config: RunConfig) -> Report:
    gens = classify.enumerate_generators(ns.set, ns.max_m, ns.max_n, config.bounds)
    report = Report(f"generators {ns.set}")
    out_dir = Path(ns.out_dir) if ns.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for label, g in gens:
        tag = "_".join(str(t) for t in label)
        witness = {"label": list(label), "source_cells": g.source.total_cells,
                   "target_cells": g.target.total_cells}
        report.add_verdict(f"{ns.set} {tag}", (_hash(g),), Verdict.true(witness, f"{ns.set} generator {tag}"))
        if out_dir:
            _emit(g, str(out_dir / f"{ns.set}_{tag}.bsxmap"), report)
    report.aggregates["count"] = len(gens)
    return report


def cmd_export(ns, config: RunConfig) -> Report:
    report = Report("export-corpus")
    path = corpus_mod.write(corpus_mod.builtin(), ns.directory)
    report.artifacts.append(str(path))
    return report


# -- argument parsing -------------------------------------------------------------

def _common(default) -> argparse.ArgumentParser:
    """Global options, accepted before or after the subcommand."""
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--bounds", nargs=2, type=int, metavar=("M", "N"), default=default,
                   help="truncation bounds (cat, space)")
    c.add_argument("--lifting-budget", type=int, default=default)
    c.add_argument("--congruence-budget", type=int, default=default)
    c.add_argument("--output", choices=("human", "machine"), default=default)
    c.add_argument("--machine", action="store_const", const="machine", dest="output", default=default,
                   help="shorthand for --output machine")
    c.add_argument("--timings", action="store_true", default=default,
                   help="include wall times in machine reports")
    return c


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="segal-lab", description="Finite computations with Segal spaces.",
                                parents=[_common(argparse.SUPPRESS)])
    p.set_defaults(bounds=None, lifting_budget=None, congruence_budget=None, output="human", timings=False)
    sub = p.add_subparsers(dest="command", required=True)
    common = _common(argparse.SUPPRESS)

    b = sub.add_parser("build", help="materialize a generator or construction as a file", parents=[common])
    b.add_argument("what", help="F, dF, Sp, Delta, dDelta, horn, point, NI, nerve, cosk0, "
                                "nerve-functor, cosk0-map, product, pushout, pushout-product, generator")
    b.add_argument("args", nargs="*")
    b.add_argument("-o", "--output-file", default="-")

    c = sub.add_parser("check", help="run one decision procedure", parents=[common])
    c.add_argument("kind", choices=CHECK_KINDS)
    c.add_argument("inputs", nargs="+")
    c.add_argument("--mode", choices=("all",) + segal.DK_MODES, default="all")
    c.add_argument("--set", choices=("I", "J0"), default="I")
    c.add_argument("--stages", type=int)
    c.add_argument("-o", "--output-file")

    for alias, kind in (("segal-check", "segal"), ("ho", "ho"), ("core", "core"),
                        ("dk", "dk"), ("classify", "classify")):
        a = sub.add_parser(alias, help=f"same as check {kind}", parents=[common])
        a.set_defaults(kind=kind, command="check")
        a.add_argument("inputs", nargs="+")
        a.add_argument("--mode", choices=("all",) + segal.DK_MODES, default="all")
        a.add_argument("--set", default="I")
        a.add_argument("--stages", type=int)
        a.add_argument("-o", "--output-file")

    s = sub.add_parser("suite", help="run the acceptance suite over a corpus", parents=[common])
    s.add_argument("corpus", nargs="?", help="corpus directory (default: the bundled corpus)")
    s.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")

    g = sub.add_parser("generators", help="enumerate a generating set", parents=[common])
    g.add_argument("--set", choices=("I", "J0", "J"), default="I")
    g.add_argument("--max-m", type=int, default=3)
    g.add_argument("--max-n", type=int, default=3)
    g.add_argument("--out-dir")

    h = sub.add_parser("holim", help="homotopy limit of a diagram manifest", parents=[common])
    h.add_argument("inputs", nargs=1, metavar="manifest")
    h.add_argument("-o", "--output-file", help="write the result as BSX")

    f = sub.add_parser("factorize", help="bounded small-object factorization", parents=[common])
    f.add_argument("inputs", nargs=1, metavar="map")
    f.add_argument("--set", choices=("I", "J0"), default="I")
    f.add_argument("--stages", type=int)
    f.add_argument("-o", "--output-file", help="prefix for the left and right factor files")

    e = sub.add_parser("export-corpus", help="write the bundled corpus to a directory", parents=[common])
    e.add_argument("directory")
    return p


def make_config(ns, environ=None) -> RunConfig:
    kwargs = {"output": ns.output}
    if ns.bounds:
        kwargs["bounds"] = tuple(ns.bounds)
    config = RunConfig(**kwargs).with_env(environ)
    over = {}
    if ns.lifting_budget is not None:
        over["lifting_budget"] = ns.lifting_budget
    if ns.congruence_budget is not None:
        over["congruence_budget"] = ns.congruence_budget
    if getattr(ns, "stages", None) is not None:
        over["max_stages"] = ns.stages
    if getattr(ns, "corpus", None):
        over["corpus_paths"] = (ns.corpus,)
    return RunConfig(**{**config.__dict__, **over}) if over else config


COMMANDS = {"build": cmd_build, "check": cmd_check, "suite": cmd_suite,
            "generators": cmd_generators, "export-corpus": cmd_export}


def run(argv=None, environ=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else 0
    if ns.command == "holim":
        ns.kind = "holim"
    if ns.command in ("holim", "factorize"):
        ns.kind, ns.command = ns.command, "check"
        ns.mode = "all"
    try:
        config = make_config(ns, environ)
        report = COMMANDS[ns.command](ns, config)
    except segal.SegalError:
        raise
    except INPUT_ERRORS + (InputError, ValueError) as exc:
        stderr.write(f"segal-lab: input error: {exc}\n")
        return INPUT_ERROR
    # artifacts written to stdout take the stream; the report then goes to stderr
    for text in report.stream:
        stdout.write(text)
    (stderr if report.stream else stdout).write(report.render(config.output, ns.timings))
    if ns.command in ("build", "generators", "export-corpus"):
        return 0
    return EXIT[overall_status(report)]


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
