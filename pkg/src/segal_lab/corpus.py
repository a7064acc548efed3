"""The bundled instance corpus and its on-disk layout.

A corpus holds finite categories, functors between them (tagged with the
properties they are known to have), finite Kan complexes and surjective
Kan fibrations, cospans with an isofibration leg, hand-built non-Segal
spaces and adversarial fixtures whose checks are undecidable at a low
truncation but decided at a higher one.

On disk a corpus is a directory with ``manifest.json`` plus one text file
per category (``cat 1``), Kan complex (``ssx 1``), Kan fibration
(``ssxmap 1``) and non-Segal space (``bsx 1``).  Functors are given in the
manifest by label.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import bisimp, cat, formats, ssets
from .cat import FinCategory, Functor

NERVE_BOUNDS = (3, 3)
COSK_BOUNDS = (2, 3)


class CorpusError(ValueError):
    pass


@dataclass
class FunctorEntry:
    name: str
    functor: Functor
    tags: frozenset = frozenset()
    dk: bool | None = None


@dataclass
class Cospan:
    """C -iso-> E <-other- D with ``iso`` certified an isofibration."""

    name: str
    iso: Functor
    other: Functor


@dataclass
class Fixture:
    """A check that must be Unknown at ``low`` bounds; ``high`` decides it."""

    name: str
    check: str
    build: Callable
    low: tuple
    high: tuple
    truth: bool


@dataclass
class Corpus:
    categories: dict = field(default_factory=dict)
    functors: list = field(default_factory=list)
    kan: dict = field(default_factory=dict)
    kan_fibrations: dict = field(default_factory=dict)
    cospans: list = field(default_factory=list)
    negative_cospans: list = field(default_factory=list)
    non_segal: dict = field(default_factory=dict)
    fixtures: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    nerve_bounds: tuple = NERVE_BOUNDS
    cosk_bounds: tuple = COSK_BOUNDS

    def is_empty(self) -> bool:
        return not (self.categories or self.kan or self.functors or self.non_segal)

    # derived instances, built on demand and cached
    def segal_spaces(self) -> dict:
        if not hasattr(self, "_spaces"):
            spaces = {f"N{n}": cat.nerve(C, self.nerve_bounds) for n, C in self.categories.items()}
            for n, K in self.kan.items():
                spaces[f"cosk0({n})"] = bisimp.cosk0(K, self.cosk_bounds[0])
            self._spaces = spaces
        return self._spaces

    def nerve_spaces(self) -> dict:
        return {n: X for n, X in self.segal_spaces().items() if "category" in X.meta}

    def maps(self) -> list:
        """(name, map, expected DK verdict or None) between corpus Segal spaces."""
        if not hasattr(self, "_maps"):
            out = []
            for e in self.functors:
                f = cat.nerve_functor(e.functor, self.nerve_bounds)
                f.meta = {"functor": e.functor}
                out.append((f"N({e.name})", f, e.dk))
            for n, p in self.kan_fibrations.items():
                out.append((f"cosk0({n})", bisimp.cosk0_map(p, self.cosk_bounds[0]), True))
            self._maps = out
        return self._maps


# -- functor helpers --------------------------------------------------------------

def functor(C: FinCategory, D: FinCategory, obj, mor=None, name="") -> Functor:
    """Functor from label maps; with ``mor`` omitted D must be thin on the image."""
    om = [D.ob(obj(o)) for o in C.objects]
    mm = []
    for k, f in enumerate(C.morphisms):
        if mor is not None:
            mm.append(D.morphisms.index(mor(f)))
            continue
        hom = D.hom(om[C.src[k]], om[C.tgt[k]])
        if len(hom) != 1:
            raise CorpusError(f"{name}: morphism {f!r} has {len(hom)} candidate images")
        mm.append(hom[0])
    return Functor(C, D, om, mm, name=name)


def _functor_by_labels(C, D, objects: dict, morphisms: dict, name) -> Functor:
    try:
        om = [D.ob(objects[str(o)]) for o in C.objects]
        mm = [D.morphisms.index(morphisms[str(m)]) for m in C.morphisms]
    except (KeyError, ValueError) as exc:
        raise CorpusError(f"functor {name}: unmapped or unknown label {exc}") from None
    try:
        return Functor(C, D, om, mm, name=name)
    except cat.CategoryError as exc:
        raise CorpusError(f"functor {name}: {exc}") from None


# -- the bundled corpus -------------------------------------------------------------

def _categories() -> dict:
    o = cat.make_ordinal
    Z2 = cat.cyclic_group(2)
    cs = {
        "[0]": o(0), "[1]": o(1), "[2]": o(2), "[3]": o(3),
        "I[1]": cat.make_I(1), "I[2]": cat.make_I(2),
        "BZ2": Z2, "BZ3": cat.cyclic_group(3), "BS3": cat.symmetric_group_3(),
        "disc2": cat.discrete([0, 1]),
        "[1]xI[1]": cat.product_cat(o(1), cat.make_I(1)),
        "[1]x[1]": cat.product_cat(o(1), o(1)),
        "span": cat.poset(["a", "b", "c"], lambda x, y: x == y or x == "c", name="span"),
        "BZ2xI[1]": cat.product_cat(Z2, cat.make_I(1)),
        "BZ2+[0]": cat.coproduct_cat(Z2, o(0)),
    }
    return {n: _stringify(C, n) for n, C in cs.items()}


def _stringify(C: FinCategory, name: str) -> FinCategory:
    out = FinCategory([str(x) for x in C.objects], [str(m) for m in C.morphisms],
                      C.src, C.tgt, C.identities, C.table, name=name, validate=False)
    return out


def _functors(cs: dict) -> list:
    c = cs
    pt = c["[0]"]
    star = "0"
    F = []

    def add(name, fun, tags=(), dk=None):
        F.append(FunctorEntry(name, fun, frozenset(tags), dk))

    def to_pt(C):
        return functor(C, pt, lambda o: star, name=f"{C.name}->[0]")

    add("I[1]->[0]", to_pt(c["I[1]"]), {"isofibration", "ff_surjective"}, True)
    add("[0]->I[1]", functor(pt, c["I[1]"], lambda o: "0", name="[0]->I[1]"), {"equivalence"}, True)
    add("disc2->[1]", functor(c["disc2"], c["[1]"], lambda o: o, name="disc2->[1]"),
        {"isofibration", "non_full"}, False)
    # projection and section for [1] x I[1]
    P = c["[1]xI[1]"]
    add("[1]xI[1]->[1]", functor(P, c["[1]"], lambda o: str(ast.literal_eval(o)[0])),
        {"isofibration", "ff_surjective"}, True)
    add("[1]->[1]xI[1]", functor(c["[1]"], P, lambda o: str((int(o), 0))), {"equivalence"}, True)
    add("I[2]->I[1]", functor(c["I[2]"], c["I[1]"], lambda o: "0" if o in ("0", "1") else "1"),
        {"isofibration", "ff_surjective"}, True)
    add("BZ2->[0]", to_pt(c["BZ2"]), {"isofibration"}, False)
    add("[0]->BZ2", functor(pt, c["BZ2"], lambda o: "*", lambda m: "0"), (), False)
    S3 = c["BS3"]
    add("BZ2->BS3", functor(c["BZ2"], S3, lambda o: "*",
                            lambda m: "(0, 1, 2)" if m == "0" else "(1, 0, 2)"), (), False)
    add("[1]->[0]", to_pt(c["[1]"]), {"isofibration"}, False)
    add("[1]->[2]", functor(c["[1]"], c["[2]"], lambda o: "0" if o == "0" else "2"),
        {"isofibration"}, False)
    add("[2]->[1]", functor(c["[2]"], c["[1]"], lambda o: "0" if o in ("0", "1") else "1"),
        {"isofibration"}, False)
    add("BZ3->[0]", to_pt(c["BZ3"]), {"isofibration"}, False)
    add("[1]x[1]->[1]", functor(c["[1]x[1]"], c["[1]"], lambda o: str(ast.literal_eval(o)[0])),
        {"isofibration"}, False)
    add("id(BS3)", cat.identity_functor(S3), {"isofibration", "ff_surjective"}, True)
    add("id(I[2])", cat.identity_functor(c["I[2]"]), {"isofibration", "ff_surjective"}, True)
    Q = c["BZ2xI[1]"]
    add("BZ2xI[1]->BZ2", functor(Q, c["BZ2"], lambda o: "*", lambda m: str(ast.literal_eval(m)[0])),
        {"isofibration", "ff_surjective"}, True)
    add("span->[0]", to_pt(c["span"]), {"isofibration"}, False)
    W = c["BZ2+[0]"]
    add("BZ2+[0]->BZ2", functor(W, c["BZ2"], lambda o: "*",
                                lambda m: "0" if ast.literal_eval(m)[0] == "R" else str(ast.literal_eval(m)[1])), (), False)
    add("[0]->BZ2+[0]", functor(pt, W, lambda o: "('R', 0)"), {"isofibration"}, False)
    add("id([2])", cat.identity_functor(c["[2]"]), {"isofibration", "ff_surjective"}, True)
    return F


def _kan(trunc: int) -> dict:
    groupoid = cat.coproduct_cat(cat.cyclic_group(2), cat.terminal())
    return {
        "pt": ssets.point(trunc),
        "disc2": ssets.discrete([0, 1], trunc),
        "NI[1]": cat.nerve_sset(cat.make_I(1), trunc),
        "NBZ2": cat.nerve_sset(cat.cyclic_group(2), trunc),
        "N(BZ2+[0])": cat.nerve_sset(groupoid, trunc),
    }


def _kan_fibrations(kan: dict) -> dict:
    pt = kan["pt"]
    return {n: ssets.to_point(kan[n], pt) for n in ("disc2", "NI[1]", "NBZ2")}


def _cospans(cs: dict, functors: list) -> tuple:
    by = {e.name: e.functor for e in functors}
    pt = cs["[0]"]

    def F(C, D, obj, mor=None):
        return functor(C, D, obj, mor)

    P = cs["[1]xI[1]"]
    out = [
        Cospan("[1]xI[1]->I[1]<-[0]", F(P, cs["I[1]"], lambda o: str(ast.literal_eval(o)[1])),
               F(pt, cs["I[1]"], lambda o: "0")),
        Cospan("BZ2->[0]<-[0]", by["BZ2->[0]"], cat.identity_functor(pt)),
        Cospan("I[1]->[0]<-[1]", by["I[1]->[0]"], by["[1]->[0]"]),
        Cospan("disc2->[1]<-[0]", by["disc2->[1]"], F(pt, cs["[1]"], lambda o: "1")),
        Cospan("BZ2xI[1]->BZ2<-[0]", by["BZ2xI[1]->BZ2"], by["[0]->BZ2"]),
        Cospan("[1]->[0]<-BZ2", by["[1]->[0]"], by["BZ2->[0]"]),
    ]
    negative = [Cospan("[0]->BZ2<-[0]", by["[0]->BZ2"], by["[0]->BZ2"])]
    return out, negative


def _non_segal(bounds) -> dict:
    return {
        "dF[2]": bisimp.make_dF(2, bounds),
        "Sp[2]": bisimp.make_Sp(2, bounds),
        "const(dDelta[2])": bisimp.cat_constant(ssets.make_boundary(2, bounds[0]), bounds[1]),
    }


def _fixtures() -> list:
    def nerve_of(C):
        return lambda b: cat.nerve(C, b)

    def nerve_map(Fn):
        return lambda b: cat.nerve_functor(Fn, b)

    I1, Z2 = cat.make_I(1), cat.cyclic_group(2)
    return [
        Fixture("segal N[2] below its coskeletal degree", "segal", nerve_of(cat.make_ordinal(2)),
                (2, 2), (3, 3), True),
        Fixture("segal dF[3] fails only in degree 3", "segal", lambda b: bisimp.make_dF(3, b),
                (2, 2), (3, 3), False),
        Fixture("counit of N[1]", "counit", nerve_of(cat.make_ordinal(1)), (2, 2), (3, 3), True),
        Fixture("dk N(I[1]->[0])", "dk", nerve_map(cat.to_terminal(I1)), (2, 2), (3, 3), True),
        Fixture("j-fib N([0]->BZ2)", "j-fib", nerve_map(cat.object_functor(Z2, 0)),
                (2, 2), (3, 3), False),
    ]


def builtin() -> Corpus:
    cs = _categories()
    fs = _functors(cs)
    kan = _kan(COSK_BOUNDS[1])
    cospans, negative = _cospans(cs, fs)
    return Corpus(categories=cs, functors=fs, kan=kan, kan_fibrations=_kan_fibrations(kan),
                  cospans=cospans, negative_cospans=negative, non_segal=_non_segal(NERVE_BOUNDS),
                  fixtures=_fixtures())


# -- on-disk layout ---------------------------------------------------------------------

def _slug(name: str) -> str:
    keep = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in name)
    return keep.strip("_") or "x"


def _functor_record(name, F: Functor, cats_by_id: dict) -> dict:
    C, D = F.source, F.target
    return {
        "name": name,
        "source": cats_by_id[id(C)], "target": cats_by_id[id(D)],
        "objects": {str(C.objects[i]): str(D.objects[F.on_object(i)]) for i in range(C.n_objects)},
        "morphisms": {str(C.morphisms[i]): str(D.morphisms[F(i)]) for i in range(C.n_morphisms)},
    }


def write(corpus: Corpus, directory) -> Path:
    root = Path(directory)
    for sub in ("categories", "kan", "fibrations", "non_segal"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    manifest = {"nerve_bounds": list(corpus.nerve_bounds), "cosk_bounds": list(corpus.cosk_bounds),
                "categories": {}, "kan": {}, "kan_fibrations": {}, "non_segal": {},
                "functors": [], "cospans": [], "negative_cospans": [], "fixtures": []}
    cats_by_id = {}
    for name, C in sorted(corpus.categories.items()):
        path = f"categories/{_slug(name)}.cat"
        formats.dump(C, root / path)
        manifest["categories"][name] = path
        cats_by_id[id(C)] = name
    for name, K in sorted(corpus.kan.items()):
        path = f"kan/{_slug(name)}.ssx"
        formats.dump(K, root / path)
        manifest["kan"][name] = path
    for name, p in sorted(corpus.kan_fibrations.items()):
        path = f"fibrations/{_slug(name)}.ssxmap"
        formats.dump(p, root / path)
        manifest["kan_fibrations"][name] = path
    for name, X in sorted(corpus.non_segal.items()):
        path = f"non_segal/{_slug(name)}.bsx"
        formats.dump(X, root / path)
        manifest["non_segal"][name] = path
    for e in corpus.functors:
        rec = _functor_record(e.name, e.functor, cats_by_id)
        rec["tags"] = sorted(e.tags)
        rec["dk"] = e.dk
        manifest["functors"].append(rec)
    for key in ("cospans", "negative_cospans"):
        for cs in getattr(corpus, key):
            manifest[key].append({"name": cs.name,
                                  "iso": _functor_record(cs.name + ":iso", cs.iso, cats_by_id),
                                  "other": _functor_record(cs.name + ":other", cs.other, cats_by_id)})
    (root / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n",
                                        encoding="utf-8")
    return root


def load(directory) -> Corpus:
    """Load a corpus directory; per-entry problems are collected in ``errors``."""
    root = Path(directory)
    mpath = root / "manifest.json"
    if not mpath.exists():
        raise CorpusError(f"no instances: {root} has no manifest.json")
    try:
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"manifest.json: {exc}") from None
    corpus = Corpus(nerve_bounds=tuple(manifest.get("nerve_bounds", NERVE_BOUNDS)),
                    cosk_bounds=tuple(manifest.get("cosk_bounds", COSK_BOUNDS)))

    def read(kind, name, rel, expect):
        path = root / rel
        if not path.exists():
            corpus.errors.append((f"{kind}:{name}", f"missing file {rel}"))
            return None
        try:
            obj = formats.load(path)
        except (formats.FormatError, ValueError) as exc:
            corpus.errors.append((f"{kind}:{name}", f"{rel}: {exc}"))
            return None
        if not isinstance(obj, expect):
            corpus.errors.append((f"{kind}:{name}", f"{rel}: wrong kind {type(obj).__name__}"))
            return None
        return obj

    for name, rel in sorted(manifest.get("categories", {}).items()):
        C = read("category", name, rel, FinCategory)
        if C is not None:
            C.name = name
            corpus.categories[name] = C
    for name, rel in sorted(manifest.get("kan", {}).items()):
        K = read("kan", name, rel, ssets.TruncatedSimplicialSet)
        if K is not None:
            corpus.kan[name] = K
    for name, rel in sorted(manifest.get("kan_fibrations", {}).items()):
        p = read("kan_fibration", name, rel, ssets.SimplicialMap)
        if p is not None:
            corpus.kan_fibrations[name] = p
    for name, rel in sorted(manifest.get("non_segal", {}).items()):
        X = read("non_segal", name, rel, bisimp.SimplicialSpace)
        if X is not None:
            corpus.non_segal[name] = X

    def make_functor(kind, rec):
        cs = corpus.categories
        for end in ("source", "target"):
            if rec.get(end) not in cs:
                corpus.errors.append((f"{kind}:{rec.get('name')}", f"unavailable category {rec.get(end)!r}"))
                return None
        try:
            return _functor_by_labels(cs[rec["source"]], cs[rec["target"]], rec["objects"],
                                      rec["morphisms"], rec["name"])
        except CorpusError as exc:
            corpus.errors.append((f"{kind}:{rec.get('name')}", str(exc)))
            return None

    for rec in manifest.get("functors", []):
        F = make_functor("functor", rec)
        if F is not None:
            corpus.functors.append(FunctorEntry(rec["name"], F, frozenset(rec.get("tags", ())),
                                                rec.get("dk")))
    for key in ("cospans", "negative_cospans"):
        for rec in manifest.get(key, []):
            a, b = make_functor(key, rec["iso"]), make_functor(key, rec["other"])
            if a is not None and b is not None:
                getattr(corpus, key).append(Cospan(rec["name"], a, b))
    corpus.fixtures = _fixtures()
    if corpus.is_empty() and not corpus.errors:
        raise CorpusError(f"no instances in {root}")
    return corpus
