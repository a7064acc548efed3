"""The acceptance suite: twelve corpus-wide agreement checks.

Each criterion returns a CriterionResult holding one record per instance,
so a failure is always attributed to the instance that caused it.
"""

from __future__ import annotations

import time
import traceback
from dataclasses import dataclass, field

import numpy as np

from . import bisimp, cat, classify, holim, segal, ssets
from .config import RunConfig
from .corpus import Corpus
from .verdict import Verdict

TITLES = {
    1: "homotopy category agrees with c(R X)",
    2: "four Dwyer-Kan criteria agree",
    3: "trivial fibration characterizations agree",
    4: "generators are I-cofibrations",
    5: "pushout-products of I-generators are I-cofibrations",
    6: "path object contract",
    7: "nerve sends isofibrations and trivial fibrations correctly",
    8: "homotopy pullbacks of cospans with an isofibration leg",
    9: "coskeleta of surjective Kan fibrations",
    10: "underlying quasi-category consistency",
    11: "counit of the reduction is a Dwyer-Kan equivalence",
    12: "Unknown is sound at low truncations",
}


@dataclass
class Record:
    instance: str
    ok: bool
    detail: str = ""
    seconds: float = 0.0


@dataclass
class CriterionResult:
    number: int
    title: str
    records: list = field(default_factory=list)
    requirements: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [r for r in self.records if not r.ok]

    @property
    def passed(self) -> bool:
        return bool(self.records) and not self.failures and all(ok for _, ok in self.requirements)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        n_ok = sum(r.ok for r in self.records)
        out = f"[{status}] criterion {self.number:2d}: {self.title} ({n_ok}/{len(self.records)} instances)"
        bad = [r.instance for r in self.failures[:3]] + [m for m, ok in self.requirements if not ok]
        if bad:
            out += " failing: " + ", ".join(bad)
        return out


class _Runner:
    def __init__(self, number: int):
        self.result = CriterionResult(number, TITLES[number])

    def check(self, instance: str, fn):
        """Run ``fn() -> (ok, detail)``; exceptions fail the instance."""
        t = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # localize any failure to the instance
            ok, detail = False, f"{type(exc).__name__}: {exc}"
            detail += " @ " + traceback.extract_tb(exc.__traceback__)[-1].name
        self.result.records.append(Record(instance, bool(ok), str(detail), time.perf_counter() - t))
        return ok

    def require(self, message: str, ok: bool):
        self.result.requirements.append((message, bool(ok)))


def _status(v: Verdict) -> str:
    return v.status.value


def _segal_or_raise(X, budget):
    v = segal.segal_check(X, budget)
    if not v.is_true:
        raise AssertionError(f"not certified Segal: {v.summary()}")


# -- criteria -----------------------------------------------------------------------

def criterion_1(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(1)
    for name, X in sorted(corpus.segal_spaces().items()):
        def body(X=X):
            _segal_or_raise(X, config.lifting_budget)
            h = segal.ho(X).category
            c = segal.ho_via_cR(X, config.congruence_budget)
            iso = cat.find_isomorphism(h, c)
            return iso is not None, f"{h.n_objects} objects, {h.n_morphisms} morphisms"
        run.check(name, body)
    return run.result


def criterion_2(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(2)
    for name, f, _ in corpus.maps():
        def body(f=f):
            verdicts = [segal.dk_equivalence(f, m, config.lifting_budget) for m in segal.DK_MODES]
            statuses = [_status(v) for v in verdicts]
            ok = all(v.conclusive for v in verdicts) and len(set(statuses)) == 1
            return ok, "/".join(statuses)
        run.check(name, body)
    run.require(">= 20 maps", len(run.result.records) >= 20)
    return run.result


def criterion_3(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(3)
    seen = []
    for name, f, _ in corpus.maps():
        def body(f=f):
            out = classify.classify_trivial_fibration_equivalences(f, config.lifting_budget)
            statuses = [_status(out[k]) for k in ("i", "ii", "iii")]
            ok = all(out[k].conclusive for k in out) and len(set(statuses)) == 1
            if ok:
                seen.append(statuses[0])
            return ok, "/".join(statuses)
        run.check(name, body)
    run.require(">= 15 maps", len(run.result.records) >= 15)
    run.require(">= 3 True instances", seen.count("true") >= 3)
    run.require(">= 3 False instances", seen.count("false") >= 3)
    return run.result


def criterion_4(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(4)
    bounds = config.bounds
    gens = classify.enumerate_generators("I", bounds[0], bounds[1], bounds)
    for label, g in gens:
        run.check(f"I{label}", lambda g=g: (classify.is_I_cofibration(g).is_true, ""))
    j0 = classify.enumerate_generators("J0", bounds[0], bounds[1], bounds)
    for label, g in j0:
        def body(g=g):
            cof = classify.is_I_cofibration(g)
            f0 = g.level(0)
            we = ssets.weak_equivalence_oracle(f0, config.lifting_budget)
            return cof.is_true and f0.is_injective() and we.is_true, f"{_status(cof)}/{_status(we)}"
        run.check(f"J0{label}", body)
    for j in (0, 1):
        run.check(f"F[0]->NI[1] at {j}",
                  lambda j=j: (classify.is_I_cofibration(classify.vertex_into_NI1(j, bounds)).is_true, ""))
    return run.result


PUSHOUT_PRODUCT_BOUNDS = (4, 4)


def criterion_5(corpus: Corpus, config: RunConfig) -> CriterionResult:
    """Unordered pairs suffice: f x g and g x f are isomorphic maps."""
    run = _Runner(5)
    gens = list(classify.enumerate_generators("I", 2, 2, PUSHOUT_PRODUCT_BOUNDS))
    for a in range(len(gens)):
        for b in range(a, len(gens)):
            (la, f), (lb, g) = gens[a], gens[b]
            run.check(f"{la} [] {lb}",
                      lambda f=f, g=g: (classify.is_I_cofibration(bisimp.pushout_product(f, g)).is_true, ""))
    return run.result


EXPONENTIAL_BOUNDS = (2, 2)
EXPONENTIAL_MAX_MORPHISMS = 4


def criterion_6(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(6)
    for name, X in sorted(corpus.nerve_spaces().items()):
        def body(X=X):
            po = classify.path_object(X, config.lifting_budget)
            if isinstance(po, Verdict):
                return False, po.reason
            return po.w_verdict.is_true and po.p_verdict.is_true, \
                f"w {_status(po.w_verdict)}, p {_status(po.p_verdict)}"
        run.check(f"path {name}", body)
    I1 = cat.make_I(1)
    for name, C in sorted(corpus.categories.items()):
        if C.n_morphisms > EXPONENTIAL_MAX_MORPHISMS:
            continue

        def body(C=C):
            b = EXPONENTIAL_BOUNDS
            H, exact, v = bisimp.internal_hom(cat.nerve_I(1, b), cat.nerve(C, b), config.lifting_budget)
            if H is None or not exact:
                return False, v.reason or "inexact"
            iso = segal.nerve_like_isomorphism(cat.nerve(cat.functor_category(C, I1), b), H)
            return iso is not None, f"{H.total_cells} cells"
        run.check(f"N({name}^I[1]) = N{name}^NI[1]", body)
    return run.result


def criterion_7(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(7)
    for e in corpus.functors:
        f = cat.nerve_functor(e.functor, corpus.nerve_bounds)
        if "isofibration" in e.tags:
            run.check(f"j-fib N({e.name})", lambda f=f: (
                classify.is_J_fibration_fibrant(f, config.lifting_budget).is_true, ""))
        if "ff_surjective" in e.tags:
            run.check(f"i-fib N({e.name})", lambda f=f: (
                classify.is_I_fibration(f, config.lifting_budget).is_true, ""))
    for name, C in sorted(corpus.categories.items()):
        def body(C=C):
            D = cat.categorify(cat.nerve_sset(C, corpus.nerve_bounds[0]), config.congruence_budget)
            return cat.find_isomorphism(D, C) is not None, f"{D.n_morphisms} morphisms"
        run.check(f"c(N{name})", body)
    return run.result


def _cospan_check(cs, corpus, config):
    b = corpus.nerve_bounds
    F, G = cs.iso, cs.other
    f, g = cat.nerve_functor(F, b), cat.nerve_functor(G, b)
    hp = holim.homotopy_pullback(f, g, config.lifting_budget)
    Q = holim.iso_comma_oracle(F, G)
    P, _, _ = cat.pullback_cat(F, G)
    h = segal.ho(hp.space).category
    iso = cat.find_isomorphism(h, P)
    if iso is None:
        return False, "ho of the strict pullback is not the strict pullback category"
    eq = cat.is_equivalence_cat(iso.then(holim.strict_to_iso_comma(F, G)))
    diagram = holim.cospan_diagram(F, G, b)
    bk = holim.bousfield_kan_holim(diagram, b, compare=True, budget=config.lifting_budget)
    to_bk = cat.nerve_functor(holim.strict_to_holim(diagram, bk.category), b)
    dk = segal.dk_equivalence(to_bk, "i", config.lifting_budget)
    ok = eq.is_true and dk.is_true and bk.comparison_verdict.is_true
    return ok, (f"ho(P) ~ iso-comma {_status(eq)} ({Q.n_objects} objects); "
                f"BK ~ P {_status(dk)}; BK ~ iso-comma {_status(bk.comparison_verdict)}")


def criterion_8(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(8)
    for cs in corpus.cospans:
        run.check(cs.name, lambda cs=cs: _cospan_check(cs, corpus, config))
    run.require(">= 5 cospans", len(corpus.cospans) >= 5)
    b = corpus.nerve_bounds
    for cs in corpus.negative_cospans:
        F, G = cs.iso, cs.other

        def refused(F=F, G=G):
            try:
                holim.homotopy_pullback(cat.nerve_functor(F, b), cat.nerve_functor(G, b), config.lifting_budget)
            except holim.HolimRefused as exc:
                return True, f"refused: {exc}"
            return False, "accepted a leg that is not an isofibration"
        run.check(f"refuse {cs.name}", refused)

        def group_count(F=F, G=G):
            Q = holim.iso_comma_oracle(F, G)
            E = F.target
            expected = len(E.hom(F.on_object(0), G.on_object(0)))
            bk = holim.bousfield_kan_holim(holim.cospan_diagram(F, G, b), b, budget=config.lifting_budget)
            ok = Q.n_objects == expected and bk.comparison_verdict.is_true
            return ok, f"iso-comma has {Q.n_objects} objects, |G| = {expected}"
        run.check(f"|G| objects {cs.name}", group_count)
    return run.result


def criterion_9(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(9)
    M = corpus.cosk_bounds[0]
    for name, p in sorted(corpus.kan_fibrations.items()):
        def body(p=p):
            surjective = not len(np.setdiff1d(np.arange(p.target.count((0,))), p[(0,)]))
            fib = ssets.is_fibration(p, budget=config.lifting_budget)
            if not (surjective and fib.is_true):
                return False, "input is not a surjective Kan fibration"
            f = bisimp.cosk0_map(p, M)
            ifib = classify.is_I_fibration(f, config.lifting_budget)
            seg = [segal.segal_check(Z, config.lifting_budget) for Z in (f.source, f.target)]
            ok = ifib.is_true and all(v.is_true for v in seg)
            return ok, f"I-fibration {_status(ifib)}, Segal {[_status(v) for v in seg]}"
        run.check(f"cosk0({name})", body)
    run.require(">= 3 fibrations", len(corpus.kan_fibrations) >= 3)
    return run.result


def _same_partition(a: np.ndarray, b: np.ndarray) -> bool:
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


def criterion_10(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(10)
    for name, X in sorted(corpus.segal_spaces().items()):
        def body(X=X):
            _segal_or_raise(X, config.lifting_budget)
            col = X.column(0)
            top = min(3, col.trunc_dim)
            inner = ssets.is_inner_fibration(ssets.to_point(col), max_dim=top, budget=config.lifting_budget)
            j = segal.joyal_homotopy_category(X)
            h = segal.ho(X)
            same = (j.category.n_objects == h.category.n_objects
                    and _same_partition(j.edge_class, h.edge_class)
                    and cat.find_isomorphism(j.category, h.category) is not None)
            return inner.is_true and same, f"inner horns to dim {top}: {_status(inner)}"
        run.check(name, body)
    return run.result


def criterion_11(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(11)
    for name, X in sorted(corpus.segal_spaces().items()):
        run.check(name, lambda X=X: (holim.check_IR_counit(X, config.lifting_budget).is_true, ""))
    return run.result


def run_fixture_check(kind: str, obj, budget: int) -> Verdict:
    if kind == "segal":
        return segal.segal_check(obj, budget)
    if kind == "counit":
        return holim.check_IR_counit(obj, budget)
    if kind == "dk":
        return segal.dk_equivalence(obj, "all", budget)
    if kind == "j-fib":
        return classify.is_J_fibration_fibrant(obj, budget)
    raise ValueError(f"unknown fixture check {kind!r}")


def criterion_12(corpus: Corpus, config: RunConfig) -> CriterionResult:
    run = _Runner(12)
    for fx in corpus.fixtures:
        def body(fx=fx):
            high = run_fixture_check(fx.check, fx.build(fx.high), config.lifting_budget)
            if not high.conclusive or high.is_true != fx.truth:
                return False, f"ground truth not reproduced at {fx.high}: {_status(high)}"
            low = run_fixture_check(fx.check, fx.build(fx.low), config.lifting_budget)
            return low.is_unknown, f"low {fx.low}: {_status(low)}; high {fx.high}: {_status(high)}"
        run.check(fx.name, body)
    run.require(">= 5 fixtures", len(corpus.fixtures) >= 5)
    return run.result


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 13)}


def corpus_errors_result(corpus: Corpus) -> CriterionResult | None:
    if not corpus.errors:
        return None
    res = CriterionResult(0, "corpus entries load")
    for instance, message in corpus.errors:
        res.records.append(Record(instance, False, message))
    return res


def run_suite(corpus: Corpus, config: RunConfig | None = None, only=None) -> list:
    config = config or RunConfig()
    results = []
    bad = corpus_errors_result(corpus)
    if bad is not None:
        results.append(bad)
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        results.append(fn(corpus, config))
    return results
