"""Homotopy pullbacks and Bousfield-Kan homotopy limits of diagrams of nerves."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import bisimp, cat, classify, segal, ssets
from .bisimp import BisimplicialMap, SimplicialSpace
from .cat import FinCategory, Functor
from .verdict import Verdict


class HolimRefused(ValueError):
    """A hypothesis needed for homotopy-correctness could not be certified."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


def functor_of_nerve_map(f: BisimplicialMap) -> Functor:
    """Recover the functor C -> D from a map of nerves NC -> ND."""
    if "functor" in (f.meta or {}):
        return f.meta["functor"]
    X, Y = f.source, f.target
    C, D = X.meta.get("category"), Y.meta.get("category")
    if C is None or D is None:
        raise HolimRefused("map is not between nerves of finite categories")
    obj = f[(0, 0)]
    mor = []
    for g in range(C.n_morphisms):
        cell = cat.chain_index(X, (int(C.src[g]), g))
        key = Y.label((1, 0), int(f[(1, 0)][cell]))[0]
        mor.append(key[1])
    return Functor(C, D, obj, mor)


@dataclass
class Diagram:
    """A functor from a finite shape into simplicial spaces.

    ``arrows[u]`` is the map for the morphism u of ``shape``.
    """

    shape: FinCategory
    objects: list
    arrows: dict

    def __post_init__(self):
        errors = self.errors()
        if errors:
            raise ValueError("; ".join(errors))

    def errors(self) -> list:
        S = self.shape
        errs = []
        for u in range(S.n_morphisms):
            f = self.arrows[u]
            if (f.source.counts != self.objects[int(S.src[u])].counts
                    or f.target.counts != self.objects[int(S.tgt[u])].counts):
                errs.append(f"arrow {S.morphisms[u]} has the wrong source or target")
            if S.is_identity(u) and not all(np.array_equal(f[d], np.arange(f.source.count(d)))
                                            for d in f.source.degrees()):
                errs.append(f"identity {S.morphisms[u]} is not sent to an identity")
        for g in range(S.n_morphisms):
            for u in range(S.n_morphisms):
                h = S.table[g, u]
                if h >= 0 and self.arrows[u].compose(self.arrows[g]) != self.arrows[int(h)]:
                    errs.append(f"composite {S.morphisms[g]} . {S.morphisms[u]} not preserved")
        return errs

    @classmethod
    def of_functors(cls, shape: FinCategory, categories: list, functors: dict, bounds=None):
        """Diagram of nerves from categories and functors (identities may be omitted)."""
        objects = [cat.nerve(C, bounds) for C in categories]
        arrows = {}
        for u in range(shape.n_morphisms):
            F = functors.get(u)
            if F is None:
                if not shape.is_identity(u):
                    raise ValueError(f"missing functor for {shape.morphisms[u]}")
                F = cat.identity_functor(categories[int(shape.src[u])])
            m = cat.nerve_functor(F, bounds)
            arrows[u] = BisimplicialMap(objects[int(shape.src[u])], objects[int(shape.tgt[u])],
                                        {d: m[d] for d in m.source.degrees()}, validate=False)
            arrows[u].meta = {"functor": F}
        return cls(shape, objects, arrows)

    def categories(self) -> list:
        out = []
        for X in self.objects:
            C = X.meta.get("category")
            if C is None or not X.is_space_discrete():
                raise HolimRefused("diagram object is not the nerve of a finite category")
            out.append(C)
        return out

    def functors(self) -> dict:
        return {u: functor_of_nerve_map(f) for u, f in self.arrows.items()}


def cospan_diagram(F: Functor, G: Functor, bounds=None) -> Diagram:
    """The diagram C -F-> E <-G- D over the shape a -> c <- b."""
    shape = cat.poset(["a", "b", "c"], lambda x, y: x == y or y == "c", name="cospan")
    f = shape.hom(shape.ob("a"), shape.ob("c"))[0]
    g = shape.hom(shape.ob("b"), shape.ob("c"))[0]
    return Diagram.of_functors(shape, [F.source, G.source, F.target], {f: F, g: G}, bounds)


# -- homotopy pullback along an isofibration -----------------------------------------

@dataclass
class HomotopyPullback:
    space: SimplicialSpace
    to_source: BisimplicialMap
    to_other: BisimplicialMap
    log: dict = field(default_factory=dict)


def homotopy_pullback(f: BisimplicialMap, g: BisimplicialMap,
                      budget: int = ssets.DEFAULT_BUDGET) -> HomotopyPullback:
    """The strict pullback of an isofibration f: X -> Y along g: Z -> Y.

    Refuses (HolimRefused) unless f is certified a J-fibration between Segal
    spaces and Z is certified a Segal space.
    """
    iso = classify.is_J_fibration_fibrant(f, budget)
    if not iso.is_true:
        raise HolimRefused(f"f is not certified an isofibration: {iso.summary()}", iso)
    seg = segal.segal_check(g.source, budget)
    if not seg.is_true:
        raise HolimRefused(f"the other leg's source is not certified Segal: {seg.summary()}", seg)
    P, px, pz = bisimp.pullback(f, g, with_maps=True)
    P.name = f"{f.source.name} x_{f.target.name} {g.source.name}"
    return HomotopyPullback(P, px, pz, {"isofibration": iso, "segal_other": seg})


def iso_comma_oracle(F: Functor, G: Functor) -> FinCategory:
    """Objects (c, d, phi: Fc -> Gd iso); morphisms (u, v) with phi' Fu = Gv phi."""
    C, D, E = F.source, G.source, F.target
    objs = [(c, d, phi) for c in range(C.n_objects) for d in range(D.n_objects)
            for phi in E.hom(F.on_object(c), G.on_object(d)) if E.is_iso(phi)]
    mors = []
    for a, (c, d, phi) in enumerate(objs):
        for b, (c2, d2, phi2) in enumerate(objs):
            for u in C.hom(c, c2):
                for v in D.hom(d, d2):
                    if E.table[phi2, F(u)] == E.table[G(v), phi]:
                        mors.append((a, b, u, v))
    index = {m: i for i, m in enumerate(mors)}
    n = len(mors)
    table = np.full((n, n), -1, dtype=np.int64)
    for j, (b, c, u2, v2) in enumerate(mors):
        for i, (a, b2, u, v) in enumerate(mors):
            if b2 == b:
                table[j, i] = index[(a, c, int(C.table[u2, u]), int(D.table[v2, v]))]
    ids = [index[(a, a, C.identity(c), D.identity(d))] for a, (c, d, _) in enumerate(objs)]
    Q = FinCategory([(C.objects[c], D.objects[d], E.morphisms[p]) for c, d, p in objs],
                    [(a, b, C.morphisms[u], D.morphisms[v]) for a, b, u, v in mors],
                    [a for a, _, _, _ in mors], [b for _, b, _, _ in mors], ids, table,
                    name=f"{C.name} x~_{E.name} {D.name}")
    Q.raw_objects, Q.raw_morphisms = objs, mors
    return Q


def strict_to_iso_comma(F: Functor, G: Functor) -> Functor:
    """The strict pullback of categories into the iso-comma, with identity isos."""
    P, p1, p2 = cat.pullback_cat(F, G)
    Q = iso_comma_oracle(F, G)
    E = F.target
    obj_index = {o: q for q, o in enumerate(Q.raw_objects)}
    mor_index = {m: k for k, m in enumerate(Q.raw_morphisms)}
    obj = [obj_index[(p1.on_object(x), p2.on_object(x), E.identity(F.on_object(p1.on_object(x))))]
           for x in range(P.n_objects)]
    mor = [mor_index[(obj[int(P.src[g])], obj[int(P.tgt[g])], p1(g), p2(g))] for g in range(P.n_morphisms)]
    return Functor(P, Q, obj, mor)


# -- Bousfield-Kan homotopy limit -------------------------------------------------

def _groupoid_functors(D: FinCategory, k: int) -> list:
    """Functors from the indiscrete groupoid on k objects into D.

    Each is (objects, isos) with isos[i] : objects[0] -> objects[i]; the
    value on i -> j is isos[j] . isos[i]^-1.
    """
    if k == 0:
        return [((), ())]
    isos = D.isos()
    out = []
    for x0 in range(D.n_objects):
        choices = [[D.identity(x0)]] + [[f for f in isos if D.src[f] == x0]] * (k - 1)
        for phis in itertools.product(*choices):
            out.append((tuple(int(D.tgt[f]) for f in phis), tuple(int(f) for f in phis)))
    return out


def _value(D: FinCategory, F, i: int, j: int) -> int:
    """F applied to the arrow i -> j of the indiscrete groupoid."""
    _, phis = F
    return int(D.table[phis[j], D.inverse(phis[i])])


@dataclass
class _EndData:
    shape: FinCategory
    cats: list
    functors: dict
    slices: list
    pushes: dict


def _end_data(diagram: Diagram) -> _EndData:
    S = diagram.shape
    cats = diagram.categories()
    functors = diagram.functors()
    slices = [[u for u in range(S.n_morphisms) if S.tgt[u] == c] for c in range(S.n_objects)]
    pos = [{u: i for i, u in enumerate(sl)} for sl in slices]
    pushes = {}
    for a in range(S.n_morphisms):
        c, c2 = int(S.src[a]), int(S.tgt[a])
        pushes[a] = [pos[c2][int(S.table[a, u])] for u in slices[c]]
    return _EndData(S, cats, functors, slices, pushes)


def end_category(diagram: Diagram, name=None) -> FinCategory:
    """The end over c of X(c)^{Pi(C/c)} for a diagram of categories, where
    Pi(C/c) is the groupoid reflection of the slice (indiscrete, as C/c has a
    terminal object).  Its nerve is the Bousfield-Kan homotopy limit."""
    data = _end_data(diagram)
    S, cats, fun, slices, pushes = data.shape, data.cats, data.functors, data.slices, data.pushes
    per_c = [_groupoid_functors(cats[c], len(slices[c])) for c in range(S.n_objects)]
    arrows_at = {c: [a for a in range(S.n_morphisms) if not S.is_identity(a)
                     and max(int(S.src[a]), int(S.tgt[a])) == c] for c in range(S.n_objects)}

    def compatible(choice, c):
        for a in arrows_at[c]:
            s, t = int(S.src[a]), int(S.tgt[a])
            Fs, Ft = choice[s], choice[t]
            Da, Dt = fun[a], cats[t]
            push = pushes[a]
            k = len(slices[s])
            for i in range(k):
                if Da.on_object(Fs[0][i]) != Ft[0][push[i]]:
                    return False
                for j in range(k):
                    if Da(_value(cats[s], Fs, i, j)) != _value(Dt, Ft, push[i], push[j]):
                        return False
        return True

    objects = []

    def rec(c, choice):
        if c == S.n_objects:
            objects.append(tuple(choice))
            return
        for F in per_c[c]:
            choice.append(F)
            if compatible(choice, c):
                rec(c + 1, choice)
            choice.pop()

    rec(0, [])

    # a natural transformation out of an indiscrete groupoid is fixed by its
    # component at the first object
    def components(c, F, G, theta0):
        Dc = cats[c]
        return [int(Dc.table[_value(Dc, G, 0, i), Dc.table[theta0, _value(Dc, F, i, 0)]])
                for i in range(len(slices[c]))]

    morphisms = []
    for p, Fam in enumerate(objects):
        for q, Gam in enumerate(objects):
            opts = []
            for c in range(S.n_objects):
                if not slices[c]:
                    opts.append([()])
                    continue
                Dc = cats[c]
                opts.append([tuple(components(c, Fam[c], Gam[c], th))
                             for th in Dc.hom(Fam[c][0][0], Gam[c][0][0])])
            for comps in itertools.product(*opts):
                ok = all(fun[a](comps[int(S.src[a])][i]) == comps[int(S.tgt[a])][pushes[a][i]]
                         for a in range(S.n_morphisms) for i in range(len(slices[int(S.src[a])])))
                if ok:
                    morphisms.append((p, q, comps))
    index = {m: i for i, m in enumerate(morphisms)}
    n = len(morphisms)
    table = np.full((n, n), -1, dtype=np.int64)
    for j, (q, r, g) in enumerate(morphisms):
        for i, (p, q2, f) in enumerate(morphisms):
            if q2 == q:
                comp = tuple(tuple(int(cats[c].table[gc, fc]) for gc, fc in zip(g[c], f[c]))
                             for c in range(S.n_objects))
                table[j, i] = index[(p, r, comp)]
    ids = []
    for p, Fam in enumerate(objects):
        comp = tuple(tuple(cats[c].identity(x) for x in Fam[c][0]) for c in range(S.n_objects))
        ids.append(index[(p, p, comp)])
    E = FinCategory(objects, morphisms, [p for p, _, _ in morphisms], [q for _, q, _ in morphisms],
                    ids, table, name=name or f"end({S.name})")
    E.slices = slices
    return E


@dataclass
class HolimResult:
    space: SimplicialSpace
    category: FinCategory
    comparison: Functor | None = None
    comparison_verdict: Verdict | None = None


def _cospan_legs(diagram: Diagram):
    S = diagram.shape
    arrows = [u for u in range(S.n_morphisms) if not S.is_identity(u)]
    if S.n_objects != 3 or len(arrows) != 2:
        return None
    f, g = arrows
    if S.tgt[f] != S.tgt[g] or S.src[f] == S.src[g] or S.src[f] == S.tgt[f] or S.src[g] == S.tgt[g]:
        return None
    return f, g


def holim_to_iso_comma(E: FinCategory, diagram: Diagram, f: int, g: int) -> Functor:
    """For a cospan a -f-> c <-g- b: (x_a, x_b, Phi) -> (x_a, x_b, Phi(f -> g))."""
    S = diagram.shape
    fun = diagram.functors()
    F, G = fun[f], fun[g]
    a, b, c = int(S.src[f]), int(S.src[g]), int(S.tgt[f])
    Q = iso_comma_oracle(F, G)
    i_f, i_g = E.slices[c].index(f), E.slices[c].index(g)
    Ec = F.target
    obj_index = {o: q for q, o in enumerate(Q.raw_objects)}
    mor_index = {m: k for k, m in enumerate(Q.raw_morphisms)}
    obj = []
    for Fam in E.objects:
        phi = _value(Ec, Fam[c], i_f, i_g)
        obj.append(obj_index[(Fam[a][0][0], Fam[b][0][0], phi)])
    mor = [mor_index[(obj[p], obj[q], comps[a][0], comps[b][0])] for p, q, comps in E.morphisms]
    return Functor(E, Q, obj, mor)


def bousfield_kan_holim(diagram: Diagram, bounds=None, compare: bool = True,
                        budget: int = ssets.DEFAULT_BUDGET) -> HolimResult:
    """holim_C X as the end of X(c)^{N(C/c)}, for a diagram of nerves.

    A cotensor X^K is the limit of X^{NI[m]} over the simplices of K, and
    for X = ND this is N(D^{Pi K}).  The end is computed on categories and
    then nerved.  For a cospan the result is compared with the iso-comma
    category by a Dwyer-Kan equivalence check of the nerve of the
    comparison functor.
    """
    bounds = bounds or diagram.objects[0].bounds
    E = end_category(diagram)
    X = cat.nerve(E, bounds)
    out = HolimResult(X, E)
    legs = _cospan_legs(diagram)
    if compare and legs is not None:
        phi = holim_to_iso_comma(E, diagram, *legs)
        out.comparison = phi
        out.comparison_verdict = segal.dk_equivalence(cat.nerve_functor(phi, bounds), "i", budget)
    return out


def strict_to_holim(diagram: Diagram, E: FinCategory | None = None) -> Functor:
    """For a cospan, the strict pullback into the end by constant families."""
    legs = _cospan_legs(diagram)
    if legs is None:
        raise ValueError("strict comparison is defined for cospans")
    f, g = legs
    S = diagram.shape
    fun = diagram.functors()
    F, G = fun[f], fun[g]
    a, b, c = int(S.src[f]), int(S.src[g]), int(S.tgt[f])
    E = E or end_category(diagram)
    P, p1, p2 = cat.pullback_cat(F, G)
    obj_index = {o: i for i, o in enumerate(E.objects)}
    mor_index = {m: i for i, m in enumerate(E.morphisms)}
    k = len(E.slices[c])
    Dc = F.target

    def family(x_a, x_b):
        y = F.on_object(x_a)
        parts = [None, None, None]
        parts[a] = ((x_a,), (F.source.identity(x_a),))
        parts[b] = ((x_b,), (G.source.identity(x_b),))
        parts[c] = ((y,) * k, (Dc.identity(y),) * k)
        return tuple(parts)

    obj = [obj_index[family(p1.on_object(x), p2.on_object(x))] for x in range(P.n_objects)]
    mor = []
    for h in range(P.n_morphisms):
        u, v = p1(h), p2(h)
        comps = [None, None, None]
        comps[a], comps[b], comps[c] = (u,), (v,), (F(u),) * k
        mor.append(mor_index[(obj[int(P.src[h])], obj[int(P.tgt[h])], tuple(comps))])
    return Functor(P, E, obj, mor)


def check_IR_counit(X: SimplicialSpace, budget: int = ssets.DEFAULT_BUDGET) -> Verdict:
    """Dwyer-Kan check of the counit R X -> X of the reduction."""
    v = segal.segal_check(X, budget)
    if not v.is_true:
        return Verdict.unknown(f"X is not known to be a Segal space: {v.summary()}")
    red = bisimp.reduce_R(X, with_counit=True)
    return segal.dk_equivalence(red.counit, "all", budget)
