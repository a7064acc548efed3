"""Finite categories, functors, nerves and categorification."""

from __future__ import annotations

import heapq
import itertools
from typing import Hashable, Sequence

import numpy as np

from . import _core, ssets
from .bisimp import (DEFAULT_BOUNDS, BisimplicialMap, SimplicialSpace, cat_constant,
                     external_map)
from .ssets import SimplicialMap, TruncatedSimplicialSet
from .verdict import Verdict


class CategoryError(ValueError):
    pass


class CongruenceBudgetExceeded(RuntimeError):
    pass


class FinCategory:
    """A finite category given by an explicit composition table.

    ``table[g, f]`` is the index of ``g . f`` (f first) or -1 when the
    pair is not composable.
    """

    def __init__(self, objects: Sequence[Hashable], morphisms: Sequence[Hashable],
                 src: Sequence[int], tgt: Sequence[int], identities: Sequence[int],
                 table, name: str = "", validate: bool = True):
        self.objects = list(objects)
        self.morphisms = list(morphisms)
        self.src = np.asarray(src, dtype=np.int64)
        self.tgt = np.asarray(tgt, dtype=np.int64)
        self.identities = np.asarray(identities, dtype=np.int64)
        self.table = np.asarray(table, dtype=np.int64).reshape(len(self.morphisms), len(self.morphisms))
        self.name = name
        self._ob_index = {o: i for i, o in enumerate(self.objects)}
        self._mor_index = {m: i for i, m in enumerate(self.morphisms)}
        self._homs = None
        if validate:
            errors = self.errors()
            if errors:
                raise CategoryError("; ".join(errors[:5]))

    # -- access ----------------------------------------------------------
    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def ob(self, label) -> int:
        return self._ob_index[label]

    def mor(self, label) -> int:
        return self._mor_index[label]

    def compose(self, g: int, f: int) -> int:
        h = int(self.table[g, f])
        if h < 0:
            raise CategoryError(f"{self.morphisms[g]} . {self.morphisms[f]} not composable")
        return h

    def identity(self, x: int) -> int:
        return int(self.identities[x])

    def hom(self, x: int, y: int) -> list:
        if self._homs is None:
            self._homs = {}
            for f in range(self.n_morphisms):
                self._homs.setdefault((int(self.src[f]), int(self.tgt[f])), []).append(f)
        return self._homs.get((x, y), [])

    def is_identity(self, f: int) -> bool:
        return int(self.identities[self.src[f]]) == f

    def inverse(self, f: int):
        x, y = int(self.src[f]), int(self.tgt[f])
        for g in self.hom(y, x):
            if self.table[g, f] == self.identities[x] and self.table[f, g] == self.identities[y]:
                return g
        return None

    def is_iso(self, f: int) -> bool:
        return self.inverse(f) is not None

    def isos(self) -> list:
        return [f for f in range(self.n_morphisms) if self.is_iso(f)]

    def is_groupoid(self) -> bool:
        return all(self.is_iso(f) for f in range(self.n_morphisms))

    def only_identities(self) -> bool:
        return all(self.is_identity(f) for f in range(self.n_morphisms))

    # -- validation ------------------------------------------------------
    def errors(self) -> list:
        errs = []
        n = self.n_morphisms
        if len(self.src) != n or len(self.tgt) != n:
            return ["source/target arrays have the wrong length"]
        if len(self.identities) != self.n_objects:
            return ["one identity per object required"]
        for x, e in enumerate(self.identities.tolist()):
            if not (0 <= e < n) or self.src[e] != x or self.tgt[e] != x:
                errs.append(f"identity of {self.objects[x]} is not an endomorphism of it")
        if errs:
            return errs
        composable = self.tgt[:, None] == self.src[None, :]   # [f, g]: g after f
        defined = (self.table.T >= 0)
        if (composable != defined).any():
            f, g = np.argwhere(composable != defined)[0]
            return [f"composition {self.morphisms[g]} . {self.morphisms[f]} is "
                    + ("missing" if composable[f, g] else "defined for a non-composable pair")]
        gs, fs = np.nonzero(self.table >= 0)
        hs = self.table[gs, fs]
        if ((self.src[hs] != self.src[fs]) | (self.tgt[hs] != self.tgt[gs])).any():
            return ["a composite has the wrong source or target"]
        for f in range(n):
            if self.table[f, self.identities[self.src[f]]] != f or self.table[self.identities[self.tgt[f]], f] != f:
                errs.append(f"unit law fails for {self.morphisms[f]}")
        if errs:
            return errs
        # associativity: h.(g.f) = (h.g).f over all composable triples
        for g in range(n):
            fs_ = np.flatnonzero(self.table[g] >= 0)
            hs_ = np.flatnonzero(self.table[:, g] >= 0)
            if len(fs_) == 0 or len(hs_) == 0:
                continue
            gf = self.table[g, fs_]
            hg = self.table[hs_, g]
            left = self.table[np.ix_(hs_, gf)]
            right = self.table[np.ix_(hg, fs_)]
            if not np.array_equal(left, right):
                errs.append(f"associativity fails around {self.morphisms[g]}")
                break
        return errs

    def __repr__(self):
        return f"<FinCategory {self.name} objects={self.n_objects} morphisms={self.n_morphisms}>"


def from_labels(objects: Sequence, arrows: dict, identities: dict, compose: dict,
                name="", validate=True) -> FinCategory:
    """Build from labels: ``arrows[f] = (src, tgt)``, ``identities[x] = f`` and
    ``compose[(g, f)] = h`` meaning g . f = h."""
    labels = list(arrows)
    index = {l: i for i, l in enumerate(labels)}
    obj_index = {o: i for i, o in enumerate(objects)}
    n = len(labels)
    table = np.full((n, n), -1, dtype=np.int64)
    for (g, f), h in compose.items():
        table[index[g], index[f]] = index[h]
    return FinCategory(objects, labels, [obj_index[arrows[l][0]] for l in labels],
                       [obj_index[arrows[l][1]] for l in labels],
                       [index[identities[o]] for o in objects], table, name=name, validate=validate)


# -- standard categories -----------------------------------------------------

def poset(objects: Sequence, leq, name="") -> FinCategory:
    """The category of a finite poset: one arrow x -> y when x <= y."""
    objs = list(objects)
    mors = [(x, y) for x in objs for y in objs if leq(x, y)]
    index = {m: i for i, m in enumerate(mors)}
    oi = {o: i for i, o in enumerate(objs)}
    n = len(mors)
    table = np.full((n, n), -1, dtype=np.int64)
    for g, (b, c) in enumerate(mors):
        for f, (a, b2) in enumerate(mors):
            if b2 == b:
                table[g, f] = index[(a, c)]
    return FinCategory(objs, mors, [oi[a] for a, _ in mors], [oi[b] for _, b in mors],
                       [index[(o, o)] for o in objs], table, name=name)


def make_ordinal(n: int) -> FinCategory:
    """The poset [n] = {0 < 1 < ... < n}."""
    return poset(range(n + 1), lambda a, b: a <= b, name=f"[{n}]")


def terminal() -> FinCategory:
    return make_ordinal(0)


def make_I(m: int) -> FinCategory:
    """The contractible groupoid on m+1 objects."""
    return poset(range(m + 1), lambda a, b: True, name=f"I[{m}]")


def indiscrete(objects: Sequence, name="") -> FinCategory:
    return poset(objects, lambda a, b: True, name=name or "indiscrete")


def discrete(objects: Sequence, name="") -> FinCategory:
    return poset(objects, lambda a, b: a == b, name=name or "discrete")


def from_group(elements: Sequence, mult, name="BG") -> FinCategory:
    """One-object category with morphisms the group elements."""
    els = list(elements)
    index = {g: i for i, g in enumerate(els)}
    n = len(els)
    table = np.array([[index[mult(g, f)] for f in els] for g in els], dtype=np.int64)
    unit = [g for g in els if all(mult(g, h) == h for h in els)]
    return FinCategory(["*"], els, [0] * n, [0] * n, [index[unit[0]]], table, name=name)


def cyclic_group(n: int) -> FinCategory:
    return from_group(range(n), lambda a, b: (a + b) % n, name=f"B(Z/{n})")


def symmetric_group_3() -> FinCategory:
    perms = list(itertools.permutations(range(3)))
    return from_group(perms, lambda g, f: tuple(g[f[i]] for i in range(3)), name="B(S3)")


def product_cat(C: FinCategory, D: FinCategory) -> FinCategory:
    objs = [(a, b) for a in C.objects for b in D.objects]
    mors = [(f, g) for f in range(C.n_morphisms) for g in range(D.n_morphisms)]
    nd = D.n_morphisms
    n = len(mors)
    table = np.full((n, n), -1, dtype=np.int64)
    tc = C.table
    td = D.table
    for i, (g1, g2) in enumerate(mors):
        for j, (f1, f2) in enumerate(mors):
            a, b = tc[g1, f1], td[g2, f2]
            if a >= 0 and b >= 0:
                table[i, j] = a * nd + b
    src = [C.src[f] * D.n_objects + D.src[g] for f, g in mors]
    tgt = [C.tgt[f] * D.n_objects + D.tgt[g] for f, g in mors]
    ids = [C.identities[x] * nd + D.identities[y] for x in range(C.n_objects) for y in range(D.n_objects)]
    labels = [(C.morphisms[f], D.morphisms[g]) for f, g in mors]
    return FinCategory(objs, labels, src, tgt, ids, table, name=f"{C.name}x{D.name}")


def coproduct_cat(C: FinCategory, D: FinCategory) -> FinCategory:
    objs = [("L", o) for o in C.objects] + [("R", o) for o in D.objects]
    mors = [("L", m) for m in C.morphisms] + [("R", m) for m in D.morphisms]
    nc, n = C.n_morphisms, C.n_morphisms + D.n_morphisms
    table = np.full((n, n), -1, dtype=np.int64)
    table[:nc, :nc] = C.table
    sub = D.table.copy()
    sub[sub >= 0] += nc
    table[nc:, nc:] = sub
    src = list(C.src) + [s + C.n_objects for s in D.src]
    tgt = list(C.tgt) + [t + C.n_objects for t in D.tgt]
    ids = list(C.identities) + [i + nc for i in D.identities]
    return FinCategory(objs, mors, src, tgt, ids, table, name=f"{C.name}+{D.name}")


# -- functors ------------------------------------------------------------------

class Functor:
    """Object and morphism maps (as index arrays) between finite categories."""

    def __init__(self, source: FinCategory, target: FinCategory, obj_map, mor_map,
                 name: str = "", validate: bool = True):
        self.source = source
        self.target = target
        self.obj_map = np.asarray(obj_map, dtype=np.int64)
        self.mor_map = np.asarray(mor_map, dtype=np.int64)
        self.name = name
        if validate:
            errors = self.errors()
            if errors:
                raise CategoryError("; ".join(errors[:5]))

    def errors(self) -> list:
        C, D = self.source, self.target
        if self.obj_map.shape != (C.n_objects,) or self.mor_map.shape != (C.n_morphisms,):
            return ["functor arrays have the wrong shape"]
        F, G = self.obj_map, self.mor_map
        errs = []
        if (D.src[G] != F[C.src]).any() or (D.tgt[G] != F[C.tgt]).any():
            errs.append("sources or targets not preserved")
        if (G[C.identities] != D.identities[F]).any():
            errs.append("identities not preserved")
        if errs:
            return errs
        gs, fs = np.nonzero(C.table >= 0)
        if (G[C.table[gs, fs]] != D.table[G[gs], G[fs]]).any():
            errs.append("composition not preserved")
        return errs

    def __call__(self, f: int) -> int:
        return int(self.mor_map[f])

    def on_object(self, x: int) -> int:
        return int(self.obj_map[x])

    def then(self, other: "Functor") -> "Functor":
        """``other`` after ``self``."""
        return Functor(self.source, other.target, other.obj_map[self.obj_map],
                       other.mor_map[self.mor_map], validate=False)

    def is_isomorphism(self) -> bool:
        return (len(set(self.obj_map.tolist())) == self.target.n_objects == self.source.n_objects
                and len(set(self.mor_map.tolist())) == self.target.n_morphisms == self.source.n_morphisms)

    def __eq__(self, other):
        return (isinstance(other, Functor) and np.array_equal(self.obj_map, other.obj_map)
                and np.array_equal(self.mor_map, other.mor_map))

    def __hash__(self):
        return hash((tuple(self.obj_map.tolist()), tuple(self.mor_map.tolist())))


def identity_functor(C: FinCategory) -> Functor:
    return Functor(C, C, np.arange(C.n_objects), np.arange(C.n_morphisms), validate=False)


def to_terminal(C: FinCategory, T: FinCategory | None = None) -> Functor:
    T = T or terminal()
    return Functor(C, T, np.zeros(C.n_objects), np.zeros(C.n_morphisms))


def object_functor(C: FinCategory, x: int, T: FinCategory | None = None) -> Functor:
    """The functor from the terminal category picking the object x."""
    T = T or terminal()
    return Functor(T, C, [x], [C.identity(x)])


def subcategory_inclusion(C: FinCategory, objects, morphisms, name="") -> tuple:
    """Subcategory on the given object and morphism indices, with its inclusion."""
    objects = sorted(objects)
    morphisms = sorted(morphisms)
    oi = {o: i for i, o in enumerate(objects)}
    mi = {m: i for i, m in enumerate(morphisms)}
    n = len(morphisms)
    table = np.full((n, n), -1, dtype=np.int64)
    for g in morphisms:
        for f in morphisms:
            h = C.table[g, f]
            if h >= 0:
                if int(h) not in mi:
                    raise CategoryError("subcategory not closed under composition")
                table[mi[g], mi[f]] = mi[int(h)]
    S = FinCategory([C.objects[o] for o in objects], [C.morphisms[m] for m in morphisms],
                    [oi[int(C.src[m])] for m in morphisms], [oi[int(C.tgt[m])] for m in morphisms],
                    [mi[C.identity(o)] for o in objects], table, name=name or f"sub({C.name})")
    return S, Functor(S, C, objects, morphisms, validate=False)


def core(C: FinCategory) -> tuple:
    """Maximal subgroupoid and its inclusion."""
    return subcategory_inclusion(C, range(C.n_objects), C.isos(), name=f"core({C.name})")


# -- functor enumeration and functor categories --------------------------------

def enumerate_functors(D: FinCategory, C: FinCategory, limit: int | None = None):
    """All functors D -> C, by backtracking over an object map and all morphisms."""
    out = []
    morph_order = [f for f in range(D.n_morphisms) if not D.is_identity(f)]
    for objs in itertools.product(range(C.n_objects), repeat=D.n_objects):
        mor = np.full(D.n_morphisms, -1, dtype=np.int64)
        for x in range(D.n_objects):
            mor[D.identity(x)] = C.identity(objs[x])

        def consistent(f):
            # check all composites involving f whose parts are assigned
            for g in np.flatnonzero(D.table[:, f] >= 0).tolist():
                if mor[g] >= 0:
                    h = D.table[g, f]
                    if mor[h] >= 0 and C.table[mor[g], mor[f]] != mor[h]:
                        return False
            for e in np.flatnonzero(D.table[f] >= 0).tolist():
                if mor[e] >= 0:
                    h = D.table[f, e]
                    if mor[h] >= 0 and C.table[mor[f], mor[e]] != mor[h]:
                        return False
            for g in range(D.n_morphisms):
                for e in np.flatnonzero(D.table[g] == f).tolist():
                    if mor[g] >= 0 and mor[e] >= 0 and C.table[mor[g], mor[e]] != mor[f]:
                        return False
            return True

        def rec(pos):
            if pos == len(morph_order):
                out.append(Functor(D, C, list(objs), mor.copy(), validate=False))
                return limit is not None and len(out) >= limit
            f = morph_order[pos]
            for cand in C.hom(objs[D.src[f]], objs[D.tgt[f]]):
                mor[f] = cand
                if consistent(f) and rec(pos + 1):
                    return True
            mor[f] = -1
            return False

        if rec(0):
            break
    return out


def natural_transformations(F: Functor, G: Functor) -> list:
    """All families of components making the naturality squares commute."""
    D, C = F.source, F.target
    comps = [C.hom(F.on_object(x), G.on_object(x)) for x in range(D.n_objects)]
    out = []
    for choice in itertools.product(*comps):
        ok = True
        for f in range(D.n_morphisms):
            a, b = int(D.src[f]), int(D.tgt[f])
            if C.table[choice[b], F(f)] != C.table[G(f), choice[a]]:
                ok = False
                break
        if ok:
            out.append(tuple(choice))
    return out


def functor_category(C: FinCategory, D: FinCategory, name=None) -> FinCategory:
    """C^D: functors D -> C and natural transformations."""
    functors = enumerate_functors(D, C)
    arrows = []
    for a, F in enumerate(functors):
        for b, G in enumerate(functors):
            for alpha in natural_transformations(F, G):
                arrows.append((a, b, alpha))
    index = {arr: i for i, arr in enumerate(arrows)}
    n = len(arrows)
    table = np.full((n, n), -1, dtype=np.int64)
    for g, (b, c, beta) in enumerate(arrows):
        for f, (a, b2, alpha) in enumerate(arrows):
            if b2 == b:
                comp = tuple(int(C.table[beta[x], alpha[x]]) for x in range(D.n_objects))
                table[g, f] = index[(a, c, comp)]
    ids = [index[(a, a, tuple(C.identity(F.on_object(x)) for x in range(D.n_objects)))]
           for a, F in enumerate(functors)]
    obj_labels = [tuple(F.mor_map.tolist()) for F in functors]
    E = FinCategory(obj_labels, arrows, [a for a, _, _ in arrows], [b for _, b, _ in arrows],
                    ids, table, name=name or f"{C.name}^{D.name}")
    E.functors = functors
    return E


def slice_category(C: FinCategory, c: int) -> FinCategory:
    """C/c: arrows into c, and commuting triangles."""
    objs = [f for f in range(C.n_morphisms) if C.tgt[f] == c]
    arrows = []
    for a in objs:
        for b in objs:
            for g in C.hom(int(C.src[a]), int(C.src[b])):
                if C.table[b, g] == a:
                    arrows.append((a, b, g))
    index = {arr: i for i, arr in enumerate(arrows)}
    oi = {o: i for i, o in enumerate(objs)}
    n = len(arrows)
    table = np.full((n, n), -1, dtype=np.int64)
    for j, (b, cc, h) in enumerate(arrows):
        for i, (a, b2, g) in enumerate(arrows):
            if b2 == b:
                table[j, i] = index[(a, cc, int(C.table[h, g]))]
    ids = [index[(a, a, C.identity(int(C.src[a])))] for a in objs]
    return FinCategory([C.morphisms[a] for a in objs], [(C.morphisms[a], C.morphisms[b], C.morphisms[g])
                                                        for a, b, g in arrows],
                       [oi[a] for a, _, _ in arrows], [oi[b] for _, b, _ in arrows], ids, table,
                       name=f"{C.name}/{C.objects[c]}")


def pullback_cat(F: Functor, G: Functor) -> tuple:
    """Strict pullback C x_E D with its two projections."""
    C, D = F.source, G.source
    objs = [(a, b) for a in range(C.n_objects) for b in range(D.n_objects) if F.obj_map[a] == G.obj_map[b]]
    mors = [(f, g) for f in range(C.n_morphisms) for g in range(D.n_morphisms) if F.mor_map[f] == G.mor_map[g]]
    oi = {o: i for i, o in enumerate(objs)}
    mi = {m: i for i, m in enumerate(mors)}
    n = len(mors)
    table = np.full((n, n), -1, dtype=np.int64)
    for j, (g1, g2) in enumerate(mors):
        for i, (f1, f2) in enumerate(mors):
            a, b = C.table[g1, f1], D.table[g2, f2]
            if a >= 0 and b >= 0:
                table[j, i] = mi[(int(a), int(b))]
    P = FinCategory([(C.objects[a], D.objects[b]) for a, b in objs],
                    [(C.morphisms[f], D.morphisms[g]) for f, g in mors],
                    [oi[(int(C.src[f]), int(D.src[g]))] for f, g in mors],
                    [oi[(int(C.tgt[f]), int(D.tgt[g]))] for f, g in mors],
                    [mi[(C.identity(a), D.identity(b))] for a, b in objs], table,
                    name=f"{C.name}x_{F.target.name}{D.name}")
    p1 = Functor(P, C, [a for a, _ in objs], [f for f, _ in mors], validate=False)
    p2 = Functor(P, D, [b for _, b in objs], [g for _, g in mors], validate=False)
    return P, p1, p2


# -- classifiers ---------------------------------------------------------------

def is_fully_faithful_cat(F: Functor) -> Verdict:
    C, D = F.source, F.target
    for x in range(C.n_objects):
        for y in range(C.n_objects):
            image = [F(f) for f in C.hom(x, y)]
            target = D.hom(F.on_object(x), F.on_object(y))
            if len(set(image)) != len(image):
                return Verdict.false({"not_faithful": (C.objects[x], C.objects[y])},
                                     "two morphisms have the same image")
            if len(image) != len(target):
                return Verdict.false({"not_full": (C.objects[x], C.objects[y])},
                                     "a morphism of the target has no preimage")
    return Verdict.true({"hom_bijections": C.n_objects ** 2})


def iso_closure(C: FinCategory, objects) -> set:
    """Objects isomorphic to some object in ``objects`` (fixpoint iteration)."""
    reached = set(objects)
    isos = [(int(C.src[f]), int(C.tgt[f])) for f in C.isos()]
    changed = True
    while changed:
        changed = False
        for a, b in isos:
            if a in reached and b not in reached:
                reached.add(b)
                changed = True
    return reached


def is_ess_surjective(F: Functor) -> Verdict:
    D = F.target
    reached = iso_closure(D, set(F.obj_map.tolist()))
    missing = [y for y in range(D.n_objects) if y not in reached]
    if missing:
        return Verdict.false({"missed_object": D.objects[missing[0]]}, "object not in the essential image")
    return Verdict.true({"essential_image": sorted(reached)})


def is_equivalence_cat(F: Functor) -> Verdict:
    ff = is_fully_faithful_cat(F)
    if ff.is_false:
        return ff
    es = is_ess_surjective(F)
    if es.is_false:
        return es
    return Verdict.true({"fully_faithful": ff.witness, "essentially_surjective": es.witness})


def is_surjective_on_objects(F: Functor) -> bool:
    return len(set(F.obj_map.tolist())) == F.target.n_objects


def is_isofibration_cat(F: Functor) -> Verdict:
    """Every iso out of F(c) lifts to an iso out of c."""
    C, D = F.source, F.target
    source_isos = C.isos()
    for c in range(C.n_objects):
        for u in D.isos():
            if D.src[u] != F.on_object(c):
                continue
            if not any(C.src[v] == c and F(v) == u for v in source_isos):
                return Verdict.false({"object": C.objects[c], "iso": D.morphisms[u]},
                                     "an isomorphism has no lift")
    return Verdict.true({"lifted_isos": True})


def is_isomorphism_of_categories(F: Functor) -> bool:
    return F.is_isomorphism()


def find_isomorphism(C: FinCategory, D: FinCategory, obj_map=None):
    """Search an isomorphism of categories C -> D (None if there is none)."""
    if C.n_objects != D.n_objects or C.n_morphisms != D.n_morphisms:
        return None
    n = C.n_objects

    def profile(K, x):
        return (len(K.hom(x, x)), sorted(len(K.hom(x, y)) for y in range(K.n_objects)),
                sorted(len(K.hom(y, x)) for y in range(K.n_objects)))

    cand = [[y for y in range(n) if profile(C, x) == profile(D, y)] for x in range(n)]
    obj_choices = [tuple(obj_map)] if obj_map is not None else None

    def object_maps():
        if obj_choices is not None:
            yield from obj_choices
            return
        used = set()
        assign = [-1] * n

        def rec(i):
            if i == n:
                yield tuple(assign)
                return
            for y in cand[i]:
                if y in used:
                    continue
                if any(len(C.hom(i, j)) != len(D.hom(y, assign[j])) or
                       len(C.hom(j, i)) != len(D.hom(assign[j], y)) for j in range(i)):
                    continue
                used.add(y)
                assign[i] = y
                yield from rec(i + 1)
                used.discard(y)
                assign[i] = -1

        yield from rec(0)

    for om in object_maps():
        F = _match_morphisms(C, D, list(om))
        if F is not None:
            return F
    return None


def _match_morphisms(C: FinCategory, D: FinCategory, om):
    mor = np.full(C.n_morphisms, -1, dtype=np.int64)
    used = np.zeros(D.n_morphisms, dtype=bool)
    for x in range(C.n_objects):
        if len(C.hom(x, x)) != len(D.hom(om[x], om[x])):
            return None
        mor[C.identity(x)] = D.identity(om[x])
        used[D.identity(om[x])] = True
    order = [f for f in range(C.n_morphisms) if mor[f] < 0]

    def propagate(trail):
        # close under composition: forced images of composites
        changed = True
        while changed:
            changed = False
            gs, fs = np.nonzero((C.table >= 0) & (mor[:, None] >= 0) & (mor[None, :] >= 0))
            for g, f in zip(gs.tolist(), fs.tolist()):
                h = int(C.table[g, f])
                val = int(D.table[mor[g], mor[f]])
                if mor[h] < 0:
                    if used[val]:
                        return False
                    mor[h] = val
                    used[val] = True
                    trail.append(h)
                    changed = True
                elif mor[h] != val:
                    return False
        return True

    def rec(pos):
        while pos < len(order) and mor[order[pos]] >= 0:
            pos += 1
        if pos == len(order):
            return True
        f = order[pos]
        for cand in D.hom(om[int(C.src[f])], om[int(C.tgt[f])]):
            if used[cand]:
                continue
            trail = [f]
            mor[f] = cand
            used[cand] = True
            if propagate(trail) and rec(pos + 1):
                return True
            for h in trail:
                used[mor[h]] = False
                mor[h] = -1
        return False

    if not rec(0):
        return None
    F = Functor(C, D, om, mor, validate=False)
    if F.errors() or not F.is_isomorphism():
        return None
    return F


# -- nerve -----------------------------------------------------------------------

def _chains(C: FinCategory, m: int) -> list:
    """Keys (x0, f1, ..., fm) of composable strings of m morphisms."""
    if m == 0:
        return [(x,) for x in range(C.n_objects)]
    out = [(int(C.src[f]), f) for f in range(C.n_morphisms)]
    for _ in range(m - 1):
        out = [key + (g,) for key in out for g in range(C.n_morphisms) if C.src[g] == C.tgt[key[-1]]]
    return out


def _chain_object(C, key, i):
    """The i-th object of a chain key."""
    return key[0] if i == 0 else int(C.tgt[key[i]])


def nerve_sset(C: FinCategory, trunc: int = DEFAULT_BOUNDS[0]) -> TruncatedSimplicialSet:
    """The nerve of C as a simplicial set; m-simplices are composable strings."""

    def face(d, a, i, key):
        m = d[0]
        if m == 1:
            return (_chain_object(C, key, 1 - i),)
        if i == 0:
            return (int(C.tgt[key[1]]),) + key[2:]
        if i == m:
            return key[:-1]
        comp = int(C.table[key[i + 1], key[i]])
        return key[:i] + (comp,) + key[i + 2:]

    def degen(d, a, i, key):
        x = _chain_object(C, key, i)
        return key[: i + 1] + (C.identity(x),) + key[i + 1:]

    skel = 0 if C.only_identities() else None
    K = _core.from_keys(TruncatedSimplicialSet, (trunc,), lambda d: _chains(C, d[0]), face, degen,
                        skel=(skel,), cosk=(2,), name=f"N{C.name}", validate=False)
    K.meta["category"] = C
    return K


def nerve(C: FinCategory, bounds=None) -> SimplicialSpace:
    """The nerve as a simplicial space, constant in the space direction."""
    M, N = bounds or DEFAULT_BOUNDS
    X = cat_constant(nerve_sset(C, M), N)
    X.name = f"N{C.name}"
    X.meta["category"] = C
    return X


def nerve_I(m: int, bounds=None) -> SimplicialSpace:
    """N I[m]; 2-coskeletal in the categorical direction."""
    return nerve(make_I(m), bounds)


def nerve_functor_sset(F: Functor, trunc: int = DEFAULT_BOUNDS[0]) -> SimplicialMap:
    S, T = nerve_sset(F.source, trunc), nerve_sset(F.target, trunc)
    arrays = {}
    for d in S.degrees():
        index = {k: i for i, k in enumerate(T.labels(d))}
        out = []
        for key in S.labels(d):
            if d[0] == 0:
                out.append(index[(F.on_object(key[0]),)])
            else:
                out.append(index[(F.on_object(key[0]),) + tuple(F(f) for f in key[1:])])
        arrays[d] = np.array(out, dtype=np.int64)
    return SimplicialMap(S, T, arrays, validate=False)


def nerve_functor(F: Functor, bounds=None) -> BisimplicialMap:
    M, N = bounds or DEFAULT_BOUNDS
    f = external_map(nerve_functor_sset(F, M), ssets.identity(ssets.point(N)))
    f.source.name, f.target.name = f"N{F.source.name}", f"N{F.target.name}"
    f.source.meta["category"] = F.source
    f.target.meta["category"] = F.target
    f.meta = {"functor": F}
    return f


def chain_index(X: SimplicialSpace, key: tuple, n: int = 0) -> int:
    """Index in a nerve of the cell with chain key ``key`` at space degree n."""
    C = X.meta["category"]
    m = len(key) - 1
    K = X.meta["external"][0]
    index = K.meta.setdefault("_index", {})
    if m not in index:
        index[m] = {k: i for i, k in enumerate(K.labels((m,)))}
    return index[m][key] * X.meta["external"][1].count((n,))


# -- categorification -----------------------------------------------------------

def pi0_levelwise(X: SimplicialSpace, up_to: int = 2) -> TruncatedSimplicialSet:
    """The simplicial set m -> pi0(X_m) (left adjoint to the discrete inclusion)."""
    M = min(up_to, X.cat_trunc)
    labels = [ssets.component_labels(X.level(m)) for m in range(M + 1)]
    counts = {(m,): int(labels[m].max() + 1) if len(labels[m]) else 0 for m in range(M + 1)}
    faces, degens = {}, {}

    def induced(m_from, m_to, arr):
        out = np.full(counts[(m_from,)], -1, dtype=np.int64)
        out[labels[m_from]] = labels[m_to][arr]
        return out

    for m in range(1, M + 1):
        for i in range(m + 1):
            faces[((m,), 0, i)] = induced(m, m - 1, X.face((m, 0), 0, i))
    for m in range(M):
        for i in range(m + 1):
            degens[((m,), 0, i)] = induced(m, m + 1, X.degen((m, 0), 0, i))
    # label each component by its smallest representative cell at space degree 0
    reps = []
    for m in range(M + 1):
        first = {}
        for cell, c in enumerate(labels[m].tolist()):
            first.setdefault(c, cell)
        reps.append(first)
    return TruncatedSimplicialSet((M,), counts, faces, degens,
                                  labeler=lambda d, i: X.label((d[0], 0), reps[d[0]][i]),
                                  skel=(None,), cosk=(None,), name=f"pi0({X.name})", validate=False)


class _Rewriter:
    """Knuth-Bendix completion for a typed string rewriting system.

    Words are tuples of generator indices read in path order (first arrow
    first).  Rules are oriented by shortlex.
    """

    def __init__(self, budget: int):
        self.rules: list = []
        self.budget = budget
        self.steps = 0

    @staticmethod
    def greater(a, b) -> bool:
        return (len(a), a) > (len(b), b)

    def reduce(self, w: tuple) -> tuple:
        changed = True
        while changed:
            changed = False
            for l, r in self.rules:
                k = len(l)
                for p in range(len(w) - k + 1):
                    if w[p:p + k] == l:
                        w = w[:p] + r + w[p + k:]
                        changed = True
                        break
                if changed:
                    break
        return w

    def _critical_pairs(self, rule, other):
        l1, r1 = rule
        l2, r2 = other
        pairs = []
        for k in range(1, min(len(l1), len(l2))):
            if l1[-k:] == l2[:k]:
                pairs.append((r1 + l2[k:], l1[:-k] + r2))
        if len(l2) <= len(l1):
            for p in range(len(l1) - len(l2) + 1):
                if l1[p:p + len(l2)] == l2 and (l1, r1) != (l2, r2):
                    pairs.append((r1, l1[:p] + r2 + l1[p + len(l2):]))
        return pairs

    def complete(self, equations):
        # fair order: always process the shortest pending equation first
        pending = []
        counter = itertools.count()

        def push(a, b):
            heapq.heappush(pending, (max(len(a), len(b)), next(counter), a, b))

        for a, b in equations:
            push(a, b)
        while pending:
            self.steps += 1
            if self.steps > self.budget:
                raise CongruenceBudgetExceeded(f"congruence closure exceeded {self.budget} steps")
            _, _, a, b = heapq.heappop(pending)
            a, b = self.reduce(a), self.reduce(b)
            if a == b:
                continue
            new = (a, b) if self.greater(a, b) else (b, a)
            l = new[0]
            # inter-reduce: rules whose left side contains l go back to pending
            keep = []
            for rule in self.rules:
                if any(rule[0][p:p + len(l)] == l for p in range(len(rule[0]) - len(l) + 1)):
                    push(*rule)
                else:
                    keep.append(rule)
            self.rules = keep + [new]
            self.rules = [(x, self.reduce(y)) for x, y in self.rules]
            for rule in list(self.rules):
                for pair in self._critical_pairs(new, rule):
                    push(*pair)
                if rule != new:
                    for pair in self._critical_pairs(rule, new):
                        push(*pair)

    def irreducible_extension(self, w: tuple) -> bool:
        """Whether w is irreducible, given that w[:-1] is."""
        for l, _ in self.rules:
            if len(l) <= len(w) and w[len(w) - len(l):] == l:
                return False
        return True


def categorify(A, budget: int = 10 ** 5, name=None) -> FinCategory:
    """The category presented by 1-cells modulo d1 h = d0 h . d2 h for 2-cells h.

    Accepts a simplicial set or a simplicial space (via levelwise pi0).
    Morphisms are shortlex-irreducible words; identities are empty words.
    """
    K = pi0_levelwise(A) if isinstance(A, SimplicialSpace) else A
    if K.trunc_dim < 2:
        raise ValueError("categorify needs simplices up to dimension 2")
    n_obj = K.count((0,))
    degenerate = K.degenerate_mask((1,))
    gens = [e for e in range(K.count((1,))) if not degenerate[e]]
    gen_index = {e: i for i, e in enumerate(gens)}
    gsrc = [int(K.face((1,), 0, 1)[e]) for e in gens]
    gtgt = [int(K.face((1,), 0, 0)[e]) for e in gens]

    def word(e):
        return () if degenerate[e] else (gen_index[e],)

    equations = set()
    for h in range(K.count((2,))):
        e0, e1, e2 = (int(K.face((2,), 0, i)[h]) for i in range(3))
        lhs, rhs = word(e1), word(e2) + word(e0)
        if lhs != rhs:
            equations.add((lhs, rhs))
    rw = _Rewriter(budget)
    rw.complete(sorted(equations))

    # enumerate normal forms by extending irreducible words
    morphisms = []
    for x in range(n_obj):
        frontier = [()]
        morphisms.append((x, (), x))
        while frontier:
            nxt = []
            for w in frontier:
                end = gtgt[w[-1]] if w else x
                for gi in range(len(gens)):
                    if gsrc[gi] != end:
                        continue
                    w2 = w + (gi,)
                    if rw.irreducible_extension(w2):
                        morphisms.append((x, w2, gtgt[gi]))
                        nxt.append(w2)
                        if len(morphisms) > budget:
                            raise CongruenceBudgetExceeded("too many normal forms (infinite category?)")
            frontier = nxt
    index = {(x, w): i for i, (x, w, _) in enumerate(morphisms)}
    n = len(morphisms)
    table = np.full((n, n), -1, dtype=np.int64)
    for g, (y, wg, z) in enumerate(morphisms):
        for f, (x, wf, y2) in enumerate(morphisms):
            if y2 == y:
                table[g, f] = index[(x, rw.reduce(wf + wg))]
    obj_labels = [K.label((0,), x) for x in range(n_obj)]

    def mlabel(x, w):
        if not w:
            return ("id", obj_labels[x])
        return tuple(K.label((1,), gens[g]) for g in w)

    C = FinCategory(obj_labels, [mlabel(x, w) for x, w, _ in morphisms],
                    [x for x, _, _ in morphisms], [y for _, _, y in morphisms],
                    [index[(x, ())] for x in range(n_obj)], table,
                    name=name or f"c({getattr(A, 'name', '')})")
    C.words = [(x, w) for x, w, _ in morphisms]
    C.generators = gens
    C.rewriting_rules = list(rw.rules)
    return C
