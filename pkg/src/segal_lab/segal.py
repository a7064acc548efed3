"""Segal spaces: Segal maps, mapping spaces, homotopy categories, cores and
Dwyer-Kan equivalences."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core, bisimp, cat, ssets
from .bisimp import CAT, SPACE, BisimplicialMap, SimplicialSpace
from .cat import FinCategory, Functor
from .ssets import SimplicialMap, TruncatedSimplicialSet
from .verdict import Verdict, conjunction


class SegalError(ValueError):
    pass


# -- Segal maps --------------------------------------------------------------

def spine_rows(X: SimplicialSpace, m: int, n: int) -> np.ndarray:
    """Rows (e_1, ..., e_m) of cells of X_{1,n} with d0 e_i = d1 e_{i+1}."""
    if m == 0:
        return np.arange(X.count((0, n)), dtype=np.int64).reshape(-1, 1)
    d0 = X.face((1, n), CAT, 0)
    d1 = X.face((1, n), CAT, 1)
    rows = np.arange(X.count((1, n)), dtype=np.int64).reshape(-1, 1)
    for _ in range(m - 1):
        a, b = _core.join_rows(d0[rows[:, -1]], d1)
        rows = np.hstack([rows[a], b.reshape(-1, 1)])
    return rows


def spine_object(X: SimplicialSpace, m: int) -> TruncatedSimplicialSet:
    """Map(Sp[m], X) = X_1 x_{X_0} ... x_{X_0} X_1 as a simplicial set."""
    N = X.space_trunc
    if m == 0:
        return X.level(0)
    rows = {n: spine_rows(X, m, n) for n in range(N + 1)}
    S = bisimp.rows_sset(rows, lambda n, i: X.face((1, n), SPACE, i),
                         lambda n, i: X.degen((1, n), SPACE, i), N,
                         skel=0 if X.skel[SPACE] == 0 else None, cosk=X.cosk[SPACE],
                         name=f"Sp_{m}({X.name})")
    S.meta["rows"] = rows
    return S


def segal_map(X: SimplicialSpace, m: int) -> SimplicialMap:
    """X_m -> Map(Sp[m], X), restricting an m-cell to its spine edges."""
    if not 0 <= m <= X.cat_trunc:
        raise ValueError("m outside the categorical truncation")
    S = spine_object(X, m)
    if m <= 1:
        return ssets.identity(X.level(m)) if m == 1 else ssets.identity(S)
    arrays = {}
    for n in range(X.space_trunc + 1):
        cols = np.stack([_core.act_all(X, (m, n), CAT, (i - 1, i)) for i in range(1, m + 1)], axis=1)
        arrays[(n,)] = _core.locate_rows(cols, S.meta["rows"][n])
    return SimplicialMap(X.level(m), S, arrays, validate=False)


def segal_check(X: SimplicialSpace, budget: int = ssets.DEFAULT_BUDGET) -> Verdict:
    """Reedy fibrant and every Segal map X_m -> Map(Sp[m], X) a weak equivalence.

    Spaces are immutable once built, so the verdict is cached on X per budget.
    """
    cache = X.meta.setdefault("_segal_check", {})
    if budget not in cache:
        cache[budget] = _segal_check(X, budget)
    return cache[budget]


def _segal_check(X: SimplicialSpace, budget: int) -> Verdict:
    reedy = bisimp.is_reedy_fibrant(X)
    if reedy.is_false:
        return Verdict.false({"reedy": reedy.witness}, "not Reedy fibrant")
    if not reedy.is_true:
        return Verdict.unknown(f"Reedy fibrancy is not established: {reedy.summary()}")
    parts = []
    for m in range(2, X.cat_trunc + 1):
        v = ssets.weak_equivalence_oracle(segal_map(X, m), budget)
        if v.is_false:
            return Verdict.false({"m": m, "counterexample": v.witness},
                                 f"Segal map in degree {m} is not a weak equivalence")
        parts.append(v)
    joint = conjunction(parts, "Segal maps are weak equivalences")
    if not joint.is_true:
        return joint
    c = X.cosk[CAT]
    if c is None or X.cat_trunc < c + 1:
        return Verdict.unknown("Segal maps above the truncation are unchecked")
    return Verdict.true({"reedy": reedy.witness, "segal_maps": joint.witness})


# -- mapping spaces between objects ----------------------------------------------

def _degenerate_vertex(X: SimplicialSpace, x: int, n: int) -> int:
    cell = x
    for k in range(n):
        cell = int(X.degen((0, k), SPACE, 0)[cell])
    return cell


def mapping_object_space(X: SimplicialSpace, x: int, y: int) -> TruncatedSimplicialSet:
    """Strict fiber of (d1, d0): X_1 -> X_0 x X_0 over (x, y).

    ``meta["cells"][n]`` lists the X_{1,n} cells of each n-simplex.
    """
    V = X.vertices()
    for v in (x, y):
        if not 0 <= v < V:
            raise SegalError(f"{v} is not a vertex of X_00")
    L = X.level(1)
    mask = {}
    for n in range(X.space_trunc + 1):
        sx, sy = _degenerate_vertex(X, x, n), _degenerate_vertex(X, y, n)
        mask[(n,)] = (X.face((1, n), CAT, 1) == sx) & (X.face((1, n), CAT, 0) == sy)
    sub, inc = _core.subobject(L, mask, name=f"map({X.label((0, 0), x)},{X.label((0, 0), y)})")
    sub.meta["cells"] = {n: inc[(n,)] for n in range(X.space_trunc + 1)}
    return sub


# -- homotopy category -------------------------------------------------------

@dataclass
class HoCategoryResult:
    """ho X with its bookkeeping.

    Object i of ``category`` is the vertex i of X_{0,0}; morphism k is
    represented by the X_{1,0} cell ``hom_provenance[k]``, and
    ``edge_class`` sends every X_{1,0} cell to its morphism.
    """

    category: FinCategory
    object_indexing: list
    hom_provenance: list
    edge_class: np.ndarray
    audit: dict = field(default_factory=dict)


def _hom_space_mask(X: SimplicialSpace) -> dict:
    """Cells of X_1 lying over degenerate vertices at both ends."""
    mask = {}
    for n in range(X.space_trunc + 1):
        deg = np.array([_degenerate_vertex(X, v, n) for v in range(X.vertices())], dtype=np.int64)
        mask[(n,)] = np.isin(X.face((1, n), CAT, 1), deg) & np.isin(X.face((1, n), CAT, 0), deg)
    return mask


def _category_from_classes(X: SimplicialSpace, edge_class: np.ndarray, name: str) -> HoCategoryResult:
    """Assemble the category whose morphisms are the given classes of X_{1,0},
    composing through 2-cells of X_{2,0}."""
    n_cls = int(edge_class.max()) + 1 if len(edge_class) else 0
    d1 = X.face((1, 0), CAT, 1)
    d0 = X.face((1, 0), CAT, 0)
    rep = np.full(n_cls, -1, dtype=np.int64)
    for e in range(len(edge_class) - 1, -1, -1):
        rep[edge_class[e]] = e
    src, tgt = d1[rep], d0[rep]
    ids = edge_class[X.degen((0, 0), CAT, 0)]
    table = np.full((n_cls, n_cls), -1, dtype=np.int64)
    seen: dict = {}
    fillers = 0
    if X.cat_trunc >= 2:
        h_first = edge_class[X.face((2, 0), CAT, 2)]
        h_second = edge_class[X.face((2, 0), CAT, 0)]
        h_comp = edge_class[X.face((2, 0), CAT, 1)]
        for f, g, c in zip(h_first.tolist(), h_second.tolist(), h_comp.tolist()):
            fillers += 1
            seen.setdefault((g, f), set()).add(c)
            if table[g, f] < 0:
                table[g, f] = c
    bad = sorted(k for k, v in seen.items() if len(v) > 1)
    if bad:
        g, f = bad[0]
        raise SegalError(f"composition not well defined for classes {f} then {g}: {sorted(seen[bad[0]])}")
    for f in range(n_cls):
        for g in range(n_cls):
            if tgt[f] == src[g] and table[g, f] < 0:
                raise SegalError("Segal surjectivity missing at vertices "
                                 f"{X.label((0, 0), int(src[f]))}, {X.label((0, 0), int(tgt[f]))}, "
                                 f"{X.label((0, 0), int(tgt[g]))}")
    objects = [X.label((0, 0), v) for v in range(X.vertices())]
    morphisms = [(objects[int(src[k])], objects[int(tgt[k])], X.label((1, 0), int(rep[k])))
                 for k in range(n_cls)]
    C = FinCategory(objects, morphisms, src, tgt, ids, table, name=name)
    return HoCategoryResult(C, objects, rep.tolist(), edge_class,
                            {"composable_pairs": len(seen), "fillers_checked": fillers})


def ho(X: SimplicialSpace) -> HoCategoryResult:
    """ho X: objects X_{0,0}, homs pi0 map_X(x, y), composition through X_{2,0}.

    Every 2-cell over a composable pair of classes is inspected, so a
    composition that depends on the filler raises instead of picking one.
    """
    sub, inc = _core.subobject(X.level(1), _hom_space_mask(X))
    labels = ssets.component_labels(sub)
    edge_class = np.empty(X.count((1, 0)), dtype=np.int64)
    edge_class[inc[(0,)]] = labels
    return _category_from_classes(X, edge_class, name=f"ho({X.name})")


def ho_via_cR(X: SimplicialSpace, budget: int = 10 ** 5) -> FinCategory:
    """The homotopy category computed a second way, as c(R X)."""
    return cat.categorify(bisimp.reduce_R(X), budget=budget, name=f"c(R{X.name})")


def joyal_homotopy_category(X: SimplicialSpace) -> HoCategoryResult:
    """Homotopy category of the quasi-category X_{-,0}.

    Homs are vertices of map_X(x, y) modulo a ~ b when some h in X_{2,0}
    has d2 h = a, d1 h = b and d0 h degenerate.
    """
    E = X.count((1, 0))
    parent = list(range(E))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if X.cat_trunc >= 2:
        degenerate = set(X.degen((0, 0), CAT, 0).tolist())
        d2, d1, d0 = (X.face((2, 0), CAT, i) for i in (2, 1, 0))
        for a, b, c in zip(d2.tolist(), d1.tolist(), d0.tolist()):
            if c in degenerate:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    renum: dict = {}
    edge_class = np.array([renum.setdefault(find(e), len(renum)) for e in range(E)], dtype=np.int64)
    return _category_from_classes(X, edge_class, name=f"ho({X.name}_-,0)")


def ho_functor(f: BisimplicialMap, hx: HoCategoryResult | None = None,
               hy: HoCategoryResult | None = None) -> Functor:
    """The functor ho X -> ho Y induced by f."""
    hx = hx or ho(f.source)
    hy = hy or ho(f.target)
    obj = f[(0, 0)]
    mor = hy.edge_class[f[(1, 0)][np.asarray(hx.hom_provenance, dtype=np.int64)]]
    return Functor(hx.category, hy.category, obj, mor)


# -- homotopy equivalences and the core ---------------------------------------

@dataclass
class CoreResult:
    hoeq: TruncatedSimplicialSet
    hoeq_inclusion: SimplicialMap
    core: SimplicialSpace
    core_inclusion: BisimplicialMap
    component_stable: bool = True


def _vertices_of(X: SimplicialSpace, deg) -> np.ndarray:
    """Columns: the space-direction vertices of every cell of ``deg``."""
    n = deg[SPACE]
    return np.stack([_core.act_all(X, deg, SPACE, (j,)) for j in range(n + 1)], axis=1)


def hoeq_and_core(X: SimplicialSpace, result: HoCategoryResult | None = None) -> CoreResult:
    """X_hoeq inside X_1 (cells whose vertices are invertible in ho X) and the
    core X^eq, whose m-cells have every edge in X_hoeq."""
    result = result or ho(X)
    C = result.category
    inv = np.zeros(C.n_morphisms, dtype=bool)
    inv[C.isos()] = True
    edge_ok = inv[result.edge_class]
    stable = True
    hoeq_mask = {}
    for n in range(X.space_trunc + 1):
        verts = _vertices_of(X, (1, n))
        flags = edge_ok[verts]
        hoeq_mask[(n,)] = flags.all(axis=1)
        stable = stable and bool((flags.all(axis=1) == flags.any(axis=1)).all())
    hoeq, hoeq_inc = _core.subobject(X.level(1), hoeq_mask, name=f"{X.name}_hoeq")
    core_mask = {}
    for (m, n) in X.degrees():
        ok = np.ones(X.count((m, n)), dtype=bool)
        for i in range(m + 1):
            for j in range(i + 1, m + 1):
                e = _core.act_all(X, (m, n), CAT, (i, j))
                ok &= hoeq_mask[(n,)][e]
        core_mask[(m, n)] = ok
    core_space, core_inc = _core.subobject(X, core_mask, name=f"{X.name}^eq")
    # membership is decided on edges and vertices, which lie in the boundary
    # of any cell above degree one
    core_space.cosk = tuple(None if c is None else max(c, 1) for c in X.cosk)
    return CoreResult(hoeq, hoeq_inc, core_space, core_inc, stable)


# -- Dwyer-Kan equivalences ------------------------------------------------------

DK_MODES = ("i", "ii", "iii", "iv")


def _fiber_map(f: BisimplicialMap, x: int, y: int) -> SimplicialMap:
    X, Y = f.source, f.target
    A = mapping_object_space(X, x, y)
    B = mapping_object_space(Y, int(f[(0, 0)][x]), int(f[(0, 0)][y]))
    arrays = {}
    for n in range(X.space_trunc + 1):
        img = f[(1, n)][A.meta["cells"][n]]
        arrays[(n,)] = np.searchsorted(B.meta["cells"][n], img)
    return SimplicialMap(A, B, arrays, validate=False)


def _ff_fiberwise(f, budget):
    V = f.source.vertices()
    parts = []
    for x in range(V):
        for y in range(V):
            v = ssets.weak_equivalence_oracle(_fiber_map(f, x, y), budget)
            if v.is_false:
                X = f.source
                return Verdict.false({"objects": (X.label((0, 0), x), X.label((0, 0), y)),
                                      "counterexample": v.witness},
                                     "a map of mapping spaces is not a weak equivalence")
            parts.append(v)
    return conjunction(parts, "mapping spaces")


def _ff_matching(f, budget, levels):
    parts = []
    for m in levels:
        v = ssets.weak_equivalence_oracle(bisimp.relative_matching_map(f, m), budget)
        if v.is_false:
            return Verdict.false({"m": m, "counterexample": v.witness},
                                 f"relative matching comparison {m} is not a weak equivalence")
        parts.append(v)
    return conjunction(parts, "relative matching comparisons")


def cosk0_comparison(f: BisimplicialMap) -> BisimplicialMap:
    """X -> Y x_{cosk0 Y_0} cosk0 X_0."""
    X, Y = f.source, f.target
    M = X.cat_trunc
    P, _, _ = bisimp.pullback(bisimp.vertex_map(Y), bisimp.cosk0_map(f.level(0), M), with_maps=True)
    return bisimp.pullback_mediator(P, f, bisimp.vertex_map(X))


def dk_equivalence(f: BisimplicialMap, mode: str = "all",
                   budget: int = ssets.DEFAULT_BUDGET) -> Verdict:
    """Homotopically fully faithful (by the chosen criterion) and essentially
    surjective on homotopy categories.

    ``mode`` is one of "i" (mapping spaces), "ii" (X_1 against the pullback
    of Y_1), "iii" (levelwise against the cosk0 pullback), "iv" (relative
    matching maps for every m >= 1) or "all", which runs every criterion and
    raises if two conclusive ones disagree.
    """
    modes = DK_MODES if mode == "all" else (mode,)
    if any(m not in DK_MODES for m in modes):
        raise ValueError(f"unknown mode {mode!r}")
    for end, Z in (("source", f.source), ("target", f.target)):
        v = segal_check(Z, budget)
        if not v.is_true:
            return Verdict.unknown(f"{end} is not known to be a Segal space: {v.summary()}")
    hx, hy = ho(f.source), ho(f.target)
    es = cat.is_ess_surjective(ho_functor(f, hx, hy))
    ff = {}
    for m in modes:
        if m == "i":
            ff[m] = _ff_fiberwise(f, budget)
        elif m == "ii":
            ff[m] = _ff_matching(f, budget, [1])
        elif m == "iii":
            ff[m] = bisimp.is_levelwise_we(cosk0_comparison(f))
        else:
            ff[m] = _ff_matching(f, budget, range(1, f.source.cat_trunc + 1))
    conclusive = {m: v.is_true for m, v in ff.items() if v.conclusive}
    if len(set(conclusive.values())) > 1:
        raise SegalError(f"fully-faithfulness criteria disagree: {conclusive}")
    details = tuple((m, v) for m, v in ff.items())
    if any(v.is_false for v in ff.values()):
        bad = next(m for m, v in ff.items() if v.is_false)
        return Verdict.false({"mode": bad, "counterexample": ff[bad].witness},
                             "not homotopically fully faithful", details)
    if es.is_false:
        return Verdict.false(es.witness, "ho f is not essentially surjective", details)
    if not conclusive:
        return Verdict.unknown("no fully-faithfulness criterion was conclusive", details)
    return Verdict.true({"fully_faithful": sorted(conclusive), "essential_image": es.witness},
                        "Dwyer-Kan equivalence", details)


# -- isomorphisms of nerve-like simplicial spaces ----------------------------------

def _edge_keys(X: SimplicialSpace, h: HoCategoryResult, deg) -> list:
    """Each cell of degree (m, n) keyed by its first vertex and the classes of its edges."""
    m, n = deg
    to_base = (0,) if n else None

    def flatten(cells, d):
        if to_base is None:
            return cells
        return cells if d[SPACE] == 0 else _core.act_all(X, d, SPACE, to_base)[cells]

    first = _core.act_all(X, deg, CAT, (0,)) if m else np.arange(X.count(deg))
    cols = [flatten(first, (0, n)).tolist()]
    for i in range(m + 1):
        for j in range(i + 1, m + 1):
            edges = _core.act_all(X, deg, CAT, (i, j))
            cols.append(h.edge_class[flatten(edges, (1, n))].tolist())
    return list(zip(*cols)) if X.count(deg) else []


def nerve_like_isomorphism(A: SimplicialSpace, B: SimplicialSpace):
    """An isomorphism A -> B of space-constant Segal spaces whose cells are
    determined by their edges, or None.

    ho A and ho B are matched by an isomorphism of categories, cells are
    then transported by their edge keys and the result is checked to be a
    bijective map of simplicial spaces.
    """
    if A.bounds != B.bounds or A.skel[SPACE] != 0 or B.skel[SPACE] != 0:
        return None
    if any(A.count(d) != B.count(d) for d in A.degrees()):
        return None
    ha, hb = ho(A), ho(B)
    phi = cat.find_isomorphism(ha.category, hb.category)
    if phi is None:
        return None
    arrays = {}
    for d in A.degrees():
        keys_b = {k: c for c, k in enumerate(_edge_keys(B, hb, d))}
        if len(keys_b) != B.count(d):
            return None
        out = []
        for k in _edge_keys(A, ha, d):
            moved = (phi.on_object(k[0]),) + tuple(phi(c) for c in k[1:])
            if moved not in keys_b:
                return None
            out.append(keys_b[moved])
        arrays[d] = np.array(out, dtype=np.int64)
    try:
        f = BisimplicialMap(A, B, arrays, validate=True)
    except ValueError:
        return None
    return f if f.is_bijective() else None
