"""Finite bi-truncated simplicial spaces.

Axis 0 is the categorical degree ``m`` and axis 1 the space degree ``n``.
A simplicial space is stored as a two-axis presheaf; its level ``X_m`` is
the simplicial set obtained by fixing ``m``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import _core, ssets
from ._core import Presheaf, PresheafMap, TruncationMismatch, maps_exact, search_maps
from .ssets import SimplicialMap, TruncatedSimplicialSet
from .verdict import Verdict, conjunction

DEFAULT_BOUNDS = (3, 3)
CAT, SPACE = 0, 1


class SimplicialSpace(Presheaf):
    """Bisimplicial set truncated to categorical degree ``M`` and space degree ``N``."""

    @property
    def cat_trunc(self) -> int:
        return self.bounds[CAT]

    @property
    def space_trunc(self) -> int:
        return self.bounds[SPACE]

    @property
    def coskeletal_from(self):
        return self.cosk[CAT]

    def level(self, m: int) -> TruncatedSimplicialSet:
        """The simplicial set X_m."""
        N = self.space_trunc
        counts = {(n,): self.count((m, n)) for n in range(N + 1)}
        faces = {((n,), 0, i): self.face((m, n), SPACE, i) for n in range(1, N + 1) for i in range(n + 1)}
        degens = {((n,), 0, i): self.degen((m, n), SPACE, i) for n in range(N) for i in range(n + 1)}
        return TruncatedSimplicialSet((N,), counts, faces, degens,
                                      labeler=lambda d, i: self.label((m, d[0]), i),
                                      skel=(self.skel[SPACE],), cosk=(self.cosk[SPACE],),
                                      name=f"{self.name}_{m}", validate=False)

    def column(self, n: int) -> TruncatedSimplicialSet:
        """The simplicial set X_{-,n} in the categorical direction."""
        M = self.cat_trunc
        counts = {(m,): self.count((m, n)) for m in range(M + 1)}
        faces = {((m,), 0, i): self.face((m, n), CAT, i) for m in range(1, M + 1) for i in range(m + 1)}
        degens = {((m,), 0, i): self.degen((m, n), CAT, i) for m in range(M) for i in range(m + 1)}
        return TruncatedSimplicialSet((M,), counts, faces, degens,
                                      labeler=lambda d, i: self.label((d[0], n), i),
                                      skel=(self.skel[CAT],), cosk=(self.cosk[CAT],),
                                      name=f"{self.name}_-,{n}", validate=False)

    def vertices(self) -> int:
        """|X_{0,0}|."""
        return self.count((0, 0))

    def is_space_discrete(self) -> bool:
        """Every level is a constant simplicial set."""
        return self.skel[SPACE] == 0


class BisimplicialMap(PresheafMap):
    def level(self, m: int) -> SimplicialMap:
        S, T = self.source.level(m), self.target.level(m)
        return SimplicialMap(S, T, {(n,): self[(m, n)] for n in range(self.source.space_trunc + 1)},
                             validate=False)

    def column(self, n: int) -> SimplicialMap:
        S, T = self.source.column(n), self.target.column(n)
        return SimplicialMap(S, T, {(m,): self[(m, n)] for m in range(self.source.cat_trunc + 1)},
                             validate=False)


SimplicialSpace.map_class = BisimplicialMap


# -- external products and generators ---------------------------------------

def external(K: TruncatedSimplicialSet, L: TruncatedSimplicialSet, name=None) -> SimplicialSpace:
    """K in the categorical direction, L in the space direction."""
    M, N = K.trunc_dim, L.trunc_dim
    counts, faces, degens = {}, {}, {}
    for m in range(M + 1):
        for n in range(N + 1):
            counts[(m, n)] = K.count((m,)) * L.count((n,))
    for m in range(M + 1):
        for n in range(N + 1):
            kc, lc = K.count((m,)), L.count((n,))
            if m >= 1:
                for i in range(m + 1):
                    faces[((m, n), CAT, i)] = (np.repeat(K.face((m,), 0, i), lc) * lc
                                               + np.tile(np.arange(lc), kc)).astype(np.int64)
            if n >= 1:
                lo = L.count((n - 1,))
                for i in range(n + 1):
                    faces[((m, n), SPACE, i)] = (np.repeat(np.arange(kc), lc) * lo
                                                 + np.tile(L.face((n,), 0, i), kc)).astype(np.int64)
            if m < M:
                for i in range(m + 1):
                    degens[((m, n), CAT, i)] = (np.repeat(K.degen((m,), 0, i), lc) * lc
                                                + np.tile(np.arange(lc), kc)).astype(np.int64)
            if n < N:
                up = L.count((n + 1,))
                for i in range(n + 1):
                    degens[((m, n), SPACE, i)] = (np.repeat(np.arange(kc), lc) * up
                                                  + np.tile(L.degen((n,), 0, i), kc)).astype(np.int64)

    def labeler(d, idx):
        lc = L.count((d[1],))
        return (K.label((d[0],), idx // lc), L.label((d[1],), idx % lc))

    X = SimplicialSpace((M, N), counts, faces, degens, labeler,
                        skel=(K.skel[0], L.skel[0]), cosk=(K.cosk[0], L.cosk[0]),
                        name=name or f"{K.name}[x]{L.name}", validate=False)
    X.meta["external"] = (K, L)
    return X


def external_map(f: SimplicialMap, g: SimplicialMap) -> BisimplicialMap:
    S = external(f.source, g.source)
    T = external(f.target, g.target)
    arrays = {}
    for (m, n) in S.degrees():
        lc_s = g.source.count((n,))
        lc_t = g.target.count((n,))
        arrays[(m, n)] = (np.repeat(f[(m,)], lc_s) * lc_t + np.tile(g[(n,)], f.source.count((m,))))
    return BisimplicialMap(S, T, arrays, validate=False)


def _bounds(bounds):
    return DEFAULT_BOUNDS if bounds is None else tuple(bounds)


def cat_constant(K: TruncatedSimplicialSet, N: int) -> SimplicialSpace:
    """Simplicial space constant in the space direction with levels K_m."""
    return external(K, ssets.point(N), name=K.name)


def space_constant(L: TruncatedSimplicialSet, M: int) -> SimplicialSpace:
    """Simplicial space constant in the categorical direction (L at every level)."""
    return external(ssets.point(M), L, name=L.name)


def make_F(m: int, bounds=None) -> SimplicialSpace:
    M, N = _bounds(bounds)
    return external(ssets.make_standard(m, M), ssets.point(N), name=f"F[{m}]")


def make_dF(m: int, bounds=None) -> SimplicialSpace:
    M, N = _bounds(bounds)
    return external(ssets.make_boundary(m, M), ssets.point(N), name=f"dF[{m}]")


def make_Sp(m: int, bounds=None) -> SimplicialSpace:
    M, N = _bounds(bounds)
    return external(ssets.make_spine(m, M), ssets.point(N), name=f"Sp[{m}]")


def make_Delta_space(n: int, bounds=None) -> SimplicialSpace:
    M, N = _bounds(bounds)
    return external(ssets.point(M), ssets.make_standard(n, N), name=f"Delta[{n}]")


def make_partial_Delta_space(n: int, bounds=None) -> SimplicialSpace:
    M, N = _bounds(bounds)
    return external(ssets.point(M), ssets.make_boundary(n, N), name=f"dDelta[{n}]")


def make_horn_space(n: int, k: int, bounds=None) -> SimplicialSpace:
    M, N = _bounds(bounds)
    return external(ssets.point(M), ssets.make_horn(n, k, N), name=f"Lambda^{k}[{n}]")


def point_space(bounds=None) -> SimplicialSpace:
    return make_F(0, bounds)


def empty_space(bounds=None) -> SimplicialSpace:
    return _core.empty(SimplicialSpace, _bounds(bounds), name="empty")


def _id_sset(n):
    return ssets.identity(ssets.point(n))


def cat_inclusion(kind: str, m: int, bounds=None, k: int | None = None) -> BisimplicialMap:
    """dF[m] -> F[m] (kind "boundary") or Sp[m] -> F[m] (kind "spine")."""
    M, N = _bounds(bounds)
    if kind == "boundary":
        inc = ssets.boundary_inclusion(m, M)
    elif kind == "spine":
        inc = ssets.inclusion(ssets.make_spine(m, M), ssets.make_standard(m, M))
    elif kind == "vertex":
        inc = ssets.vertex_inclusion(m, k, M)
    else:
        raise ValueError(kind)
    return external_map(inc, _id_sset(N))


def space_inclusion(kind: str, n: int, bounds=None, k: int | None = None) -> BisimplicialMap:
    """dDelta[n] -> Delta[n] or Lambda^k[n] -> Delta[n] in the space direction."""
    M, N = _bounds(bounds)
    if kind == "boundary":
        inc = ssets.boundary_inclusion(n, N)
    elif kind == "horn":
        inc = ssets.horn_inclusion(n, k, N)
    elif kind == "vertex":
        inc = ssets.vertex_inclusion(n, k, N)
    else:
        raise ValueError(kind)
    return external_map(_id_sset(M), inc)


def identity(X: Presheaf):
    return _core.identity(X)


def to_point(X: SimplicialSpace) -> BisimplicialMap:
    return _core.terminal_map(X, point_space(X.bounds))


def from_empty(X: SimplicialSpace) -> BisimplicialMap:
    E = empty_space(X.bounds)
    return BisimplicialMap(E, X, {}, validate=False)


def yoneda(X: SimplicialSpace, m: int, n: int, x: int) -> BisimplicialMap:
    """The map F[m] x Delta[n] -> X classifying the cell x in X_{m,n}."""
    K = ssets.make_standard(m, X.cat_trunc)
    L = ssets.make_standard(n, X.space_trunc)
    S = external(K, L)
    arrays = {}
    for (a, b) in S.degrees():
        out = np.empty(S.count((a, b)), dtype=np.int64)
        lc = L.count((b,))
        cache = {}
        for kc, alpha in enumerate(K.labels((a,))):
            if alpha not in cache:
                cache[alpha] = X.act((m, n), x, CAT, alpha)
            y = cache[alpha]
            for lidx, beta in enumerate(L.labels((b,))):
                out[kc * lc + lidx] = X.act((a, n), y, SPACE, beta)
        arrays[(a, b)] = out
    return BisimplicialMap(S, X, arrays, validate=False)


product = ssets.product
product_projections = ssets.product_projections
product_mediator = ssets.product_mediator
pushout = ssets.pushout
pushout_mediator = ssets.pushout_mediator
pullback = ssets.pullback
pullback_mediator = ssets.pullback_mediator
coproduct = ssets.coproduct


# -- simplicial sets built from tuples of cells ------------------------------

def rows_sset(rows: dict, entry_face, entry_degen, N: int, skel=None, cosk=None,
              name="", labeler=None) -> TruncatedSimplicialSet:
    """Simplicial set whose n-simplices are the rows ``rows[n]`` of cells,
    with faces and degeneracies acting entrywise."""
    counts = {(n,): len(rows[n]) for n in range(N + 1)}
    faces, degens = {}, {}
    for n in range(1, N + 1):
        for i in range(n + 1):
            faces[((n,), 0, i)] = _core.locate_rows(entry_face(n, i)[rows[n]], rows[n - 1])
    for n in range(N):
        for i in range(n + 1):
            degens[((n,), 0, i)] = _core.locate_rows(entry_degen(n, i)[rows[n]], rows[n + 1])
    if labeler is None:
        labeler = lambda d, i: tuple(rows[d[0]][i].tolist())
    return TruncatedSimplicialSet((N,), counts, faces, degens, labeler,
                                  skel=(skel,), cosk=(cosk,), name=name, validate=False)


# -- coskeleton and reduction -----------------------------------------------

def _digits(c: int, k: int) -> np.ndarray:
    if c == 0:
        return np.zeros((0, k), dtype=np.int64)
    return np.stack(np.unravel_index(np.arange(c ** k), (c,) * k), axis=1).astype(np.int64)


def _encode(cols: np.ndarray, c: int) -> np.ndarray:
    if cols.shape[1] == 0:
        return np.zeros(len(cols), dtype=np.int64)
    return np.ravel_multi_index(tuple(cols.T), (c,) * cols.shape[1]).astype(np.int64)


def cosk0(K: TruncatedSimplicialSet, M: int = DEFAULT_BOUNDS[0], name=None) -> SimplicialSpace:
    """The coskeleton with cosk0(K)_m = K^(m+1)."""
    N = K.trunc_dim
    counts, faces, degens = {}, {}, {}
    for m in range(M + 1):
        for n in range(N + 1):
            c = K.count((n,))
            counts[(m, n)] = c ** (m + 1)
            dig = _digits(c, m + 1)
            if m >= 1:
                for i in range(m + 1):
                    faces[((m, n), CAT, i)] = _encode(np.delete(dig, i, axis=1), c)
            if m < M:
                for i in range(m + 1):
                    degens[((m, n), CAT, i)] = _encode(np.insert(dig, i, dig[:, i], axis=1), c)
            if n >= 1:
                lo = K.count((n - 1,))
                for i in range(n + 1):
                    faces[((m, n), SPACE, i)] = _encode(K.face((n,), 0, i)[dig], lo)
            if n < N:
                up = K.count((n + 1,))
                for i in range(n + 1):
                    degens[((m, n), SPACE, i)] = _encode(K.degen((n,), 0, i)[dig], up)

    def labeler(d, idx):
        c = K.count((d[1],))
        digits = np.unravel_index(idx, (c,) * (d[0] + 1))
        return tuple(K.label((d[1],), int(x)) for x in digits)

    skel_space = 0 if K.skel[0] == 0 else None
    X = SimplicialSpace((M, N), counts, faces, degens, labeler,
                        skel=(None if not K.is_empty() else 0, skel_space), cosk=(0, K.cosk[0]),
                        name=name or f"cosk0({K.name})", validate=False)
    X.meta["cosk0_of"] = K
    return X


def cosk0_map(f: SimplicialMap, M: int = DEFAULT_BOUNDS[0]) -> BisimplicialMap:
    S, T = cosk0(f.source, M), cosk0(f.target, M)
    arrays = {}
    for (m, n) in S.degrees():
        dig = _digits(f.source.count((n,)), m + 1)
        arrays[(m, n)] = _encode(f[(n,)][dig], f.target.count((n,)))
    return BisimplicialMap(S, T, arrays, validate=False)


def vertex_map(X: SimplicialSpace) -> BisimplicialMap:
    """The unit X -> cosk0(X_0), sending a cell to its categorical vertices."""
    X0 = X.level(0)
    C = cosk0(X0, X.cat_trunc)
    arrays = {}
    for (m, n) in X.degrees():
        cols = np.stack([_core.act_all(X, (m, n), CAT, (j,)) for j in range(m + 1)], axis=1)
        arrays[(m, n)] = _encode(cols, X0.count((n,)))
    return BisimplicialMap(X, C, arrays, validate=False)


def vertex_inclusion_sset(X: SimplicialSpace):
    """X_{0,0} as a constant simplicial set, with its inclusion into X_0."""
    X0 = X.level(0)
    D = ssets.discrete([X.label((0, 0), v) for v in range(X.vertices())], X.space_trunc,
                       name=f"{X.name}_00")
    arrays = {(n,): _core.act_all(X0, (0,), 0, (0,) * (n + 1)) if n else np.arange(X.vertices())
              for n in range(X.space_trunc + 1)}
    return D, SimplicialMap(D, X0, arrays, validate=False)


@dataclass
class Reduction:
    space: SimplicialSpace
    counit: BisimplicialMap


def reduce_R(X: SimplicialSpace, with_counit: bool = False):
    """R X = X x_{cosk0 X_0} cosk0(X_{0,0}); level 0 is the discrete set X_{0,0}."""
    _, inc = vertex_inclusion_sset(X)
    unit = vertex_map(X)
    P, to_x, _ = pullback(unit, cosk0_map(inc, X.cat_trunc), with_maps=True)
    P.name = f"R({X.name})"
    if with_counit:
        return Reduction(P, to_x)
    return P


# -- matching objects --------------------------------------------------------

def matching_rows(X: SimplicialSpace, m: int) -> dict:
    return {n: _core.face_tuples(X, (m, n), CAT, range(m + 1)) for n in range(X.space_trunc + 1)}


def matching_object(X: SimplicialSpace, m: int):
    """Map(dF[m], X) as a simplicial set, with the boundary map X_m -> it."""
    N = X.space_trunc
    if m == 0:
        Pt = ssets.point(N)
        return Pt, ssets.to_point(X.level(0), Pt)
    rows = matching_rows(X, m)
    Mo = rows_sset(rows, lambda n, i: X.face((m - 1, n), SPACE, i),
                   lambda n, i: X.degen((m - 1, n), SPACE, i), N,
                   skel=0 if X.skel[SPACE] == 0 else None, cosk=X.cosk[SPACE],
                   name=f"M_{m}({X.name})")
    Mo.meta["rows"] = rows
    arrays = {}
    for n in range(N + 1):
        cols = np.stack([X.face((m, n), CAT, i) for i in range(m + 1)], axis=1)
        arrays[(n,)] = _core.locate_rows(cols, rows[n])
    return Mo, SimplicialMap(X.level(m), Mo, arrays, validate=False)


def relative_matching_map(f: BisimplicialMap, m: int) -> SimplicialMap:
    """X_m -> Y_m x_{Map(dF[m], Y)} Map(dF[m], X)."""
    X, Y = f.source, f.target
    if m > X.cat_trunc:
        raise ValueError("m exceeds the categorical truncation")
    if m == 0:
        return f.level(0)
    MX, bX = matching_object(X, m)
    MY, bY = matching_object(Y, m)
    N = X.space_trunc
    arrays = {}
    for n in range(N + 1):
        rows = MX.meta["rows"][n]
        img = f[(m - 1, n)][rows] if len(rows) else rows
        arrays[(n,)] = _core.locate_rows(img, MY.meta["rows"][n])
    Mf = SimplicialMap(MX, MY, arrays, validate=False)
    P, pY, pM = pullback(bY, Mf, with_maps=True)
    med = pullback_mediator(P, f.level(m), bX)
    med.name = f"relative matching map {m}"
    return med


def is_reedy_fibration(f: BisimplicialMap) -> Verdict:
    X, Y = f.source, f.target
    M = X.cat_trunc
    parts = []
    for m in range(M + 1):
        v = ssets.is_fibration(relative_matching_map(f, m))
        if v.is_false:
            return Verdict.false({"level": m, "counterexample": v.witness},
                                 f"relative matching map {m} is not a fibration")
        parts.append(v)
    joint = conjunction(parts, "relative matching maps are fibrations")
    if not joint.is_true:
        return joint
    c = _core._max_or_none([X.cosk[CAT], Y.cosk[CAT]])
    if c is None or c > M:
        return Verdict.unknown("categorical degrees above the truncation are unchecked")
    return Verdict.true({"levels": list(range(M + 1)), "witnesses": joint.witness})


def is_reedy_fibrant(X: SimplicialSpace) -> Verdict:
    return is_reedy_fibration(to_point(X))


def is_levelwise_we(f: BisimplicialMap) -> Verdict:
    X, Y = f.source, f.target
    M = X.cat_trunc
    parts = []
    for m in range(M + 1):
        v = ssets.weak_equivalence_oracle(f.level(m))
        if v.is_false:
            return Verdict.false({"level": m, "counterexample": v.witness},
                                 f"level {m} is not a weak equivalence")
        parts.append(v)
    joint = conjunction(parts, "levelwise weak equivalence")
    if not joint.is_true:
        return joint
    c = _core._max_or_none([X.cosk[CAT], Y.cosk[CAT]])
    if c is None or c > M:
        return Verdict.unknown("categorical degrees above the truncation are unchecked")
    if not (is_reedy_fibrant(X).is_true and is_reedy_fibrant(Y).is_true):
        return Verdict.unknown("levels above the truncation need Reedy fibrant ends")
    return Verdict.true({"levels": joint.witness})


# -- mapping spaces and internal homs ----------------------------------------

@dataclass
class MappingSpaceResult:
    """Map(A, X) up to a dimension, with each n-simplex as a map A x Delta[n] -> X."""

    space: TruncatedSimplicialSet | None
    maps: dict = field(default_factory=dict)
    exact: bool = True
    status: Verdict | None = None


def _probe(bounds, m: int, n: int) -> SimplicialSpace:
    M, N = bounds
    return external(ssets.make_standard(m, M), ssets.make_standard(n, N), name=f"F[{m}]xD[{n}]")


def _probe_map(bounds, cat_theta, m_src, m_tgt, space_theta, n_src, n_tgt) -> BisimplicialMap:
    M, N = bounds
    return external_map(ssets.monotone_map(cat_theta, m_src, m_tgt, M),
                        ssets.monotone_map(space_theta, n_src, n_tgt, N))


def _precompose_table(K, Y, cells_src, cells_tgt, probe_src, probe_tgt, g):
    """For each map h: K x probe_tgt -> Y, the index of h o (id x g) in cells_src."""
    P_src = product(K, probe_src) if K is not None else probe_src
    P_tgt = product(K, probe_tgt) if K is not None else probe_tgt
    if K is not None:
        lift = _core.product_map(_core.identity(K), g, P_src, P_tgt)
    else:
        lift = g
    index = {h.key(): i for i, h in enumerate(cells_src)}
    out = np.empty(len(cells_tgt), dtype=np.int64)
    for j, h in enumerate(cells_tgt):
        out[j] = index[lift.compose(h).key()]
    return out


def internal_hom(K: SimplicialSpace, Y: SimplicialSpace, budget: int = 10 ** 6,
                 name=None) -> tuple:
    """Y^K with (Y^K)_{m,n} = maps K x F[m] x Delta[n] -> Y.

    Returns (object, exact, verdict); the verdict is Unknown when the search
    budget ran out or some probe is not determined by its truncation.
    """
    bounds = Y.bounds
    if K.bounds != bounds:
        raise TruncationMismatch("internal hom needs equal truncations")
    cells, probes, exact = {}, {}, True
    for (m, n) in Y.ordered_degrees():
        probes[(m, n)] = _probe(bounds, m, n)
        S = product(K, probes[(m, n)])
        exact = exact and maps_exact(S, Y)
        res = search_maps(S, Y, budget=budget)
        if res.budget_hit:
            return None, False, Verdict.unknown(f"map enumeration budget hit at {(m, n)}")
        cells[(m, n)] = [BisimplicialMap(S, Y, a, validate=False) for a in res.solutions]
    faces, degens = {}, {}
    M, N = bounds
    for (m, n) in Y.degrees():
        for axis, deg_ax in ((CAT, m), (SPACE, n)):
            for i in range(deg_ax + 1 if deg_ax >= 1 else 0):
                lo = _core._shift((m, n), axis, -1)
                g = _coface_probe(bounds, (m, n), axis, i)
                faces[((m, n), axis, i)] = _precompose_table(K, Y, cells[lo], cells[(m, n)],
                                                             probes[lo], probes[(m, n)], g)
            if deg_ax + 1 <= bounds[axis]:
                up = _core._shift((m, n), axis, 1)
                for i in range(deg_ax + 1):
                    g = _codegen_probe(bounds, (m, n), axis, i)
                    degens[((m, n), axis, i)] = _precompose_table(K, Y, cells[up], cells[(m, n)],
                                                                  probes[up], probes[(m, n)], g)
    counts = {d: len(cells[d]) for d in Y.degrees()}
    skel_space = 0 if Y.skel[SPACE] == 0 else None
    H = SimplicialSpace(bounds, counts, faces, degens, labeler=lambda d, i: cells[d][i].key(),
                        skel=(None, skel_space), cosk=Y.cosk,
                        name=name or f"{Y.name}^{K.name}", validate=False)
    H.meta["cells"] = cells
    H.meta["exponent"] = K
    verdict = (Verdict.true({"exact": True}) if exact
               else Verdict.unknown("probe maps are not determined by the truncation"))
    return H, exact, verdict


def _coface_probe(bounds, deg, axis, i):
    m, n = deg
    if axis == CAT:
        return _probe_map(bounds, [v if v < i else v + 1 for v in range(m)], m - 1, m,
                          list(range(n + 1)), n, n)
    return _probe_map(bounds, list(range(m + 1)), m, m,
                      [v if v < i else v + 1 for v in range(n)], n - 1, n)


def _codegen_probe(bounds, deg, axis, i):
    m, n = deg
    if axis == CAT:
        return _probe_map(bounds, [v if v <= i else v - 1 for v in range(m + 2)], m + 1, m,
                          list(range(n + 1)), n, n)
    return _probe_map(bounds, list(range(m + 1)), m, m,
                      [v if v <= i else v - 1 for v in range(n + 2)], n + 1, n)


def mapping_space(A: SimplicialSpace, X: SimplicialSpace, up_to_dim: int | None = None,
                  budget: int = 10 ** 6) -> MappingSpaceResult:
    """Map(A, X)_n = maps A x Delta[n] -> X, enumerated by backtracking."""
    N = X.space_trunc
    up_to_dim = N if up_to_dim is None else up_to_dim
    if up_to_dim > N:
        raise ValueError("up_to_dim exceeds the space truncation")
    bounds = X.bounds
    maps, exact, sources = {}, True, {}
    for n in range(up_to_dim + 1):
        D = make_Delta_space(n, bounds)
        S = product(A, D)
        sources[n] = D
        exact = exact and maps_exact(S, X)
        res = search_maps(S, X, budget=budget)
        if res.budget_hit:
            return MappingSpaceResult(None, maps, False,
                                      Verdict.unknown(f"node budget {budget} exceeded at dimension {n}"))
        maps[n] = [BisimplicialMap(S, X, a, validate=False) for a in res.solutions]
    faces, degens = {}, {}
    for n in range(1, up_to_dim + 1):
        for i in range(n + 1):
            g = external_map(_id_sset(bounds[0]), ssets.coface(n, i, N))
            faces[((n,), 0, i)] = _precompose_table(A, X, maps[n - 1], maps[n], sources[n - 1], sources[n], g)
    for n in range(up_to_dim):
        for i in range(n + 1):
            g = external_map(_id_sset(bounds[0]), ssets.codegeneracy(n, i, N))
            degens[((n,), 0, i)] = _precompose_table(A, X, maps[n + 1], maps[n], sources[n + 1], sources[n], g)
    counts = {(n,): len(maps[n]) for n in range(up_to_dim + 1)}
    space = TruncatedSimplicialSet((up_to_dim,), counts, faces, degens,
                                   skel=(None,), cosk=(X.cosk[SPACE],),
                                   name=f"Map({A.name},{X.name})", validate=False)
    status = (Verdict.true({"exact": True}) if exact
              else Verdict.unknown("maps are not determined by the truncation"))
    return MappingSpaceResult(space, maps, exact, status)


# -- pushout-products ----------------------------------------------------------

def product_map(f: PresheafMap, g: PresheafMap) -> PresheafMap:
    return _core.product_map(f, g, product(f.source, g.source), product(f.target, g.target))


def pushout_product(f: BisimplicialMap, g: BisimplicialMap) -> BisimplicialMap:
    """B x C  u_{A x C}  A x D  ->  B x D for f: A -> B and g: C -> D."""
    A, B = f.source, f.target
    C, D = g.source, g.target
    AC, BC, AD, BD = product(A, C), product(B, C), product(A, D), product(B, D)
    f_C = _core.product_map(f, _core.identity(C), AC, BC)
    A_g = _core.product_map(_core.identity(A), g, AC, AD)
    f_D = _core.product_map(f, _core.identity(D), AD, BD)
    B_g = _core.product_map(_core.identity(B), g, BC, BD)
    Q, j_bc, j_ad = pushout(f_C, A_g, with_maps=True)
    Q.name = f"corner({f.source.name}->{f.target.name}, {g.source.name}->{g.target.name})"
    out = pushout_mediator(j_bc, j_ad, B_g, f_D)
    out.name = "pushout-product"
    out.meta = {"corner": Q, "product": BD}
    return out
