"""Finite presheaves on products of truncated simplex categories.

A truncated simplicial set is the one-axis case and a bi-truncated
simplicial space the two-axis case.  Cells of each multidegree are the
integers ``0..count-1``; face and degeneracy operators are integer arrays.
Everything in this module is axis-generic so limits, colimits, subobjects
and the lifting search are written once.
"""

from __future__ import annotations

import itertools
from typing import Callable, Hashable, Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

Degree = tuple


class TruncationMismatch(ValueError):
    pass


class SimplicialIdentityError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def _shift(deg: Degree, axis: int, by: int) -> Degree:
    out = list(deg)
    out[axis] += by
    return tuple(out)


def _max_or_none(values):
    values = list(values)
    if any(v is None for v in values):
        return None
    return max(values) if values else 0


def monotone_decompose(theta: Sequence[int], target_dim: int):
    """Split a monotone map [a]->[target_dim] into (faces, degeneracies).

    Applying ``faces`` (d_j, in order) and then ``degeneracies`` (s_i, in
    order) to a target_dim-cell realizes the pullback along theta.
    """
    image = sorted(set(theta))
    missing = [j for j in range(target_dim + 1) if j not in image]
    faces = sorted(missing, reverse=True)
    degens = [i for i in range(len(theta) - 1) if theta[i] == theta[i + 1]]
    return faces, degens


class Presheaf:
    """Finite, truncated multisimplicial set with explicit operator tables.

    ``skel[a]`` is a known bound on the dimension of cells that are
    nondegenerate along axis ``a`` (``None`` if unbounded or unknown) and
    ``cosk[a]`` a known coskeletality degree along axis ``a``.  These flags
    decide when a computation on the truncation is exact.
    """

    def __init__(self, bounds, counts, faces, degens, labeler=None,
                 skel=None, cosk=None, name="", validate=True):
        self.bounds = tuple(int(b) for b in bounds)
        self.axes = len(self.bounds)
        self.counts = {tuple(d): int(c) for d, c in counts.items()}
        self.faces = faces
        self.degens = degens
        self._labeler = labeler
        self.skel = tuple(skel) if skel is not None else (None,) * self.axes
        self.cosk = tuple(cosk) if cosk is not None else (None,) * self.axes
        self.name = name
        self._degenerate = None
        self._signature_index = {}
        self.meta = {}
        for d in self.degrees():
            self.counts.setdefault(d, 0)
        self._tighten_flags()
        if validate:
            errors = self.identity_errors()
            if errors:
                raise SimplicialIdentityError("; ".join(errors[:5]))

    def _tighten_flags(self):
        skel = list(self.skel)
        cosk = list(self.cosk)
        for a in range(self.axes):
            if skel[a] is not None and skel[a] <= self.bounds[a]:
                top = 0
                for d in self.degrees():
                    if d[a] > top and self.count(d):
                        if (~self.degenerate_mask(d, a)).any():
                            top = d[a]
                skel[a] = min(skel[a], top)
            if skel[a] == 0:
                # constant along this axis
                cosk[a] = 1 if cosk[a] is None else min(cosk[a], 1)
        self.skel, self.cosk = tuple(skel), tuple(cosk)

    # -- structure -------------------------------------------------------
    def degrees(self) -> list:
        return list(itertools.product(*(range(b + 1) for b in self.bounds)))

    def ordered_degrees(self) -> list:
        return sorted(self.degrees(), key=lambda d: (sum(d), d))

    def count(self, deg) -> int:
        return self.counts[tuple(deg)]

    def face(self, deg, axis, i) -> np.ndarray:
        return self.faces[(tuple(deg), axis, i)]

    def degen(self, deg, axis, i) -> np.ndarray:
        return self.degens[(tuple(deg), axis, i)]

    def has_degen(self, deg, axis) -> bool:
        return deg[axis] + 1 <= self.bounds[axis]

    def label(self, deg, idx):
        if self._labeler is None:
            return idx
        return self._labeler(tuple(deg), int(idx))

    def labels(self, deg) -> list:
        return [self.label(deg, i) for i in range(self.count(deg))]

    @property
    def total_cells(self) -> int:
        return sum(self.counts.values())

    def is_empty(self) -> bool:
        return self.counts[(0,) * self.axes] == 0

    def degenerate_mask(self, deg, axis=None) -> np.ndarray:
        """Cells of ``deg`` in the image of some degeneracy (along ``axis``)."""
        if self._degenerate is None:
            self._degenerate = {}
            for d in self.degrees():
                for a in range(self.axes):
                    self._degenerate[(d, a)] = np.zeros(self.count(d), dtype=bool)
            for (d, a, i), arr in self.degens.items():
                self._degenerate[(_shift(d, a, 1), a)][arr] = True
        deg = tuple(deg)
        if axis is not None:
            return self._degenerate[(deg, axis)]
        out = np.zeros(self.count(deg), dtype=bool)
        for a in range(self.axes):
            out |= self._degenerate[(deg, a)]
        return out

    def nondegenerate(self, deg) -> np.ndarray:
        return np.flatnonzero(~self.degenerate_mask(deg))

    def nondegenerate_counts(self) -> dict:
        return {d: int(len(self.nondegenerate(d))) for d in self.degrees()}

    def degeneracy_witness(self, deg):
        """For each cell, one (axis, i, base) with s_i(base) = cell, or None."""
        deg = tuple(deg)
        out = [None] * self.count(deg)
        for a in range(self.axes):
            if deg[a] == 0:
                continue
            below = _shift(deg, a, -1)
            for i in range(deg[a]):
                arr = self.degen(below, a, i)
                for base, cell in enumerate(arr.tolist()):
                    if out[cell] is None:
                        out[cell] = (a, i, base)
        return out

    def act(self, deg, idx, axis, theta) -> int:
        """Pull a cell back along a monotone map on one axis."""
        deg = tuple(deg)
        faces, degens = monotone_decompose(theta, deg[axis])
        cur, cell = deg, int(idx)
        for j in faces:
            cell = int(self.face(cur, axis, j)[cell])
            cur = _shift(cur, axis, -1)
        for i in degens:
            cell = int(self.degen(cur, axis, i)[cell])
            cur = _shift(cur, axis, 1)
        return cell

    def signature(self, deg, idx) -> tuple:
        deg = tuple(deg)
        sig = []
        for a in range(self.axes):
            if deg[a] == 0:
                continue
            for i in range(deg[a] + 1):
                sig.append(int(self.face(deg, a, i)[idx]))
        return tuple(sig)

    def signature_index(self, deg, key: np.ndarray | None = None) -> dict:
        """Map face signature (plus optional per-cell key) -> cell list."""
        deg = tuple(deg)
        cache_key = (deg, None if key is None else id(key))
        if key is None and cache_key in self._signature_index:
            return self._signature_index[cache_key]
        cols = []
        for a in range(self.axes):
            if deg[a] == 0:
                continue
            for i in range(deg[a] + 1):
                cols.append(self.face(deg, a, i))
        if key is not None:
            cols.append(key)
        index: dict = {}
        if cols:
            rows = np.stack(cols, axis=1).tolist()
            for cell, row in enumerate(rows):
                index.setdefault(tuple(row), []).append(cell)
        else:
            index[()] = list(range(self.count(deg)))
        if key is None:
            self._signature_index[cache_key] = index
        return index

    # -- validation ------------------------------------------------------
    def identity_errors(self) -> list:
        errs = []
        F, S = self.face, self.degen
        for deg in self.degrees():
            n = self.count(deg)
            for a in range(self.axes):
                d = deg[a]
                for i in range(d + 1 if d > 0 else 0):
                    arr = F(deg, a, i)
                    if arr.shape != (n,):
                        errs.append(f"face table {deg} axis {a} d{i} has wrong size")
                        return errs
                    tgt = self.count(_shift(deg, a, -1))
                    if n and (arr.min() < 0 or arr.max() >= tgt):
                        errs.append(f"face d{i} at {deg} axis {a} out of range")
                        return errs
                if self.has_degen(deg, a):
                    for i in range(d + 1):
                        arr = S(deg, a, i)
                        tgt = self.count(_shift(deg, a, 1))
                        if arr.shape != (n,) or (n and (arr.min() < 0 or arr.max() >= tgt)):
                            errs.append(f"degeneracy s{i} at {deg} axis {a} malformed")
                            return errs
                        if len(np.unique(arr)) != n:
                            errs.append(f"degeneracy s{i} at {deg} axis {a} not injective")
                # d_i d_j = d_{j-1} d_i
                if d >= 2:
                    lo = _shift(deg, a, -1)
                    for j in range(d + 1):
                        for i in range(j):
                            if not np.array_equal(F(lo, a, i)[F(deg, a, j)], F(lo, a, j - 1)[F(deg, a, i)]):
                                errs.append(f"d{i}d{j} != d{j-1}d{i} at {deg} axis {a}")
                if self.has_degen(deg, a):
                    up = _shift(deg, a, 1)
                    ident = np.arange(n)
                    for j in range(d + 1):
                        s = S(deg, a, j)
                        for i in range(d + 2):
                            lhs = F(up, a, i)[s]
                            if i in (j, j + 1):
                                ok = np.array_equal(lhs, ident)
                            elif i < j:
                                ok = np.array_equal(lhs, S(_shift(deg, a, -1), a, j - 1)[F(deg, a, i)])
                            else:
                                ok = np.array_equal(lhs, S(_shift(deg, a, -1), a, j)[F(deg, a, i - 1)])
                            if not ok:
                                errs.append(f"d{i}s{j} identity fails at {deg} axis {a}")
                    if self.has_degen(up, a):
                        for j in range(d + 1):
                            for i in range(j + 1):
                                if not np.array_equal(S(up, a, i)[S(deg, a, j)], S(up, a, j + 1)[S(deg, a, i)]):
                                    errs.append(f"s{i}s{j} identity fails at {deg} axis {a}")
            # operators on different axes commute
            for a, b in itertools.combinations(range(self.axes), 2):
                da, db = deg[a], deg[b]
                if da >= 1 and db >= 1:
                    for i in range(da + 1):
                        for j in range(db + 1):
                            lhs = F(_shift(deg, b, -1), a, i)[F(deg, b, j)]
                            rhs = F(_shift(deg, a, -1), b, j)[F(deg, a, i)]
                            if not np.array_equal(lhs, rhs):
                                errs.append(f"faces on axes {a},{b} do not commute at {deg}")
                for (x, y) in ((a, b), (b, a)):
                    if deg[y] >= 1 and self.has_degen(deg, x):
                        for i in range(deg[x] + 1):
                            for j in range(deg[y] + 1):
                                lhs = F(_shift(deg, x, 1), y, j)[S(deg, x, i)]
                                rhs = S(_shift(deg, y, -1), x, i)[F(deg, y, j)]
                                if not np.array_equal(lhs, rhs):
                                    errs.append(f"face/degeneracy on axes {y},{x} do not commute at {deg}")
                if self.has_degen(deg, a) and self.has_degen(deg, b):
                    for i in range(deg[a] + 1):
                        for j in range(deg[b] + 1):
                            lhs = S(_shift(deg, b, 1), a, i)[S(deg, b, j)]
                            rhs = S(_shift(deg, a, 1), b, j)[S(deg, a, i)]
                            if not np.array_equal(lhs, rhs):
                                errs.append(f"degeneracies on axes {a},{b} do not commute at {deg}")
        return errs

    def __repr__(self):
        nd = [int(len(self.nondegenerate(d))) for d in self.ordered_degrees()]
        return f"<{type(self).__name__} {self.name or ''} bounds={self.bounds} nondeg={nd}>"


class PresheafMap:
    """Cellwise assignment between presheaves of equal truncation."""

    def __init__(self, source: Presheaf, target: Presheaf, arrays: dict, validate=True, name=""):
        if source.bounds != target.bounds:
            raise TruncationMismatch(f"bounds {source.bounds} vs {target.bounds}")
        self.source = source
        self.target = target
        self.arrays = {tuple(d): np.asarray(a, dtype=np.int64) for d, a in arrays.items()}
        self.name = name
        for d in source.degrees():
            if d not in self.arrays:
                if source.count(d):
                    raise ValueError(f"map missing degree {d}")
                self.arrays[d] = np.zeros(0, dtype=np.int64)
        if validate:
            errors = self.errors()
            if errors:
                raise ValueError("not a map: " + "; ".join(errors[:5]))

    def __getitem__(self, deg) -> np.ndarray:
        return self.arrays[tuple(deg)]

    def errors(self) -> list:
        S, T = self.source, self.target
        errs = []
        for deg in S.degrees():
            g = self[deg]
            if g.shape != (S.count(deg),):
                return [f"assignment at {deg} has wrong size"]
            if len(g) and (g.min() < 0 or g.max() >= T.count(deg)):
                return [f"assignment at {deg} out of range"]
        for deg in S.degrees():
            for a in range(S.axes):
                if deg[a] >= 1:
                    lo = _shift(deg, a, -1)
                    for i in range(deg[a] + 1):
                        if not np.array_equal(self[lo][S.face(deg, a, i)], T.face(deg, a, i)[self[deg]]):
                            errs.append(f"does not commute with d{i} at {deg} axis {a}")
                if S.has_degen(deg, a):
                    up = _shift(deg, a, 1)
                    for i in range(deg[a] + 1):
                        if not np.array_equal(self[up][S.degen(deg, a, i)], T.degen(deg, a, i)[self[deg]]):
                            errs.append(f"does not commute with s{i} at {deg} axis {a}")
        return errs

    def compose(self, other: "PresheafMap") -> "PresheafMap":
        """``other`` after ``self``."""
        if other.source is not self.target and other.source.bounds != self.target.bounds:
            raise TruncationMismatch("cannot compose")
        return type(self)(self.source, other.target,
                          {d: other[d][self[d]] for d in self.source.degrees()}, validate=False)

    def is_injective(self) -> bool:
        return all(len(np.unique(a)) == len(a) for a in self.arrays.values())

    def is_surjective(self) -> bool:
        return all(len(np.unique(self[d])) == self.target.count(d) for d in self.target.degrees())

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "PresheafMap":
        arrays = {}
        for d in self.source.degrees():
            inv = np.empty(self.target.count(d), dtype=np.int64)
            inv[self[d]] = np.arange(self.source.count(d))
            arrays[d] = inv
        return type(self)(self.target, self.source, arrays, validate=False)

    def key(self) -> tuple:
        return tuple(tuple(self[d].tolist()) for d in self.source.ordered_degrees())

    def __eq__(self, other):
        if not isinstance(other, PresheafMap):
            return NotImplemented
        return (self.source.bounds == other.source.bounds
                and all(np.array_equal(self[d], other[d]) for d in self.source.degrees()))

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} {self.source.name!s}->{self.target.name!s}>"


Presheaf.map_class = PresheafMap


# -- exactness --------------------------------------------------------------

def maps_exact(source: Presheaf, target: Presheaf) -> bool:
    """Whether maps source->target are determined by their truncations.

    Per axis: the source is skeletal within the bound, or the target is
    coskeletal within the bound.
    """
    for a in range(source.axes):
        b = source.bounds[a]
        s, c = source.skel[a], target.cosk[a]
        if not ((s is not None and s <= b) or (c is not None and c <= b)):
            return False
    return True


def lift_exact(B: Presheaf, X: Presheaf, Y: Presheaf) -> bool:
    for a in range(B.axes):
        b = B.bounds[a]
        s = B.skel[a]
        cx, cy = X.cosk[a], Y.cosk[a]
        if not ((s is not None and s <= b) or (cx is not None and cy is not None and max(cx, cy) <= b)):
            return False
    return True


# -- constructions ----------------------------------------------------------

def from_keys(cls, bounds, keys: Callable[[Degree], list], face_fn, degen_fn,
              skel=None, cosk=None, name="", validate=True):
    """Build a presheaf from hashable cell keys and operator functions."""
    bounds = tuple(bounds)
    degs = list(itertools.product(*(range(b + 1) for b in bounds)))
    cells = {d: list(keys(d)) for d in degs}
    index = {d: {k: i for i, k in enumerate(cells[d])} for d in degs}
    faces, degens = {}, {}
    for d in degs:
        for a in range(len(bounds)):
            if d[a] >= 1:
                lo = _shift(d, a, -1)
                for i in range(d[a] + 1):
                    faces[(d, a, i)] = np.array([index[lo][face_fn(d, a, i, k)] for k in cells[d]], dtype=np.int64)
            if d[a] + 1 <= bounds[a]:
                up = _shift(d, a, 1)
                for i in range(d[a] + 1):
                    degens[(d, a, i)] = np.array([index[up][degen_fn(d, a, i, k)] for k in cells[d]], dtype=np.int64)
    counts = {d: len(cells[d]) for d in degs}
    return cls(bounds, counts, faces, degens, labeler=lambda d, i: cells[d][i],
               skel=skel, cosk=cosk, name=name, validate=validate)


def empty(cls, bounds, name="empty"):
    return from_keys(cls, bounds, lambda d: [], None, None, skel=(0,) * len(bounds),
                     cosk=(None,) * len(bounds), name=name)


def product(A: Presheaf, B: Presheaf, name=None):
    if A.bounds != B.bounds:
        raise TruncationMismatch(f"bounds {A.bounds} vs {B.bounds}")
    counts, faces, degens = {}, {}, {}
    for d in A.degrees():
        counts[d] = A.count(d) * B.count(d)
    for (d, a, i), fa in A.faces.items():
        fb = B.faces[(d, a, i)]
        nb_lo = B.count(_shift(d, a, -1))
        faces[(d, a, i)] = (np.repeat(fa, B.count(d)) * nb_lo + np.tile(fb, A.count(d))).astype(np.int64)
    for (d, a, i), sa in A.degens.items():
        sb = B.degens[(d, a, i)]
        nb_up = B.count(_shift(d, a, 1))
        degens[(d, a, i)] = (np.repeat(sa, B.count(d)) * nb_up + np.tile(sb, A.count(d))).astype(np.int64)

    def labeler(d, i, A=A, B=B):
        nb = B.count(d)
        return (A.label(d, i // nb), B.label(d, i % nb))

    skel = tuple(None if (x is None or y is None) else x + y for x, y in zip(A.skel, B.skel))
    cosk = tuple(None if (x is None or y is None) else max(x, y) for x, y in zip(A.cosk, B.cosk))
    P = type(A)(A.bounds, counts, faces, degens, labeler, skel, cosk,
                name or f"({A.name}x{B.name})", validate=False)
    P.meta["factors"] = (A, B)
    return P


def product_projections(P: Presheaf):
    A, B = P.meta["factors"]
    pa, pb = {}, {}
    for d in P.degrees():
        nb = B.count(d)
        idx = np.arange(P.count(d))
        pa[d] = idx // nb if nb else idx
        pb[d] = idx % nb if nb else idx
    return pa, pb


def pair_into_product(P: Presheaf, fa: PresheafMap, fb: PresheafMap) -> dict:
    A, B = P.meta["factors"]
    return {d: fa[d] * B.count(d) + fb[d] for d in P.degrees()}


def _ranges(lo, hi):
    lens = hi - lo
    total = int(lens.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    starts = np.repeat(lo - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return np.arange(total) + starts


def pullback_arrays(f: PresheafMap, g: PresheafMap):
    """Per degree, sorted pairs (b, c) with f(b) = g(c)."""
    pairs = {}
    for d in f.source.degrees():
        fb, gc = f[d], g[d]
        order = np.argsort(gc, kind="stable")
        sg = gc[order]
        lo = np.searchsorted(sg, fb, "left")
        hi = np.searchsorted(sg, fb, "right")
        b_idx = np.repeat(np.arange(len(fb)), hi - lo)
        c_idx = order[_ranges(lo, hi)]
        pairs[d] = (b_idx.astype(np.int64), c_idx.astype(np.int64))
    return pairs


def pullback(f: PresheafMap, g: PresheafMap, name=None):
    """Levelwise pullback of B -f-> D <-g- C, with its two projections."""
    B, C, D = f.source, g.source, f.target
    if not (B.bounds == C.bounds == D.bounds) or g.target.bounds != D.bounds:
        raise TruncationMismatch("pullback needs equal truncations")
    E = g.target
    if E is not D and (E.counts != D.counts
                       or any(not np.array_equal(v, E.faces[k]) for k, v in D.faces.items())):
        raise ValueError("pullback legs must share a target")
    pairs = pullback_arrays(f, g)
    codes = {d: pairs[d][0] * C.count(d) + pairs[d][1] for d in pairs}
    counts = {d: len(codes[d]) for d in codes}

    def locate(d, bvals, cvals):
        want = bvals * C.count(d) + cvals
        pos = np.searchsorted(codes[d], want)
        return pos.astype(np.int64)

    faces, degens = {}, {}
    for (d, a, i), fb in B.faces.items():
        lo = _shift(d, a, -1)
        b, c = pairs[d]
        faces[(d, a, i)] = locate(lo, fb[b], C.face(d, a, i)[c])
    for (d, a, i), sb in B.degens.items():
        up = _shift(d, a, 1)
        b, c = pairs[d]
        degens[(d, a, i)] = locate(up, sb[b], C.degen(d, a, i)[c])

    def labeler(d, i):
        b, c = pairs[d]
        return (B.label(d, b[i]), C.label(d, c[i]))

    skel = tuple(None if (x is None or y is None) else x + y for x, y in zip(B.skel, C.skel))
    cosk = tuple(_max_or_none(t) for t in zip(B.cosk, C.cosk, D.cosk))
    P = type(B)(B.bounds, counts, faces, degens, labeler, skel, cosk,
                name or f"({B.name}x_{D.name}{C.name})", validate=False)
    MapCls = type(f)
    pb = MapCls(P, B, {d: pairs[d][0] for d in pairs}, validate=False)
    pc = MapCls(P, C, {d: pairs[d][1] for d in pairs}, validate=False)
    P.meta["pullback_pairs"] = pairs
    return P, pb, pc


def pullback_mediator(P: Presheaf, to_b: PresheafMap, to_c: PresheafMap, C: Presheaf):
    pairs = P.meta["pullback_pairs"]
    arrays = {}
    for d in pairs:
        codes = pairs[d][0] * C.count(d) + pairs[d][1]
        want = to_b[d] * C.count(d) + to_c[d]
        pos = np.searchsorted(codes, want)
        if len(want) and (pos.max(initial=0) >= len(codes) or not np.array_equal(codes[np.minimum(pos, len(codes) - 1)], want)):
            raise ValueError("cone does not factor through the pullback")
        arrays[d] = pos
    return arrays


def pushout(f: PresheafMap, g: PresheafMap, name=None):
    """Levelwise pushout of B <-f- A -g-> C, with the two coprojections."""
    A, B, C = f.source, f.target, g.target
    if not (A.bounds == B.bounds == C.bounds) or g.source.bounds != A.bounds:
        raise TruncationMismatch("pushout needs equal truncations")
    comp, counts, reps = {}, {}, {}
    for d in A.degrees():
        nb, nc = B.count(d), C.count(d)
        n = nb + nc
        rows = f[d]
        cols = g[d] + nb
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        _, lab = connected_components(graph, directed=False)
        # canonical component numbering by smallest member
        first = {}
        for node, l in enumerate(lab.tolist()):
            first.setdefault(l, node)
        order = sorted(first, key=first.get)
        renum = {l: k for k, l in enumerate(order)}
        comp[d] = np.array([renum[l] for l in lab.tolist()], dtype=np.int64)
        counts[d] = len(order)
        reps[d] = np.array([first[l] for l in order], dtype=np.int64)

    def op(d, a, i, table_b, table_c, shift):
        nb = B.count(d)
        tgt = _shift(d, a, shift)
        out = np.empty(counts[d], dtype=np.int64)
        r = reps[d]
        in_b = r < nb
        out[in_b] = comp[tgt][table_b[(d, a, i)][r[in_b]]]
        out[~in_b] = comp[tgt][table_c[(d, a, i)][r[~in_b] - nb] + B.count(tgt)]
        return out

    faces = {(d, a, i): op(d, a, i, B.faces, C.faces, -1) for (d, a, i) in B.faces}
    degens = {(d, a, i): op(d, a, i, B.degens, C.degens, 1) for (d, a, i) in B.degens}

    def labeler(d, k):
        r = int(reps[d][k])
        nb = B.count(d)
        return ("B", B.label(d, r)) if r < nb else ("C", C.label(d, r - nb))

    skel = tuple(_max_or_none(t) for t in zip(B.skel, C.skel))
    P = type(B)(B.bounds, counts, faces, degens, labeler, skel, None,
                name or f"({B.name}+_{A.name}{C.name})", validate=False)
    MapCls = type(f)
    jb = MapCls(B, P, {d: comp[d][: B.count(d)] for d in comp}, validate=False)
    jc = MapCls(C, P, {d: comp[d][B.count(d):] for d in comp}, validate=False)
    return P, jb, jc


def coproduct(A: Presheaf, B: Presheaf, name=None):
    E = empty(type(A), A.bounds)
    MapCls = type(A).map_class
    ea = MapCls(E, A, {}, validate=False)
    eb = MapCls(E, B, {}, validate=False)
    P, ja, jb = pushout(ea, eb, name=name or f"({A.name}+{B.name})")
    return P, ja, jb


def subobject(X: Presheaf, mask: dict, name=None, map_class=None):
    """Subpresheaf on the cells flagged by ``mask`` (must be closed)."""
    keep = {d: np.flatnonzero(np.asarray(mask[d], dtype=bool)) for d in X.degrees()}
    newidx = {}
    for d in X.degrees():
        arr = np.full(X.count(d), -1, dtype=np.int64)
        arr[keep[d]] = np.arange(len(keep[d]))
        newidx[d] = arr
    faces, degens = {}, {}
    for (d, a, i), arr in X.faces.items():
        v = newidx[_shift(d, a, -1)][arr[keep[d]]]
        if (v < 0).any():
            raise ValueError("mask not closed under faces")
        faces[(d, a, i)] = v
    for (d, a, i), arr in X.degens.items():
        v = newidx[_shift(d, a, 1)][arr[keep[d]]]
        if (v < 0).any():
            raise ValueError("mask not closed under degeneracies")
        degens[(d, a, i)] = v
    counts = {d: len(keep[d]) for d in X.degrees()}
    map_class = map_class or type(X).map_class
    S = type(X)(X.bounds, counts, faces, degens,
                lambda d, i: X.label(d, keep[d][i]), X.skel, None,
                name or f"sub({X.name})", validate=False)
    inc = map_class(S, X, keep, validate=False)
    return S, inc


def closure_mask(X: Presheaf, seeds: dict) -> dict:
    """Smallest closed set of cells containing ``seeds``."""
    mask = {d: np.zeros(X.count(d), dtype=bool) for d in X.degrees()}
    for d, cells in seeds.items():
        mask[tuple(d)][np.asarray(list(cells), dtype=np.int64)] = True
    for d in sorted(X.degrees(), key=lambda d: -sum(d)):
        for a in range(X.axes):
            if d[a] >= 1:
                for i in range(d[a] + 1):
                    mask[_shift(d, a, -1)][X.face(d, a, i)[mask[d]]] = True
    for d in X.ordered_degrees():
        for a in range(X.axes):
            if X.has_degen(d, a):
                for i in range(d[a] + 1):
                    mask[_shift(d, a, 1)][X.degen(d, a, i)[mask[d]]] = True
    return mask


def image(f: PresheafMap, name=None):
    mask = {d: np.zeros(f.target.count(d), dtype=bool) for d in f.target.degrees()}
    for d in f.source.degrees():
        mask[d][f[d]] = True
    return subobject(f.target, mask, name=name, map_class=type(f))


def identity(X: Presheaf, map_class=None):
    map_class = map_class or type(X).map_class
    return map_class(X, X, {d: np.arange(X.count(d)) for d in X.degrees()}, validate=False)


def terminal_map(X: Presheaf, T: Presheaf, map_class=None):
    map_class = map_class or type(X).map_class
    return map_class(X, T, {d: np.zeros(X.count(d), dtype=np.int64) for d in X.degrees()}, validate=False)


# -- search -----------------------------------------------------------------

class SearchResult:
    """Outcome of a map search: solutions found and whether it was exhaustive."""

    def __init__(self, solutions, exhausted, nodes, budget_hit=False):
        self.solutions = solutions
        self.exhausted = exhausted
        self.nodes = nodes
        self.budget_hit = budget_hit


def search_maps(B: Presheaf, X: Presheaf, fixed: dict | None = None,
                over: tuple | None = None, limit: int | None = None,
                budget: int = 10 ** 6) -> SearchResult:
    """Backtracking enumeration of maps h: B -> X.

    ``fixed`` pins cells (``-1`` = free); ``over=(p, v)`` restricts to maps
    with p o h = v.  Cells are visited in a fixed depth-first order (faces
    before the cell) so that witnesses are reproducible.
    """
    if B.bounds != X.bounds:
        raise TruncationMismatch(f"bounds {B.bounds} vs {X.bounds}")
    degs = B.ordered_degrees()
    key_arrays = {}
    if over is not None:
        p, v = over
        for d in degs:
            key_arrays[d] = p[d]
    h = {d: np.full(B.count(d), -1, dtype=np.int64) for d in degs}
    fixed = {tuple(d): np.asarray(a, dtype=np.int64) for d, a in (fixed or {}).items()}

    # per cell plan: (deg, idx, face refs, degeneracy witness, fixed value, wanted key)
    wits, refs = {}, {}
    for d in degs:
        wits[d] = B.degeneracy_witness(d)
        face_refs = []
        for a in range(B.axes):
            if d[a] == 0:
                continue
            lo = _shift(d, a, -1)
            for i in range(d[a] + 1):
                face_refs.append((lo, B.face(d, a, i)))
        refs[d] = face_refs

    # Post-order from the top cells: every cell comes right after its
    # faces, so a bad vertex choice is rejected by the next edge.
    order, seen = [], {d: np.zeros(B.count(d), dtype=bool) for d in degs}
    for top in reversed(degs):
        for start in range(B.count(top)):
            if seen[top][start]:
                continue
            stack_dfs = [(top, start, False)]
            while stack_dfs:
                d, idx, expanded = stack_dfs.pop()
                if expanded:
                    if not seen[d][idx]:
                        seen[d][idx] = True
                        order.append((d, idx))
                    continue
                if seen[d][idx]:
                    continue
                stack_dfs.append((d, idx, True))
                deps = [(lo, int(arr[idx])) for lo, arr in refs[d]]
                w = wits[d][idx]
                if w is not None:
                    deps.append((_shift(d, w[0], -1), w[2]))
                for dep in reversed(deps):
                    if not seen[dep[0]][dep[1]]:
                        stack_dfs.append((dep[0], dep[1], False))

    plan = []
    for d, idx in order:
        fx = fixed.get(d)
        vv = over[1][d] if over is not None else None
        plan.append((d, idx, refs[d], wits[d][idx],
                     -1 if fx is None else int(fx[idx]),
                     None if vv is None else int(vv[idx])))

    indexes = {d: X.signature_index(d, key_arrays.get(d)) for d in degs}
    x_sig_cache = {}

    def x_signature(d, x):
        k = (d, x)
        if k not in x_sig_cache:
            sig = X.signature(d, x)
            if over is not None:
                sig = sig + (int(key_arrays[d][x]),)
            x_sig_cache[k] = sig
        return x_sig_cache[k]

    solutions = []
    nodes = 0
    stack = []  # (plan position, candidates, next pointer)
    pos = 0
    n = len(plan)
    while True:
        if pos == n:
            solutions.append({d: h[d].copy() for d in degs})
            if limit is not None and len(solutions) >= limit:
                return SearchResult(solutions, False, nodes)
            # backtrack
            pos = None
        else:
            d, idx, face_refs, wit, fx, want = plan[pos]
            sig = tuple(int(h[lo][arr[idx]]) for lo, arr in face_refs)
            if want is not None:
                sig = sig + (want,)
            forced = -1
            if wit is not None:
                a, i, base = wit
                forced = int(X.degen(_shift(d, a, -1), a, i)[h[_shift(d, a, -1)][base]])
            if fx >= 0:
                if forced >= 0 and forced != fx:
                    pos = None
                else:
                    forced = fx
            if pos is not None:
                if forced >= 0:
                    nodes += 1
                    if x_signature(d, forced) == sig:
                        h[d][idx] = forced
                        pos += 1
                        continue
                    pos = None
                else:
                    cands = indexes[d].get(sig, [])
                    stack.append([pos, cands, 0])
                    pos = None
        # advance the deepest open choice
        while pos is None:
            if not stack:
                return SearchResult(solutions, True, nodes)
            frame = stack[-1]
            p0, cands, ptr = frame
            if ptr >= len(cands):
                stack.pop()
                continue
            nodes += 1
            if nodes > budget:
                return SearchResult(solutions, False, nodes, budget_hit=True)
            d, idx = plan[p0][0], plan[p0][1]
            h[d][idx] = cands[ptr]
            frame[2] = ptr + 1
            pos = p0 + 1


# -- face-compatible tuples -------------------------------------------------

def _row_codes(rows: np.ndarray) -> np.ndarray:
    """Integer keys with equal keys exactly for equal rows (mixed radix,
    re-densified whenever the radix product would overflow)."""
    codes = np.zeros(len(rows), dtype=np.int64)
    limit = 2 ** 62
    for c in range(rows.shape[1]):
        col = rows[:, c] - rows[:, c].min()
        base = int(col.max()) + 1
        if (int(codes.max()) + 1) * base >= limit:
            codes = np.unique(codes, return_inverse=True)[1].reshape(-1).astype(np.int64)
        codes = codes * base + col
    return codes


def join_rows(left: np.ndarray, right: np.ndarray):
    """All index pairs (a, b) with left[a] == right[b] (row equality)."""
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    left = left.reshape(-1, 1) if left.ndim == 1 else left
    right = right.reshape(-1, 1) if right.ndim == 1 else right
    if left.shape[1] == 0:
        a = np.repeat(np.arange(len(left)), len(right))
        b = np.tile(np.arange(len(right)), len(left))
        return a.astype(np.int64), b.astype(np.int64)
    both = np.vstack([left, right])
    if len(both) == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    codes = _row_codes(both)
    lc, rc = codes[: len(left)], codes[len(left):]
    order = np.argsort(rc, kind="stable")
    sr = rc[order]
    lo = np.searchsorted(sr, lc, "left")
    hi = np.searchsorted(sr, lc, "right")
    a = np.repeat(np.arange(len(lc)), hi - lo)
    b = order[_ranges(lo, hi)]
    return a.astype(np.int64), b.astype(np.int64)


def face_tuples(X: Presheaf, deg, axis: int, indices) -> np.ndarray:
    """Tuples (x_i)_{i in indices} of cells one below ``deg`` along ``axis``
    with d_i x_j = d_{j-1} x_i whenever i < j.

    These are the maps from the union of the faces ``indices`` of the
    representable into X (horns, boundaries), computed by joins.
    """
    deg = tuple(deg)
    indices = sorted(indices)
    lo = _shift(deg, axis, -1)
    n_lo = X.count(lo)
    if not indices:
        return np.zeros((1, 0), dtype=np.int64)
    rows = np.arange(n_lo, dtype=np.int64).reshape(-1, 1)
    for pos in range(1, len(indices)):
        j = indices[pos]
        earlier = indices[:pos]
        if lo[axis] == 0:
            key_new = np.zeros((n_lo, 0), dtype=np.int64)
            key_old = np.zeros((len(rows), 0), dtype=np.int64)
        else:
            key_new = np.stack([X.face(lo, axis, i) for i in earlier], axis=1)
            key_old = np.stack([X.face(lo, axis, j - 1)[rows[:, c]] for c in range(len(earlier))], axis=1)
        a, b = join_rows(key_old, key_new)
        rows = np.hstack([rows[a], b.reshape(-1, 1)])
    return rows


def lifting_gaps(p: PresheafMap, deg, axis: int, indices, limit: int = 1):
    """Lifting problems of the face union ``indices`` into the representable
    at ``deg`` against p that have no filler.

    Returns (gaps, total) where each gap is (tuple of X cells, Y cell).
    """
    X, Y = p.source, p.target
    deg = tuple(deg)
    lo = _shift(deg, axis, -1)
    tup = face_tuples(X, deg, axis, indices)
    if indices:
        img = p[lo][tup]
        yface = np.stack([Y.face(deg, axis, i) for i in sorted(indices)], axis=1)
    else:
        img = np.zeros((len(tup), 0), dtype=np.int64)
        yface = np.zeros((Y.count(deg), 0), dtype=np.int64)
    a, b = join_rows(img, yface)
    wanted = np.hstack([tup[a], b.reshape(-1, 1)])
    if indices:
        xface = np.stack([X.face(deg, axis, i) for i in sorted(indices)], axis=1)
    else:
        xface = np.zeros((X.count(deg), 0), dtype=np.int64)
    have = np.hstack([xface, p[deg].reshape(-1, 1)])
    have_set = set(map(tuple, have.tolist()))
    gaps = []
    for row in wanted.tolist():
        if tuple(row) not in have_set:
            gaps.append((tuple(row[:-1]), row[-1]))
            if limit is not None and len(gaps) >= limit:
                break
    return gaps, len(wanted)


def act_all(X: Presheaf, deg, axis: int, theta) -> np.ndarray:
    """Pull every cell of ``deg`` back along a monotone map on one axis."""
    deg = tuple(deg)
    faces, degens = monotone_decompose(theta, deg[axis])
    cur = deg
    cells = np.arange(X.count(deg), dtype=np.int64)
    for j in faces:
        cells = X.face(cur, axis, j)[cells]
        cur = _shift(cur, axis, -1)
    for i in degens:
        cells = X.degen(cur, axis, i)[cells]
        cur = _shift(cur, axis, 1)
    return cells


def locate_rows(query: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Index in ``table`` of each row of ``query`` (rows of table unique)."""
    out = np.full(len(query), -1, dtype=np.int64)
    if len(query) == 0:
        return out
    a, b = join_rows(query, table)
    out[a] = b
    if (out < 0).any():
        raise KeyError("row not found")
    return out


def product_map(f: PresheafMap, g: PresheafMap, src: Presheaf, tgt: Presheaf) -> PresheafMap:
    """f x g between the products ``src`` = A x C and ``tgt`` = B x D."""
    arrays = {}
    for d in src.degrees():
        nc = g.source.count(d)
        nd = g.target.count(d)
        idx = np.arange(src.count(d))
        a, c = (idx // nc, idx % nc) if nc else (idx, idx)
        arrays[d] = f[d][a] * nd + g[d][c]
    return type(f)(src, tgt, arrays, validate=False)
