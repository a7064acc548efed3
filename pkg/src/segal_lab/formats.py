"""Text interchange for simplicial sets, simplicial spaces and categories.

Three line-oriented formats are supported, each with a canonical
serializer (sorted lines, so parse -> serialize is byte-stable):

* ``ssx 1``    truncated simplicial sets, and ``ssxmap 1`` maps between them
* ``bsx 1``    simplicial spaces (one embedded ssx block per level plus
               categorical face/degeneracy blocks), and ``bsxmap 1``
* ``cat 1``    finite categories

Blank lines and lines starting with ``#`` are ignored.  Every parse error
carries the 1-based line number it was detected on.
"""

from __future__ import annotations

import hashlib
import json
import re
import shlex
from pathlib import Path

import numpy as np

from . import cat as _cat
from ._core import Presheaf
from .bisimp import BisimplicialMap, SimplicialSpace
from .cat import CategoryError, FinCategory
from .ssets import SimplicialMap, TruncatedSimplicialSet


class FormatError(ValueError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line else message)


# -- tokens ---------------------------------------------------------------------

_BARE = re.compile(r"[A-Za-z0-9_\-\[\]()+*/^'<>|~!?@%&]+")


def quote(name) -> str:
    s = str(name).replace("\n", " ")
    if _BARE.fullmatch(s) and s not in ("->", "=", "."):
        return s
    return json.dumps(s, ensure_ascii=False)


def _opt_int(tok: str, line: int):
    if tok == "none":
        return None
    return _int(tok, line)


def _int(tok: str, line: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise FormatError(line, f"expected an integer, got {tok!r}") from None
    if v < 0:
        raise FormatError(line, f"expected a non-negative integer, got {v}")
    return v


def _fmt_opt(v) -> str:
    return "none" if v is None else str(int(v))


class _Lines:
    """Cursor over the meaningful lines of a text, keeping line numbers."""

    def __init__(self, text: str, offset: int = 0):
        self.items = []
        for k, raw in enumerate(text.splitlines(), start=1 + offset):
            s = raw.strip()
            if s and not s.startswith("#"):
                self.items.append((k, s))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self):
        item = self.peek()
        if item[0] is None:
            last = self.items[-1][0] if self.items else 0
            raise FormatError(last, "unexpected end of input")
        self.pos += 1
        return item

    def done(self) -> bool:
        return self.pos >= len(self.items)

    def block(self, terminator: str = "end"):
        """Consume lines up to a bare ``end`` and return them as a sub-cursor."""
        out = _Lines("")
        while True:
            ln, s = self.next()
            if s == terminator:
                return out
            out.items.append((ln, s))


def _expect_header(lines: _Lines, word: str):
    ln, s = lines.next()
    if s.split() != [word, "1"]:
        raise FormatError(ln, f"expected header '{word} 1', got {s!r}")
    return ln


# -- one-axis identity checks with line numbers ---------------------------------

def _fail(where, entries, message):
    lines = sorted({where(*e) for e in entries})
    note = f" (entries on lines {', '.join(map(str, lines))})" if len(lines) > 1 else ""
    raise FormatError(lines[0], message + note)


def _check_simplicial(top, count, face, degen, where):
    """Simplicial identities for a one-axis table family.

    ``where(kind, dim, cell, i)`` is the line that defined that entry.
    """
    for n in range(2, top + 1):
        for j in range(n + 1):
            for i in range(j):
                lhs = face(n - 1, i)[face(n, j)]
                rhs = face(n - 1, j - 1)[face(n, i)]
                bad = np.flatnonzero(lhs != rhs)
                if len(bad):
                    x = int(bad[0])
                    _fail(where, [("d", n, x, j), ("d", n, x, i)],
                          f"d{i} d{j} != d{j - 1} d{i} on {n}-simplex {x}")
    for n in range(top):
        for j in range(n + 1):
            s = degen(n, j)
            for i in range(n + 2):
                lhs = face(n + 1, i)[s]
                if i in (j, j + 1):
                    rhs = np.arange(count(n))
                    rule = f"d{i} s{j} = id"
                elif i < j:
                    rhs = degen(n - 1, j - 1)[face(n, i)]
                    rule = f"d{i} s{j} = s{j - 1} d{i}"
                else:
                    rhs = degen(n - 1, j)[face(n, i - 1)]
                    rule = f"d{i} s{j} = s{j} d{i - 1}"
                bad = np.flatnonzero(lhs != rhs)
                if len(bad):
                    x = int(bad[0])
                    _fail(where, [("s", n, x, j), ("d", n + 1, int(s[x]), i)],
                          f"{rule} fails on {n}-simplex {x}")
        if n + 1 < top:
            for j in range(n + 1):
                for i in range(j + 1):
                    lhs = degen(n + 1, i)[degen(n, j)]
                    rhs = degen(n + 1, j + 1)[degen(n, i)]
                    bad = np.flatnonzero(lhs != rhs)
                    if len(bad):
                        x = int(bad[0])
                        _fail(where, [("s", n, x, j), ("s", n, x, i),
                                      ("s", n + 1, int(degen(n, j)[x]), i),
                                      ("s", n + 1, int(degen(n, i)[x]), j + 1)],
                              f"s{i} s{j} = s{j + 1} s{i} fails on {n}-simplex {x}")


def _check_map_arrays(S, T, arrays, top, where):
    """A family of arrays commutes with faces and degeneracies (one axis)."""
    for n in range(top + 1):
        a = arrays[n]
        if len(a) and (a.min() < 0 or a.max() >= T(n)[0]):
            bad = int(np.flatnonzero((a < 0) | (a >= T(n)[0]))[0])
            raise FormatError(where(n, bad), f"target {a[bad]} out of range in dimension {n}")
    for n in range(1, top + 1):
        for i in range(n + 1):
            lhs = T(n)[1](i)[arrays[n]]
            rhs = arrays[n - 1][S(n)[1](i)]
            bad = np.flatnonzero(lhs != rhs)
            if len(bad):
                x = int(bad[0])
                raise FormatError(where(n, x), f"does not commute with d{i} at {n}-simplex {x}")
    for n in range(top):
        for i in range(n + 1):
            lhs = T(n)[2](i)[arrays[n]]
            rhs = arrays[n + 1][S(n)[2](i)]
            bad = np.flatnonzero(lhs != rhs)
            if len(bad):
                x = int(bad[0])
                raise FormatError(where(n, x), f"does not commute with s{i} at {n}-simplex {x}")


# -- SSX ---------------------------------------------------------------------------

class _SSXData:
    def __init__(self):
        self.name = ""
        self.trunc = None
        self.skel = None
        self.cosk = None
        self.counts = {}
        self.faces = {}
        self.degens = {}
        self.labels = {}
        self.lines = {}
        self.header_line = 0


def _parse_ssx_body(lines: _Lines, header_line: int, allow_flags: bool = True) -> _SSXData:
    data = _SSXData()
    data.header_line = header_line
    flag_lines = {}
    while not lines.done():
        ln, s = lines.next()
        word, _, rest = s.partition(" ")
        toks = s.split()
        if word == "name":
            data.name = rest.strip()
        elif word == "trunc":
            if len(toks) != 2:
                raise FormatError(ln, "expected 'trunc <d>'")
            data.trunc = _int(toks[1], ln)
        elif word in ("skel", "cosk") and allow_flags:
            if len(toks) != 2:
                raise FormatError(ln, f"expected '{word} <d|none>'")
            setattr(data, word, _opt_int(toks[1], ln))
            flag_lines[word] = ln
        elif word == "dim":
            m = re.fullmatch(r"dim\s+(\d+)\s*:\s*(\d+)", s)
            if not m:
                raise FormatError(ln, "expected 'dim <d>: <count>'")
            d, c = int(m.group(1)), int(m.group(2))
            if d in data.counts:
                raise FormatError(ln, f"dimension {d} declared twice")
            data.counts[d] = c
        elif word in ("d", "s"):
            if len(toks) != 6 or toks[4] != "->":
                raise FormatError(ln, f"expected '{word} <dim> <simplex> <i> -> <simplex>'")
            n, x, i, y = (_int(toks[k], ln) for k in (1, 2, 3, 5))
            _store_op(data, ln, word, n, x, i, y)
        elif word == "label":
            if len(toks) < 3:
                raise FormatError(ln, "expected 'label <dim> <simplex> <string>'")
            n, x = _int(toks[1], ln), _int(toks[2], ln)
            text = s.split(None, 3)[3] if len(toks) > 3 else ""
            if n not in data.counts or x >= data.counts[n]:
                raise FormatError(ln, f"label for unknown {n}-simplex {x}")
            if (n, x) in data.labels:
                raise FormatError(ln, f"{n}-simplex {x} labelled twice")
            data.labels[(n, x)] = text
        else:
            raise FormatError(ln, f"unknown directive {word!r}")
    _finish_ssx(data)
    return data


def _store_op(data: _SSXData, ln, kind, n, x, i, y):
    if data.trunc is None:
        raise FormatError(ln, "'trunc' must precede operator lines")
    if n not in data.counts:
        raise FormatError(ln, f"dimension {n} not declared")
    if x >= data.counts[n]:
        raise FormatError(ln, f"{n}-simplex {x} out of range")
    if kind == "d":
        if n < 1 or i > n:
            raise FormatError(ln, f"no face d{i} in dimension {n}")
        tgt_dim = n - 1
    else:
        if n + 1 > data.trunc or i > n:
            raise FormatError(ln, f"no degeneracy s{i} in dimension {n}")
        tgt_dim = n + 1
    if tgt_dim not in data.counts:
        raise FormatError(ln, f"dimension {tgt_dim} not declared")
    if y >= data.counts[tgt_dim]:
        raise FormatError(ln, f"{tgt_dim}-simplex {y} out of range")
    table = data.faces if kind == "d" else data.degens
    arr = table.setdefault((n, i), np.full(data.counts[n], -1, dtype=np.int64))
    if arr[x] != -1:
        raise FormatError(ln, f"{kind}{i} of {n}-simplex {x} given twice")
    arr[x] = y
    data.lines[(kind, n, x, i)] = ln


def _finish_ssx(data: _SSXData):
    h = data.header_line
    if data.trunc is None:
        raise FormatError(h, "missing 'trunc'")
    for d in range(data.trunc + 1):
        if d not in data.counts:
            raise FormatError(h, f"missing 'dim {d}: <count>'")
    extra = [d for d in data.counts if d > data.trunc]
    if extra:
        raise FormatError(h, f"dimension {extra[0]} exceeds trunc {data.trunc}")
    for n in range(data.trunc + 1):
        c = data.counts[n]
        for kind, table, ok in (("d", data.faces, n >= 1), ("s", data.degens, n + 1 <= data.trunc)):
            if not ok:
                continue
            for i in range(n + 1):
                arr = table.setdefault((n, i), np.full(c, -1, dtype=np.int64))
                missing = np.flatnonzero(arr < 0)
                if len(missing):
                    raise FormatError(h, f"missing {kind}{i} for {n}-simplex {int(missing[0])}")

    def where(kind, n, x, i):
        return data.lines.get((kind, n, x, i), h)

    _check_simplicial(data.trunc, lambda n: data.counts[n], lambda n, i: data.faces[(n, i)],
                      lambda n, i: data.degens[(n, i)], where)


def _ssx_from_data(data: _SSXData) -> TruncatedSimplicialSet:
    counts = {(n,): c for n, c in data.counts.items()}
    faces = {((n,), 0, i): a for (n, i), a in data.faces.items()}
    degens = {((n,), 0, i): a for (n, i), a in data.degens.items()}
    labels = dict(data.labels)
    labeler = (lambda d, i: labels.get((d[0], i), i)) if labels else None
    return TruncatedSimplicialSet((data.trunc,), counts, faces, degens, labeler=labeler,
                                  skel=(data.skel,), cosk=(data.cosk,), name=data.name,
                                  validate=False)


def parse_ssx(text: str) -> TruncatedSimplicialSet:
    lines = _Lines(text)
    h = _expect_header(lines, "ssx")
    return _ssx_from_data(_parse_ssx_body(lines, h))


def _explicit_label(X: Presheaf, deg, i):
    if X._labeler is None:
        return None
    lab = X.label(deg, i)
    if isinstance(lab, (int, np.integer)) and int(lab) == i:
        return None
    return str(lab).replace("\n", " ")


def _ssx_lines(X: Presheaf, deg_of, trunc, flags=True, labels=True, name=True) -> list:
    out = ["ssx 1"]
    if name and X.name:
        out.append(f"name {X.name}")
    out.append(f"trunc {trunc}")
    if flags:
        out.append(f"skel {_fmt_opt(X.skel[0])}")
        out.append(f"cosk {_fmt_opt(X.cosk[0])}")
    for n in range(trunc + 1):
        out.append(f"dim {n}: {X.count(deg_of(n))}")
    for n in range(1, trunc + 1):
        for x in range(X.count(deg_of(n))):
            for i in range(n + 1):
                out.append(f"d {n} {x} {i} -> {int(X.face(deg_of(n), len(deg_of(n)) - 1, i)[x])}")
    for n in range(trunc):
        for x in range(X.count(deg_of(n))):
            for i in range(n + 1):
                out.append(f"s {n} {x} {i} -> {int(X.degen(deg_of(n), len(deg_of(n)) - 1, i)[x])}")
    if labels:
        for n in range(trunc + 1):
            for x in range(X.count(deg_of(n))):
                lab = _explicit_label(X, deg_of(n), x)
                if lab is not None:
                    out.append(f"label {n} {x} {lab}".rstrip())
    return out


def serialize_ssx(X: TruncatedSimplicialSet) -> str:
    return "\n".join(_ssx_lines(X, lambda n: (n,), X.trunc_dim)) + "\n"


# -- SSX maps ------------------------------------------------------------------

def _parse_at_lines(lines: _Lines, arity: int):
    """``at <deg...> <src> -> <tgt>`` lines into {deg: {src: (tgt, line)}}."""
    out = {}
    while not lines.done():
        ln, s = lines.next()
        toks = s.split()
        if toks[0] != "at" or len(toks) != arity + 4 or toks[-2] != "->":
            raise FormatError(ln, f"expected 'at {'<m> <n>' if arity == 2 else '<dim>'} <src> -> <tgt>'")
        vals = [_int(t, ln) for t in toks[1:arity + 2]] + [_int(toks[-1], ln)]
        deg, src, tgt = tuple(vals[:arity]), vals[arity], vals[arity + 1]
        slot = out.setdefault(deg, {})
        if src in slot:
            raise FormatError(ln, f"image of {deg} cell {src} given twice")
        slot[src] = (tgt, ln)
    return out


def _arrays_from_at(entries, source: Presheaf, header_line: int, shape_name: str):
    arrays, where = {}, {}
    for deg in source.degrees():
        slot = entries.get(deg, {})
        arr = np.full(source.count(deg), -1, dtype=np.int64)
        for src, (tgt, ln) in slot.items():
            if src >= len(arr):
                raise FormatError(ln, f"source cell {src} out of range at {shape_name} {deg}")
            arr[src] = tgt
            where[(deg, src)] = ln
        missing = np.flatnonzero(arr < 0)
        if len(missing):
            raise FormatError(header_line, f"missing image of cell {int(missing[0])} at {shape_name} {deg}")
        arrays[deg] = arr
    for deg in entries:
        if deg not in arrays:
            ln = next(iter(entries[deg].values()))[1]
            raise FormatError(ln, f"degree {deg} outside the source truncation")
    return arrays, where


def _sub_block(lines: _Lines, word: str):
    ln, s = lines.next()
    if s != word:
        raise FormatError(ln, f"expected '{word}' block")
    block = lines.block()
    return ln, block


def parse_ssxmap(text: str) -> SimplicialMap:
    lines = _Lines(text)
    h = _expect_header(lines, "ssxmap")
    name = ""
    if lines.peek()[1] and lines.peek()[1].startswith("name "):
        name = lines.next()[1][5:].strip()
    objs = []
    for word in ("source", "target"):
        ln, block = _sub_block(lines, word)
        hh = _expect_header(block, "ssx")
        objs.append(_ssx_from_data(_parse_ssx_body(block, hh)))
    S, T = objs
    if S.trunc_dim != T.trunc_dim:
        raise FormatError(h, "source and target truncations differ")
    arrays, where = _arrays_from_at(_parse_at_lines(lines, 1), S, h, "dimension")
    _check_map_arrays(
        lambda n: (S.count((n,)), lambda i: S.face((n,), 0, i), lambda i: S.degen((n,), 0, i)),
        lambda n: (T.count((n,)), lambda i: T.face((n,), 0, i), lambda i: T.degen((n,), 0, i)),
        {n: arrays[(n,)] for n in range(S.trunc_dim + 1)}, S.trunc_dim,
        lambda n, x: where.get(((n,), x), h))
    return SimplicialMap(S, T, arrays, validate=False, name=name)


def _indent_block(word, body_lines) -> list:
    return [word] + body_lines + ["end"]


def serialize_ssxmap(f: SimplicialMap) -> str:
    out = ["ssxmap 1"]
    if f.name:
        out.append(f"name {f.name}")
    out += _indent_block("source", serialize_ssx(f.source).splitlines())
    out += _indent_block("target", serialize_ssx(f.target).splitlines())
    for n in range(f.source.trunc_dim + 1):
        for x, y in enumerate(f[(n,)].tolist()):
            out.append(f"at {n} {x} -> {y}")
    return "\n".join(out) + "\n"


# -- CAT -------------------------------------------------------------------------

def _tokens(s: str, ln: int) -> list:
    try:
        return shlex.split(s, posix=True)
    except ValueError as exc:
        raise FormatError(ln, f"bad quoting: {exc}") from None


def _parse_cat_body(lines: _Lines, header_line: int) -> FinCategory:
    name = ""
    objects, ob_line = [], {}
    arrows, mor_line = {}, {}
    ids, id_line = {}, {}
    comps, comp_line = {}, {}
    while not lines.done():
        ln, s = lines.next()
        word = s.split(None, 1)[0]
        if word == "name":
            name = s[4:].strip()
            continue
        toks = _tokens(s, ln)
        if word == "ob":
            if len(toks) != 2:
                raise FormatError(ln, "expected 'ob <name>'")
            if toks[1] in ob_line:
                raise FormatError(ln, f"object {toks[1]!r} declared twice")
            objects.append(toks[1])
            ob_line[toks[1]] = ln
        elif word == "mor":
            if len(toks) != 5 or not toks[1].endswith(":") or toks[3] != "->":
                raise FormatError(ln, "expected 'mor <name>: <src> -> <tgt>'")
            m, a, b = toks[1][:-1], toks[2], toks[4]
            if m in arrows:
                raise FormatError(ln, f"morphism {m!r} declared twice")
            for o in (a, b):
                if o not in ob_line:
                    raise FormatError(ln, f"unknown object {o!r}")
            arrows[m] = (a, b)
            mor_line[m] = ln
        elif word == "id":
            if len(toks) != 4 or toks[2] != "=":
                raise FormatError(ln, "expected 'id <ob> = <mor>'")
            o, m = toks[1], toks[3]
            if o not in ob_line:
                raise FormatError(ln, f"unknown object {o!r}")
            if m not in arrows:
                raise FormatError(ln, f"unknown morphism {m!r}")
            if arrows[m] != (o, o):
                raise FormatError(ln, f"identity {m!r} is not an endomorphism of {o!r}")
            if o in ids:
                raise FormatError(ln, f"identity of {o!r} given twice")
            ids[o] = m
            id_line[o] = ln
        elif word == "comp":
            if len(toks) != 6 or toks[2] != "." or toks[4] != "=":
                raise FormatError(ln, "expected 'comp <g> . <f> = <h>'")
            g, f, h = toks[1], toks[3], toks[5]
            for m in (g, f, h):
                if m not in arrows:
                    raise FormatError(ln, f"unknown morphism {m!r}")
            if arrows[f][1] != arrows[g][0]:
                raise FormatError(ln, f"{g!r} . {f!r} is not composable")
            if arrows[h] != (arrows[f][0], arrows[g][1]):
                raise FormatError(ln, f"{h!r} has the wrong source or target for {g!r} . {f!r}")
            if (g, f) in comps:
                raise FormatError(ln, f"composite {g!r} . {f!r} given twice")
            comps[(g, f)] = h
            comp_line[(g, f)] = ln
        else:
            raise FormatError(ln, f"unknown directive {word!r}")
    for o in objects:
        if o not in ids:
            raise FormatError(ob_line[o], f"object {o!r} has no identity")
    # composites with identities are implied; an explicit one must agree
    for m, (a, b) in arrows.items():
        for key, want in (((ids[b], m), m), ((m, ids[a]), m)):
            if key in comps and comps[key] != want:
                raise FormatError(comp_line[key], f"unit law fails: {key[0]!r} . {key[1]!r} != {want!r}")
            comps[key] = want
    for g, (gb, _) in arrows.items():
        for f, (_, fb) in arrows.items():
            if fb == gb and (g, f) not in comps:
                raise FormatError(mor_line[g], f"composition table not total: {g!r} . {f!r} missing")
    for (g, f), gf in comps.items():
        for h, (hs, _) in arrows.items():
            if hs != arrows[g][1]:
                continue
            left, right = comps[(h, gf)], comps[(comps[(h, g)], f)]
            if left != right:
                ln = comp_line.get((g, f)) or comp_line.get((h, g)) or header_line
                raise FormatError(ln, f"associativity fails for {h!r} . {g!r} . {f!r}")
    try:
        return _cat.from_labels(objects, arrows, ids, comps, name=name)
    except CategoryError as exc:
        raise FormatError(header_line, str(exc)) from None


def parse_cat(text: str) -> FinCategory:
    lines = _Lines(text)
    h = _expect_header(lines, "cat")
    return _parse_cat_body(lines, h)


def _cat_lines(C: FinCategory) -> list:
    out = ["cat 1"]
    if C.name:
        out.append(f"name {C.name}")
    ob = [quote(o) for o in C.objects]
    mor = [quote(m) for m in C.morphisms]
    if len(set(ob)) != len(ob) or len(set(mor)) != len(mor):
        raise ValueError("labels collide after conversion to text")
    for o in ob:
        out.append(f"ob {o}")
    for k, m in enumerate(mor):
        out.append(f"mor {m}: {ob[C.src[k]]} -> {ob[C.tgt[k]]}")
    for x, o in enumerate(ob):
        out.append(f"id {o} = {mor[C.identities[x]]}")
    idents = set(C.identities.tolist())
    for g in range(C.n_morphisms):
        for f in range(C.n_morphisms):
            h = int(C.table[g, f])
            if h >= 0 and g not in idents and f not in idents:
                out.append(f"comp {mor[g]} . {mor[f]} = {mor[h]}")
    return out


def serialize_cat(C: FinCategory) -> str:
    return "\n".join(_cat_lines(C)) + "\n"


def _stringify(C: FinCategory) -> FinCategory:
    """The same category with every label replaced by its text form."""
    return FinCategory([str(o) for o in C.objects], [str(m) for m in C.morphisms],
                       C.src, C.tgt, C.identities, C.table, name=C.name, validate=False)


# -- BSX ---------------------------------------------------------------------------

def _bsx_lines(X: SimplicialSpace) -> list:
    M, N = X.bounds
    nerve_backed = "category" in X.meta
    out = ["bsx 1"]
    if X.name:
        out.append(f"name {X.name}")
    out.append(f"bounds {M} {N}")
    out.append(f"coskeletal_from {_fmt_opt(X.cosk[0])}")
    out.append(f"space_coskeletal {_fmt_opt(X.cosk[1])}")
    out.append(f"skel {_fmt_opt(X.skel[0])} {_fmt_opt(X.skel[1])}")
    for m in range(M + 1):
        out.append(f"level {m}")
        out += _ssx_lines(X, lambda n, m=m: (m, n), N, flags=False, labels=False, name=False)
        out.append("end")
    for m in range(1, M + 1):
        for i in range(m + 1):
            out.append(f"cface {m} {i}")
            for n in range(N + 1):
                for x, y in enumerate(X.face((m, n), 0, i).tolist()):
                    out.append(f"at {n} {x} -> {y}")
            out.append("end")
    for m in range(M):
        for i in range(m + 1):
            out.append(f"cdegen {m} {i}")
            for n in range(N + 1):
                for x, y in enumerate(X.degen((m, n), 0, i).tolist()):
                    out.append(f"at {n} {x} -> {y}")
            out.append("end")
    if nerve_backed:
        out.append("category")
        out += _cat_lines(_stringify(X.meta["category"]))
        out.append("end")
    elif X._labeler is not None:
        for d in X.ordered_degrees():
            for x in range(X.count(d)):
                lab = _explicit_label(X, d, x)
                if lab is not None:
                    out.append(f"label {d[0]} {d[1]} {x} {lab}".rstrip())
    return out


def serialize_bsx(X: SimplicialSpace) -> str:
    return "\n".join(_bsx_lines(X)) + "\n"


def _parse_bsx_lines(lines: _Lines, h: int) -> SimplicialSpace:
    name, bounds, cosk, skel = "", None, [None, None], [None, None]
    levels, level_line = {}, {}
    cmaps = {}
    category, labels = None, {}
    while not lines.done():
        ln, s = lines.next()
        toks = s.split()
        word = toks[0]
        if word == "name":
            name = s[4:].strip()
        elif word == "bounds":
            if len(toks) != 3:
                raise FormatError(ln, "expected 'bounds <M> <N>'")
            bounds = (_int(toks[1], ln), _int(toks[2], ln))
        elif word == "coskeletal_from":
            cosk[0] = _opt_int(toks[1], ln) if len(toks) == 2 else _bad(ln, s)
        elif word == "space_coskeletal":
            cosk[1] = _opt_int(toks[1], ln) if len(toks) == 2 else _bad(ln, s)
        elif word == "skel":
            if len(toks) != 3:
                raise FormatError(ln, "expected 'skel <a|none> <b|none>'")
            skel = [_opt_int(toks[1], ln), _opt_int(toks[2], ln)]
        elif word == "level":
            if bounds is None:
                raise FormatError(ln, "'bounds' must precede levels")
            m = _int(toks[1], ln) if len(toks) == 2 else _bad(ln, s)
            if m > bounds[0] or m in levels:
                raise FormatError(ln, f"unexpected level {m}")
            block = lines.block()
            hh = _expect_header(block, "ssx")
            data = _parse_ssx_body(block, hh, allow_flags=False)
            if data.trunc != bounds[1]:
                raise FormatError(hh, f"level {m} has trunc {data.trunc}, expected {bounds[1]}")
            levels[m], level_line[m] = data, ln
        elif word in ("cface", "cdegen"):
            if bounds is None or len(toks) != 3:
                raise FormatError(ln, f"expected '{word} <m> <i>' after 'bounds'")
            m, i = _int(toks[1], ln), _int(toks[2], ln)
            ok = (1 <= m <= bounds[0]) if word == "cface" else (m + 1 <= bounds[0])
            if not ok or i > m or (word, m, i) in cmaps:
                raise FormatError(ln, f"unexpected block {word} {m} {i}")
            cmaps[(word, m, i)] = (ln, _parse_at_lines(lines.block(), 1))
        elif word == "category":
            hh = None
            block = lines.block()
            hh = _expect_header(block, "cat")
            category = (ln, _parse_cat_body(block, hh))
        elif word == "label":
            if len(toks) < 4:
                raise FormatError(ln, "expected 'label <m> <n> <cell> <string>'")
            key = tuple(_int(t, ln) for t in toks[1:4])
            labels[key] = (s.split(None, 4)[4] if len(toks) > 4 else "", ln)
        else:
            raise FormatError(ln, f"unknown directive {word!r}")
    if bounds is None:
        raise FormatError(h, "missing 'bounds'")
    M, N = bounds
    for m in range(M + 1):
        if m not in levels:
            raise FormatError(h, f"missing level {m}")
    counts, faces, degens = {}, {}, {}
    for m, data in levels.items():
        for n in range(N + 1):
            counts[(m, n)] = data.counts[n]
        for (n, i), a in data.faces.items():
            faces[((m, n), 1, i)] = a
        for (n, i), a in data.degens.items():
            degens[((m, n), 1, i)] = a
    for (word, m, i), (ln, entries) in sorted(cmaps.items()):
        src_m, tgt_m = m, (m - 1 if word == "cface" else m + 1)
        for deg in entries:
            if deg[0] > N:
                raise FormatError(next(iter(entries[deg].values()))[1], f"space degree {deg[0]} exceeds {N}")
        for n in range(N + 1):
            slot = entries.get((n,), {})
            arr = np.full(counts[(src_m, n)], -1, dtype=np.int64)
            for x, (y, yl) in slot.items():
                if x >= len(arr) or y >= counts[(tgt_m, n)]:
                    raise FormatError(yl, f"cell out of range in {word} {m} {i}")
                arr[x] = y
            miss = np.flatnonzero(arr < 0)
            if len(miss):
                raise FormatError(ln, f"{word} {m} {i} misses cell {int(miss[0])} at space degree {n}")
            (faces if word == "cface" else degens)[((m, n), 0, i)] = arr
    for m in range(M + 1):
        for i in range(m + 1):
            if m >= 1 and ((m, 0), 0, i) not in faces:
                raise FormatError(h, f"missing block cface {m} {i}")
            if m + 1 <= M and ((m, 0), 0, i) not in degens:
                raise FormatError(h, f"missing block cdegen {m} {i}")
    _check_bsx(levels, level_line, cmaps, counts, faces, degens, M, N, h)
    labeler = None
    if labels:
        for (m, n, x), (_, ln) in labels.items():
            if m > M or n > N or x >= counts[(m, n)]:
                raise FormatError(ln, f"label for unknown cell ({m}, {n}) {x}")
        text = {k: v[0] for k, v in labels.items()}
        labeler = lambda d, i: text.get((d[0], d[1], i), i)  # noqa: E731
    X = SimplicialSpace((M, N), counts, faces, degens, labeler=labeler, skel=skel,
                        cosk=cosk, name=name, validate=False)
    if category is not None:
        X = _as_nerve(X, category, h)
    return X


def _bad(ln, s):
    raise FormatError(ln, f"malformed line {s!r}")


def _check_bsx(levels, level_line, cmaps, counts, faces, degens, M, N, h):
    """Categorical identities columnwise, then that each categorical map is simplicial."""

    def cline(word, m, i, n, x):
        entry = cmaps.get((word, m, i))
        if entry is None:
            return h
        return entry[1].get((n,), {}).get(x, (None, entry[0]))[1]

    for n in range(N + 1):
        _check_simplicial(M, lambda m: counts[(m, n)], lambda m, i: faces[((m, n), 0, i)],
                          lambda m, i: degens[((m, n), 0, i)],
                          lambda kind, m, x, i: cline("cface" if kind == "d" else "cdegen", m, i, n, x))

    def level_ops(m):
        return lambda n: (counts[(m, n)], lambda i: faces[((m, n), 1, i)],
                          lambda i: degens[((m, n), 1, i)])

    for (word, m, i), (ln, _) in sorted(cmaps.items()):
        tgt = m - 1 if word == "cface" else m + 1
        table = faces if word == "cface" else degens
        arrays = {n: table[((m, n), 0, i)] for n in range(N + 1)}
        _check_map_arrays(level_ops(m), level_ops(tgt), arrays, N,
                          lambda n, x, word=word, m=m, i=i: cline(word, m, i, n, x))


def _as_nerve(X: SimplicialSpace, category, h) -> SimplicialSpace:
    ln, C = category
    Y = _cat.nerve(C, X.bounds)
    same = all(X.count(d) == Y.count(d) for d in X.degrees()) and all(
        np.array_equal(X.faces[k], Y.faces[k]) for k in Y.faces) and all(
        np.array_equal(X.degens[k], Y.degens[k]) for k in Y.degens)
    if not same:
        raise FormatError(ln, "embedded category does not match the cells (not its nerve)")
    if X.name:
        Y.name = X.name
    return Y


def parse_bsx(text: str) -> SimplicialSpace:
    lines = _Lines(text)
    h = _expect_header(lines, "bsx")
    return _parse_bsx_lines(lines, h)


def serialize_bsxmap(f: BisimplicialMap) -> str:
    out = ["bsxmap 1"]
    if f.name:
        out.append(f"name {f.name}")
    out += _indent_block("source", _bsx_lines(f.source))
    out += _indent_block("target", _bsx_lines(f.target))
    for d in f.source.ordered_degrees():
        for x, y in enumerate(f[d].tolist()):
            out.append(f"at {d[0]} {d[1]} {x} -> {y}")
    return "\n".join(out) + "\n"


def _nested_block(lines: _Lines, word: str) -> _Lines:
    """A block whose body may itself contain ``end`` lines (one per opener)."""
    ln, s = lines.next()
    if s != word:
        raise FormatError(ln, f"expected '{word}' block")
    out = _Lines("")
    depth = 0
    openers = ("level", "cface", "cdegen", "category")
    while True:
        ln, s = lines.next()
        head = s.split()[0]
        if s == "end":
            if depth == 0:
                return out
            depth -= 1
        elif head in openers:
            depth += 1
        out.items.append((ln, s))


def parse_bsxmap(text: str) -> BisimplicialMap:
    lines = _Lines(text)
    h = _expect_header(lines, "bsxmap")
    name = ""
    if lines.peek()[1] and lines.peek()[1].startswith("name "):
        name = lines.next()[1][5:].strip()
    objs = []
    for word in ("source", "target"):
        block = _nested_block(lines, word)
        hh = _expect_header(block, "bsx")
        objs.append(_parse_bsx_lines(block, hh))
    S, T = objs
    if S.bounds != T.bounds:
        raise FormatError(h, "source and target bounds differ")
    arrays, where = _arrays_from_at(_parse_at_lines(lines, 2), S, h, "degree")
    f = BisimplicialMap(S, T, arrays, validate=False, name=name)
    errs = f.errors()
    if errs:
        raise FormatError(h, "; ".join(errs[:3]))
    return f


# -- dispatch ---------------------------------------------------------------------

PARSERS = {"ssx": parse_ssx, "ssxmap": parse_ssxmap, "bsx": parse_bsx,
           "bsxmap": parse_bsxmap, "cat": parse_cat}


def kind_of(text: str) -> str:
    for raw in text.splitlines():
        s = raw.strip()
        if s and not s.startswith("#"):
            return s.split()[0]
    raise FormatError(0, "empty input")


def parse(text: str):
    kind = kind_of(text)
    if kind not in PARSERS:
        raise FormatError(1, f"unknown format {kind!r}")
    return PARSERS[kind](text)


def serialize(obj) -> str:
    if isinstance(obj, FinCategory):
        return serialize_cat(obj)
    if isinstance(obj, BisimplicialMap):
        return serialize_bsxmap(obj)
    if isinstance(obj, SimplicialMap):
        return serialize_ssxmap(obj)
    if isinstance(obj, SimplicialSpace):
        return serialize_bsx(obj)
    if isinstance(obj, TruncatedSimplicialSet):
        return serialize_ssx(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load(path) -> object:
    return parse(Path(path).read_text(encoding="utf-8"))


def dump(obj, path) -> str:
    text = serialize(obj)
    Path(path).write_text(text, encoding="utf-8")
    return text


def content_hash(obj_or_text) -> str:
    text = obj_or_text if isinstance(obj_or_text, str) else serialize(obj_or_text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
