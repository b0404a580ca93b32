"""Quiver presentations: the ``.alg`` text format and path-basis enumeration.

Paths are tuples of arrow names written in composition order: ``("b", "a")``
is ``b∘a``, first ``a`` then ``b``.  A vertex idempotent is the empty tuple
tagged with its vertex.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from typing import Optional

import numpy as np

from .linalg import DEFAULT_PRIME, Field, rref

DEFAULT_LENGTH_BOUND = 30


class PresentationError(ValueError):
    """Raised for malformed or unsupported presentations."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class InfiniteDimensionalError(PresentationError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex label")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise PresentationError("duplicate arrow label")
        clash = set(names) & set(self.vertices)
        if clash:
            raise PresentationError(f"label used for both a vertex and an arrow: {sorted(clash)[0]}")
        for a in self.arrows:
            for v in (a.source, a.target):
                if v not in self.vertices:
                    raise PresentationError(f"arrow {a.name} refers to unknown vertex {v}")

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    def source(self, path: tuple[str, ...]) -> str:
        return self.arrow(path[-1]).source

    def target(self, path: tuple[str, ...]) -> str:
        return self.arrow(path[0]).target

    def composable(self, path: tuple[str, ...]) -> bool:
        return all(
            self.arrow(path[i]).source == self.arrow(path[i + 1]).target
            for i in range(len(path) - 1)
        )

    def paths(self, length: int) -> list[tuple[str, ...]]:
        """All paths of the given positive length, in lexicographic order."""
        names = sorted(a.name for a in self.arrows)
        out = [(n,) for n in names]
        for _ in range(length - 1):
            out = [
                p + (n,)
                for p in out
                for n in names
                if self.arrow(p[-1]).source == self.arrow(n).target
            ]
        return out


@dataclass(frozen=True)
class Relation:
    """A linear combination of parallel paths of equal length, set to zero."""

    terms: tuple[tuple[Fraction, tuple[str, ...]], ...]

    @property
    def length(self) -> int:
        return len(self.terms[0][1])

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1


@dataclass(frozen=True)
class QuiverPresentation:
    quiver: Quiver
    relations: tuple[Relation, ...]
    field: Field = dc_field(default_factory=lambda: Field(DEFAULT_PRIME))
    name: str = ""

    @property
    def is_monomial(self) -> bool:
        return all(r.is_monomial for r in self.relations)

    def with_field(self, field: Field) -> "QuiverPresentation":
        return QuiverPresentation(self.quiver, self.relations, field, self.name)

    def to_text(self) -> str:
        lines = [f"field {self.field}".replace("field F", "field F "), "vertices " + " ".join(self.quiver.vertices)]
        for a in self.quiver.arrows:
            lines.append(f"arrow {a.name} : {a.source} -> {a.target}")
        for r in self.relations:
            parts = []
            for k, (c, path) in enumerate(r.terms):
                word = "*".join(path)
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                coef = "" if mag == 1 else f"{mag}*"
                if k == 0:
                    parts.append(("-" if c < 0 else "") + coef + word)
                else:
                    parts.append(f" {sign} {coef}{word}")
            lines.append("relation " + "".join(parts))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_']*)|(\*)|([+-]))")


def _parse_combination(text: str, lineno: int, offset: int, quiver: Quiver) -> Relation:
    pos = 0
    terms: dict[tuple[str, ...], Fraction] = {}
    order: list[tuple[str, ...]] = []
    expect_term = True
    sign = 1
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise PresentationError(f"unexpected character {text[pos:].strip()[0]!r}", lineno, offset + pos + 1)
        num, ident, star, pm = m.groups()
        col = offset + m.start(0) + (len(m.group(0)) - len(m.group(0).lstrip())) + 1
        if pm is not None:
            if not expect_term:
                sign = 1 if pm == "+" else -1
                expect_term = True
            else:
                sign = sign * (1 if pm == "+" else -1)
            pos = m.end()
            continue
        if star is not None:
            raise PresentationError("'*' without a preceding factor", lineno, col)
        if not expect_term:
            raise PresentationError("missing '+' or '-' between terms", lineno, col)
        # read a term: [coef *] arrow (* arrow)*
        coef = Fraction(sign)
        factors: list[str] = []
        while True:
            m = _TOKEN.match(text, pos)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise PresentationError("expected a coefficient or an arrow name", lineno, offset + pos + 1)
            col = offset + m.start(0) + (len(m.group(0)) - len(m.group(0).lstrip())) + 1
            if m.group(1) is not None:
                if factors:
                    raise PresentationError("coefficient must precede the arrows of a term", lineno, col)
                coef *= Fraction(m.group(1))
            else:
                name = m.group(2)
                if name not in {a.name for a in quiver.arrows}:
                    raise PresentationError(f"unknown arrow {name!r}", lineno, col)
                factors.append(name)
            pos = m.end()
            m2 = _TOKEN.match(text, pos)
            if m2 and m2.group(3) is not None:
                pos = m2.end()
                continue
            break
        if not factors:
            raise PresentationError("a term needs at least one arrow", lineno, col)
        path = tuple(factors)
        if path not in terms:
            order.append(path)
            terms[path] = Fraction(0)
        terms[path] += coef
        expect_term = False
        sign = 1
    if expect_term:
        raise PresentationError("relation ends without a term", lineno, offset + len(text) + 1)
    kept = tuple((terms[p], p) for p in order if terms[p] != 0)
    if not kept:
        raise PresentationError("relation is identically zero", lineno, offset + 1)
    lengths = {len(p) for _, p in kept}
    if len(lengths) != 1:
        raise PresentationError("relation is not length-homogeneous", lineno, offset + 1)
    if lengths.pop() < 2:
        raise PresentationError("relations must have length at least 2", lineno, offset + 1)
    for _, p in kept:
        if not quiver.composable(p):
            raise PresentationError(f"path {'*'.join(p)} is not composable", lineno, offset + 1)
    ends = {(quiver.source(p), quiver.target(p)) for _, p in kept}
    if len(ends) != 1:
        raise PresentationError("relation mixes non-parallel paths", lineno, offset + 1)
    return Relation(kept)


def parse_presentation(text: str, name: str = "") -> QuiverPresentation:
    """Parse the line-oriented ``.alg`` format.

    >>> p = parse_presentation("vertices 1 2\\narrow a : 1 -> 1\\narrow b : 1 -> 2\\nrelation a*a")
    >>> len(p.relations)
    1
    """
    field: Optional[Field] = None
    vertices: Optional[list[str]] = None
    arrows: list[Arrow] = []
    pending: list[tuple[int, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        keyword, _, rest = stripped.partition(" ")
        rest_offset = indent + len(keyword) + 1
        if keyword == "field":
            try:
                field = Field.parse(rest)
            except ValueError as exc:
                raise PresentationError(str(exc), lineno, rest_offset + 1) from None
        elif keyword == "vertices":
            vertices = rest.split()
            if not vertices:
                raise PresentationError("no vertices given", lineno, rest_offset)
        elif keyword == "arrow":
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(\S+)\s*->\s*(\S+)\s*", rest)
            if not m:
                raise PresentationError("expected 'arrow <name> : <src> -> <tgt>'", lineno, rest_offset + 1)
            if vertices is None:
                raise PresentationError("arrows must come after the vertices line", lineno, 1)
            for g in (2, 3):
                if m.group(g) not in vertices:
                    raise PresentationError(f"unknown vertex {m.group(g)!r}", lineno, rest_offset + m.start(g) + 1)
            arrows.append(Arrow(m.group(1), m.group(2), m.group(3)))
        elif keyword == "relation":
            pending.append((lineno, rest_offset, rest))
        else:
            raise PresentationError(f"unknown keyword {keyword!r}", lineno, indent + 1)
    if vertices is None:
        raise PresentationError("missing 'vertices' line")
    quiver = Quiver(tuple(vertices), tuple(arrows))
    relations = tuple(_parse_combination(t, ln, off, quiver) for ln, off, t in pending)
    return QuiverPresentation(quiver, relations, field or Field(DEFAULT_PRIME), name)


# ---------------------------------------------------------------------------
# path basis


@dataclass(frozen=True)
class PathBasis:
    """Normal-form paths of the quotient algebra, ordered by (length, lex).

    ``elements[i]`` is a pair ``(vertex, path)``: ``path == ()`` denotes the
    idempotent at ``vertex``.  ``reductions[length]`` maps every path of that
    length to its coordinates on the basis paths of the same length.
    """

    presentation: QuiverPresentation
    elements: tuple[tuple[str, tuple[str, ...]], ...]
    reductions: dict

    @property
    def dim(self) -> int:
        return len(self.elements)

    def degree(self, i: int) -> int:
        return len(self.elements[i][1])

    def labels(self) -> list[str]:
        return [f"e{v}" if not p else "*".join(p) for v, p in self.elements]

    def index(self, path: tuple[str, ...], vertex: Optional[str] = None) -> int:
        for i, (v, p) in enumerate(self.elements):
            if p == path and (path or v == vertex):
                return i
        raise KeyError(path)

    def reduce(self, path: tuple[str, ...]) -> dict[int, Fraction]:
        """Coordinates of a (composable) path on the basis."""
        table = self.reductions.get(len(path))
        if table is None:
            return {}
        return dict(table.get(path, {}))

    def endpoints(self, i: int) -> tuple[str, str]:
        """(source, target) of basis element ``i``."""
        v, p = self.elements[i]
        if not p:
            return v, v
        q = self.presentation.quiver
        return q.source(p), q.target(p)


def enumerate_basis(pres: QuiverPresentation, length_bound: int = DEFAULT_LENGTH_BOUND) -> PathBasis:
    """Degree-by-degree basis of the path algebra modulo the relation ideal."""
    if length_bound < 1:
        raise ValueError("length_bound must be at least 1")
    quiver = pres.quiver
    field = pres.field
    elements: list[tuple[str, tuple[str, ...]]] = [(v, ()) for v in quiver.vertices]
    reductions: dict[int, dict[tuple[str, ...], dict[int, Fraction]]] = {}
    by_length: dict[int, list[tuple[str, ...]]] = {}
    length = 1
    while True:
        paths = quiver.paths(length)
        if not paths:
            break
        # ideal component: u * r * w over all paddings
        column = {p: k for k, p in enumerate(reversed(paths))}
        ideal_rows = []
        for rel in pres.relations:
            pad = length - rel.length
            if pad < 0:
                continue
            for left_len in range(pad + 1):
                right_len = pad - left_len
                lefts = quiver.paths(left_len) if left_len else [()]
                rights = quiver.paths(right_len) if right_len else [()]
                for u, w in product(lefts, rights):
                    row = {}
                    ok = True
                    for c, rp in rel.terms:
                        full = u + rp + w
                        if not quiver.composable(full):
                            ok = False
                            break
                        row[full] = row.get(full, 0) + c
                    if ok:
                        ideal_rows.append(row)
        n = len(paths)
        if ideal_rows:
            mat = field.zeros((len(ideal_rows), n))
            for r, row in enumerate(ideal_rows):
                for path, c in row.items():
                    mat[r, column[path]] = field.scalar(c)
            red, pivots = rref(field, mat)
        else:
            red, pivots = field.zeros((0, n)), []
        pivot_set = set(pivots)
        # columns are in descending lex order, so pivots eliminate the largest paths
        free_cols = [c for c in range(n) if c not in pivot_set]
        if not free_cols:
            break
        if length > length_bound:
            raise InfiniteDimensionalError(
                f"quotient still nonzero at length {length} > bound {length_bound}; "
                "algebra is infinite-dimensional or the bound is too small"
            )
        rev = list(reversed(paths))
        basis_paths = sorted(rev[c] for c in free_cols)
        start = len(elements)
        pos = {p: start + k for k, p in enumerate(basis_paths)}
        table: dict[tuple[str, ...], dict[int, Fraction]] = {}
        for p in basis_paths:
            table[p] = {pos[p]: Fraction(1)}
        for row, pc in enumerate(pivots):
            coords = {}
            for fc in free_cols:
                v = red[row, fc]
                if v != 0:
                    coords[pos[rev[fc]]] = _to_fraction(field, -v)
            table[rev[pc]] = coords
        reductions[length] = table
        by_length[length] = basis_paths
        for p in basis_paths:
            elements.append((quiver.target(p), p))
        length += 1
    return PathBasis(pres, tuple(elements), reductions)


def _to_fraction(field: Field, x) -> Fraction:
    if field.is_rational:
        return Fraction(int(x.numerator), int(x.denominator))
    v = int(x) % field.p
    return Fraction(v)


def compose(basis: PathBasis, p: int, q: int) -> dict[int, Fraction]:
    """Coordinates of ``p∘q`` (first ``q``, then ``p``) for basis indices.

    Returns an empty dict for zero.
    """
    quiver = basis.presentation.quiver
    vp, pp = basis.elements[p]
    vq, pq = basis.elements[q]
    sp = vp if not pp else quiver.source(pp)
    tq = vq if not pq else quiver.target(pq)
    if sp != tq:
        return {}
    if not pp:
        return {q: Fraction(1)}
    if not pq:
        return {p: Fraction(1)}
    return basis.reduce(pp + pq)


def gamma_presentation(n: int, field: Optional[Field] = None) -> QuiverPresentation:
    """The linear quiver ``0 -> 1 -> ... -> n`` with all length-2 paths zero."""
    field = field or Field(DEFAULT_PRIME)
    lines = [f"field {'Q' if field.is_rational else 'F ' + str(field.p)}"]
    lines.append("vertices " + " ".join(str(i) for i in range(n + 1)))
    for i in range(n):
        lines.append(f"arrow a{i} : {i} -> {i + 1}")
    for i in range(n - 1):
        lines.append(f"relation a{i + 1}*a{i}")
    return parse_presentation("\n".join(lines) + "\n", name=f"gamma{n}")
