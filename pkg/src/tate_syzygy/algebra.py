"""Finite-dimensional algebras given by a basis and structure constants."""

from __future__ import annotations

import json
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .linalg import Field, column_space, solve
from .presentation import (
    DEFAULT_LENGTH_BOUND,
    PathBasis,
    QuiverPresentation,
    compose,
    enumerate_basis,
)


class AlgebraError(ValueError):
    pass


class BasisAlgebra:
    """A basic, length-graded algebra with a complete set of primitive idempotents.

    ``mult[i, j, k]`` is the coefficient of ``b_k`` in ``b_i * b_j``.  Every
    basis element is homogeneous for the grading (``degrees``) and for the
    Peirce decomposition, and the algebra is generated in degrees 0 and 1;
    degree 0 is spanned by ``idempotents``.
    """

    def __init__(
        self,
        field: Field,
        labels: Sequence[str],
        degrees: Sequence[int],
        mult: np.ndarray,
        idempotents: Sequence[int],
        name: str = "",
    ):
        self.field = field
        self.labels = tuple(labels)
        self.degrees = tuple(int(d) for d in degrees)
        self.mult = mult
        self.idempotents = tuple(idempotents)
        self.name = name
        self.dim = len(self.labels)
        if mult.shape != (self.dim,) * 3:
            raise AlgebraError("structure constants have the wrong shape")
        if sorted(i for i in range(self.dim) if self.degrees[i] == 0) != sorted(self.idempotents):
            raise AlgebraError("degree-0 part must be spanned by the idempotents")
        self._opposite: Optional[BasisAlgebra] = None
        self._enveloping: Optional[BasisAlgebra] = None
        self._check_peirce()

    def __repr__(self) -> str:
        return f"BasisAlgebra({self.name or '?'}, dim={self.dim}, field={self.field})"

    # -- structure ---------------------------------------------------------

    def product(self, i: int, j: int) -> np.ndarray:
        return self.mult[i, j]

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two elements given in basis coordinates."""
        f = self.field
        t = f.matmul(x.reshape(1, -1), self.mult.reshape(self.dim, -1)).reshape(self.dim, self.dim)
        return f.matmul(y.reshape(1, -1), t).reshape(-1)

    def left_mult(self, i: int) -> np.ndarray:
        """Matrix of ``x -> b_i x``."""
        return np.ascontiguousarray(self.mult[i].T)

    def right_mult(self, i: int) -> np.ndarray:
        """Matrix of ``x -> x b_i``."""
        return np.ascontiguousarray(self.mult[:, i, :].T)

    @cached_property
    def unit(self) -> np.ndarray:
        u = self.field.zeros(self.dim)
        for e in self.idempotents:
            u[e] = self.field.scalar(1)
        return u

    def _check_peirce(self) -> None:
        f = self.field
        left, right = [], []
        for b in range(self.dim):
            lefts = [k for k, e in enumerate(self.idempotents) if not f.is_zero(self.mult[e, b])]
            rights = [k for k, e in enumerate(self.idempotents) if not f.is_zero(self.mult[b, e])]
            if len(lefts) != 1 or len(rights) != 1:
                raise AlgebraError(f"basis element {self.labels[b]} is not Peirce-homogeneous")
            left.append(lefts[0])
            right.append(rights[0])
        self.left_idem = tuple(left)
        self.right_idem = tuple(right)

    @property
    def num_idempotents(self) -> int:
        return len(self.idempotents)

    @cached_property
    def arrows(self) -> tuple[int, ...]:
        """Basis elements of degree 1; with the idempotents they generate."""
        return tuple(i for i in range(self.dim) if self.degrees[i] == 1)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        return tuple(self.idempotents) + self.arrows

    @cached_property
    def radical_basis(self) -> np.ndarray:
        """Columns span rad(A): all basis elements of positive degree."""
        rad = [i for i in range(self.dim) if self.degrees[i] > 0]
        m = self.field.zeros((self.dim, len(rad)))
        for k, i in enumerate(rad):
            m[i, k] = self.field.scalar(1)
        return m

    @cached_property
    def expressions(self) -> dict[int, list[tuple[object, int, int]]]:
        """For each basis element of degree >= 2, terms ``(c, g, b)`` with
        ``sum c * (g * b)`` equal to it, ``g`` of degree 1."""
        f = self.field
        out: dict[int, list[tuple[object, int, int]]] = {}
        by_degree: dict[int, list[int]] = {}
        for i, d in enumerate(self.degrees):
            by_degree.setdefault(d, []).append(i)
        for d in sorted(by_degree):
            if d < 2:
                continue
            prev = by_degree.get(d - 1, [])
            pairs = [(g, b) for g in self.arrows for b in prev if self.right_idem[g] == self.left_idem[b]]
            cols = by_degree[d]
            for target in cols:
                found = None
                for g, b in pairs:
                    v = self.mult[g, b]
                    nz = [k for k in range(self.dim) if v[k] != 0]
                    if nz == [target]:
                        found = [(f.inv(v[target]), g, b)]
                        break
                if found is None:
                    span = f.zeros((self.dim, len(pairs)))
                    for k, (g, b) in enumerate(pairs):
                        span[:, k] = self.mult[g, b]
                    rhs = f.zeros(self.dim)
                    rhs[target] = f.scalar(1)
                    x = solve(f, span, rhs)
                    if x is None:
                        raise AlgebraError("algebra is not generated in degrees 0 and 1")
                    found = [(x[k], g, b) for k, (g, b) in enumerate(pairs) if x[k] != 0]
                out[target] = found
        return out

    def basis_of_projective(self, k: int) -> list[int]:
        """Basis indices spanning ``A e_k`` (``k`` indexes ``idempotents``)."""
        return [b for b in range(self.dim) if self.right_idem[b] == k]

    # -- checks --------------------------------------------------------------

    def is_associative(self, triples=None) -> bool:
        f = self.field
        d = self.dim
        flat = self.mult.reshape(d, d * d)
        # (b_i b_j) b_l  versus  b_i (b_j b_l)
        left = f.matmul(self.mult.reshape(d * d, d), flat).reshape(d, d, d, d)
        right = np.einsum("jlm,imk->ijlk", self.mult, self.mult) if f.p else None
        if right is None:
            right = f.zeros((d, d, d, d))
            for j in range(d):
                for l in range(d):
                    v = self.mult[j, l]
                    nz = [m for m in range(d) if v[m] != 0]
                    for m in nz:
                        right[:, j, l, :] = right[:, j, l, :] + v[m] * self.mult[:, m, :]
        else:
            right = right % f.p
        if triples is not None:
            return all(f.equal(left[i, j, l], right[i, j, l]) for i, j, l in triples)
        return f.equal(left, right)

    def idempotents_complete(self) -> bool:
        f = self.field
        for a, e in enumerate(self.idempotents):
            for b, e2 in enumerate(self.idempotents):
                prod = self.mult[e, e2]
                if a == b:
                    unit_vec = f.zeros(self.dim)
                    unit_vec[e] = f.scalar(1)
                    if not f.equal(prod, unit_vec):
                        return False
                elif not f.is_zero(prod):
                    return False
        one = self.unit
        for b in range(self.dim):
            e_b = f.zeros(self.dim)
            e_b[b] = f.scalar(1)
            if not f.equal(self.multiply(one, e_b), e_b) or not f.equal(self.multiply(e_b, one), e_b):
                return False
        return True

    # -- derived algebras ----------------------------------------------------

    def opposite(self) -> "BasisAlgebra":
        if self._opposite is None:
            op = BasisAlgebra(
                self.field,
                self.labels,
                self.degrees,
                np.ascontiguousarray(self.mult.transpose(1, 0, 2)),
                self.idempotents,
                name=f"{self.name}^op",
            )
            op._opposite = self
            self._opposite = op
        return self._opposite

    def enveloping(self) -> "BasisAlgebra":
        if self._enveloping is None:
            self._enveloping = tensor(self, self.opposite(), name=f"{self.name}^e")
        return self._enveloping

    # -- serialisation ---------------------------------------------------------

    def to_dict(self) -> dict:
        f = self.field
        d = self.dim
        entries = []
        for i in range(d):
            for j in range(d):
                for k in range(d):
                    v = self.mult[i, j, k]
                    if v != 0:
                        entries.append([i, j, k, f.to_python(v)])
        return {
            "format": "basis-algebra/1",
            "name": self.name,
            "field": str(f),
            "labels": list(self.labels),
            "degrees": list(self.degrees),
            "idempotents": list(self.idempotents),
            "mult": entries,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "BasisAlgebra":
        from fractions import Fraction

        if data.get("format") != "basis-algebra/1":
            raise AlgebraError("not a basis-algebra dump")
        field = Field.parse(data["field"])
        d = len(data["labels"])
        mult = field.zeros((d, d, d))
        for i, j, k, v in data["mult"]:
            mult[i, j, k] = field.scalar(Fraction(v))
        return cls(field, data["labels"], data["degrees"], mult, data["idempotents"], name=data.get("name", ""))

    def with_field(self, field: Field) -> "BasisAlgebra":
        """Reinterpret integral structure constants over another field."""
        from fractions import Fraction

        data = self.to_dict()
        for entry in data["mult"]:
            v = Fraction(entry[3])
            if self.field.p and v > self.field.p // 2:
                v -= self.field.p
            entry[3] = str(v)
        data["field"] = str(field)
        return BasisAlgebra.from_dict(data)


def from_presentation(pres: QuiverPresentation, length_bound: int = DEFAULT_LENGTH_BOUND) -> BasisAlgebra:
    basis = enumerate_basis(pres, length_bound)
    return from_path_basis(basis)


def from_path_basis(basis: PathBasis) -> BasisAlgebra:
    field = basis.presentation.field
    d = basis.dim
    mult = field.zeros((d, d, d))
    for i in range(d):
        for j in range(d):
            for k, c in compose(basis, i, j).items():
                mult[i, j, k] = field.scalar(c)
    nverts = len(basis.presentation.quiver.vertices)
    alg = BasisAlgebra(
        field,
        basis.labels(),
        [basis.degree(i) for i in range(d)],
        mult,
        list(range(nverts)),
        name=basis.presentation.name,
    )
    alg.path_basis = basis
    return alg


def tensor(a: BasisAlgebra, b: BasisAlgebra, name: str = "") -> BasisAlgebra:
    """``a ⊗ b`` with basis pairs ``(i, j)`` at index ``i * dim(b) + j``."""
    if a.field != b.field:
        raise AlgebraError(f"field mismatch: {a.field} vs {b.field}")
    f = a.field
    da, db = a.dim, b.dim
    mult = np.multiply.outer(a.mult, b.mult)  # (i, i', k, j, j', l)
    mult = mult.transpose(0, 3, 1, 4, 2, 5).reshape(da * db, da * db, da * db)
    mult = f.reduce(np.ascontiguousarray(mult))
    labels = [f"{x}|{y}" for x in a.labels for y in b.labels]
    degrees = [x + y for x in a.degrees for y in b.degrees]
    idem = [i * db + j for i in a.idempotents for j in b.idempotents]
    return BasisAlgebra(f, labels, degrees, mult, idem, name=name or f"{a.name}⊗{b.name}")


def enveloping(a: BasisAlgebra) -> BasisAlgebra:
    return a.enveloping()


def opposite(a: BasisAlgebra) -> BasisAlgebra:
    return a.opposite()


def point_algebra(field: Field) -> BasisAlgebra:
    """The ground field as a one-vertex algebra."""
    mult = field.zeros((1, 1, 1))
    mult[0, 0, 0] = field.scalar(1)
    return BasisAlgebra(field, ["e"], [0], mult, [0], name="k")


def radical_span(alg: BasisAlgebra) -> np.ndarray:
    return column_space(alg.field, alg.radical_basis)
