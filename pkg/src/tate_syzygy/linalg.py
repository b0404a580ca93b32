"""Exact linear algebra over the rationals and prime fields.

Matrices are plain numpy arrays: ``int64`` with entries in ``[0, p)`` for a
prime field, ``object`` arrays of :class:`gmpy2.mpq` for the rationals.  The
:class:`Field` carries the arithmetic; the module-level functions take the
field as their first argument.  :class:`Matrix` is a thin value wrapper used
at the public surface.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2
import numpy as np

DEFAULT_PRIME = 32003

_INT64_MAX = 2**63 - 1


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class Field:
    """The ground field: ``p == 0`` means the rationals, otherwise F_p."""

    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if self.p != 0 and not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p >= 3037000499:
            raise ValueError("prime moduli must be below 3037000499")

    @classmethod
    def rationals(cls) -> "Field":
        return cls(0)

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse ``Q``, ``QQ``, ``F 5``, ``F5`` or ``GF(5)``."""
        t = text.strip().replace(" ", "")
        if t in ("Q", "QQ"):
            return cls(0)
        for prefix in ("GF(", "F_", "F", "GF"):
            if t.startswith(prefix):
                digits = t[len(prefix):].rstrip(")")
                if digits.isdigit():
                    return cls(int(digits))
        raise ValueError(f"unrecognised field {text!r}")

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def dtype(self):
        return object if self.p == 0 else np.int64

    def __str__(self) -> str:
        return "Q" if self.p == 0 else f"F{self.p}"

    # -- scalars ---------------------------------------------------------

    def scalar(self, x):
        if self.p == 0:
            if isinstance(x, Fraction):
                return gmpy2.mpq(x.numerator, x.denominator)
            return gmpy2.mpq(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x):
        if self.p == 0:
            return 1 / gmpy2.mpq(x)
        return pow(int(x), -1, self.p)

    def to_python(self, x):
        """A JSON-friendly representation of one scalar."""
        if self.p == 0:
            q = gmpy2.mpq(x)
            if q.denominator == 1:
                return int(q.numerator)
            return f"{q.numerator}/{q.denominator}"
        return int(x)

    # -- arrays ----------------------------------------------------------

    def zeros(self, shape) -> np.ndarray:
        if self.p == 0:
            a = np.empty(shape, dtype=object)
            a.fill(gmpy2.mpq(0))
            return a
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        a = self.zeros((n, n))
        for i in range(n):
            a[i, i] = self.scalar(1)
        return a

    def array(self, data) -> np.ndarray:
        """Coerce nested sequences (ints, Fractions, mpq) into a field array."""
        if self.p == 0:
            src = np.array(data, dtype=object)
            out = np.empty(src.shape, dtype=object)
            flat_src = src.reshape(-1)
            flat_out = out.reshape(-1)
            for k in range(flat_src.size):
                flat_out[k] = self.scalar(flat_src[k])
            return out
        src = np.array(data, dtype=object)
        out = np.empty(src.shape, dtype=np.int64)
        flat_src = src.reshape(-1)
        flat_out = out.reshape(-1)
        for k in range(flat_src.size):
            flat_out[k] = self.scalar(flat_src[k])
        return out

    def reduce(self, a: np.ndarray) -> np.ndarray:
        if self.p == 0:
            return a
        return np.mod(a, self.p)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return self.reduce(-a)

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def scale(self, c, a: np.ndarray) -> np.ndarray:
        if self.p == 0:
            return a * gmpy2.mpq(c)
        return (a * (int(c) % self.p)) % self.p

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[-1] == 0 or (a.ndim == 2 and a.shape[0] == 0) or b.shape[-1] == 0:
            shape = a.shape[:-1] + b.shape[1:]
            return self.zeros(shape)
        if self.p == 0:
            return a.dot(b)
        p = self.p
        chunk = max(1, _INT64_MAX // ((p - 1) ** 2 + 1))
        k = a.shape[-1]
        if k <= chunk:
            return (a @ b) % p
        out = np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        for s in range(0, k, chunk):
            out = (out + (a[..., s:s + chunk] @ b[s:s + chunk]) % p) % p
        return out

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.multiply.outer(a, b)
        out = out.transpose(0, 2, 1, 3).reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
        return self.reduce(out)

    def random(self, rng: np.random.Generator, shape, spread: int = 7) -> np.ndarray:
        if self.p == 0:
            ints = rng.integers(-spread, spread + 1, size=shape)
            return self.array(ints)
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def is_zero(self, a: np.ndarray) -> bool:
        if a.size == 0:
            return True
        if self.p == 0:
            return not any(x != 0 for x in a.reshape(-1))
        return not a.any()

    def equal(self, a: np.ndarray, b: np.ndarray) -> bool:
        if a.shape != b.shape:
            return False
        return self.is_zero(self.sub(a, b))


def block_diag(field: Field, blocks: Sequence[np.ndarray]) -> np.ndarray:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = field.zeros((rows, cols))
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def hstack(field: Field, blocks: Sequence[np.ndarray], rows: int) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[1]]
    if not blocks:
        return field.zeros((rows, 0))
    return np.concatenate(blocks, axis=1)


def vstack(field: Field, blocks: Sequence[np.ndarray], cols: int) -> np.ndarray:
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return field.zeros((0, cols))
    return np.concatenate(blocks, axis=0)


# ---------------------------------------------------------------------------
# Gaussian elimination


def rref(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivoting is deterministic: the first row (top to bottom) with a nonzero
    entry in the current column.
    """
    m = np.array(a, dtype=field.dtype, copy=True)
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    p = field.p
    for c in range(ncols):
        if r == nrows:
            break
        col = m[r:, c]
        nz = np.flatnonzero(col != 0) if p else np.flatnonzero([x != 0 for x in col])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = field.inv(m[r, c])
        if p:
            m[r, c:] = (m[r, c:] * inv) % p
            colv = m[:, c].copy()
            colv[r] = 0
            rows = np.flatnonzero(colv)
            if rows.size:
                m[rows, c:] = (m[rows, c:] - np.outer(colv[rows], m[r, c:])) % p
        else:
            m[r, c:] = m[r, c:] * inv
            colv = m[:, c].copy()
            colv[r] = gmpy2.mpq(0)
            rows = np.flatnonzero([x != 0 for x in colv])
            if rows.size:
                m[rows, c:] = m[rows, c:] - np.multiply.outer(colv[rows], m[r, c:])
        pivots.append(c)
        r += 1
    return m, pivots


def rank(field: Field, a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = a.T
    return len(rref(field, a)[1])


def kernel(field: Field, a: np.ndarray) -> np.ndarray:
    """Columns form a basis of ``{x : a x = 0}``.

    Each basis vector has a 1 in its own free coordinate and 0 in the other
    free coordinates.
    """
    ncols = a.shape[1]
    if a.shape[0] == 0:
        return field.eye(ncols)
    r, pivots = rref(field, a)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = field.zeros((ncols, len(free)))
    one = field.scalar(1)
    for k, f in enumerate(free):
        basis[f, k] = one
        for row, pc in enumerate(pivots):
            basis[pc, k] = field.reduce(-r[row, f]) if field.p else -r[row, f]
    return basis


def column_space(field: Field, a: np.ndarray) -> np.ndarray:
    """A basis of the column span, normalised so that ``B[pivot_rows] = I``.

    Returns the basis; use :func:`column_space_pivots` to also get the rows.
    """
    return column_space_pivots(field, a)[0]


def column_space_pivots(field: Field, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    if a.shape[1] == 0:
        return field.zeros((a.shape[0], 0)), []
    r, piv = rref(field, a.T)
    return np.ascontiguousarray(r[: len(piv)].T), piv


def solve(field: Field, a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """One solution of ``a x = b`` (``b`` a vector or a matrix), or None."""
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    vec = b.ndim == 1
    bb = b.reshape(-1, 1) if vec else b
    n = a.shape[1]
    k = bb.shape[1]
    if a.shape[0] == 0:
        x = field.zeros((n, k))
        return x[:, 0] if vec else x
    aug = np.concatenate([a, bb], axis=1)
    r, pivots = rref(field, aug)
    if pivots and pivots[-1] >= n:
        return None
    x = field.zeros((n, k))
    for row, pc in enumerate(pivots):
        x[pc] = r[row, n:]
    return x[:, 0] if vec else x


def inverse(field: Field, a: np.ndarray) -> Optional[np.ndarray]:
    n = a.shape[0]
    if a.shape != (n, n):
        return None
    if n == 0:
        return field.zeros((0, 0))
    r, pivots = rref(field, np.concatenate([a, field.eye(n)], axis=1))
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        return None
    return np.ascontiguousarray(r[:, n:])


def in_span(field: Field, basis: np.ndarray, vectors: np.ndarray) -> bool:
    """Whether every column of ``vectors`` lies in the column span of ``basis``."""
    if vectors.shape[1] == 0:
        return True
    base = rank(field, basis) if basis.shape[1] else 0
    both = rank(field, np.concatenate([basis, vectors], axis=1))
    return both == base


# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Matrix:
    """An immutable matrix over a :class:`Field`."""

    field: Field
    data: np.ndarray

    @classmethod
    def from_rows(cls, field: Field, rows) -> "Matrix":
        rows = list(rows)
        if not rows:
            return cls(field, field.zeros((0, 0)))
        return cls(field, field.array(rows))

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, field.eye(n))

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros((rows, cols)))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __getitem__(self, idx):
        return self.data[idx]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.field.equal(self.data, other.data)
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return Matrix(self.field, self.field.matmul(self.data, other.data))

    def tolist(self):
        return [[self.field.to_python(x) for x in row] for row in self.data]

    def rref(self) -> tuple["Matrix", list[int]]:
        r, piv = rref(self.field, self.data)
        return Matrix(self.field, r), piv

    def rank(self) -> int:
        return rank(self.field, self.data)

    def kernel_basis(self) -> "Matrix":
        return Matrix(self.field, kernel(self.field, self.data))

    def solve(self, b) -> Optional["Matrix"]:
        bb = b.data if isinstance(b, Matrix) else self.field.array(b)
        x = solve(self.field, self.data, bb)
        return None if x is None else Matrix(self.field, x)

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.tolist()})"
