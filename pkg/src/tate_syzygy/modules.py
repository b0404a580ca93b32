"""Finite-dimensional left modules over a :class:`BasisAlgebra`.

A module stores the action matrices of the algebra generators (idempotents
and degree-1 basis elements).  The action of any other basis element is
derived from the algebra's factorisation table on first use and cached.
Bimodules are left modules over the enveloping algebra.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import BasisAlgebra
from .linalg import (
    Field,
    block_diag,
    column_space_pivots,
    hstack,
    inverse,
    kernel,
    rank,
    rref,
)

DEFAULT_SEED = 20211


class ModuleError(ValueError):
    pass


class FdModule:
    """A left module of finite dimension.

    ``gens`` maps each generator basis index of the algebra to its action
    matrix (``dim x dim``).
    """

    def __init__(self, algebra: BasisAlgebra, dim: int, gens: dict[int, np.ndarray], name: str = ""):
        self.algebra = algebra
        self.dim = dim
        self.gens = gens
        self.name = name
        self._cache: dict[int, np.ndarray] = dict(gens)
        missing = set(algebra.generators) - set(gens)
        if missing:
            raise ModuleError(f"missing generator actions: {sorted(missing)}")

    def __repr__(self) -> str:
        return f"FdModule({self.name or '?'}, dim={self.dim}, over {self.algebra.name})"

    @property
    def field(self) -> Field:
        return self.algebra.field

    def action(self, b: int) -> np.ndarray:
        """Matrix of the basis element ``b`` acting on the module."""
        if b in self._cache:
            return self._cache[b]
        f = self.field
        acc = f.zeros((self.dim, self.dim))
        for c, g, rest in self.algebra.expressions[b]:
            acc = f.add(acc, f.scale(c, f.matmul(self.action(g), self.action(rest))))
        self._cache[b] = acc
        return acc

    def act(self, vectors: np.ndarray) -> "_Orbit":
        """Lazy ``b -> b . vectors`` for algebra basis elements ``b``."""
        return _Orbit(self, vectors)

    def idempotent_action(self, k: int) -> np.ndarray:
        return self.gens[self.algebra.idempotents[k]]

    @cached_property
    def peirce(self) -> list[tuple[np.ndarray, list[int]]]:
        """Per idempotent ``e_k``: a basis of ``e_k M`` (pivot-normalised) and its pivot rows."""
        return [column_space_pivots(self.field, self.idempotent_action(k)) for k in range(self.algebra.num_idempotents)]

    def dimension_vector(self) -> list[int]:
        return [b.shape[1] for b, _ in self.peirce]

    @cached_property
    def radical_span(self) -> np.ndarray:
        """Columns span ``rad(A) M``; the degree-1 generators suffice."""
        f = self.field
        blocks = [self.gens[g] for g in self.algebra.arrows]
        if not blocks or self.dim == 0:
            return f.zeros((self.dim, 0))
        return column_space_pivots(f, hstack(f, blocks, self.dim))[0]

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_module(self, exhaustive: bool = True, rng: Optional[np.random.Generator] = None, samples: int = 200) -> bool:
        """Check ``action(x) action(y) = action(xy)`` and that 1 acts as identity."""
        f = self.field
        alg = self.algebra
        one = f.zeros((self.dim, self.dim))
        for e in alg.idempotents:
            one = f.add(one, self.action(e))
        if not f.equal(one, f.eye(self.dim)):
            return False
        pairs = [(x, y) for x in range(alg.dim) for y in range(alg.dim)]
        if not exhaustive:
            rng = rng or np.random.default_rng(0)
            idx = rng.choice(len(pairs), size=min(samples, len(pairs)), replace=False)
            pairs = [pairs[i] for i in idx]
        for x, y in pairs:
            lhs = f.matmul(self.action(x), self.action(y))
            rhs = f.zeros((self.dim, self.dim))
            v = alg.mult[x, y]
            for k in range(alg.dim):
                if v[k] != 0:
                    rhs = f.add(rhs, f.scale(v[k], self.action(k)))
            if not f.equal(lhs, rhs):
                return False
        return True

    def same_action(self, other: "FdModule") -> bool:
        f = self.field
        return (
            self.algebra is other.algebra
            and self.dim == other.dim
            and all(f.equal(self.gens[g], other.gens[g]) for g in self.algebra.generators)
        )


class _Orbit:
    def __init__(self, module: FdModule, vectors: np.ndarray):
        self.module = module
        self.vectors = vectors
        self.memo: dict[int, np.ndarray] = {}

    def __getitem__(self, b: int) -> np.ndarray:
        if b in self.memo:
            return self.memo[b]
        m = self.module
        f = m.field
        if b in m.gens or b in m._cache:
            out = f.matmul(m.action(b), self.vectors)
        else:
            out = f.zeros(self.vectors.shape)
            for c, g, rest in m.algebra.expressions[b]:
                out = f.add(out, f.scale(c, f.matmul(m.gens[g], self[rest])))
        self.memo[b] = out
        return out


class ProjectiveModule(FdModule):
    """A direct sum of indecomposable projectives ``A e_k``.

    ``summands[s]`` is the idempotent position ``k`` of summand ``s``; its
    basis is ``algebra.basis_of_projective(k)`` starting at ``offsets[s]``.
    """

    def __init__(self, algebra: BasisAlgebra, summands: Sequence[int], name: str = ""):
        self.summands = tuple(summands)
        f = algebra.field
        blocks = [_indecomposable_actions(algebra, k) for k in self.summands]
        self.offsets = []
        pos = 0
        for k in self.summands:
            self.offsets.append(pos)
            pos += len(algebra.basis_of_projective(k))
        gens = {g: block_diag(f, [b[g] for b in blocks]) if blocks else f.zeros((0, 0)) for g in algebra.generators}
        super().__init__(algebra, pos, gens, name)

    def summand_basis(self, s: int) -> list[int]:
        return self.algebra.basis_of_projective(self.summands[s])

    def generator_position(self, s: int) -> int:
        k = self.summands[s]
        e = self.algebra.idempotents[k]
        return self.offsets[s] + self.algebra.basis_of_projective(k).index(e)

    def multiplicities(self) -> list[int]:
        out = [0] * self.algebra.num_idempotents
        for k in self.summands:
            out[k] += 1
        return out

    def map_to(self, target: FdModule, images: np.ndarray) -> "ModuleMap":
        """The homomorphism sending generator ``s`` to column ``s`` of ``images``.

        Column ``s`` must lie in ``e_k target`` for ``k = summands[s]``.
        """
        f = self.field
        mat = f.zeros((target.dim, self.dim))
        for s, k in enumerate(self.summands):
            orbit = target.act(images[:, s:s + 1])
            for pos, b in enumerate(self.summand_basis(s)):
                mat[:, self.offsets[s] + pos] = orbit[b][:, 0]
        return ModuleMap(self, target, mat)


def _indecomposable_actions(alg: BasisAlgebra, k: int) -> dict[int, np.ndarray]:
    cache = alg.__dict__.setdefault("_projective_actions", {})
    if k not in cache:
        idx = alg.basis_of_projective(k)
        cache[k] = {g: np.ascontiguousarray(alg.left_mult(g)[np.ix_(idx, idx)]) for g in alg.generators}
    return cache[k]


@dataclass(eq=False)
class ModuleMap:
    source: FdModule
    target: FdModule
    matrix: np.ndarray

    @property
    def field(self) -> Field:
        return self.source.field

    def is_homomorphism(self) -> bool:
        f = self.field
        for g in self.source.algebra.generators:
            lhs = f.matmul(self.matrix, self.source.gens[g])
            rhs = f.matmul(self.target.gens[g], self.matrix)
            if not f.equal(lhs, rhs):
                return False
        return True

    def is_isomorphism(self) -> bool:
        n = self.source.dim
        if n != self.target.dim:
            return False
        return rank(self.field, self.matrix) == n and self.is_homomorphism()

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """``self ∘ inner``."""
        return ModuleMap(inner.source, self.target, self.field.matmul(self.matrix, inner.matrix))

    def inverse(self) -> "ModuleMap":
        inv = inverse(self.field, self.matrix)
        if inv is None:
            raise ModuleError("map is not invertible")
        return ModuleMap(self.target, self.source, inv)

    def rank(self) -> int:
        return rank(self.field, self.matrix)


# ---------------------------------------------------------------------------
# constructions


def projective(alg: BasisAlgebra, k: int) -> ProjectiveModule:
    if not 0 <= k < alg.num_idempotents:
        raise ModuleError(f"no idempotent with index {k}")
    return ProjectiveModule(alg, [k], name=f"P{k}")


def zero_module(alg: BasisAlgebra) -> ProjectiveModule:
    return ProjectiveModule(alg, [], name="0")


def simple(alg: BasisAlgebra, k: int) -> FdModule:
    f = alg.field
    gens = {g: f.zeros((1, 1)) for g in alg.generators}
    gens[alg.idempotents[k]] = f.eye(1)
    return FdModule(alg, 1, gens, name=f"S{k}")


def regular(alg: BasisAlgebra) -> FdModule:
    return FdModule(alg, alg.dim, {g: alg.left_mult(g) for g in alg.generators}, name=f"{alg.name}")


def regular_bimodule(alg: BasisAlgebra) -> FdModule:
    """``A`` as a left module over ``A ⊗ A^op``: ``(x ⊗ y) . a = x a y``."""
    env = alg.enveloping()
    f = alg.field
    d = alg.dim
    gens = {}
    for g in env.generators:
        i, j = divmod(g, d)
        gens[g] = f.matmul(alg.left_mult(i), alg.right_mult(j))
    return FdModule(env, d, gens, name=f"{alg.name} (bimodule)")


def submodule(m: FdModule, span: np.ndarray, name: str = "") -> tuple[FdModule, ModuleMap]:
    """Submodule spanned by the columns of ``span`` (assumed invariant) and its inclusion."""
    f = m.field
    basis, piv = column_space_pivots(f, span)
    gens = {g: np.ascontiguousarray(f.matmul(m.gens[g], basis)[piv]) for g in m.algebra.generators}
    sub = FdModule(m.algebra, basis.shape[1], gens, name=name)
    return sub, ModuleMap(sub, m, basis)


def radical(m: FdModule) -> tuple[FdModule, ModuleMap]:
    return submodule(m, m.radical_span, name=f"rad {m.name}")


def top(m: FdModule) -> list[int]:
    """Multiplicity of each simple in ``M / rad M``."""
    f = m.field
    rad = m.radical_span
    out = []
    for k in range(m.algebra.num_idempotents):
        e = m.idempotent_action(k)
        out.append(rank(f, e) - rank(f, f.matmul(e, rad)) if rad.shape[1] else rank(f, e))
    return out


def projective_cover(m: FdModule) -> tuple[ProjectiveModule, ModuleMap]:
    f = m.field
    alg = m.algebra
    rad = m.radical_span
    summands: list[int] = []
    gens: list[np.ndarray] = []
    for k in range(alg.num_idempotents):
        basis, _ = m.peirce[k]
        if basis.shape[1] == 0:
            continue
        erad = f.matmul(m.idempotent_action(k), rad)
        for c in _independent_columns(f, erad, basis):
            summands.append(k)
            gens.append(basis[:, c:c + 1])
    p = ProjectiveModule(alg, summands, name=f"P({m.name})")
    images = hstack(f, gens, m.dim)
    return p, p.map_to(m, images)


def _independent_columns(f: Field, base: np.ndarray, extra: np.ndarray) -> list[int]:
    """Columns of ``extra`` extending a basis of span(base) greedily, in order."""
    both = np.concatenate([base, extra], axis=1)
    _, piv = rref(f, both)
    nb = base.shape[1]
    return [c - nb for c in piv if c >= nb]


def kernel_submodule(phi: ModuleMap, name: str = "") -> tuple[FdModule, ModuleMap]:
    k = kernel(phi.field, phi.matrix)
    return submodule(phi.source, k, name=name)


def syzygy(m: FdModule, steps: int = 1) -> FdModule:
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    cur = m
    for i in range(steps):
        if cur.dim == 0:
            return cur
        _, epi = projective_cover(cur)
        cur, _ = kernel_submodule(epi, name=f"Ω^{i + 1}({m.name})")
    return cur


def dual(m: FdModule) -> FdModule:
    """The k-dual, a left module over the opposite algebra."""
    op = m.algebra.opposite()
    gens = {g: np.ascontiguousarray(m.gens[g].T) for g in op.generators}
    return FdModule(op, m.dim, gens, name=f"D({m.name})")


def direct_sum(modules: Sequence[FdModule]) -> FdModule:
    alg = modules[0].algebra
    f = alg.field
    gens = {g: block_diag(f, [x.gens[g] for x in modules]) for g in alg.generators}
    return FdModule(alg, sum(x.dim for x in modules), gens, name=" ⊕ ".join(x.name for x in modules))


# ---------------------------------------------------------------------------
# Hom spaces and isomorphism certificates


def hom_space(m: FdModule, n: FdModule) -> list[ModuleMap]:
    """A basis of ``Hom_A(M, N)``."""
    if m.algebra is not n.algebra:
        raise ModuleError("modules live over different algebras")
    f = m.field
    alg = m.algebra
    r = alg.num_idempotents
    pm, pn = m.peirce, n.peirce
    md = [b.shape[1] for b, _ in pm]
    nd = [b.shape[1] for b, _ in pn]
    offsets = []
    total = 0
    for k in range(r):
        offsets.append(total)
        total += nd[k] * md[k]
    if total == 0:
        return []
    rows = []
    for g in alg.arrows:
        t, s = alg.left_idem[g], alg.right_idem[g]
        if nd[t] * md[s] == 0:
            continue
        mg = np.ascontiguousarray(f.matmul(m.gens[g], pm[s][0])[pm[t][1]])  # md[t] x md[s]
        ng = np.ascontiguousarray(f.matmul(n.gens[g], pn[s][0])[pn[t][1]])  # nd[t] x nd[s]
        block = f.zeros((nd[t] * md[s], total))
        # N_g X_s  -  X_t M_g  = 0, row-major vectorisation
        if nd[s] * md[s]:
            block[:, offsets[s]:offsets[s] + nd[s] * md[s]] = f.kron(ng, f.eye(md[s]))
        if nd[t] * md[t]:
            block[:, offsets[t]:offsets[t] + nd[t] * md[t]] = f.sub(
                block[:, offsets[t]:offsets[t] + nd[t] * md[t]], f.kron(f.eye(nd[t]), mg.T)
            )
        rows.append(block)
    system = np.concatenate(rows, axis=0) if rows else f.zeros((0, total))
    sol = kernel(f, system)
    # X = sum_k  B^N_k X_k (E^M_k)[piv^M_k]
    proj_m = [np.ascontiguousarray(m.idempotent_action(k)[pm[k][1]]) for k in range(r)]
    out = []
    for c in range(sol.shape[1]):
        x = f.zeros((n.dim, m.dim))
        for k in range(r):
            if nd[k] * md[k] == 0:
                continue
            xk = sol[offsets[k]:offsets[k] + nd[k] * md[k], c].reshape(nd[k], md[k])
            x = f.add(x, f.matmul(f.matmul(pn[k][0], xk), proj_m[k]))
        out.append(ModuleMap(m, n, x))
    return out


class IsoStatus(str, enum.Enum):
    ISOMORPHIC = "isomorphic"
    NOT_ISOMORPHIC = "not-isomorphic"
    NO_WITNESS = "no-witness-found"


@dataclass
class IsoResult:
    status: IsoStatus
    witness: Optional[ModuleMap]
    trials: int
    seed: int

    def __bool__(self) -> bool:
        return self.status is IsoStatus.ISOMORPHIC


def default_trials(field: Field) -> int:
    return 64 if field.is_rational or field.p >= 32003 else 256


def iso_test(
    m: FdModule,
    n: FdModule,
    trials: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    rng: Optional[np.random.Generator] = None,
) -> IsoResult:
    """Look for an invertible homomorphism ``M -> N``.

    A positive answer carries a verified witness.  Dimension or top mismatch
    is a definite negative; otherwise failure to find a witness is reported
    as such.
    """
    f = m.field
    trials = default_trials(f) if trials is None else trials
    if m.dim != n.dim or m.dimension_vector() != n.dimension_vector() or top(m) != top(n):
        return IsoResult(IsoStatus.NOT_ISOMORPHIC, None, 0, seed)
    if m.dim == 0:
        return IsoResult(IsoStatus.ISOMORPHIC, ModuleMap(m, n, f.zeros((0, 0))), 0, seed)
    if m.same_action(n):
        ident = ModuleMap(m, n, f.eye(m.dim))
        return IsoResult(IsoStatus.ISOMORPHIC, ident, 1, seed)
    basis = hom_space(m, n)
    if not basis:
        return IsoResult(IsoStatus.NOT_ISOMORPHIC, None, 0, seed)
    rng = rng or np.random.default_rng(seed)
    stack = np.stack([h.matrix for h in basis])
    for t in range(1, trials + 1):
        if t <= len(basis) and t <= 2:
            cand = basis[t - 1].matrix
        else:
            coeffs = f.random(rng, (len(basis),))
            cand = f.reduce(np.tensordot(coeffs, stack, axes=(0, 0)))
        if rank(f, cand) == m.dim:
            witness = ModuleMap(m, n, cand)
            if witness.is_isomorphism():
                return IsoResult(IsoStatus.ISOMORPHIC, witness, t, seed)
    return IsoResult(IsoStatus.NO_WITNESS, None, trials, seed)
