"""Total complex of two bimodule resolutions and its periodicity check.

For ``A = Λ ⊗ Γ`` the enveloping algebra ``A^e`` is modelled as
``Λ^e ⊗ Γ^e``; a left module over the latter is an ``A``-bimodule.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .algebra import BasisAlgebra, tensor
from .linalg import Field, rank
from .modules import DEFAULT_SEED, ModuleMap, ProjectiveModule, iso_test, regular_bimodule, submodule
from .resolutions import (
    DEFAULT_N_MAX,
    DEFAULT_P_MAX,
    ResolutionPrefix,
    detect_eventual_periodicity,
    periodic_resolution,
)

DEFAULT_CHECK_LENGTH = 8


class TensorCheckError(ValueError):
    pass


def tensor_projective(b: BasisAlgebra, p: ProjectiveModule, q: ProjectiveModule) -> tuple[ProjectiveModule, np.ndarray]:
    """``P ⊗ Q`` over ``b = tensor(P.algebra, Q.algebra)``.

    Returns the module and ``perm`` with ``perm[j]`` the Kronecker index of
    its ``j``-th basis vector.
    """
    nq = q.algebra.num_idempotents
    summands = [s * nq + t for s in p.summands for t in q.summands]
    out = ProjectiveModule(b, summands)
    perm = []
    for u in range(len(p.summands)):
        xs = range(p.offsets[u], p.offsets[u] + len(p.summand_basis(u)))
        for v in range(len(q.summands)):
            ys = range(q.offsets[v], q.offsets[v] + len(q.summand_basis(v)))
            perm.extend(x * q.dim + y for x in xs for y in ys)
    if len(perm) != out.dim:
        raise TensorCheckError("tensor product of projectives has the wrong dimension")
    return out, np.array(perm, dtype=np.int64)


@dataclass(eq=False)
class TotalComplex:
    """``T_r = ⊕_i P_{r-i} ⊗ Q_i`` with ``d = d^P ⊗ 1 + (-1)^{r-i} 1 ⊗ d^Q``.

    ``blocks[r]`` lists ``(i, offset, size)`` of the summand ``P_{r-i} ⊗ Q_i``.
    """

    algebra: BasisAlgebra
    length: int
    terms: dict[int, ProjectiveModule]
    differentials: dict[int, np.ndarray]
    blocks: dict[int, list[tuple[int, int, int]]]
    factor_dims: dict[int, int]

    @property
    def field(self) -> Field:
        return self.algebra.field

    def check_complex(self) -> bool:
        f = self.field
        return all(
            f.is_zero(f.matmul(self.differentials[r - 1], self.differentials[r]))
            for r in range(2, self.length + 1)
        )

    def check_minimal(self) -> bool:
        f = self.field
        for r in range(1, self.length + 1):
            lower = self.terms[r - 1]
            pos = [lower.generator_position(s) for s in range(len(lower.summands))]
            if pos and not f.is_zero(self.differentials[r][pos, :]):
                return False
        return True

    def check_exact(self) -> bool:
        """No homology at ``T_1 .. T_{length-1}``."""
        f = self.field
        for r in range(1, self.length):
            if rank(f, self.differentials[r]) + rank(f, self.differentials[r + 1]) != self.terms[r].dim:
                return False
        return True

    def check_linear(self, upto: int = 3) -> bool:
        return all(
            ModuleMap(self.terms[r], self.terms[r - 1], self.differentials[r]).is_homomorphism()
            for r in range(1, min(upto, self.length) + 1)
        )

    def check_convolution(self) -> bool:
        return all(self.terms[r].dim == self.factor_dims[r] for r in range(self.length + 1))

    def homology_zero_dim(self) -> int:
        return self.terms[0].dim - (rank(self.field, self.differentials[1]) if self.length >= 1 else 0)

    def sign_matrix(self, r: int, shift: int) -> np.ndarray:
        """Diagonal ``D`` on ``T_r`` with ``(-1)^{shift + i}`` on the block of ``Q_i``."""
        f = self.field
        diag = f.zeros(self.terms[r].dim)
        for i, off, size in self.blocks[r]:
            diag[off:off + size] = f.scalar((-1) ** ((shift + i) % 2))
        return np.diag(diag) if f.p else _object_diag(f, diag)


def _object_diag(f: Field, diag: np.ndarray) -> np.ndarray:
    out = f.zeros((len(diag), len(diag)))
    for k, v in enumerate(diag):
        out[k, k] = v
    return out


def total_complex(
    p_term, p_diff, q_term, q_diff, length: int, b: Optional[BasisAlgebra] = None
) -> TotalComplex:
    """Build ``T_0 .. T_length`` from factor terms/differentials given as callables.

    ``p_diff(j)`` and ``q_diff(i)`` are matrices ``P_j -> P_{j-1}`` and
    ``Q_i -> Q_{i-1}``; terms of negative degree are never requested.
    """
    alg_p = p_term(0).algebra
    alg_q = q_term(0).algebra
    b = b or tensor(alg_p, alg_q)
    f = b.field
    cache: dict[tuple[int, int], tuple[ProjectiveModule, np.ndarray]] = {}

    def piece(j: int, i: int):
        if (j, i) not in cache:
            cache[(j, i)] = tensor_projective(b, p_term(j), q_term(i))
        return cache[(j, i)]

    terms: dict[int, ProjectiveModule] = {}
    blocks: dict[int, list[tuple[int, int, int]]] = {}
    conv: dict[int, int] = {}
    for r in range(length + 1):
        summands: list[int] = []
        blocks[r] = []
        conv[r] = 0
        off = 0
        for i in range(r + 1):
            q = q_term(i)
            if q.dim == 0:
                continue
            mod, _ = piece(r - i, i)
            blocks[r].append((i, off, mod.dim))
            summands.extend(mod.summands)
            off += mod.dim
            conv[r] += p_term(r - i).dim * q.dim
        terms[r] = ProjectiveModule(b, summands)

    diffs: dict[int, np.ndarray] = {}
    for r in range(1, length + 1):
        d = f.zeros((terms[r - 1].dim, terms[r].dim))
        lower = {i: (off, size) for i, off, size in blocks[r - 1]}
        for i, off, size in blocks[r]:
            _, perm_src = piece(r - i, i)
            j = r - i
            if j >= 1 and i in lower:
                _, perm_tgt = piece(j - 1, i)
                k = f.kron(p_diff(j), f.eye(q_term(i).dim))
                toff, tsize = lower[i]
                d[toff:toff + tsize, off:off + size] = k[np.ix_(perm_tgt, perm_src)]
            if i >= 1 and (i - 1) in lower:
                _, perm_tgt = piece(j, i - 1)
                k = f.kron(f.eye(p_term(j).dim), q_diff(i))
                if j % 2:
                    k = f.neg(k)
                toff, tsize = lower[i - 1]
                d[toff:toff + tsize, off:off + size] = k[np.ix_(perm_tgt, perm_src)]
        diffs[r] = d
    return TotalComplex(b, length, terms, diffs, blocks, conv)


@dataclass
class TensorCheckReport:
    field: str
    periodic_n: int
    period: int
    gl_dim: int
    n: int
    length: int
    branch: str
    checks: dict[str, bool] = dc_field(default_factory=dict)
    term_dims: list[int] = dc_field(default_factory=list)
    seed: int = DEFAULT_SEED

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "field": self.field,
            "periodic_n": self.periodic_n,
            "period": self.period,
            "gl_dim": self.gl_dim,
            "n": self.n,
            "length": self.length,
            "branch": self.branch,
            "checks": dict(self.checks),
            "term_dims": list(self.term_dims),
            "seed": self.seed,
        }


def tensor_resolution_check(
    lam: BasisAlgebra,
    gam: BasisAlgebra,
    length: int = DEFAULT_CHECK_LENGTH,
    n_max: int = DEFAULT_N_MAX,
    p_max: int = DEFAULT_P_MAX,
    gl_bound: int = DEFAULT_N_MAX,
    seed: int = DEFAULT_SEED,
) -> TensorCheckReport:
    """Periodicity of the total complex for ``Λ`` periodic and ``Γ`` of finite global dimension."""
    if lam.field != gam.field:
        raise TensorCheckError(f"field mismatch: {lam.field} vs {gam.field}")
    f = lam.field
    cert = detect_eventual_periodicity(regular_bimodule(lam), n_max, p_max, seed)
    if cert is None:
        raise TensorCheckError(f"first factor has no periodic syzygy with n <= {n_max}, p <= {p_max}")
    pres = periodic_resolution(cert)
    qres = ResolutionPrefix(regular_bimodule(gam)).extend(gl_bound)
    m = qres.projective_dimension
    if m is None:
        raise TensorCheckError(f"second factor has global dimension above {gl_bound}")
    n = cert.n + m
    p = cert.p
    length = max(length, n + p + 1)

    def q_diff(i: int) -> np.ndarray:
        return qres.differential(i).matrix

    t = total_complex(pres.term, pres.differential, qres.term, q_diff, length,
                      b=tensor(lam.enveloping(), gam.enveloping()))
    a_dim = lam.dim * gam.dim
    report = TensorCheckReport(str(f), cert.n, p, m, n, length, "odd" if p % 2 else "even", seed=seed)
    report.term_dims = [t.terms[r].dim for r in range(length + 1)]
    report.checks["d_squared_zero"] = t.check_complex()
    report.checks["minimal"] = t.check_minimal()
    report.checks["exact"] = t.check_exact()
    report.checks["bimodule_maps"] = t.check_linear()
    report.checks["convolution_dims"] = t.check_convolution()
    report.checks["resolves_tensor_algebra"] = t.homology_zero_dim() == a_dim

    upper, lower = t.differentials[n + p + 1], t.differentials[n + 1]
    same_shape = upper.shape == lower.shape and t.blocks[n + p + 1] == t.blocks[n + 1]
    if not same_shape:
        report.checks["gluing"] = False
    elif p % 2 == 0:
        report.checks["gluing"] = f.equal(upper, lower)
    else:
        d_src = t.sign_matrix(n + p + 1, n + 1)
        d_tgt = t.sign_matrix(n + p, n)
        report.checks["gluing"] = f.equal(f.matmul(d_tgt, f.matmul(lower, d_src)), upper)

    # Ω^k = im d_k ⊆ T_{k-1}; for n = 0 the comparison moves up one degree.
    k = max(n, 1)
    om_k, _ = submodule(t.terms[k - 1], t.differentials[k])
    om_kp, _ = submodule(t.terms[k + p - 1], t.differentials[k + p])
    report.checks["syzygy_isomorphism"] = bool(iso_test(om_kp, om_k, seed=seed))
    return report
