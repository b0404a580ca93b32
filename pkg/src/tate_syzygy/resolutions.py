"""Minimal projective resolutions, periodicity certificates and complete resolutions."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .linalg import Field, kernel, rank, solve
from .modules import (
    DEFAULT_SEED,
    FdModule,
    IsoResult,
    IsoStatus,
    ModuleError,
    ModuleMap,
    ProjectiveModule,
    iso_test,
    kernel_submodule,
    projective_cover,
    zero_module,
)
from .presentation import PresentationError, QuiverPresentation

DEFAULT_N_MAX = 12
DEFAULT_P_MAX = 12


class ResolutionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# evaluation of maps out of projectives


def idempotent_orbit(n: FdModule, k: int) -> tuple[list[int], np.ndarray]:
    """Basis of ``A e_k`` and the stack ``b . B_k`` for ``B_k`` a basis of ``e_k N``.

    A homomorphism ``A e_k -> N`` is ``b -> b . (B_k u)`` for coordinates ``u``.
    """
    cache = n.__dict__.setdefault("_orbit_cache", {})
    if k not in cache:
        f = n.field
        alg = n.algebra
        basis_k, _ = n.peirce[k]
        orbit = n.act(basis_k)
        elems = alg.basis_of_projective(k)
        if elems:
            stack = np.stack([orbit[b] for b in elems])
        else:
            stack = f.zeros((0, n.dim, basis_k.shape[1]))
        cache[k] = (elems, stack)
    return cache[k]


def hom_coordinates(p: ProjectiveModule, n: FdModule) -> list[int]:
    """Number of coordinates per summand of ``Hom(P, N) = ⊕ e_k N``."""
    return [n.peirce[k][0].shape[1] for k in p.summands]


def evaluation_matrix(p: ProjectiveModule, n: FdModule, vectors: np.ndarray) -> np.ndarray:
    """Matrix ``E`` with ``vec(f(vectors)) = E u`` for ``f : P -> N`` with coordinates ``u``.

    Rows are grouped by column of ``vectors`` (``N.dim`` rows each).
    """
    f = n.field
    sizes = hom_coordinates(p, n)
    total = sum(sizes)
    t = vectors.shape[1]
    out = f.zeros((t * n.dim, total))
    col = 0
    for s, k in enumerate(p.summands):
        nk = sizes[s]
        if nk == 0:
            continue
        elems, stack = idempotent_orbit(n, k)
        off = p.offsets[s]
        coeff = vectors[off:off + len(elems), :]  # nb x t
        if not f.is_zero(coeff):
            # (t, N.dim, nk)
            block = f.reduce(np.tensordot(coeff.T, stack, axes=(1, 0)))
            out[:, col:col + nk] = block.reshape(t * n.dim, nk)
        col += nk
    return out


def map_from_coordinates(p: ProjectiveModule, n: FdModule, u: np.ndarray) -> ModuleMap:
    f = n.field
    images = f.zeros((n.dim, len(p.summands)))
    col = 0
    for s, k in enumerate(p.summands):
        basis_k, _ = n.peirce[k]
        nk = basis_k.shape[1]
        if nk:
            images[:, s] = f.matmul(basis_k, u[col:col + nk].reshape(-1, 1))[:, 0]
        col += nk
    return p.map_to(n, images)


def generator_columns(p: ProjectiveModule, matrix: np.ndarray) -> np.ndarray:
    pos = [p.generator_position(s) for s in range(len(p.summands))]
    return np.ascontiguousarray(matrix[:, pos])


# ---------------------------------------------------------------------------
# minimal resolutions


@dataclass(eq=False)
class ResolutionPrefix:
    """``P_L -> ... -> P_0 -> M``.

    ``differentials[k]`` is ``d_k : P_k -> P_{k-1}`` (index 0 unused),
    ``covers[k] : P_k -> Ω^k``, ``inclusions[k] : Ω^k -> P_{k-1}``.
    """

    module: FdModule
    terms: list[ProjectiveModule] = dc_field(default_factory=list)
    differentials: list[Optional[ModuleMap]] = dc_field(default_factory=list)
    covers: list[ModuleMap] = dc_field(default_factory=list)
    syzygies: list[FdModule] = dc_field(default_factory=list)
    inclusions: list[Optional[ModuleMap]] = dc_field(default_factory=list)
    projective_dimension: Optional[int] = None

    @property
    def field(self) -> Field:
        return self.module.field

    @property
    def augmentation(self) -> ModuleMap:
        return self.covers[0]

    @property
    def length(self) -> int:
        return len(self.terms) - 1

    def extend(self, length: int) -> "ResolutionPrefix":
        """Compute terms up to ``P_length`` (and ``Ω^{length+1}``)."""
        if not self.syzygies:
            self.syzygies.append(self.module)
            self.inclusions.append(None)
            self.differentials.append(None)
        while len(self.terms) <= length and self.projective_dimension is None:
            k = len(self.terms)
            omega = self.syzygies[k]
            p, cover = projective_cover(omega)
            self.terms.append(p)
            self.covers.append(cover)
            if k > 0:
                self.differentials.append(self.inclusions[k].compose(cover))
            nxt, inc = kernel_submodule(cover, name=f"Ω^{k + 1}")
            self.syzygies.append(nxt)
            self.inclusions.append(inc)
            if nxt.dim == 0:
                self.projective_dimension = k if omega.dim else -1
        return self

    def term(self, k: int) -> ProjectiveModule:
        if k < 0:
            raise IndexError(k)
        if k >= len(self.terms):
            if self.projective_dimension is None:
                self.extend(k)
            if k >= len(self.terms):
                return zero_module(self.module.algebra)
        return self.terms[k]

    def syzygy(self, k: int) -> FdModule:
        if k >= len(self.syzygies):
            if self.projective_dimension is None:
                self.extend(k)
            if k >= len(self.syzygies):
                return zero_module(self.module.algebra)
        return self.syzygies[k]

    def differential(self, k: int) -> ModuleMap:
        """``d_k : P_k -> P_{k-1}`` for ``k >= 1``."""
        if k < 1:
            raise IndexError(k)
        src, tgt = self.term(k), self.term(k - 1)
        if k < len(self.differentials) and self.differentials[k] is not None:
            return self.differentials[k]
        return ModuleMap(src, tgt, self.field.zeros((tgt.dim, src.dim)))

    def cover(self, k: int) -> ModuleMap:
        self.term(k)
        if k < len(self.covers):
            return self.covers[k]
        z = self.syzygy(k)
        return ModuleMap(self.term(k), z, self.field.zeros((z.dim, self.term(k).dim)))

    def inclusion(self, k: int) -> ModuleMap:
        self.syzygy(k)
        if k < len(self.inclusions) and self.inclusions[k] is not None:
            return self.inclusions[k]
        z = self.syzygy(k)
        tgt = self.term(k - 1)
        return ModuleMap(z, tgt, self.field.zeros((tgt.dim, z.dim)))

    def summand_pairs(self, k: int) -> list[int]:
        return list(self.term(k).summands)

    def check_complex(self, upto: Optional[int] = None) -> bool:
        """``d_{k-1} d_k = 0`` and the augmentation kills ``im d_1``."""
        f = self.field
        top = self.length if upto is None else upto
        for k in range(1, top + 1):
            lower = self.cover(0).matrix if k == 1 else self.differential(k - 1).matrix
            if not f.is_zero(f.matmul(lower, self.differential(k).matrix)):
                return False
        return True

    def check_minimal(self, upto: Optional[int] = None) -> bool:
        """``im d_k ⊆ rad P_{k-1}`` for every computed ``k``."""
        f = self.field
        top = self.length if upto is None else upto
        for k in range(1, top + 1):
            d = self.differential(k).matrix
            if d.shape[1] == 0:
                continue
            rad = self.term(k - 1).radical_span
            base = rank(f, rad) if rad.shape[1] else 0
            both = rank(f, np.concatenate([rad, d], axis=1))
            if both != base:
                return False
        return True

    def check_exact(self, upto: Optional[int] = None) -> bool:
        """Homology vanishes at ``P_0..P_{upto-1}`` and the augmentation is onto."""
        f = self.field
        top = self.length if upto is None else upto
        if rank(f, self.cover(0).matrix) != self.module.dim:
            return False
        for k in range(0, top):
            out = self.cover(0).matrix if k == 0 else self.differential(k).matrix
            inc = self.differential(k + 1).matrix
            if rank(f, out) + rank(f, inc) != self.term(k).dim:
                return False
        return True


def minimal_resolution(m: FdModule, length: int) -> ResolutionPrefix:
    if length < 0:
        raise ValueError("length must be nonnegative")
    return ResolutionPrefix(m).extend(length)


def endpoint_pairs(res: ResolutionPrefix, k: int, vertices: Optional[list[str]] = None) -> list[tuple[str, str]]:
    """(source, target) vertex pairs of the summands of a bimodule resolution term.

    Summand ``A e_a ⊗ e_b A`` corresponds to a path from ``b`` to ``a``.
    """
    env = res.module.algebra
    r = int(round(env.num_idempotents ** 0.5))
    names = vertices or [str(i) for i in range(r)]
    out = []
    for kk in res.term(k).summands:
        a, b = divmod(kk, r)
        out.append((names[b], names[a]))
    return sorted(out)


# ---------------------------------------------------------------------------
# Bardzell (associated path) chains


def minimal_monomial_relations(pres: QuiverPresentation) -> list[tuple[str, ...]]:
    """Monomial relations in traversal order, with redundant ones removed."""
    if not pres.is_monomial:
        raise PresentationError("Bardzell multiplicities need a monomial presentation")
    rels = sorted({tuple(reversed(r.terms[0][1])) for r in pres.relations}, key=lambda w: (len(w), w))
    kept: list[tuple[str, ...]] = []
    for w in rels:
        if not any(_contains(w, k) for k in kept):
            kept.append(w)
    return kept


def _contains(w: tuple, sub: tuple) -> bool:
    n = len(sub)
    return any(w[i:i + n] == sub for i in range(len(w) - n + 1))


def bardzell_chains(pres: QuiverPresentation, degree: int) -> list[tuple[str, ...]]:
    """Associated-path chains of the given degree, as traversal-order words.

    Degree 0 chains are the vertices (returned as ``("@v",)``), degree 1 the
    arrows, degree 2 the minimal relations; higher chains come from the
    left-most overlap recursion.
    """
    quiver = pres.quiver
    if degree == 0:
        return [("@" + v,) for v in quiver.vertices]
    tips = minimal_monomial_relations(pres)
    # state: (word, end of chain n-1, end of chain n)
    states = [((a.name,), 0, 1) for a in quiver.arrows]
    for _ in range(degree - 1):
        nxt = []
        for word, e_prev, e_cur in states:
            stack = [word]
            while stack:
                w = stack.pop()
                last = quiver.arrow(w[-1]).target
                for a in quiver.arrows:
                    if a.source != last:
                        continue
                    w2 = w + (a.name,)
                    L = len(w2)
                    hit = None
                    for t in tips:
                        s = L - len(t)
                        if s >= e_prev and w2[s:] == t:
                            hit = s
                            break
                    if hit is None:
                        stack.append(w2)
                    elif hit < e_cur:
                        nxt.append((w2, e_cur, L))
        states = nxt
    return sorted(w for w, _, _ in states)


def bardzell_multiplicities(pres: QuiverPresentation, degree: int) -> list[tuple[str, str]]:
    """(source, target) vertex pairs of the Bardzell summands in a degree."""
    if not pres.is_monomial:
        raise PresentationError("Bardzell multiplicities need a monomial presentation")
    quiver = pres.quiver
    out = []
    for w in bardzell_chains(pres, degree):
        if degree == 0:
            v = w[0][1:]
            out.append((v, v))
        else:
            out.append((quiver.arrow(w[0]).source, quiver.arrow(w[-1]).target))
    return sorted(out)


# ---------------------------------------------------------------------------
# periodicity


@dataclass(eq=False)
class PeriodicityCertificate:
    """``Ω^{n+p}(M) ≅ Ω^n(M)`` witnessed by an explicit isomorphism."""

    n: int
    p: int
    witness: ModuleMap
    seed: int
    resolution: ResolutionPrefix

    def verify(self) -> bool:
        res = self.resolution
        w = self.witness
        src, tgt = res.syzygy(self.n + self.p), res.syzygy(self.n)
        if w.source.dim != src.dim or w.target.dim != tgt.dim:
            return False
        if src.dim == 0:
            return tgt.dim == 0
        return src.same_action(w.source) and tgt.same_action(w.target) and w.is_isomorphism()

    def to_dict(self) -> dict:
        return {"n": self.n, "p": self.p, "seed": self.seed}


def _dims_match(res: ResolutionPrefix, n: int, p: int, available: int) -> bool:
    for i in range(p):
        a, b = n + i, n + p + i
        if b > available:
            break
        if res.syzygy(a).dim != res.syzygy(b).dim:
            return False
    return True


def detect_period_at(
    res: ResolutionPrefix, n: int, p_max: int, seed: int = DEFAULT_SEED, trials: Optional[int] = None
) -> Optional[tuple[int, IsoResult]]:
    """Least ``p <= p_max`` with ``Ω^{n+p} ≅ Ω^n``."""
    available = n + 2 * p_max
    res.extend(available)
    for p in range(1, p_max + 1):
        if not _dims_match(res, n, p, available):
            continue
        result = iso_test(res.syzygy(n + p), res.syzygy(n), trials=trials, seed=seed + 1000 * n + p)
        if result:
            return p, result
    return None


def detect_eventual_periodicity(
    m: FdModule,
    n_max: int = DEFAULT_N_MAX,
    p_max: int = DEFAULT_P_MAX,
    seed: int = DEFAULT_SEED,
    trials: Optional[int] = None,
    resolution: Optional[ResolutionPrefix] = None,
) -> Optional[PeriodicityCertificate]:
    """Least ``n``, then least ``p``, with a verified ``Ω^{n+p}(M) ≅ Ω^n(M)``."""
    if n_max < 0 or p_max < 1:
        raise ValueError("need n_max >= 0 and p_max >= 1")
    res = resolution or ResolutionPrefix(m)
    available = n_max + p_max
    res.extend(available)
    for n in range(0, n_max + 1):
        for p in range(1, p_max + 1):
            if n + p > available:
                break
            if not _dims_match(res, n, p, available):
                continue
            result = iso_test(res.syzygy(n + p), res.syzygy(n), trials=trials, seed=seed + 1000 * n + p)
            if result:
                return PeriodicityCertificate(n, p, result.witness, seed, res)
    return None


# ---------------------------------------------------------------------------
# complete resolutions


@dataclass(eq=False)
class CompleteResolution:
    """An acyclic complex ``T`` agreeing with the resolution in degrees ``>= n``.

    ``terms[i]`` for ``low <= i <= high``; ``differentials[i] : T_i -> T_{i-1}``
    for ``low < i <= high``; ``theta[i] : T_i -> P_i`` for ``0 <= i <= high``.
    """

    resolution: ResolutionPrefix
    period: int
    splice_index: int
    low: int
    high: int
    terms: dict[int, ProjectiveModule]
    differentials: dict[int, np.ndarray]
    theta: Optional[dict[int, np.ndarray]]
    source_degree: dict[int, int]

    @property
    def field(self) -> Field:
        return self.resolution.field

    def is_zero(self) -> bool:
        return all(t.dim == 0 for t in self.terms.values())

    def check_complex(self) -> bool:
        f = self.field
        for i in range(self.low + 2, self.high + 1):
            if not f.is_zero(f.matmul(self.differentials[i - 1], self.differentials[i])):
                return False
        return True

    def check_exact(self) -> bool:
        """Exactness at every interior degree of the window."""
        f = self.field
        for i in range(self.low + 1, self.high):
            r_out = rank(f, self.differentials[i])
            r_in = rank(f, self.differentials[i + 1])
            if r_out + r_in != self.terms[i].dim:
                return False
        return True

    def syzygy_dims(self) -> dict[int, int]:
        """``dim Ω_i(T) = dim Cok d_{i+1}`` for ``low <= i < high``."""
        f = self.field
        return {
            i: self.terms[i].dim - rank(f, self.differentials[i + 1])
            for i in range(self.low, self.high)
        }

    def check_theta(self) -> bool:
        if self.theta is None:
            return False
        f = self.field
        res = self.resolution
        for i in range(1, self.high + 1):
            lhs = f.matmul(res.differential(i).matrix, self.theta[i])
            rhs = f.matmul(self.theta[i - 1], self.differentials[i])
            if not f.equal(lhs, rhs):
                return False
        return True


def complete_resolution(
    m: FdModule,
    cert: PeriodicityCertificate,
    window: int,
    high: Optional[int] = None,
) -> CompleteResolution:
    """Splice the period-``p`` segment below ``n`` using the certificate's witness."""
    if not cert.verify():
        raise ResolutionError("certificate witness fails re-verification")
    if cert.resolution.module is not m:
        raise ResolutionError("certificate belongs to a different module")
    res = cert.resolution
    f = res.field
    n, p = cert.n, cert.p
    low = -window
    high = max(high if high is not None else 0, n + p + 1, 1)
    res.extend(high)

    def src(i: int) -> int:
        return i if i >= n else n + (i - n) % p

    terms = {i: res.term(src(i)) for i in range(low, high + 1)}
    # glue: P_n --cover--> Ω^n --witness^{-1}--> Ω^{n+p} --incl--> P_{n+p-1}
    omega_n = res.syzygy(n)
    if omega_n.dim:
        g = cert.witness.inverse()
        glue = f.matmul(res.inclusion(n + p).matrix, f.matmul(g.matrix, res.cover(n).matrix))
    else:
        glue = f.zeros((res.term(n + p - 1).dim, res.term(n).dim))
    diffs: dict[int, np.ndarray] = {}
    for i in range(low + 1, high + 1):
        if i > n:
            diffs[i] = res.differential(i).matrix
        elif (i - n) % p == 0:
            diffs[i] = glue
        else:
            diffs[i] = res.differential(src(i)).matrix
        if diffs[i].shape != (terms[i - 1].dim, terms[i].dim):
            raise ResolutionError(f"shape mismatch splicing degree {i}")
    t = CompleteResolution(res, p, n, low, high, terms, diffs, None, {i: src(i) for i in terms})
    t.theta = _build_theta(t)
    return t


def _build_theta(t: CompleteResolution) -> Optional[dict[int, np.ndarray]]:
    """Chain map ``T -> P`` that is the identity in degrees ``>= n``."""
    res = t.resolution
    f = t.field
    theta: dict[int, np.ndarray] = {}
    for i in range(t.splice_index, t.high + 1):
        theta[i] = f.eye(t.terms[i].dim)
    for i in range(min(t.splice_index, t.high + 1) - 1, -1, -1):
        # θ_i d^T_{i+1} = d^P_{i+1} θ_{i+1}
        src_mod = t.terms[i]
        tgt_mod = res.term(i)
        rhs = f.matmul(res.differential(i + 1).matrix, theta[i + 1])
        gen_up = t.terms[i + 1]
        vectors = generator_columns(gen_up, t.differentials[i + 1])
        want = generator_columns(gen_up, rhs)
        e = evaluation_matrix(src_mod, tgt_mod, vectors)
        u = solve(f, e, want.T.reshape(-1))
        if u is None:
            return None
        theta[i] = map_from_coordinates(src_mod, tgt_mod, u).matrix
    return theta


def verify_total_acyclicity(t: CompleteResolution, degrees: range, regular_module: FdModule) -> bool:
    """``Hom(T, A)`` has no cohomology at the given degrees (``A`` regular)."""
    if degrees.start <= t.low or degrees.stop - 1 >= t.high:
        raise ResolutionError("window too small: need one degree of slack on each side")
    f = t.field
    n = regular_module
    for i in degrees:
        # Hom(T_i) -> Hom(T_{i+1}) via d_{i+1}; cohomology at i
        dim_hom = sum(hom_coordinates(t.terms[i], n))
        r_out = _cochain_rank(t.terms[i], t.terms[i + 1], t.differentials[i + 1], n)
        r_in = _cochain_rank(t.terms[i - 1], t.terms[i], t.differentials[i], n)
        if dim_hom - r_out - r_in != 0:
            return False
    return True


def _cochain_rank(lower: ProjectiveModule, upper: ProjectiveModule, d: np.ndarray, n: FdModule) -> int:
    """Rank of ``Hom(lower, N) -> Hom(upper, N)``, ``f -> f ∘ d``."""
    if lower.dim == 0 or upper.dim == 0:
        return 0
    e = evaluation_matrix(lower, n, generator_columns(upper, d))
    return rank(n.field, e) if e.size else 0


# ---------------------------------------------------------------------------
# literally periodic resolutions


@dataclass(eq=False)
class PeriodicResolution:
    """A resolution whose differentials repeat exactly with period ``p`` from degree ``n + 1`` on."""

    resolution: ResolutionPrefix
    n: int
    p: int
    glue: np.ndarray

    def term(self, i: int) -> ProjectiveModule:
        if i < 0:
            return zero_module(self.resolution.module.algebra)
        return self.resolution.term(i if i < self.n + self.p else self.n + (i - self.n) % self.p)

    def differential(self, i: int) -> np.ndarray:
        f = self.resolution.field
        if i <= 0:
            return f.zeros((self.term(i - 1).dim, self.term(i).dim))
        if i <= self.n + self.p - 1:
            return self.resolution.differential(i).matrix
        if (i - self.n) % self.p == 0:
            return self.glue
        return self.resolution.differential(self.n + (i - self.n) % self.p).matrix

    @property
    def augmentation(self) -> ModuleMap:
        return self.resolution.cover(0)


def periodic_resolution(cert: PeriodicityCertificate) -> PeriodicResolution:
    res = cert.resolution
    f = res.field
    n, p = cert.n, cert.p
    res.extend(n + p + 1)
    if res.syzygy(n).dim:
        g = cert.witness.inverse()
        glue = f.matmul(res.inclusion(n + p).matrix, f.matmul(g.matrix, res.cover(n).matrix))
    else:
        glue = f.zeros((res.term(n + p - 1).dim, res.term(n).dim))
    return PeriodicResolution(res, n, p, glue)
