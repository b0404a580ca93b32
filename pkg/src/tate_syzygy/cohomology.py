"""Ext, Hochschild and Tate-Hochschild dimensions; Gorenstein and periodicity reports."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from typing import Optional

from .algebra import BasisAlgebra
from .linalg import Field
from .modules import DEFAULT_SEED, FdModule, dual, regular, regular_bimodule, simple
from .resolutions import (
    DEFAULT_N_MAX,
    DEFAULT_P_MAX,
    CompleteResolution,
    PeriodicityCertificate,
    ResolutionPrefix,
    _cochain_rank,
    complete_resolution,
    detect_eventual_periodicity,
    detect_period_at,
    hom_coordinates,
)

DEFAULT_GORENSTEIN_BOUND = 12
DEFAULT_CM_BOUND = 8


class CohomologyError(ValueError):
    pass


class NotGorensteinError(CohomologyError):
    pass


class NoCertificateError(CohomologyError):
    pass


class TableKind(str, enum.Enum):
    EXT = "Ext"
    HH = "HH"
    TATE_HH = "TateHH"


@dataclass
class CohomologyTable:
    kind: TableKind
    low: int
    high: int
    dims: dict[int, int]
    metadata: dict = dc_field(default_factory=dict)

    def __getitem__(self, i: int) -> int:
        return self.dims[i]

    def values(self) -> list[int]:
        return [self.dims[i] for i in range(self.low, self.high + 1)]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "range": [self.low, self.high],
            "dims": {str(i): self.dims[i] for i in range(self.low, self.high + 1)},
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CohomologyTable":
        lo, hi = data["range"]
        return cls(TableKind(data["kind"]), lo, hi, {int(k): v for k, v in data["dims"].items()}, data.get("metadata", {}))


# ---------------------------------------------------------------------------
# Ext via minimal resolutions


def _ext_from_resolution(res: ResolutionPrefix, n: FdModule, low: int, high: int) -> dict[int, int]:
    """``dim Ext^i(M, N)`` for ``low <= i <= high`` from ``Hom(P_•, N)``."""
    res.extend(high + 1)
    ranks: dict[int, int] = {}

    def delta_rank(i: int) -> int:  # Hom(P_i, N) -> Hom(P_{i+1}, N)
        if i < 0:
            return 0
        if i not in ranks:
            ranks[i] = _cochain_rank(res.term(i), res.term(i + 1), res.differential(i + 1).matrix, n)
        return ranks[i]

    out = {}
    for i in range(low, high + 1):
        dim_hom = sum(hom_coordinates(res.term(i), n))
        out[i] = dim_hom - delta_rank(i) - delta_rank(i - 1)
    return out


def ext_dims(m: FdModule, n: FdModule, length: int, resolution: Optional[ResolutionPrefix] = None,
             low: int = 0) -> CohomologyTable:
    if m.algebra is not n.algebra:
        raise CohomologyError("modules live over different algebras")
    res = resolution or ResolutionPrefix(m)
    dims = _ext_from_resolution(res, n, low, length)
    return CohomologyTable(TableKind.EXT, low, length, dims, {"field": str(m.field)})


def hh_dims(a: BasisAlgebra, length: int, resolution: Optional[ResolutionPrefix] = None) -> CohomologyTable:
    bim = resolution.module if resolution is not None else regular_bimodule(a)
    res = resolution or ResolutionPrefix(bim)
    dims = _ext_from_resolution(res, bim, 0, length)
    return CohomologyTable(TableKind.HH, 0, length, dims, {"field": str(a.field)})


# ---------------------------------------------------------------------------
# Cohen-Macaulay and Gorenstein


def cm_test(m: FdModule, bound: int = DEFAULT_CM_BOUND, resolution: Optional[ResolutionPrefix] = None,
            shift: int = 0) -> bool:
    """``Ext^i(Ω^shift M, A) = 0`` for ``1 <= i <= bound``.

    With ``shift > 0`` the resolution of ``M`` is reused: the tail of a
    resolution of ``M`` resolves ``Ω^shift M``.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    res = resolution or ResolutionPrefix(m)
    reg = _regular(m.algebra)
    dims = _ext_from_resolution(res, reg, shift + 1, shift + bound)
    return all(v == 0 for v in dims.values())


def _regular(alg: BasisAlgebra) -> FdModule:
    cache = alg.__dict__.setdefault("_regular_module", [])
    if not cache:
        cache.append(regular(alg))
    return cache[0]


class GorensteinStatus(str, enum.Enum):
    GORENSTEIN = "GorensteinOfDimension"
    NOT_GORENSTEIN = "NotGorensteinUpTo"


@dataclass
class GorensteinReport:
    status: GorensteinStatus
    bound: int
    left: Optional[int]
    right: Optional[int]

    @property
    def is_gorenstein(self) -> bool:
        return self.status is GorensteinStatus.GORENSTEIN

    @property
    def d(self) -> Optional[int]:
        return self.left if self.is_gorenstein else None

    def to_dict(self) -> dict:
        out = {"status": self.status.value, "bound": self.bound, "left": self.left, "right": self.right}
        if self.is_gorenstein:
            out["d"] = self.d
        return out

    def __str__(self) -> str:
        if self.is_gorenstein:
            return f"GorensteinOfDimension({self.d})"
        return f"NotGorensteinUpTo({self.bound})"


def injective_dimension_of_regular(a: BasisAlgebra, bound: int) -> Optional[int]:
    """``inj.dim_A A`` as ``proj.dim`` of its k-dual over ``A^op``; None if above ``bound``."""
    res = ResolutionPrefix(dual(regular(a))).extend(bound)
    return res.projective_dimension


def gorenstein_report(a: BasisAlgebra, bound: int = DEFAULT_GORENSTEIN_BOUND) -> GorensteinReport:
    if bound < 1:
        raise ValueError("bound must be at least 1")
    left = injective_dimension_of_regular(a, bound)
    right = injective_dimension_of_regular(a.opposite(), bound)
    if left is not None and right is not None:
        if left != right:
            raise CohomologyError(f"one-sided injective dimensions differ: {left} != {right}")
        return GorensteinReport(GorensteinStatus.GORENSTEIN, bound, left, right)
    return GorensteinReport(GorensteinStatus.NOT_GORENSTEIN, bound, left, right)


def gorenstein_dimension(m: FdModule, d: int, resolution: Optional[ResolutionPrefix] = None,
                         bound: Optional[int] = None) -> int:
    """Least ``r <= d`` with ``Ω^r M`` Cohen-Macaulay (``d``: Gorenstein dimension of the algebra)."""
    bound = bound if bound is not None else max(d, DEFAULT_CM_BOUND)
    res = resolution or ResolutionPrefix(m)
    for r in range(0, d + 1):
        if cm_test(m, bound, res, shift=r):
            return r
    raise CohomologyError(f"no syzygy up to Ω^{d} is Cohen-Macaulay over a {d}-Gorenstein algebra")


# ---------------------------------------------------------------------------
# Tate-Hochschild


def tate_from_complete(t: CompleteResolution, n: FdModule, low: int, high: int) -> dict[int, int]:
    if low - 1 < t.low or high + 1 > t.high:
        raise CohomologyError("complete resolution window too small for the requested range")
    ranks: dict[int, int] = {}

    def delta_rank(i: int) -> int:
        if i not in ranks:
            ranks[i] = _cochain_rank(t.terms[i], t.terms[i + 1], t.differentials[i + 1], n)
        return ranks[i]

    return {
        i: sum(hom_coordinates(t.terms[i], n)) - delta_rank(i) - delta_rank(i - 1)
        for i in range(low, high + 1)
    }


def tate_hh_dims(
    a: BasisAlgebra,
    low: int,
    high: int,
    certificate: Optional[PeriodicityCertificate] = None,
    gorenstein: Optional[GorensteinReport] = None,
    n_max: int = DEFAULT_N_MAX,
    p_max: int = DEFAULT_P_MAX,
    seed: int = DEFAULT_SEED,
    bound: int = DEFAULT_GORENSTEIN_BOUND,
) -> tuple[CohomologyTable, CompleteResolution]:
    gorenstein = gorenstein or gorenstein_report(a, bound)
    if not gorenstein.is_gorenstein:
        raise NotGorensteinError(f"algebra is not Gorenstein within bound {gorenstein.bound}")
    if certificate is None:
        certificate = detect_eventual_periodicity(regular_bimodule(a), n_max, p_max, seed)
        if certificate is None:
            raise NoCertificateError(f"no periodicity certificate with n <= {n_max}, p <= {p_max}")
    bim = certificate.resolution.module
    window = max(0, -low) + 2
    t = complete_resolution(bim, certificate, window, high=high + 2)
    dims = tate_from_complete(t, bim, low, high)
    meta = {"field": str(a.field), "n": certificate.n, "p": certificate.p, "seed": certificate.seed}
    return CohomologyTable(TableKind.TATE_HH, low, high, dims, meta), t


def stable_range_check(hh: CohomologyTable, tate: CohomologyTable, gdim: int, low: int, high: int) -> bool:
    """HH and Tate-HH agree at every degree in ``[low, high]`` strictly above ``gdim``."""
    for i in range(max(low, gdim + 1), high + 1):
        if hh.dims.get(i) is None or tate.dims.get(i) is None:
            raise CohomologyError(f"degree {i} missing from a table")
        if hh.dims[i] != tate.dims[i]:
            return False
    return True


def dimension_periodicity(table: CohomologyTable, p: int) -> bool:
    return all(table.dims[i] == table.dims[i + p] for i in range(table.low, table.high - p + 1))


# ---------------------------------------------------------------------------
# main theorem report


@dataclass
class LowerBoundCheck:
    n: int
    d: int
    holds: bool
    equality: bool
    witness_simple: Optional[int]
    ext_dims: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "n_ge_d": self.holds,
            "equality": self.equality,
            "witness_simple": self.witness_simple,
            "ext_n_simple_to_regular": {str(k): v for k, v in self.ext_dims.items()},
        }


@dataclass
class MainTheoremReport:
    gorenstein: GorensteinReport
    certificate: Optional[PeriodicityCertificate]
    chi_degree: Optional[int] = None
    tate: Optional[CohomologyTable] = None
    hh: Optional[CohomologyTable] = None
    periodicity_verified: Optional[bool] = None
    lower_bound: Optional[LowerBoundCheck] = None
    bimodule_gdim: Optional[int] = None
    stable_range: Optional[bool] = None
    period_independent: Optional[bool] = None
    bimodule_projective_dimension: Optional[int] = None
    enveloping_gorenstein: Optional[GorensteinReport] = None
    resolution: Optional[ResolutionPrefix] = None
    notes: list[str] = dc_field(default_factory=list)


def lower_bound_check(a: BasisAlgebra, n: int, d: int) -> LowerBoundCheck:
    """Least periodic index versus Gorenstein dimension, with the simple-module criterion."""
    reg = _regular(a)
    dims = {}
    for k in range(a.num_idempotents):
        s = simple(a, k)
        dims[k] = ext_dims(s, reg, n, low=n)[n]
    witness = next((k for k, v in dims.items() if v != 0), None)
    return LowerBoundCheck(n, d, n >= d, n == d, witness, dims)


def main_theorem_report(
    a: BasisAlgebra,
    low: int = -4,
    high: int = 6,
    n_max: int = DEFAULT_N_MAX,
    p_max: int = DEFAULT_P_MAX,
    bound: int = DEFAULT_GORENSTEIN_BOUND,
    seed: int = DEFAULT_SEED,
) -> MainTheoremReport:
    gor = gorenstein_report(a, bound)
    bim = regular_bimodule(a)
    res = ResolutionPrefix(bim)
    cert = detect_eventual_periodicity(bim, n_max, p_max, seed, resolution=res)
    report = MainTheoremReport(gor, cert, resolution=res)
    report.bimodule_projective_dimension = res.projective_dimension
    report.hh = hh_dims(a, max(high, 0), resolution=res)
    if cert is None:
        report.notes.append(f"no periodic syzygy found with n <= {n_max}, p <= {p_max}")
    else:
        report.period_independent = all(
            (found := detect_period_at(res, n2, p_max, seed)) is not None and found[0] == cert.p
            for n2 in range(cert.n + 1, cert.n + 4)
        )
    if not gor.is_gorenstein:
        report.notes.append("not Gorenstein within the bound; the main theorem does not apply")
        return report
    if cert is None:
        return report
    report.chi_degree = cert.p
    tate, _ = tate_hh_dims(a, low, high, cert, gor)
    report.tate = tate
    report.periodicity_verified = dimension_periodicity(tate, cert.p)
    report.lower_bound = lower_bound_check(a, cert.n, gor.d)
    env_gor = gorenstein_report(a.enveloping(), max(2 * gor.d + 2, 1))
    report.enveloping_gorenstein = env_gor
    if env_gor.is_gorenstein:
        report.bimodule_gdim = gorenstein_dimension(bim, env_gor.d, res)
        report.stable_range = stable_range_check(report.hh, tate, report.bimodule_gdim, 0, high)
    else:
        report.notes.append("enveloping algebra not Gorenstein within bound; G-dimension skipped")
    report.notes.append("degree of the invertible element is the detected period; minimality of that degree is not certified")
    return report
