"""Command-line front end: ``tate-syzygy analyze|tensor|resolve|tensor-check|gamma``."""

from __future__ import annotations

import argparse
import contextlib
import hashlib
import json
import re
import sys
import time
from dataclasses import dataclass, field as dc_field
from importlib.resources import files
from pathlib import Path
from typing import Optional, Sequence

from .algebra import AlgebraError, BasisAlgebra, from_presentation, tensor
from .cohomology import (
    DEFAULT_CM_BOUND,
    DEFAULT_GORENSTEIN_BOUND,
    CohomologyError,
    CohomologyTable,
    cm_test,
    main_theorem_report,
)
from .linalg import Field
from .modules import DEFAULT_SEED, ModuleError, projective, regular, regular_bimodule, simple
from .presentation import PresentationError, QuiverPresentation, gamma_presentation, parse_presentation
from .resolutions import (
    DEFAULT_N_MAX,
    DEFAULT_P_MAX,
    ResolutionError,
    ResolutionPrefix,
    bardzell_multiplicities,
    complete_resolution,
    endpoint_pairs,
    verify_total_acyclicity,
)
from .tensor_check import DEFAULT_CHECK_LENGTH, TensorCheckError, tensor_resolution_check

SCHEMA = "tate-syzygy/1"
BARDZELL_DEGREES = 8

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCONCLUSIVE = 2


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# input


@dataclass
class LoadedInput:
    algebra: BasisAlgebra
    presentation: Optional[QuiverPresentation]
    digest: str
    vertices: list[str]


def _read_source(source: str) -> tuple[str, str]:
    """Text and display name of a path, a bundled example, or ``gammaN``."""
    path = Path(source)
    if path.is_file():
        return path.read_text(), path.name
    name = source if source.endswith(".alg") else source + ".alg"
    bundled = files("tate_syzygy.data").joinpath(name)
    if bundled.is_file():
        return bundled.read_text(), name
    m = re.fullmatch(r"gamma_?(\d+)(\.alg)?", source)
    if m:
        return gamma_presentation(int(m.group(1))).to_text(), f"gamma{m.group(1)}.alg"
    raise CliError(f"no such file or bundled example: {source}")


def load_input(source: str, field: Optional[str] = None) -> LoadedInput:
    text, name = _read_source(source)
    fld = Field.parse(field) if field else None
    if text.lstrip().startswith("{"):
        try:
            alg = BasisAlgebra.from_dict(json.loads(text))
        except (json.JSONDecodeError, KeyError) as exc:
            raise CliError(f"{name}: malformed algebra dump: {exc}") from exc
        if fld is not None and fld != alg.field:
            alg = alg.with_field(fld)
        pres = None
        vertices = [alg.labels[e] for e in alg.idempotents]
    else:
        pres = parse_presentation(text, name=name)
        if fld is not None:
            pres = pres.with_field(fld)
        alg = from_presentation(pres)
        vertices = list(pres.quiver.vertices)
    digest = "sha256:" + hashlib.sha256(text.encode()).hexdigest()
    return LoadedInput(alg, pres, digest, vertices)


def parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected a range like -4..6, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    params: dict
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "params": self.params, "pass": self.passed}

    @classmethod
    def from_dict(cls, data: dict) -> "Check":
        return cls(data["name"], data["params"], data["pass"])


@dataclass
class AnalysisReport:
    input: dict
    algebra: dict
    gorenstein: dict
    periodicity: Optional[dict]
    tables: list[CohomologyTable] = dc_field(default_factory=list)
    checks: list[Check] = dc_field(default_factory=list)
    notes: list[str] = dc_field(default_factory=list)
    timings_ms: dict = dc_field(default_factory=dict)
    exit_code: int = EXIT_OK

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "input": self.input,
            "algebra": self.algebra,
            "gorenstein": self.gorenstein,
            "periodicity": self.periodicity,
            "tables": [t.to_dict() for t in self.tables],
            "checks": [c.to_dict() for c in self.checks],
            "notes": self.notes,
            "timings_ms": self.timings_ms,
            "exit_code": self.exit_code,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        if data.get("schema") != SCHEMA:
            raise CliError(f"unknown report schema {data.get('schema')!r}")
        return cls(
            data["input"],
            data["algebra"],
            data["gorenstein"],
            data["periodicity"],
            [CohomologyTable.from_dict(t) for t in data["tables"]],
            [Check.from_dict(c) for c in data["checks"]],
            data.get("notes", []),
            data.get("timings_ms", {}),
            data.get("exit_code", EXIT_OK),
        )

    def check(self, name: str) -> Optional[Check]:
        return next((c for c in self.checks if c.name == name), None)

    def table(self, kind: str) -> Optional[CohomologyTable]:
        return next((t for t in self.tables if t.kind.value == kind), None)


def emit_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def parse_report(text: str) -> AnalysisReport:
    return AnalysisReport.from_dict(json.loads(text))


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.times: dict[str, int] = {}

    @contextlib.contextmanager
    def __call__(self, label: str):
        t0 = time.perf_counter()
        yield
        if self.enabled:
            self.times[label] = round(1000 * (time.perf_counter() - t0))


def analyze(
    inp: LoadedInput,
    low: int = -4,
    high: int = 6,
    n_max: int = DEFAULT_N_MAX,
    p_max: int = DEFAULT_P_MAX,
    bound: int = DEFAULT_GORENSTEIN_BOUND,
    seed: int = DEFAULT_SEED,
    timings: bool = False,
) -> AnalysisReport:
    a = inp.algebra
    timer = _Timer(timings)
    with timer("main_theorem"):
        mt = main_theorem_report(a, low, high, n_max, p_max, bound, seed)
    gor, cert, res = mt.gorenstein, mt.certificate, mt.resolution
    report = AnalysisReport(
        input={"digest": inp.digest, "field": str(a.field), "name": a.name},
        algebra={"dim": a.dim, "idempotents": a.num_idempotents, "vertices": inp.vertices,
                 "bimodule_projective_dimension": mt.bimodule_projective_dimension},
        gorenstein=gor.to_dict(),
        periodicity=cert.to_dict() if cert else None,
        notes=list(mt.notes),
    )
    report.tables.append(mt.hh)
    if mt.tate is not None:
        report.tables.append(mt.tate)

    add = report.checks.append
    length = res.length
    with timer("checks"):
        add(Check("resolution_complex", {"length": length}, res.check_complex()))
        add(Check("resolution_minimal", {"length": length}, res.check_minimal()))
        add(Check("resolution_exact", {"length": length}, res.check_exact(length)))
        if inp.presentation is not None and inp.presentation.is_monomial:
            top = BARDZELL_DEGREES
            agree = all(
                endpoint_pairs(res, k, inp.vertices) == bardzell_multiplicities(inp.presentation, k)
                for k in range(top + 1)
            )
            add(Check("bardzell_agreement", {"degrees": [0, top]}, agree))
        if gor.left is not None and gor.right is not None:
            add(Check("injective_dimensions_agree", {"left": gor.left, "right": gor.right}, gor.left == gor.right))
        if cert is not None:
            add(Check("certificate_verified", {"n": cert.n, "p": cert.p, "seed": cert.seed}, cert.verify()))
        if mt.period_independent is not None:
            add(Check("period_independent_of_n", {"n": [cert.n + 1, cert.n + 3], "p": cert.p},
                      mt.period_independent))
        if mt.tate is not None:
            add(Check("tate_dimension_periodic", {"p": cert.p, "range": [low, high]}, mt.periodicity_verified))
            lb = mt.lower_bound
            add(Check("lower_bound_n_ge_d", {"n": lb.n, "d": lb.d}, lb.holds))
            criterion = lb.witness_simple is not None if lb.equality else all(v == 0 for v in lb.ext_dims.values())
            add(Check("simple_ext_criterion",
                      {"n": lb.n, "d": lb.d, "witness_simple": None if lb.witness_simple is None
                       else inp.vertices[lb.witness_simple]}, criterion))
            if mt.bimodule_gdim is not None:
                add(Check("stable_range", {"gdim": mt.bimodule_gdim, "range": [mt.bimodule_gdim + 1, high]},
                          mt.stable_range))
                d_e = mt.enveloping_gorenstein.d
                cm_bound = max(d_e, DEFAULT_CM_BOUND)
                add(Check("periodic_syzygy_cohen_macaulay", {"n": cert.n, "bound": cm_bound},
                          cm_test(res.module, cm_bound, res, shift=cert.n)))
            t = complete_resolution(res.module, cert, max(0, -low) + 2, high=high + 2)
            degrees = range(low, high + 1)
            add(Check("total_acyclicity", {"range": [low, high]},
                      verify_total_acyclicity(t, degrees, regular(a.enveloping()))))
            add(Check("complete_resolution_exact", {"range": [t.low + 1, t.high - 1]},
                      t.check_complex() and t.check_exact()))
            if mt.bimodule_projective_dimension is not None:
                add(Check("finite_global_dimension_tate_zero", {"gl_dim": mt.bimodule_projective_dimension},
                          all(v == 0 for v in mt.tate.values())))
    report.timings_ms = timer.times
    if not all(c.passed for c in report.checks):
        report.exit_code = EXIT_ERROR
    elif not gor.is_gorenstein or cert is None:
        report.exit_code = EXIT_INCONCLUSIVE
    return report


def format_analysis(report: AnalysisReport) -> str:
    lines = [f"algebra   {report.input['name']}  over {report.input['field']}"]
    lines.append(f"dimension {report.algebra['dim']}  idempotents {report.algebra['idempotents']}")
    g = report.gorenstein
    gstr = f"GorensteinOfDimension({g['d']})" if "d" in g else f"NotGorensteinUpTo({g['bound']})"
    lines.append(f"gorenstein {gstr}  (left {g['left']}, right {g['right']})")
    if report.algebra.get("bimodule_projective_dimension") is not None:
        lines.append(f"global dimension {report.algebra['bimodule_projective_dimension']}")
    per = report.periodicity
    lines.append("periodicity none found" if per is None else
                 f"periodicity n = {per['n']}  p = {per['p']}  (seed {per['seed']})")
    for t in report.tables:
        lines.append("")
        lines.append(f"{t.kind.value}")
        degs = list(range(t.low, t.high + 1))
        lines.append("  i    " + " ".join(f"{i:>4}" for i in degs))
        lines.append("  dim  " + " ".join(f"{t.dims[i]:>4}" for i in degs))
    lines.append("")
    for c in report.checks:
        params = ", ".join(f"{k}={v}" for k, v in c.params.items())
        lines.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.name} ({params})")
    for note in report.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> int:
    inp = load_input(args.file, args.field)
    lo, hi = args.range
    report = analyze(inp, lo, hi, args.n_max, args.p_max, args.bound, args.seed, args.timings)
    print(format_analysis(report))
    if args.json:
        Path(args.json).write_text(emit_json(report.to_dict()))
    return report.exit_code


def cmd_tensor(args) -> int:
    a = load_input(args.file_a, args.field).algebra
    b = load_input(args.file_b, args.field).algebra
    if a.field != b.field:
        raise CliError(f"field mismatch: {a.field} vs {b.field}")
    t = tensor(a, b, name=f"{a.name}⊗{b.name}")
    ok = t.dim == a.dim * b.dim
    Path(args.out).write_text(t.dumps() + "\n")
    print(f"wrote {args.out}: dim {t.dim} = {a.dim} x {b.dim} [{'pass' if ok else 'FAIL'}]")
    if args.json:
        Path(args.json).write_text(emit_json({"schema": SCHEMA, "dim": t.dim, "factors": [a.dim, b.dim],
                                              "dim_product": ok, "out": str(args.out)}))
    return EXIT_OK if ok else EXIT_ERROR


def _module_for(inp: LoadedInput, selector: list[str]):
    kind = selector[0]
    alg = inp.algebra
    if kind == "regular-bimodule":
        if len(selector) != 1:
            raise CliError("regular-bimodule takes no vertex")
        return regular_bimodule(alg), True
    if kind in ("simple", "projective"):
        if len(selector) != 2:
            raise CliError(f"{kind} needs exactly one vertex")
        if selector[1] not in inp.vertices:
            raise CliError(f"unknown vertex {selector[1]!r}; vertices are {', '.join(inp.vertices)}")
        k = inp.vertices.index(selector[1])
        return (simple(alg, k) if kind == "simple" else projective(alg, k)), False
    raise CliError(f"unknown module selector {kind!r}")


def cmd_resolve(args) -> int:
    inp = load_input(args.file, args.field)
    m, bimodule = _module_for(inp, args.module)
    if args.bardzell:
        if not bimodule:
            raise CliError("--bardzell applies to the regular bimodule only")
        if inp.presentation is None or not inp.presentation.is_monomial:
            raise CliError("--bardzell needs a monomial presentation")
    res = ResolutionPrefix(m).extend(args.length)
    rows = []
    agree_all = True
    for k in range(args.length + 1):
        term = res.term(k)
        if bimodule:
            summands = [f"({s},{t})" for s, t in endpoint_pairs(res, k, inp.vertices)]
        else:
            summands = [inp.vertices[s] for s in sorted(term.summands)]
        row = {"degree": k, "summands": summands, "term_dim": term.dim, "syzygy_dim": res.syzygy(k).dim}
        if args.bardzell:
            oracle = bardzell_multiplicities(inp.presentation, k)
            agree = oracle == endpoint_pairs(res, k, inp.vertices)
            agree_all &= agree
            row["bardzell"] = [f"({s},{t})" for s, t in oracle]
            row["agree"] = agree
        rows.append(row)
    verdicts = {
        "d_squared_zero": res.check_complex(),
        "minimal": res.check_minimal(),
        "exact": res.check_exact(res.length),
    }
    if args.bardzell:
        verdicts["bardzell_agreement"] = agree_all
    print(f"{' '.join(args.module)} over {inp.algebra.name} ({inp.algebra.field})")
    print("  k  dim  Ω^k  summands")
    for row in rows:
        extra = ""
        if args.bardzell:
            extra = f"   bardzell {' '.join(row['bardzell']) or '-'} [{'agree' if row['agree'] else 'DISAGREE'}]"
        print(f"{row['degree']:>3} {row['term_dim']:>4} {row['syzygy_dim']:>4}  {' '.join(row['summands']) or '-'}{extra}")
    if res.projective_dimension is not None:
        print(f"projective dimension {res.projective_dimension}")
    for name, ok in verdicts.items():
        print(f"  [{'pass' if ok else 'FAIL'}] {name}")
    if args.json:
        Path(args.json).write_text(emit_json({
            "schema": SCHEMA, "module": args.module, "rows": rows, "checks": verdicts,
            "projective_dimension": res.projective_dimension,
        }))
    return EXIT_OK if all(verdicts.values()) else EXIT_ERROR


def cmd_tensor_check(args) -> int:
    a = load_input(args.file_a, args.field).algebra
    b = load_input(args.file_b, args.field).algebra
    try:
        report = tensor_resolution_check(a, b, args.length, args.n_max, args.p_max, args.bound, args.seed)
    except TensorCheckError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    print(f"{a.name} ⊗ {b.name} over {report.field}: period {report.period} ({report.branch} branch), "
          f"gl.dim {report.gl_dim}, n = {report.n}")
    print("term dims " + " ".join(str(d) for d in report.term_dims))
    for name, ok in report.checks.items():
        print(f"  [{'pass' if ok else 'FAIL'}] {name}")
    if args.json:
        Path(args.json).write_text(emit_json({"schema": SCHEMA, **report.to_dict()}))
    return EXIT_OK if report.passed else EXIT_ERROR


def cmd_gamma(args) -> int:
    field = Field.parse(args.field) if args.field else None
    text = gamma_presentation(args.n, field).to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        # usage errors are errors (1), not "inconclusive" (2)
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="tate-syzygy",
        description="Syzygies, periodicity and Tate-Hochschild cohomology of quiver algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, bounds=True):
        p.add_argument("--field", help="override the field: Q, F2, F32003, ...")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized isomorphism tests")
        p.add_argument("--json", metavar="PATH", help="also write a JSON report")
        if bounds:
            p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
            p.add_argument("--p-max", type=int, default=DEFAULT_P_MAX)
            p.add_argument("--bound", type=int, default=DEFAULT_GORENSTEIN_BOUND,
                           help="truncation for injective/global dimension searches")

    p = sub.add_parser("analyze", help="Gorenstein, periodicity, HH and Tate-HH report")
    p.add_argument("file")
    p.add_argument("--range", type=parse_range, default=(-4, 6), help="Tate degrees, e.g. -4..6")
    p.add_argument("--timings", action="store_true", help="record wall-clock timings in the JSON report")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tensor", help="write the tensor product of two algebras as a basis dump")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("out")
    common(p, bounds=False)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("resolve", help="minimal projective resolution of a module")
    p.add_argument("file")
    p.add_argument("--module", nargs="+", default=["regular-bimodule"],
                   metavar="SELECTOR", help="regular-bimodule | simple V | projective V")
    p.add_argument("--length", type=int, default=6)
    p.add_argument("--bardzell", action="store_true", help="compare with Bardzell chains (monomial only)")
    common(p, bounds=False)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("tensor-check", help="periodicity of the tensor of two bimodule resolutions")
    p.add_argument("file_a", help="periodic factor")
    p.add_argument("file_b", help="factor of finite global dimension")
    p.add_argument("--length", type=int, default=DEFAULT_CHECK_LENGTH)
    common(p)
    p.set_defaults(func=cmd_tensor_check)

    p = sub.add_parser("gamma", help="print the presentation of the linear quiver algebra Γ_N")
    p.add_argument("n", type=int)
    p.add_argument("--field")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_gamma)
    return parser


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``--range -4..6`` through argparse, which would read ``-4..6`` as a flag."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--range={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = _glue_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except PresentationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (CliError, AlgebraError, ModuleError, ResolutionError, CohomologyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
