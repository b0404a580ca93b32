"""Loading helpers and random monomial algebras shared by the tests."""

from __future__ import annotations

from importlib.resources import files

import numpy as np

from oracles import monomial_basis_size
from tate_syzygy.algebra import from_presentation
from tate_syzygy.linalg import Field
from tate_syzygy.presentation import parse_presentation
from tate_syzygy.resolutions import bardzell_chains

BUNDLED = ["lambda1.alg", "lambda2.alg", "kx2.alg", "gamma1.alg", "point.alg", "a.alg", "a_char2.alg"]


def presentation(name, field=None):
    pres = parse_presentation(files("tate_syzygy.data").joinpath(name).read_text(), name=name)
    if field is not None:
        pres = pres.with_field(Field.parse(field) if isinstance(field, str) else field)
    return pres


def algebra(name, field=None):
    return from_presentation(presentation(name, field))


def random_monomial_text(rng, max_vertices=4, max_arrows=5, field="F 32003"):
    """Text of a random monomial presentation, or None if it is infinite-dimensional."""
    nv = int(rng.integers(1, max_vertices + 1))
    na = int(rng.integers(1, max_arrows + 1))
    arrows = [(f"x{i}", int(rng.integers(nv)), int(rng.integers(nv))) for i in range(na)]
    rels = set()
    for a, s, t in arrows:
        for b, s2, t2 in arrows:
            if s2 == t and rng.random() < 0.6:
                rels.add((a, b))
    for a, s, t in arrows:
        for b, s2, t2 in arrows:
            for c, s3, t3 in arrows:
                if s2 == t and s3 == t2 and (a, b) not in rels and (b, c) not in rels and rng.random() < 0.5:
                    rels.add((a, b, c))
    lines = [f"field {field}", "vertices " + " ".join(str(v) for v in range(nv))]
    lines += [f"arrow {a} : {s} -> {t}" for a, s, t in arrows]
    lines += ["relation " + "*".join(reversed(r)) for r in sorted(rels)]
    return "\n".join(lines) + "\n", nv, arrows, sorted(rels)


def random_monomial_algebras(count, seed=7, max_dim=8, max_summands=6, degrees=12):
    """``count`` random monomial algebras within a size budget.

    Kept: ``dim <= max_dim`` and at most ``max_summands`` bimodule
    resolution summands in each degree ``<= degrees`` (counted with
    Bardzell chains, so exponential-growth samples are skipped cheaply).
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        text, nv, arrows, rels = random_monomial_text(rng)
        if monomial_basis_size(range(nv), arrows, rels, budget=max_dim) is None:
            continue
        pres = parse_presentation(text, name=f"random{len(out)}")
        if any(len(bardzell_chains(pres, k)) > max_summands for k in range(degrees + 1)):
            continue
        out.append((pres, from_presentation(pres)))
    return out


def invariant_checks(pres, alg, n_max=12, p_max=12, bound=12, low=-3, high=6):
    """Structural invariants of one algebra; ``None`` marks an invariant that does not apply."""
    from tate_syzygy.cohomology import (
        cm_test,
        dimension_periodicity,
        gorenstein_dimension,
        gorenstein_report,
        hh_dims,
        stable_range_check,
        tate_hh_dims,
    )
    from tate_syzygy.modules import regular_bimodule
    from tate_syzygy.resolutions import (
        ResolutionPrefix,
        bardzell_multiplicities,
        detect_eventual_periodicity,
        detect_period_at,
        endpoint_pairs,
    )

    bim = regular_bimodule(alg)
    res = ResolutionPrefix(bim).extend(8)
    out = {
        "d_squared_zero": res.check_complex(),
        "minimal": res.check_minimal(),
        "exact": res.check_exact(res.length),
        "bardzell": None,
        "tate_periodic": None,
        "stable_range": None,
        "periodic_syzygy_cm": None,
        "period_independent": None,
    }
    if pres is not None and pres.is_monomial:
        vertices = list(pres.quiver.vertices)
        out["bardzell"] = all(
            endpoint_pairs(res, k, vertices) == bardzell_multiplicities(pres, k) for k in range(9)
        )
    cert = detect_eventual_periodicity(bim, n_max, p_max, resolution=res)
    if cert is None:
        return out, None, None
    out["period_independent"] = all(
        (found := detect_period_at(res, m, p_max)) is not None and found[0] == cert.p
        for m in range(cert.n + 1, cert.n + 4)
    )
    gor = gorenstein_report(alg, bound)
    if not gor.is_gorenstein:
        return out, cert, gor
    tate, _ = tate_hh_dims(alg, low, high, cert, gor)
    out["tate_periodic"] = dimension_periodicity(tate, cert.p)
    env_gor = gorenstein_report(alg.enveloping(), 2 * gor.d + 2)
    if env_gor.is_gorenstein:
        gdim = gorenstein_dimension(bim, env_gor.d, res)
        out["stable_range"] = stable_range_check(hh_dims(alg, high, res), tate, gdim, 0, high)
        out["periodic_syzygy_cm"] = cm_test(bim, max(env_gor.d, 8), res, shift=cert.n)
    return out, cert, gor
