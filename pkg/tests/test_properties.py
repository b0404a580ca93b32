"""Invariants over bundled and random monomial algebras."""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from support import BUNDLED, algebra, invariant_checks, presentation, random_monomial_algebras
from tate_syzygy.algebra import from_presentation, tensor
from tate_syzygy.modules import dual, projective_cover, regular_bimodule, simple, syzygy
from tate_syzygy.presentation import parse_presentation
from tate_syzygy.resolutions import ResolutionPrefix

RANDOM = random_monomial_algebras(20)


def _assert_invariants(pres, alg):
    checks, cert, gor = invariant_checks(pres, alg)
    failed = [k for k, v in checks.items() if v is False]
    assert not failed, (alg.name, failed, cert and cert.to_dict(), gor and str(gor))


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_invariants(name):
    pres = presentation(name)
    _assert_invariants(pres, from_presentation(pres))


@pytest.mark.parametrize("index", range(len(RANDOM)))
def test_random_monomial_invariants(index):
    pres, alg = RANDOM[index]
    _assert_invariants(pres, alg)


def test_random_sample_is_nontrivial():
    """The seeded sample mixes Gorenstein and non-Gorenstein algebras and several shapes."""
    from tate_syzygy.cohomology import gorenstein_report

    statuses = {gorenstein_report(alg, 8).is_gorenstein for _, alg in RANDOM}
    assert statuses == {True, False}
    assert {len(p.quiver.vertices) for p, _ in RANDOM} >= {1, 2, 3, 4}
    assert all(len(p.quiver.arrows) <= 5 for p, _ in RANDOM)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(index=st.integers(0, 19), vertex=st.integers(0, 3))
def test_syzygy_dimension_additivity(index, vertex):
    _, alg = RANDOM[index]
    s = simple(alg, vertex % alg.num_idempotents)
    cur = s
    for _ in range(3):
        p, _ = projective_cover(cur)
        nxt = syzygy(cur)
        assert p.dim == cur.dim + nxt.dim
        cur = nxt


@settings(max_examples=20, deadline=None)
@given(index=st.integers(0, 19))
def test_dual_is_involutive(index):
    _, alg = RANDOM[index]
    for k in range(alg.num_idempotents):
        s = simple(alg, k)
        assert dual(dual(s)).same_action(s)


@settings(max_examples=10, deadline=None)
@given(i=st.integers(0, 19), j=st.integers(0, 19))
def test_tensor_dimensions_and_associativity(i, j):
    a, b = RANDOM[i][1], RANDOM[j][1]
    if a.dim * b.dim > 30:
        return
    t = tensor(a, b)
    assert t.dim == a.dim * b.dim
    assert t.num_idempotents == a.num_idempotents * b.num_idempotents
    rng = np.random.default_rng(i * 31 + j)
    triples = [tuple(int(x) for x in rng.integers(t.dim, size=3)) for _ in range(200)]
    assert t.is_associative(triples)


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 1000), p=st.sampled_from([0, 2, 3]))
def test_bimodule_euler_characteristic_of_truncation(seed, p):
    """``Σ (-1)^k dim P_k + (-1)^{L+1} dim Ω^{L+1} = dim A`` for the bimodule resolution."""
    _, alg = RANDOM[seed % len(RANDOM)]
    from tate_syzygy.linalg import Field

    a = alg.with_field(Field(p))
    res = ResolutionPrefix(regular_bimodule(a)).extend(4)
    total = sum((-1) ** k * res.term(k).dim for k in range(5)) + (-1) ** 5 * res.syzygy(5).dim
    assert total == a.dim
