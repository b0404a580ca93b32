import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from oracles import monomial_basis_size
from support import presentation, random_monomial_text
from tate_syzygy.linalg import Field
from tate_syzygy.presentation import (
    InfiniteDimensionalError,
    PresentationError,
    compose,
    enumerate_basis,
    gamma_presentation,
    parse_presentation,
)


def test_lambda1_basis():
    basis = enumerate_basis(presentation("lambda1.alg"))
    assert basis.labels() == ["e1", "e2", "a", "b", "a*b", "b*a", "b*a*b"]


def test_lambda2_basis():
    basis = enumerate_basis(presentation("lambda2.alg"))
    assert basis.labels() == ["e1", "e2", "a", "b", "b*a"]
    assert basis.endpoints(basis.index(("b", "a"))) == ("1", "2")


def test_commutativity_relation_reduces():
    basis = enumerate_basis(presentation("a.alg"))
    assert basis.dim == 6
    # b*a and g*b are identified; exactly one of them is a basis path
    words = {p for _, p in basis.elements}
    assert (("b", "a") in words) != (("g", "b") in words)
    assert basis.reduce(("b", "a")) == basis.reduce(("g", "b"))


def test_compose_respects_endpoints():
    basis = enumerate_basis(presentation("lambda2.alg"))
    a, b = basis.index(("a",)), basis.index(("b",))
    assert compose(basis, b, a) == {basis.index(("b", "a")): 1}
    assert compose(basis, a, b) == {}
    assert compose(basis, a, a) == {}


def test_default_field_and_comments():
    pres = parse_presentation("# a comment\nvertices 1  # trailing\narrow x : 1 -> 1\nrelation x*x\n")
    assert pres.field == Field(32003)
    assert pres.is_monomial


def test_rational_coefficients():
    pres = parse_presentation("field Q\nvertices 1 2\narrow a : 1 -> 2\narrow b : 1 -> 2\n"
                              "arrow c : 2 -> 2\nrelation c*a - 1/2*c*b\nrelation c*c\n")
    assert not pres.is_monomial
    coeffs = sorted(c for c, _ in pres.relations[0].terms)
    assert [str(c) for c in coeffs] == ["-1/2", "1"]


@pytest.mark.parametrize(
    "text,line,column",
    [
        ("vertices 1\narrow a : 1 -> 2\n", 2, 16),
        ("vertices 1\narrow a : 1 -> 1\nrelation a*b\n", 3, 12),
        ("vertices 1\narrow a : 1 -> 1\nrelation a\n", 3, 10),
        ("vertices 1\nfrobnicate\n", 2, 1),
        ("field R\nvertices 1\n", 1, 7),
        ("vertices 1\narrow a : 1 -> 1\nrelation a*a + a*a*a\n", 3, 10),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(PresentationError) as info:
        parse_presentation(text)
    assert info.value.line == line
    assert info.value.column == column


def test_nonparallel_and_noncomposable():
    base = "vertices 1 2\narrow a : 1 -> 2\narrow b : 2 -> 1\narrow c : 1 -> 1\n"
    with pytest.raises(PresentationError, match="composable"):
        parse_presentation(base + "relation a*a\n")
    with pytest.raises(PresentationError, match="parallel"):
        parse_presentation(base + "relation a*c - c*c\n")


def test_missing_vertices():
    with pytest.raises(PresentationError, match="vertices"):
        parse_presentation("field Q\n")


def test_infinite_dimensional_detected():
    pres = parse_presentation("vertices 1\narrow x : 1 -> 1\n")
    with pytest.raises(InfiniteDimensionalError):
        enumerate_basis(pres, length_bound=10)


def test_to_text_round_trip():
    for name in ["a.alg", "lambda1.alg", "kx2.alg"]:
        pres = presentation(name)
        again = parse_presentation(pres.to_text(), name=name)
        assert again == pres


def test_gamma_presentation():
    pres = gamma_presentation(3, Field(5))
    assert pres.field == Field(5)
    basis = enumerate_basis(pres)
    assert basis.dim == 4 + 3  # vertices and arrows; every length-2 path vanishes
    assert gamma_presentation(1).to_text() == presentation("gamma1.alg").with_field(Field(32003)).to_text()


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seed=st.integers(0, 10_000))
def test_monomial_basis_matches_path_count(seed):
    rng = np.random.default_rng(seed)
    text, nv, arrows, rels = random_monomial_text(rng)
    expected = monomial_basis_size(range(nv), arrows, rels, budget=60)
    pres = parse_presentation(text)
    if expected is None:
        return
    assert enumerate_basis(pres).dim == expected
