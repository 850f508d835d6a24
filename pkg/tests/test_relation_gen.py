from fractions import Fraction

import pytest

from equivariant_poly import EquivariantVector, HomogPoly
from formal_dzv import DzvSymbol, FormalVector, ExcludedWeightLevelError, oddodd_check
from period_spaces import space_W, to_vectors
from relation_gen import (
    NotAPeriodPolynomialError,
    coefficients_from_polynomial,
    converse_rank_check,
    generate_relations,
    level_one_relations,
    normalize_relation,
    odd_coefficient_rank,
    q_by_operator,
    q_by_substitution,
    q_symmetry_check,
    theorem_identity_check,
)
from sl2_structure import Coset

FAST_GRID = [(1, 12), (3, 4), (4, 4)]
FULL_GRID = [(1, 12), (1, 16), (2, 6), (3, 4), (3, 5), (4, 4), (4, 5), (6, 4)]


def check_relations(N, k):
    relations = generate_relations(N, k)
    assert len(relations) == space_W(N, k - 2, "barred", "+").dim
    for index, relation in enumerate(relations):
        assert relation.source_index == index
        assert relation.certificate.reproduce() == relation.vector
        assert relation.odd_certificate.reproduce() == relation.odd_part
        assert relation.vector == (relation.odd_part * 3 + relation.even_part + relation.single_part) * relation.scale
        assert q_symmetry_check(relation.coefficients)
        assert oddodd_check(relation.odd_part)
    assert odd_coefficient_rank(relations) == len(relations)


@pytest.mark.parametrize("N, k", FAST_GRID)
def test_relations_are_certified(N, k):
    check_relations(N, k)


@pytest.mark.parametrize("N, k", FAST_GRID)
def test_converse(N, k):
    assert converse_rank_check(N, k)


@pytest.mark.slow
@pytest.mark.parametrize("N, k", [nk for nk in FULL_GRID if nk not in FAST_GRID])
def test_relations_full_grid(N, k):
    check_relations(N, k)
    assert converse_rank_check(N, k)


def test_level_one_odd_parts_use_odd_indices():
    for relation in generate_relations(1, 12):
        for symbol, _ in relation.odd_part.terms:
            r, s, _, _ = symbol.indices
            assert r % 2 == 1 and s % 2 == 1


def test_level_one_tables_are_symmetric_in_even_indices():
    tables = level_one_relations(12)
    assert len(tables) == 2
    for table in tables:
        assert set(table) == {(r, 12 - r) for r in range(1, 12)}


def test_substitution_and_operator_routes_agree():
    for N, k in FAST_GRID:
        w = k - 2
        for P in to_vectors(space_W(N, w, "barred", "+"), N, w, "barred"):
            assert q_by_substitution(P) == q_by_operator(P)
            assert theorem_identity_check(P)


def test_coefficients_split_into_odd_and_even():
    (P, *_) = to_vectors(space_W(1, 10, "barred", "+"), 1, 10, "barred")
    qc = coefficients_from_polynomial(P)
    for key, value in qc.q.items():
        assert qc.q_od[key] + qc.q_ev[key] == value


def test_non_period_polynomial_is_rejected():
    P = EquivariantVector.from_map(3, 2, "barred", {Coset(3, 0, 1): HomogPoly.monomial(2, 0)})
    with pytest.raises(NotAPeriodPolynomialError):
        coefficients_from_polynomial(P)
    with pytest.raises(NotAPeriodPolynomialError):
        coefficients_from_polynomial(EquivariantVector.zero(3, 2, "standard"))


def test_normalize_relation():
    v = FormalVector.from_terms(
        1,
        4,
        [(DzvSymbol.Z2(1, 3, 0, 0, 1), Fraction(-1, 2)), (DzvSymbol.Z2(3, 1, 0, 0, 1), Fraction(3, 4))],
    )
    normalized, scale = normalize_relation(v)
    assert scale == -4
    assert dict(normalized.terms) == {DzvSymbol.Z2(1, 3, 0, 0, 1): 2, DzvSymbol.Z2(3, 1, 0, 0, 1): -3}
    assert normalize_relation(FormalVector.zero(1, 4)) == (FormalVector.zero(1, 4), 1)


def test_excluded_weight_level():
    with pytest.raises(ExcludedWeightLevelError):
        generate_relations(1, 2)
