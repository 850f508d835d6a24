from fractions import Fraction

import pytest

from equivariant_poly import delta_vector
from formal_dzv import (
    DzvSymbol,
    ExcludedWeightLevelError,
    FormalVector,
    InvalidSymbolError,
    dsh_as_operators_check,
    dsh_relation_vectors,
    gkz_symmetric_check,
    in_pev,
    lambda_map,
    oddodd_check,
    oddodd_subspace,
    oddodd_type_symbols,
    pev_generators,
    pev_span_identity_check,
    shuffle_vector,
    stuffle_vector,
    symbol_index,
)
from sl2_structure import enumerate_cosets

GRID = [(1, 12), (2, 6), (3, 4), (4, 4)]
ACCEPTANCE_GRID = [(1, 12), (1, 16), (2, 6), (3, 4), (3, 5), (4, 4), (4, 5), (6, 4)]
SPAN_GRID = [(N, k) for N in (1, 2, 3, 4) for k in range(2, 7) if (k, N) != (2, 1)] + [(3, 5), (1, 12)]


@pytest.mark.parametrize("k, N", [(4, 2), (3, 3), (12, 1), (5, 4)])
def test_symbol_index_size(k, N):
    cosets = len(enumerate_cosets(N))
    assert len(symbol_index(k, N)) == 2 * (k - 1) * cosets + N


def test_excluded_weight_level():
    with pytest.raises(ExcludedWeightLevelError):
        symbol_index(2, 1)
    with pytest.raises(ExcludedWeightLevelError):
        symbol_index(1, 3)


def test_symbol_validation():
    with pytest.raises(InvalidSymbolError):
        DzvSymbol.Z2(0, 3, 0, 1, 3)
    with pytest.raises(InvalidSymbolError):
        DzvSymbol.P2(1, 3, 2, 2, 4)
    with pytest.raises(InvalidSymbolError):
        DzvSymbol.Z1(0, 1, 3)
    assert DzvSymbol.Z2(1, 2, -1, 4, 3).indices == (1, 2, 2, 1)


def test_stuffle_vector():
    v = stuffle_vector(1, 2, 0, 1, 3)
    assert v.coefficient(DzvSymbol.P2(1, 2, 0, 1, 3)) == 1
    assert v.coefficient(DzvSymbol.Z2(1, 2, 0, 1, 3)) == -1
    assert v.coefficient(DzvSymbol.Z2(2, 1, 1, 0, 3)) == -1
    assert v.coefficient(DzvSymbol.Z1(3, 1, 3)) == -1
    assert len(v.terms) == 4


def test_shuffle_vector_at_level_one():
    # ζ(2)ζ(2) = 2ζ(2,2) + 4ζ(1,3) with the larger index on the outer sum
    v = shuffle_vector(2, 2, 0, 0, 1)
    assert dict(v.terms) == {
        DzvSymbol.P2(2, 2, 0, 0, 1): 1,
        DzvSymbol.Z2(2, 2, 0, 0, 1): -2,
        DzvSymbol.Z2(1, 3, 0, 0, 1): -4,
    }


def test_formal_vector_arithmetic_and_latex():
    z = FormalVector.from_terms(3, 3, [(DzvSymbol.Z2(1, 2, 0, 1, 3), 1)])
    p = FormalVector.from_terms(3, 3, [(DzvSymbol.P2(1, 2, 1, 1, 3), Fraction(1, 2))])
    assert (z + p - p) == z
    assert (z * 0).is_zero()
    assert (z - p * 2).latex() == "Z_{0,1}^{1,2} -P_{1,1}^{1,2}"
    assert (p * -3).latex() == "-\\frac{3}{2}P_{1,1}^{1,2}"
    with pytest.raises(InvalidSymbolError):
        FormalVector.from_terms(3, 4, [(DzvSymbol.Z2(1, 2, 0, 1, 3), 1)])


def test_dense_round_trip():
    v = stuffle_vector(2, 3, 1, 2, 4)
    assert FormalVector.from_dense(4, 5, v.to_dense()) == v


def test_lambda_of_delta_vector_is_a_single_symbol():
    N, w = 3, 2
    for C in enumerate_cosets(N):
        for r in range(w + 1):
            Q = delta_vector(N, w, r, w - r, C.c, C.d)
            assert dict(lambda_map(Q).terms) == {DzvSymbol.Z2(r + 1, w - r + 1, C.c, C.d, N): 1}
            assert dict(lambda_map(Q, "P").terms) == {DzvSymbol.P2(r + 1, w - r + 1, C.c, C.d, N): 1}
            assert dict(lambda_map(Q, "S").terms) == {DzvSymbol.Z1(w + 2, C.c + C.d, N): 1}


@pytest.mark.parametrize("N, k", GRID)
def test_double_shuffle_as_operators(N, k):
    assert dsh_as_operators_check(k, N)


@pytest.mark.parametrize("N, k", GRID)
def test_pev_span_identity(N, k):
    assert pev_span_identity_check(k, N)


@pytest.mark.slow
@pytest.mark.parametrize("N, k", [nk for nk in ACCEPTANCE_GRID if nk not in GRID])
def test_double_shuffle_as_operators_full_grid(N, k):
    assert dsh_as_operators_check(k, N)


@pytest.mark.slow
@pytest.mark.parametrize("N, k", [nk for nk in SPAN_GRID if nk not in GRID])
def test_pev_span_identity_full_grid(N, k):
    assert pev_span_identity_check(k, N)


def test_certificates_reproduce_spanning_vectors():
    for v in dsh_relation_vectors(4, 3)[:6] + pev_generators(4, 3)[:3]:
        certificate = in_pev(v)
        assert certificate is not None
        assert certificate.reproduce() == v


def test_single_zeta_three_is_not_in_pev():
    v = FormalVector.from_terms(1, 3, [(DzvSymbol.Z1(3, 0, 1), 1)])
    assert in_pev(v) is None


def test_lone_double_zeta_is_not_in_pev():
    v = FormalVector.from_terms(1, 12, [(DzvSymbol.Z2(9, 3, 0, 0, 1), 1)])
    assert in_pev(v) is None


def test_certificate_labels():
    v = pev_generators(4, 3)[1] + dsh_relation_vectors(4, 3)[0]
    families = {family for family, _, _ in in_pev(v).labelled()}
    assert families <= {"dsh", "pev"}


@pytest.mark.parametrize("k, N", [(12, 1), (4, 3), (5, 4)])
def test_oddodd_type_symbols_are_oddodd(k, N):
    subspace = oddodd_subspace(k, N)
    vectors = oddodd_type_symbols(k, N)
    assert vectors
    for v in vectors:
        assert oddodd_check(v)
        assert subspace.contains(v.to_dense())


def test_oddodd_check_rejects_even_index_at_level_one():
    v = FormalVector.from_terms(1, 12, [(DzvSymbol.Z2(2, 10, 0, 0, 1), 1)])
    assert not oddodd_check(v)
    assert oddodd_check(FormalVector.from_terms(1, 12, [(DzvSymbol.Z2(3, 9, 0, 0, 1), 1)]))
    assert not oddodd_check(stuffle_vector(3, 9, 0, 0, 1))


def test_gkz_symmetric_combination_is_in_pev():
    v = FormalVector.from_terms(
        1, 12, [(DzvSymbol.Z2(2, 10, 0, 0, 1), 1), (DzvSymbol.Z2(10, 2, 0, 0, 1), 1)]
    )
    assert gkz_symmetric_check(v)
    assert in_pev(v) is not None
    assert not gkz_symmetric_check(FormalVector.from_terms(1, 12, [(DzvSymbol.Z2(2, 10, 0, 0, 1), 1)]))
