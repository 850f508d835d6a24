import pytest

from sl2_structure import (
    IDENTITY,
    Coset,
    DeterminantError,
    GL2Elt,
    GroupRingElt,
    InvalidCosetError,
    UnknownGeneratorError,
    WordSyntaxError,
    coset_eps,
    coset_mul,
    enumerate_cosets,
    expand_word,
    gamma1_index,
    generator,
    inv,
    mul,
    ring,
)

S = generator("S")
T = generator("T")
U = generator("U")
J = generator("J")
EPS = generator("ε")


@pytest.mark.parametrize("N, count", [(1, 1), (2, 3), (3, 8), (4, 12), (5, 24), (6, 24)])
def test_coset_counts(N, count):
    assert len(enumerate_cosets(N)) == count
    assert gamma1_index(N) == count


def test_generator_relations():
    assert T * S == U
    assert S * S == J
    assert U**3 == J
    assert EPS * EPS == IDENTITY
    assert J * J == IDENTITY
    assert EPS.det == -1


def test_inverse():
    for g in (S, T, U, EPS):
        assert g * g.inv() == IDENTITY
        assert mul(g, inv(g)) == IDENTITY
    assert T**-1 == GL2Elt(1, -1, 0, 1)


def test_determinant_is_checked():
    with pytest.raises(DeterminantError):
        GL2Elt(2, 0, 0, 1)


def test_unknown_generator():
    with pytest.raises(UnknownGeneratorError):
        generator("X")
    assert generator("eps") == EPS


def test_coset_validation():
    with pytest.raises(InvalidCosetError):
        Coset(4, 2, 2)
    with pytest.raises(InvalidCosetError):
        Coset(3, 3, 0)
    assert Coset.of(3, -1, 4) == Coset(3, 2, 1)


def test_right_multiplication_of_bottom_row():
    assert coset_mul(Coset(5, 0, 1), S) == Coset(5, 1, 0)
    assert coset_mul(Coset(5, 1, 0), T) == Coset(5, 1, 1)
    with pytest.raises(DeterminantError):
        coset_mul(Coset(5, 1, 0), EPS)


def test_coset_multiplication_is_a_right_action():
    for C in enumerate_cosets(4):
        for g in (S, T, U):
            for h in (S, T, U):
                assert coset_mul(coset_mul(C, g), h) == coset_mul(C, g * h)


def test_eps_twists():
    assert coset_eps(Coset(5, 2, 3), "standard") == Coset(5, 3, 3)
    assert coset_eps(Coset(5, 2, 3), "barred") == Coset(5, 2, 2)


def test_expand_word():
    assert expand_word("US^{-1}") == U * S.inv()
    assert expand_word("U^3") == J
    assert expand_word("1") == IDENTITY
    with pytest.raises(WordSyntaxError):
        expand_word("1+S")


def test_group_ring_parsing():
    assert ring("(1+S)(1-S)") == ring("1-J")
    assert ring("1+U+U^2") == GroupRingElt.from_terms([(IDENTITY, 1), (U, 1), (U * U, 1)])
    assert ring("2εS") == GroupRingElt.of(EPS * S, 2)
    assert ring("1/2(1+ε)") == GroupRingElt.from_terms([(IDENTITY, "1/2"), (EPS, "1/2")])


def test_group_ring_syntax_errors():
    with pytest.raises(WordSyntaxError):
        ring("(1+S")
    with pytest.raises(WordSyntaxError):
        ring("1+?")
