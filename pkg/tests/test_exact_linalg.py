import random
from fractions import Fraction

import mpmath
import pytest

from exact_linalg import (
    DimensionMismatchError,
    QMatrix,
    Subspace,
    format_rat,
    image_subspace,
    in_span,
    kernel_basis,
    parse_rat,
    rational_reconstruct,
    restricted_kernel,
    rref,
    rref_with_transform,
    subspace_intersect,
    subspace_sum,
    to_exact,
)


def test_rref_rank_and_pivots():
    result = rref(QMatrix.from_rows([[1, 2], [2, 4]]))
    assert result.rank == 1
    assert result.pivot_cols == (0,)
    assert result.R.row(0) == (1, 2)
    assert result.R.row(1) == (0, 0)


def test_rref_transform_reproduces_reduced_matrix():
    M = QMatrix.from_rows([[0, 2, 1], [1, 1, 0], [2, 4, 3]])
    result = rref_with_transform(M)
    assert result.E @ M == result.R
    assert result.rank == 3
    assert result.R == QMatrix.identity(3)


def test_kernel_of_single_row():
    kernel = kernel_basis(QMatrix.from_rows([[1, 1]]))
    assert kernel.dim == 1
    assert kernel.contains((1, -1))
    assert not kernel.contains((1, 1))


def test_kernel_vectors_are_annihilated():
    M = QMatrix.from_rows([[1, 2, 3, 4], [2, 4, 6, 8], [0, 1, 0, 1]])
    kernel = kernel_basis(M)
    assert kernel.dim == 2
    for v in kernel.vectors():
        assert M.apply(v) == (0, 0, 0)


def test_subspace_equality_is_canonical():
    first = Subspace.from_vectors([[1, 1, 0], [0, 1, 1]], 3)
    second = Subspace.from_vectors([[1, 2, 1], [2, 1, -1]], 3)
    assert first == second


def test_intersection_and_sum():
    e12 = Subspace.from_vectors([[1, 0, 0], [0, 1, 0]], 3)
    e23 = Subspace.from_vectors([[0, 1, 0], [0, 0, 1]], 3)
    assert subspace_intersect(e12, e23) == Subspace.from_vectors([[0, 1, 0]], 3)
    assert subspace_sum(e12, e23) == Subspace.full(3)


def test_restricted_kernel_and_image():
    projection = QMatrix.from_rows([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    plane = Subspace.from_vectors([[1, 1, 0], [0, 0, 1]], 3)
    assert restricted_kernel(projection, plane) == Subspace.from_vectors([[0, 0, 1]], 3)
    assert image_subspace(projection, plane) == Subspace.from_vectors([[1, 0, 0]], 3)


def test_in_span_returns_coordinates_over_basis_rows():
    S = Subspace.from_vectors([[1, 0, 2], [0, 1, 3]], 3)
    assert in_span((2, -1, 1), S) == (2, -1)
    assert in_span((0, 0, 1), S) is None


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        QMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(DimensionMismatchError):
        QMatrix.identity(2).apply((1, 2, 3))


def test_rational_formatting():
    assert format_rat(Fraction(3)) == "3/1"
    assert format_rat(Fraction(0)) == "0/1"
    assert format_rat(Fraction(-6, 4)) == "-3/2"
    assert parse_rat("-3/2") == Fraction(-3, 2)


def test_to_exact():
    assert to_exact(mpmath.mpf(-0.5)) == Fraction(-1, 2)
    assert to_exact(mpmath.mpf(3)) == 3
    assert to_exact("0.25") == Fraction(1, 4)
    with pytest.raises(ValueError):
        to_exact(mpmath.inf)


def test_rational_reconstruct():
    assert rational_reconstruct("0.333333333333", 10, "1e-9") == Fraction(1, 3)
    assert rational_reconstruct("3.14159265358979", 10, "0.01") == Fraction(22, 7)
    assert rational_reconstruct("-0.25", 10, "1e-12") == Fraction(-1, 4)


def test_rational_reconstruct_gives_up_beyond_max_den():
    assert rational_reconstruct("3.14159265358979", 1000, "1e-12") is None
    with pytest.raises(ValueError):
        rational_reconstruct("0.5", 0, "1e-9")


def random_matrix(rng, rows, cols, rank=None):
    if rank is None:
        return QMatrix.from_rows([[rng.randint(-3, 3) for _ in range(cols)] for _ in range(rows)])
    left = QMatrix.from_rows([[rng.randint(-3, 3) for _ in range(rank)] for _ in range(rows)])
    right = QMatrix.from_rows([[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(cols)] for _ in range(rank)])
    return left @ right


@pytest.mark.parametrize("seed", range(8))
def test_rref_is_idempotent(seed):
    rng = random.Random(seed)
    M = random_matrix(rng, 5, 7, rank=rng.randint(1, 4))
    reduced = rref(M)
    again = rref(reduced.R)
    assert again.R == reduced.R
    assert again.pivot_cols == reduced.pivot_cols


@pytest.mark.parametrize("seed", range(8))
def test_rank_plus_nullity(seed):
    rng = random.Random(seed)
    cols = rng.randint(2, 8)
    M = random_matrix(rng, rng.randint(1, 6), cols, rank=rng.choice([None, 1, 2]))
    assert kernel_basis(M).dim + rref(M).rank == cols


@pytest.mark.parametrize("seed", range(8))
def test_intersection_dimension(seed):
    rng = random.Random(seed)
    shared = [rng.randint(-3, 3) for _ in range(6)]
    S1 = Subspace.from_vectors([shared] + random_matrix(rng, 2, 6).to_rows(), 6)
    S2 = Subspace.from_vectors([shared] + random_matrix(rng, 3, 6).to_rows(), 6)
    both = subspace_intersect(S1, S2)
    assert both.dim == S1.dim + S2.dim - subspace_sum(S1, S2).dim
    for v in both.vectors():
        assert S1.contains(v)
        assert S2.contains(v)


@pytest.mark.parametrize("seed", range(10))
def test_rational_reconstruct_of_perturbed_rationals(seed):
    rng = random.Random(seed)
    max_den = 100
    exact = Fraction(rng.randint(-200, 200), rng.randint(1, 50))
    q = exact.denominator
    noise = Fraction(rng.choice([-1, 1]), 4 * q * max_den + rng.randint(0, 100))
    assert rational_reconstruct(exact + noise, max_den, abs(noise)) == exact


def test_pi_has_no_small_denominator_approximation():
    with mpmath.workprec(100):
        assert rational_reconstruct(mpmath.pi, 10, "1e-20") is None


def test_kernel_of_full_rank_and_empty_matrices():
    assert kernel_basis(QMatrix.identity(3)).dim == 0
    assert kernel_basis(QMatrix.zero(0, 3)) == Subspace.full(3)
    assert in_span((0, 0), Subspace.zero(2)) == ()
    assert in_span((1, 0), Subspace.zero(2)) is None
