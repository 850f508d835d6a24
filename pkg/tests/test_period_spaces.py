import pytest

from equivariant_poly import EquivariantVector, HomogPoly, act_equiv
from exact_linalg import Subspace, subspace_intersect
from period_spaces import (
    NotInEigenspaceError,
    SpaceRequest,
    barred_sign_identity,
    contains_vector,
    delta_kernel,
    delta_star,
    delta_star_kernel,
    delta_star_minus_preimage,
    eichler_shimura_report,
    f_kernel,
    iota,
    iota_rank,
    space_C,
    space_V,
    space_V_sign,
    space_W,
    space_W_relaxed,
    to_vectors,
)
from sl2_structure import FLAVORS, enumerate_cosets

SMALL_GRID = [(N, w) for N in (1, 2, 3) for w in range(0, 5)]
FULL_GRID = [(N, w) for N in (1, 2, 3, 4) for w in range(0, 9)]


@pytest.mark.parametrize(
    "w, sign, dim",
    [(10, "+", 2), (10, "-", 1), (8, "+", 1), (8, "-", 0)],
)
def test_level_one_period_polynomials(w, sign, dim):
    assert space_W(1, w, "standard", sign).dim == dim


def test_level_one_weight_twelve_cusp_form():
    report = eichler_shimura_report(1, 10)
    assert report.cusp_dim == 1
    assert report.known_cusp_dim == 1
    assert report.k == 12


@pytest.mark.parametrize("N", range(1, 11))
def test_no_weight_two_cusp_forms_below_eleven(N):
    assert eichler_shimura_report(N, 0).cusp_dim == 0


@pytest.mark.slow
def test_weight_two_cusp_form_at_eleven():
    assert eichler_shimura_report(11, 0).cusp_dim == 1


def check_structure(N, w):
    for flavor in FLAVORS:
        for sign in ("+", "-"):
            assert space_W(N, w, flavor, sign) == space_W_relaxed(N, w, flavor, sign)
        plus = space_W(N, w, flavor, "+")
        assert f_kernel(N, w, flavor).dim == plus.dim
        assert iota_rank(N, w, flavor) == plus.dim
    assert f_kernel(N, w, "standard").dim == f_kernel(N, w, "barred").dim
    assert barred_sign_identity(N, w)
    assert delta_star_kernel(N, w) == space_W(N, w, "standard", "+")
    assert delta_star_minus_preimage(N, w) == space_W(N, w, "standard", "+")

    for sign in ("+", "-"):
        C = space_C(N, w, sign)
        assert subspace_intersect(C, space_W(N, w, "standard", sign)) == C

    kernel = delta_kernel(N, w)
    assert kernel.dim == space_W(N, w, "standard", "+").dim
    for P in to_vectors(space_V_sign(N, w, "barred", "-"), N, w, "barred"):
        assert contains_vector(kernel, act_equiv(P, "1+εS"))
    for P in to_vectors(space_V(N, w, "barred"), N, w, "barred"):
        assert contains_vector(kernel, act_equiv(P, "(1+εS)(1-T)"))


@pytest.mark.parametrize("N, w", SMALL_GRID)
def test_structural_identities(N, w):
    check_structure(N, w)


@pytest.mark.slow
@pytest.mark.parametrize("N, w", [nw for nw in FULL_GRID if nw not in SMALL_GRID])
def test_structural_identities_full_grid(N, w):
    check_structure(N, w)


def test_delta_star_vanishes_on_period_polynomials():
    for P in to_vectors(space_W(1, 10, "standard", "+"), 1, 10, "standard"):
        assert delta_star(P).is_zero()
        assert not iota(P).is_zero()


def test_delta_star_needs_plus_vectors():
    (P,) = to_vectors(space_W(1, 10, "standard", "-"), 1, 10, "standard")
    with pytest.raises(NotInEigenspaceError):
        delta_star(P)


def test_space_request():
    assert SpaceRequest(1, 10, "standard", "W", "+").compute().dim == 2
    assert SpaceRequest(1, 10, "standard", "V", "both").compute() == space_V(1, 10, "standard")
    with pytest.raises(ValueError):
        SpaceRequest(1, 10, which="Z")
    with pytest.raises(ValueError):
        SpaceRequest(0, 10)


def test_level_one_coboundaries():
    (C,) = enumerate_cosets(1)
    coeffs = [0] * 11
    coeffs[0], coeffs[10] = -1, 1
    P = EquivariantVector.from_map(1, 10, "standard", {C: HomogPoly(10, tuple(coeffs))})
    assert space_C(1, 10, "+") == Subspace.from_vectors([P.to_flat()], 11)
    assert space_C(1, 10, "-").dim == 0
