"""
Exact bases of V_w^Γ, W_w^{Γ,±}, W̄_w^{Γ,±}, C_w^{Γ,±} for Γ = Γ₁(N) and the
structural maps δ, δ*, f_A and ι between them.

Quotients A/A^- are represented by A^+ through the projection ½(1+ε).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Optional

from dataclasses_json import dataclass_json

import constants
from equivariant_poly import EquivariantVector, act_equiv, operator_matrix
from exact_linalg import (
    QMatrix,
    Subspace,
    image_subspace,
    in_span,
    kernel_basis,
    rref,
    restricted_kernel,
    subspace_intersect,
)
from sl2_structure import FLAVORS, Flavor, GroupRingElt, enumerate_cosets, ring

logger = logging.getLogger(__name__)

Sign = Literal["+", "-", "both"]
Which = Literal["V", "W", "W_relaxed", "C"]


class NotInEigenspaceError(ValueError):
    pass


class ConsistencyError(RuntimeError):
    pass


def ambient_dim(N: int, w: int) -> int:
    return len(enumerate_cosets(N)) * (w + 1)


def _kernel(N: int, w: int, flavor: Flavor, *ops: GroupRingElt) -> Subspace:
    dim = ambient_dim(N, w)
    stacked = QMatrix.vstack([operator_matrix(N, w, flavor, op) for op in ops], cols=dim)
    return kernel_basis(stacked)


def _sign_ops(sign: Sign) -> tuple[GroupRingElt, ...]:
    if sign == "+":
        return (ring("ε-1"),)
    if sign == "-":
        return (ring("ε+1"),)
    if sign == "both":
        return ()
    raise ValueError(f"Unknown sign {sign!r}")


def to_vectors(S: Subspace, N: int, w: int, flavor: Flavor) -> list[EquivariantVector]:
    return [EquivariantVector.from_flat(N, w, flavor, v) for v in S.vectors()]


def contains_vector(S: Subspace, P: EquivariantVector) -> bool:
    return in_span(P.to_flat(), S) is not None


@lru_cache(maxsize=None)
def space_V(N: int, w: int, flavor: Flavor) -> Subspace:
    return _kernel(N, w, flavor, ring("J-1"))


@lru_cache(maxsize=None)
def eigenspace(N: int, w: int, flavor: Flavor, sign: Sign) -> Subspace:
    ops = _sign_ops(sign)
    return _kernel(N, w, flavor, *ops) if ops else Subspace.full(ambient_dim(N, w))


@lru_cache(maxsize=None)
def space_V_sign(N: int, w: int, flavor: Flavor, sign: Sign) -> Subspace:
    return _kernel(N, w, flavor, ring("J-1"), *_sign_ops(sign))


@lru_cache(maxsize=None)
def space_W(N: int, w: int, flavor: Flavor, sign: Sign) -> Subspace:
    space = _kernel(N, w, flavor, ring("J-1"), ring("1+S"), ring("1+U+U^2"), *_sign_ops(sign))
    logger.debug("dim W(N=%d, w=%d, %s, %s) = %d", N, w, flavor, sign, space.dim)
    return space


@lru_cache(maxsize=None)
def space_W_relaxed(N: int, w: int, flavor: Flavor, sign: Sign) -> Subspace:
    return _kernel(N, w, flavor, ring("J-1"), ring("1+S"), ring("(1+U+U^2)(1-S)"), *_sign_ops(sign))


@lru_cache(maxsize=None)
def space_C(N: int, w: int, sign: Sign, flavor: Flavor = "standard") -> Subspace:
    """
    Coboundaries P|_{1-S} with P|_T = P, in the requested ε-eigenspace.
    flavor defaults to the standard action; "barred" runs the same
    construction on V̄.
    """
    t_invariant = _kernel(N, w, flavor, ring("J-1"), ring("T-1"))
    image = image_subspace(operator_matrix(N, w, flavor, ring("1-S")), t_invariant)
    return subspace_intersect(image, eigenspace(N, w, flavor, sign))


@lru_cache(maxsize=None)
def space_V_minus_sym(N: int, w: int) -> Subspace:
    """{u ∈ V̄^- : u|_{εS} = u}"""
    return _kernel(N, w, "barred", ring("J-1"), ring("ε+1"), ring("εS-1"))


@dataclass_json
@dataclass(frozen=True)
class SpaceRequest:
    N: int
    w: int
    flavor: Flavor = "standard"
    which: Which = "W"
    sign: Sign = "both"

    def __post_init__(self):
        if self.N < 1 or self.w < 0:
            raise ValueError(f"Need N >= 1 and w >= 0, got N={self.N}, w={self.w}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"Unknown flavor {self.flavor!r}")
        if self.which not in ("V", "W", "W_relaxed", "C"):
            raise ValueError(f"Unknown space {self.which!r}")
        if self.sign not in ("+", "-", "both"):
            raise ValueError(f"Unknown sign {self.sign!r}")

    def compute(self) -> Subspace:
        if self.which == "V":
            return space_V_sign(self.N, self.w, self.flavor, self.sign)
        if self.which == "W":
            return space_W(self.N, self.w, self.flavor, self.sign)
        if self.which == "W_relaxed":
            return space_W_relaxed(self.N, self.w, self.flavor, self.sign)
        return space_C(self.N, self.w, self.sign, self.flavor)


@dataclass(frozen=True)
class LinearMap:
    """A map between subspaces; column i holds the codomain coordinates of the image of domain basis row i"""

    domain: Subspace
    codomain: Subspace
    matrix: QMatrix

    @property
    def rank(self) -> int:
        return rref(self.matrix).rank

    def kernel(self) -> Subspace:
        coefficients = kernel_basis(self.matrix)
        if coefficients.dim == 0:
            return Subspace.zero(self.domain.ambient_dim)
        return Subspace.from_matrix(coefficients.basis @ self.domain.basis)


def _linear_map(domain: Subspace, codomain: Subspace, operator: QMatrix) -> LinearMap:
    columns = []
    for b in domain.vectors():
        coordinates = in_span(operator.apply(b), codomain)
        if coordinates is None:
            raise ConsistencyError("Operator image leaves the expected codomain")
        columns.append(coordinates)
    return LinearMap(domain, codomain, QMatrix.from_columns(columns, rows=codomain.dim))


@lru_cache(maxsize=None)
def delta_map(N: int, w: int) -> LinearMap:
    """δ(P) = P|_{1+SU²S-SU} mod V̄^-, on V̄"""
    op = Fraction(1, 2) * ring("(1+SU^2S-SU)(1+ε)")
    return _linear_map(
        space_V(N, w, "barred"),
        space_V_sign(N, w, "barred", "+"),
        operator_matrix(N, w, "barred", op),
    )


def delta_kernel(N: int, w: int) -> Subspace:
    return delta_map(N, w).kernel()


def _require_plus(P: EquivariantVector):
    if act_equiv(P, "J") != P or act_equiv(P, "ε") != P:
        raise NotInEigenspaceError("Expected a J-invariant vector with ε-eigenvalue +1")


def delta_star(P: EquivariantVector) -> EquivariantVector:
    """δ*(P) = P|_{1+SUS-U²S} on V^+"""
    if P.flavor != "standard":
        raise NotInEigenspaceError("δ* acts on the standard space")
    _require_plus(P)
    return act_equiv(P, "1+SUS-U^2S")


@lru_cache(maxsize=None)
def delta_star_kernel(N: int, w: int) -> Subspace:
    return restricted_kernel(
        operator_matrix(N, w, "standard", ring("1+SUS-U^2S")),
        space_V_sign(N, w, "standard", "+"),
    )


@lru_cache(maxsize=None)
def delta_star_minus_preimage(N: int, w: int) -> Subspace:
    """{P ∈ V^+ : δ*(P) ∈ V^-}"""
    return restricted_kernel(
        operator_matrix(N, w, "standard", ring("(1+SUS-U^2S)(1+ε)")),
        space_V_sign(N, w, "standard", "+"),
    )


@lru_cache(maxsize=None)
def f_map(N: int, w: int, flavor: Flavor) -> LinearMap:
    """f_A(P) = P|_{1+U-U²S} mod A^-, on A^+"""
    plus = space_V_sign(N, w, flavor, "+")
    op = Fraction(1, 2) * ring("(1+U-U^2S)(1+ε)")
    return _linear_map(plus, plus, operator_matrix(N, w, flavor, op))


def f_kernel(N: int, w: int, flavor: Flavor) -> Subspace:
    return f_map(N, w, flavor).kernel()


def iota(P: EquivariantVector) -> EquivariantVector:
    return act_equiv(P, "U(1+ε)")


def iota_rank(N: int, w: int, flavor: Flavor) -> int:
    """Rank of ι restricted to 𝒲^+, equal to dim 𝒲^+ exactly when ι is injective"""
    domain = space_W(N, w, flavor, "+")
    images = image_subspace(operator_matrix(N, w, flavor, ring("U(1+ε)")), domain)
    return images.dim


def barred_sign_identity(N: int, w: int) -> bool:
    """W̄^± = W^{±(-1)^w} as subspaces of the common ambient space"""
    flip = {"+": "-", "-": "+"}
    return all(
        space_W(N, w, "barred", sign) == space_W(N, w, "standard", sign if w % 2 == 0 else flip[sign])
        for sign in ("+", "-")
    )


@dataclass_json
@dataclass(frozen=True)
class EichlerShimuraReport:
    N: int
    w: int
    dim_W_plus: int
    dim_W_minus: int
    dim_C_plus: int
    dim_C_minus: int
    cusp_dim: int
    known_cusp_dim: Optional[int] = None

    @property
    def k(self) -> int:
        return self.w + 2


def known_cusp_dimension(N: int, k: int):
    if k == 2 and N <= 10:
        return 0
    return constants.KNOWN_CUSP_FORM_DIMENSIONS.get((N, k))


def eichler_shimura_report(N: int, w: int) -> EichlerShimuraReport:
    dims = {
        sign: (space_W(N, w, "standard", sign).dim, space_C(N, w, sign).dim) for sign in ("+", "-")
    }
    inferred = {sign: W - C for sign, (W, C) in dims.items()}
    if inferred["+"] != inferred["-"]:
        raise ConsistencyError(
            f"Eichler-Shimura dimensions disagree at N={N}, w={w}: {inferred['+']} vs {inferred['-']}"
        )
    known = known_cusp_dimension(N, w + 2)
    if known is not None and known != inferred["+"]:
        raise ConsistencyError(f"dim S_{w + 2}(Γ₁({N})) inferred as {inferred['+']}, expected {known}")
    return EichlerShimuraReport(
        N=N,
        w=w,
        dim_W_plus=dims["+"][0],
        dim_W_minus=dims["-"][0],
        dim_C_plus=dims["+"][1],
        dim_C_minus=dims["-"][1],
        cusp_dim=inferred["+"],
        known_cusp_dim=known,
    )
