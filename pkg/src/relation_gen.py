"""
From a basis of W̄_w^{Γ₁(N),+} to certified relations among colored double
zeta values: for each basis vector P put Q = P|_U and Q^± = ½Q|_{1±ε}; then
3λ(Q^+) + λ(Q^-) + λ^S(Q) lies in span(double shuffle ∪ P^ev).
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional

from equivariant_poly import (
    EquivariantVector,
    act_equiv,
    act_poly,
    delta_coordinates,
    delta_vector,
)
from exact_linalg import QMatrix, Subspace, in_span, rref
from formal_dzv import (
    Certificate,
    FormalVector,
    in_pev,
    lambda_map,
    oddodd_in_pev,
    symbol_index,
)
from period_spaces import space_V_minus_sym, space_W, to_vectors
from sl2_structure import Coset, enumerate_cosets, generator

logger = logging.getLogger(__name__)

QKey = tuple[int, int, int, int]


class NotAPeriodPolynomialError(ValueError):
    pass


class CertificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class QCoefficients:
    """q, q_od, q_ev keyed by (r, s, a, b) with r + s = k, r, s >= 1"""

    N: int
    k: int
    q: dict[QKey, Fraction] = field(default_factory=dict)
    q_od: dict[QKey, Fraction] = field(default_factory=dict)
    q_ev: dict[QKey, Fraction] = field(default_factory=dict)


def _shift(coordinates: dict[QKey, Fraction]) -> dict[QKey, Fraction]:
    return {(r + 1, s + 1, a, b): c for (r, s, a, b), c in coordinates.items()}


def q_by_substitution(P: EquivariantVector) -> dict[QKey, Fraction]:
    """P(C_{a,-a+b})(X-Y, X) = Σ q^{r+1,s+1}_{a,b} X^r Y^s/(r!s!)"""
    U = generator("U")
    q = {}
    for C in enumerate_cosets(P.N):
        expanded = act_poly(P.value_at(Coset.of(P.N, C.c, C.d - C.c)), U)
        for r, p in enumerate(expanded.coeffs):
            s = P.w - r
            q[(r + 1, s + 1, C.c, C.d)] = p * math.factorial(r) * math.factorial(s)
    return q


def q_by_operator(P: EquivariantVector) -> dict[QKey, Fraction]:
    """Coordinates of P|_U in the δ-vector basis"""
    return _shift(delta_coordinates(act_equiv(P, "U")))


def _from_q(N: int, w: int, q: dict[QKey, Fraction]) -> EquivariantVector:
    total = EquivariantVector.zero(N, w, "barred")
    for (r, s, a, b), c in q.items():
        if c:
            total = total + delta_vector(N, w, r - 1, s - 1, a, b) * c
    return total


def split_even_odd(qc: QCoefficients) -> tuple[dict[QKey, Fraction], dict[QKey, Fraction]]:
    """δ-coordinates of Q^+ = ½Q|_{1+ε} and Q^- = ½Q|_{1-ε}, Q = Σ q Q^{r,s}_{a,b}"""
    Q = _from_q(qc.N, qc.k - 2, qc.q)
    plus = act_equiv(Q, "1+ε") * Fraction(1, 2)
    minus = act_equiv(Q, "1-ε") * Fraction(1, 2)
    return _shift(delta_coordinates(plus)), _shift(delta_coordinates(minus))


def coefficients_from_polynomial(P: EquivariantVector) -> QCoefficients:
    if P.flavor != "barred":
        raise NotAPeriodPolynomialError("Expected a barred vector")
    if in_span(P.to_flat(), space_W(P.N, P.w, "barred", "+")) is None:
        raise NotAPeriodPolynomialError(f"Vector is not in W̄^+ at N={P.N}, w={P.w}")
    q = q_by_substitution(P)
    if q != q_by_operator(P):
        raise CertificationError("Substitution and δ-coordinate routes disagree")
    partial = QCoefficients(P.N, P.w + 2, q)
    q_od, q_ev = split_even_odd(partial)
    return QCoefficients(P.N, P.w + 2, q, q_od, q_ev)


def q_symmetry_check(qc: QCoefficients) -> bool:
    N = qc.N
    for (r, s, a, b), c in qc.q_od.items():
        if c != (-1) ** (r + 1) * qc.q_od[(r, s, -a % N, b)]:
            return False
        if c != (-1) ** (s + 1) * qc.q_od[(r, s, a, -b % N)]:
            return False
    for (r, s, a, b), c in qc.q_ev.items():
        if c != (-1) ** r * qc.q_ev[(r, s, -a % N, b)]:
            return False
        if c != (-1) ** s * qc.q_ev[(r, s, a, -b % N)]:
            return False
        if c != qc.q_ev[(s, r, b, a)]:
            return False
    return all(qc.q_od[key] + qc.q_ev[key] == value for key, value in qc.q.items())


def normalize_relation(v: FormalVector) -> tuple[FormalVector, Fraction]:
    """Coprime integer coefficients with the first nonzero Z2 coefficient positive; returns (vector, scale)"""
    if v.is_zero():
        return v, Fraction(1)
    denominator = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for _, c in v.terms), 1)
    numerators = [int(c * denominator) for _, c in v.terms]
    scale = Fraction(denominator, reduce(math.gcd, (abs(n) for n in numerators)))
    leading = next((c for symbol, c in v.terms if symbol.kind == "Z2"), v.terms[0][1])
    if leading < 0:
        scale = -scale
    return v * scale, scale


@dataclass(frozen=True)
class Relation:
    source_index: int
    vector: FormalVector
    # λ(Q^+), λ(Q^-), λ^S(Q) before normalisation; vector = scale·(3·odd + even + single)
    odd_part: FormalVector
    even_part: FormalVector
    single_part: FormalVector
    scale: Fraction
    coefficients: QCoefficients
    certificate: Optional[Certificate] = None
    # certificate of odd_part alone; its P^ev coordinates predict Φ(odd_part)/(2πi)^k exactly
    odd_certificate: Optional[Certificate] = None


def theorem_identity_check(P: EquivariantVector) -> bool:
    """Q|_{εS-1} = P and Q^- ∈ V^{-,sym} for Q = P|_U"""
    Q = act_equiv(P, "U")
    if act_equiv(Q, "εS-1") != P:
        return False
    minus = act_equiv(Q, "1-ε") * Fraction(1, 2)
    return in_span(minus.to_flat(), space_V_minus_sym(P.N, P.w)) is not None


def relation_from_polynomial(P: EquivariantVector, source_index: int = 0) -> Relation:
    qc = coefficients_from_polynomial(P)
    if not theorem_identity_check(P):
        raise CertificationError(f"Operator identities fail for basis vector {source_index}")
    Q = act_equiv(P, "U")
    plus = act_equiv(Q, "1+ε") * Fraction(1, 2)
    minus = act_equiv(Q, "1-ε") * Fraction(1, 2)
    odd_part = lambda_map(plus)
    even_part = lambda_map(minus)
    single_part = lambda_map(Q, "S")
    vector, scale = normalize_relation(odd_part * 3 + even_part + single_part)
    certificate = in_pev(vector)
    if certificate is None:
        raise CertificationError(f"Relation from basis vector {source_index} is not in span(dsh ∪ P^ev)")
    if certificate.reproduce() != vector:
        raise CertificationError(f"Certificate for basis vector {source_index} does not reproduce the relation")
    odd_certificate = in_pev(odd_part)
    if odd_certificate is None:
        raise CertificationError(f"Odd part of basis vector {source_index} is not in span(dsh ∪ P^ev)")
    return Relation(source_index, vector, odd_part, even_part, single_part, scale, qc, certificate, odd_certificate)


def generate_relations(N: int, k: int) -> list[Relation]:
    # validates (k, N)
    symbol_index(k, N)
    w = k - 2
    basis = to_vectors(space_W(N, w, "barred", "+"), N, w, "barred")
    logger.info("dim W̄^+ = %d at N=%d, k=%d", len(basis), N, k)
    return [relation_from_polynomial(P, i) for i, P in enumerate(basis)]


def level_one_relations(k: int) -> list[dict[tuple[int, int], Fraction]]:
    """Classical q^{r,s} tables at level 1, checked for q^{r,s} = q^{s,r} with r, s even"""
    tables = []
    for relation in generate_relations(1, k):
        table = {(r, s): c for (r, s, _, _), c in relation.coefficients.q.items()}
        for (r, s), c in table.items():
            if r % 2 == 0 and s % 2 == 0 and c != table[(s, r)]:
                raise CertificationError(f"q^{{{r},{s}}} != q^{{{s},{r}}} at level 1, k={k}")
        tables.append(table)
    return tables


def converse_rank_check(N: int, k: int) -> bool:
    """Odd-odd symmetric Z2 combinations in span(dsh ∪ P^ev) are exactly the spans of the odd parts"""
    relations = generate_relations(N, k)
    found = oddodd_in_pev(k, N)
    size = found.ambient_dim
    generated = Subspace.from_vectors([r.odd_part.to_dense() for r in relations], size)
    if generated.dim != len(relations):
        logger.error("Odd parts are linearly dependent at N=%d, k=%d", N, k)
        return False
    return found == generated


def odd_coefficient_rank(relations: list[Relation]) -> int:
    if not relations:
        return 0
    rows = [r.odd_part.to_dense() for r in relations]
    return rref(QMatrix.from_rows(rows)).rank
