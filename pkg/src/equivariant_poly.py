"""
Homogeneous polynomials V_w, maps from Γ₁(N)\\SL(2,Z) to V_w, their
right PGL(2,Z)-actions (standard and barred ε) and the duality pairings.

Flattened coordinates of an EquivariantVector: coset position·(w+1) + r,
where r is the X-exponent of X^r Y^(w-r).
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from exact_linalg import QMatrix, RatLike, format_rat, to_rat
from sl2_structure import (
    Coset,
    Flavor,
    GL2Elt,
    GroupRingElt,
    coset_eps,
    coset_index,
    coset_mul,
    enumerate_cosets,
    gamma1_index,
    generator,
    parse_group_ring,
)


class DegreeMismatchError(ValueError):
    pass


class FlavorMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class HomogPoly:
    w: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.w + 1:
            raise DegreeMismatchError(f"Degree {self.w} needs {self.w + 1} coefficients, got {len(self.coeffs)}")
        object.__setattr__(self, "coeffs", tuple(to_rat(c) for c in self.coeffs))

    @classmethod
    def zero(cls, w: int) -> "HomogPoly":
        return cls(w, (Fraction(0),) * (w + 1))

    @classmethod
    def monomial(cls, w: int, r: int, coeff: RatLike = 1) -> "HomogPoly":
        """coeff·X^r Y^(w-r)"""
        coeffs = [Fraction(0)] * (w + 1)
        coeffs[r] = to_rat(coeff)
        return cls(w, tuple(coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "HomogPoly"):
        if self.w != other.w:
            raise DegreeMismatchError(f"Degrees {self.w} and {other.w} differ")

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        self._check(other)
        return HomogPoly(self.w, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "HomogPoly") -> "HomogPoly":
        self._check(other)
        return HomogPoly(self.w, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __mul__(self, scalar: RatLike) -> "HomogPoly":
        scalar = to_rat(scalar)
        return HomogPoly(self.w, tuple(scalar * x for x in self.coeffs))

    __rmul__ = __mul__

    def to_json(self) -> list[str]:
        return [format_rat(c) for c in self.coeffs]


def _binomial_row(r: int, p: int, q: int) -> list[int]:
    """Coefficients of (pX + qY)^r indexed by the X-exponent"""
    return [math.comb(r, i) * p**i * q ** (r - i) for i in range(r + 1)]


@lru_cache(maxsize=None)
def substitution_matrix(g: GL2Elt, w: int) -> tuple[tuple[int, ...], ...]:
    """Row r holds X^r Y^(w-r) evaluated at (aX+bY, cX+dY)"""
    rows = []
    for r in range(w + 1):
        first = _binomial_row(r, g.a, g.b)
        second = _binomial_row(w - r, g.c, g.d)
        row = [0] * (w + 1)
        for i, x in enumerate(first):
            if x:
                for j, y in enumerate(second):
                    row[i + j] += x * y
        rows.append(tuple(row))
    return tuple(rows)


def act_poly(P: HomogPoly, g: GL2Elt) -> HomogPoly:
    """P|_g (X, Y) = P(aX + bY, cX + dY)"""
    matrix = substitution_matrix(g, P.w)
    result = [Fraction(0)] * (P.w + 1)
    for r, p in enumerate(P.coeffs):
        if p:
            for i, x in enumerate(matrix[r]):
                if x:
                    result[i] += p * x
    return HomogPoly(P.w, tuple(result))


@dataclass(frozen=True)
class EquivariantVector:
    N: int
    w: int
    flavor: Flavor
    values: tuple[HomogPoly, ...]

    def __post_init__(self):
        if len(self.values) != len(enumerate_cosets(self.N)):
            raise DegreeMismatchError(f"Level {self.N} needs one polynomial per coset")
        if any(P.w != self.w for P in self.values):
            raise DegreeMismatchError(f"Every value must have degree {self.w}")

    @property
    def ambient_dim(self) -> int:
        return len(self.values) * (self.w + 1)

    @classmethod
    def zero(cls, N: int, w: int, flavor: Flavor) -> "EquivariantVector":
        return cls(N, w, flavor, (HomogPoly.zero(w),) * len(enumerate_cosets(N)))

    @classmethod
    def from_map(cls, N: int, w: int, flavor: Flavor, values: dict[Coset, HomogPoly]) -> "EquivariantVector":
        return cls(N, w, flavor, tuple(values.get(C, HomogPoly.zero(w)) for C in enumerate_cosets(N)))

    @classmethod
    def from_flat(cls, N: int, w: int, flavor: Flavor, vector: Sequence[RatLike]) -> "EquivariantVector":
        size = w + 1
        count = len(enumerate_cosets(N))
        if len(vector) != count * size:
            raise DegreeMismatchError(f"Flat vector of length {len(vector)}, expected {count * size}")
        return cls(N, w, flavor, tuple(HomogPoly(w, tuple(vector[i * size : (i + 1) * size])) for i in range(count)))

    def to_flat(self) -> tuple[Fraction, ...]:
        return tuple(c for P in self.values for c in P.coeffs)

    def value_at(self, C: Coset) -> HomogPoly:
        return self.values[coset_index(self.N)[C]]

    def is_zero(self) -> bool:
        return all(P.is_zero() for P in self.values)

    def _check(self, other: "EquivariantVector"):
        if (self.N, self.w) != (other.N, other.w):
            raise DegreeMismatchError(f"Shapes {(self.N, self.w)} and {(other.N, other.w)} differ")
        if self.flavor != other.flavor:
            raise FlavorMismatchError(f"Cannot combine {self.flavor} and {other.flavor} vectors")

    def __add__(self, other: "EquivariantVector") -> "EquivariantVector":
        self._check(other)
        return EquivariantVector(self.N, self.w, self.flavor, tuple(p + q for p, q in zip(self.values, other.values)))

    def __sub__(self, other: "EquivariantVector") -> "EquivariantVector":
        self._check(other)
        return EquivariantVector(self.N, self.w, self.flavor, tuple(p - q for p, q in zip(self.values, other.values)))

    def __mul__(self, scalar: RatLike) -> "EquivariantVector":
        return EquivariantVector(self.N, self.w, self.flavor, tuple(P * scalar for P in self.values))

    __rmul__ = __mul__

    def to_json(self) -> dict[str, list[str]]:
        return {C.key: P.to_json() for C, P in zip(enumerate_cosets(self.N), self.values)}


EPS = generator("ε")


def _act_element(P: EquivariantVector, g: GL2Elt) -> dict[Coset, HomogPoly]:
    cosets = enumerate_cosets(P.N)
    result: dict[Coset, HomogPoly] = {}
    for D, value in zip(cosets, P.values):
        if value.is_zero():
            continue
        if g.det == 1:
            # P|_g(C) = P(C g^-1)|_g, so the value at D moves to D·g
            target = coset_mul(D, g)
        else:
            # g = ε·(εg)
            target = coset_mul(coset_eps(D, P.flavor), EPS * g)
        result[target] = act_poly(value, g)
    return result


def act_equiv(P: EquivariantVector, op: Union[str, GL2Elt, GroupRingElt]) -> EquivariantVector:
    if isinstance(op, str):
        op = parse_group_ring(op)
    if isinstance(op, GL2Elt):
        op = GroupRingElt.of(op)
    accumulated: dict[Coset, HomogPoly] = {}
    for g, coeff in op.terms:
        for C, value in _act_element(P, g).items():
            scaled = value * coeff
            accumulated[C] = accumulated[C] + scaled if C in accumulated else scaled
    return EquivariantVector.from_map(P.N, P.w, P.flavor, accumulated)


@lru_cache(maxsize=None)
def operator_matrix(N: int, w: int, flavor: Flavor, op: GroupRingElt) -> QMatrix:
    """Matrix M with M·P.to_flat() == act_equiv(P, op).to_flat()"""
    size = w + 1
    index = coset_index(N)
    dim = len(index) * size
    columns = [[Fraction(0)] * dim for _ in range(dim)]
    for g, coeff in op.terms:
        matrix = substitution_matrix(g, w)
        for D, pos in index.items():
            if g.det == 1:
                target = coset_mul(D, g)
            else:
                target = coset_mul(coset_eps(D, flavor), EPS * g)
            offset = index[target] * size
            for r in range(size):
                column = columns[pos * size + r]
                for i, x in enumerate(matrix[r]):
                    if x:
                        column[offset + i] += coeff * x
    return QMatrix.from_columns(columns, rows=dim)


def j_symmetrize(P: EquivariantVector) -> EquivariantVector:
    """½(P + P|_J), the projection onto the J-invariant part"""
    return (P + act_equiv(P, "J")) * Fraction(1, 2)


def delta_vector(N: int, w: int, r: int, s: int, a: int, b: int) -> EquivariantVector:
    """Q^{r,s}_{a,b}: X^r Y^s/(r!s!) at the coset C_{a,b}·S, zero elsewhere"""
    if r + s != w or r < 0 or s < 0:
        raise DegreeMismatchError(f"Exponents ({r},{s}) do not have degree {w}")
    support = coset_mul(Coset.of(N, a, b), generator("S"))
    value = HomogPoly.monomial(w, r, Fraction(1, math.factorial(r) * math.factorial(s)))
    return EquivariantVector.from_map(N, w, "barred", {support: value})


def delta_coordinates(P: EquivariantVector) -> dict[tuple[int, int, int, int], Fraction]:
    """Coordinates of a barred vector in the δ-vector basis, keyed by (r, s, a, b)"""
    if P.flavor != "barred":
        raise FlavorMismatchError("δ-vectors live in the barred space")
    S = generator("S")
    coordinates = {}
    for C in enumerate_cosets(P.N):
        value = P.value_at(coset_mul(C, S))
        for r, p in enumerate(value.coeffs):
            s = P.w - r
            coordinates[(r, s, C.c, C.d)] = p * math.factorial(r) * math.factorial(s)
    return coordinates


def pairing_V(P: HomogPoly, Q: HomogPoly) -> Fraction:
    if P.w != Q.w:
        raise DegreeMismatchError(f"Degrees {P.w} and {Q.w} differ")
    w = P.w
    return sum(
        (Fraction((-1) ** (w - r), math.comb(w, r)) * P.coeffs[r] * Q.coeffs[w - r] for r in range(w + 1)),
        Fraction(0),
    )


def pairing_Gamma(P: EquivariantVector, Q: EquivariantVector) -> Fraction:
    """⟨⟨P, Q⟩⟩ between a standard P and a barred Q"""
    if P.flavor != "standard" or Q.flavor != "barred":
        raise FlavorMismatchError("The pairing takes a standard vector and a barred vector")
    if (P.N, P.w) != (Q.N, Q.w):
        raise DegreeMismatchError(f"Shapes {(P.N, P.w)} and {(Q.N, Q.w)} differ")
    total = sum((pairing_V(p, q) for p, q in zip(P.values, Q.values)), Fraction(0))
    return total / gamma1_index(P.N)
