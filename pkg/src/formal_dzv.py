"""
The formal double zeta space D_{k,N}, presented inside the free space F on the
symbols Z^{r,s}_{a,b}, P^{r,s}_{a,b}, Z^k_c, together with the subspace P^ev,
the maps λ, λ^S, λ^P from barred vectors, and certified span membership.

Nothing is ever computed in the quotient: "x ∈ P^ev ⊂ D" is decided in F
against span(double shuffle vectors ∪ P^ev generators).
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Literal, Optional

from equivariant_poly import EquivariantVector, act_equiv, delta_vector
from exact_linalg import (
    QMatrix,
    RatLike,
    Subspace,
    in_span,
    kernel_basis,
    rref_with_transform,
    subspace_intersect,
    subspace_sum,
    to_rat,
)
from period_spaces import space_V, space_V_minus_sym, to_vectors
from sl2_structure import coset_mul, enumerate_cosets, generator

logger = logging.getLogger(__name__)

SymbolKind = Literal["Z2", "P2", "Z1"]
LambdaVariant = Literal["plain", "S", "P"]
KIND_ORDER = {"Z2": 0, "P2": 1, "Z1": 2}


class ExcludedWeightLevelError(ValueError):
    pass


class InvalidSymbolError(ValueError):
    pass


@dataclass(frozen=True)
class DzvSymbol:
    """Z2/P2 carry indices (r, s, a, b); Z1 carries (k, c)"""

    kind: SymbolKind
    indices: tuple[int, ...]

    @classmethod
    def Z2(cls, r: int, s: int, a: int, b: int, N: int) -> "DzvSymbol":
        return cls._double("Z2", r, s, a, b, N)

    @classmethod
    def P2(cls, r: int, s: int, a: int, b: int, N: int) -> "DzvSymbol":
        return cls._double("P2", r, s, a, b, N)

    @classmethod
    def Z1(cls, k: int, c: int, N: int) -> "DzvSymbol":
        if k < 1:
            raise InvalidSymbolError(f"Z1 needs k >= 1, got {k}")
        return cls("Z1", (k, c % N))

    @classmethod
    def _double(cls, kind: SymbolKind, r: int, s: int, a: int, b: int, N: int) -> "DzvSymbol":
        if r < 1 or s < 1:
            raise InvalidSymbolError(f"{kind} needs r, s >= 1, got ({r},{s})")
        a, b = a % N, b % N
        if math.gcd(a, b, N) != 1:
            raise InvalidSymbolError(f"{kind} needs gcd(a,b,N) = 1, got ({a},{b}) at N={N}")
        return cls(kind, (r, s, a, b))

    @property
    def weight(self) -> int:
        return self.indices[0] if self.kind == "Z1" else self.indices[0] + self.indices[1]

    @property
    def sort_key(self):
        return (KIND_ORDER[self.kind], self.indices)

    def latex(self) -> str:
        if self.kind == "Z1":
            k, c = self.indices
            return f"Z_{{{c}}}^{{{k}}}"
        r, s, a, b = self.indices
        letter = "Z" if self.kind == "Z2" else "P"
        return f"{letter}_{{{a},{b}}}^{{{r},{s}}}"

    def to_json(self) -> dict:
        if self.kind == "Z1":
            k, c = self.indices
            return {"kind": "Z1", "k": k, "c": c}
        r, s, a, b = self.indices
        return {"kind": self.kind, "r": r, "s": s, "a": a, "b": b}


def _check_weight_level(k: int, N: int):
    if k < 2 or N < 1:
        raise ExcludedWeightLevelError(f"Need k >= 2 and N >= 1, got k={k}, N={N}")
    if (k, N) == (2, 1):
        raise ExcludedWeightLevelError("(k, N) = (2, 1) is excluded")


@lru_cache(maxsize=None)
def symbol_index(k: int, N: int) -> tuple[DzvSymbol, ...]:
    _check_weight_level(k, N)
    cosets = enumerate_cosets(N)
    pairs = [(r, k - r) for r in range(1, k)]
    z2 = [DzvSymbol("Z2", (r, s, C.c, C.d)) for r, s in pairs for C in cosets]
    p2 = [DzvSymbol("P2", (r, s, C.c, C.d)) for r, s in pairs for C in cosets]
    z1 = [DzvSymbol("Z1", (k, c)) for c in range(N)]
    return tuple(z2 + p2 + z1)


@lru_cache(maxsize=None)
def symbol_positions(k: int, N: int) -> dict[DzvSymbol, int]:
    return {symbol: i for i, symbol in enumerate(symbol_index(k, N))}


@dataclass(frozen=True)
class FormalVector:
    N: int
    k: int
    terms: tuple[tuple[DzvSymbol, Fraction], ...]

    @classmethod
    def from_terms(cls, N: int, k: int, terms: Iterable[tuple[DzvSymbol, RatLike]]) -> "FormalVector":
        merged: dict[DzvSymbol, Fraction] = {}
        for symbol, coeff in terms:
            if symbol.weight != k:
                raise InvalidSymbolError(f"{symbol} does not have weight {k}")
            merged[symbol] = merged.get(symbol, Fraction(0)) + to_rat(coeff)
        ordered = sorted(((s, c) for s, c in merged.items() if c != 0), key=lambda t: t[0].sort_key)
        return cls(N, k, tuple(ordered))

    @classmethod
    def zero(cls, N: int, k: int) -> "FormalVector":
        return cls(N, k, ())

    @classmethod
    def from_dense(cls, N: int, k: int, vector) -> "FormalVector":
        return cls.from_terms(N, k, zip(symbol_index(k, N), vector))

    def to_dense(self) -> list[Fraction]:
        positions = symbol_positions(self.k, self.N)
        dense = [Fraction(0)] * len(positions)
        for symbol, coeff in self.terms:
            dense[positions[symbol]] = coeff
        return dense

    def coefficient(self, symbol: DzvSymbol) -> Fraction:
        return dict(self.terms).get(symbol, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def kinds(self) -> set[str]:
        return {symbol.kind for symbol, _ in self.terms}

    def _check(self, other: "FormalVector"):
        if (self.N, self.k) != (other.N, other.k):
            raise InvalidSymbolError(f"Cannot combine vectors of (N,k) {(self.N, self.k)} and {(other.N, other.k)}")

    def __add__(self, other: "FormalVector") -> "FormalVector":
        self._check(other)
        return FormalVector.from_terms(self.N, self.k, self.terms + other.terms)

    def __neg__(self) -> "FormalVector":
        return self * -1

    def __sub__(self, other: "FormalVector") -> "FormalVector":
        return self + (-other)

    def __mul__(self, scalar: RatLike) -> "FormalVector":
        scalar = to_rat(scalar)
        return FormalVector.from_terms(self.N, self.k, ((s, scalar * c) for s, c in self.terms))

    __rmul__ = __mul__

    def latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (symbol, coeff) in enumerate(self.terms):
            sign = "-" if coeff < 0 else ("+" if i else "")
            magnitude = abs(coeff)
            if magnitude == 1:
                factor = ""
            elif magnitude.denominator == 1:
                factor = str(magnitude.numerator)
            else:
                factor = f"\\frac{{{magnitude.numerator}}}{{{magnitude.denominator}}}"
            parts.append(f"{sign}{factor}{symbol.latex()}")
        return " ".join(parts)


def stuffle_vector(r: int, s: int, a: int, b: int, N: int) -> FormalVector:
    """P^{r,s}_{a,b} - Z^{r,s}_{a,b} - Z^{s,r}_{b,a} - Z^{r+s}_{a+b}"""
    return FormalVector.from_terms(
        N,
        r + s,
        [
            (DzvSymbol.P2(r, s, a, b, N), 1),
            (DzvSymbol.Z2(r, s, a, b, N), -1),
            (DzvSymbol.Z2(s, r, b, a, N), -1),
            (DzvSymbol.Z1(r + s, a + b, N), -1),
        ],
    )


def shuffle_vector(r: int, s: int, a: int, b: int, N: int) -> FormalVector:
    terms = [(DzvSymbol.P2(r, s, a, b, N), Fraction(1))]
    for j in range(r):
        terms.append((DzvSymbol.Z2(r - j, s + j, a - b, b, N), -math.comb(s - 1 + j, j)))
    for j in range(s):
        terms.append((DzvSymbol.Z2(s - j, r + j, b - a, a, N), -math.comb(r - 1 + j, j)))
    return FormalVector.from_terms(N, r + s, terms)


def _double_indices(k: int, N: int):
    return [symbol.indices for symbol in symbol_index(k, N) if symbol.kind == "P2"]


@lru_cache(maxsize=None)
def dsh_relation_vectors(k: int, N: int) -> tuple[FormalVector, ...]:
    """Stuffle and shuffle vector for every (r, s, a, b), in symbol order"""
    vectors = []
    for r, s, a, b in _double_indices(k, N):
        vectors.append(stuffle_vector(r, s, a, b, N))
        vectors.append(shuffle_vector(r, s, a, b, N))
    return tuple(vectors)


@lru_cache(maxsize=None)
def pev_generators(k: int, N: int) -> tuple[FormalVector, ...]:
    """Sign-symmetrised products and Z^k_c + (-1)^k Z^k_{-c}; zero vectors kept"""
    generators = []
    for r, s, a, b in _double_indices(k, N):
        generators.append(
            FormalVector.from_terms(
                N,
                k,
                [
                    (DzvSymbol.P2(r, s, a, b, N), 1),
                    (DzvSymbol.P2(r, s, -a, b, N), (-1) ** r),
                    (DzvSymbol.P2(r, s, a, -b, N), (-1) ** s),
                    (DzvSymbol.P2(r, s, -a, -b, N), (-1) ** (r + s)),
                ],
            )
        )
    for c in range(N):
        generators.append(
            FormalVector.from_terms(N, k, [(DzvSymbol.Z1(k, c, N), 1), (DzvSymbol.Z1(k, -c, N), (-1) ** k)])
        )
    return tuple(generators)


def lambda_map(P: EquivariantVector, variant: LambdaVariant = "plain") -> FormalVector:
    """λ^•(P) = Σ_C λ^•_C(P(CS)), λ_C(X^r Y^s) = r!s!·Z^{r+1,s+1}_{a,b} and likewise"""
    if P.flavor != "barred":
        raise InvalidSymbolError("λ is defined on barred vectors")
    N, w = P.N, P.w
    k = w + 2
    S = generator("S")
    terms = []
    for C in enumerate_cosets(N):
        value = P.value_at(coset_mul(C, S))
        for r, p in enumerate(value.coeffs):
            if not p:
                continue
            s = w - r
            weight = p * math.factorial(r) * math.factorial(s)
            if variant == "plain":
                symbol = DzvSymbol("Z2", (r + 1, s + 1, C.c, C.d))
            elif variant == "P":
                symbol = DzvSymbol("P2", (r + 1, s + 1, C.c, C.d))
            elif variant == "S":
                symbol = DzvSymbol.Z1(k, C.c + C.d, N)
            else:
                raise ValueError(f"Unknown λ variant {variant!r}")
            terms.append((symbol, weight))
    return FormalVector.from_terms(N, k, terms)


def dsh_as_operators_check(k: int, N: int) -> bool:
    """
    λ^P(Q) - λ(Q|_{1+εS}) - λ^S(Q) and λ^P(Q) - λ(Q|_{(1+εS)T}) equal the
    stuffle and shuffle vectors of (r+1, s+1, a, b) for every δ-vector Q^{r,s}_{a,b}
    """
    _check_weight_level(k, N)
    w = k - 2
    for C in enumerate_cosets(N):
        for r in range(w + 1):
            s = w - r
            Q = delta_vector(N, w, r, s, C.c, C.d)
            product = lambda_map(Q, "P")
            stuffle = product - lambda_map(act_equiv(Q, "1+εS")) - lambda_map(Q, "S")
            shuffle = product - lambda_map(act_equiv(Q, "(1+εS)T"))
            if stuffle != stuffle_vector(r + 1, s + 1, C.c, C.d, N):
                logger.error("Stuffle translation fails at (r,s,a,b)=%s", (r, s, C.c, C.d))
                return False
            if shuffle != shuffle_vector(r + 1, s + 1, C.c, C.d, N):
                logger.error("Shuffle translation fails at (r,s,a,b)=%s", (r, s, C.c, C.d))
                return False
    return True


@dataclass(frozen=True)
class Certificate:
    """Coefficients over FormalSpace.spanning (double shuffle vectors first, then P^ev generators)"""

    N: int
    k: int
    coordinates: tuple[tuple[int, Fraction], ...]

    def reproduce(self) -> FormalVector:
        spanning = formal_space(self.k, self.N).spanning
        total = FormalVector.zero(self.N, self.k)
        for i, coeff in self.coordinates:
            total = total + spanning[i] * coeff
        return total

    def labelled(self) -> list[tuple[str, int, Fraction]]:
        space = formal_space(self.k, self.N)
        dsh_count = len(space.dsh)
        return [
            ("dsh", i, c) if i < dsh_count else ("pev", i - dsh_count, c) for i, c in self.coordinates
        ]


class FormalSpace:
    """
    Presentation of D_{k,N} with P^ev: the reduced spanning matrix and its
    transform are built once so membership queries only read shared state.
    """

    def __init__(self, k: int, N: int):
        _check_weight_level(k, N)
        self.k = k
        self.N = N
        self.symbols = symbol_index(k, N)
        self.dsh = dsh_relation_vectors(k, N)
        self.pev = pev_generators(k, N)
        self.spanning = self.dsh + self.pev
        size = len(self.symbols)
        reduced = rref_with_transform(QMatrix.from_rows([v.to_dense() for v in self.spanning], cols=size))
        self.rank = reduced.rank
        self.span = Subspace(
            size,
            QMatrix.from_rows(reduced.R.to_rows()[: reduced.rank], cols=size),
            reduced.pivot_cols,
        )
        self._transform = QMatrix.from_rows(reduced.E.to_rows()[: reduced.rank], cols=len(self.spanning))
        self.dsh_span = Subspace.from_vectors([v.to_dense() for v in self.dsh], size)
        logger.debug("D_{%d,%d}: %d symbols, span rank %d", k, N, size, self.rank)

    def certify(self, v: FormalVector) -> Optional[Certificate]:
        coordinates = in_span(v.to_dense(), self.span)
        if coordinates is None:
            return None
        combined = (QMatrix.from_rows([coordinates], cols=self.rank) @ self._transform).entries
        return Certificate(self.N, self.k, tuple((i, c) for i, c in enumerate(combined) if c))


@lru_cache(maxsize=None)
def formal_space(k: int, N: int) -> FormalSpace:
    return FormalSpace(k, N)


def in_pev(v: FormalVector) -> Optional[Certificate]:
    """Certificate that v ∈ span(double shuffle vectors ∪ P^ev generators), or None"""
    return formal_space(v.k, v.N).certify(v)


def _z2_coefficients(v: FormalVector) -> Optional[dict]:
    if v.kinds() - {"Z2"}:
        return None
    return {symbol.indices: coeff for symbol, coeff in v.terms}


def oddodd_check(v: FormalVector) -> bool:
    """c^{r,s}_{a,b} = (-1)^{r+1} c^{r,s}_{-a,b} = (-1)^{s+1} c^{r,s}_{a,-b}, Z2 support only"""
    coefficients = _z2_coefficients(v)
    if coefficients is None:
        return False
    N = v.N
    for (r, s, a, b), c in _all_z2(v.k, N, coefficients):
        if c != (-1) ** (r + 1) * coefficients.get((r, s, -a % N, b), 0):
            return False
        if c != (-1) ** (s + 1) * coefficients.get((r, s, a, -b % N), 0):
            return False
    return True


def gkz_symmetric_check(v: FormalVector) -> bool:
    """c^{r,s}_{a,b} = c^{s,r}_{b,a} = (-1)^r c^{r,s}_{-a,b} = (-1)^s c^{r,s}_{a,-b}, Z2 support only"""
    coefficients = _z2_coefficients(v)
    if coefficients is None:
        return False
    N = v.N
    for (r, s, a, b), c in _all_z2(v.k, N, coefficients):
        if c != coefficients.get((s, r, b, a), 0):
            return False
        if c != (-1) ** r * coefficients.get((r, s, -a % N, b), 0):
            return False
        if c != (-1) ** s * coefficients.get((r, s, a, -b % N), 0):
            return False
    return True


def _all_z2(k: int, N: int, coefficients: dict):
    for symbol in symbol_index(k, N):
        if symbol.kind == "Z2":
            yield symbol.indices, coefficients.get(symbol.indices, Fraction(0))


def oddodd_type_symbols(k: int, N: int) -> list[FormalVector]:
    """¼ Σ_{ρ,σ=±1} ρ^{r+1} σ^{s+1} Z^{r,s}_{ρa,σb} over 0 ≤ a, b ≤ N/2 with the parity side conditions"""
    _check_weight_level(k, N)
    vectors = []
    for r in range(1, k):
        s = k - r
        for a in range(N // 2 + 1):
            for b in range(N // 2 + 1):
                if math.gcd(a, b, N) != 1:
                    continue
                if (2 * a) % N == 0 and r % 2 == 0:
                    continue
                if (2 * b) % N == 0 and s % 2 == 0:
                    continue
                terms = [
                    (DzvSymbol.Z2(r, s, rho * a, sigma * b, N), Fraction(rho ** (r + 1) * sigma ** (s + 1), 4))
                    for rho in (1, -1)
                    for sigma in (1, -1)
                ]
                vectors.append(FormalVector.from_terms(N, k, terms))
    return vectors


@lru_cache(maxsize=None)
def oddodd_subspace(k: int, N: int) -> Subspace:
    """All odd-odd symmetric Z2-supported vectors, as a subspace of F"""
    positions = symbol_positions(k, N)
    size = len(positions)
    constraints = []
    for symbol in symbol_index(k, N):
        if symbol.kind != "Z2":
            row = [0] * size
            row[positions[symbol]] = 1
            constraints.append(row)
            continue
        r, s, a, b = symbol.indices
        for twin, sign in (
            (DzvSymbol("Z2", (r, s, -a % N, b)), (-1) ** (r + 1)),
            (DzvSymbol("Z2", (r, s, a, -b % N)), (-1) ** (s + 1)),
        ):
            row = [0] * size
            row[positions[symbol]] += 1
            row[positions[twin]] -= sign
            constraints.append(row)
    return kernel_basis(QMatrix.from_rows(constraints, cols=size))


def pev_span_identity_check(k: int, N: int) -> bool:
    """span(dsh ∪ P^ev) = span(dsh ∪ λ(V̄^{-,sym}) ∪ λ^S(V̄))"""
    _check_weight_level(k, N)
    w = k - 2
    space = formal_space(k, N)
    size = len(space.symbols)
    lambda_images = [lambda_map(u).to_dense() for u in to_vectors(space_V_minus_sym(N, w), N, w, "barred")]
    lambda_images += [lambda_map(u, "S").to_dense() for u in to_vectors(space_V(N, w, "barred"), N, w, "barred")]
    other = subspace_sum(space.dsh_span, Subspace.from_vectors(lambda_images, size))
    return other == space.span


def oddodd_in_pev(k: int, N: int) -> Subspace:
    """Odd-odd symmetric Z2 combinations lying in span(dsh ∪ P^ev)"""
    return subspace_intersect(oddodd_subspace(k, N), formal_space(k, N).span)
