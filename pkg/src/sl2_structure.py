"""
Integer 2x2 matrices of determinant ±1, the named generators ε, J, S, U, T,
the group ring over Q, and the coset space Γ₁(N)\\SL(2,Z) ≃ A(N).
"""
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Literal, Union

from dataclasses_json import dataclass_json

Flavor = Literal["standard", "barred"]
FLAVORS: tuple[Flavor, ...] = ("standard", "barred")


class DeterminantError(ValueError):
    pass


class UnknownGeneratorError(KeyError):
    pass


class InvalidCosetError(ValueError):
    pass


class WordSyntaxError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class GL2Elt:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.det not in (1, -1):
            raise DeterminantError(f"{self} has determinant {self.det}, expected ±1")

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __mul__(self, other: "GL2Elt") -> "GL2Elt":
        return GL2Elt(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int) -> "GL2Elt":
        base = self if n >= 0 else self.inv()
        result = IDENTITY
        for _ in range(abs(n)):
            result = result * base
        return result

    def inv(self) -> "GL2Elt":
        # adjugate over a unit determinant stays integral
        det = self.det
        return GL2Elt(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def __str__(self):
        return f"({self.a},{self.b};{self.c},{self.d})"


IDENTITY = GL2Elt(1, 0, 0, 1)

GENERATORS = {
    "ε": GL2Elt(-1, 0, 0, 1),
    "J": GL2Elt(-1, 0, 0, -1),
    "S": GL2Elt(0, -1, 1, 0),
    "U": GL2Elt(1, -1, 1, 0),
    "T": GL2Elt(1, 1, 0, 1),
}
GENERATOR_ALIASES = {"eps": "ε"}


def generator(name: str) -> GL2Elt:
    name = GENERATOR_ALIASES.get(name, name)
    try:
        return GENERATORS[name]
    except KeyError:
        raise UnknownGeneratorError(name) from None


def mul(g: GL2Elt, h: GL2Elt) -> GL2Elt:
    return g * h


def inv(g: GL2Elt) -> GL2Elt:
    return g.inv()


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<gen>ε|eps|J|S|U|T)(?:\^\{?(?P<exp>-?\d+)\}?)?"
    r"|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<op>[()+\-*·])"
    r")"
)


def _tokenize(text: str) -> list[tuple[str, object]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            raise WordSyntaxError(f"Cannot parse {text!r} at position {pos}")
        pos = match.end()
        if match.group("gen"):
            exponent = int(match.group("exp")) if match.group("exp") else 1
            tokens.append(("gen", generator(match.group("gen")) ** exponent))
        elif match.group("num"):
            tokens.append(("num", Fraction(match.group("num"))))
        elif match.group("op") in ("*", "·"):
            continue
        else:
            tokens.append(("op", match.group("op")))
    return tokens


def expand_word(word: str) -> GL2Elt:
    """Multiplies out a word such as "US^{-1}"; "1" and "" are the identity"""
    result = IDENTITY
    for kind, value in _tokenize(word):
        if kind == "gen":
            result = result * value
        elif kind == "num" and value == 1:
            continue
        else:
            raise WordSyntaxError(f"{word!r} is not a plain word in the generators")
    return result


@dataclass(frozen=True)
class GroupRingElt:
    """A finite Q-linear combination of matrices, one term per matrix"""

    terms: tuple[tuple[GL2Elt, Fraction], ...]

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[GL2Elt, Union[int, Fraction]]]) -> "GroupRingElt":
        merged: dict[GL2Elt, Fraction] = {}
        for g, coeff in terms:
            merged[g] = merged.get(g, Fraction(0)) + Fraction(coeff)
        return cls(tuple(sorted((g, c) for g, c in merged.items() if c != 0)))

    @classmethod
    def of(cls, g: GL2Elt, coeff: Union[int, Fraction] = 1) -> "GroupRingElt":
        return cls.from_terms([(g, coeff)])

    def __add__(self, other: "GroupRingElt") -> "GroupRingElt":
        return GroupRingElt.from_terms(self.terms + other.terms)

    def __neg__(self) -> "GroupRingElt":
        return GroupRingElt.from_terms((g, -c) for g, c in self.terms)

    def __sub__(self, other: "GroupRingElt") -> "GroupRingElt":
        return self + (-other)

    def __mul__(self, other) -> "GroupRingElt":
        if isinstance(other, GroupRingElt):
            return GroupRingElt.from_terms(
                (g * h, c * d) for g, c in self.terms for h, d in other.terms
            )
        return GroupRingElt.from_terms((g, c * Fraction(other)) for g, c in self.terms)

    def __rmul__(self, scalar) -> "GroupRingElt":
        return GroupRingElt.from_terms((g, Fraction(scalar) * c) for g, c in self.terms)


class _RingParser:
    """
    expr   := term (('+'|'-') term)*
    term   := [number] factor*
    factor := '(' expr ')' | generator['^'n]
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def parse(self) -> GroupRingElt:
        result = self.expr()
        if self.pos != len(self.tokens):
            raise WordSyntaxError(f"Unexpected trailing input in {self.text!r}")
        return result

    def expr(self) -> GroupRingElt:
        sign = 1
        if self.peek() in (("op", "-"), ("op", "+")):
            sign = -1 if self.peek()[1] == "-" else 1
            self.pos += 1
        result = sign * self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.peek()[1] == "-" else 1
            self.pos += 1
            result = result + sign * self.term()
        return result

    def term(self) -> GroupRingElt:
        result = GroupRingElt.of(IDENTITY)
        consumed = False
        if self.peek()[0] == "num":
            result = self.peek()[1] * result
            self.pos += 1
            consumed = True
        while True:
            kind, value = self.peek()
            if kind == "gen":
                result = result * GroupRingElt.of(value)
                self.pos += 1
            elif (kind, value) == ("op", "("):
                self.pos += 1
                inner = self.expr()
                if self.peek() != ("op", ")"):
                    raise WordSyntaxError(f"Unbalanced parentheses in {self.text!r}")
                self.pos += 1
                result = result * inner
            else:
                break
            consumed = True
        if not consumed:
            raise WordSyntaxError(f"Empty term in {self.text!r}")
        return result


@lru_cache(maxsize=None)
def parse_group_ring(text: str) -> GroupRingElt:
    """Parses operators such as "1+SU^2S-SU" or "(1+εS)(1-T)"."""
    return _RingParser(text).parse()


ring = parse_group_ring


@dataclass_json
@dataclass(frozen=True, order=True)
class Coset:
    N: int
    c: int
    d: int

    def __post_init__(self):
        if self.N < 1:
            raise InvalidCosetError(f"Level must be positive, got {self.N}")
        if not (0 <= self.c < self.N and 0 <= self.d < self.N):
            raise InvalidCosetError(f"({self.c},{self.d}) is not reduced mod {self.N}")
        if math.gcd(self.c, self.d, self.N) != 1:
            raise InvalidCosetError(f"gcd({self.c},{self.d},{self.N}) != 1")

    @classmethod
    def of(cls, N: int, c: int, d: int) -> "Coset":
        return cls(N, c % N, d % N)

    @property
    def key(self) -> str:
        return f"{self.c},{self.d}"


@lru_cache(maxsize=None)
def enumerate_cosets(N: int) -> tuple[Coset, ...]:
    if N < 1:
        raise InvalidCosetError(f"Level must be positive, got {N}")
    return tuple(Coset(N, c, d) for c in range(N) for d in range(N) if math.gcd(c, d, N) == 1)


@lru_cache(maxsize=None)
def coset_index(N: int) -> dict[Coset, int]:
    return {C: i for i, C in enumerate(enumerate_cosets(N))}


def gamma1_index(N: int) -> int:
    """[SL(2,Z) : Γ₁(N)]"""
    return len(enumerate_cosets(N))


def coset_mul(C: Coset, g: GL2Elt) -> Coset:
    """Right multiplication of the bottom row (c,d) by g"""
    if g.det != 1:
        raise DeterminantError(f"{g} has determinant -1, use coset_eps for ε")
    return Coset.of(C.N, C.c * g.a + C.d * g.c, C.c * g.b + C.d * g.d)


def coset_eps(C: Coset, twist: Flavor) -> Coset:
    if twist == "standard":
        return Coset.of(C.N, -C.c, C.d)
    if twist == "barred":
        return Coset.of(C.N, C.c, -C.d)
    raise ValueError(f"Unknown twist {twist!r}")
