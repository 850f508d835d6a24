"""
Multiprecision values of colored single and double zeta values at N-th roots
of unity, their shuffle regularisation in T, the realisation map Φ_{k,N} on
the formal double zeta space and numeric checks of generated relations.

Every public function computes inside mpmath.workprec(prec + GUARD_BITS);
MPComplex and RegValue arithmetic rounds at whatever precision is current.
"""
import asyncio
import concurrent.futures
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union

import mpmath
from tqdm import tqdm

import cache
import constants
from exact_linalg import rational_reconstruct
from formal_dzv import (
    Certificate,
    DzvSymbol,
    FormalVector,
    dsh_relation_vectors,
    pev_generators,
    shuffle_vector,
    stuffle_vector,
    symbol_index,
)
from relation_gen import Relation
from utils import gather_unlimited_concurrency

logger = logging.getLogger(__name__)


class DivergentValueError(ValueError):
    pass


class TDegreeOverflowError(ArithmeticError):
    pass


class ConvergenceError(RuntimeError):
    pass


Scalar = Union[int, Fraction, mpmath.mpf, mpmath.mpc]


def _to_mp(x: Scalar):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return mpmath.mpf(x)
    return x


@dataclass(frozen=True)
class MPComplex:
    value: mpmath.mpc
    err: mpmath.mpf

    @classmethod
    def exact(cls, value: Scalar) -> "MPComplex":
        return cls(mpmath.mpc(_to_mp(value)), mpmath.mpf(0))

    @classmethod
    def zero(cls) -> "MPComplex":
        return cls.exact(0)

    @property
    def real(self) -> mpmath.mpf:
        return self.value.real

    @property
    def imag(self) -> mpmath.mpf:
        return self.value.imag

    def __abs__(self) -> mpmath.mpf:
        return abs(self.value)

    def __add__(self, other: "MPComplex") -> "MPComplex":
        return MPComplex(self.value + other.value, self.err + other.err)

    def __neg__(self) -> "MPComplex":
        return MPComplex(-self.value, self.err)

    def __sub__(self, other: "MPComplex") -> "MPComplex":
        return MPComplex(self.value - other.value, self.err + other.err)

    def __mul__(self, other: Union["MPComplex", Scalar]) -> "MPComplex":
        if isinstance(other, MPComplex):
            return MPComplex(
                self.value * other.value,
                abs(self.value) * other.err + abs(other.value) * self.err + self.err * other.err,
            )
        scalar = _to_mp(other)
        return MPComplex(self.value * scalar, self.err * abs(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Scalar) -> "MPComplex":
        scalar = _to_mp(scalar)
        return MPComplex(self.value / scalar, self.err / abs(scalar))

    def conjugate(self) -> "MPComplex":
        return MPComplex(mpmath.conj(self.value), self.err)

    def is_exact_zero(self) -> bool:
        return self.value == 0 and self.err == 0


@dataclass(frozen=True)
class RegValue:
    """c0 + c1·T"""

    c0: MPComplex
    c1: MPComplex

    @classmethod
    def constant(cls, value: MPComplex) -> "RegValue":
        return cls(value, MPComplex.zero())

    @classmethod
    def zero(cls) -> "RegValue":
        return cls(MPComplex.zero(), MPComplex.zero())

    @classmethod
    def T(cls) -> "RegValue":
        return cls(MPComplex.zero(), MPComplex.exact(1))

    def __add__(self, other: "RegValue") -> "RegValue":
        return RegValue(self.c0 + other.c0, self.c1 + other.c1)

    def __neg__(self) -> "RegValue":
        return RegValue(-self.c0, -self.c1)

    def __sub__(self, other: "RegValue") -> "RegValue":
        return RegValue(self.c0 - other.c0, self.c1 - other.c1)

    def __mul__(self, other: Union["RegValue", Scalar]) -> "RegValue":
        if isinstance(other, RegValue):
            if not self.c1.is_exact_zero() and not other.c1.is_exact_zero():
                raise TDegreeOverflowError("Product of two T-dependent values has a T² term")
            return RegValue(self.c0 * other.c0, self.c0 * other.c1 + self.c1 * other.c0)
        return RegValue(self.c0 * other, self.c1 * other)

    __rmul__ = __mul__


@dataclass(frozen=True)
class BernoulliPoly:
    """B_k(x) = Σ coeffs[m] x^m"""

    k: int
    coeffs: tuple[Fraction, ...]

    def __call__(self, x: Union[int, Fraction]) -> Fraction:
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * x + c
        return result


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """B_0..B_n via Akiyama–Tanigawa, with B_1 = -1/2"""
    if n < 0:
        raise ValueError("n must be >= 0")
    A = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        A[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            A[j - 1] = j * (A[j - 1] - A[j])
        out.append(A[0])
    if n >= 1:
        out[1] = -out[1]
    return tuple(out)


@lru_cache(maxsize=None)
def bernoulli_polynomial(k: int) -> BernoulliPoly:
    B = bernoulli_numbers(k)
    return BernoulliPoly(k, tuple(math.comb(k, m) * B[k - m] for m in range(k + 1)))


def bernoulli_poly(k: int, x: Union[int, Fraction]) -> Fraction:
    return bernoulli_polynomial(k)(Fraction(x))


def euler_factor(k: int, N: int, a: int) -> Fraction:
    """r with Li_k(ζ_N^a) + (-1)^k Li_k(ζ_N^-a) = r·(2πi)^k; the regularised T's cancel at (1, 0)"""
    a %= N
    if k == 1 and a == 0:
        return Fraction(0)
    return -bernoulli_poly(k, Fraction(a, N)) / math.factorial(k)


def _working_prec(prec: int) -> int:
    if prec < 1:
        raise ValueError(f"Precision must be positive, got {prec}")
    return prec + constants.GUARD_BITS


def _rounding_err(wp: int, magnitude, count: int = 1) -> mpmath.mpf:
    return mpmath.ldexp(count * (1 + magnitude), -wp + 4)


@lru_cache(maxsize=None)
def _roots(N: int, wp: int) -> tuple[mpmath.mpc, ...]:
    """ζ_N^e for e in 0..N-1"""
    with mpmath.workprec(wp):
        return tuple(
            mpmath.mpc(mpmath.cospi(mpmath.mpf(2 * e) / N), mpmath.sinpi(mpmath.mpf(2 * e) / N)) for e in range(N)
        )


def hurwitz_zeta(s: int, x: Union[int, Fraction], prec: int = constants.DEFAULT_PREC_BITS) -> MPComplex:
    x = Fraction(x)
    if s < 2:
        raise DivergentValueError(f"Hurwitz zeta needs s >= 2, got {s}")
    if not 0 < x <= 1:
        raise ValueError(f"Hurwitz zeta is taken for x in (0, 1], got {x}")
    wp = _working_prec(prec)
    with mpmath.workprec(wp):
        value = mpmath.zeta(s, _to_mp(x))
        return MPComplex(mpmath.mpc(value), _rounding_err(wp, abs(value)))


def _li(k: int, a: int, N: int, wp: int) -> mpmath.mpc:
    a %= N
    roots = _roots(N, wp)
    if k == 1:
        if a == 0:
            raise DivergentValueError("Li_1(1) diverges")
        return -mpmath.log(1 - roots[a])
    total = mpmath.mpc(0)
    for j in range(1, N + 1):
        total += roots[(a * j) % N] * mpmath.zeta(k, mpmath.mpf(j) / N)
    return total / mpmath.mpf(N) ** k


def polylog_root(k: int, N: int, a: int, prec: int = constants.DEFAULT_PREC_BITS) -> MPComplex:
    """Li_k(ζ_N^a)"""
    if k < 1 or N < 1:
        raise ValueError(f"Need k >= 1 and N >= 1, got k={k}, N={N}")
    wp = _working_prec(prec)
    with mpmath.workprec(wp):
        value = _li(k, a, N, wp)
        return MPComplex(value, _rounding_err(wp, abs(value), N))


def _cutoff(N: int, wp: int) -> int:
    blocks = max(math.ceil(constants.CUTOFF_FACTOR * wp), math.ceil(constants.MIN_CUTOFF / N))
    return N * blocks


def _F(u: int, x):
    return -mpmath.digamma(x) if u == 1 else mpmath.zeta(u, x)


def _dF(u: int, x):
    return -mpmath.stieltjes(1, x) if u == 1 else mpmath.zeta(u, x, 1)


def _power_tail(u: int, e: int, N: int, M: int, roots, with_log: bool = False) -> mpmath.mpc:
    """Σ_{n>M} ζ_N^{en} n^-u (times log n when with_log), for M ≡ 0 mod N"""
    e %= N
    if u == 1 and e == 0:
        raise DivergentValueError("Σ 1/n diverges")
    log_N = mpmath.log(N)
    total = mpmath.mpc(0)
    for j in range(1, N + 1):
        x = mpmath.mpf(M + j) / N
        term = log_N * _F(u, x) - _dF(u, x) if with_log else _F(u, x)
        total += roots[(e * j) % N] * term
    return total / mpmath.mpf(N) ** u


def _tail_coefficients(z: Optional[mpmath.mpc], r: int, wp: int) -> Iterator:
    """
    c_k with Σ_{m>=n} z^m m^-r ~ z^n Σ_k c_k n^(-r-k), from the generating
    function 1/(1 - z e^t); z = None stands for z = 1, where the coefficients
    are the Euler–Maclaurin corrections left after the integral term.

    At z = -1 every even g_k past g_0 vanishes; the recursion leaves them as
    round-off, so a g_k below the round-off of its own sum is set to zero.
    """
    g = []
    inverse_factorials = [mpmath.mpf(1)]
    ratio = None if z is None else z / (1 - z)
    rising = 1
    k = 0
    while True:
        inverse_factorials.append(inverse_factorials[-1] / (k + 1))
        if z is None:
            g_k = -mpmath.bernoulli(k + 1) * inverse_factorials[k + 1]
        elif k == 0:
            g_k = 1 / (1 - z)
        else:
            terms = [g[k - j] * inverse_factorials[j] for j in range(1, k + 1)]
            g_k = ratio * mpmath.fsum(terms)
            noise = mpmath.ldexp(abs(ratio) * mpmath.fsum(abs(t) for t in terms) * k, -wp + 8)
            if abs(g_k) <= noise:
                g_k = mpmath.mpc(0)
        g.append(g_k)
        yield g_k * (-1) ** k * rising
        rising *= r + k
        k += 1


def _outer_tail(r: int, s: int, a: int, b: int, N: int, M: int, roots, wp: int):
    """Σ_{n>M} ζ^{bn} n^-s Σ_{m<n} ζ^{am} m^-r and an estimate of its truncation error"""
    if a != 0:
        lead = _li(r, a, N, wp) * _power_tail(s, b, N, M, roots)
        z, e = roots[a], a + b
    elif r >= 2:
        lead = mpmath.zeta(r) * _power_tail(s, b, N, M, roots) - _power_tail(s + r - 1, b, N, M, roots) / (r - 1)
        z, e = None, b
    else:
        lead = _power_tail(s, b, N, M, roots, with_log=True) + mpmath.euler * _power_tail(s, b, N, M, roots)
        z, e = None, b

    threshold = mpmath.ldexp(1, -wp)
    correction = mpmath.mpc(0)
    previous = mpmath.inf
    for k, c in enumerate(_tail_coefficients(z, r, wp)):
        if k >= constants.MAX_TAIL_TERMS:
            raise ConvergenceError(f"Tail of ζ({r},{s};{a},{b}) at N={N} needs more than {k} terms")
        if c == 0:
            continue
        u = s + r + k
        bound = abs(c) * mpmath.mpf(M) ** (1 - u) / (u - 1)
        if bound < threshold:
            return lead - correction, bound
        if bound > previous:
            raise ConvergenceError(f"Asymptotic tail of ζ({r},{s};{a},{b}) at N={N} diverges before reaching 2^-{wp}")
        previous = bound
        correction += c * _power_tail(u, e, N, M, roots)


def colored_double_zeta(r: int, s: int, a: int, b: int, N: int, prec: int = constants.DEFAULT_PREC_BITS) -> MPComplex:
    """ζ(r,s; ζ_N^a, ζ_N^b) = Σ_{0<m<n} ζ_N^{am} ζ_N^{bn} m^-r n^-s"""
    if r < 1 or s < 1 or N < 1:
        raise ValueError(f"Need r, s, N >= 1, got r={r}, s={s}, N={N}")
    a, b = a % N, b % N
    if (s, b) == (1, 0):
        raise DivergentValueError(f"ζ({r},1;{a},0) diverges at N={N}")
    wp = _working_prec(prec)
    with mpmath.workprec(wp):
        roots = _roots(N, wp)
        M = _cutoff(N, wp)
        total = mpmath.mpc(0)
        inner = mpmath.mpc(0)
        for n in range(1, M + 1):
            n_mp = mpmath.mpf(n)
            total += roots[(b * n) % N] * inner / n_mp**s
            inner += roots[(a * n) % N] / n_mp**r
        tail, tail_err = _outer_tail(r, s, a, b, N, M, roots, wp)
        value = total + tail
        return MPComplex(value, tail_err + _rounding_err(wp, abs(value), M))


def reg_double_zeta(r: int, a: int, N: int, prec: int = constants.DEFAULT_PREC_BITS) -> RegValue:
    """ζ^⧢(r,1; ζ^a, 1) = T·Li_r(ζ^a) - ζ(1,r; 1, ζ^a) - Li_{r+1}(ζ^a)"""
    a %= N
    if (r, a) == (1, 0):
        raise DivergentValueError("ζ^⧢(1,1;1,1) is excluded")
    with mpmath.workprec(_working_prec(prec)):
        single = polylog_root(r, N, a, prec)
        constant = -colored_double_zeta(1, r, 0, a, N, prec) - polylog_root(r + 1, N, a, prec)
        return RegValue(constant, single)


def _single_reg(k: int, a: int, N: int, prec: int) -> RegValue:
    if (k, a % N) == (1, 0):
        return RegValue.T()
    return RegValue.constant(polylog_root(k, N, a, prec))


def _evaluate_symbol(symbol: DzvSymbol, N: int, prec: int) -> RegValue:
    if symbol.kind == "Z1":
        k, c = symbol.indices
        return _single_reg(k, c, N, prec)
    r, s, a, b = symbol.indices
    if symbol.kind == "P2":
        with mpmath.workprec(_working_prec(prec)):
            return _single_reg(r, a, N, prec) * _single_reg(s, b, N, prec)
    if (s, b % N) == (1, 0):
        return reg_double_zeta(r, a, N, prec)
    return RegValue.constant(colored_double_zeta(r, s, a, b, N, prec))


# (symbol, N, prec) -> value; plain dict insertion is atomic
_SYMBOL_VALUES: dict[tuple[DzvSymbol, int, int], RegValue] = {}


def symbol_value(symbol: DzvSymbol, N: int, prec: int = constants.DEFAULT_PREC_BITS) -> RegValue:
    key = (symbol, N, prec)
    value = _SYMBOL_VALUES.get(key)
    if value is None:
        value = _evaluate_symbol(symbol, N, prec)
        _SYMBOL_VALUES[key] = value
    return value


def phi(v: FormalVector, prec: int = constants.DEFAULT_PREC_BITS) -> RegValue:
    """Φ_{k,N}, extended linearly from the symbols"""
    symbol_index(v.k, v.N)
    with mpmath.workprec(_working_prec(prec)):
        total = RegValue.zero()
        for symbol, coeff in v.terms:
            total = total + symbol_value(symbol, v.N, prec) * coeff
        return total


def _two_pi_i_power(k: int):
    return (2 * mpmath.pi * mpmath.j) ** k


def _threshold(prec: int, slack: int) -> mpmath.mpf:
    return mpmath.ldexp(1, -(prec - slack))


def residual_threshold(prec: int) -> mpmath.mpf:
    return _threshold(prec, constants.RESIDUAL_SLACK_BITS)


def _reg_size(value: RegValue) -> mpmath.mpf:
    return max(abs(value.c0), abs(value.c1))


def verify_euler(k: int, N: int, a: int, prec: int = constants.DEFAULT_PREC_BITS) -> mpmath.mpf:
    """|Li_k(ζ^a) + (-1)^k Li_k(ζ^-a) + B_k(a/N)/k!·(2πi)^k|"""
    if (k, a % N) == (1, 0):
        raise DivergentValueError("Li_1(1) diverges")
    with mpmath.workprec(_working_prec(prec)):
        lhs = polylog_root(k, N, a, prec) + polylog_root(k, N, -a, prec) * (-1) ** k
        rhs = _to_mp(euler_factor(k, N, a)) * _two_pi_i_power(k)
        return abs(lhs.value - rhs)


@lru_cache(maxsize=None)
def pev_targets(k: int, N: int) -> tuple[Fraction, ...]:
    """Φ(g)/(2πi)^k for every P^ev generator g, in pev_generators order"""
    targets = [
        euler_factor(r, N, a) * euler_factor(s, N, b)
        for r, s, a, b in (symbol.indices for symbol in symbol_index(k, N) if symbol.kind == "P2")
    ]
    targets += [euler_factor(k, N, c) for c in range(N)]
    return tuple(targets)


def predicted_rational(certificate: Certificate) -> Fraction:
    """Φ/(2πi)^k of a certified vector, read off from its P^ev coordinates"""
    targets = pev_targets(certificate.k, certificate.N)
    return sum((c * targets[i] for kind, i, c in certificate.labelled() if kind == "pev"), Fraction(0))


def _reconstruct(quotient_real: mpmath.mpf, k: int, N: int, max_den: int) -> Optional[Fraction]:
    """Reconstruction runs on quotient·k!·N^k, which clears the Bernoulli polynomial denominators"""
    scale = math.factorial(k) * N**k
    found = rational_reconstruct(quotient_real * scale, max_den, mpmath.mpf(constants.RECONSTRUCTION_TOLERANCE))
    return None if found is None else found / scale


@dataclass(frozen=True)
class PevCheck:
    index: int
    target: Fraction
    quotient: mpmath.mpc
    residual: mpmath.mpf
    reconstructed: Optional[Fraction]

    @property
    def passed(self) -> bool:
        return self.reconstructed == self.target


def pev_generator_check(
    k: int, N: int, prec: int = constants.DEFAULT_PREC_BITS, max_den: int = 10**6
) -> list[PevCheck]:
    generators = pev_generators(k, N)
    targets = pev_targets(k, N)
    checks = []
    with mpmath.workprec(_working_prec(prec)):
        scale = _two_pi_i_power(k)
        for i, (generator, target) in enumerate(zip(generators, targets)):
            value = phi(generator, prec)
            if abs(value.c1) > residual_threshold(prec):
                raise ConvergenceError(f"P^ev generator {i} keeps a T-dependence")
            quotient = value.c0.value / scale
            residual = abs(quotient - _to_mp(target))
            checks.append(PevCheck(i, target, quotient, residual, _reconstruct(quotient.real, k, N, max_den)))
    return checks


@dataclass(frozen=True)
class DshCheck:
    product: RegValue
    shuffle: RegValue
    stuffle: RegValue
    shuffle_residual: mpmath.mpf
    stuffle_residual: mpmath.mpf
    threshold: mpmath.mpf

    @property
    def passed(self) -> bool:
        return self.shuffle_residual < self.threshold and self.stuffle_residual < self.threshold


def dsh_numeric_check(r: int, s: int, a: int, b: int, N: int, prec: int = constants.DEFAULT_PREC_BITS) -> DshCheck:
    """The product ζ^⧢(r;ζ^a)ζ^⧢(s;ζ^b) against its shuffle and stuffle expansions"""
    k = r + s
    product_symbol = FormalVector.from_terms(N, k, [(DzvSymbol.P2(r, s, a, b, N), 1)])
    with mpmath.workprec(_working_prec(prec)):
        product = phi(product_symbol, prec)
        shuffle = phi(product_symbol - shuffle_vector(r, s, a, b, N), prec)
        stuffle = phi(product_symbol - stuffle_vector(r, s, a, b, N), prec)
        return DshCheck(
            product,
            shuffle,
            stuffle,
            _reg_size(product - shuffle),
            _reg_size(product - stuffle),
            residual_threshold(prec),
        )


def dsh_max_residual(k: int, N: int, prec: int = constants.DEFAULT_PREC_BITS) -> mpmath.mpf:
    """Largest |Φ(v)| over the double shuffle vectors, counting both T-components"""
    with mpmath.workprec(_working_prec(prec)):
        return max((_reg_size(phi(v, prec)) for v in dsh_relation_vectors(k, N)), default=mpmath.mpf(0))


def self_test_precision(r: int, s: int, a: int, b: int, N: int, prec: int = constants.DEFAULT_PREC_BITS) -> mpmath.mpf:
    """|ζ(r,s;a,b) at prec - the same at prec + 64|"""
    low = colored_double_zeta(r, s, a, b, N, prec)
    high = colored_double_zeta(r, s, a, b, N, prec + 64)
    with mpmath.workprec(_working_prec(prec + 64)):
        return abs(low.value - high.value)


def conjugation_residual(r: int, s: int, a: int, b: int, N: int, prec: int = constants.DEFAULT_PREC_BITS) -> mpmath.mpf:
    """|ζ(r,s;ζ^a,ζ^b) - conj ζ(r,s;ζ^-a,ζ^-b)|"""
    value = colored_double_zeta(r, s, a, b, N, prec)
    mirror = colored_double_zeta(r, s, -a, -b, N, prec)
    with mpmath.workprec(_working_prec(prec)):
        return abs(value - mirror.conjugate())


@dataclass(frozen=True)
class VerificationResult:
    source_index: int
    k: int
    N: int
    prec: int
    t_residual: mpmath.mpf
    relation_residual: mpmath.mpf
    value: mpmath.mpc
    quotient: mpmath.mpc
    rational: Optional[Fraction]
    predicted: Optional[Fraction]
    residual: Optional[mpmath.mpf]
    passed: bool


def verify_relation(
    rel: Relation, prec: int = constants.DEFAULT_PREC_BITS, max_den: int = constants.DEFAULT_MAX_DEN
) -> VerificationResult:
    """
    Φ of the full relation must be T-free and equal to its certified
    multiple of (2πi)^k; Φ of the odd-odd part, divided by (2πi)^k, must
    reconstruct to a rational, which is compared to the certified prediction
    """
    k, N = rel.vector.k, rel.vector.N
    with mpmath.workprec(_working_prec(prec)):
        scale = _two_pi_i_power(k)
        threshold = residual_threshold(prec)

        full = phi(rel.vector, prec)
        odd = phi(rel.odd_part, prec)
        t_residual = max(abs(full.c1), abs(odd.c1))

        relation_target = predicted_rational(rel.certificate) if rel.certificate else Fraction(0)
        relation_residual = abs(full.c0.value / scale - _to_mp(relation_target))

        quotient = odd.c0.value / scale
        imaginary_ok = abs(quotient.imag) < _threshold(prec, constants.IMAGINARY_SLACK_BITS) * (1 + abs(quotient))
        rational = _reconstruct(quotient.real, k, N, max_den)
        residual = None if rational is None else abs(quotient.real - _to_mp(rational))
        predicted = predicted_rational(rel.odd_certificate) if rel.odd_certificate else None

        passed = (
            t_residual < threshold
            and relation_residual < threshold
            and imaginary_ok
            and rational is not None
            and residual < mpmath.mpf(constants.RECONSTRUCTION_TOLERANCE)
            and (predicted is None or predicted == rational)
        )
        if not passed:
            logger.warning(
                "Relation %d at N=%d, k=%d fails: T-residual %s, relation residual %s, rational %s, predicted %s",
                rel.source_index,
                N,
                k,
                mpmath.nstr(t_residual, 5),
                mpmath.nstr(relation_residual, 5),
                rational,
                predicted,
            )
        return VerificationResult(
            source_index=rel.source_index,
            k=k,
            N=N,
            prec=prec,
            t_residual=t_residual,
            relation_residual=relation_residual,
            value=odd.c0.value,
            quotient=quotient,
            rational=rational,
            predicted=predicted,
            residual=residual,
            passed=passed,
        )


def _mpf_pair(x: mpmath.mpf) -> list[int]:
    man, exp = x.man_exp
    # gmpy-backed mantissas are mpz, which json cannot encode
    man, exp = int(man), int(exp)
    return [-man if x < 0 else man, exp]


def _mpf_from_pair(pair) -> mpmath.mpf:
    return mpmath.mpf((int(pair[0]), int(pair[1])))


def _mpcomplex_to_json(x: MPComplex) -> list[list[int]]:
    return [_mpf_pair(x.value.real), _mpf_pair(x.value.imag), _mpf_pair(x.err)]


def _mpcomplex_from_json(data) -> MPComplex:
    re, im, err = (_mpf_from_pair(pair) for pair in data)
    return MPComplex(mpmath.mpc(re, im), err)


def regvalue_to_json(value: RegValue) -> dict:
    return {"c0": _mpcomplex_to_json(value.c0), "c1": _mpcomplex_to_json(value.c1)}


def regvalue_from_json(data: dict, prec: int) -> RegValue:
    with mpmath.workprec(_working_prec(prec)):
        return RegValue(_mpcomplex_from_json(data["c0"]), _mpcomplex_from_json(data["c1"]))


def symbol_key(symbol: DzvSymbol) -> str:
    return f"{symbol.kind}:{','.join(str(i) for i in symbol.indices)}"


def _evaluate_for_pool(symbol: DzvSymbol, N: int, prec: int) -> dict:
    # Runs in a worker process; the value travels back as exact mantissa/exponent pairs
    return regvalue_to_json(_evaluate_symbol(symbol, N, prec))


async def evaluate_symbols(
    symbols: Iterable[DzvSymbol],
    N: int,
    prec: int = constants.DEFAULT_PREC_BITS,
    workers: Optional[int] = None,
    use_cache: bool = True,
) -> dict[DzvSymbol, RegValue]:
    """
    Values of the given symbols, read from the disk cache when present and
    otherwise computed, across a process pool when workers > 0; the in-process
    memo is filled so later phi calls reuse them
    """
    workers = constants.default_workers() if workers is None else workers
    stored = await cache.load_values(N, prec) if use_cache else {}
    values: dict[DzvSymbol, RegValue] = {}
    missing = []
    for symbol in dict.fromkeys(symbols):
        memo = _SYMBOL_VALUES.get((symbol, N, prec))
        if memo is not None:
            values[symbol] = memo
        elif symbol_key(symbol) in stored:
            values[symbol] = regvalue_from_json(stored[symbol_key(symbol)], prec)
        else:
            missing.append(symbol)
    logger.info("%d symbols at N=%d, prec=%d: %d to compute", len(values) + len(missing), N, prec, len(missing))

    if missing and workers > 0:
        loop = asyncio.get_running_loop()
        # Multi-processing: the evaluations are CPU-bound
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
            try:
                encoded = await gather_unlimited_concurrency(
                    "Evaluating colored zeta values",
                    *(loop.run_in_executor(executor, _evaluate_for_pool, symbol, N, prec) for symbol in missing)
                )
            except asyncio.CancelledError:
                executor.shutdown(wait=True, cancel_futures=True)
                raise
        for symbol, data in zip(missing, encoded):
            values[symbol] = regvalue_from_json(data, prec)
    else:
        for symbol in tqdm(missing, desc="Evaluating colored zeta values", disable=not missing):
            values[symbol] = _evaluate_symbol(symbol, N, prec)

    for symbol, value in values.items():
        _SYMBOL_VALUES[(symbol, N, prec)] = value
    if missing and use_cache:
        await cache.store_values(N, prec, {symbol_key(symbol): regvalue_to_json(values[symbol]) for symbol in missing})
    return values
