"""
Exact rational linear algebra on top of sympy's DomainMatrix over QQ:
canonical reduced row-echelon forms, kernels, subspaces and rational
reconstruction. Matrices are held as Fraction entries and converted at
the sympy boundary.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import mpmath
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

Rat = Fraction
RatLike = Union[int, Fraction, str]


class DimensionMismatchError(ValueError):
    pass


def to_rat(x: RatLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def format_rat(x: Fraction) -> str:
    """Serialises as "num/den", always with an explicit denominator"""
    x = to_rat(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(text: str) -> Fraction:
    return Fraction(text)


def _qq(x: Fraction):
    return QQ(x.numerator, x.denominator)


@dataclass(frozen=True)
class QMatrix:
    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatchError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries,"
                f" got {len(self.entries)}"
            )

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RatLike]], cols: Optional[int] = None):
        rows = list(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        entries = []
        for row in rows:
            if len(row) != cols:
                raise DimensionMismatchError(f"Row of length {len(row)} in a {cols}-column matrix")
            entries.extend(to_rat(x) for x in row)
        return cls(len(rows), cols, tuple(entries))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[RatLike]], rows: int):
        columns = list(columns)
        return cls.from_rows(
            [[columns[j][i] for j in range(len(columns))] for i in range(rows)],
            cols=len(columns),
        )

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> "QMatrix":
        rows, cols = dm.shape
        # Matrix iterates row-major
        return cls(rows, cols, tuple(Fraction(int(x.p), int(x.q)) for x in dm.to_Matrix()))

    @classmethod
    def zero(cls, rows: int, cols: int):
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int):
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def vstack(cls, matrices: Sequence["QMatrix"], cols: int):
        entries = []
        rows = 0
        for m in matrices:
            if m.cols != cols:
                raise DimensionMismatchError(f"Cannot stack a {m.cols}-column matrix onto {cols} columns")
            entries.extend(m.entries)
            rows += m.rows
        return cls(rows, cols, tuple(entries))

    def to_domain(self) -> DomainMatrix:
        return DomainMatrix(
            [[_qq(x) for x in self.row(i)] for i in range(self.rows)], (self.rows, self.cols), QQ
        )

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[tuple[Fraction, ...]]:
        return [self.row(i) for i in range(self.rows)]

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        return self.entries[i * self.cols + j]

    def transpose(self) -> "QMatrix":
        return QMatrix.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)], cols=self.rows
        )

    def apply(self, v: Sequence[RatLike]) -> tuple[Fraction, ...]:
        """M·v for a column vector v"""
        if len(v) != self.cols:
            raise DimensionMismatchError(f"Vector of length {len(v)} against {self.cols} columns")
        return (self @ QMatrix.from_rows([[x] for x in v], cols=1)).entries

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        if 0 in (self.rows, self.cols, other.cols):
            return QMatrix.zero(self.rows, other.cols)
        return QMatrix.from_domain(self.to_domain().matmul(other.to_domain()))


@dataclass(frozen=True)
class RrefResult:
    R: QMatrix
    pivot_cols: tuple[int, ...]
    rank: int


@dataclass(frozen=True)
class RrefTransform:
    R: QMatrix
    pivot_cols: tuple[int, ...]
    rank: int
    # E·M = R
    E: QMatrix


def rref(M: QMatrix) -> RrefResult:
    if M.rows == 0 or M.cols == 0:
        return RrefResult(M, (), 0)
    reduced, pivots = M.to_domain().rref()
    pivots = tuple(pivots)
    return RrefResult(QMatrix.from_domain(reduced), pivots, len(pivots))


def rref_with_transform(M: QMatrix) -> RrefTransform:
    """Row-reduces [M | I]; the right block then records the row operations"""
    if M.rows == 0:
        return RrefTransform(M, (), 0, QMatrix.zero(0, 0))
    augmented = QMatrix.from_rows(
        [list(M.row(i)) + [int(i == j) for j in range(M.rows)] for i in range(M.rows)],
        cols=M.cols + M.rows,
    )
    reduced = rref(augmented)
    rows = reduced.R.to_rows()
    pivots = tuple(p for p in reduced.pivot_cols if p < M.cols)
    return RrefTransform(
        QMatrix.from_rows([row[: M.cols] for row in rows], cols=M.cols),
        pivots,
        len(pivots),
        QMatrix.from_rows([row[M.cols :] for row in rows], cols=M.rows),
    )


@dataclass(frozen=True)
class Subspace:
    """
    A subspace of Q^ambient_dim held by its canonical RREF basis, so two
    subspaces of the same ambient space are equal iff their fields are equal.
    """

    ambient_dim: int
    basis: QMatrix
    pivot_cols: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.basis.rows

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence[RatLike]], ambient_dim: int) -> "Subspace":
        vectors = list(vectors)
        if not vectors:
            return cls.zero(ambient_dim)
        return cls.from_matrix(QMatrix.from_rows(vectors, cols=ambient_dim))

    @classmethod
    def from_matrix(cls, M: QMatrix) -> "Subspace":
        """Row space of M"""
        result = rref(M)
        return cls(M.cols, QMatrix.from_rows(result.R.to_rows()[: result.rank], cols=M.cols), result.pivot_cols)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, QMatrix.zero(0, ambient_dim), ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, QMatrix.identity(ambient_dim), tuple(range(ambient_dim)))

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return self.basis.to_rows()

    def contains(self, v: Sequence[RatLike]) -> bool:
        return in_span(v, self) is not None


def kernel_basis(M: QMatrix) -> Subspace:
    """Null space {v : M·v = 0} in canonical form"""
    if M.cols == 0:
        return Subspace.zero(0)
    if M.rows == 0:
        return Subspace.full(M.cols)
    return Subspace.from_matrix(QMatrix.from_domain(M.to_domain().nullspace()))


def restricted_kernel(M: QMatrix, S: Subspace) -> Subspace:
    """{v ∈ S : M·v = 0}"""
    if M.cols != S.ambient_dim:
        raise DimensionMismatchError(f"Map on Q^{M.cols} restricted to a subspace of Q^{S.ambient_dim}")
    if S.dim == 0:
        return Subspace.zero(S.ambient_dim)
    # columns are the images of the basis rows of S
    coefficients = kernel_basis(M @ S.basis.transpose())
    if coefficients.dim == 0:
        return Subspace.zero(S.ambient_dim)
    return Subspace.from_matrix(coefficients.basis @ S.basis)


def image_subspace(M: QMatrix, S: Subspace) -> Subspace:
    if M.cols != S.ambient_dim:
        raise DimensionMismatchError(f"Map on Q^{M.cols} applied to a subspace of Q^{S.ambient_dim}")
    if S.dim == 0:
        return Subspace.zero(M.rows)
    return Subspace.from_matrix(S.basis @ M.transpose())


def subspace_sum(S1: Subspace, S2: Subspace) -> Subspace:
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatchError(f"Ambient dimensions {S1.ambient_dim} and {S2.ambient_dim} differ")
    return Subspace.from_vectors(S1.vectors() + S2.vectors(), S1.ambient_dim)


def subspace_intersect(S1: Subspace, S2: Subspace) -> Subspace:
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionMismatchError(f"Ambient dimensions {S1.ambient_dim} and {S2.ambient_dim} differ")
    if S2.dim == 0:
        return Subspace.zero(S1.ambient_dim)
    # S2 is cut out by its annihilator
    annihilator = kernel_basis(S2.basis)
    if annihilator.dim == 0:
        return S1
    return restricted_kernel(annihilator.basis, S1)


def in_span(v: Sequence[RatLike], S: Subspace) -> Optional[tuple[Fraction, ...]]:
    """Coordinates of v over the basis rows of S, or None if v is not in S"""
    if len(v) != S.ambient_dim:
        raise DimensionMismatchError(f"Vector of length {len(v)} in a subspace of Q^{S.ambient_dim}")
    target = QMatrix.from_rows([v], cols=S.ambient_dim)
    # the basis is reduced, so the only candidate coordinates sit at the pivots
    coordinates = tuple(target.entries[p] for p in S.pivot_cols)
    combination = QMatrix.from_rows([coordinates], cols=S.dim) @ S.basis
    if combination != target:
        return None
    return coordinates


def to_exact(x) -> Fraction:
    """Exact rational value of an int, Fraction, float, decimal string or mpf"""
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            raise ValueError(f"Cannot convert {x} to a rational number")
        man, exp = x.man_exp
        if x < 0:
            man = -man
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    if isinstance(x, (int, Fraction, float, str)):
        return Fraction(x)
    return to_exact(mpmath.mpf(x))


def rational_reconstruct(x, max_den: int, tol) -> Optional[Fraction]:
    """
    Walks the continued-fraction convergents of x and returns the first
    one within tol whose denominator does not exceed max_den
    """
    if max_den < 1:
        raise ValueError("max_den must be at least 1")
    target = to_exact(x)
    tol = to_exact(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")

    p_prev, q_prev, p, q = 0, 1, 1, 0
    num, den = target.numerator, target.denominator
    while den:
        a, rem = divmod(num, den)
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if q > max_den:
            return None
        candidate = Fraction(p, q)
        if abs(target - candidate) <= tol:
            return candidate
        num, den = den, rem
    return None
