"""Exact lattice arithmetic for free abelian stages.

Lattices are stored by their column Hermite normal form, so two lattices are
equal exactly when their stored bases are equal. Entries are Python ``int``;
sympy supplies the Hermite and Smith normal forms, determinants and
characteristic polynomials.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import sympy
from sympy import ZZ
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors, smith_normal_decomp

from .errors import DimensionMismatch

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix."""

    rows: int
    cols: int
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        if len(entries) != self.rows or any(len(row) != self.cols for row in entries):
            raise DimensionMismatch(f"entries do not form a {self.rows}x{self.cols} matrix")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [tuple(row) for row in rows]
        width = cols if cols is not None else (len(rows[0]) if rows else 0)
        return cls(len(rows), width, tuple(rows))

    @classmethod
    def from_columns(cls, n: int, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(n, len(columns), tuple(tuple(col[r] for col in columns) for r in range(n)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(r == c) for c in range(n)) for r in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls(n, n, tuple(tuple(values[r] if r == c else 0 for c in range(n)) for r in range(n)))

    @classmethod
    def scalar(cls, n: int, value: int) -> "IntMatrix":
        return cls.diagonal([value] * n)

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(tuple(self.entries[r][c] for r in range(self.rows)) for c in range(self.cols)),
        )

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector of length {len(v)} for a {self.rows}x{self.cols} matrix")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        other_cols = other.columns()
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in other_cols) for row in self.entries),
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("matrix sizes differ")
        return IntMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.entries, other.entries)),
        )

    def scaled(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * a for a in row) for row in self.entries))

    def power(self, k: int) -> "IntMatrix":
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices have powers")
        result = IntMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def det(self) -> int:
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        if self.rows == 0:
            return 1
        return int(sympy.Matrix(self.entries).det())

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.rows, self.cols, [x for row in self.entries for x in row])

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.entries) + "]"


# ============================================================================
# Normal forms
# ============================================================================

def hermite_columns(vectors: Sequence[Sequence[int]], n: int) -> Tuple[Tuple[Vector, ...], Tuple[int, ...]]:
    """Column Hermite normal form of the lattice spanned by ``vectors``.

    Returns the basis columns and their pivot rows. Pivot rows increase, each
    column is zero above its pivot, pivots are positive, and every earlier
    column has its entry in a later pivot row reduced into ``[0, pivot)``.
    """
    work = [tuple(v) for v in vectors]
    for v in work:
        if len(v) != n:
            raise DimensionMismatch(f"vector of length {len(v)} in Z^{n}")
    work = [v for v in work if any(v)]
    if not work:
        return (), ()
    # sympy places pivots from the bottom row up; flipping the rows and the
    # column order turns that into pivots from the top row down.
    flipped = sympy.Matrix(n, len(work), lambda r, c: work[c][n - 1 - r])
    hnf = hermite_normal_form(flipped)
    basis = tuple(tuple(int(hnf[n - 1 - r, c]) for r in range(n)) for c in reversed(range(hnf.cols)))
    pivots = tuple(next(r for r, x in enumerate(b) if x) for b in basis)
    return basis, pivots


class NormalForms(NamedTuple):
    hnf: IntMatrix
    diagonal: Tuple[int, ...]
    left: IntMatrix
    right: IntMatrix


def _from_sympy(m: sympy.Matrix) -> IntMatrix:
    return IntMatrix(m.rows, m.cols, tuple(tuple(int(m[r, c]) for c in range(m.cols)) for r in range(m.rows)))


def hermite_smith(m: IntMatrix) -> NormalForms:
    """Hermite and Smith normal forms of ``m``.

    Returns ``NormalForms(hnf, diagonal, left, right)`` with
    ``left @ m @ right`` equal to the diagonal matrix of ``diagonal`` (padded
    with zeros to the shape of ``m``); ``left`` and ``right`` are unimodular.
    Nonzero invariant factors come first, each dividing the next.
    """
    n, k = m.rows, m.cols
    basis, _ = hermite_columns(m.columns(), n)
    hnf = IntMatrix.from_columns(n, basis)
    if not n or not k:
        return NormalForms(hnf, (), IntMatrix.identity(n), IntMatrix.identity(k))
    smf, left, right = smith_normal_decomp(m.to_sympy(), domain=ZZ)
    return NormalForms(
        hnf=hnf,
        diagonal=tuple(int(smf[i, i]) for i in range(min(n, k))),
        left=_from_sympy(left),
        right=_from_sympy(right),
    )


def integer_kernel(m: IntMatrix) -> List[Vector]:
    """A basis of ``{x in Z^cols : m x = 0}``."""
    forms = hermite_smith(m)
    rank = sum(1 for d in forms.diagonal if d)
    return [forms.right.column(j) for j in range(rank, m.cols)]


# ============================================================================
# Lattices
# ============================================================================

class QuotientInfo(NamedTuple):
    finite: bool
    order: Optional[int]
    factors: Tuple[int, ...]

    def __str__(self) -> str:
        if not self.factors:
            return "trivial"
        return " x ".join("Z" if f == 0 else f"Z/{f}" for f in self.factors)


@dataclass(frozen=True)
class Lattice:
    """Sublattice of Z^n held by its canonical column HNF basis.

    Build lattices with :meth:`span`, :meth:`full` or :meth:`zero`.
    """

    ambient: int
    basis: Tuple[Vector, ...]
    pivots: Tuple[int, ...]

    @classmethod
    def span(cls, ambient: int, vectors: Sequence[Sequence[int]]) -> "Lattice":
        basis, pivots = hermite_columns(vectors, ambient)
        return cls(ambient, basis, pivots)

    @classmethod
    def full(cls, ambient: int) -> "Lattice":
        return cls.span(ambient, IntMatrix.identity(ambient).columns())

    @classmethod
    def zero(cls, ambient: int) -> "Lattice":
        return cls(ambient, (), ())

    @classmethod
    def scaled(cls, ambient: int, k: int) -> "Lattice":
        return cls.span(ambient, IntMatrix.scalar(ambient, k).columns())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_full(self) -> bool:
        return self == Lattice.full(self.ambient)

    def matrix(self) -> IntMatrix:
        return IntMatrix.from_columns(self.ambient, self.basis)

    def _check(self, v: Sequence[int]) -> List[int]:
        if len(v) != self.ambient:
            raise DimensionMismatch(f"vector of length {len(v)} in Z^{self.ambient}")
        return list(v)

    def residue(self, v: Sequence[int]) -> Vector:
        """Canonical representative of the coset ``v + L``."""
        w = self._check(v)
        for col, r in zip(self.basis, self.pivots):
            q = w[r] // col[r]
            if q:
                w = [x - q * y for x, y in zip(w, col)]
        return tuple(w)

    def coordinates(self, v: Sequence[int]) -> Optional[Vector]:
        """Coefficients of ``v`` on the basis, or None when ``v`` is not in L."""
        w = self._check(v)
        coefficients = []
        for col, r in zip(self.basis, self.pivots):
            if w[r] % col[r]:
                return None
            q = w[r] // col[r]
            coefficients.append(q)
            if q:
                w = [x - q * y for x, y in zip(w, col)]
        if any(w):
            return None
        return tuple(coefficients)

    def __contains__(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def includes(self, other: "Lattice") -> bool:
        """True when ``other`` is a sublattice of this one."""
        if other.ambient != self.ambient:
            raise DimensionMismatch(f"Z^{other.ambient} against Z^{self.ambient}")
        return all(b in self for b in other.basis)

    def __add__(self, other: "Lattice") -> "Lattice":
        if other.ambient != self.ambient:
            raise DimensionMismatch(f"Z^{other.ambient} against Z^{self.ambient}")
        return Lattice.span(self.ambient, self.basis + other.basis)

    def index_in(self, other: "Lattice") -> Optional[int]:
        """``[other : self]`` for ``self`` inside ``other``; None if infinite."""
        if not other.includes(self):
            raise ValueError("lattice is not contained in the reference lattice")
        if self.rank != other.rank:
            return None
        coords = [other.coordinates(b) for b in self.basis]
        return abs(IntMatrix.from_columns(other.rank, coords).det())

    def __str__(self) -> str:
        if not self.basis:
            return "0"
        if self.ambient == 1:
            return "Z" if self.basis[0][0] == 1 else f"{self.basis[0][0]}Z"
        return "<" + ", ".join("(" + ", ".join(str(x) for x in b) + ")" for b in self.basis) + ">"


def member(v: Sequence[int], lattice: Lattice) -> bool:
    return v in lattice


def quotient_info(lattice: Lattice) -> QuotientInfo:
    """Order and cyclic factors of ``Z^n / L``; a factor 0 stands for Z."""
    n = lattice.ambient
    if n == 0:
        return QuotientInfo(True, 1, ())
    factors = invariant_factors(lattice.matrix().to_sympy(), domain=ZZ) if lattice.rank else ()
    diagonal = tuple(int(d) for d in factors)
    torsion = tuple(d for d in diagonal if d > 1)
    free = n - lattice.rank
    if free:
        return QuotientInfo(False, None, torsion + (0,) * free)
    order = 1
    for d in diagonal:
        order *= d
    return QuotientInfo(True, order, torsion)


def intersect(a: Lattice, b: Lattice) -> Lattice:
    """``A ∩ B`` from the kernel of the stacked matrix ``[A | -B]``."""
    if a.ambient != b.ambient:
        raise DimensionMismatch(f"Z^{a.ambient} against Z^{b.ambient}")
    if not a.rank or not b.rank:
        return Lattice.zero(a.ambient)
    stacked = IntMatrix.from_columns(a.ambient, list(a.basis) + [tuple(-x for x in col) for col in b.basis])
    vectors = []
    for x in integer_kernel(stacked):
        coeffs = x[: a.rank]
        vectors.append(tuple(sum(c * col[r] for c, col in zip(coeffs, a.basis)) for r in range(a.ambient)))
    return Lattice.span(a.ambient, vectors)


# ============================================================================
# Homomorphisms between free abelian groups
# ============================================================================

@dataclass(frozen=True)
class AbelianHom:
    """Homomorphism Z^m -> Z^n given by an n x m matrix."""

    matrix: IntMatrix

    @property
    def source_rank(self) -> int:
        return self.matrix.cols

    @property
    def target_rank(self) -> int:
        return self.matrix.rows

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "AbelianHom":
        return cls(IntMatrix.from_rows(rows, cols))

    def __call__(self, v: Sequence[int]) -> Vector:
        return self.matrix.apply(v)

    def then(self, other: "AbelianHom") -> "AbelianHom":
        return AbelianHom(other.matrix @ self.matrix)

    def power(self, k: int) -> "AbelianHom":
        return AbelianHom(self.matrix.power(k))

    def is_injective(self) -> bool:
        return not integer_kernel(self.matrix)

    def is_surjective(self) -> bool:
        return image(self, Lattice.full(self.source_rank)).is_full()


def image(h: AbelianHom, lattice: Lattice) -> Lattice:
    if lattice.ambient != h.source_rank:
        raise DimensionMismatch(f"lattice in Z^{lattice.ambient}, hom from Z^{h.source_rank}")
    return Lattice.span(h.target_rank, [h(b) for b in lattice.basis])


def preimage(h: AbelianHom, lattice: Lattice) -> Lattice:
    """``{x : h(x) in L}``, solved as the kernel of ``[H | -B]``."""
    if lattice.ambient != h.target_rank:
        raise DimensionMismatch(f"lattice in Z^{lattice.ambient}, hom into Z^{h.target_rank}")
    m = h.source_rank
    columns = h.matrix.columns() + [tuple(-x for x in col) for col in lattice.basis]
    if not columns:
        return Lattice.full(m)
    stacked = IntMatrix.from_columns(h.target_rank, columns)
    return Lattice.span(m, [x[:m] for x in integer_kernel(stacked)])


def _evaluate(coefficients: Sequence[int], a: IntMatrix) -> IntMatrix:
    result = IntMatrix.zeros(a.rows, a.cols)
    identity = IntMatrix.identity(a.rows)
    for c in coefficients:
        result = result @ a + identity.scaled(c)
    return result


def restrict(h: AbelianHom, lattice: Lattice) -> IntMatrix:
    """Matrix of an endomorphism on an invariant lattice, in its basis."""
    columns = []
    for b in lattice.basis:
        coords = lattice.coordinates(h(b))
        if coords is None:
            raise ValueError(f"lattice {lattice} is not invariant under {h.matrix}")
        columns.append(coords)
    return IntMatrix.from_columns(lattice.rank, columns)


def divisible_core(m: AbelianHom, lattice: Lattice) -> Lattice:
    """``∩_k m^k(L)`` for an endomorphism ``m`` with ``m(L) ⊆ L``.

    In coordinates on L the restriction A is an r x r integer matrix. Beyond
    the r-th power, A acts without kernel on ``M = A^r(Z^r)``, and the
    intersection of the iterates is the largest sublattice of M on which A is
    an automorphism. Prime by prime, that is the part where A acts invertibly
    p-adically for every p dividing the determinant; globally it is M cut
    with the kernel of g(A), g the product of the irreducible factors of the
    characteristic polynomial whose constant term is a unit.

    Raises:
        DimensionMismatch: if m is not square or L lives elsewhere
        ValueError: if L is not invariant under m
    """
    if m.source_rank != m.target_rank:
        raise DimensionMismatch("divisible core needs an endomorphism")
    if lattice.ambient != m.source_rank:
        raise DimensionMismatch(f"lattice in Z^{lattice.ambient}, endomorphism of Z^{m.source_rank}")
    r = lattice.rank
    if r == 0:
        return lattice
    a = restrict(m, lattice)
    eventual = Lattice.span(r, a.power(r).columns())

    x = sympy.Symbol("x")
    _, factors = a.to_sympy().charpoly(x).factor_list()
    g = IntMatrix.identity(r)
    unit_factors = []
    for factor, multiplicity in factors:
        coefficients = [int(c) for c in factor.all_coeffs()]
        if len(coefficients) > 1 and abs(coefficients[-1]) == 1:
            unit_factors.append(factor.as_expr())
            g = g @ _evaluate(coefficients, a).power(multiplicity)
    logger.debug("divisible core: rank %d, unit factors %s", r, unit_factors)
    unit_part = Lattice.span(r, integer_kernel(g))
    core = intersect(eventual, unit_part)
    return Lattice.span(
        lattice.ambient,
        [tuple(sum(c * b[i] for c, b in zip(coords, lattice.basis)) for i in range(lattice.ambient)) for coords in core.basis],
    )
