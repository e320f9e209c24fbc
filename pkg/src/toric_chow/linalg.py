"""Exact rational linear algebra on top of sympy's domain matrices.

Matrices are plain lists of rows; entries are ints or Fractions. Results come back as Fractions.
Row reduction goes through sparse QQ matrices; repeated solves against fixed independent columns
go through a `ColumnSolver`, which inverts once and then works in integers.
"""

import math
from collections.abc import Sequence
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Rational = int | Fraction
Rows = Sequence[Sequence[Rational]]


def to_qq(x: Rational):
    if isinstance(x, int):
        return QQ(x)
    return QQ(x.numerator, x.denominator)


def from_qq(x) -> Fraction:
    return Fraction(int(QQ.numer(x)), int(QQ.denom(x)))


def domain_matrix(rows: Rows, ncols: int) -> DomainMatrix:
    return DomainMatrix([[to_qq(x) for x in row] for row in rows], (len(rows), ncols), QQ)


def sparse_matrix(rows: Rows, ncols: int) -> DomainMatrix:
    entries = {i: {j: to_qq(x) for j, x in enumerate(row) if x} for i, row in enumerate(rows)}
    return DomainMatrix({i: row for i, row in entries.items() if row}, (len(rows), ncols), QQ)


def row_reduce(rows: Rows, ncols: int) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    """Reduced row echelon form. Returns the nonzero rows and the pivot columns."""
    if not rows or ncols == 0:
        return [], ()
    reduced, pivots = sparse_matrix(rows, ncols).rref()
    entries = reduced.to_sparse().rep
    nonzero = []
    for i in range(len(pivots)):
        row = [Fraction(0)] * ncols
        for j, x in entries.get(i, {}).items():
            row[j] = from_qq(x)
        nonzero.append(row)
    return nonzero, tuple(pivots)


def rank(rows: Rows, ncols: int | None = None) -> int:
    if not rows:
        return 0
    ncols = len(rows[0]) if ncols is None else ncols
    if ncols == 0:
        return 0
    return sparse_matrix(rows, ncols).rank()


def transpose(rows: Rows, ncols: int) -> list[list[Rational]]:
    return [[row[j] for row in rows] for j in range(ncols)]


def is_independent(vectors: Sequence[Sequence[Rational]]) -> bool:
    """Whether the given vectors are linearly independent over Q."""
    if not vectors:
        return True
    return rank(vectors) == len(vectors)


def solve(rows: Rows, ncols: int, rhs: Sequence[Rational]) -> list[Fraction] | None:
    """A solution of A x = rhs, or None when inconsistent.

    Free variables are set to zero, so the solution is the unique one when A has full column rank.
    """
    if not rows:
        return [Fraction(0)] * ncols
    augmented = [list(row) + [b] for row, b in zip(rows, rhs, strict=True)]
    reduced, pivots = row_reduce(augmented, ncols + 1)
    if ncols in pivots:
        return None
    solution = [Fraction(0)] * ncols
    for row, pivot in zip(reduced, pivots, strict=True):
        solution[pivot] = row[ncols]
    return solution


def solve_columns(columns: Sequence[Sequence[Rational]], target: Sequence[Rational]) -> list[Fraction] | None:
    """Coefficients expressing `target` as a combination of `columns`, or None."""
    if not columns:
        return [] if all(x == 0 for x in target) else None
    return solve(transpose(columns, len(target)), len(columns), target)


def nullspace(rows: Rows, ncols: int) -> list[list[Fraction]]:
    """A basis of {x : A x = 0}, one vector per free column."""
    reduced, pivots = row_reduce(rows, ncols)
    basis = []
    for free in (j for j in range(ncols) if j not in pivots):
        vector = [Fraction(0)] * ncols
        vector[free] = Fraction(1)
        for row, pivot in zip(reduced, pivots, strict=True):
            vector[pivot] = -row[free]
        basis.append(vector)
    return basis


def inverse(rows: Rows) -> list[list[Fraction]]:
    n = len(rows)
    if n == 0:
        return []
    inverted = domain_matrix(rows, n).inv()
    return [[from_qq(x) for x in row] for row in inverted.to_list()]


def in_row_space(rows: Rows, ncols: int, vector: Sequence[Rational]) -> bool:
    return rank(list(rows) + [vector], ncols) == rank(rows, ncols)


class ColumnSolver:
    """Coordinates of vectors in the span of fixed linearly independent columns.

    Keeps the pivot coordinates of the columns, the adjugate-style integral inverse of the square block
    on them and its denominator. A solve is an integer matrix-vector product, checked on the other
    coordinates.
    """

    def __init__(self, columns: Sequence[Sequence[Rational]], dimension: int, pivots: Sequence[int]):
        self.columns = tuple(tuple(column) for column in columns)
        self.dimension = dimension
        self.pivots = tuple(pivots)
        self.others = tuple(k for k in range(dimension) if k not in self.pivots)
        block = inverse([[column[r] for column in self.columns] for r in self.pivots])
        self.denominator = math.lcm(1, *(x.denominator for row in block for x in row))
        self.numerators = tuple(tuple(int(x * self.denominator) for x in row) for row in block)

    def __call__(self, target: Sequence[Rational]) -> tuple[Fraction, ...] | None:
        if len(target) != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {len(target)}")
        scaled = [sum((a * target[r] for a, r in zip(row, self.pivots, strict=True)), 0) for row in self.numerators]
        for k in self.others:
            if sum((x * column[k] for x, column in zip(scaled, self.columns, strict=True)), 0) != self.denominator * target[k]:
                return None
        return tuple(Fraction(x) / self.denominator for x in scaled)


def column_solver(columns: Sequence[Sequence[Rational]], dimension: int) -> ColumnSolver | None:
    """A solver for the given columns, or None when they are linearly dependent."""
    if not columns:
        return ColumnSolver((), dimension, ())
    _, pivots = row_reduce(columns, dimension)
    if len(pivots) != len(columns):
        return None
    return ColumnSolver(columns, dimension, pivots)
