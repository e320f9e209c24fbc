"""Finitely generated abelian groups, their maps, and Gale duality.

Groups are kept in invariant-factor form Z^d + Z/k_1 + ... + Z/k_s with k_1 | ... | k_s.
An element is a tuple of d free coordinates followed by s residues 0 <= r_j < k_j.

Homomorphisms and lattice maps act on these coordinate tuples by integer matrices.
Quotients are computed from the Smith normal form of a presentation matrix, and the
Gale dual of beta: Z^m -> N is the cokernel of [B Q]^T, where B lifts the columns of
beta to Z^(d+s) and Q is the relation matrix of N.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg

logger = logging.getLogger(__name__)

Element = tuple[int, ...]
IntMatrix = tuple[tuple[int, ...], ...]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Product of an r x k matrix and a k x ncols matrix, given as rows."""
    return [[sum(row[k] * b[k][j] for k in range(len(b))) for j in range(ncols)] for row in a]


def mat_vec(a: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    return [sum(entry * xi for entry, xi in zip(row, x, strict=True)) for row in a]


def to_int_matrix(rows: Sequence[Sequence[Fraction | int]]) -> IntMatrix:
    result = []
    for row in rows:
        converted = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise ValueError(f"expected an integer matrix, found entry {x}")
            converted.append(x.numerator)
        result.append(tuple(converted))
    return tuple(result)


@dataclass(frozen=True)
class SmithForm:
    """U * M * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ..."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.d[i][i] for i in range(min(len(self.d), len(self.v))))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def smith_normal_form(matrix: Sequence[Sequence[int]], ncols: int | None = None) -> SmithForm:
    """Smith normal form by row and column operations, pivoting on the entry of least absolute value.

    Written out rather than taken from sympy, whose Smith form returns the diagonal without the unimodular U and V.
    """
    a = [list(row) for row in matrix]
    rows = len(a)
    cols = ncols if ncols is not None else (len(a[0]) if a else 0)
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in itertools.chain(a, v):
            row[i], row[j] = row[j], row[i]

    def add_row(target: int, source: int, q: int) -> None:
        a[target] = [x + q * y for x, y in zip(a[target], a[source], strict=True)]
        u[target] = [x + q * y for x, y in zip(u[target], u[source], strict=True)]

    def add_col(target: int, source: int, q: int) -> None:
        for row in itertools.chain(a, v):
            row[target] += q * row[source]

    for t in range(min(rows, cols)):
        candidates = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j] != 0]
        if not candidates:
            break
        _, i, j = min(candidates)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            pivot = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // pivot))
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // pivot))
            leftovers = [(abs(a[i][t]), i, "row") for i in range(t + 1, rows) if a[i][t]]
            leftovers += [(abs(a[t][j]), j, "col") for j in range(t + 1, cols) if a[t][j]]
            if leftovers:
                _, k, kind = min(leftovers)
                if kind == "row":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            offending = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % pivot),
                None,
            )
            if offending is None:
                break
            add_row(t, offending, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    return SmithForm(
        u=tuple(tuple(row) for row in u),
        d=tuple(tuple(row) for row in a),
        v=tuple(tuple(row) for row in v),
    )


def hermite_normal_form(matrix: Sequence[Sequence[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Row-style Hermite normal form of the lattice spanned by the rows.

    Returns the nonzero rows and their pivot columns. Pivots are positive and entries above a pivot lie in [0, pivot).
    Pivots are chosen by least absolute value like the Smith form above; sympy's Hermite form is column-style and
    reports no pivots, which `reduce_by_lattice` needs.
    """
    a = [list(row) for row in matrix if any(row)]
    pivots: list[int] = []
    top = 0
    for c in range(ncols):
        if top == len(a):
            break
        found = False
        while True:
            nonzero = [i for i in range(top, len(a)) if a[i][c] != 0]
            if not nonzero:
                break
            found = True
            i = min(nonzero, key=lambda i: abs(a[i][c]))
            a[top], a[i] = a[i], a[top]
            clean = True
            for j in range(top + 1, len(a)):
                q = a[j][c] // a[top][c]
                a[j] = [x - q * y for x, y in zip(a[j], a[top], strict=True)]
                clean = clean and a[j][c] == 0
            if clean:
                break
        if not found:
            continue
        if a[top][c] < 0:
            a[top] = [-x for x in a[top]]
        for j in range(top):
            q = a[j][c] // a[top][c]
            a[j] = [x - q * y for x, y in zip(a[j], a[top], strict=True)]
        pivots.append(c)
        top += 1
    return a[:top], pivots


def reduce_by_lattice(x: Sequence[int], hnf: Sequence[Sequence[int]], pivots: Sequence[int]) -> list[int]:
    """The canonical representative of x modulo the lattice with the given Hermite basis."""
    x = list(x)
    for row, c in zip(hnf, pivots, strict=True):
        q = x[c] // row[c]
        if q:
            x = [xi - q * ri for xi, ri in zip(x, row, strict=True)]
    return x


@dataclass(frozen=True)
class FGAbelianGroup:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(self.torsion))
        if self.free_rank < 0:
            raise ValueError(f"free rank must be nonnegative, got {self.free_rank}")
        if any(k < 2 for k in self.torsion):
            raise ValueError(f"torsion factors must be at least 2, got {self.torsion}")
        if any(b % a for a, b in itertools.pairwise(self.torsion)):
            raise ValueError(f"torsion factors must form a divisibility chain, got {self.torsion}")

    def __str__(self) -> str:
        parts = [f"Z^{self.free_rank}"] if self.free_rank else []
        parts += [f"Z/{k}" for k in self.torsion]
        return " + ".join(parts) or "0"

    @property
    def rank(self) -> int:
        "Length of a coordinate tuple."
        return self.free_rank + len(self.torsion)

    def reduce(self, x: Sequence[int]) -> Element:
        if len(x) != self.rank:
            raise ValueError(f"element {tuple(x)} has {len(x)} coordinates, expected {self.rank} for {self}")
        d = self.free_rank
        return tuple(int(xi) for xi in x[:d]) + tuple(int(xi) % k for xi, k in zip(x[d:], self.torsion, strict=True))

    def zero(self) -> Element:
        return (0,) * self.rank

    def add(self, *xs: Sequence[int]) -> Element:
        return self.reduce([sum(column) for column in zip(*xs, strict=True)] if xs else self.zero())

    def neg(self, x: Sequence[int]) -> Element:
        return self.reduce([-xi for xi in x])

    def sub(self, x: Sequence[int], y: Sequence[int]) -> Element:
        return self.reduce([a - b for a, b in zip(x, y, strict=True)])

    def scale(self, n: int, x: Sequence[int]) -> Element:
        return self.reduce([n * xi for xi in x])

    def free_part(self, x: Sequence[int]) -> Element:
        return tuple(x[: self.free_rank])

    def is_torsion(self, x: Sequence[int]) -> bool:
        return not any(x[: self.free_rank])

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        "None for infinite groups."
        if not self.is_finite():
            return None
        order = 1
        for k in self.torsion:
            order *= k
        return order

    def torsion_elements(self) -> Iterator[Element]:
        zeros = (0,) * self.free_rank
        for residues in itertools.product(*(range(k) for k in self.torsion)):
            yield zeros + residues

    def elements(self) -> Iterator[Element]:
        if not self.is_finite():
            raise ValueError(f"cannot enumerate the infinite group {self}")
        return self.torsion_elements()

    def relation_matrix(self) -> IntMatrix:
        """The (d+s) x s matrix whose j-th column is k_j times the j-th torsion generator."""
        d, s = self.free_rank, len(self.torsion)
        return tuple(tuple(self.torsion[j] if i == d + j else 0 for j in range(s)) for i in range(d + s))

    def relations(self) -> list[Element]:
        "Columns of the relation matrix."
        d = self.free_rank
        return [tuple(k if i == d + j else 0 for i in range(self.rank)) for j, k in enumerate(self.torsion)]


def free_group(n: int) -> FGAbelianGroup:
    return FGAbelianGroup(n)


@dataclass(frozen=True)
class LatticeMap:
    """A map beta: Z^m -> N given by the images b_1, ..., b_m of the standard basis."""

    target: FGAbelianGroup
    columns: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.target.reduce(c) for c in self.columns))

    @property
    def source_rank(self) -> int:
        return len(self.columns)

    @property
    def lift_matrix(self) -> IntMatrix:
        "Column representatives as a (d+s) x m matrix."
        return tuple(tuple(c[i] for c in self.columns) for i in range(self.target.rank))

    @property
    def free_matrix(self) -> IntMatrix:
        "The d x m matrix of beta-bar on free parts."
        return self.lift_matrix[: self.target.free_rank]

    def free_column(self, i: int) -> Element:
        return self.target.free_part(self.columns[i])

    def __call__(self, x: Sequence[int]) -> Element:
        if len(x) != self.source_rank:
            raise ValueError(f"expected {self.source_rank} coordinates, got {len(x)}")
        return self.target.reduce(mat_vec(self.lift_matrix, x) if self.source_rank else self.target.zero())

    def restrict(self, indices: Sequence[int]) -> LatticeMap:
        return LatticeMap(self.target, tuple(self.columns[i] for i in indices))

    def free_rank_of_image(self) -> int:
        return linalg.rank(self.free_matrix, self.source_rank)

    def spans(self) -> bool:
        "Whether the free parts of the columns span N-bar over Q."
        return self.free_rank_of_image() == self.target.free_rank


@dataclass(frozen=True)
class GroupHom:
    source: FGAbelianGroup
    target: FGAbelianGroup
    matrix: IntMatrix

    def __post_init__(self):
        matrix = tuple(tuple(int(x) for x in row) for row in self.matrix)
        if len(matrix) != self.target.rank or any(len(row) != self.source.rank for row in matrix):
            raise ValueError(f"matrix shape does not match {self.source} -> {self.target}")
        # entries into Z/k_j only matter mod k_j
        d = self.target.free_rank
        matrix = matrix[:d] + tuple(tuple(x % k for x in row) for row, k in zip(matrix[d:], self.target.torsion, strict=True))
        object.__setattr__(self, "matrix", matrix)
        for relation in self.source.relations():
            if self(relation) != self.target.zero():
                raise ValueError(f"matrix is not well defined on the torsion of {self.source}")

    def __call__(self, x: Sequence[int]) -> Element:
        if not self.target.rank:
            return ()
        return self.target.reduce(mat_vec(self.matrix, x) if self.source.rank else self.target.zero())

    def compose(self, other: GroupHom) -> GroupHom:
        "self after other."
        if other.target != self.source:
            raise ValueError(f"cannot compose {other.source} -> {other.target} with {self.source} -> {self.target}")
        return GroupHom(other.source, self.target, tuple(map(tuple, mat_mul(self.matrix, other.matrix, other.source.rank))))

    def preimage(self, y: Sequence[int]) -> Element | None:
        """A canonical x with self(x) = y, or None if y is not in the image."""
        x = solve_modulo(self.matrix, self.source.rank, self.target.relation_matrix(), self.target.reduce(y))
        return None if x is None else self.source.reduce(x)

    def is_isomorphism(self) -> bool:
        # a surjection between isomorphic finitely generated abelian groups is injective
        return self.source == self.target and cokernel_of(self).group.rank == 0


@dataclass(frozen=True)
class Quotient:
    """source / <generators>, with a projection and an integer section of it."""

    source: FGAbelianGroup
    group: FGAbelianGroup
    projection: GroupHom
    lift_matrix: IntMatrix

    def lift(self, y: Sequence[int]) -> Element:
        "A representative in the source of the class y."
        if not self.group.rank:
            return self.source.zero()
        return self.source.reduce(mat_vec(self.lift_matrix, y))


def _present(source: FGAbelianGroup, generators: Sequence[Sequence[int]]) -> Quotient:
    n = source.rank
    columns = source.relations() + [source.reduce(g) for g in generators]
    presentation = [[c[i] for c in columns] for i in range(n)]
    snf = smith_normal_form(presentation, len(columns))
    diagonal = snf.diagonal
    r = snf.rank
    free_rows, _ = hermite_normal_form(snf.u[r:], n)
    assert len(free_rows) == n - r
    torsion_rows = [i for i in range(r) if diagonal[i] > 1]
    basis_change = free_rows + [list(row) for row in snf.u[:r]]
    inverse = to_int_matrix(linalg.inverse(basis_change))

    group = FGAbelianGroup(n - r, tuple(diagonal[i] for i in torsion_rows))
    projection_rows = [tuple(row) for row in free_rows] + [snf.u[i] for i in torsion_rows]
    lift_columns = list(range(n - r)) + [n - r + i for i in torsion_rows]
    lift_matrix = tuple(tuple(inverse[i][j] for j in lift_columns) for i in range(n))
    projection = GroupHom(source, group, tuple(projection_rows))
    return Quotient(source, group, projection, lift_matrix)


def quotient_by_columns(group: FGAbelianGroup, columns: Sequence[Sequence[int]]) -> Quotient:
    """N / <columns>."""
    return _present(group, columns)


def cokernel(f: LatticeMap) -> Quotient:
    return _present(f.target, f.columns)


def cokernel_of(hom: GroupHom) -> Quotient:
    images = [hom(tuple(int(i == j) for i in range(hom.source.rank))) for j in range(hom.source.rank)]
    return _present(hom.target, images)


def solve_modulo(
    matrix: Sequence[Sequence[int]],
    ncols: int,
    relations: Sequence[Sequence[int]],
    rhs: Sequence[int],
) -> list[int] | None:
    """An integer x with matrix * x = rhs modulo the columns of `relations`, or None.

    Among all solutions, returns the representative reduced by the Hermite basis of the solution lattice.
    """
    nrows = len(rhs)
    nrel = len(relations[0]) if relations else 0
    system = [list(matrix[i]) + list(relations[i]) for i in range(nrows)] if nrows else []
    width = ncols + nrel
    if not nrows:
        return [0] * ncols
    snf = smith_normal_form(system, width)
    transformed = mat_vec(snf.u, rhs)
    diagonal = snf.diagonal
    y = [0] * width
    for i, value in enumerate(transformed):
        d = diagonal[i] if i < len(diagonal) else 0
        if d == 0:
            if value != 0:
                return None
        elif value % d:
            return None
        else:
            y[i] = value // d
    particular = mat_vec(snf.v, y)[:ncols]
    kernel = [[snf.v[row][k] for row in range(ncols)] for k in range(snf.rank, width)]
    hnf, pivots = hermite_normal_form(kernel, ncols)
    return reduce_by_lattice(particular, hnf, pivots)


def solve_integer(f: LatticeMap, target: Sequence[int]) -> Element | None:
    """The canonical x in Z^m with f(x) = target, or None when target is not in the image."""
    x = solve_modulo(f.lift_matrix, f.source_rank, f.target.relation_matrix(), f.target.reduce(target))
    return None if x is None else tuple(x)


@dataclass(frozen=True)
class GaleDual:
    """DG(beta) and beta-dual: Z^m -> DG(beta).

    `lifts` and `relations` are the presentation beta was dualized from: the columns of beta lifted
    to Z^n, and the relations of its target as columns in Z^n. `quotient` presents DG(beta) as a
    quotient of Z^(m + r).
    """

    lifts: IntMatrix
    relations: IntMatrix
    quotient: Quotient
    beta_dual: LatticeMap = field(repr=False)

    @property
    def group(self) -> FGAbelianGroup:
        return self.quotient.group

    @property
    def source_rank(self) -> int:
        return self.beta_dual.source_rank


def dual_presentation(lifts: Sequence[Sequence[int]], relations: Sequence[Sequence[int]], m: int) -> GaleDual:
    """Gale dual of the map Z^m -> Z^n / im(relations) given by column lifts."""
    n = len(lifts)
    r = len(relations[0]) if n and relations and relations[0] else 0
    ambient = free_group(m + r)
    generators = [list(lifts[i]) + list(relations[i][:r]) for i in range(n)]
    quotient = _present(ambient, generators)
    columns = tuple(quotient.projection(tuple(int(k == i) for k in range(m + r))) for i in range(m))
    logger.debug("Gale dual of %d columns is %s", m, quotient.group)
    return GaleDual(
        lifts=tuple(tuple(row) for row in lifts),
        relations=tuple(tuple(row[:r]) for row in relations),
        quotient=quotient,
        beta_dual=LatticeMap(quotient.group, columns),
    )


def gale_dual(beta: LatticeMap) -> GaleDual:
    """DG(beta) = coker([B Q]^T) for the invariant-factor resolution 0 -> Z^s -> Z^(d+s) -> N -> 0."""
    return dual_presentation(beta.lift_matrix, beta.target.relation_matrix(), beta.source_rank)


def _solve_exact(relations: IntMatrix, rhs_columns: Sequence[Sequence[int]]) -> list[list[int]]:
    """X with relations * X = rhs, column by column; relations must be injective."""
    width = len(relations[0]) if relations else 0
    columns = []
    for rhs in rhs_columns:
        if width == 0:
            if any(rhs):
                raise ValueError("right-hand side is not in the span of the relations")
            columns.append([])
            continue
        x = linalg.solve(relations, width, rhs)
        if x is None:
            raise ValueError("right-hand side is not in the span of the relations")
        columns.append(list(to_int_matrix([x])[0]))
    # back to rows: width x len(rhs_columns)
    return [[columns[j][i] for j in range(len(rhs_columns))] for i in range(width)]


def induced_dual_map(
    first: GaleDual,
    second: GaleDual,
    column_map: Sequence[Sequence[int]],
    ambient_map: Sequence[Sequence[int]],
) -> GroupHom:
    """The map DG(second) -> DG(first) induced by a morphism of maps.

    The morphism is (A, P) with A: Z^m1 -> Z^m2 (`column_map`, m2 x m1) and P: Z^n1 -> Z^n2
    (`ambient_map`, n2 x n1) such that P B1 = B2 A and P R1 lands in im R2, both modulo im R2.
    """
    m1, m2 = first.source_rank, second.source_rank
    r1 = len(first.relations[0]) if first.relations and first.relations[0] else 0
    r2 = len(second.relations[0]) if second.relations and second.relations[0] else 0
    n2 = len(second.lifts)

    pb1 = mat_mul(ambient_map, first.lifts, m1) if n2 else []
    b2a = mat_mul(second.lifts, column_map, m1) if n2 else []
    discrepancy = [[pb1[i][j] - b2a[i][j] for j in range(m1)] for i in range(n2)]
    pr1 = mat_mul(ambient_map, first.relations, r1) if n2 else []
    w = _solve_exact(second.relations, [[row[j] for row in discrepancy] for j in range(m1)])
    x = _solve_exact(second.relations, [[row[j] for row in pr1] for j in range(r1)])

    # F(y, z) = (A y, W y + X z) maps Z^(m1+r1) to Z^(m2+r2); its transpose carries DG(second) to DG(first)
    f = [list(column_map[i]) + [0] * r1 for i in range(m2)]
    f += [list(w[i]) + list(x[i]) for i in range(r2)]
    f_transpose = [[f[i][j] for i in range(m2 + r2)] for j in range(m1 + r1)]
    lifted = mat_mul(f_transpose, second.quotient.lift_matrix, second.group.rank)
    matrix = mat_mul(first.quotient.projection.matrix, lifted, second.group.rank)
    return GroupHom(second.group, first.group, tuple(map(tuple, matrix)))
