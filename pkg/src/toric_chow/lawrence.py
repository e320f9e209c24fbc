"""Stacky hyperplane arrangements and their Lawrence toric DM stacks.

An arrangement (N, beta, theta) has nontorsion columns b_1..b_m and a parameter theta in DG(beta),
written in the coordinates `abelian.gale_dual` emits. Its Lawrence lifting is the Gale dual of
(beta-dual, -beta-dual): 2m vectors b_{L,1..m}, b'_{L,1..m} in N_L. Ray k < m of the Lawrence fan is
b_{L,k} and ray m + k is b'_{L,k}.
"""

from __future__ import annotations

import itertools
import logging
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import abelian, linalg
from .abelian import Element, GaleDual, GroupHom, LatticeMap
from .errors import FanError, InstanceError, NoIntegralLiftError, NotGenericError, RankError, VerificationError
from .fan import Cone, SimplicialFan, cone_label
from .stacky import ExtendedStackyFan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StackyArrangement:
    beta: LatticeMap
    theta: Element
    psi: tuple[int, ...] | None = None

    def __post_init__(self):
        for i in range(self.m):
            if self.group.is_torsion(self.beta.columns[i]):
                raise InstanceError(f"column {i} of beta is torsion")
        try:
            object.__setattr__(self, "theta", self.dual.group.reduce(self.theta))
        except ValueError as e:
            raise InstanceError(f"theta does not fit DG(beta) = {self.dual.group}: {e}") from e
        if self.psi is not None:
            if len(self.psi) != self.m:
                raise InstanceError(f"psi has {len(self.psi)} entries, expected {self.m}")
            if self.dual.beta_dual(self.psi) != self.dual.group.neg(self.theta):
                raise InstanceError("psi is not a lifting of theta: beta-dual(psi) != -theta")

    @property
    def group(self):
        return self.beta.target

    @property
    def m(self) -> int:
        return self.beta.source_rank

    @cached_property
    def dual(self) -> GaleDual:
        return abelian.gale_dual(self.beta)

    def is_independent(self, subset: Iterable[int]) -> bool:
        return linalg.is_independent([self.beta.free_column(i) for i in sorted(subset)])


@dataclass(frozen=True)
class ColumnBasis:
    """A column basis C of the free part of beta-dual and the solution of sum lambda_j a_j = theta there."""

    columns: tuple[int, ...]
    lambdas: tuple[Fraction, ...]

    def is_generic(self) -> bool:
        return all(self.lambdas)

    def unstable(self, m: int) -> Cone:
        "sigma(C, theta): b_{L,j} where lambda_j > 0, b'_{L,j} where lambda_j < 0."
        return frozenset(j if a > 0 else m + j for j, a in zip(self.columns, self.lambdas, strict=True))

    def max_cone(self, m: int) -> Cone:
        return frozenset(range(2 * m)) - self.unstable(m)


@dataclass(frozen=True)
class GenericityReport:
    generic: bool
    table: tuple[ColumnBasis, ...]
    witness: tuple[tuple[int, ...], int] | None = None


def _free_dual_columns(arr: StackyArrangement) -> list[Element]:
    return [arr.dual.beta_dual.free_column(i) for i in range(arr.m)]


def _column_bases(arr: StackyArrangement) -> list[tuple[int, ...]]:
    if not arr.beta.spans():
        raise RankError(f"the columns of beta do not span N-bar (rank {arr.beta.free_rank_of_image()} < {arr.group.free_rank})")
    r = arr.dual.group.free_rank
    columns = _free_dual_columns(arr)
    return [subset for subset in itertools.combinations(range(arr.m), r) if linalg.is_independent([columns[i] for i in subset])]


def check_generic(arr: StackyArrangement) -> GenericityReport:
    """theta is generic iff every column basis expresses theta-bar with all coefficients nonzero."""
    columns = _free_dual_columns(arr)
    target = arr.dual.group.free_part(arr.theta)

    def solve(basis: tuple[int, ...]) -> ColumnBasis:
        lambdas = linalg.solve_columns([columns[i] for i in basis], target)
        assert lambdas is not None
        return ColumnBasis(basis, tuple(lambdas))

    bases = _column_bases(arr)
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 8)) as executor:
        table = tuple(executor.map(solve, bases))

    for entry in table:
        if not entry.is_generic():
            j = next(j for j, a in zip(entry.columns, entry.lambdas, strict=True) if a == 0)
            return GenericityReport(False, table, witness=(entry.columns, j))
    return GenericityReport(True, table)


@dataclass(frozen=True)
class Hyperplane:
    normal: Element
    offset: int


def lifting(arr: StackyArrangement) -> tuple[int, ...]:
    "psi with beta-dual(psi) = -theta: the given one, else the canonical integral solution."
    if arr.psi is not None:
        return arr.psi
    psi = abelian.solve_integer(arr.dual.beta_dual, arr.dual.group.neg(arr.theta))
    if psi is None:
        raise NoIntegralLiftError(f"-theta = {arr.dual.group.neg(arr.theta)} is not in the image of beta-dual")
    return psi


def hyperplanes(arr: StackyArrangement) -> list[Hyperplane]:
    """H_i = {v : <b_i-bar, v> + r_i = 0}, determined up to a common translation."""
    psi = lifting(arr)
    return [Hyperplane(arr.beta.free_column(i), r) for i, r in enumerate(psi)]


def offset_translation(arr: StackyArrangement, psi: Sequence[int], psi2: Sequence[int]) -> tuple[Fraction, ...] | None:
    """The u with r'_i - r_i = <b_i-bar, u> for all i, or None when the offsets are not a translate."""
    rows = [arr.beta.free_column(i) for i in range(arr.m)]
    difference = [b - a for a, b in zip(psi, psi2, strict=True)]
    u = linalg.solve(rows, arr.group.free_rank, difference)
    return None if u is None else tuple(u)


@dataclass(frozen=True)
class LawrenceData:
    arrangement: StackyArrangement
    dual: GaleDual
    "Presentation of N_L as the Gale dual of (beta-dual, -beta-dual)."
    inclusion: GroupHom
    "N -> N_L with b_i mapping to b_{L,i} - b'_{L,i}."
    fan: SimplicialFan | None = None
    table: tuple[ColumnBasis, ...] = field(default=())

    @property
    def group(self):
        return self.dual.group

    @property
    def beta(self) -> LatticeMap:
        return self.dual.beta_dual

    @property
    def m(self) -> int:
        return self.arrangement.m

    def lift(self, subset: Iterable[int]) -> Cone:
        "The Lawrence lifting {b_{L,i}, b'_{L,i}} of a subset of columns."
        return frozenset(itertools.chain.from_iterable((i, self.m + i) for i in subset))

    def unstable_sets(self) -> list[Cone]:
        return [entry.unstable(self.m) for entry in self.table]


def _inclusion(arr: StackyArrangement, lawrence: GaleDual) -> GroupHom:
    """The map N -> N_L, through the presentation of N_L coming from the lifts of +-e_i in Z^(m+s)."""
    dual = arr.dual
    m, n = arr.m, arr.group.rank
    width = dual.quotient.source.rank
    lifts = [[int(i == k) - int(i == k - m) if i < m else 0 for k in range(2 * m)] for i in range(width)]
    relations = [[dual.lifts[j][i] if i < m else dual.relations[j][i - m] for j in range(n)] for i in range(width)]
    natural = abelian.dual_presentation(lifts, relations, 2 * m)
    to_lawrence = abelian.induced_dual_map(
        first=lawrence,
        second=natural,
        column_map=abelian.identity(2 * m),
        ambient_map=dual.quotient.lift_matrix,
    )
    assert to_lawrence.is_isomorphism()
    # in the natural presentation e_k - e_(m+k) = -b_k
    images = [to_lawrence(natural.quotient.projection((0,) * (2 * m) + tuple(-int(i == j) for i in range(n)))) for j in range(n)]
    rows = [[image[r] for image in images] for r in range(lawrence.group.rank)]
    return GroupHom(arr.group, lawrence.group, tuple(map(tuple, rows)))


def lawrence_lift(arr: StackyArrangement) -> LawrenceData:
    if not arr.beta.spans():
        raise RankError("the columns of beta do not span N-bar")
    a = arr.dual.beta_dual
    doubled = LatticeMap(a.target, a.columns + tuple(a.target.neg(c) for c in a.columns))
    lawrence = abelian.gale_dual(doubled)
    logger.debug("N_L = %s", lawrence.group)
    return LawrenceData(arr, lawrence, _inclusion(arr, lawrence))


def lawrence_fan(arr: StackyArrangement) -> LawrenceData:
    """Lawrence data with the fan whose maximal cones are the complements of the sigma(C, theta)."""
    report = check_generic(arr)
    if not report.generic:
        assert report.witness is not None
        basis, j = report.witness
        raise NotGenericError(f"theta lies on the hyperplane of column basis {list(basis)}: lambda_{j} = 0", witness=report.witness)
    data = lawrence_lift(arr)
    m = arr.m
    rays = tuple(data.beta.free_column(k) for k in range(2 * m))
    max_cones = tuple(entry.max_cone(m) for entry in report.table)
    fan = SimplicialFan(data.group.free_rank, rays, max_cones)
    logger.debug("Lawrence fan has %d maximal cones on %d rays", len(fan.max_cones), len(rays))
    return LawrenceData(arr, data.dual, data.inclusion, fan, report.table)


def lawrence_stacky_fan(arr: StackyArrangement, data: LawrenceData | None = None) -> ExtendedStackyFan:
    data = data if data is not None and data.fan is not None else lawrence_fan(arr)
    assert data.fan is not None
    return ExtendedStackyFan(data.beta, data.fan, 2 * arr.m)


def link(arr: StackyArrangement, sigma: Iterable[int]) -> tuple[int, ...]:
    "Columns j outside sigma with sigma + {j} independent."
    sigma = frozenset(sigma)
    return tuple(j for j in range(arr.m) if j not in sigma and arr.is_independent(sigma | {j}))


def quotient_arrangement(arr: StackyArrangement, sigma: Iterable[int]) -> StackyArrangement:
    """(N(sigma), beta(sigma), theta(sigma)): the link columns in N / N_sigma.

    theta(sigma) is the image of theta under the restriction DG(beta) -> DG(beta-tilde), beta-tilde the
    columns of sigma and its link, pulled back along the isomorphism DG(beta(sigma)) -> DG(beta-tilde).
    """
    sigma = frozenset(sigma)
    if not arr.is_independent(sigma):
        raise FanError(f"{cone_label(sigma)} is not an independent set of columns", witness=cone_label(sigma))
    if not sigma:
        return arr
    group = arr.group
    quotient = abelian.quotient_by_columns(group, [arr.beta.columns[i] for i in sorted(sigma)])
    labels = link(arr, sigma)
    beta_sigma = LatticeMap(quotient.group, tuple(quotient.projection(arr.beta.columns[j]) for j in labels))

    support = sorted(sigma | set(labels))
    tilde = abelian.gale_dual(arr.beta.restrict(support))
    inclusion = [[int(support[k] == i) for k in range(len(support))] for i in range(arr.m)]
    restriction = abelian.induced_dual_map(tilde, arr.dual, inclusion, abelian.identity(group.rank))
    projection = [[int(support[k] == j) for k in range(len(support))] for j in labels]
    comparison = abelian.induced_dual_map(tilde, abelian.gale_dual(beta_sigma), projection, quotient.projection.matrix)
    theta = comparison.preimage(restriction(arr.theta))
    if theta is None:
        raise VerificationError(f"theta has no image in DG(beta({list(cone_label(sigma))}))")
    logger.debug("Quotient by %s: N(sigma) = %s, link %s, theta(sigma) = %s", cone_label(sigma), quotient.group, labels, theta)
    return StackyArrangement(beta_sigma, theta)
