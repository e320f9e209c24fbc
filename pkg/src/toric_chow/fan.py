"""Simplicial fans in N-bar (x) Q.

A fan is a list of integral ray generators and a list of maximal cones. Cones are frozensets of
0-based ray indices; every subset of a maximal cone is a cone.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import abelian, linalg, polyhedral
from .errors import FanError

logger = logging.getLogger(__name__)

Cone = frozenset[int]
Vector = tuple[int, ...]


def cone_label(cone: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(cone))


@dataclass(frozen=True)
class SimplicialFan:
    dimension: int
    rays: tuple[Vector, ...]
    max_cones: tuple[Cone, ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in ray) for ray in self.rays))
        cones = {frozenset(cone) for cone in self.max_cones}
        object.__setattr__(self, "max_cones", tuple(sorted(cones, key=lambda c: (-len(c), cone_label(c)))))
        self._validate()

    def _validate(self) -> None:
        for i, ray in enumerate(self.rays):
            if len(ray) != self.dimension:
                raise FanError(f"ray {i} has {len(ray)} coordinates, expected {self.dimension}")
            if not any(ray):
                raise FanError(f"ray {i} is zero", witness=i)
        for cone in self.max_cones:
            if any(not 0 <= i < len(self.rays) for i in cone):
                raise FanError(f"cone {cone_label(cone)} references a missing ray", witness=cone_label(cone))
            if not linalg.is_independent([self.rays[i] for i in sorted(cone)]):
                raise FanError(f"cone {cone_label(cone)} is not simplicial", witness=cone_label(cone))
        for first, second in itertools.combinations(self.max_cones, 2):
            if first <= second or second <= first:
                raise FanError(f"maximal cone {cone_label(first)} is nested in {cone_label(second)}")
            point = self._overlap(first, second)
            if point is not None:
                raise FanError(
                    f"cones {cone_label(first)} and {cone_label(second)} overlap beyond a common face at {point}",
                    witness=(cone_label(first), cone_label(second), point),
                )

    def _overlap(self, first: Cone, second: Cone) -> tuple[Fraction, ...] | None:
        """A point of both cones whose expression uses a ray outside their common face, if any."""
        left, right = sorted(first), sorted(second)
        nvars = len(left) + len(right)
        a = [[self.rays[i][k] for i in left] + [-self.rays[j][k] for j in right] for k in range(self.dimension)]
        a.append([int(i not in second) for i in left] + [int(j not in first) for j in right])
        b = [0] * self.dimension + [1]
        x = polyhedral.feasible_point(a, b, nvars)
        if x is None:
            return None
        return tuple(sum((x[t] * self.rays[i][k] for t, i in enumerate(left)), Fraction(0)) for k in range(self.dimension))

    @cached_property
    def all_cones(self) -> tuple[Cone, ...]:
        faces: set[Cone] = set()
        for cone in self.max_cones:
            for size in range(len(cone) + 1):
                faces.update(frozenset(face) for face in itertools.combinations(sorted(cone), size))
        return tuple(sorted(faces, key=lambda c: (len(c), cone_label(c))))

    def cones(self) -> tuple[Cone, ...]:
        return self.all_cones

    @cached_property
    def _cone_set(self) -> frozenset[Cone]:
        return frozenset(self.all_cones)

    def is_cone(self, rays: Iterable[int]) -> bool:
        return frozenset(rays) in self._cone_set

    def is_full_dimensional(self, cone: Cone) -> bool:
        return len(cone) == self.dimension

    @cached_property
    def _solvers(self) -> dict[tuple[int, ...], linalg.ColumnSolver | None]:
        "Coordinate solvers of the maximal cones; faces are added as they are queried."
        return {labels: linalg.column_solver([self.rays[i] for i in labels], self.dimension) for labels in map(cone_label, self.max_cones)}

    def _solver(self, labels: tuple[int, ...]) -> linalg.ColumnSolver | None:
        if labels not in self._solvers:
            self._solvers[labels] = linalg.column_solver([self.rays[i] for i in labels], self.dimension)
        return self._solvers[labels]

    @cached_property
    def _minimal_cones(self) -> dict[tuple, Cone | None]:
        return {}

    def span_coordinates(self, cone: Iterable[int], v: Sequence[Fraction | int]) -> tuple[Fraction, ...] | None:
        """Coefficients a_i (in sorted ray order, any sign) with v = sum a_i b_i, or None if v is not in the span."""
        labels = cone_label(cone)
        solver = self._solver(labels)
        if solver is not None:
            return solver(v)
        solved = linalg.solve_columns([self.rays[i] for i in labels], v)
        return None if solved is None else tuple(solved)

    def cone_coordinates(self, cone: Iterable[int], v: Sequence[Fraction | int]) -> tuple[Fraction, ...] | None:
        """Coefficients a_i >= 0 (in sorted ray order) with v = sum a_i b_i, or None if v is not in the cone."""
        coordinates = self.span_coordinates(cone, v)
        if coordinates is None or any(a < 0 for a in coordinates):
            return None
        return coordinates

    def minimal_cone_containing(self, v: Sequence[Fraction | int]) -> Cone | None:
        key = tuple(v)
        if key in self._minimal_cones:
            return self._minimal_cones[key]
        found = None
        for cone in self.max_cones:
            coordinates = self.cone_coordinates(cone, key)
            if coordinates is not None:
                found = frozenset(i for i, a in zip(cone_label(cone), coordinates, strict=True) if a != 0)
                break
        self._minimal_cones[key] = found
        return found

    def support_contains(self, v: Sequence[Fraction | int]) -> bool:
        return self.minimal_cone_containing(v) is not None

    def link(self, cone: Iterable[int]) -> tuple[Cone, ...]:
        cone = frozenset(cone)
        return tuple(tau for tau in self.all_cones if not tau & cone and self.is_cone(tau | cone))

    def link_rays(self, cone: Iterable[int]) -> tuple[int, ...]:
        cone = frozenset(cone)
        return tuple(j for j in range(len(self.rays)) if j not in cone and self.is_cone(cone | {j}))

    def max_cones_containing(self, cone: Iterable[int]) -> tuple[Cone, ...]:
        cone = frozenset(cone)
        return tuple(sigma for sigma in self.max_cones if cone <= sigma)

    def minimal_non_faces(self) -> tuple[Cone, ...]:
        """Minimal subsets of rays spanning no cone: the generators of the Stanley–Reisner ideal."""
        result = []
        for size in range(1, self.dimension + 2):
            for subset in itertools.combinations(range(len(self.rays)), size):
                candidate = frozenset(subset)
                if self.is_cone(candidate):
                    continue
                if all(self.is_cone(candidate - {i}) for i in candidate):
                    result.append(candidate)
        return tuple(result)

    def quotient(self, cone: Iterable[int]) -> QuotientFan:
        """The fan of images of cones containing `cone` in N-bar / (span of its rays), on the link rays."""
        cone = frozenset(cone)
        if not self.is_cone(cone):
            raise FanError(f"{cone_label(cone)} is not a cone of the fan")
        lattice = abelian.free_group(self.dimension)
        quotient = abelian.quotient_by_columns(lattice, [self.rays[i] for i in sorted(cone)])
        labels = self.link_rays(cone)
        index = {j: k for k, j in enumerate(labels)}
        group = quotient.group
        rays = tuple(group.free_part(quotient.projection(self.rays[j])) for j in labels)
        max_cones = tuple(frozenset(index[j] for j in sigma - cone) for sigma in self.max_cones_containing(cone))
        return QuotientFan(SimplicialFan(group.free_rank, rays, max_cones), labels)

    def relation_space(self) -> list[list[Fraction]]:
        return relation_space(self.rays, self.dimension)


def relation_space(rays: Sequence[Sequence[int]], dimension: int) -> list[list[Fraction]]:
    "Reduced basis of the linear relations among the rays."
    if not rays:
        return []
    relations = linalg.nullspace(linalg.transpose(rays, dimension), len(rays))
    reduced, _ = linalg.row_reduce(relations, len(rays))
    return reduced


@dataclass(frozen=True)
class QuotientFan:
    fan: SimplicialFan
    labels: tuple[int, ...]
    "labels[k] is the ray of the original fan whose image is ray k."


def fans_equivalent(first: SimplicialFan, second: SimplicialFan, relabel: Mapping[int, int]) -> bool:
    """Whether two fans agree under a bijection of rays.

    The maximal cones must correspond, and the rays must satisfy the same linear relations, which pins
    down the ray configurations up to a linear isomorphism.
    """
    if len(first.rays) != len(second.rays) or first.dimension != second.dimension:
        return False
    if sorted(relabel) != list(range(len(first.rays))) or sorted(relabel.values()) != list(range(len(second.rays))):
        return False
    mapped = {frozenset(relabel[i] for i in cone) for cone in first.max_cones}
    if mapped != set(second.max_cones):
        return False
    permuted = [second.rays[relabel[i]] for i in range(len(first.rays))]
    return first.relation_space() == relation_space(permuted, second.dimension)


@dataclass(frozen=True)
class RegularityReport:
    regular: bool
    weights: tuple[Fraction, ...] | None = None
    witness: str | None = None


def _boundary_violation(fan: SimplicialFan) -> str | None:
    """Check that every facet lying in a single maximal cone is on the boundary of pos(rays)."""
    owners: dict[Cone, list[Cone]] = {}
    for sigma in fan.max_cones:
        for facet in itertools.combinations(sorted(sigma), len(sigma) - 1):
            owners.setdefault(frozenset(facet), []).append(sigma)
    for facet, sigmas in sorted(owners.items(), key=lambda item: cone_label(item[0])):
        if len(sigmas) > 1:
            continue
        (sigma,) = sigmas
        (opposite,) = sigma - facet
        normals = linalg.nullspace([fan.rays[i] for i in sorted(facet)], fan.dimension) if facet else [
            [Fraction(int(k == j)) for k in range(fan.dimension)] for j in range(fan.dimension)
        ]
        assert len(normals) == 1
        normal = normals[0]
        if sum((a * b for a, b in zip(normal, fan.rays[opposite], strict=True)), Fraction(0)) < 0:
            normal = [-a for a in normal]
        for j, ray in enumerate(fan.rays):
            if sum((a * b for a, b in zip(normal, ray, strict=True)), Fraction(0)) < 0:
                return f"facet {cone_label(facet)} lies in one maximal cone but ray {j} is beyond it"
    return None


def check_regular_triangulation(dimension: int, rays: Sequence[Sequence[int]], max_cones: Sequence[Iterable[int]]) -> RegularityReport:
    """Whether the cones form a regular triangulation of the rays spanning N-bar (x) Q.

    Looks for heights w, one per ray, such that on every maximal cone the linear function interpolating w
    lies strictly below w_j at every ray j outside the cone. The slack of the tightest inequality is
    maximized by Fourier–Motzkin elimination; the triangulation is regular iff the optimum is positive.
    """
    try:
        fan = SimplicialFan(dimension, tuple(map(tuple, rays)), tuple(frozenset(cone) for cone in max_cones))
    except FanError as e:
        return RegularityReport(False, witness=str(e))

    if linalg.rank(fan.rays, dimension) != dimension:
        return RegularityReport(False, witness="rays do not span")
    for sigma in fan.max_cones:
        if not fan.is_full_dimensional(sigma):
            return RegularityReport(False, witness=f"maximal cone {cone_label(sigma)} is not full dimensional")
    used = set().union(*fan.max_cones) if fan.max_cones else set()
    if dimension == 0:
        return RegularityReport(True, weights=tuple(Fraction(0) for _ in fan.rays))
    violation = _boundary_violation(fan)
    if violation is not None:
        return RegularityReport(False, witness=violation)

    # heights on the first maximal cone are fixed to zero; the rest are variables, then the slack t
    pinned = fan.max_cones[0]
    free = [j for j in range(len(fan.rays)) if j not in pinned]
    variable = {j: k for k, j in enumerate(free)}
    slack = len(free)
    inequalities = []
    for sigma in fan.max_cones:
        labels = cone_label(sigma)
        for j in range(len(fan.rays)):
            if j in sigma:
                continue
            coordinates = fan.span_coordinates(labels, fan.rays[j])
            assert coordinates is not None
            coefficients = [Fraction(0)] * (slack + 1)
            if j in variable:
                coefficients[variable[j]] += 1
            for i, c in zip(labels, coordinates, strict=True):
                if i in variable:
                    coefficients[variable[i]] -= c
            coefficients[slack] = Fraction(-1)
            inequalities.append(polyhedral.inequality(coefficients, 0, index=len(inequalities)))
    inequalities.append(polyhedral.inequality([0] * slack + [-1], 1, index=len(inequalities)))

    result = polyhedral.maximize(inequalities, slack + 1, slack)
    logger.debug(
        "Regularity: %d fold inequalities over %d heights, %d rays unused", len(inequalities) - 1, slack, len(fan.rays) - len(used)
    )
    if result is None or result[0] <= 0:
        return RegularityReport(False, witness="no strictly convex height function exists")
    _, point = result
    weights = tuple(point[variable[j]] if j in variable else Fraction(0) for j in range(len(fan.rays)))
    return RegularityReport(True, weights=weights)
