"""Extended stacky fans, their Box elements, quotient stacky fans and r-inertia components."""

from __future__ import annotations

import itertools
import logging
import math
import os
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import abelian, linalg
from .abelian import Element, FGAbelianGroup, LatticeMap
from .errors import FanError, NotSemiProjectiveError
from .fan import Cone, SimplicialFan, cone_label

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtendedStackyFan:
    """(N, fan, beta): the fan lives on the free parts of the first n columns of beta; columns n..m-1 are extra."""

    beta: LatticeMap
    fan: SimplicialFan
    n: int

    def __post_init__(self):
        if self.n > self.beta.source_rank:
            raise FanError(f"{self.n} rays but only {self.beta.source_rank} columns")
        if len(self.fan.rays) != self.n:
            raise FanError(f"fan has {len(self.fan.rays)} rays, expected {self.n}")
        if self.fan.dimension != self.group.free_rank:
            raise FanError(f"fan lives in dimension {self.fan.dimension}, but {self.group} has free rank {self.group.free_rank}")
        for i in range(self.n):
            if self.fan.rays[i] != self.beta.free_column(i):
                raise FanError(f"ray {i} is not the free part of column {i}")

    @property
    def group(self) -> FGAbelianGroup:
        return self.beta.target

    @property
    def m(self) -> int:
        return self.beta.source_rank

    @property
    def extra(self) -> range:
        return range(self.n, self.m)

    def column(self, i: int) -> Element:
        return self.beta.columns[i]

    def combination(self, coefficients: Iterable[tuple[int, int]]) -> Element:
        "sum of c * b_i over (i, c) pairs."
        return self.group.add(self.group.zero(), *(self.group.scale(c, self.column(i)) for i, c in coefficients))


def stacky_fan(beta: LatticeMap, max_cones: Sequence[Iterable[int]], n: int | None = None) -> ExtendedStackyFan:
    """Build the stacky fan whose rays are the free parts of the first n columns of beta."""
    n = beta.source_rank if n is None else n
    rays = tuple(beta.free_column(i) for i in range(n))
    fan = SimplicialFan(beta.target.free_rank, rays, tuple(frozenset(cone) for cone in max_cones))
    return ExtendedStackyFan(beta, fan, n)


@dataclass(frozen=True)
class BoxElement:
    """A lattice element v with v-bar = sum a_i b_i-bar over its minimal cone, 0 < a_i < 1."""

    v: Element
    cone: Cone
    coordinates: tuple[tuple[int, Fraction], ...]

    @property
    def age(self) -> Fraction:
        return sum((a for _, a in self.coordinates), Fraction(0))

    def coefficient(self, i: int) -> Fraction:
        return dict(self.coordinates).get(i, Fraction(0))

    def is_torsion(self) -> bool:
        return not self.cone

    def sort_key(self) -> tuple:
        return (self.age, self.v)


def fractional_representatives(beta: LatticeMap, cone: Iterable[int]) -> list[BoxElement]:
    """Representatives with coordinates in [0,1) of the finite group Sat(cone) / N_cone.

    Sat(cone) is the set of elements whose free part lies in the span of the cone; the classes are the
    torsion elements of N / N_cone.
    """
    group = beta.target
    labels = cone_label(cone)
    quotient = abelian.quotient_by_columns(group, [beta.columns[i] for i in labels])
    columns = [beta.free_column(i) for i in labels]
    result = []
    for y in quotient.group.torsion_elements():
        x = quotient.lift(y)
        coordinates = linalg.solve_columns(columns, group.free_part(x))
        assert coordinates is not None, "torsion class outside the span of its cone"
        floors = [math.floor(a) for a in coordinates]
        v = group.sub(x, group.add(group.zero(), *(group.scale(f, beta.columns[i]) for i, f in zip(labels, floors, strict=True))))
        fractional = [(i, a - f) for i, a, f in zip(labels, coordinates, floors, strict=True) if a != f]
        result.append(BoxElement(v, frozenset(i for i, _ in fractional), tuple(fractional)))
    return sorted(result, key=BoxElement.sort_key)


def box_of_cone(sf: ExtendedStackyFan, cone: Iterable[int]) -> list[BoxElement]:
    cone = frozenset(cone)
    if not sf.fan.is_full_dimensional(cone):
        raise FanError(f"cone {cone_label(cone)} is not top dimensional")
    return fractional_representatives(sf.beta, cone)


def top_cones(sf: ExtendedStackyFan) -> list[Cone]:
    return [cone for cone in sf.fan.max_cones if sf.fan.is_full_dimensional(cone)]


def box_of_fan(sf: ExtendedStackyFan) -> list[BoxElement]:
    """Box of the stacky fan: union of the boxes of the top-dimensional cones, deduplicated by v."""
    cones = top_cones(sf)
    if not cones:
        raise FanError("the fan has no top-dimensional cone")
    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 8)) as executor:
        futures = [executor.submit(box_of_cone, sf, cone) for cone in cones]

    box: dict[Element, BoxElement] = {}
    for cone, future in zip(cones, futures, strict=True):
        elements = future.result()
        logger.debug("Box of cone %s has %d elements", cone_label(cone), len(elements))
        for element in elements:
            box.setdefault(element.v, element)
    return sorted(box.values(), key=BoxElement.sort_key)


def quotient_stacky_fan(sf: ExtendedStackyFan, cone: Iterable[int]) -> ExtendedStackyFan:
    """(N(sigma), fan / sigma, beta(sigma)) with beta(sigma) the images of the link rays, then of the extra columns."""
    cone = frozenset(cone)
    if not cone:
        return sf
    if not any(cone <= top for top in top_cones(sf)):
        raise NotSemiProjectiveError(f"cone {cone_label(cone)} lies in no top-dimensional cone")
    quotient = abelian.quotient_by_columns(sf.group, [sf.column(i) for i in sorted(cone)])
    link = sf.fan.link_rays(cone)
    index = {j: k for k, j in enumerate(link)}
    columns = [quotient.projection(sf.column(j)) for j in link] + [quotient.projection(sf.column(k)) for k in sf.extra]
    beta = LatticeMap(quotient.group, tuple(columns))
    max_cones = [frozenset(index[j] for j in sigma - cone) for sigma in sf.fan.max_cones_containing(cone)]
    return stacky_fan(beta, max_cones, n=len(link))


@dataclass(frozen=True)
class InertiaComponent:
    elements: tuple[BoxElement, ...]
    cone: Cone


def inertia_components(sf: ExtendedStackyFan, r: int) -> list[InertiaComponent]:
    """Tuples of box elements whose images lie in a common cone, with that minimal cone."""
    if r < 1:
        raise ValueError(f"order must be positive, got {r}")
    box = box_of_fan(sf)
    components = []
    for elements in itertools.product(box, repeat=r):
        cone = frozenset().union(*(v.cone for v in elements))
        if sf.fan.is_cone(cone):
            components.append(InertiaComponent(elements, cone))
    return components


def inverse_box(sf: ExtendedStackyFan, v: BoxElement) -> BoxElement:
    """The box element with coordinates 1 - a_i on the same cone; the group inverse for torsion v."""
    w = sf.group.sub(sf.combination((i, 1) for i in sorted(v.cone)), v.v)
    return BoxElement(w, v.cone, tuple((i, 1 - a) for i, a in v.coordinates))
