"""Orbifold Chow rings of semi-projective toric DM stacks.

The deformed ring Q[N_Sigma] is a free module over the Stanley–Reisner ring with one generator y^v per
box element v: every lattice point c of the support is uniquely v + sum m_i b_i. A monomial is therefore
a pair (sector, exponent vector) and is nonzero exactly when the sector's cone together with the support
of the exponents spans a cone. The Chow ring is the quotient by the ideal of the linear forms
sum e(b_i) y^{b_i}, computed degree by degree with exact row reduction.

The same engine presents the hypertoric ring, where sectors are the box elements of a multi-fan and
faces are independent sets.
"""

from __future__ import annotations

import logging
import math
import os
from collections import defaultdict
from collections.abc import Callable, Hashable, Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cache, lru_cache

from . import linalg
from .abelian import Element
from .errors import FanError, MalformedTripleError, NotFiniteError, NotSemiProjectiveError
from .fan import check_regular_triangulation, cone_label
from .stacky import BoxElement, ExtendedStackyFan, box_of_fan, inverse_box, quotient_stacky_fan

logger = logging.getLogger(__name__)

DEFAULT_DEGREE_CAP = 64

Monomial = tuple[int, tuple[int, ...]]
"(sector index, exponents over the variables)"

DeformedRingElement = dict[Element, Fraction]
"Lattice points of N_Sigma with their nonzero coefficients."


@dataclass(frozen=True)
class Sector:
    key: Hashable
    support: frozenset[int]
    shift: Fraction
    label: object


@dataclass(frozen=True)
class GradedPiece:
    degree: Fraction
    monomials: tuple[Monomial, ...]
    "All nonzero monomials of this degree, largest first."
    basis: tuple[Monomial, ...]
    reducers: Mapping[Monomial, Mapping[Monomial, Fraction]]
    "Each leading monomial with the reduced relation it leads: 1 at itself, basis monomials otherwise."


class GradedPresentation:
    """A finite-dimensional graded quotient of a free module over a Stanley–Reisner ring.

    Monomials are ordered lexicographically on exponents, variables by index, then by the box generator:
    the untwisted sector has none, earlier sectors count as larger variables. The standard monomials of
    each degree form the basis; every other monomial has a reducer.
    """

    def __init__(
        self,
        sectors: Sequence[Sector],
        nvars: int,
        linear_forms: Sequence[Sequence[Fraction | int]],
        is_face: Callable[[frozenset[int]], bool],
        degree_cap: int = DEFAULT_DEGREE_CAP,
    ):
        self.sectors = tuple(sectors)
        self.nvars = nvars
        self.linear_forms = tuple(tuple(Fraction(x) for x in form) for form in linear_forms)
        self.is_face = cache(is_face)
        self.sector_index = {sector.key: s for s, sector in enumerate(self.sectors)}
        self.pieces: dict[Fraction, GradedPiece] = {}
        self._monomials: dict[Fraction, list[Monomial]] = {}
        self._build(degree_cap)

    def order_key(self, monomial: Monomial) -> tuple:
        s, exponents = monomial
        return (exponents, len(self.sectors) - s if s else 0)

    def is_valid(self, monomial: Monomial) -> bool:
        s, exponents = monomial
        support = self.sectors[s].support | {i for i, e in enumerate(exponents) if e}
        return all(e >= 0 for e in exponents) and self.is_face(frozenset(support))

    def degree_of(self, monomial: Monomial) -> Fraction:
        s, exponents = monomial
        return self.sectors[s].shift + sum(exponents)

    def _exponent_vectors(self, support: frozenset[int], total: int) -> list[tuple[int, ...]]:
        result = []

        def extend(prefix: list[int], used: frozenset[int], remaining: int) -> None:
            i = len(prefix)
            if i == self.nvars:
                if remaining == 0:
                    result.append(tuple(prefix))
                return
            extend([*prefix, 0], used, remaining)
            if remaining and self.is_face(used | {i}):
                for e in range(1, remaining + 1):
                    extend([*prefix, e], used | {i}, remaining - e)

        extend([], support, total)
        return result

    def monomials(self, degree: Fraction) -> list[Monomial]:
        if degree not in self._monomials:
            found = []
            for s, sector in enumerate(self.sectors):
                total = degree - sector.shift
                if total >= 0 and total.denominator == 1:
                    found.extend((s, exponents) for exponents in self._exponent_vectors(sector.support, int(total)))
            self._monomials[degree] = sorted(found, key=self.order_key, reverse=True)
        return self._monomials[degree]

    def _piece(self, degree: Fraction) -> GradedPiece:
        monomials = self.monomials(degree)
        column = {monomial: j for j, monomial in enumerate(monomials)}
        rows = []
        for s, exponents in self.monomials(degree - 1) if degree >= 1 else []:
            for form in self.linear_forms:
                row = [Fraction(0)] * len(monomials)
                for i, coefficient in enumerate(form):
                    if not coefficient:
                        continue
                    raised = (s, exponents[:i] + (exponents[i] + 1,) + exponents[i + 1 :])
                    # monomials leaving the faces are zero already
                    if raised in column:
                        row[column[raised]] += coefficient
                if any(row):
                    rows.append(row)
        reduced, pivots = linalg.row_reduce(rows, len(monomials))
        reducers = {
            monomials[p]: {monomials[j]: x for j, x in enumerate(row) if x} for row, p in zip(reduced, pivots, strict=True)
        }
        leading = set(pivots)
        basis = tuple(monomial for j, monomial in enumerate(monomials) if j not in leading)
        logger.debug("Degree %s: %d monomials, %d relations, %d basis elements", degree, len(monomials), len(pivots), len(basis))
        return GradedPiece(degree, tuple(monomials), basis, reducers)

    def _build(self, degree_cap: int) -> None:
        if not self.sectors:
            return
        classes = sorted({sector.shift - math.floor(sector.shift) for sector in self.sectors})
        top_shift = max(sector.shift for sector in self.sectors)
        for k in range(degree_cap + 1):
            window = [self._piece(f + k) for f in classes]
            for piece in window:
                if piece.basis:
                    self.pieces[piece.degree] = piece
            if k >= top_shift and not any(piece.basis for piece in window):
                return
        raise NotFiniteError(f"graded pieces are still nonzero at degree {degree_cap}")

    def graded_dimensions(self) -> dict[Fraction, int]:
        return {degree: len(self.pieces[degree].basis) for degree in sorted(self.pieces)}

    def basis(self) -> list[Monomial]:
        return [monomial for degree in sorted(self.pieces) for monomial in self.pieces[degree].basis]

    def reduce(self, vector: Mapping[Monomial, Fraction | int]) -> dict[Monomial, Fraction]:
        """Coordinates of a combination of monomials in the standard basis."""
        result: defaultdict[Monomial, Fraction] = defaultdict(Fraction)
        for monomial, coefficient in vector.items():
            if not coefficient or not self.is_valid(monomial):
                continue
            piece = self.pieces.get(self.degree_of(monomial))
            if piece is None:
                continue
            relation = piece.reducers.get(monomial)
            if relation is None:
                result[monomial] += coefficient
                continue
            for other, x in relation.items():
                if other != monomial:
                    result[other] -= coefficient * x
        return {monomial: c for monomial, c in sorted(result.items(), key=lambda item: self._sort_key(item[0])) if c}

    def _sort_key(self, monomial: Monomial) -> tuple:
        return (self.degree_of(monomial), tuple(-e for e in monomial[1]), monomial[0])


def deformed_element(sf: ExtendedStackyFan, terms: Iterable[tuple[Sequence[int], Fraction | int]]) -> DeformedRingElement:
    """A deformed ring element from (lattice point, coefficient) pairs, summing repeats and dropping zeros."""
    result: defaultdict[Element, Fraction] = defaultdict(Fraction)
    for c, coefficient in terms:
        c = sf.group.reduce(c)
        if not sf.fan.support_contains(sf.group.free_part(c)):
            raise FanError(f"{c} is outside the support of the fan", witness=c)
        result[c] += Fraction(coefficient)
    return {c: a for c, a in sorted(result.items()) if a}


def deformed_product(sf: ExtendedStackyFan, x: Mapping[Element, Fraction], y: Mapping[Element, Fraction]) -> DeformedRingElement:
    """y^c1 * y^c2 = y^(c1 + c2) when c1 and c2 lie in a common cone, and 0 otherwise."""
    result: defaultdict[Element, Fraction] = defaultdict(Fraction)
    for c1, a1 in x.items():
        for c2, a2 in y.items():
            c = _monomial_product(sf, c1, c2)
            if c is not None:
                result[c] += Fraction(a1) * Fraction(a2)
    return {c: a for c, a in sorted(result.items()) if a}


@lru_cache(maxsize=1 << 16)
def _monomial_product(sf: ExtendedStackyFan, c1: Element, c2: Element) -> Element | None:
    cones = [sf.fan.minimal_cone_containing(sf.group.free_part(c)) for c in (c1, c2)]
    for c, cone in zip((c1, c2), cones, strict=True):
        if cone is None:
            raise FanError(f"{c} is outside the support of the fan", witness=c)
    if not sf.fan.is_cone(cones[0] | cones[1]):
        return None
    return sf.group.add(c1, c2)


@dataclass(frozen=True)
class Decomposition:
    box: BoxElement
    exponents: tuple[int, ...]
    "m_i over all rays, zero outside the minimal cone."

    @property
    def degree(self) -> Fraction:
        return self.box.age + sum(self.exponents)


def decompose(sf: ExtendedStackyFan, c: Sequence[int]) -> Decomposition:
    """The unique c = v + sum m_i b_i with v in the box and m_i >= 0 on the minimal cone of c."""
    return _decompose(sf, sf.group.reduce(c))


@lru_cache(maxsize=1 << 16)
def _decompose(sf: ExtendedStackyFan, c: Element) -> Decomposition:
    group = sf.group
    cone = sf.fan.minimal_cone_containing(group.free_part(c))
    if cone is None:
        raise FanError(f"{c} is outside the support of the fan", witness=c)
    labels = cone_label(cone)
    coordinates = sf.fan.cone_coordinates(cone, group.free_part(c))
    assert coordinates is not None
    floors = {i: math.floor(a) for i, a in zip(labels, coordinates, strict=True)}
    v = group.sub(c, sf.combination(floors.items()))
    fractional = tuple((i, a - floors[i]) for i, a in zip(labels, coordinates, strict=True) if a != floors[i])
    box = BoxElement(v, frozenset(i for i, _ in fractional), fractional)
    return Decomposition(box, tuple(floors.get(i, 0) for i in range(sf.n)))


def degree(sf: ExtendedStackyFan, c: Sequence[int]) -> Fraction:
    return decompose(sf, c).degree


class ChowPresentation(GradedPresentation):
    """Graded presentation of the orbifold Chow ring of a stacky fan; sectors are keyed by box element v."""

    def __init__(self, sf: ExtendedStackyFan, box: Sequence[BoxElement], degree_cap: int = DEFAULT_DEGREE_CAP):
        self.sf = sf
        zero = sf.group.zero()
        ordered = sorted(box, key=lambda v: (v.v != zero, v.v))
        sectors = [Sector(v.v, v.cone, v.age, v) for v in ordered]
        linear_forms = [[sf.fan.rays[i][k] for i in range(sf.n)] for k in range(sf.fan.dimension)]
        super().__init__(sectors, sf.n, linear_forms, sf.fan.is_cone, degree_cap)

    def monomial_of(self, c: Sequence[int]) -> Monomial:
        decomposition = decompose(self.sf, c)
        return (self.sector_index[decomposition.box.v], decomposition.exponents)

    def box_monomial(self, v: BoxElement) -> Monomial:
        return (self.sector_index[v.v], (0,) * self.nvars)

    def lattice_point(self, monomial: Monomial) -> Element:
        s, exponents = monomial
        return self.sf.group.add(self.sectors[s].key, self.sf.combination(enumerate(exponents)))


def _require_semi_projective(sf: ExtendedStackyFan) -> None:
    if not sf.beta.restrict(range(sf.n)).spans():
        raise NotSemiProjectiveError("the rays do not span")
    report = check_regular_triangulation(sf.fan.dimension, sf.fan.rays, sf.fan.max_cones)
    if not report.regular:
        raise NotSemiProjectiveError(f"the fan is not a regular triangulation: {report.witness}")


def build_presentation(sf: ExtendedStackyFan, degree_cap: int = DEFAULT_DEGREE_CAP, untwisted: bool = False) -> ChowPresentation:
    """The orbifold Chow ring Q[N_Sigma] / (sum e(b_i) y^{b_i} : e in N*), or only its untwisted sector."""
    _require_semi_projective(sf)
    if untwisted:
        box = [BoxElement(sf.group.zero(), frozenset(), ())]
    else:
        box = box_of_fan(sf)
    logger.debug("Presenting over %d sectors and %d rays in %s", len(box), sf.n, sf.group)
    return ChowPresentation(sf, box, degree_cap)


def normal_form(pres: ChowPresentation, x: Mapping[Element, Fraction | int]) -> dict[Monomial, Fraction]:
    vector: defaultdict[Monomial, Fraction] = defaultdict(Fraction)
    for c, coefficient in x.items():
        vector[pres.monomial_of(c)] += Fraction(coefficient)
    return pres.reduce(vector)


def obstruction_exponents(sf: ExtendedStackyFan, v1: BoxElement, v2: BoxElement, v3: BoxElement) -> frozenset[int] | None:
    """Rays i with a_i = 2 in v1 + v2 + v3 = sum a_i b_i; None if the three share no cone."""
    cone = v1.cone | v2.cone | v3.cone
    if not sf.fan.is_cone(cone):
        return None
    sums = {i: v1.coefficient(i) + v2.coefficient(i) + v3.coefficient(i) for i in cone}
    if any(a not in (1, 2) for a in sums.values()):
        raise MalformedTripleError(f"coefficients {sorted(sums.items())} are not all 1 or 2")
    total = sf.group.add(v1.v, v2.v, v3.v)
    if total != sf.combination((i, int(a)) for i, a in sorted(sums.items())):
        raise MalformedTripleError(f"{v1.v} + {v2.v} + {v3.v} is not the integral combination of the rays")
    return frozenset(i for i, a in sums.items() if a == 2)


def cup_product_via_sectors(pres: ChowPresentation, v1: BoxElement, v2: BoxElement) -> dict[Monomial, Fraction]:
    """y^v1 * y^v2 as y^(v3-check) times the obstruction rays and the rays where the coordinates add to 1."""
    sf = pres.sf
    common = v1.cone | v2.cone
    if not sf.fan.is_cone(common):
        return {}
    gamma = {i: v1.coefficient(i) + v2.coefficient(i) for i in common}
    carries = {i: math.floor(a) for i, a in gamma.items()}
    fractional = tuple((i, gamma[i] - carries[i]) for i in sorted(common) if gamma[i] != carries[i])
    v_check = BoxElement(
        sf.group.sub(sf.group.add(v1.v, v2.v), sf.combination(carries.items())),
        frozenset(i for i, _ in fractional),
        fractional,
    )
    v3 = inverse_box(sf, v_check)
    twos = obstruction_exponents(sf, v1, v2, v3)
    assert twos is not None
    raised = twos | (common - v_check.cone)
    exponents = tuple(int(i in raised) for i in range(sf.n))
    return pres.reduce({(pres.sector_index[v_check.v], exponents): 1})


def module_decomposition(sf: ExtendedStackyFan, degree_cap: int = DEFAULT_DEGREE_CAP) -> dict[Fraction, int]:
    """Graded dimensions assembled from the untwisted rings of the quotient stacky fans, shifted by age."""
    box = box_of_fan(sf)

    def summand(v: BoxElement) -> dict[Fraction, int]:
        quotient = quotient_stacky_fan(sf, v.cone)
        return build_presentation(quotient, degree_cap, untwisted=True).graded_dimensions()

    with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 8)) as executor:
        summands = list(executor.map(summand, box))

    series: defaultdict[Fraction, int] = defaultdict(int)
    for v, dimensions in zip(box, summands, strict=True):
        logger.debug("Sector %s of age %s contributes %s", v.v, v.age, dimensions)
        for d, count in dimensions.items():
            series[d + v.age] += count
    return {d: series[d] for d in sorted(series) if series[d]}
