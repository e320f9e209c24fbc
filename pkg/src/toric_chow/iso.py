"""Comparison of the Lawrence toric and hypertoric Chow rings of a stacky hyperplane arrangement.

The morphism phi sends y^{b_{L,i}} to y^{b_i}, y^{b'_{L,i}} to -y^{b_i} and the box generator y^{v_theta}
to y^{(v, sigma)}, where v_theta = iota(v) + sum_{i in sigma} b'_{L,i} and iota: N -> N_L is the inclusion.
It is extended to lattice points through their box decomposition.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import linalg
from .abelian import Element
from .chow import DEFAULT_DEGREE_CAP, ChowPresentation, build_presentation, decompose, deformed_product
from .errors import BijectionError, VerificationError
from .fan import Cone, cone_label, fans_equivalent
from .hypertoric import (
    HypertoricElement,
    HypertoricPresentation,
    MFBoxElement,
    MultiFanMonomial,
    hypertoric_presentation,
    mf_box,
    mf_element_product,
    mf_product,
    multifan,
    ray_monomial,
)
from .lawrence import LawrenceData, StackyArrangement, lawrence_fan, lawrence_stacky_fan, link, quotient_arrangement
from .stacky import BoxElement, box_of_fan

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConeLiftReport:
    ok: bool
    witness: tuple[int, ...] | None = None


def cone_lift_check(arr: StackyArrangement, data: LawrenceData | None = None) -> ConeLiftReport:
    """F is independent exactly when its Lawrence lifting spans a cone of the Lawrence fan, for every F."""
    data = data if data is not None and data.fan is not None else lawrence_fan(arr)
    assert data.fan is not None
    for size in range(arr.m + 1):
        for subset in itertools.combinations(range(arr.m), size):
            if arr.is_independent(subset) != data.fan.is_cone(data.lift(subset)):
                return ConeLiftReport(False, subset)
    return ConeLiftReport(True)


@dataclass(frozen=True)
class BoxPair:
    hypertoric: MFBoxElement
    lawrence: BoxElement

    @property
    def ages_match(self) -> bool:
        return self.lawrence.age == self.hypertoric.shift


@dataclass(frozen=True)
class BoxBijection:
    pairs: tuple[BoxPair, ...]

    @cached_property
    def to_hypertoric(self) -> dict[Element, MFBoxElement]:
        return {pair.lawrence.v: pair.hypertoric for pair in self.pairs}

    @cached_property
    def to_lawrence(self) -> dict[tuple, BoxElement]:
        return {pair.hypertoric.key: pair.lawrence for pair in self.pairs}


def box_bijection(arr: StackyArrangement, data: LawrenceData | None = None) -> BoxBijection:
    """(v, sigma) maps to v_theta with coordinates alpha_i on b_{L,i} and 1 - alpha_i on b'_{L,i}."""
    data = data if data is not None and data.fan is not None else lawrence_fan(arr)
    sf = lawrence_stacky_fan(arr, data)
    group = data.group
    lawrence_box = {v.v: v for v in box_of_fan(sf)}
    hypertoric_box = mf_box(arr.beta)
    m = arr.m

    pairs = []
    for element in hypertoric_box:
        v_theta = group.add(data.inclusion(element.v), *(data.beta.columns[m + i] for i in sorted(element.cone)))
        image = lawrence_box.get(v_theta)
        if image is None:
            raise BijectionError(f"{element.key} maps to {v_theta}, which is not in Box(Sigma_theta)")
        expected = {i: a for i, a in element.coordinates} | {m + i: 1 - a for i, a in element.coordinates}
        if image.cone != data.lift(element.cone) or dict(image.coordinates) != expected:
            raise BijectionError(
                f"{element.key} maps to {v_theta} with coordinates {image.coordinates}, expected {sorted(expected.items())}"
            )
        pairs.append(BoxPair(element, image))

    if len({pair.lawrence.v for pair in pairs}) != len(pairs) or len(pairs) != len(lawrence_box):
        raise BijectionError(f"{len(hypertoric_box)} hypertoric box elements against {len(lawrence_box)} Lawrence box elements")
    for pair in pairs:
        if not pair.ages_match:
            raise BijectionError(f"age {pair.lawrence.age} of {pair.lawrence.v} differs from the shift {pair.hypertoric.shift}")
    logger.debug("Box bijection on %d elements", len(pairs))
    return BoxBijection(tuple(pairs))


class Comparison:
    """Both sides of an arrangement, built once: the Lawrence stacky fan, the box bijection and the presentations."""

    def __init__(self, arr: StackyArrangement, degree_cap: int = DEFAULT_DEGREE_CAP):
        self.arrangement = arr
        self.degree_cap = degree_cap
        self.data = lawrence_fan(arr)
        self.sf = lawrence_stacky_fan(arr, self.data)
        self.bijection = box_bijection(arr, self.data)

    @cached_property
    def lawrence_presentation(self) -> ChowPresentation:
        return build_presentation(self.sf, self.degree_cap)

    @cached_property
    def hypertoric_presentation(self) -> HypertoricPresentation:
        return hypertoric_presentation(self.arrangement, self.degree_cap)

    def phi_monomial(self, c: Element) -> tuple[int, MultiFanMonomial] | None:
        """(-1)^(sum q_i) y^(v, sigma) prod y^{b_i}^(p_i + q_i) for c = v_theta + sum p_i b_{L,i} + sum q_i b'_{L,i}."""
        m = self.arrangement.m
        decomposition = decompose(self.sf, c)
        box = self.bijection.to_hypertoric[decomposition.box.v]
        p, q = decomposition.exponents[:m], decomposition.exponents[m:]
        sign = (-1) ** sum(q)
        monomial = MultiFanMonomial(box.v, box.cone)
        for i in range(m):
            for _ in range(p[i] + q[i]):
                product = mf_product(self.arrangement.beta, monomial, ray_monomial(self.arrangement.beta, i))
                if product is None:
                    return None
                s, monomial = product
                sign *= s
        return sign, monomial

    def phi(self, x: Mapping[Element, Fraction | int]) -> HypertoricElement:
        result: defaultdict[MultiFanMonomial, Fraction] = defaultdict(Fraction)
        for c, coefficient in x.items():
            image = self.phi_monomial(c)
            if image is not None:
                sign, monomial = image
                result[monomial] += sign * Fraction(coefficient)
        return {monomial: a for monomial, a in result.items() if a}

    def generators(self) -> list[Element]:
        "Lattice points of the ray generators, then of the nontrivial box generators."
        rays = list(self.data.beta.columns)
        zero = self.data.group.zero()
        return rays + [pair.lawrence.v for pair in self.bijection.pairs if pair.lawrence.v != zero]


def phi(arr: StackyArrangement, x: Mapping[Element, Fraction | int], comparison: Comparison | None = None) -> HypertoricElement:
    comparison = comparison if comparison is not None else Comparison(arr)
    return comparison.phi(x)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class IsomorphismReport:
    checks: tuple[CheckResult, ...]
    lawrence_dimensions: dict[Fraction, int]
    hypertoric_dimensions: dict[Fraction, int]
    box: tuple[BoxPair, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def first_failure(self) -> CheckResult | None:
        return next((check for check in self.checks if not check.passed), None)


def _check_dimensions(comparison: Comparison) -> CheckResult:
    lawrence = comparison.lawrence_presentation.graded_dimensions()
    hypertoric = comparison.hypertoric_presentation.graded_dimensions()
    if lawrence != hypertoric:
        return CheckResult("dimensions", False, f"Lawrence {lawrence} but hypertoric {hypertoric}")
    return CheckResult("dimensions", True)


def _check_cones(comparison: Comparison) -> CheckResult:
    report = cone_lift_check(comparison.arrangement, comparison.data)
    if not report.ok:
        return CheckResult("cones", False, f"columns {list(report.witness or ())} disagree with their Lawrence lifting")
    return CheckResult("cones", True)


def _check_relations(comparison: Comparison) -> CheckResult:
    arr, data = comparison.arrangement, comparison.data
    m = arr.m
    beta_rows = [list(row) for row in arr.beta.free_matrix]
    hypertoric = comparison.hypertoric_presentation
    for k in range(data.group.free_rank):
        e = [data.beta.free_column(r)[k] for r in range(2 * m)]
        if not linalg.in_row_space(beta_rows, m, [e[i] - e[m + i] for i in range(m)]):
            return CheckResult("relations", False, f"coordinate {k} of N_L does not restrict to a form on N")
        relation: defaultdict[Element, Fraction] = defaultdict(Fraction)
        for r in range(2 * m):
            relation[data.beta.columns[r]] += e[r]
        image = hypertoric.normal_form(comparison.phi(relation))
        if image:
            return CheckResult("relations", False, f"coordinate {k} of N_L gives a relation with image {image}")
    assert data.fan is not None
    mf = hypertoric.multifan
    for face in data.fan.minimal_non_faces():
        if mf.is_independent({r % m for r in face}):
            return CheckResult("relations", False, f"non-face {list(cone_label(face))} maps outside the matroid ideal")
    return CheckResult("relations", True)


def _check_products(comparison: Comparison) -> CheckResult:
    beta = comparison.arrangement.beta
    hypertoric = comparison.hypertoric_presentation
    generators = comparison.generators()
    for g, h in itertools.combinations_with_replacement(generators, 2):
        product = deformed_product(comparison.sf, {g: Fraction(1)}, {h: Fraction(1)})
        left = hypertoric.normal_form(comparison.phi(product))
        right = hypertoric.normal_form(mf_element_product(beta, comparison.phi({g: 1}), comparison.phi({h: 1})))
        if left != right:
            return CheckResult("products", False, f"phi(y^{list(g)} y^{list(h)}) = {left} but phi(y^{list(g)}) phi(y^{list(h)}) = {right}")
    return CheckResult("products", True)


def _check_ages(comparison: Comparison) -> CheckResult:
    pairs = comparison.bijection.pairs
    for pair in pairs:
        if not pair.ages_match:
            message = f"{pair.hypertoric.key} has shift {pair.hypertoric.shift}, {pair.lawrence.v} has age {pair.lawrence.age}"
            return CheckResult("ages", False, message)
    lawrence = Counter(pair.lawrence.age for pair in pairs)
    hypertoric = Counter(Fraction(pair.hypertoric.shift) for pair in pairs)
    if lawrence != hypertoric:
        return CheckResult("ages", False, f"age multisets {dict(lawrence)} and {dict(hypertoric)} differ")
    return CheckResult("ages", True)


def _check_basis(comparison: Comparison) -> CheckResult:
    """phi carries the standard monomials of each degree onto a basis of the same degree."""
    lawrence = comparison.lawrence_presentation
    hypertoric = comparison.hypertoric_presentation
    for degree, piece in lawrence.pieces.items():
        target = hypertoric.pieces.get(degree)
        columns = target.basis if target is not None else ()
        rows = []
        for monomial in piece.basis:
            image = hypertoric.normal_form(comparison.phi({lawrence.lattice_point(monomial): 1}))
            rows.append([image.get(b, Fraction(0)) for b in columns])
        if len(columns) != len(rows) or linalg.rank(rows, len(columns)) != len(rows):
            return CheckResult("basis", False, f"phi is not an isomorphism in degree {degree}")
    return CheckResult("basis", True)


def verify_isomorphism(arr: StackyArrangement, degree_cap: int = DEFAULT_DEGREE_CAP, strict: bool = False) -> IsomorphismReport:
    """Check that phi induces an isomorphism between the Lawrence and hypertoric Chow rings.

    With `strict`, the first failing check raises VerificationError.
    """
    comparison = Comparison(arr, degree_cap)
    checks = tuple(
        check(comparison) for check in (_check_dimensions, _check_cones, _check_relations, _check_products, _check_ages, _check_basis)
    )
    for check in checks:
        logger.debug("Check %s: %s %s", check.name, "pass" if check.passed else "FAIL", check.detail)
    report = IsomorphismReport(
        checks,
        comparison.lawrence_presentation.graded_dimensions(),
        comparison.hypertoric_presentation.graded_dimensions(),
        comparison.bijection.pairs,
    )
    failure = report.first_failure()
    if strict and failure is not None:
        raise VerificationError(f"check {failure.name} failed: {failure.detail}")
    return report


def completion(data: LawrenceData, sigma: Iterable[int]) -> Cone:
    """The Lawrence lifting of sigma with one of b_{L,j}, b'_{L,j} added for every column j outside sigma and its link."""
    assert data.fan is not None
    arr = data.arrangement
    sigma = frozenset(sigma)
    outside = [j for j in range(arr.m) if j not in sigma and j not in link(arr, sigma)]
    for choice in itertools.product(*((j, arr.m + j) for j in outside)):
        candidate = data.lift(sigma) | set(choice)
        if data.fan.is_cone(candidate):
            return candidate
    raise VerificationError(f"no cone of the Lawrence fan completes the lifting of {list(cone_label(sigma))}")


@dataclass(frozen=True)
class CoherenceResult:
    sigma: Cone
    fans_match: bool
    isomorphism: IsomorphismReport

    @property
    def passed(self) -> bool:
        return self.fans_match and self.isomorphism.passed


def quotient_coherence(arr: StackyArrangement, degree_cap: int = DEFAULT_DEGREE_CAP) -> list[CoherenceResult]:
    """For every cone of a nontrivial box element, compare the quotient of the Lawrence fan with the
    Lawrence fan of the quotient arrangement, and verify the isomorphism for the quotient arrangement."""
    data = lawrence_fan(arr)
    assert data.fan is not None
    m = arr.m
    cones = sorted({element.cone for element in mf_box(arr.beta, multifan(arr.beta)) if element.cone}, key=cone_label)
    results = []
    for sigma in cones:
        quotient = data.fan.quotient(completion(data, sigma))
        labels = link(arr, sigma)
        position = {j: k for k, j in enumerate(labels)}
        quotient_arr = quotient_arrangement(arr, sigma)
        expected = lawrence_fan(quotient_arr).fan
        assert expected is not None
        relabel = {}
        for k, r in enumerate(quotient.labels):
            j = r % m
            if j in position:
                relabel[k] = position[j] if r < m else len(labels) + position[j]
        matches = len(relabel) == len(quotient.labels) and fans_equivalent(quotient.fan, expected, relabel)
        report = verify_isomorphism(quotient_arr, degree_cap)
        logger.debug("Quotient by %s: fans %s, isomorphism %s", cone_label(sigma), "match" if matches else "differ", report.passed)
        results.append(CoherenceResult(sigma, matches, report))
    return results
