"""The multi-fan of a configuration and the orbifold Chow ring of the hypertoric DM stack.

Cones of the multi-fan are the independent sets of columns and may overlap, so a monomial of
Q[Delta_beta] is a pair (c, sigma) with c-bar strictly inside the cone of sigma. Products carry the
correction epsilon from the ceiling function and the sign (-1)^|sigma_epsilon|.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from . import linalg
from .abelian import Element, LatticeMap
from .chow import DEFAULT_DEGREE_CAP, GradedPresentation, Monomial, Sector
from .errors import FanError, MalformedTripleError, NotGenericError, RankError
from .fan import Cone, cone_label
from .lawrence import StackyArrangement, check_generic
from .stacky import fractional_representatives

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultiFan:
    beta: LatticeMap
    independent_subsets: tuple[Cone, ...]

    @cached_property
    def _independent(self) -> frozenset[Cone]:
        return frozenset(self.independent_subsets)

    def is_independent(self, subset: Iterable[int]) -> bool:
        return frozenset(subset) in self._independent


def multifan(beta: LatticeMap) -> MultiFan:
    """All independent sets of columns, grown size by size from the smaller ones."""
    columns = [beta.free_column(i) for i in range(beta.source_rank)]
    found: list[Cone] = [frozenset()]
    layer: list[Cone] = [frozenset()]
    while layer:
        grown = {F | {j} for F in layer for j in range(max(F, default=-1) + 1, beta.source_rank)}
        layer = sorted(
            (F for F in grown if linalg.is_independent([columns[i] for i in sorted(F)])),
            key=cone_label,
        )
        found.extend(layer)
    return MultiFan(beta, tuple(found))


@dataclass(frozen=True)
class MFBoxElement:
    """(v, sigma) with v-bar = sum alpha_i b_i-bar over sigma, 0 < alpha_i < 1."""

    v: Element
    cone: Cone
    coordinates: tuple[tuple[int, Fraction], ...]

    @property
    def shift(self) -> int:
        return len(self.cone)

    def coefficient(self, i: int) -> Fraction:
        return dict(self.coordinates).get(i, Fraction(0))

    @property
    def key(self) -> tuple[Element, tuple[int, ...]]:
        return (self.v, cone_label(self.cone))


def mf_box(beta: LatticeMap, mf: MultiFan | None = None) -> list[MFBoxElement]:
    """Box(Delta_beta): for each independent sigma, the classes of Sat(sigma) / N_sigma supported on all of sigma."""
    mf = mf if mf is not None else multifan(beta)
    box = []
    for sigma in mf.independent_subsets:
        for element in fractional_representatives(beta, sigma):
            if element.cone == sigma:
                box.append(MFBoxElement(element.v, sigma, element.coordinates))
    return sorted(box, key=lambda b: (b.shift, cone_label(b.cone), b.v))


def inverse_mf_box(beta: LatticeMap, v: MFBoxElement) -> MFBoxElement:
    group = beta.target
    w = group.sub(group.add(group.zero(), *(beta.columns[i] for i in sorted(v.cone))), v.v)
    return MFBoxElement(w, v.cone, tuple((i, 1 - a) for i, a in v.coordinates))


@dataclass(frozen=True)
class MultiFanMonomial:
    c: Element
    sigma: Cone

    def __str__(self) -> str:
        return f"y^({list(self.c)}, {list(cone_label(self.sigma))})"


@lru_cache(maxsize=1 << 12)
def _solver(beta: LatticeMap, labels: tuple[int, ...]) -> linalg.ColumnSolver | None:
    "Coordinates over the columns in `labels`; None when they are dependent."
    return linalg.column_solver([beta.free_column(i) for i in labels], beta.target.free_rank)


def _independent(beta: LatticeMap, subset: Iterable[int]) -> bool:
    return _solver(beta, cone_label(subset)) is not None


def coordinates(beta: LatticeMap, x: MultiFanMonomial) -> dict[int, Fraction]:
    """alpha_i with c-bar = sum alpha_i b_i-bar over sigma; all must be positive."""
    labels = cone_label(x.sigma)
    solver = _solver(beta, labels)
    if solver is None:
        raise FanError(f"{labels} is not an independent set", witness=labels)
    alphas = solver(beta.target.free_part(x.c))
    if alphas is None or any(a <= 0 for a in alphas):
        raise FanError(f"{x} is not strictly inside the cone of {labels}", witness=(x.c, labels))
    return dict(zip(labels, alphas, strict=True))


def mf_monomial(beta: LatticeMap, c: Sequence[int], sigma: Iterable[int]) -> MultiFanMonomial:
    x = MultiFanMonomial(beta.target.reduce(c), frozenset(sigma))
    coordinates(beta, x)
    return x


def ray_monomial(beta: LatticeMap, i: int) -> MultiFanMonomial:
    "y^{b_i}"
    return MultiFanMonomial(beta.columns[i], frozenset({i}))


@dataclass(frozen=True)
class MFDecomposition:
    box: MFBoxElement
    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return self.box.shift + sum(self.exponents)


@lru_cache(maxsize=1 << 16)
def mf_decompose(beta: LatticeMap, x: MultiFanMonomial) -> MFDecomposition:
    """c = v + sum m_i b_i with (v, tau) in the box, tau inside sigma and m_i >= 0."""
    alphas = coordinates(beta, x)
    floors = {i: math.floor(a) for i, a in alphas.items()}
    group = beta.target
    v = group.sub(x.c, group.add(group.zero(), *(group.scale(f, beta.columns[i]) for i, f in floors.items())))
    fractional = tuple((i, alphas[i] - floors[i]) for i in sorted(alphas) if alphas[i] != floors[i])
    box = MFBoxElement(v, frozenset(i for i, _ in fractional), fractional)
    return MFDecomposition(box, tuple(floors.get(i, 0) for i in range(beta.source_rank)))


def mf_degree(beta: LatticeMap, x: MultiFanMonomial) -> int:
    return mf_decompose(beta, x).degree


def ceiling(beta: LatticeMap, x: MultiFanMonomial) -> Element:
    """sum of b_i over the fractional cone tau plus sum m_i b_i: every coordinate rounded up."""
    group = beta.target
    alphas = coordinates(beta, x)
    return group.add(group.zero(), *(group.scale(math.ceil(a), beta.columns[i]) for i, a in alphas.items()))


SignedMonomial = tuple[int, MultiFanMonomial]


@lru_cache(maxsize=1 << 16)
def mf_product(beta: LatticeMap, x: MultiFanMonomial, y: MultiFanMonomial) -> SignedMonomial | None:
    """(-1)^|sigma_eps| y^(c1 + c2 + eps, sigma1 + sigma2), or None when the union is dependent."""
    union = x.sigma | y.sigma
    if not _independent(beta, union):
        return None
    alpha, gamma = coordinates(beta, x), coordinates(beta, y)
    group = beta.target
    # eps = ceil(c1) + ceil(c2) - ceil(c1 + c2), coordinate by coordinate on the union
    epsilon = {}
    for i in union:
        a, b = alpha.get(i, Fraction(0)), gamma.get(i, Fraction(0))
        e = math.ceil(a) + math.ceil(b) - math.ceil(a + b)
        if e:
            epsilon[i] = e
    c = group.add(x.c, y.c, *(group.scale(e, beta.columns[i]) for i, e in epsilon.items()))
    return (-1) ** len(epsilon), MultiFanMonomial(c, union)


HypertoricElement = dict[MultiFanMonomial, Fraction]


def mf_element_product(
    beta: LatticeMap, x: Mapping[MultiFanMonomial, Fraction], y: Mapping[MultiFanMonomial, Fraction]
) -> HypertoricElement:
    result: defaultdict[MultiFanMonomial, Fraction] = defaultdict(Fraction)
    for (u, a), (w, b) in itertools.product(x.items(), y.items()):
        product = mf_product(beta, u, w)
        if product is not None:
            sign, monomial = product
            result[monomial] += sign * Fraction(a) * Fraction(b)
    return {monomial: c for monomial, c in result.items() if c}


@dataclass(frozen=True)
class BoxProduct:
    """The product of two box generators by the three-case formula."""

    case: str
    "'general', 'inverse' (v1-bar is the inverse of v2-bar) or 'disjoint' (no common cone)"
    sign: int
    monomial: MultiFanMonomial | None
    complement: MFBoxElement | None = None
    "(v3, sigma3) with v1 + v2 + v3 = 0 in the local group."
    obstruction: Cone = frozenset()
    "rays with a_i = 2"
    crossing: Cone = frozenset()
    "I: a_i = 1 with all three coordinates present"
    vanishing: Cone = frozenset()
    "J: rays of the common cone outside sigma3"


def _local_sum(beta: LatticeMap, total: Element, cone: Cone) -> dict[int, int] | None:
    "Integers a_i with total = sum a_i b_i over the cone, if any."
    labels = cone_label(cone)
    group = beta.target
    solver = _solver(beta, labels)
    solution = None if solver is None else solver(group.free_part(total))
    if solution is None or any(a.denominator != 1 for a in solution):
        return None
    a = {i: int(x) for i, x in zip(labels, solution, strict=True)}
    if group.add(group.zero(), *(group.scale(k, beta.columns[i]) for i, k in a.items())) != total:
        return None
    return a


def mf_box_product(beta: LatticeMap, box: Sequence[MFBoxElement], v1: MFBoxElement, v2: MFBoxElement) -> BoxProduct:
    """(-1)^(|I|+|J|) y^(v3-check, sigma3) prod_{a_i=2} y^b_i prod_I y^b_i prod_J y^(2b_j).

    (v3, sigma3) is found by search over the box: the element with sigma3 in the common cone making
    v1 + v2 + v3 an integral combination of its rays.
    """
    union = v1.cone | v2.cone
    if not _independent(beta, union):
        return BoxProduct("disjoint", 0, None)
    group = beta.target
    candidates = []
    for v3 in box:
        if v3.cone <= union:
            a = _local_sum(beta, group.add(v1.v, v2.v, v3.v), union)
            if a is not None:
                candidates.append((v3, a))
    if len(candidates) != 1:
        raise MalformedTripleError(f"found {len(candidates)} box elements completing {v1.key} and {v2.key}")
    ((v3, a),) = candidates
    if any(a[i] not in (1, 2) for i in union):
        raise MalformedTripleError(f"coefficients {sorted(a.items())} are not all 1 or 2")

    present = v1.cone & v2.cone & v3.cone
    twos = frozenset(i for i in union if a[i] == 2)
    crossing = frozenset(i for i in present if a[i] == 1)
    vanishing = union - v3.cone
    v3_check = inverse_mf_box(beta, v3)
    inverse = group.free_part(v1.v) == group.free_part(inverse_mf_box(beta, v2).v) and v1.cone == v2.cone

    c = group.add(
        v3_check.v,
        *(beta.columns[i] for i in twos | crossing),
        *(group.scale(2, beta.columns[j]) for j in vanishing),
    )
    sign = (-1) ** (len(crossing) + len(vanishing))
    return BoxProduct(
        "inverse" if inverse else "general",
        sign,
        MultiFanMonomial(c, union),
        complement=v3,
        obstruction=twos,
        crossing=crossing,
        vanishing=vanishing,
    )


class HypertoricPresentation(GradedPresentation):
    """Q[Delta_beta] / (sum e(b_i) y^{b_i} : e in N*), as a module over the matroid Stanley–Reisner ring."""

    def __init__(self, beta: LatticeMap, mf: MultiFan, box: Sequence[MFBoxElement], degree_cap: int = DEFAULT_DEGREE_CAP):
        self.beta = beta
        self.multifan = mf
        zero = beta.target.zero()
        ordered = sorted(box, key=lambda b: (b.v != zero or bool(b.cone), b.key))
        sectors = [Sector(b.key, b.cone, Fraction(b.shift), b) for b in ordered]
        linear_forms = [[beta.free_column(i)[k] for i in range(beta.source_rank)] for k in range(beta.target.free_rank)]
        super().__init__(sectors, beta.source_rank, linear_forms, mf.is_independent, degree_cap)

    def monomial_of(self, x: MultiFanMonomial) -> Monomial:
        decomposition = mf_decompose(self.beta, x)
        return (self.sector_index[decomposition.box.key], decomposition.exponents)

    def normal_form(self, x: Mapping[MultiFanMonomial, Fraction | int]) -> dict[Monomial, Fraction]:
        vector: defaultdict[Monomial, Fraction] = defaultdict(Fraction)
        for monomial, coefficient in x.items():
            vector[self.monomial_of(monomial)] += Fraction(coefficient)
        return self.reduce(vector)


def hypertoric_presentation(arr: StackyArrangement, degree_cap: int = DEFAULT_DEGREE_CAP) -> HypertoricPresentation:
    """The graded presentation of the hypertoric Chow ring; theta must be generic but does not enter the ring."""
    beta = arr.beta
    if not beta.spans():
        raise RankError("the columns of beta do not span N-bar")
    report = check_generic(arr)
    if not report.generic:
        raise NotGenericError("theta is not generic", witness=report.witness)
    mf = multifan(beta)
    box = mf_box(beta, mf)
    logger.debug("Multi-fan has %d independent sets and %d box elements", len(mf.independent_subsets), len(box))
    return HypertoricPresentation(beta, mf, box, degree_cap)
