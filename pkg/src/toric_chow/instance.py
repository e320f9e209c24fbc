"""Instance documents: parsing, running a command on one, and rendering the result.

An instance is a JSON object:

    {
      "group": {"free_rank": 1, "torsion": []},
      "beta": [[1], [-2]],
      "fan": {"max_cones": [[0], [1]]},
      "theta": [1],
      "extra": 0,
      "product": {"left": [{"coefficient": "1", "element": [1]}], "right": [...]}
    }

Elements are free coordinates followed by torsion residues. Ray indices are 0-based. `theta` is given
in the coordinates of DG(beta) that the `gale` command prints.
"""

from __future__ import annotations

import json
import logging
from collections import defaultdict
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

from .abelian import FGAbelianGroup, LatticeMap, gale_dual
from .chow import GradedPresentation, Monomial, build_presentation, deformed_element, deformed_product, normal_form
from .config import RunConfig
from .errors import InstanceError, InternalError, NotGenericError, NotSemiProjectiveError, ToricChowError, VerificationError
from .fan import Cone, check_regular_triangulation, cone_label
from .hypertoric import MultiFanMonomial, hypertoric_presentation, mf_box, mf_element_product, mf_monomial, multifan
from .iso import verify_isomorphism
from .lawrence import StackyArrangement, check_generic, lawrence_fan
from .stacky import ExtendedStackyFan, box_of_fan, inertia_components, stacky_fan

logger = logging.getLogger(__name__)

FIELDS = frozenset({"group", "beta", "fan", "theta", "psi", "extra", "product"})


class Tag(Enum):
    "Instance label, used to signal special treatment."

    SKIP = "skip"
    REVIEW = "review"


@dataclass(frozen=True)
class Term:
    coefficient: Fraction
    element: tuple[int, ...]
    cone: tuple[int, ...] | None = None


@dataclass(frozen=True)
class InstanceFile:
    group: FGAbelianGroup
    beta: LatticeMap
    max_cones: tuple[Cone, ...] | None = None
    theta: tuple[int, ...] | None = None
    psi: tuple[int, ...] | None = None
    extra: int = 0
    product: tuple[tuple[Term, ...], tuple[Term, ...]] | None = None

    @property
    def n(self) -> int:
        return self.beta.source_rank - self.extra

    def stacky_fan(self) -> ExtendedStackyFan:
        if self.max_cones is None:
            raise InstanceError("fan: required for this command")
        return stacky_fan(self.beta, self.max_cones, self.n)

    def arrangement(self) -> StackyArrangement:
        if self.theta is None:
            raise InstanceError("theta: required for this command")
        if self.extra:
            raise InstanceError("extra: an arrangement has no extra columns")
        return StackyArrangement(self.beta, self.theta, self.psi)


def _integer(value: Any, field: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceError(f"{field}: expected an integer, got {value!r}")
    return value


def _list(value: Any, field: str) -> list:
    if not isinstance(value, list):
        raise InstanceError(f"{field}: expected a list, got {value!r}")
    return value


def _integers(value: Any, field: str) -> tuple[int, ...]:
    return tuple(_integer(x, f"{field}[{i}]") for i, x in enumerate(_list(value, field)))


def _object(value: Any, field: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise InstanceError(f"{field}: expected an object, got {value!r}")
    return value


def _required(raw: dict[str, Any], key: str, field: str) -> Any:
    if key not in raw:
        raise InstanceError(f"{field}: missing")
    return raw[key]


def rational(value: Any, field: str) -> Fraction:
    "Parse an integer or a 'p/q' string."
    if isinstance(value, bool) or not isinstance(value, int | str):
        raise InstanceError(f"{field}: expected a rational 'p/q', got {value!r}")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise InstanceError(f"{field}: {e}") from e


def _terms(value: Any, field: str, beta: LatticeMap) -> tuple[Term, ...]:
    terms = []
    for i, raw in enumerate(_list(value, field)):
        raw = _object(raw, f"{field}[{i}]")
        element = _integers(_required(raw, "element", f"{field}[{i}].element"), f"{field}[{i}].element")
        if len(element) != beta.target.rank:
            raise InstanceError(f"{field}[{i}].element: expected {beta.target.rank} coordinates, got {len(element)}")
        cone = _integers(raw["cone"], f"{field}[{i}].cone") if "cone" in raw else None
        for j in cone or ():
            if not 0 <= j < beta.source_rank:
                raise InstanceError(f"{field}[{i}].cone: column index {j} is not among the {beta.source_rank} columns")
        coefficient = rational(_required(raw, "coefficient", f"{field}[{i}].coefficient"), f"{field}[{i}].coefficient")
        terms.append(Term(coefficient, element, cone))
    return tuple(terms)


def parse_instance(text: str) -> InstanceFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    raw = _object(raw, "instance")
    for key in sorted(raw):
        if key not in FIELDS:
            raise InstanceError(f"{key}: unknown field")

    group_raw = _object(_required(raw, "group", "group"), "group")
    try:
        group = FGAbelianGroup(
            _integer(_required(group_raw, "free_rank", "group.free_rank"), "group.free_rank"),
            _integers(group_raw.get("torsion", []), "group.torsion"),
        )
    except ValueError as e:
        raise InstanceError(f"group: {e}") from e

    columns = []
    for i, column in enumerate(_list(_required(raw, "beta", "beta"), "beta")):
        column = _integers(column, f"beta[{i}]")
        if len(column) != group.rank:
            raise InstanceError(f"beta[{i}]: expected {group.rank} coordinates for {group}, got {len(column)}")
        columns.append(column)
    beta = LatticeMap(group, tuple(columns))

    extra = _integer(raw.get("extra", 0), "extra")
    if not 0 <= extra <= beta.source_rank:
        raise InstanceError(f"extra: must be between 0 and {beta.source_rank}, got {extra}")
    n = beta.source_rank - extra

    max_cones = None
    if "fan" in raw:
        fan_raw = _object(raw["fan"], "fan")
        cones = []
        for i, cone in enumerate(_list(_required(fan_raw, "max_cones", "fan.max_cones"), "fan.max_cones")):
            cone = _integers(cone, f"fan.max_cones[{i}]")
            for j in cone:
                if not 0 <= j < n:
                    raise InstanceError(f"fan.max_cones[{i}]: ray index {j} is not among the {n} rays")
            cones.append(frozenset(cone))
        max_cones = tuple(cones)

    theta = _integers(raw["theta"], "theta") if "theta" in raw else None
    psi = _integers(raw["psi"], "psi") if "psi" in raw else None

    product = None
    if "product" in raw:
        product_raw = _object(raw["product"], "product")
        product = (
            _terms(_required(product_raw, "left", "product.left"), "product.left", beta),
            _terms(_required(product_raw, "right", "product.right"), "product.right", beta),
        )

    return InstanceFile(group, beta, max_cones, theta, psi, extra, product)


def jsonable(value: Any) -> Any:
    "Rationals become 'p/q' strings, cones sorted lists, tuples lists."
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, frozenset | set):
        return sorted(jsonable(x) for x in value)
    if isinstance(value, tuple | list):
        return [jsonable(x) for x in value]
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    return value


def render(document: Any) -> str:
    return json.dumps(jsonable(document), indent=2, ensure_ascii=False) + "\n"


def _group(group: FGAbelianGroup) -> dict[str, Any]:
    return {"free_rank": group.free_rank, "torsion": list(group.torsion)}


def _dimensions(dimensions: dict[Fraction, int]) -> dict[str, int]:
    return {str(degree): n for degree, n in dimensions.items()}


def _box_element(element: Any, age: Fraction) -> dict[str, Any]:
    return {
        "v": list(element.v),
        "cone": list(cone_label(element.cone)),
        "coordinates": [[i, str(a)] for i, a in element.coordinates],
        "age": str(age),
    }


def _cones(cones: Sequence[Cone]) -> list[list[int]]:
    return sorted((list(cone_label(cone)) for cone in cones), key=lambda label: (len(label), label))


def _monomials(pres: GradedPresentation, vector: dict[Monomial, Fraction]) -> list[dict[str, Any]]:
    terms = []
    for monomial, coefficient in vector.items():
        s, exponents = monomial
        sector = pres.sectors[s].label
        terms.append(
            {
                "coefficient": str(coefficient),
                "sector": {"v": list(sector.v), "cone": list(cone_label(sector.cone))},
                "exponents": list(exponents),
                "degree": str(pres.degree_of(monomial)),
            }
        )
    return terms


@dataclass(frozen=True)
class Result:
    document: Any
    exit_code: int = 0

    @property
    def text(self) -> str:
        return render(self.document)


def compute_gale(file: InstanceFile, config: RunConfig) -> Result:
    dual = gale_dual(file.beta)
    return Result({"group": _group(dual.group), "beta_dual": [list(c) for c in dual.beta_dual.columns]})


def compute_box(file: InstanceFile, config: RunConfig) -> Result:
    if config.multifan:
        return Result([_box_element(element, Fraction(element.shift)) for element in mf_box(file.beta)])
    return Result([_box_element(element, element.age) for element in box_of_fan(file.stacky_fan())])


def compute_betti(file: InstanceFile, config: RunConfig) -> Result:
    if config.hypertoric:
        pres: GradedPresentation = hypertoric_presentation(file.arrangement(), config.degree_cap)
    else:
        pres = build_presentation(file.stacky_fan(), config.degree_cap)
    return Result(_dimensions(pres.graded_dimensions()))


def _hypertoric_operand(file: InstanceFile, terms: Sequence[Term], field: str) -> dict[MultiFanMonomial, Fraction]:
    result: defaultdict[MultiFanMonomial, Fraction] = defaultdict(Fraction)
    for i, term in enumerate(terms):
        if term.cone is None:
            raise InstanceError(f"{field}[{i}].cone: required for hypertoric products")
        result[mf_monomial(file.beta, term.element, term.cone)] += term.coefficient
    return {monomial: a for monomial, a in result.items() if a}


def compute_multiply(file: InstanceFile, config: RunConfig) -> Result:
    if file.product is None:
        raise InstanceError("product: required for multiply")
    left, right = file.product
    if config.hypertoric:
        arr = file.arrangement()
        pres = hypertoric_presentation(arr, config.degree_cap)
        x = _hypertoric_operand(file, left, "product.left")
        y = _hypertoric_operand(file, right, "product.right")
        product = mf_element_product(file.beta, x, y)
        ordered = sorted(product.items(), key=lambda item: (cone_label(item[0].sigma), item[0].c))
        return Result(
            {
                "product": [{"coefficient": str(a), "element": list(u.c), "cone": list(cone_label(u.sigma))} for u, a in ordered],
                "normal_form": _monomials(pres, pres.normal_form(product)),
            }
        )
    sf = file.stacky_fan()
    chow = build_presentation(sf, config.degree_cap)
    x = deformed_element(sf, [(term.element, term.coefficient) for term in left])
    y = deformed_element(sf, [(term.element, term.coefficient) for term in right])
    deformed = deformed_product(sf, x, y)
    return Result(
        {
            "product": [{"coefficient": str(a), "element": list(c)} for c, a in deformed.items()],
            "normal_form": _monomials(chow, normal_form(chow, deformed)),
        }
    )


def compute_inertia(file: InstanceFile, config: RunConfig) -> Result:
    if config.order < 1:
        raise InstanceError(f"order: must be positive, got {config.order}")
    components = inertia_components(file.stacky_fan(), config.order)
    return Result(
        [{"elements": [list(v.v) for v in component.elements], "cone": list(cone_label(component.cone))} for component in components]
    )


def compute_lawrence(file: InstanceFile, config: RunConfig) -> Result:
    data = lawrence_fan(file.arrangement())
    assert data.fan is not None
    return Result(
        {
            "group": _group(data.group),
            "beta": [list(c) for c in data.beta.columns],
            "max_cones": _cones(data.fan.max_cones),
            "unstable_sets": _cones(data.unstable_sets()),
            "minimal_non_faces": _cones(data.fan.minimal_non_faces()),
        }
    )


def compute_hypertoric(file: InstanceFile, config: RunConfig) -> Result:
    arr = file.arrangement()
    mf = multifan(arr.beta)
    pres = hypertoric_presentation(arr, config.degree_cap)
    return Result(
        {
            "independent_sets": [list(cone_label(F)) for F in mf.independent_subsets],
            "box": [_box_element(element, Fraction(element.shift)) for element in mf_box(arr.beta, mf)],
            "dimensions": _dimensions(pres.graded_dimensions()),
        }
    )


def compute_check(file: InstanceFile, config: RunConfig) -> Result:
    """Regularity of the fan and genericity of theta, whichever the instance has.

    A failed verdict is an error carrying its witness.
    """
    if file.max_cones is None and file.theta is None:
        raise InstanceError("fan: check needs a fan, theta or both")
    document: dict[str, Any] = {}
    if file.max_cones is not None:
        sf = file.stacky_fan()
        regularity = check_regular_triangulation(sf.fan.dimension, sf.fan.rays, sf.fan.max_cones)
        if not regularity.regular:
            raise NotSemiProjectiveError(f"the fan is not a regular triangulation: {regularity.witness}")
        document["regular"] = {"regular": True, "weights": [str(w) for w in regularity.weights or ()]}
    if file.theta is not None:
        genericity = check_generic(file.arrangement())
        if not genericity.generic:
            assert genericity.witness is not None
            basis, j = genericity.witness
            raise NotGenericError(
                f"theta lies on the hyperplane spanned by column basis {list(basis)} without column {j}",
                witness={"basis": list(basis), "column": j},
            )
        document["generic"] = {
            "generic": True,
            "table": [{"basis": list(entry.columns), "lambdas": [str(a) for a in entry.lambdas]} for entry in genericity.table],
        }
    return Result(document)


def compute_verify_iso(file: InstanceFile, config: RunConfig) -> Result:
    report = verify_isomorphism(file.arrangement(), config.degree_cap)
    document = {
        "passed": report.passed,
        "checks": [{"name": check.name, "result": "pass" if check.passed else "fail", "detail": check.detail} for check in report.checks],
        "lawrence_dimensions": _dimensions(report.lawrence_dimensions),
        "hypertoric_dimensions": _dimensions(report.hypertoric_dimensions),
        "box": [
            {
                "hypertoric": {"v": list(pair.hypertoric.v), "cone": list(cone_label(pair.hypertoric.cone))},
                "lawrence": list(pair.lawrence.v),
                "age": str(pair.lawrence.age),
            }
            for pair in report.box
        ],
    }
    return Result(document, 0 if report.passed else VerificationError.exit_code)


COMMANDS: dict[str, Callable[[InstanceFile, RunConfig], Result]] = {
    "gale": compute_gale,
    "box": compute_box,
    "betti": compute_betti,
    "multiply": compute_multiply,
    "inertia": compute_inertia,
    "lawrence": compute_lawrence,
    "hypertoric": compute_hypertoric,
    "verify-iso": compute_verify_iso,
    "check": compute_check,
}


def error_document(error: ToricChowError) -> dict[str, Any]:
    document: dict[str, Any] = {"error": error.reason, "message": str(error)}
    witness = getattr(error, "witness", None)
    if witness is not None:
        document["witness"] = witness
    return document


class Instance:
    def __init__(self, id: Path, text: str, config: RunConfig):
        self.id = id
        self.text = text
        self.config = config

    def result(self, command: str) -> Result:
        "The document for `command`, or the error document when the instance is rejected."
        try:
            return COMMANDS[command](parse_instance(self.text), self.config)
        except ToricChowError as e:
            return self._rejected(command, e)
        except Exception as e:
            logger.exception("%s on %s failed", command, self.id)
            return self._rejected(command, InternalError(f"{type(e).__name__}: {e}"))

    def _rejected(self, command: str, e: ToricChowError) -> Result:
        logger.debug("%s on %s: %s (%s)", command, self.id, e, e.reason)
        return Result(error_document(e), e.exit_code)

    def skips(self, command: str) -> bool:
        return command in self.config.skip
