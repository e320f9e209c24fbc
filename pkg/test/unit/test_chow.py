from fractions import Fraction

from pytest import fixture, raises

from toric_chow.abelian import FGAbelianGroup, LatticeMap, free_group
from toric_chow.chow import (
    build_presentation,
    cup_product_via_sectors,
    decompose,
    deformed_element,
    deformed_product,
    degree,
    module_decomposition,
    normal_form,
    obstruction_exponents,
)
from toric_chow.errors import FanError, MalformedTripleError, NotFiniteError, NotSemiProjectiveError
from toric_chow.lawrence import StackyArrangement, lawrence_stacky_fan
from toric_chow.stacky import BoxElement, box_of_cone, box_of_fan, stacky_fan


@fixture
def p12():
    return stacky_fan(LatticeMap(free_group(1), ((1,), (-2,))), [{0}, {1}])


@fixture
def p13():
    return stacky_fan(LatticeMap(free_group(1), ((1,), (-3,))), [{0}, {1}])


@fixture
def half_line():
    return stacky_fan(LatticeMap(free_group(1), ((1,), (-1,))), [{0}])


class TestDeformedRing:
    def test_element_sums_repeats(self, p12):
        assert deformed_element(p12, [((1,), 1), ((1,), 2), ((-1,), 0)]) == {(1,): 3}

    def test_element_outside_support(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((1,),)), [{0}])
        with raises(FanError):
            deformed_element(sf, [((-1,), 1)])

    def test_rays_in_different_cones(self, p12):
        assert deformed_product(p12, {(1,): 1}, {(-2,): 1}) == {}

    def test_identity(self, p12):
        assert deformed_product(p12, {(0,): 1}, {(-3,): Fraction(1, 2)}) == {(-3,): Fraction(1, 2)}

    def test_twisted_square(self, p12):
        assert deformed_product(p12, {(-1,): 1}, {(-1,): 1}) == {(-2,): 1}

    def test_factor_outside_the_support(self, half_line):
        with raises(FanError) as e:
            deformed_product(half_line, {(1,): 1}, {(-1,): 1})
        assert e.value.witness == (-1,)


class TestDecompose:
    def test_weighted_point(self, p12):
        decomposition = decompose(p12, (-3,))
        assert decomposition.box.v == (-1,)
        assert decomposition.exponents == (0, 1)
        assert decomposition.degree == Fraction(3, 2)

    def test_ray(self, p12):
        decomposition = decompose(p12, (1,))
        assert decomposition.box.v == (0,)
        assert decomposition.exponents == (1, 0)

    def test_torsion(self):
        sf = stacky_fan(LatticeMap(FGAbelianGroup(1, (2,)), ((1, 0),)), [{0}])
        decomposition = decompose(sf, (0, 1))
        assert decomposition.box.v == (0, 1)
        assert decomposition.exponents == (0,)

    def test_outside_support(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((1,),)), [{0}])
        with raises(FanError):
            decompose(sf, (-2,))

    def test_degree(self, p12):
        assert degree(p12, (-1,)) == Fraction(1, 2)
        assert degree(p12, (-2,)) == 1
        assert degree(p12, (-3,)) == Fraction(3, 2)


class TestPresentation:
    def test_weighted_projective_line(self, p12):
        pres = build_presentation(p12)
        assert pres.graded_dimensions() == {0: 1, Fraction(1, 2): 1, 1: 1}
        assert max(pres.pieces) == 1

    def test_projective_line(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((1,), (-1,))), [{0}, {1}])
        assert build_presentation(sf).graded_dimensions() == {0: 1, 1: 1}

    def test_untwisted(self, p12):
        assert build_presentation(p12, untwisted=True).graded_dimensions() == {0: 1, 1: 1}

    def test_torsion_sectors(self):
        sf = stacky_fan(LatticeMap(FGAbelianGroup(1, (2,)), ((1, 0),)), [{0}])
        assert build_presentation(sf).graded_dimensions() == {0: 2}

    def test_not_semi_projective(self, half_line):
        with raises(NotSemiProjectiveError):
            build_presentation(half_line)

    def test_degree_cap(self, p12):
        with raises(NotFiniteError):
            build_presentation(p12, degree_cap=0)

    def test_module_decomposition(self, p12):
        assert module_decomposition(p12) == build_presentation(p12).graded_dimensions()

    def test_module_decomposition_with_fractional_ages(self, p13):
        expected = {0: 1, Fraction(1, 3): 1, Fraction(2, 3): 1, 1: 1}
        assert module_decomposition(p13) == build_presentation(p13).graded_dimensions() == expected

    def test_module_decomposition_of_a_weighted_plane(self):
        # P(1, 2, 1): the cone {0, 2} has index 2
        sf = stacky_fan(LatticeMap(free_group(2), ((1, 0), (0, 1), (-1, -2))), [{0, 1}, {1, 2}, {0, 2}])
        assert module_decomposition(sf) == build_presentation(sf).graded_dimensions() == {0: 1, 1: 2, 2: 1}

    def test_module_decomposition_of_a_lawrence_fan(self):
        sf = lawrence_stacky_fan(StackyArrangement(LatticeMap(free_group(1), ((1,), (2,))), (1,)))
        assert module_decomposition(sf) == build_presentation(sf).graded_dimensions() == {0: 1, 1: 2}

    def test_basis(self, p12):
        pres = build_presentation(p12)
        assert pres.basis() == [(0, (0, 0)), (1, (0, 0)), (0, (0, 1))]


class TestNormalForm:
    def test_linear_relation(self, p12):
        pres = build_presentation(p12)
        assert normal_form(pres, {(1,): 1, (-2,): -2}) == {}

    def test_basis_monomial(self, p12):
        pres = build_presentation(p12)
        assert normal_form(pres, {(-1,): 1}) == {(1, (0, 0)): 1}

    def test_reduces_onto_the_basis(self, p12):
        pres = build_presentation(p12)
        assert normal_form(pres, {(1,): 1}) == {(0, (0, 1)): 2}

    def test_beyond_the_top_degree(self, p12):
        pres = build_presentation(p12)
        assert normal_form(pres, {(-4,): 1}) == {}

    def test_lattice_point(self, p12):
        pres = build_presentation(p12)
        assert pres.lattice_point((1, (0, 1))) == (-3,)


class TestObstruction:
    def test_untwisted(self, p12):
        zero = box_of_fan(p12)[0]
        assert obstruction_exponents(p12, zero, zero, zero) == frozenset()

    def test_half_and_half(self, p12):
        zero, half = box_of_fan(p12)
        assert obstruction_exponents(p12, half, half, zero) == frozenset()

    def test_two_thirds(self, p13):
        two_thirds = box_of_cone(p13, {1})[2]
        assert two_thirds.v == (-2,)
        assert obstruction_exponents(p13, two_thirds, two_thirds, two_thirds) == frozenset({1})

    def test_malformed(self, p13):
        zero, third, _ = box_of_cone(p13, {1})
        with raises(MalformedTripleError):
            obstruction_exponents(p13, third, third, zero)

    def test_no_common_cone(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((-2,), (2,))), [{0}, {1}])
        left = box_of_cone(sf, {0})[1]
        right = box_of_cone(sf, {1})[1]
        zero = BoxElement((0,), frozenset(), ())
        assert obstruction_exponents(sf, left, right, zero) is None


class TestCupProduct:
    def test_unit(self, p12):
        pres = build_presentation(p12)
        zero, half = box_of_fan(p12)
        assert cup_product_via_sectors(pres, zero, half) == pres.reduce({pres.box_monomial(half): 1})

    def test_twisted_square(self, p12):
        pres = build_presentation(p12)
        _, half = box_of_fan(p12)
        expected = normal_form(pres, deformed_product(p12, {half.v: 1}, {half.v: 1}))
        assert cup_product_via_sectors(pres, half, half) == expected == {(0, (0, 1)): 1}

    def test_no_common_cone(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((-2,), (2,))), [{0}, {1}])
        pres = build_presentation(sf)
        left = box_of_cone(sf, {0})[1]
        right = box_of_cone(sf, {1})[1]
        assert cup_product_via_sectors(pres, left, right) == {}
