from fractions import Fraction

from pytest import fixture, raises

from toric_chow.abelian import FGAbelianGroup, LatticeMap, free_group
from toric_chow.errors import FanError
from toric_chow.stacky import BoxElement, box_of_cone, box_of_fan, inertia_components, inverse_box, quotient_stacky_fan, stacky_fan


@fixture
def p12():
    return stacky_fan(LatticeMap(free_group(1), ((1,), (-2,))), [{0}, {1}])


@fixture
def p1():
    return stacky_fan(LatticeMap(free_group(1), ((1,), (-1,))), [{0}, {1}])


@fixture
def gerbe():
    "A half-line with a Z/2 band."
    return stacky_fan(LatticeMap(FGAbelianGroup(1, (2,)), ((1, 0),)), [{0}])


class TestStackyFan:
    def test_rays_are_free_parts(self, gerbe):
        assert gerbe.fan.rays == ((1,),)
        assert gerbe.m == 1
        assert list(gerbe.extra) == []

    def test_extra_columns(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((1,), (-1,), (2,))), [{0}, {1}], n=2)
        assert list(sf.extra) == [2]
        assert len(sf.fan.rays) == 2

    def test_torsion_ray(self):
        with raises(FanError):
            stacky_fan(LatticeMap(FGAbelianGroup(1, (2,)), ((0, 1),)), [{0}])

    def test_combination(self, p12):
        assert p12.combination([(0, 3), (1, 1)]) == (1,)


class TestBox:
    def test_box_of_cone(self, p12):
        box = box_of_cone(p12, {1})
        assert [element.v for element in box] == [(0,), (-1,)]
        assert [element.age for element in box] == [0, Fraction(1, 2)]
        assert box[1].coordinates == ((1, Fraction(1, 2)),)

    def test_smooth_cone(self, p12):
        assert [element.v for element in box_of_cone(p12, {0})] == [(0,)]

    def test_torsion(self, gerbe):
        box = box_of_cone(gerbe, {0})
        assert [element.v for element in box] == [(0, 0), (0, 1)]
        assert all(element.age == 0 for element in box)
        assert all(element.is_torsion() for element in box)

    def test_cone_must_be_top_dimensional(self):
        sf = stacky_fan(LatticeMap(free_group(2), ((1, 0), (0, 1))), [{0, 1}])
        with raises(FanError):
            box_of_cone(sf, {0})

    def test_box_of_fan(self, p12):
        box = box_of_fan(p12)
        assert [(element.v, element.age) for element in box] == [((0,), 0), ((-1,), Fraction(1, 2))]

    def test_smooth_fan(self, p1):
        assert [element.v for element in box_of_fan(p1)] == [(0,)]

    def test_size_is_the_index(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((1,), (-3,))), [{0}, {1}])
        assert len(box_of_cone(sf, {1})) == 3


class TestQuotient:
    def test_zero_cone(self, p12):
        assert quotient_stacky_fan(p12, set()) is p12

    def test_weighted_ray(self, p12):
        quotient = quotient_stacky_fan(p12, {1})
        assert quotient.group == FGAbelianGroup(0, (2,))
        assert quotient.n == 0
        assert quotient.fan.rays == ()
        assert quotient.fan.max_cones == (frozenset(),)

    def test_keeps_extra_columns(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((1,), (-1,), (2,))), [{0}, {1}], n=2)
        quotient = quotient_stacky_fan(sf, {0})
        assert quotient.n == 0
        assert quotient.m == 1
        assert quotient.group == FGAbelianGroup(0)


class TestInertia:
    def test_order_one(self, p12):
        components = inertia_components(p12, 1)
        assert [(tuple(v.v for v in c.elements), c.cone) for c in components] == [
            (((0,),), frozenset()),
            (((-1,),), frozenset({1})),
        ]

    def test_order_two(self, p12):
        assert len(inertia_components(p12, 2)) == 4

    def test_smooth(self, p1):
        (component,) = inertia_components(p1, 1)
        assert component.cone == frozenset()

    def test_order_must_be_positive(self, p12):
        with raises(ValueError):
            inertia_components(p12, 0)


class TestInverse:
    def test_self_inverse(self, p12):
        v = box_of_fan(p12)[1]
        inverse = inverse_box(p12, v)
        assert inverse.v == (-1,)
        assert inverse.coordinates == ((1, Fraction(1, 2)),)

    def test_zero(self, p12):
        zero = BoxElement((0,), frozenset(), ())
        assert inverse_box(p12, zero).v == (0,)

    def test_torsion(self, gerbe):
        torsion = box_of_fan(gerbe)[1]
        assert inverse_box(gerbe, torsion).v == (0, 1)

    def test_order_three(self):
        sf = stacky_fan(LatticeMap(free_group(1), ((1,), (-3,))), [{0}, {1}])
        third, two_thirds = box_of_cone(sf, {1})[1:]
        assert inverse_box(sf, third).v == two_thirds.v
