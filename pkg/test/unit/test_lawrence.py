from fractions import Fraction

from pytest import fixture, raises

from toric_chow.abelian import FGAbelianGroup, LatticeMap, free_group, identity
from toric_chow.errors import FanError, InstanceError, NotGenericError, RankError
from toric_chow.lawrence import (
    Hyperplane,
    StackyArrangement,
    check_generic,
    hyperplanes,
    lawrence_fan,
    lawrence_lift,
    lawrence_stacky_fan,
    lifting,
    link,
    offset_translation,
    quotient_arrangement,
)
from toric_chow.stacky import box_of_fan


def arrangement(columns, theta, rank=1, psi=None):
    return StackyArrangement(LatticeMap(free_group(rank), tuple(map(tuple, columns))), tuple(theta), psi)


@fixture
def instance_c():
    return arrangement([(1,), (2,)], (1,))


@fixture
def unimodular():
    return arrangement(identity(2), (), rank=2)


class TestArrangement:
    def test_dual(self, instance_c):
        assert instance_c.dual.group == free_group(1)
        assert instance_c.dual.beta_dual.columns == ((2,), (-1,))

    def test_torsion_column(self):
        with raises(InstanceError):
            StackyArrangement(LatticeMap(FGAbelianGroup(1, (2,)), ((1, 0), (0, 1))), (1,))

    def test_theta_does_not_fit(self):
        with raises(InstanceError):
            arrangement([(1,), (2,)], (1, 0))

    def test_psi(self):
        assert arrangement([(1,), (2,)], (1,), psi=(0, 1)).psi == (0, 1)
        with raises(InstanceError):
            arrangement([(1,), (2,)], (1,), psi=(1, 0))
        with raises(InstanceError):
            arrangement([(1,), (2,)], (1,), psi=(0,))


class TestGenericity:
    def test_generic(self, instance_c):
        report = check_generic(instance_c)
        assert report.generic
        assert [(entry.columns, entry.lambdas) for entry in report.table] == [((0,), (Fraction(1, 2),)), ((1,), (-1,))]

    def test_zero_is_on_every_hyperplane(self):
        report = check_generic(arrangement([(1,), (2,)], (0,)))
        assert not report.generic
        assert report.witness == ((0,), 0)

    def test_trivial_dual(self, unimodular):
        report = check_generic(unimodular)
        assert report.generic
        assert [entry.columns for entry in report.table] == [()]

    def test_columns_must_span(self):
        arr = arrangement([(1, 0), (2, 0)], (1,), rank=2)
        with raises(RankError):
            check_generic(arr)


class TestHyperplanes:
    def test_instance_c(self, instance_c):
        assert lifting(instance_c) == (0, 1)
        assert hyperplanes(instance_c) == [Hyperplane((1,), 0), Hyperplane((2,), 1)]

    def test_central(self):
        assert [h.offset for h in hyperplanes(arrangement([(1,), (2,)], (0,)))] == [0, 0]

    def test_single_hyperplane(self):
        assert hyperplanes(arrangement([(1,)], ())) == [Hyperplane((1,), 0)]

    def test_given_lifting(self):
        arr = arrangement([(1,), (2,)], (1,), psi=(2, 5))
        assert hyperplanes(arr) == [Hyperplane((1,), 2), Hyperplane((2,), 5)]

    def test_offsets_up_to_translation(self, instance_c):
        assert offset_translation(instance_c, (0, 1), (1, 3)) == (1,)
        assert offset_translation(instance_c, (0, 1), (0, 2)) is None


class TestLawrence:
    def test_lift(self, instance_c):
        data = lawrence_lift(instance_c)
        assert data.group == free_group(3)
        assert data.fan is None
        for i in range(2):
            b_i = instance_c.beta.columns[i]
            assert data.inclusion(b_i) == data.group.sub(data.beta.columns[i], data.beta.columns[2 + i])

    def test_lift_satisfies_the_dual_relation(self, instance_c):
        data = lawrence_lift(instance_c)
        b = data.beta.columns
        group = data.group
        relation = group.add(group.scale(2, b[0]), group.scale(-1, b[1]), group.scale(-2, b[2]), b[3])
        assert relation == group.zero()

    def test_lift_unimodular(self, unimodular):
        data = lawrence_lift(unimodular)
        assert data.group == free_group(4)
        assert data.beta.columns == tuple(map(tuple, identity(4)))

    def test_fan(self, instance_c):
        data = lawrence_fan(instance_c)
        assert data.fan is not None
        assert set(data.fan.max_cones) == {frozenset({1, 2, 3}), frozenset({0, 1, 2})}
        assert set(data.unstable_sets()) == {frozenset({0}), frozenset({3})}
        assert data.fan.minimal_non_faces() == (frozenset({0, 3}),)

    def test_fan_with_equal_columns(self):
        data = lawrence_fan(arrangement([(1,), (1,)], (1,)))
        assert data.group == free_group(3)
        assert set(data.fan.max_cones) == {frozenset({1, 2, 3}), frozenset({0, 1, 2})}

    def test_fan_unimodular(self, unimodular):
        data = lawrence_fan(unimodular)
        assert data.fan.max_cones == (frozenset(range(4)),)

    def test_fan_needs_generic_theta(self):
        with raises(NotGenericError) as e:
            lawrence_fan(arrangement([(1,), (2,)], (0,)))
        assert e.value.witness == ((0,), 0)

    def test_lift_of_columns(self, instance_c):
        assert lawrence_lift(instance_c).lift({1}) == frozenset({1, 3})

    def test_link_and_quotient_of_lawrence_fan(self, instance_c):
        fan = lawrence_fan(instance_c).fan
        assert fan.link({1, 3}) == (frozenset(), frozenset({2}))
        quotient = fan.quotient({1, 3})
        assert quotient.labels == (2,)
        assert quotient.fan.dimension == 1
        assert len(quotient.fan.rays) == 1

    def test_support(self, instance_c):
        fan = lawrence_fan(instance_c).fan
        b = fan.rays
        assert not fan.support_contains(tuple(-x for x in b[0]))
        # b_0 + b_3 = (b_1 + 2 b_2 + b_3) / 2
        assert fan.support_contains(tuple(x + y for x, y in zip(b[0], b[3], strict=True)))

    def test_stacky_fan(self, instance_c):
        sf = lawrence_stacky_fan(instance_c)
        assert sf.n == 4
        assert sf.fan.dimension == 3
        assert len(sf.fan.max_cones) == 2
        assert sorted(v.age for v in box_of_fan(sf)) == [0, 1]

    def test_stacky_fan_smooth(self):
        sf = lawrence_stacky_fan(arrangement([(1,), (1,)], (1,)))
        assert len(box_of_fan(sf)) == 1


class TestQuotientArrangement:
    def test_zero_cone(self, instance_c):
        assert quotient_arrangement(instance_c, set()) is instance_c

    def test_link(self, instance_c):
        assert link(instance_c, {1}) == ()
        assert link(instance_c, set()) == (0, 1)

    def test_instance_c(self, instance_c):
        quotient = quotient_arrangement(instance_c, {1})
        assert quotient.group == FGAbelianGroup(0, (2,))
        assert quotient.m == 0

    def test_dependent(self, instance_c):
        with raises(FanError):
            quotient_arrangement(instance_c, {0, 1})

    def test_keeps_the_link(self):
        arr = arrangement([(1, 0), (0, 1), (1, 1)], (1,), rank=2)
        assert check_generic(arr).generic
        quotient = quotient_arrangement(arr, {0})
        assert quotient.group == free_group(1)
        assert quotient.m == 2
        assert check_generic(quotient).generic
