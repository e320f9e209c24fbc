from fractions import Fraction

from pytest import raises

from toric_chow import linalg
from toric_chow.polyhedral import feasible_point, inequality, maximize


def test_feasible_point():
    x = feasible_point([[1, 1]], [2], 2)
    assert x is not None
    assert all(xi >= 0 for xi in x)
    assert x[0] + x[1] == 2


def test_feasible_point_none():
    assert feasible_point([[1, 1]], [-1], 2) is None


def test_maximize_on_an_interval():
    # 0 <= x <= 3/2
    inequalities = [inequality([1]), inequality([-2], 3)]
    assert maximize(inequalities, 1, 0) == (Fraction(3, 2), [Fraction(3, 2)])


def test_maximize_eliminates_other_variables():
    # t <= y, t <= 1 - y
    inequalities = [inequality([1, -1], index=0), inequality([-1, -1], 1, index=1)]
    optimum, x = maximize(inequalities, 2, 1)
    assert optimum == Fraction(1, 2)
    assert x == [Fraction(1, 2), Fraction(1, 2)]


def test_maximize_infeasible():
    inequalities = [inequality([1], -2), inequality([-1], 1)]
    assert maximize(inequalities, 1, 0) is None


def test_maximize_unbounded():
    with raises(ValueError):
        maximize([inequality([1])], 1, 0)


class TestLinalg:
    def test_rank(self):
        assert linalg.rank([[1, 2], [2, 4]]) == 1
        assert linalg.rank([], 3) == 0

    def test_solve_columns(self):
        assert linalg.solve_columns([(-2,)], (-1,)) == [Fraction(1, 2)]
        assert linalg.solve_columns([(1, 0)], (0, 1)) is None
        assert linalg.solve_columns([], (0, 0)) == []

    def test_nullspace(self):
        assert linalg.nullspace([[1, 2]], 2) == [[Fraction(-2), Fraction(1)]]

    def test_is_independent(self):
        assert linalg.is_independent([(1, 0), (1, 1)])
        assert not linalg.is_independent([(1, 2), (2, 4)])
        assert not linalg.is_independent([(0,)])
        assert linalg.is_independent([])

    def test_inverse(self):
        assert linalg.inverse([[2, 1], [1, 1]]) == [[1, -1], [-1, 2]]

    def test_in_row_space(self):
        assert linalg.in_row_space([[1, 2]], 2, [3, 6])
        assert not linalg.in_row_space([[1, 2]], 2, [1, 0])

    def test_column_solver(self):
        solver = linalg.column_solver([(2, -2, 1), (0, 1, 0), (0, 0, 1)], 3)
        assert solver is not None
        assert solver((1, 0, 1)) == (Fraction(1, 2), 1, Fraction(1, 2))
        assert solver((0, 0, 0)) == (0, 0, 0)

    def test_column_solver_off_the_span(self):
        solver = linalg.column_solver([(1, 0, 1)], 3)
        assert solver is not None
        assert solver((2, 0, 2)) == (2,)
        assert solver((Fraction(1, 2), 0, Fraction(1, 2))) == (Fraction(1, 2),)
        assert solver((1, 1, 1)) is None

    def test_column_solver_dependent_columns(self):
        assert linalg.column_solver([(1, 2), (2, 4)], 2) is None

    def test_column_solver_no_columns(self):
        solver = linalg.column_solver([], 2)
        assert solver is not None
        assert solver((0, 0)) == ()
        assert solver((1, 0)) is None
        with raises(ValueError):
            solver((0, 0, 0))

    def test_column_solver_agrees_with_solve_columns(self):
        columns = [(3, -1, -3), (2, -1, 2)]
        solver = linalg.column_solver(columns, 3)
        assert solver is not None
        for target in [(5, -2, -1), (1, 0, -5), (Fraction(3, 2), Fraction(-1, 2), Fraction(-3, 2)), (1, 1, 1)]:
            expected = linalg.solve_columns(columns, target)
            assert solver(target) == (None if expected is None else tuple(expected))
