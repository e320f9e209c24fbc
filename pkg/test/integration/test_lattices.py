import math

from hypothesis import given, settings
from sympy import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import smith_normal_form as smith_normal_form_zz

from toric_chow import linalg
from toric_chow.abelian import FGAbelianGroup, gale_dual, mat_mul, quotient_by_columns, smith_normal_form

from .strategies import GALE_SETTINGS, configurations, matrices, torsion_configurations


@given(matrices())
@settings(**GALE_SETTINGS)
def test_smith_normal_form(matrix):
    ncols = len(matrix[0])
    snf = smith_normal_form(matrix, ncols)
    assert mat_mul(mat_mul(snf.u, matrix, ncols), snf.v, ncols) == [list(row) for row in snf.d]
    assert abs(DM([list(row) for row in snf.u], ZZ).det()) == 1
    assert abs(DM([list(row) for row in snf.v], ZZ).det()) == 1
    diagonal = snf.diagonal[: snf.rank]
    assert all(d > 0 for d in diagonal)
    assert all(b % a == 0 for a, b in zip(diagonal, diagonal[1:], strict=False))
    assert snf.rank == linalg.rank(matrix, ncols)


@given(matrices())
@settings(**GALE_SETTINGS)
def test_invariant_factors_agree_with_sympy(matrix):
    ncols = len(matrix[0])
    oracle = smith_normal_form_zz(DM(matrix, ZZ)).to_dense().to_list()
    expected = sorted(abs(int(oracle[i][i])) for i in range(min(len(matrix), ncols)) if oracle[i][i])
    assert sorted(smith_normal_form(matrix, ncols).diagonal[: linalg.rank(matrix, ncols)]) == expected


@given(configurations(max_columns=6))
@settings(**GALE_SETTINGS)
def test_quotient_order_is_the_product_of_invariant_factors(beta):
    quotient = quotient_by_columns(beta.target, beta.columns)
    matrix = [list(row) for row in beta.lift_matrix]
    snf = smith_normal_form(matrix, beta.source_rank)
    assert quotient.group.order() == math.prod(snf.diagonal[: snf.rank])


@given(configurations(max_columns=6))
@settings(**GALE_SETTINGS)
def test_gale_dual_is_exact(beta):
    dual = gale_dual(beta)
    group = dual.group
    m = beta.source_rank
    assert group.free_rank == m - beta.target.free_rank
    assert linalg.rank(dual.beta_dual.free_matrix, m) == m - linalg.rank(beta.free_matrix, m)
    for k in range(beta.target.rank):
        images = [group.scale(beta.columns[i][k], dual.beta_dual.columns[i]) for i in range(m)]
        assert group.add(group.zero(), *images) == group.zero()
    assert quotient_by_columns(group, dual.beta_dual.columns).group == FGAbelianGroup(0)


@given(configurations(max_columns=6))
@settings(**GALE_SETTINGS)
def test_double_dual_recovers_the_target(beta):
    dual = gale_dual(beta)
    assert gale_dual(dual.beta_dual).group == beta.target


@given(torsion_configurations(max_columns=6))
@settings(**GALE_SETTINGS)
def test_gale_dual_of_torsion_target(beta):
    dual = gale_dual(beta)
    group = dual.group
    m = beta.source_rank
    assert group.free_rank == m - beta.target.free_rank
    for k in range(beta.target.free_rank):
        images = [group.scale(beta.columns[i][k], dual.beta_dual.columns[i]) for i in range(m)]
        assert group.add(group.zero(), *images) == group.zero()
