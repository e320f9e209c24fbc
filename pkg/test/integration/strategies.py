"""Random instances: integer matrices, configurations, generic arrangements and weighted projective lines.

Bounds are those of the acceptance suites: configurations have at most 5 columns in rank at most 3 with
entries in [-3, 3]; Gale maps go up to 6 columns; matrices up to 6 x 6 with entries in [-10, 10].
"""

from hypothesis import HealthCheck, assume
from hypothesis import strategies as st

from toric_chow import linalg
from toric_chow.abelian import FGAbelianGroup, LatticeMap, free_group, gale_dual
from toric_chow.lawrence import StackyArrangement, check_generic
from toric_chow.stacky import ExtendedStackyFan, stacky_fan

SETTINGS = dict(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
GALE_SETTINGS = SETTINGS | dict(max_examples=200)

entries = st.integers(-10, 10)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    return [draw(st.lists(entries, min_size=cols, max_size=cols)) for _ in range(rows)]


@st.composite
def configurations(draw, rank=None, max_columns=5):
    "Columns of a map Z^m -> Z^rank whose images span over Q."
    rank = rank if rank is not None else draw(st.integers(1, 3))
    m = draw(st.integers(rank, max(rank, max_columns)))
    column = st.lists(st.integers(-3, 3), min_size=rank, max_size=rank).filter(any)
    columns = draw(st.lists(column, min_size=m, max_size=m))
    assume(linalg.rank(columns, rank) == rank)
    return LatticeMap(free_group(rank), tuple(map(tuple, columns)))


@st.composite
def arrangements(draw, rank=None, max_columns=5):
    "Stacky hyperplane arrangements with generic theta."
    beta = draw(configurations(rank, max_columns))
    group = gale_dual(beta).group
    theta = group.reduce(draw(st.lists(st.integers(-3, 3), min_size=group.rank, max_size=group.rank)))
    arr = StackyArrangement(beta, theta)
    assume(check_generic(arr).generic)
    return arr


@st.composite
def torsion_configurations(draw, max_columns=5):
    "Columns of a map Z^m -> Z^rank + Z/k, free parts spanning."
    free = draw(configurations(max_columns=max_columns))
    k = draw(st.integers(2, 4))
    residues = draw(st.lists(st.integers(0, k - 1), min_size=free.source_rank, max_size=free.source_rank))
    group = FGAbelianGroup(free.target.free_rank, (k,))
    return LatticeMap(group, tuple((*column, r) for column, r in zip(free.columns, residues, strict=True)))


@st.composite
def projective_lines(draw) -> ExtendedStackyFan:
    "Weighted projective lines P(a, b), with a Z/k band when k > 1."
    a, b = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    k = draw(st.integers(1, 3))
    if k == 1:
        return stacky_fan(LatticeMap(free_group(1), ((a,), (-b,))), [{0}, {1}])
    r, s = draw(st.integers(0, k - 1)), draw(st.integers(0, k - 1))
    return stacky_fan(LatticeMap(FGAbelianGroup(1, (k,)), ((a, r), (-b, s))), [{0}, {1}])
