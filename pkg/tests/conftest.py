from fractions import Fraction

import pytest

from bimetric3.canonical import canonical_matrices
from bimetric3.classify import ClassId
from bimetric3.exact import Matrix3, SymMatrix3
from bimetric3.invariants import MetricPair

MINK = SymMatrix3.diagonal(1, -1, -1)
HYP = SymMatrix3.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, -1]])

# the ten table instantiations used by the residual acceptance criterion
FIXTURE_PARAMS = {
    ClassId.T1_THREE_REAL_DISTINCT: dict(a=Fraction(2), b=Fraction(1), c=Fraction(3)),
    ClassId.T2_TIMELIKE_DOUBLE: dict(a=Fraction(2), b=Fraction(1)),
    ClassId.T3_COMPLEX_PAIR: dict(a=Fraction(2), b=Fraction(1), c=Fraction(1)),
    ClassId.T4_SPACELIKE_DOUBLE_S0: dict(a=Fraction(1), c=Fraction(2)),
    ClassId.T5_SPACELIKE_DOUBLE_SPLUS: dict(a=Fraction(1), c=Fraction(2)),
    ClassId.T6_SPACELIKE_DOUBLE_SMINUS: dict(a=Fraction(1), c=Fraction(2)),
    ClassId.T7_TRIPLE_SCALAR: dict(a=Fraction(1)),
    ClassId.T8_TRIPLE_R1_SPLUS: dict(a=Fraction(1)),
    ClassId.T9_TRIPLE_R1_SMINUS: dict(a=Fraction(1)),
    ClassId.T10_TRIPLE_R2: dict(a=Fraction(1)),
}


def canonical_pair(class_id: ClassId, params=None) -> MetricPair:
    g, gc = canonical_matrices(class_id, params or FIXTURE_PARAMS[class_id])
    return MetricPair(g, gc)


def exact_matrix(rows) -> Matrix3:
    return Matrix3.from_rows([[Fraction(x) for x in row] for row in rows])


def exact_sym(rows) -> SymMatrix3:
    return SymMatrix3.from_rows([[Fraction(x) for x in row] for row in rows])


@pytest.fixture
def mink():
    return MINK


@pytest.fixture
def hyp():
    return HYP
