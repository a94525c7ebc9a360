import random
from fractions import Fraction

import pytest

from bimetric3.classify import ClassId, class_conditions, classify
from bimetric3.errors import PreconditionViolated
from bimetric3.exact import Matrix3, SymMatrix3, congruence, det3
from bimetric3.invariants import MetricPair
from bimetric3.testkit import SampleSpec, sample_class

from conftest import FIXTURE_PARAMS, HYP, MINK, canonical_pair, exact_sym


class TestClassIdParsing:
    def test_short_aliases(self):
        assert ClassId.parse("T1") == ClassId.T1_THREE_REAL_DISTINCT
        assert ClassId.parse("t10") == ClassId.T10_TRIPLE_R2

    def test_numeric_aliases(self):
        assert ClassId.parse("1") == ClassId.T1_THREE_REAL_DISTINCT
        assert ClassId.parse(7) == ClassId.T7_TRIPLE_SCALAR
        assert ClassId.parse("10") == ClassId.T10_TRIPLE_R2

    def test_stable_strings(self):
        for cid in ClassId:
            assert ClassId.parse(cid.value) == cid

    def test_unknown(self):
        with pytest.raises(ValueError):
            ClassId.parse("T11")


class TestClassifyExamples:
    def test_three_distinct(self):
        assert classify(MetricPair(MINK, SymMatrix3.diagonal(2, 1, 3))) == (
            ClassId.T1_THREE_REAL_DISTINCT
        )

    def test_equal_metrics(self):
        assert classify(MetricPair(MINK, MINK)) == ClassId.T7_TRIPLE_SCALAR

    def test_complex_pair(self):
        gc = exact_sym([[2, 1, 0], [1, -2, 0], [0, 0, 1]])
        assert classify(MetricPair(MINK, gc)) == ClassId.T3_COMPLEX_PAIR

    def test_rank_two_nilpotent(self):
        gc = exact_sym([[0, 0, 0], [0, 0, 1], [0, 1, 0]])
        assert classify(MetricPair(HYP, gc)) == ClassId.T10_TRIPLE_R2

    def test_all_canonical_fixtures(self):
        for cid, params in FIXTURE_PARAMS.items():
            assert classify(canonical_pair(cid, params)) == cid

    def test_float_mode_rejected(self):
        with pytest.raises(PreconditionViolated):
            classify(MetricPair(MINK.to_float(), MINK.to_float()))


class TestClassConditions:
    def test_t1(self):
        assert class_conditions(ClassId.T1_THREE_REAL_DISTINCT).as_dict() == {"D3": ">0"}

    def test_t4(self):
        got = class_conditions(ClassId.T4_SPACELIKE_DOUBLE_S0).as_dict()
        assert got == {"D3": "=0", "D2": "!=0", "sigma0": -1, "sigma1": 0}

    def test_t10(self):
        got = class_conditions(ClassId.T10_TRIPLE_R2).as_dict()
        assert got == {"D3": "=0", "D2": "=0", "sigma2": 2}

    def test_t2_uses_strict_positive(self):
        assert class_conditions(ClassId.T2_TIMELIKE_DOUBLE).as_dict()["D2"] == ">0"


class TestInvariance:
    def test_congruence_invariance_all_classes(self):
        rng = random.Random(99)
        for cid in ClassId:
            pair = canonical_pair(cid)
            checked = 0
            while checked < 60:
                t = Matrix3.from_rows(
                    [[Fraction(rng.randint(-5, 5)) for _ in range(3)] for _ in range(3)]
                )
                if det3(t) == 0:
                    continue
                moved = MetricPair(congruence(t, pair.g), congruence(t, pair.g_check))
                assert classify(moved) == cid
                checked += 1

    def test_sampler_round_trip(self):
        for cid in ClassId:
            for seed in range(25):
                sample = sample_class(SampleSpec(cid, seed=seed))
                assert classify(sample.pair) == cid

    def test_shift_and_scale_invariance(self):
        for cid in ClassId:
            pair = canonical_pair(cid)
            shifted = MetricPair(pair.g, pair.g_check + pair.g.scale(Fraction(5, 2)))
            assert classify(shifted) == cid
            scaled = MetricPair(pair.g, pair.g_check.scale(Fraction(3, 4)))
            assert classify(scaled) == cid
