import math
import random
from fractions import Fraction

import numpy as np
import pytest

from bimetric3.canonical import (
    canonical_matrices,
    canonicalize,
    rank_one_chain,
    rank_two_chain,
    validate_params,
    verify_canonical,
)
from bimetric3.classify import ClassId, classify
from bimetric3.errors import InvalidParamsError, PreconditionViolated, ResidualTooLarge
from bimetric3.exact import Matrix3, apply_form, mat_vec, vec_add, vec_scale
from bimetric3.invariants import (
    MetricPair,
    associated_operator,
    char_poly,
    triple_root,
)
from bimetric3.testkit import SampleSpec, sample_class

from conftest import FIXTURE_PARAMS, canonical_pair

EXACT_PARAM_CLASSES = [
    cid
    for cid in ClassId
    if cid not in (ClassId.T1_THREE_REAL_DISTINCT, ClassId.T3_COMPLEX_PAIR)
]


def transform_array(result) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in result.transform.rows])


class TestValidateParams:
    def test_t1_side_conditions(self):
        with pytest.raises(InvalidParamsError, match="b != c"):
            validate_params(ClassId.T1_THREE_REAL_DISTINCT,
                            dict(a=Fraction(2), b=Fraction(1), c=Fraction(1)))
        with pytest.raises(InvalidParamsError, match="a != -b"):
            validate_params(ClassId.T1_THREE_REAL_DISTINCT,
                            dict(a=Fraction(2), b=Fraction(-2), c=Fraction(1)))

    def test_t3_needs_rotation(self):
        with pytest.raises(InvalidParamsError, match="b != 0"):
            validate_params(ClassId.T3_COMPLEX_PAIR,
                            dict(a=Fraction(1), b=Fraction(0), c=Fraction(1)))

    def test_wrong_keys(self):
        with pytest.raises(InvalidParamsError):
            validate_params(ClassId.T7_TRIPLE_SCALAR, dict(a=Fraction(1), b=Fraction(2)))


class TestAlreadyCanonical:
    @pytest.mark.parametrize("cid", list(ClassId), ids=lambda c: c.short)
    def test_identity_transform_and_tiny_residual(self, cid):
        pair = canonical_pair(cid)
        result = canonicalize(pair, tol=1e-12)
        assert result.residual <= 1e-12
        assert float(np.abs(transform_array(result) - np.eye(3)).max()) == 0.0
        assert result.form.class_id == cid

    def test_t1_params(self):
        result = canonicalize(canonical_pair(ClassId.T1_THREE_REAL_DISTINCT))
        assert result.form.params["a"] == pytest.approx(2.0, abs=1e-12)
        assert result.form.params["b"] == pytest.approx(1.0, abs=1e-12)
        assert result.form.params["c"] == pytest.approx(3.0, abs=1e-12)

    def test_exact_params(self):
        for cid in EXACT_PARAM_CLASSES:
            result = canonicalize(canonical_pair(cid))
            assert result.form.params == FIXTURE_PARAMS[cid]

    def test_t3_reflection_normalizes_rotation_sign(self):
        from conftest import MINK, exact_sym

        pair = MetricPair(MINK, exact_sym([[2, -1, 0], [-1, -2, 0], [0, 0, 1]]))
        result = canonicalize(pair)
        assert result.form.params["b"] == pytest.approx(1.0, abs=1e-12)
        t = transform_array(result)
        assert np.linalg.det(t) == pytest.approx(-1.0, abs=1e-9)


class TestScrambledRecovery:
    @pytest.mark.parametrize("cid", list(ClassId), ids=lambda c: c.short)
    def test_residual_and_params(self, cid):
        for seed in range(30):
            sample = sample_class(SampleSpec(cid, seed=seed))
            result = canonicalize(sample.pair)
            assert result.residual <= 1e-9
            if cid in EXACT_PARAM_CLASSES:
                assert result.form.params == sample.truth.params
            else:
                for key, val in sample.truth.params.items():
                    assert result.form.params[key] == pytest.approx(
                        float(val), abs=1e-9
                    )

    def test_params_are_congruence_invariants(self):
        for cid in ClassId:
            first = canonicalize(sample_class(SampleSpec(cid, params=FIXTURE_PARAMS[cid], seed=1)).pair)
            second = canonicalize(sample_class(SampleSpec(cid, params=FIXTURE_PARAMS[cid], seed=2)).pair)
            if cid in EXACT_PARAM_CLASSES:
                assert first.form.params == second.form.params
            else:
                for key in first.form.params:
                    assert first.form.params[key] == pytest.approx(
                        second.form.params[key], abs=1e-9
                    )

    def test_transform_is_binary64_even_for_exact_input(self):
        sample = sample_class(SampleSpec(ClassId.T8_TRIPLE_R1_SPLUS, seed=4))
        result = canonicalize(sample.pair)
        assert result.transform.mode == "float"

    def test_residual_tolerance_enforced(self):
        sample = sample_class(SampleSpec(ClassId.T1_THREE_REAL_DISTINCT, seed=3, congruence_bound=9))
        with pytest.raises(ResidualTooLarge):
            canonicalize(sample.pair, tol=1e-18)

    def test_float_pair_rejected(self):
        pair = canonical_pair(ClassId.T7_TRIPLE_SCALAR).to_float()
        with pytest.raises(PreconditionViolated):
            canonicalize(pair)


class TestJordanChains:
    def test_rank_one_chain_identities(self):
        for seed in range(20):
            sample = sample_class(SampleSpec(ClassId.T8_TRIPLE_R1_SPLUS, seed=seed))
            op = associated_operator(sample.pair)
            lam0 = triple_root(char_poly(op))
            chain, s3 = rank_one_chain(sample.pair, op, lam0)
            assert chain.depth == 2
            shifted = op.f - Matrix3.identity().scale(lam0)
            assert mat_vec(shifted, chain.e1) == chain.e0
            assert mat_vec(shifted, chain.e0) == (0, 0, 0)
            assert mat_vec(shifted, chain.e2) == (0, 0, 0)
            assert s3 == 1
            # staged zeros of the metric in the chain basis
            g = sample.pair.g
            assert apply_form(g, chain.e0, chain.e0) == 0
            assert apply_form(g, chain.e0, chain.e2) == 0

    def test_rank_two_chain_identities(self):
        for seed in range(20):
            sample = sample_class(SampleSpec(ClassId.T10_TRIPLE_R2, seed=seed))
            op = associated_operator(sample.pair)
            lam0 = triple_root(char_poly(op))
            chain = rank_two_chain(sample.pair, op, lam0)
            assert chain.depth == 3
            shifted = op.f - Matrix3.identity().scale(lam0)
            assert mat_vec(shifted, chain.e2) == chain.e1
            assert mat_vec(shifted, chain.e1) == chain.e0
            assert mat_vec(shifted, chain.e0) == (0, 0, 0)
            g = sample.pair.g
            assert apply_form(g, chain.e0, chain.e0) == 0
            assert apply_form(g, chain.e0, chain.e1) == 0
            assert apply_form(g, chain.e1, chain.e1) == apply_form(g, chain.e0, chain.e2)

    def test_sigma3_well_defined_under_chain_changes(self):
        rng = random.Random(17)
        for seed in range(10):
            sample = sample_class(SampleSpec(ClassId.T9_TRIPLE_R1_SMINUS, seed=seed))
            op = associated_operator(sample.pair)
            lam0 = triple_root(char_poly(op))
            chain, s3 = rank_one_chain(sample.pair, op, lam0)
            assert s3 == -1
            g = sample.pair.g
            for _ in range(20):
                alpha = Fraction(rng.choice([x for x in range(-5, 6) if x]), rng.randint(1, 3))
                delta = Fraction(rng.choice([x for x in range(-5, 6) if x]), rng.randint(1, 3))
                beta = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                gamma = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                e0 = vec_scale(chain.e0, alpha)
                e1 = vec_add(
                    vec_add(vec_scale(chain.e0, beta), vec_scale(chain.e1, alpha)),
                    vec_scale(chain.e2, gamma),
                )
                g01 = apply_form(g, e0, e1)
                assert g01 != 0
                assert (1 if g01 > 0 else -1) == s3


class TestVerifyCanonical:
    def test_pass_on_own_output(self):
        sample = sample_class(SampleSpec(ClassId.T6_SPACELIKE_DOUBLE_SMINUS, seed=8))
        result = canonicalize(sample.pair)
        report = verify_canonical(sample.pair, result, tol=1e-9)
        assert report.passed and report.residual <= 1e-9

    def test_identity_on_canonical_fixture(self):
        pair = canonical_pair(ClassId.T5_SPACELIKE_DOUBLE_SPLUS)
        result = canonicalize(pair)
        assert verify_canonical(pair, result, tol=1e-12).residual == 0.0

    def test_corrupted_transform_fails(self):
        from dataclasses import replace

        sample = sample_class(SampleSpec(ClassId.T4_SPACELIKE_DOUBLE_S0, seed=8))
        result = canonicalize(sample.pair)
        rows = [list(r) for r in result.transform.rows]
        rows[1][1] += 0.1
        bad = replace(result, transform=Matrix3.from_rows(rows))
        report = verify_canonical(sample.pair, bad, tol=1e-9)
        assert not report.passed
        assert report.residual > 1e-3


class TestT3Structure:
    def test_block_matches_complex_eigenvalues(self):
        for seed in range(15):
            sample = sample_class(SampleSpec(ClassId.T3_COMPLEX_PAIR, seed=seed))
            result = canonicalize(sample.pair)
            fm = np.array(
                [[float(x) for x in row] for row in associated_operator(sample.pair).f.rows]
            )
            eigs = np.linalg.eigvals(fm)
            pair_eigs = sorted(
                (e for e in eigs if abs(e.imag) > 1e-8),
                key=lambda z: z.imag,
            )
            assert len(pair_eigs) == 2
            assert result.form.params["a"] == pytest.approx(pair_eigs[1].real, abs=1e-9)
            assert result.form.params["b"] == pytest.approx(pair_eigs[1].imag, abs=1e-9)
            assert result.form.params["b"] > 0

    def test_canonical_matrices_match_params(self):
        sample = sample_class(SampleSpec(ClassId.T3_COMPLEX_PAIR, seed=2))
        result = canonicalize(sample.pair)
        g, gc = canonical_matrices(ClassId.T3_COMPLEX_PAIR, result.form.params)
        assert gc.rows == result.form.canonical_g_check.rows


class TestBulkResidual:
    @pytest.mark.parametrize("cid", list(ClassId), ids=lambda c: c.short)
    def test_random_param_samples(self, cid):
        # random parameters and congruences, the module-level contract
        for seed in range(200, 230):
            sample = sample_class(SampleSpec(cid, seed=seed))
            result = canonicalize(sample.pair)
            assert result.residual <= 1e-9
            assert classify(sample.pair) == result.form.class_id
