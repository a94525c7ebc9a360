"""Class-conditioned sample generation and an independent brute-force
classification oracle for differential testing.

The oracle never touches the discriminant formulas: it reads the
multiplicity pattern off clustered numeric roots and derives the discrete
invariants from the numeric eigenstructure, so agreement with the exact
classifier is a genuine cross-check.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .canonical import CanonicalForm, canonical_matrices, validate_params
from .classify import ClassId
from .errors import AmbiguousClassification, InvalidParamsError
from .exact import Matrix3, SymMatrix3, congruence, det3
from .invariants import MetricPair, associated_operator, char_poly
from .numeric import FloatToleranceConfig, cubic_roots


@dataclass(frozen=True)
class SampleSpec:
    class_id: ClassId
    params: Optional[dict] = None
    congruence_bound: int = 5
    seed: int = 0


@dataclass(frozen=True)
class Sample:
    pair: MetricPair
    truth: CanonicalForm
    generator: Matrix3


def random_congruence(seed: int, bound: int = 5) -> Matrix3:
    """Integer-entry invertible matrix, entries in [-bound, bound].

    Deterministic per seed; resamples until the exact determinant is
    nonzero.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    rng = random.Random(seed)
    while True:
        rows = [[Fraction(rng.randint(-bound, bound)) for _ in range(3)] for _ in range(3)]
        m = Matrix3.from_rows(rows)
        if det3(m) != 0:
            return m


def _sample_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 4))


def sample_params(class_id: ClassId, rng: random.Random) -> dict:
    """Small random rationals satisfying the class's side conditions."""
    for _ in range(1000):
        a = _sample_fraction(rng)
        if class_id == ClassId.T1_THREE_REAL_DISTINCT:
            b, c = _sample_fraction(rng), _sample_fraction(rng)
            if b > c:
                b, c = c, b
            params = {"a": a, "b": b, "c": c}
        elif class_id == ClassId.T2_TIMELIKE_DOUBLE:
            params = {"a": a, "b": _sample_fraction(rng)}
        elif class_id == ClassId.T3_COMPLEX_PAIR:
            params = {"a": a, "b": abs(_sample_fraction(rng)), "c": _sample_fraction(rng)}
            if params["b"] == 0:
                continue
        elif class_id in (
            ClassId.T4_SPACELIKE_DOUBLE_S0,
            ClassId.T5_SPACELIKE_DOUBLE_SPLUS,
            ClassId.T6_SPACELIKE_DOUBLE_SMINUS,
        ):
            params = {"a": a, "c": _sample_fraction(rng)}
        else:
            params = {"a": a}
        try:
            validate_params(class_id, params)
        except InvalidParamsError:
            continue
        return params
    raise RuntimeError("parameter sampling failed to satisfy side conditions")


def normalized_truth_params(class_id: ClassId, params: dict) -> dict:
    """Apply the canonicalizer's determinism conventions to ground truth.

    T1 entries are reported with b < c and T3 with b > 0; a sample built
    from parameters outside these conventions is congruent to the
    normalized instance, which is what canonicalization recovers.
    """
    out = dict(params)
    if class_id == ClassId.T1_THREE_REAL_DISTINCT and out["b"] > out["c"]:
        out["b"], out["c"] = out["c"], out["b"]
    if class_id == ClassId.T3_COMPLEX_PAIR and out["b"] < 0:
        out["b"] = -out["b"]
    return out


def sample_class(spec: SampleSpec) -> Sample:
    """Instantiate the canonical pair of a class and scramble it by a
    random integer congruence.  The generating transform and the
    normalized canonical form are retained as ground truth."""
    rng = random.Random(spec.seed)
    params = spec.params if spec.params is not None else sample_params(spec.class_id, rng)
    validate_params(spec.class_id, params)
    g_can, gc_can = canonical_matrices(spec.class_id, params)
    t = random_congruence(rng.randrange(2**63), spec.congruence_bound)
    pair = MetricPair(congruence(t, g_can), congruence(t, gc_can))
    truth_params = normalized_truth_params(spec.class_id, params)
    tg, tgc = canonical_matrices(spec.class_id, truth_params)
    return Sample(pair, CanonicalForm(spec.class_id, truth_params, tg, tgc), t)


# ---------------------------------------------------------------------------
# brute-force oracle

_ORACLE_CFG = FloatToleranceConfig(tol=1e-10)


def _flag_if_near(value: float, threshold: float, what: str):
    if abs(value) <= 10.0 * threshold:
        raise AmbiguousClassification(f"{what} = {value:.3e} is inside the guard band")


def _guarded_sign(value: float, threshold: float, what: str) -> int:
    """Sign with a confidence gap: zero below threshold/10, signed above
    10*threshold, AmbiguousClassification in between."""
    if abs(value) <= threshold / 10.0:
        return 0
    if abs(value) < 10.0 * threshold:
        raise AmbiguousClassification(f"{what} = {value:.3e} is inside the guard band")
    return 1 if value > 0 else -1


def _unit_kernel_vector(a: np.ndarray) -> np.ndarray:
    best, best_n = None, -1.0
    for i in range(3):
        for j in range(i + 1, 3):
            cvec = np.cross(a[i], a[j])
            n = float(cvec @ cvec)
            if n > best_n:
                best, best_n = cvec, n
    if best_n <= 0.0:
        raise AmbiguousClassification("kernel direction undetermined")
    return best / math.sqrt(best_n)


def brute_force_class(pair: MetricPair, cfg: FloatToleranceConfig = _ORACLE_CFG) -> ClassId:
    """Classification by clustered numeric roots and eigenstructure only.

    Raises AmbiguousClassification whenever a root gap or a sign
    determination falls inside the guard band around its threshold.
    """
    fpair = pair.to_float() if pair.mode != "float" else pair
    op = associated_operator(fpair)
    c = char_poly(op)
    gm = np.array(fpair.g.rows, dtype=float)
    gcm = np.array(fpair.g_check.rows, dtype=float)
    fm = np.array(op.f.rows, dtype=float)
    s = cfg.scale(c)
    roots = cubic_roots(c, cfg)

    r2 = cfg.cluster_radius(c)
    r3 = cfg.triple_cluster_radius(c)
    if roots.complex_pair is not None:
        re, im = roots.complex_pair
        real = roots.real_roots[0][0]
        if im > 10.0 * r3 or (abs(re - real) > 10.0 * r3 and im > 10.0 * r2):
            return ClassId.T3_COMPLEX_PAIR
        raise AmbiguousClassification(
            f"imaginary part {im:.3e} too close to the clustering radius"
        )

    values = [v for v, _ in roots.real_roots]
    gaps = [abs(x - y) for i, x in enumerate(values) for y in values[i + 1 :]]
    pattern = roots.multiplicity_pattern()
    if pattern == (1, 1, 1):
        for gap in gaps:
            _flag_if_near(gap, r2, "root gap")
        return ClassId.T1_THREE_REAL_DISTINCT
    if pattern == (1, 2) and gaps[0] <= 3.0 * r3:
        raise AmbiguousClassification(
            f"double/simple gap {gaps[0]:.3e} too close to the triple radius"
        )

    if pattern == (1, 2):
        lam_s = next(v for v, m in roots.real_roots if m == 1)
        lam_d = next(v for v, m in roots.real_roots if m == 2)
        v = _unit_kernel_vector(fm - lam_s * np.eye(3))
        gn = float(v @ gm @ v)
        gscale = max(1.0, float(np.abs(gm).max()))
        s0 = _guarded_sign(gn, math.sqrt(cfg.tol) * gscale / 10.0, "eigenvector g-norm")
        if s0 == 0:
            raise AmbiguousClassification("simple eigenvector is numerically null")
        if s0 > 0:
            return ClassId.T2_TIMELIKE_DOUBLE
        # restricted-form signature on the complement of the simple eigenvector
        n = gm @ v
        cands = [np.cross(np.eye(3)[i], n) for i in range(3)]
        w1 = max(cands, key=lambda x: float(x @ x))
        w1 = w1 / np.linalg.norm(w1)
        w2 = np.cross(n, w1)
        w2 = w2 / np.linalg.norm(w2)
        h = gcm - lam_d * gm
        hm = np.array([[w1 @ h @ w1, w1 @ h @ w2], [w1 @ h @ w2, w2 @ h @ w2]])
        hscale = max(1.0, float(np.abs(h).max()))
        pivot_tol = math.sqrt(cfg.tol) * hscale
        eigs = sorted(np.linalg.eigvalsh(hm), key=abs, reverse=True)
        if _guarded_sign(float(eigs[1]), pivot_tol, "restricted-form second pivot") != 0:
            raise AmbiguousClassification("restricted form is not numerically rank <= 1")
        s1 = _guarded_sign(float(eigs[0]), pivot_tol, "restricted-form pivot")
        return {
            0: ClassId.T4_SPACELIKE_DOUBLE_S0,
            1: ClassId.T5_SPACELIKE_DOUBLE_SPLUS,
            -1: ClassId.T6_SPACELIKE_DOUBLE_SMINUS,
        }[s1]

    # triple root
    lam0 = values[0]
    b = fm - lam0 * np.eye(3)
    svs = np.linalg.svd(b, compute_uv=False)
    rank_tol = math.sqrt(cfg.tol) * max(1.0, s)
    rank = sum(
        _guarded_sign(float(sv), rank_tol, "nilpotent-rank pivot") for sv in svs
    )
    if rank == 0:
        return ClassId.T7_TRIPLE_SCALAR
    if rank == 2:
        return ClassId.T10_TRIPLE_R2
    if rank == 3:
        raise AmbiguousClassification("nilpotent part looks full-rank")
    # sigma3 from the spectrum of the difference form, not from the chain
    h = gcm - lam0 * gm
    eigs = sorted(np.linalg.eigvalsh(h), key=abs, reverse=True)
    hscale = max(1.0, float(np.abs(h).max()))
    pivot_tol = math.sqrt(cfg.tol) * hscale
    if _guarded_sign(float(eigs[1]), pivot_tol, "difference-form second pivot") != 0:
        raise AmbiguousClassification("difference form is not numerically rank 1")
    s3 = _guarded_sign(float(eigs[0]), pivot_tol, "difference-form pivot")
    if s3 == 0:
        raise AmbiguousClassification("difference-form pivot is numerically zero")
    return ClassId.T8_TRIPLE_R1_SPLUS if s3 > 0 else ClassId.T9_TRIPLE_R1_SMINUS
