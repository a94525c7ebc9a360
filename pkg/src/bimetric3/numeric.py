"""Floating-point cubic root solving and tolerance-based classification.

Thresholds are degree-aware: D3 is homogeneous of degree 6 and D2 of
degree 2 in the eigenvalue scale, so a pair scaled by c keeps the same
classification at the same relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .classify import ClassId
from .errors import AmbiguousClassification, PreconditionViolated
from .exact import FLOAT, SymMatrix3
from .invariants import (
    CharPoly,
    MetricPair,
    associated_operator,
    discriminant_d2,
    discriminant_d3,
)


@dataclass(frozen=True)
class FloatToleranceConfig:
    """Relative threshold and its scale policy.

    A quantity of homogeneity degree k is treated as zero when its
    magnitude is at most tol * s**k, with s the eigenvalue-scale estimate
    max(1, |a0|, |a1|^(1/2), |a2|^(1/3)).
    """

    tol: float = 1e-10

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def scale(self, c: CharPoly) -> float:
        return max(
            1.0,
            abs(float(c.a0)),
            abs(float(c.a1)) ** 0.5,
            abs(float(c.a2)) ** (1.0 / 3.0),
        )

    def cluster_radius(self, c: CharPoly) -> float:
        # sqrt exponent: a coefficient perturbation eps moves a double
        # root by O(sqrt(eps)).
        return math.sqrt(self.tol) * self.scale(c)

    def triple_cluster_radius(self, c: CharPoly) -> float:
        # cube-root exponent, same argument at multiplicity three
        return self.tol ** (1.0 / 3.0) * self.scale(c)


@dataclass(frozen=True)
class CubicRoots:
    """Real roots with multiplicities, plus an optional complex pair."""

    real_roots: tuple
    complex_pair: Optional[tuple] = None

    def multiplicity_pattern(self) -> tuple:
        return tuple(sorted(m for _, m in self.real_roots))


def _float_coeffs(c: CharPoly):
    return float(c.a0), float(c.a1), float(c.a2)


def _polish(c: CharPoly, x: float) -> float:
    """Guarded Newton: a step is kept only if it shrinks |P|.

    Near a multiple root P(x) is cancellation noise while P'(x) is tiny,
    so an unguarded step can be wildly wrong.
    """
    a0, a1, a2 = _float_coeffs(c)

    def p_of(t):
        return -t**3 + a0 * t**2 - a1 * t + a2

    for _ in range(2):
        p = p_of(x)
        dp = -3 * x**2 + 2 * a0 * x - a1
        if dp == 0.0 or p == 0.0:
            break
        step = p / dp
        if not math.isfinite(step):
            break
        if abs(p_of(x - step)) < abs(p):
            x -= step
        else:
            break
    return x


def cubic_roots(c: CharPoly, cfg: FloatToleranceConfig = None) -> CubicRoots:
    """Roots of -x^3 + a0 x^2 - a1 x + a2.

    Closed-form solution (trigonometric for three real roots, Cardano for
    one real root plus a complex pair) followed by a Newton polishing
    step; real roots closer than the cluster radius are merged into a
    multiple root.
    """
    cfg = cfg or FloatToleranceConfig()
    a0, a1, a2 = _float_coeffs(c)
    # depressed monic form t^3 + p t + q with x = t + a0/3
    shift = a0 / 3.0
    p = a1 - a0**2 / 3.0
    q = -2.0 * a0**3 / 27.0 + a0 * a1 / 3.0 - a2
    disc = -4.0 * p**3 - 27.0 * q**2

    if disc >= 0.0:
        # three real roots (counting multiplicity); p <= 0 here
        if p >= 0.0:
            ts = [0.0, 0.0, 0.0]  # p = q = 0 up to rounding: triple root
        else:
            m = 2.0 * math.sqrt(-p / 3.0)
            arg = 3.0 * q / (p * m)
            arg = min(1.0, max(-1.0, arg))
            phi = math.acos(arg)
            ts = [m * math.cos((phi - 2.0 * math.pi * k) / 3.0) for k in range(3)]
        values = [(_polish(c, t + shift), 1) for t in ts]
        return CubicRoots(_merge_real(values, cfg, c))

    # one real root, one complex-conjugate pair
    d = math.sqrt(q**2 / 4.0 + p**3 / 27.0)
    u = float(np.cbrt(-q / 2.0 + d)) if -q / 2.0 + d != 0 else 0.0
    if u != 0.0:
        v = -p / (3.0 * u)
    else:
        v = float(np.cbrt(-q / 2.0 - d))
    t0 = u + v
    real = _polish(c, t0 + shift)
    re = -t0 / 2.0 + shift
    im = abs(u - v) * math.sqrt(3.0) / 2.0
    r3 = cfg.triple_cluster_radius(c)
    if im <= r3 and abs(re - real) <= r3:
        # a triple root scattered across the real/complex boundary; the
        # trace identity gives its value at full precision
        return CubicRoots(((float(c.a0) / 3.0, 3),))
    if im <= cfg.cluster_radius(c):
        # a repeated real root pushed across the boundary by rounding
        return CubicRoots(_merge_real([(real, 1), (re, 2)], cfg, c))
    return CubicRoots(((real, 1),), (re, im))


def _merge_real(values, cfg: FloatToleranceConfig, c: CharPoly):
    """Cluster (value, multiplicity) pairs: pairwise merge within the
    double-root radius, then a total collapse within the triple radius."""
    merged = []
    for r, m in sorted(values):
        if merged and r - merged[-1][0] <= cfg.cluster_radius(c):
            val, mult = merged[-1]
            merged[-1] = ((val * mult + r * m) / (mult + m), mult + m)
        else:
            merged.append((r, m))
    if len(merged) > 1 and merged[-1][0] - merged[0][0] <= cfg.triple_cluster_radius(c):
        merged = [(float(c.a0) / 3.0, 3)]
    elif len(merged) == 1 and merged[0][1] == 3:
        merged = [(float(c.a0) / 3.0, 3)]
    return tuple(merged)


def critical_points(c: CharPoly):
    """Stationary points of the characteristic polynomial (needs D2 > 0)."""
    d2 = float(discriminant_d2(c))
    if d2 <= 0:
        raise PreconditionViolated("critical_points requires D2 > 0")
    a0 = float(c.a0)
    half_span = math.sqrt(d2) / 6.0
    return a0 / 3.0 - half_span, a0 / 3.0 + half_span


@dataclass(frozen=True)
class FloatClassification:
    class_id: ClassId
    coeffs: CharPoly
    d2: float
    d3: float
    sigma0: Optional[int] = None
    sigma1: Optional[int] = None
    sigma2: Optional[int] = None
    sigma3: Optional[int] = None
    notes: tuple = ()


def _thresholded_sign(value: float, threshold: float, name: str, notes: list) -> int:
    """Sign with a dead zone.

    A note is recorded whenever the decision leaned on the tolerance: a
    nonzero value snapped to zero, or a kept sign within 10x of the
    threshold.
    """
    mag = abs(value)
    if mag <= threshold:
        if mag != 0.0:
            notes.append(f"{name}={value:.3e} treated as zero (threshold {threshold:.1e})")
        return 0
    if mag < 10.0 * threshold:
        notes.append(f"{name}={value:.3e} within 10x of zero threshold {threshold:.1e}")
    return 1 if value > 0 else -1


def _np_sym(m: SymMatrix3) -> np.ndarray:
    return np.array(m.rows, dtype=float)


def _kernel_vector_float(a: np.ndarray) -> np.ndarray:
    """Best rank-2 kernel estimate: largest cross product of two rows."""
    best = None
    best_norm = -1.0
    for i in range(3):
        for j in range(i + 1, 3):
            c = np.cross(a[i], a[j])
            n = float(np.dot(c, c))
            if n > best_norm:
                best_norm = n
                best = c
    if best_norm <= 0.0:
        raise AmbiguousClassification("kernel direction numerically undetermined")
    return best / math.sqrt(best_norm)


def _complement_basis_float(gm: np.ndarray, v: np.ndarray):
    """Two unit vectors spanning {w : g(v, w) = 0}."""
    n = gm @ v
    cands = [np.cross(np.eye(3)[i], n) for i in range(3)]
    w1 = max(cands, key=lambda c: float(np.dot(c, c)))
    w1 = w1 / np.linalg.norm(w1)
    w2 = np.cross(n, w1)
    w2 = w2 / np.linalg.norm(w2)
    return w1, w2


def classify_float(pair: MetricPair, cfg: FloatToleranceConfig = None) -> FloatClassification:
    """Same decision tree as the exact classifier, thresholded.

    Discrete invariants are derived from the clustered numeric
    eigenstructure; whenever a sign determination falls inside its
    tolerance band the function raises AmbiguousClassification rather
    than guessing.
    """
    cfg = cfg or FloatToleranceConfig()
    if pair.mode != FLOAT:
        pair = pair.to_float()
    op = associated_operator(pair)
    c = char_poly_float(op)
    s = cfg.scale(c)
    d2 = float(discriminant_d2(c))
    d3 = float(discriminant_d3(c))
    notes: list = []
    sign3 = _thresholded_sign(d3, cfg.tol * s**6, "D3", notes)
    if sign3 > 0:
        return FloatClassification(ClassId.T1_THREE_REAL_DISTINCT, c, d2, d3, notes=tuple(notes))
    if sign3 < 0:
        return FloatClassification(ClassId.T3_COMPLEX_PAIR, c, d2, d3, notes=tuple(notes))

    sign2 = _thresholded_sign(d2, cfg.tol * s**2, "D2", notes)
    gm = _np_sym(pair.g)
    gcm = _np_sym(pair.g_check)
    fm = np.array(op.f.rows, dtype=float)

    if sign2 > 0:
        a0, a1, a2 = _float_coeffs(c)
        num = 2 * a0**3 - 9 * a0 * a1 + 27 * a2
        lam_d = a0 / 3.0 - num / (6 * a0**2 - 18 * a1)
        lam_s = a0 / 3.0 + num / (3 * a0**2 - 9 * a1)
        v = _kernel_vector_float(fm - lam_s * np.eye(3))
        gn = float(v @ gm @ v)
        gscale = max(1.0, float(np.abs(gm).max()))
        if abs(gn) <= math.sqrt(cfg.tol) * gscale:
            raise AmbiguousClassification(
                f"simple eigenvector is numerically null: g(v,v)={gn:.3e}"
            )
        s0 = 1 if gn > 0 else -1
        if s0 == 1:
            return FloatClassification(
                ClassId.T2_TIMELIKE_DOUBLE, c, d2, d3, sigma0=1, notes=tuple(notes)
            )
        w1, w2 = _complement_basis_float(gm, v)
        h = gcm - lam_d * gm
        hm = np.array(
            [[w1 @ h @ w1, w1 @ h @ w2], [w1 @ h @ w2, w2 @ h @ w2]]
        )
        hscale = max(1.0, float(np.abs(gcm).max()), abs(lam_d) * gscale)
        pivot_tol = math.sqrt(cfg.tol) * hscale
        eigs = np.linalg.eigvalsh(hm)
        signs = [_thresholded_sign(float(e), pivot_tol, "sigma1 pivot", notes) for e in eigs]
        nonzero = [x for x in signs if x != 0]
        if len(nonzero) == 2:
            raise AmbiguousClassification(
                "restricted form looks rank 2; thresholds cannot separate sigma1"
            )
        s1 = nonzero[0] if nonzero else 0
        cid = {
            0: ClassId.T4_SPACELIKE_DOUBLE_S0,
            1: ClassId.T5_SPACELIKE_DOUBLE_SPLUS,
            -1: ClassId.T6_SPACELIKE_DOUBLE_SMINUS,
        }[s1]
        return FloatClassification(cid, c, d2, d3, sigma0=-1, sigma1=s1, notes=tuple(notes))

    if sign2 < 0:
        raise AmbiguousClassification(
            "D3 ~ 0 with D2 clearly negative: inconsistent thresholds"
        )

    lam0 = float(c.a0) / 3.0
    b = fm - lam0 * np.eye(3)
    svs = np.linalg.svd(b, compute_uv=False)
    rank_tol = math.sqrt(cfg.tol) * max(1.0, s)
    s2 = sum(1 for sv in svs if _thresholded_sign(float(sv), rank_tol, "sigma2 pivot", notes) != 0)
    if s2 == 3:
        raise AmbiguousClassification("nilpotent part looks full-rank")
    if s2 == 0:
        return FloatClassification(
            ClassId.T7_TRIPLE_SCALAR, c, d2, d3, sigma2=0, notes=tuple(notes)
        )
    if s2 == 2:
        return FloatClassification(
            ClassId.T10_TRIPLE_R2, c, d2, d3, sigma2=2, notes=tuple(notes)
        )
    # sigma2 = 1: chain construction, thresholded
    col = int(np.argmax(np.linalg.norm(b, axis=0)))
    e1 = np.eye(3)[col]
    e0 = b @ e1
    e0n = e0 / np.linalg.norm(e0)
    g01 = float(e0n @ gm @ e1)
    gscale = max(1.0, float(np.abs(gm).max()))
    s3 = _thresholded_sign(g01, math.sqrt(cfg.tol) * gscale, "sigma3 pivot", notes)
    if s3 == 0:
        raise AmbiguousClassification("sigma3 pivot g(e0,e1) inside tolerance band")
    cid = ClassId.T8_TRIPLE_R1_SPLUS if s3 > 0 else ClassId.T9_TRIPLE_R1_SMINUS
    return FloatClassification(cid, c, d2, d3, sigma2=1, sigma3=s3, notes=tuple(notes))


def char_poly_float(op) -> CharPoly:
    from .invariants import char_poly

    return char_poly(op)
