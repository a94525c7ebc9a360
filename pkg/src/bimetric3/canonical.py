"""Canonical presentations: for each class, an explicit basis change T
(columns = new basis vectors in input coordinates) bringing both form
matrices to their canonical patterns, together with the canonical
parameters.

Classification and all Jordan-chain algebra stay exact; the output
transform is binary64 because the final normalizations g(v,v) = +/-1
need square roots.  Every constructor is verified by the residual
max-abs-entry(T^t M T - canonical pattern) before returning.

Determinism conventions: the two space-like diagonal entries of the
three-real-roots class are ordered b < c; the rotation-block parameter is
normalized b > 0; eigenvector sign ambiguity is resolved by making the
first significant coordinate positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classify import ClassId, classify_report
from .errors import (
    AmbiguousClassification,
    InternalInvariantViolation,
    InvalidParamsError,
    PreconditionViolated,
    ResidualTooLarge,
)
from .exact import (
    EXACT,
    Matrix3,
    SymMatrix3,
    Vector3,
    apply_form,
    congruence_diagonalize,
    cross,
    kernel_basis,
    mat_vec,
    rank3,
    vec_add,
    vec_scale,
    vec_sub,
)
from .invariants import (
    MetricPair,
    Operator3,
    associated_operator,
    double_root,
    invariant_report,
    orthogonal_complement,
    shifted_operator,
    simple_eigenvector,
    simple_root,
    triple_root,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class CanonicalForm:
    class_id: ClassId
    params: dict
    canonical_g: SymMatrix3
    canonical_g_check: SymMatrix3


@dataclass(frozen=True)
class CanonicalResult:
    form: CanonicalForm
    transform: Matrix3
    residual: float


@dataclass(frozen=True)
class JordanChain:
    """Chain vectors in input coordinates: (F - lam) e_k = e_{k-1}."""

    e0: Vector3
    e1: Vector3
    e2: Vector3
    depth: int


@dataclass(frozen=True)
class VerificationReport:
    residual: float
    tol: float
    passed: bool


_PARAM_KEYS = {
    ClassId.T1_THREE_REAL_DISTINCT: ("a", "b", "c"),
    ClassId.T2_TIMELIKE_DOUBLE: ("a", "b"),
    ClassId.T3_COMPLEX_PAIR: ("a", "b", "c"),
    ClassId.T4_SPACELIKE_DOUBLE_S0: ("a", "c"),
    ClassId.T5_SPACELIKE_DOUBLE_SPLUS: ("a", "c"),
    ClassId.T6_SPACELIKE_DOUBLE_SMINUS: ("a", "c"),
    ClassId.T7_TRIPLE_SCALAR: ("a",),
    ClassId.T8_TRIPLE_R1_SPLUS: ("a",),
    ClassId.T9_TRIPLE_R1_SMINUS: ("a",),
    ClassId.T10_TRIPLE_R2: ("a",),
}


def validate_params(class_id: ClassId, params: dict) -> dict:
    """Check key set and side conditions; returns the params dict."""
    keys = _PARAM_KEYS[class_id]
    if tuple(sorted(params)) != tuple(sorted(keys)):
        raise InvalidParamsError(
            f"{class_id.short} takes parameters {','.join(keys)}, got {','.join(sorted(params))}"
        )
    a = params.get("a")
    b = params.get("b")
    c = params.get("c")
    if class_id == ClassId.T1_THREE_REAL_DISTINCT:
        if a == -b:
            raise InvalidParamsError("T1 requires a != -b")
        if a == -c:
            raise InvalidParamsError("T1 requires a != -c")
        if b == c:
            raise InvalidParamsError("T1 requires b != c")
    elif class_id == ClassId.T2_TIMELIKE_DOUBLE:
        if a == -b:
            raise InvalidParamsError("T2 requires a != -b")
    elif class_id == ClassId.T3_COMPLEX_PAIR:
        if b == 0:
            raise InvalidParamsError("T3 requires b != 0")
    elif class_id in (
        ClassId.T4_SPACELIKE_DOUBLE_S0,
        ClassId.T5_SPACELIKE_DOUBLE_SPLUS,
        ClassId.T6_SPACELIKE_DOUBLE_SMINUS,
    ):
        if a == -c:
            raise InvalidParamsError(f"{class_id.short} requires a != -c")
    return params


_MINK = ((1, 0, 0), (0, -1, 0), (0, 0, -1))
_HYP = ((0, 1, 0), (1, 0, 0), (0, 0, -1))


def canonical_matrices(class_id: ClassId, params: dict):
    """Instantiate the canonical pattern of a class with given parameters."""
    validate_params(class_id, params)
    float_mode = any(isinstance(v, float) for v in params.values())

    def conv(x):
        return float(x) if float_mode else Fraction(x)

    a = conv(params["a"]) if "a" in params else None
    b = conv(params["b"]) if "b" in params else None
    c = conv(params["c"]) if "c" in params else None
    zero = conv(0)
    one = conv(1)

    mink = SymMatrix3.from_rows([[conv(x) for x in row] for row in _MINK])
    hyp = SymMatrix3.from_rows([[conv(x) for x in row] for row in _HYP])

    cid = class_id
    if cid == ClassId.T1_THREE_REAL_DISTINCT:
        return mink, SymMatrix3.diagonal(a, b, c)
    if cid == ClassId.T2_TIMELIKE_DOUBLE:
        return mink, SymMatrix3.diagonal(a, b, b)
    if cid == ClassId.T3_COMPLEX_PAIR:
        return mink, SymMatrix3.from_rows([[a, b, zero], [b, -a, zero], [zero, zero, c]])
    if cid == ClassId.T4_SPACELIKE_DOUBLE_S0:
        return mink, SymMatrix3.diagonal(a, -a, c)
    if cid == ClassId.T5_SPACELIKE_DOUBLE_SPLUS:
        return hyp, SymMatrix3.from_rows([[one, a, zero], [a, zero, zero], [zero, zero, c]])
    if cid == ClassId.T6_SPACELIKE_DOUBLE_SMINUS:
        return hyp, SymMatrix3.from_rows([[zero, a, zero], [a, -one, zero], [zero, zero, c]])
    if cid == ClassId.T7_TRIPLE_SCALAR:
        return mink, SymMatrix3.diagonal(a, -a, -a)
    if cid == ClassId.T8_TRIPLE_R1_SPLUS:
        return hyp, SymMatrix3.from_rows([[one, a, zero], [a, zero, zero], [zero, zero, -a]])
    if cid == ClassId.T9_TRIPLE_R1_SMINUS:
        return hyp, SymMatrix3.from_rows([[zero, a, zero], [a, -one, zero], [zero, zero, -a]])
    if cid == ClassId.T10_TRIPLE_R2:
        return hyp, SymMatrix3.from_rows([[zero, a, zero], [a, zero, one], [zero, one, -a]])
    raise ValueError(f"unhandled class {class_id}")


# ---------------------------------------------------------------------------
# float helpers

def _np_of(m) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m.rows], dtype=float)


def _fvec(v) -> np.ndarray:
    return np.array([float(x) for x in v], dtype=float)


def _sign_normalize_f(v: np.ndarray) -> np.ndarray:
    """Flip so the first significant coordinate is positive."""
    scale = float(np.abs(v).max())
    for x in v:
        if abs(x) > 1e-7 * scale:
            return v if x > 0 else -v
    return v


def _exact_sign(v: Vector3) -> int:
    for x in v:
        if x != 0:
            return 1 if x > 0 else -1
    return 1


def _residual(t: np.ndarray, pair: MetricPair, form: CanonicalForm) -> float:
    g = _np_of(pair.g)
    gc = _np_of(pair.g_check)
    rg = t.T @ g @ t - _np_of(form.canonical_g)
    rgc = t.T @ gc @ t - _np_of(form.canonical_g_check)
    return max(float(np.abs(rg).max()), float(np.abs(rgc).max()))


def _finish(pair: MetricPair, form: CanonicalForm, cols, tol: float) -> CanonicalResult:
    t = np.column_stack([np.asarray(c, dtype=float) for c in cols])
    res = _residual(t, pair, form)
    if not res <= tol:
        raise ResidualTooLarge(res, tol)
    transform = Matrix3.from_rows([[float(x) for x in row] for row in t])
    return CanonicalResult(form, transform, res)


def verify_canonical(pair: MetricPair, result: CanonicalResult, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Recompute both congruences in binary64 and compare to the canonical
    matrices of the result."""
    t = _np_of(result.transform)
    res = _residual(t, pair, result.form)
    return VerificationReport(res, tol, res <= tol)


# ---------------------------------------------------------------------------
# exact 2x2 congruence diagonalization on a plane basis

def _diagonalize_plane(g: SymMatrix3, w1: Vector3, w2: Vector3):
    """Exact g-orthogonal basis of span{w1, w2} with the g-norms.

    Same pivot policy as the 3x3 diagonalization: diagonal pivot first,
    hyperbolic split when both diagonal entries vanish.
    """
    h00 = apply_form(g, w1, w1)
    h01 = apply_form(g, w1, w2)
    h11 = apply_form(g, w2, w2)
    if h00 != 0:
        p2 = vec_add(w2, vec_scale(w1, -h01 / h00))
        return (w1, h00), (p2, h11 - h01 * h01 / h00)
    if h11 != 0:
        p2 = vec_add(w1, vec_scale(w2, -h01 / h11))
        return (w2, h11), (p2, h00 - h01 * h01 / h11)
    if h01 == 0:
        raise InternalInvariantViolation("restriction of g to the plane is zero")
    return (vec_add(w1, w2), 2 * h01), (vec_sub(w1, w2), -2 * h01)


def _plane_coords(w1: Vector3, w2: Vector3, x: Vector3):
    """Exact coefficients (alpha, beta) with alpha*w1 + beta*w2 = x."""
    for i, j in ((0, 1), (0, 2), (1, 2)):
        det = w1[i] * w2[j] - w1[j] * w2[i]
        if det != 0:
            alpha = (x[i] * w2[j] - x[j] * w2[i]) / det
            beta = (w1[i] * x[j] - w1[j] * x[i]) / det
            if any(alpha * w1[k] + beta * w2[k] != x[k] for k in range(3)):
                raise InternalInvariantViolation("vector does not lie in the plane")
            return alpha, beta
    raise InternalInvariantViolation("plane basis is degenerate")


# ---------------------------------------------------------------------------
# per-class constructors

def canon_t1_t2(pair: MetricPair, roots, tol: float = DEFAULT_TOL) -> CanonicalResult:
    """Diagonal canonical forms: three simple eigenvalues, or a double
    eigenvalue whose simple partner has a time-like eigenvector.

    `roots` is a list of (value, multiplicity); exact rational values for
    the double case, floats for the generic case.
    """
    mults = sorted(m for _, m in roots)
    if mults == [1, 1, 1]:
        return _canon_t1(pair, [float(v) for v, _ in roots], tol)
    if mults == [1, 2]:
        lam_s = next(v for v, m in roots if m == 1)
        lam_d = next(v for v, m in roots if m == 2)
        return _canon_t2(pair, lam_s, lam_d, tol)
    raise PreconditionViolated("canon_t1_t2 needs root pattern {1,1,1} or {1,2}")


def _float_eigenvector(fm: np.ndarray, lam: float) -> np.ndarray:
    """Kernel direction of F - lam*I via the largest cross product of rows."""
    a = fm - lam * np.eye(3)
    best, best_n = None, -1.0
    for i in range(3):
        for j in range(i + 1, 3):
            c = np.cross(a[i], a[j])
            n = float(c @ c)
            if n > best_n:
                best, best_n = c, n
    if best_n <= 0.0:
        raise AmbiguousClassification("eigenvector numerically undetermined")
    return best / math.sqrt(best_n)


def _canon_t1(pair: MetricPair, lams, tol: float) -> CanonicalResult:
    gm = _np_of(pair.g)
    fm = _np_of(associated_operator(pair).f)
    vecs = [_float_eigenvector(fm, lam) for lam in lams]
    gns = [float(v @ gm @ v) for v in vecs]
    time_like = [i for i, gn in enumerate(gns) if gn > 0]
    if len(time_like) != 1:
        raise AmbiguousClassification(
            "eigenvector causal characters are numerically indeterminate"
        )
    it = time_like[0]
    space = [i for i in range(3) if i != it]
    # order the space-like pair so the canonical entries satisfy b < c
    space.sort(key=lambda i: -lams[i])
    a = lams[it]
    b, c = -lams[space[0]], -lams[space[1]]
    cols = [
        _sign_normalize_f(vecs[it] / math.sqrt(gns[it])),
        _sign_normalize_f(vecs[space[0]] / math.sqrt(-gns[space[0]])),
        _sign_normalize_f(vecs[space[1]] / math.sqrt(-gns[space[1]])),
    ]
    params = {"a": a, "b": b, "c": c}
    cg, cgc = canonical_matrices(ClassId.T1_THREE_REAL_DISTINCT, params)
    form = CanonicalForm(ClassId.T1_THREE_REAL_DISTINCT, params, cg, cgc)
    return _finish(pair, form, cols, tol)


def _canon_t2(pair: MetricPair, lam_s: Fraction, lam_d: Fraction, tol: float) -> CanonicalResult:
    op = associated_operator(pair)
    v0 = simple_eigenvector(pair, op, lam_s)
    if _exact_sign(v0) < 0:
        v0 = vec_scale(v0, -1)
    gn0 = apply_form(pair.g, v0, v0)
    if gn0 <= 0:
        raise InternalInvariantViolation("T2 requires a time-like simple eigenvector")
    w1, w2 = orthogonal_complement(pair.g, v0)
    (p1, n1), (p2, n2) = _diagonalize_plane(pair.g, w1, w2)
    if n1 >= 0 or n2 >= 0:
        raise InternalInvariantViolation("complement of a time-like vector must be negative")
    cols = [
        _fvec(v0) / math.sqrt(float(gn0)),
        _sign_normalize_f(_fvec(p1) / math.sqrt(float(-n1))),
        _sign_normalize_f(_fvec(p2) / math.sqrt(float(-n2))),
    ]
    params = {"a": lam_s, "b": -lam_d}
    cg, cgc = canonical_matrices(ClassId.T2_TIMELIKE_DOUBLE, params)
    form = CanonicalForm(ClassId.T2_TIMELIKE_DOUBLE, params, cg, cgc)
    return _finish(pair, form, cols, tol)


def canon_t3(pair: MetricPair, tol: float = DEFAULT_TOL) -> CanonicalResult:
    """Complex-pair class: rotation block over the complement of the real
    eigenvector.

    With g restricted to the invariant plane in an orthonormal (+,-)
    basis, the operator block is [[p, q], [-q, r]]; a hyperbolic boost of
    parameter t = artanh((r-p)/(2q))/2 preserves the restricted g exactly
    and equalizes the diagonal, after which the restricted second form is
    [[a, b], [b, -a]].
    """
    from .numeric import FloatToleranceConfig, cubic_roots
    from .invariants import char_poly

    op = associated_operator(pair)
    c = char_poly(op)
    roots = cubic_roots(c, FloatToleranceConfig(tol=1e-30))
    if roots.complex_pair is None:
        raise AmbiguousClassification("complex pair not resolvable numerically")
    lam2 = roots.real_roots[0][0]
    gm = _np_of(pair.g)
    gcm = _np_of(pair.g_check)
    fm = _np_of(op.f)
    v2 = _float_eigenvector(fm, lam2)
    gn2 = float(v2 @ gm @ v2)
    if gn2 >= 0:
        raise InternalInvariantViolation("real eigenvector of the complex-pair class must be space-like")
    v2 = _sign_normalize_f(v2 / math.sqrt(-gn2))

    n = gm @ v2
    cands = [np.cross(np.eye(3)[i], n) for i in range(3)]
    w1 = max(cands, key=lambda x: float(x @ x))
    w1 = w1 / np.linalg.norm(w1)
    w2 = np.cross(n, w1)
    w2 = w2 / np.linalg.norm(w2)
    gram = np.array([[w1 @ gm @ w1, w1 @ gm @ w2], [w1 @ gm @ w2, w2 @ gm @ w2]])
    mu, vv = np.linalg.eigh(gram)
    if not (mu[0] < 0 < mu[1]):
        raise InternalInvariantViolation("restricted g must have signature (+,-)")
    u_pos = (vv[0, 1] * w1 + vv[1, 1] * w2) / math.sqrt(mu[1])
    u_neg = (vv[0, 0] * w1 + vv[1, 0] * w2) / math.sqrt(-mu[0])
    u_pos = _sign_normalize_f(u_pos)
    u_neg = _sign_normalize_f(u_neg)

    basis = np.column_stack([u_pos, u_neg, v2])
    cmat = np.linalg.solve(basis, fm @ basis)
    p, r = cmat[0, 0], cmat[1, 1]
    q = (cmat[0, 1] - cmat[1, 0]) / 2.0
    if 2.0 * abs(q) <= abs(p - r):
        raise AmbiguousClassification("rotation block is numerically hyperbolic")
    t = 0.5 * math.atanh((r - p) / (2.0 * q))
    ch, sh = math.cosh(t), math.sinh(t)
    u1 = ch * u_pos + sh * u_neg
    u2 = sh * u_pos + ch * u_neg
    b_val = float(u1 @ gcm @ u2)
    if b_val < 0:
        u2 = -u2
        b_val = -b_val
    a_val = (p + r) / 2.0
    params = {"a": a_val, "b": b_val, "c": -lam2}
    cg, cgc = canonical_matrices(ClassId.T3_COMPLEX_PAIR, params)
    form = CanonicalForm(ClassId.T3_COMPLEX_PAIR, params, cg, cgc)
    return _finish(pair, form, [u1, u2, v2], tol)


def canon_t4_t5_t6(
    pair: MetricPair,
    lambda_double: Fraction,
    lambda_simple: Fraction,
    tol: float = DEFAULT_TOL,
) -> CanonicalResult:
    """Double eigenvalue with a space-like simple eigenvector.

    The complement plane carries either a scalar restricted operator
    (sigma1 = 0, simultaneous diagonalization) or a two-dimensional
    Jordan block whose null eigenvector w is g-null; the chain pair
    (u, w) is sheared so g(u,u) = 0 and scaled so |g(u,w)| = 1, and the
    surviving sign is sigma1.
    """
    op = associated_operator(pair)
    v2 = simple_eigenvector(pair, op, lambda_simple)
    if _exact_sign(v2) < 0:
        v2 = vec_scale(v2, -1)
    gn2 = apply_form(pair.g, v2, v2)
    if gn2 >= 0:
        raise InternalInvariantViolation("simple eigenvector must be space-like here")
    v2f = _fvec(v2) / math.sqrt(float(-gn2))
    w1, w2 = orthogonal_complement(pair.g, v2)

    # restricted operator in the plane basis, exactly
    a11, a21 = _plane_coords(w1, w2, mat_vec(op.f, w1))
    a12, a22 = _plane_coords(w1, w2, mat_vec(op.f, w2))
    n00, n01 = a11 - lambda_double, a12
    n10, n11 = a21, a22 - lambda_double

    c_param = -lambda_simple
    if n00 == 0 and n01 == 0 and n10 == 0 and n11 == 0:
        # scalar restriction: any g-orthonormal (+,-) basis of the plane
        (p1, d1), (p2, d2) = _diagonalize_plane(pair.g, w1, w2)
        if d1 < 0:
            (p1, d1), (p2, d2) = (p2, d2), (p1, d1)
        if not (d1 > 0 > d2):
            raise InternalInvariantViolation("plane must carry signature (+,-)")
        cols = [
            _sign_normalize_f(_fvec(p1) / math.sqrt(float(d1))),
            _sign_normalize_f(_fvec(p2) / math.sqrt(float(-d2))),
            v2f,
        ]
        params = {"a": lambda_double, "c": c_param}
        cid = ClassId.T4_SPACELIKE_DOUBLE_S0
        cg, cgc = canonical_matrices(cid, params)
        return _finish(pair, CanonicalForm(cid, params, cg, cgc), cols, tol)

    # nilpotent restriction: N != 0, N^2 = 0
    n2 = (
        n00 * n00 + n01 * n10,
        n00 * n01 + n01 * n11,
        n10 * n00 + n11 * n10,
        n10 * n01 + n11 * n11,
    )
    if any(x != 0 for x in n2):
        raise InternalInvariantViolation("restricted operator is not nilpotent")
    zero = Fraction(0)
    embed = Matrix3.from_rows([[n00, n01, zero], [n10, n11, zero], [zero, zero, Fraction(1)]])
    kern = kernel_basis(embed)
    if len(kern) != 1:
        raise InternalInvariantViolation("nilpotent block must have a line kernel")
    x, y, _ = kern[0]
    w = vec_add(vec_scale(w1, x), vec_scale(w2, y))
    if apply_form(pair.g, w, w) != 0:
        raise InternalInvariantViolation(
            "null eigenvector of the restricted Jordan block must be g-null"
        )
    # particular solution of N u = (x, y) in plane coordinates
    rows = ((n00, n01), (n10, n11))
    rhs = (x, y)
    piv = next(((i, j) for i in range(2) for j in range(2) if rows[i][j] != 0))
    i, j = piv
    u_coords = [zero, zero]
    u_coords[j] = rhs[i] / rows[i][j]
    other = 1 - i
    if rows[other][0] * u_coords[0] + rows[other][1] * u_coords[1] != rhs[other]:
        raise InternalInvariantViolation("chain equation is inconsistent")
    u = vec_add(vec_scale(w1, u_coords[0]), vec_scale(w2, u_coords[1]))

    p = apply_form(pair.g, u, w)
    if p == 0:
        raise InternalInvariantViolation("chain pairing g(u,w) vanished")
    beta = -apply_form(pair.g, u, u) / (2 * p)
    u = vec_add(u, vec_scale(w, beta))
    if apply_form(pair.g, u, u) != 0 or apply_form(pair.g, u, w) != p:
        raise InternalInvariantViolation("shear failed to null g(u,u)")

    sp = math.sqrt(abs(float(p)))
    uf, wf = _fvec(u), _fvec(w)
    if p > 0:
        cid = ClassId.T5_SPACELIKE_DOUBLE_SPLUS
        f0, f1 = uf / sp, wf / sp
    else:
        cid = ClassId.T6_SPACELIKE_DOUBLE_SMINUS
        f0, f1 = -wf / sp, uf / sp
    if _first_significant_sign(f0) < 0:
        f0, f1 = -f0, -f1
    params = {"a": lambda_double, "c": c_param}
    cg, cgc = canonical_matrices(cid, params)
    return _finish(pair, CanonicalForm(cid, params, cg, cgc), [f0, f1, v2f], tol)


def _first_significant_sign(v: np.ndarray) -> int:
    scale = float(np.abs(v).max())
    for x in v:
        if abs(x) > 1e-7 * scale:
            return 1 if x > 0 else -1
    return 1


def canon_t7(pair: MetricPair, tol: float = DEFAULT_TOL) -> CanonicalResult:
    """Scalar operator: any basis diagonalizing g works."""
    op = associated_operator(pair)
    c = _char(op)
    lam0 = triple_root(c)
    t, diag = congruence_diagonalize(pair.g)
    order = sorted(range(3), key=lambda i: (diag[i] < 0,))
    cols = []
    for i in order:
        col = tuple(t.column(i))
        if _exact_sign(col) < 0:
            col = vec_scale(col, -1)
        cols.append(_fvec(col) / math.sqrt(abs(float(diag[i]))))
    params = {"a": lam0}
    cg, cgc = canonical_matrices(ClassId.T7_TRIPLE_SCALAR, params)
    form = CanonicalForm(ClassId.T7_TRIPLE_SCALAR, params, cg, cgc)
    return _finish(pair, form, cols, tol)


def rank_one_chain(pair: MetricPair, op: Operator3, lam0: Fraction):
    """Exact Jordan chain for the rank-one nilpotent part, and sigma3.

    e0 spans the image of F - lam0, e1 is a preimage of e0, e2 completes
    e0 to a basis of the kernel.  The stage identities g(e0,e0) = 0 and
    g(e0,e2) = 0 hold exactly; the sign of g(e0,e1) is invariant under
    every chain-preserving basis change and defines sigma3.
    """
    a = shifted_operator(op, lam0)
    e1 = None
    for i in range(3):
        col = a.column(i)
        if any(x != 0 for x in col):
            e1 = tuple(Fraction(1) if k == i else Fraction(0) for k in range(3))
            e0 = col
            break
    if e1 is None:
        raise InternalInvariantViolation("nilpotent part is zero; not a rank-one case")
    if any(x != 0 for x in mat_vec(a, e0)):
        raise InternalInvariantViolation("image vector is not an eigenvector")
    kern = kernel_basis(a)
    if len(kern) != 2:
        raise InternalInvariantViolation("kernel must be a plane in the rank-one case")
    e2 = next((u for u in kern if any(x != 0 for x in cross(e0, u))), None)
    if e2 is None:
        raise InternalInvariantViolation("kernel does not extend the image vector")
    g = pair.g
    if apply_form(g, e0, e0) != 0 or apply_form(g, e0, e2) != 0:
        raise InternalInvariantViolation("chain-basis zero components failed")
    g01 = apply_form(g, e0, e1)
    if g01 == 0:
        raise InternalInvariantViolation("g(e0,e1) = 0 would make g degenerate")
    return JordanChain(e0, e1, e2, depth=2), (1 if g01 > 0 else -1)


def canon_t8_t9(pair: MetricPair, tol: float = DEFAULT_TOL) -> CanonicalResult:
    """Triple eigenvalue, rank-one nilpotent part.

    After the shear that clears g(e1,e1) and g(e1,e2), the surviving
    component g(e0,e1) has sign sigma3 and |g(e0,e1)|, -g(e2,e2) are the
    two square-root scalings.
    """
    op = associated_operator(pair)
    c = _char(op)
    lam0 = triple_root(c)
    chain, s3 = rank_one_chain(pair, op, lam0)
    e0, e1, e2 = chain.e0, chain.e1, chain.e2
    g = pair.g
    g01 = apply_form(g, e0, e1)
    g11 = apply_form(g, e1, e1)
    g12 = apply_form(g, e1, e2)
    g22 = apply_form(g, e2, e2)
    e1 = vec_add(e1, vec_scale(e0, -g11 / (2 * g01)))
    e2 = vec_add(e2, vec_scale(e0, -g12 / g01))
    if apply_form(g, e1, e1) != 0 or apply_form(g, e1, e2) != 0:
        raise InternalInvariantViolation("shear failed to reach the staged form")
    g22 = apply_form(g, e2, e2)
    if g01 == 0 or g22 >= 0:
        raise InternalInvariantViolation("staged form must have g01 != 0 and g22 < 0")
    b = math.sqrt(abs(float(g01)))
    cc = math.sqrt(-float(g22))
    e0f, e1f, e2f = _fvec(e0), _fvec(e1), _fvec(e2)
    if s3 == 1:
        cid = ClassId.T8_TRIPLE_R1_SPLUS
        f0, f1 = e1f / b, e0f / b
    else:
        cid = ClassId.T9_TRIPLE_R1_SMINUS
        f0, f1 = -e0f / b, e1f / b
    if _first_significant_sign(f0) < 0:
        f0, f1 = -f0, -f1
    f2 = e2f / cc
    if _first_significant_sign(f2) < 0:
        f2 = -f2
    params = {"a": lam0}
    cg, cgc = canonical_matrices(cid, params)
    return _finish(pair, CanonicalForm(cid, params, cg, cgc), [f0, f1, f2], tol)


def rank_two_chain(pair: MetricPair, op: Operator3, lam0: Fraction) -> JordanChain:
    """Exact depth-3 Jordan chain for the rank-two nilpotent part.

    The chain top is the first standard basis vector outside the kernel
    of the squared nilpotent part; the lower vectors follow by applying
    F - lam0.
    """
    a = shifted_operator(op, lam0)
    a2 = a @ a
    if rank3(a) != 2 or rank3(a2) != 1:
        raise InternalInvariantViolation("rank pattern of the nilpotent part is not (2,1)")
    e2 = None
    for i in range(3):
        if any(x != 0 for x in a2.column(i)):
            e2 = tuple(Fraction(1) if k == i else Fraction(0) for k in range(3))
            break
    if e2 is None:
        raise InternalInvariantViolation("no chain top found outside the square kernel")
    e1 = mat_vec(a, e2)
    e0 = mat_vec(a, e1)
    if any(x != 0 for x in mat_vec(a, e0)):
        raise InternalInvariantViolation("chain does not terminate")
    return JordanChain(e0, e1, e2, depth=3)


def canon_t10(pair: MetricPair, tol: float = DEFAULT_TOL) -> CanonicalResult:
    """Triple eigenvalue, rank-two nilpotent part: full Jordan chain.

    The chain shear uses beta = -g12/(2 g11); the published coefficient
    gamma = -g22/(2 g11) + 3 g12^2 / (8 g11^2) is consistent with this
    halved beta and the two together reach the skew-diagonal staged form.
    """
    op = associated_operator(pair)
    c = _char(op)
    lam0 = triple_root(c)
    chain = rank_two_chain(pair, op, lam0)
    e0, e1, e2 = chain.e0, chain.e1, chain.e2
    g = pair.g
    if apply_form(g, e0, e0) != 0 or apply_form(g, e0, e1) != 0:
        raise InternalInvariantViolation("chain-basis zero components failed")
    h = apply_form(g, e1, e1)
    if h != apply_form(g, e0, e2):
        raise InternalInvariantViolation("g(e1,e1) must equal g(e0,e2)")
    if h == 0:
        raise InternalInvariantViolation("g(e1,e1) = 0 would make g degenerate")
    m = apply_form(g, e1, e2)
    q = apply_form(g, e2, e2)
    beta = -m / (2 * h)
    gamma = -q / (2 * h) + 3 * m * m / (8 * h * h)
    e1n = vec_add(e1, vec_scale(e0, beta))
    e2n = vec_add(e2, vec_add(vec_scale(e0, gamma), vec_scale(e1, beta)))
    if (
        apply_form(g, e1n, e2n) != 0
        or apply_form(g, e2n, e2n) != 0
        or apply_form(g, e1n, e1n) != h
        or apply_form(g, e0, e2n) != h
    ):
        raise InternalInvariantViolation("shear failed to reach the skew-diagonal form")
    if h > 0:
        raise InternalInvariantViolation("skew-diagonal g component must be negative")
    b = math.sqrt(-float(h))
    f0 = -_fvec(e0) / b
    f1 = _fvec(e2n) / b
    f2 = -_fvec(e1n) / b
    if _first_significant_sign(f0) < 0:
        f0, f1, f2 = -f0, -f1, -f2
    params = {"a": lam0}
    cg, cgc = canonical_matrices(ClassId.T10_TRIPLE_R2, params)
    form = CanonicalForm(ClassId.T10_TRIPLE_R2, params, cg, cgc)
    return _finish(pair, form, [f0, f1, f2], tol)


def _char(op: Operator3):
    from .invariants import char_poly

    return char_poly(op)


def canonicalize(pair: MetricPair, tol: float = DEFAULT_TOL) -> CanonicalResult:
    """Classify and construct the canonical presentation.

    EXACT mode only: the class decision drives the construction and is
    only decidable exactly.  The transformation itself is binary64.
    """
    if pair.mode != EXACT:
        raise PreconditionViolated("canonicalize requires an EXACT pair")
    report = invariant_report(pair)
    cid = classify_report(report)
    c = report.coeffs
    if cid == ClassId.T1_THREE_REAL_DISTINCT:
        from .numeric import FloatToleranceConfig, cubic_roots

        roots = cubic_roots(c, FloatToleranceConfig(tol=1e-30))
        if roots.complex_pair is not None or len(roots.real_roots) != 3:
            raise AmbiguousClassification(
                "three real roots could not be separated numerically"
            )
        return canon_t1_t2(pair, list(roots.real_roots), tol)
    if cid == ClassId.T2_TIMELIKE_DOUBLE:
        lam_d, lam_s = double_root(c), simple_root(c)
        return canon_t1_t2(pair, [(lam_s, 1), (lam_d, 2)], tol)
    if cid == ClassId.T3_COMPLEX_PAIR:
        return canon_t3(pair, tol)
    if cid in (
        ClassId.T4_SPACELIKE_DOUBLE_S0,
        ClassId.T5_SPACELIKE_DOUBLE_SPLUS,
        ClassId.T6_SPACELIKE_DOUBLE_SMINUS,
    ):
        result = canon_t4_t5_t6(pair, double_root(c), simple_root(c), tol)
        if result.form.class_id != cid:
            raise InternalInvariantViolation(
                "construction disagrees with the classified sigma1"
            )
        return result
    if cid == ClassId.T7_TRIPLE_SCALAR:
        return canon_t7(pair, tol)
    if cid in (ClassId.T8_TRIPLE_R1_SPLUS, ClassId.T9_TRIPLE_R1_SMINUS):
        result = canon_t8_t9(pair, tol)
        if result.form.class_id != cid:
            raise InternalInvariantViolation(
                "construction disagrees with the classified sigma3"
            )
        return result
    return canon_t10(pair, tol)
