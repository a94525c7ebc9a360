"""Invariants of a metric pair: operator, characteristic coefficients,
discriminants, degenerate-root formulas and the discrete sigma invariants.

All classification-relevant quantities are computed in exact rational
arithmetic; the branch conditions involve equalities that are only
decidable exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (
    InternalInvariantViolation,
    InvalidSignatureError,
    PreconditionViolated,
)
from .exact import (
    EXACT,
    FLOAT,
    Matrix3,
    Scalar,
    SymMatrix3,
    Vector3,
    apply_form,
    det3,
    inverse3,
    kernel_basis,
    mat_vec,
    rank3,
    signature,
)


@dataclass(frozen=True)
class MetricPair:
    """A validated pair (g, g_check) with g of signature (+,-,-).

    g_check may be any symmetric matrix (degenerate or indefinite).
    """

    g: SymMatrix3
    g_check: SymMatrix3
    float_tol: float = 1e-10

    def __post_init__(self):
        if self.g.mode != self.g_check.mode:
            from .errors import ModeMismatchError

            raise ModeMismatchError("g and g_check have different modes")
        if self.mode == EXACT:
            sig = signature(self.g)
        else:
            sig = signature(self.g, tol=self.float_tol)
        if tuple(sig) != (1, 2, 0):
            raise InvalidSignatureError(sig)

    @property
    def mode(self) -> str:
        return self.g.mode

    def to_float(self) -> "MetricPair":
        return MetricPair(self.g.to_float(), self.g_check.to_float(), self.float_tol)

    def transformed(self, t: Matrix3) -> "MetricPair":
        """The same pair expressed in the basis given by the columns of t."""
        from .exact import congruence

        return MetricPair(congruence(t, self.g), congruence(t, self.g_check), self.float_tol)


@dataclass(frozen=True)
class Operator3:
    """Operator coupling the pair; self-adjoint with respect to g."""

    f: Matrix3

    @property
    def mode(self) -> str:
        return self.f.mode


@dataclass(frozen=True)
class CharPoly:
    """Coefficients of P(x) = -x^3 + a0 x^2 - a1 x + a2."""

    a0: Scalar
    a1: Scalar
    a2: Scalar

    @property
    def mode(self) -> str:
        return FLOAT if isinstance(self.a0, float) else EXACT

    def evaluate(self, x: Scalar) -> Scalar:
        return -x**3 + self.a0 * x**2 - self.a1 * x + self.a2

    def derivative(self, x: Scalar) -> Scalar:
        return -3 * x**2 + 2 * self.a0 * x - self.a1


@dataclass(frozen=True)
class InvariantReport:
    coeffs: CharPoly
    d2: Scalar
    d3: Scalar
    sigma0: Optional[int] = None
    sigma1: Optional[int] = None
    sigma2: Optional[int] = None
    sigma3: Optional[int] = None
    branch: str = ""


def associated_operator(pair: MetricPair) -> Operator3:
    """F = G^-1 Gcheck; the inverse exists because g is non-degenerate."""
    f = inverse3(pair.g.to_matrix3()) @ pair.g_check.to_matrix3()
    if pair.mode == EXACT:
        gf = pair.g.to_matrix3() @ f
        if gf.rows != gf.transpose().rows:
            raise InternalInvariantViolation("operator is not g-symmetric")
    return Operator3(f)


def char_poly(op: Operator3) -> CharPoly:
    f = op.f
    tr = f[0][0] + f[1][1] + f[2][2]
    f2 = f @ f
    tr2 = f2[0][0] + f2[1][1] + f2[2][2]
    return CharPoly(tr, (tr * tr - tr2) / 2, det3(f))


def discriminant_d2(c: CharPoly) -> Scalar:
    """Discriminant of the derivative polynomial: 4 a0^2 - 12 a1."""
    return 4 * c.a0**2 - 12 * c.a1


def discriminant_d3(c: CharPoly) -> Scalar:
    """Discriminant of the characteristic polynomial itself."""
    a0, a1, a2 = c.a0, c.a1, c.a2
    return (
        -27 * a2**2
        + 18 * a0 * a1 * a2
        + a1**2 * a0**2
        - 4 * a0**3 * a2
        - 4 * a1**3
    )


def _require_exact(c: CharPoly, op: str):
    if c.mode != EXACT:
        raise PreconditionViolated(f"{op} requires EXACT coefficients")


def double_root(c: CharPoly) -> Fraction:
    """The repeated root when D3 = 0 and D2 > 0; exact rational."""
    _require_exact(c, "double_root")
    if discriminant_d3(c) != 0 or discriminant_d2(c) <= 0:
        raise PreconditionViolated("double_root needs D3 = 0 and D2 > 0")
    a0, a1, a2 = c.a0, c.a1, c.a2
    num = 2 * a0**3 - 9 * a0 * a1 + 27 * a2
    return a0 / Fraction(3) - num / (6 * a0**2 - 18 * a1)


def simple_root(c: CharPoly) -> Fraction:
    """The remaining simple root in the D3 = 0, D2 > 0 branch."""
    _require_exact(c, "simple_root")
    if discriminant_d3(c) != 0 or discriminant_d2(c) <= 0:
        raise PreconditionViolated("simple_root needs D3 = 0 and D2 > 0")
    a0, a1, a2 = c.a0, c.a1, c.a2
    num = 2 * a0**3 - 9 * a0 * a1 + 27 * a2
    return a0 / Fraction(3) + num / (3 * a0**2 - 9 * a1)


def triple_root(c: CharPoly) -> Fraction:
    """The unique eigenvalue a0/3 when D3 = D2 = 0."""
    _require_exact(c, "triple_root")
    if discriminant_d3(c) != 0 or discriminant_d2(c) != 0:
        raise PreconditionViolated("triple_root needs D3 = 0 and D2 = 0")
    return c.a0 / Fraction(3)


def shifted_operator(op: Operator3, lam: Scalar) -> Matrix3:
    """F - lam*I in the operator's mode."""
    return op.f - Matrix3.identity(op.mode).scale(lam)


def simple_eigenvector(pair: MetricPair, op: Operator3, lam: Fraction) -> Vector3:
    """Exact eigenvector for a simple rational eigenvalue.

    The kernel must be one-dimensional and the vector non-null with
    respect to g (the null case is excluded for simple eigenvalues when g
    has signature (+,-,-)).
    """
    kern = kernel_basis(shifted_operator(op, lam))
    if len(kern) != 1:
        raise InternalInvariantViolation(
            f"eigenvalue {lam} has kernel dimension {len(kern)}, expected 1"
        )
    v = kern[0]
    if apply_form(pair.g, v, v) == 0:
        raise InternalInvariantViolation(
            "simple eigenvalue with a null eigenvector; g passed validation, "
            "so this indicates a bug"
        )
    return v


def sigma0(pair: MetricPair, lambda_simple: Fraction) -> int:
    """Sign of g(v, v) on the simple eigenvalue's eigenvector."""
    op = associated_operator(pair)
    v = simple_eigenvector(pair, op, lambda_simple)
    return 1 if apply_form(pair.g, v, v) > 0 else -1


def orthogonal_complement(g: SymMatrix3, v: Vector3) -> list:
    """Deterministic rational basis of {w : g(v, w) = 0}."""
    gv = mat_vec(g, v)
    zero = (Fraction(0),) * 3
    return kernel_basis(Matrix3.from_rows([gv, zero, zero]))


def restricted_form(h: SymMatrix3, basis: list) -> list:
    """2x2 matrix of the form h on the span of a two-vector basis."""
    return [[apply_form(h, basis[i], basis[j]) for j in range(2)] for i in range(2)]


def sigma1(pair: MetricPair, lambda_double: Fraction, v_simple: Vector3) -> int:
    """Signed rank of (g_check - lambda_double*g) restricted to the
    g-orthogonal complement of the simple eigenvector.

    The restriction always has rank <= 1 (its coupling operator is
    nilpotent on the invariant plane), so its sign pattern is 0 or +/-1
    and equals the sign of the trace in any basis.
    """
    w = orthogonal_complement(pair.g, v_simple)
    if len(w) != 2:
        raise InternalInvariantViolation("orthogonal complement is not a plane")
    h = pair.g_check - pair.g.scale(lambda_double)
    m = restricted_form(h, w)
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det != 0:
        raise InternalInvariantViolation(
            "restricted form has rank 2; impossible for a double eigenvalue"
        )
    tr = m[0][0] + m[1][1]
    return 0 if tr == 0 else (1 if tr > 0 else -1)


def sigma2(op: Operator3, lambda0: Fraction) -> int:
    """rank(F - lambda0*I) at a triple eigenvalue; always <= 2."""
    r = rank3(shifted_operator(op, lambda0))
    if r == 3:
        raise InternalInvariantViolation(
            "F - lambda0*I is invertible, contradicting the triple eigenvalue"
        )
    return r


def invariant_report(pair: MetricPair) -> InvariantReport:
    """Coefficients, discriminants and whichever sigma invariants the
    discriminant branch defines.  EXACT mode only.

    sigma3 requires the rank-one Jordan-chain construction and is computed
    by the canonicalizer (single implementation); its sign is recorded
    here when sigma2 = 1.
    """
    if pair.mode != EXACT:
        raise PreconditionViolated("invariant_report requires EXACT mode")
    op = associated_operator(pair)
    c = char_poly(op)
    d2 = discriminant_d2(c)
    d3 = discriminant_d3(c)
    if d3 > 0:
        return InvariantReport(c, d2, d3, branch="D3>0: three simple eigenvalues")
    if d3 < 0:
        return InvariantReport(c, d2, d3, branch="D3<0: complex eigenvalue pair")
    if d2 < 0:
        raise InternalInvariantViolation("D3 = 0 with D2 < 0 cannot occur")
    if d2 > 0:
        lam_d = double_root(c)
        lam_s = simple_root(c)
        v = simple_eigenvector(pair, op, lam_s)
        s0 = 1 if apply_form(pair.g, v, v) > 0 else -1
        s1 = sigma1(pair, lam_d, v) if s0 == -1 else None
        return InvariantReport(
            c, d2, d3, sigma0=s0, sigma1=s1,
            branch="D3=0, D2>0: double eigenvalue",
        )
    lam0 = triple_root(c)
    s2 = sigma2(op, lam0)
    s3 = None
    if s2 == 1:
        from .canonical import rank_one_chain

        _, s3 = rank_one_chain(pair, op, lam0)
    return InvariantReport(
        c, d2, d3, sigma2=s2, sigma3=s3,
        branch="D3=0, D2=0: triple eigenvalue",
    )
