"""Exact rational and binary64 3x3 matrix algebra.

Scalars are either ``fractions.Fraction`` (EXACT mode) or ``float``
(FLOAT mode).  Python's ``Fraction`` keeps values in lowest terms with a
positive denominator, which is exactly the normal form required for exact
scalars.  Plain ints are accepted on input and coerced to the mode of the
surrounding container.  Mixing ``Fraction`` and ``float`` entries in one
matrix, or combining matrices of different modes, raises
``ModeMismatchError``; conversion to float is only ever explicit via
``to_float``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence, Union

from .errors import ModeMismatchError, SingularMatrixError

Scalar = Union[Fraction, float]
Vector3 = tuple

EXACT = "exact"
FLOAT = "float"


def _normalize(values, n):
    """Coerce a flat sequence of n entries to one mode, or raise."""
    vals = list(values)
    if len(vals) != n:
        raise ValueError(f"expected {n} entries, got {len(vals)}")
    has_float = any(isinstance(v, float) for v in vals)
    has_frac = any(isinstance(v, Fraction) for v in vals)
    if has_float and has_frac:
        raise ModeMismatchError("entries mix Fraction and float")
    if has_float:
        return tuple(float(v) for v in vals), FLOAT
    return tuple(Fraction(v) for v in vals), EXACT


def _require_same_mode(a, b):
    if a.mode != b.mode:
        raise ModeMismatchError(f"cannot combine {a.mode} with {b.mode}")


def scalar_mode(x: Scalar) -> str:
    return FLOAT if isinstance(x, float) else EXACT


class SignatureTriple(NamedTuple):
    positives: int
    negatives: int
    zeros: int


@dataclass(frozen=True)
class Matrix3:
    """General 3x3 matrix, row-major, mode-homogeneous entries."""

    rows: tuple
    mode: str

    @classmethod
    def from_rows(cls, rows) -> "Matrix3":
        flat = [x for row in rows for x in row]
        vals, mode = _normalize(flat, 9)
        return cls(tuple(vals[3 * i : 3 * i + 3] for i in range(3)), mode)

    @classmethod
    def identity(cls, mode: str = EXACT) -> "Matrix3":
        one, zero = (1.0, 0.0) if mode == FLOAT else (Fraction(1), Fraction(0))
        return cls(((one, zero, zero), (zero, one, zero), (zero, zero, one)), mode)

    @classmethod
    def from_columns(cls, cols) -> "Matrix3":
        return cls.from_rows([[cols[j][i] for j in range(3)] for i in range(3)])

    def __getitem__(self, i):
        return self.rows[i]

    def column(self, j) -> Vector3:
        return tuple(self.rows[i][j] for i in range(3))

    def transpose(self) -> "Matrix3":
        return Matrix3(tuple(self.column(i) for i in range(3)), self.mode)

    def __matmul__(self, other: "Matrix3") -> "Matrix3":
        _require_same_mode(self, other)
        rows = tuple(
            tuple(sum(self.rows[i][k] * other.rows[k][j] for k in range(3)) for j in range(3))
            for i in range(3)
        )
        return Matrix3(rows, self.mode)

    def __sub__(self, other: "Matrix3") -> "Matrix3":
        _require_same_mode(self, other)
        rows = tuple(
            tuple(self.rows[i][j] - other.rows[i][j] for j in range(3)) for i in range(3)
        )
        return Matrix3(rows, self.mode)

    def scale(self, c: Scalar) -> "Matrix3":
        if scalar_mode(c) != self.mode and not isinstance(c, int):
            raise ModeMismatchError("scalar mode differs from matrix mode")
        rows = tuple(tuple(x * c for x in row) for row in self.rows)
        return Matrix3(rows, self.mode)

    def to_float(self) -> "Matrix3":
        return Matrix3(tuple(tuple(float(x) for x in row) for row in self.rows), FLOAT)


@dataclass(frozen=True)
class SymMatrix3:
    """Symmetric 3x3 matrix storing the six upper-triangle entries.

    ``upper`` is (m00, m01, m02, m11, m12, m22); symmetry holds by
    construction because each unordered index pair is stored once.
    """

    upper: tuple
    mode: str

    _IDX = {
        (0, 0): 0, (0, 1): 1, (0, 2): 2,
        (1, 1): 3, (1, 2): 4, (2, 2): 5,
    }

    @classmethod
    def from_upper(cls, upper) -> "SymMatrix3":
        vals, mode = _normalize(upper, 6)
        return cls(vals, mode)

    @classmethod
    def from_rows(cls, rows) -> "SymMatrix3":
        for i in range(3):
            for j in range(i + 1, 3):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i},{j})")
        return cls.from_upper(
            [rows[0][0], rows[0][1], rows[0][2], rows[1][1], rows[1][2], rows[2][2]]
        )

    @classmethod
    def diagonal(cls, d0, d1, d2) -> "SymMatrix3":
        zero = 0.0 if any(isinstance(x, float) for x in (d0, d1, d2)) else 0
        return cls.from_upper([d0, zero, zero, d1, zero, d2])

    def entry(self, i: int, j: int) -> Scalar:
        return self.upper[self._IDX[(i, j) if i <= j else (j, i)]]

    def __getitem__(self, i):
        return self.rows[i]

    @cached_property
    def rows(self) -> tuple:
        u = self.upper
        return (
            (u[0], u[1], u[2]),
            (u[1], u[3], u[4]),
            (u[2], u[4], u[5]),
        )

    def to_matrix3(self) -> Matrix3:
        return Matrix3(self.rows, self.mode)

    def __sub__(self, other: "SymMatrix3") -> "SymMatrix3":
        _require_same_mode(self, other)
        return SymMatrix3(tuple(a - b for a, b in zip(self.upper, other.upper)), self.mode)

    def __add__(self, other: "SymMatrix3") -> "SymMatrix3":
        _require_same_mode(self, other)
        return SymMatrix3(tuple(a + b for a, b in zip(self.upper, other.upper)), self.mode)

    def scale(self, c: Scalar) -> "SymMatrix3":
        if scalar_mode(c) != self.mode and not isinstance(c, int):
            raise ModeMismatchError("scalar mode differs from matrix mode")
        return SymMatrix3(tuple(x * c for x in self.upper), self.mode)

    def to_float(self) -> "SymMatrix3":
        return SymMatrix3(tuple(float(x) for x in self.upper), FLOAT)


# ---------------------------------------------------------------------------
# vector helpers

def vec_add(u: Vector3, v: Vector3) -> Vector3:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector3, v: Vector3) -> Vector3:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(u: Vector3, c: Scalar) -> Vector3:
    return tuple(a * c for a in u)


def cross(u: Vector3, v: Vector3) -> Vector3:
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def mat_vec(m, v: Vector3) -> Vector3:
    rows = m.rows
    return tuple(sum(rows[i][j] * v[j] for j in range(3)) for i in range(3))


def apply_form(m: SymMatrix3, u: Vector3, v: Vector3) -> Scalar:
    """Evaluate the bilinear form u^T M v."""
    return sum(u[i] * sum(m.rows[i][j] * v[j] for j in range(3)) for i in range(3))


def primitive_vector(v: Sequence[Fraction]) -> Vector3:
    """Clear denominators and divide by the gcd; zero vectors pass through."""
    fracs = [Fraction(x) for x in v]
    if all(x == 0 for x in fracs):
        return tuple(fracs)
    lcm = 1
    for x in fracs:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    ints = [int(x * lcm) for x in fracs]
    g = 0
    for n in ints:
        g = math.gcd(g, abs(n))
    return tuple(Fraction(n // g) for n in ints)


# ---------------------------------------------------------------------------
# core operations

def det3(m) -> Scalar:
    r = m.rows
    return (
        r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
    )


def inverse3(m, tol: float = 1e-12) -> Matrix3:
    """Adjugate inverse.  Raises SingularMatrixError when det is (near) zero.

    In FLOAT mode `tol` bounds |det| relative to the entry scale.
    """
    d = det3(m)
    r = m.rows
    if m.mode == EXACT:
        if d == 0:
            raise SingularMatrixError("exact determinant is zero")
    else:
        scale = max(abs(x) for row in r for x in row) or 1.0
        if abs(d) <= tol * scale**3:
            raise SingularMatrixError(f"determinant {d!r} below tolerance")
    cof = [
        [
            (r[(i + 1) % 3][(j + 1) % 3] * r[(i + 2) % 3][(j + 2) % 3]
             - r[(i + 1) % 3][(j + 2) % 3] * r[(i + 2) % 3][(j + 1) % 3])
            for j in range(3)
        ]
        for i in range(3)
    ]
    # adjugate = transpose of cofactor matrix; cyclic indexing above already
    # bakes in the checkerboard signs.
    return Matrix3.from_rows([[cof[j][i] / d for j in range(3)] for i in range(3)])


def congruence(t: Matrix3, m: SymMatrix3) -> SymMatrix3:
    """Return T^t M T, symmetric by construction."""
    _require_same_mode(t, m)
    cols = [t.column(j) for j in range(3)]
    mv = [mat_vec(m, c) for c in cols]
    upper = [
        sum(cols[i][k] * mv[j][k] for k in range(3))
        for (i, j) in ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
    ]
    return SymMatrix3(tuple(upper), t.mode)


def congruence_diagonalize(m: SymMatrix3, tol: float = None):
    """Diagonalize m by congruence: returns (T, diag) with T^t m T diagonal.

    Pivot policy: a nonzero diagonal entry is preferred (lowest index in
    EXACT mode, largest magnitude in FLOAT mode); if every remaining
    diagonal entry is zero but some off-diagonal entry survives, the
    hyperbolic split b_i +/- b_j re-creates a diagonal pivot.  No square
    roots are taken, so sign counting stays exact in EXACT mode.
    """
    if m.mode == FLOAT:
        if tol is None:
            raise ValueError("FLOAT-mode diagonalization requires a tolerance")
        scale = max(abs(x) for x in m.upper) or 1.0
        thresh = tol * scale

        def is_zero(x):
            return abs(x) <= thresh
    else:
        def is_zero(x):
            return x == 0

    one = 1.0 if m.mode == FLOAT else Fraction(1)
    zero = 0.0 if m.mode == FLOAT else Fraction(0)
    basis = [
        (one, zero, zero),
        (zero, one, zero),
        (zero, zero, one),
    ]
    done = 0
    while done < 3:
        diag = [apply_form(m, basis[i], basis[i]) for i in range(3)]
        live = [i for i in range(done, 3) if not is_zero(diag[i])]
        if live:
            if m.mode == FLOAT:
                k = max(live, key=lambda i: abs(diag[i]))
            else:
                k = live[0]
            basis[done], basis[k] = basis[k], basis[done]
            p = apply_form(m, basis[done], basis[done])
            for j in range(done + 1, 3):
                c = apply_form(m, basis[done], basis[j]) / p
                basis[j] = vec_sub(basis[j], vec_scale(basis[done], c))
            done += 1
            continue
        off = [
            (i, j)
            for i in range(done, 3)
            for j in range(i + 1, 3)
            if not is_zero(apply_form(m, basis[i], basis[j]))
        ]
        if not off:
            break  # remaining block is zero
        if m.mode == FLOAT:
            i, j = max(off, key=lambda ij: abs(apply_form(m, basis[ij[0]], basis[ij[1]])))
        else:
            i, j = off[0]
        basis[i], basis[j] = vec_add(basis[i], basis[j]), vec_sub(basis[i], basis[j])
    t = Matrix3.from_columns(basis)
    diag = tuple(apply_form(m, b, b) for b in basis)
    return t, diag


def signature(m: SymMatrix3, tol: float = None) -> SignatureTriple:
    """Eigenvalue sign counts via congruence diagonalization (no roots)."""
    if m.mode == FLOAT:
        if tol is None:
            raise ValueError("FLOAT-mode signature requires a tolerance")
        _, diag = congruence_diagonalize(m, tol)
        scale = max(abs(x) for x in m.upper) or 1.0
        pos = sum(1 for d in diag if d > tol * scale)
        neg = sum(1 for d in diag if d < -tol * scale)
    else:
        _, diag = congruence_diagonalize(m)
        pos = sum(1 for d in diag if d > 0)
        neg = sum(1 for d in diag if d < 0)
    return SignatureTriple(pos, neg, 3 - pos - neg)


def _exact_int_rows(m) -> list:
    """Rows scaled to integers (per-row denominator clearing)."""
    out = []
    for row in m.rows:
        fr = [Fraction(x) for x in row]
        lcm = 1
        for x in fr:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in fr])
    return out


def rank3(m) -> int:
    """Rank by fraction-free (Bareiss) elimination.  EXACT mode only."""
    if m.mode != EXACT:
        raise ModeMismatchError("rank3 requires EXACT mode")
    a = _exact_int_rows(m)
    rank = 0
    denom = 1
    for c in range(3):
        piv = next((i for i in range(rank, 3) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rank + 1, 3):
            for j in range(c + 1, 3):
                a[i][j] = (a[i][j] * a[rank][c] - a[i][c] * a[rank][j]) // denom
            a[i][c] = 0
        denom = a[rank][c]
        rank += 1
    return rank


def _rref(rows):
    """Reduced row echelon form with leftmost-pivot convention."""
    a = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(3):
        piv = next((i for i in range(r, 3) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(3):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def kernel_basis(m) -> list:
    """Deterministic rational basis of the null space.

    Free variables are set to 1 one at a time in index order; each vector
    is cleared to integers and divided by the gcd, so identical inputs
    always produce identical bases.  EXACT mode only.
    """
    if m.mode != EXACT:
        raise ModeMismatchError("kernel_basis requires EXACT mode")
    a, pivots = _rref(m.rows)
    free = [c for c in range(3) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * 3
        x[f] = Fraction(1)
        for r, c in enumerate(pivots):
            x[c] = -a[r][f]
        basis.append(primitive_vector(x))
    return basis
