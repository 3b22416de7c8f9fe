"""Exact rational arithmetic, the phase group U(1) with rational exponents,
and integer matrix kernels (Smith normal form, positive definiteness).

Everything in this module is exact: scalars are python big integers or
``fractions.Fraction``; no floating point appears anywhere.  Phases are
stored as rational exponents t meaning the complex number e^{i*pi*t},
with t normalized into [0, 2).  With this convention integer inner
products land exactly on {+1, -1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

Rational = Fraction
QVector = Tuple[Fraction, ...]


class PreconditionError(ValueError):
    """A documented mathematical precondition was violated."""


class DegenerateLatticeError(PreconditionError):
    """Gram matrix is singular where an invertible one is required."""


class EvennessError(PreconditionError):
    """A Gram matrix diagonal entry is odd where evenness is required."""


class LiftConsistencyError(PreconditionError):
    """An integer-valued lift evaluated to a non-integer."""


class NotACocycleError(PreconditionError):
    """A cochain that must be closed has nonzero coboundary."""


class BudgetExceededError(PreconditionError):
    """A finite-group computation exceeds the configured size budget."""


# ---------------------------------------------------------------------------
# Phase group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Phase:
    """An element of U(1) stored as the exact exponent t of e^{i*pi*t}.

    The exponent is always normalized into [0, 2); the group law is
    exponent addition mod 2 and the inverse negates mod 2.
    """

    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", Fraction(self.exponent) % 2)

    @staticmethod
    def one() -> "Phase":
        return Phase(Fraction(0))

    @staticmethod
    def minus_one() -> "Phase":
        return Phase(Fraction(1))

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.exponent + other.exponent)

    def inverse(self) -> "Phase":
        return Phase(-self.exponent)

    def __pow__(self, k: int) -> "Phase":
        return Phase(self.exponent * k)

    def is_one(self) -> bool:
        return self.exponent == 0

    def as_sign(self) -> int:
        """Return +1 or -1 for a real phase; raise otherwise."""
        if self.exponent == 0:
            return 1
        if self.exponent == 1:
            return -1
        raise PreconditionError(f"phase e^(i*pi*{self.exponent}) is not real")

    def __str__(self) -> str:
        if self.exponent == 0:
            return "1"
        if self.exponent == 1:
            return "-1"
        return f"exp(i*pi*{self.exponent})"


def phase_combine(ps: Iterable[Tuple[Phase, int]]) -> Phase:
    """Product of phases with integer multiplicities: sum of m_i * t_i mod 2."""
    total = Fraction(0)
    for phase, mult in ps:
        total += phase.exponent * mult
    return Phase(total)


# ---------------------------------------------------------------------------
# Integer matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored as a tuple of row tuples."""

    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        if not rows or not rows[0]:
            raise PreconditionError("matrix must have positive dimensions")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise PreconditionError("ragged matrix rows")
        object.__setattr__(self, "entries", rows)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij: Tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def zero(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(0 for _ in range(cols)) for _ in range(rows)))

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]]) -> "IntMatrix":
        return IntMatrix(tuple(tuple(row) for row in rows))

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.entries)))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    def has_even_diagonal(self) -> bool:
        return self.is_square() and all(self.entries[i][i] % 2 == 0 for i in range(self.rows))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise PreconditionError("matrix shape mismatch in addition")
        return IntMatrix(
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            )
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + other.scale(-1)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * x for x in row) for row in self.entries))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise PreconditionError("matrix shape mismatch in product")
        cols = other.transpose().entries
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
                for row in self.entries
            )
        )

    def mat_vec(self, v: Sequence) -> tuple:
        if len(v) != self.cols:
            raise PreconditionError("vector length mismatch")
        return tuple(sum(row[j] * v[j] for j in range(self.cols)) for row in self.entries)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if not self.is_square():
            raise PreconditionError("determinant of a non-square matrix")
        n = self.rows
        m = [list(row) for row in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                pivot = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
                if pivot is None:
                    return 0
                m[k], m[pivot] = m[pivot], m[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def strictly_upper(self) -> "IntMatrix":
        """Zero out the diagonal and everything below it."""
        return IntMatrix(
            tuple(
                tuple(self.entries[i][j] if j > i else 0 for j in range(self.cols))
                for i in range(self.rows)
            )
        )


def is_positive_definite(m: IntMatrix) -> bool:
    """Sylvester criterion: all leading principal minors positive, exactly."""
    if not m.is_square() or not m.is_symmetric():
        raise PreconditionError("positive definiteness needs a square symmetric matrix")
    for k in range(1, m.rows + 1):
        minor = IntMatrix.from_rows([row[:k] for row in m.entries[:k]])
        if minor.det() <= 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


def smith_normal_form(m: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return unimodular U, V and diagonal S with U @ M @ V == S.

    The diagonal of S is non-negative and satisfies S[0,0] | S[1,1] | ...
    Pivot selection is deterministic: smallest nonzero absolute value,
    ties broken by lowest (row, col).
    """
    a = [list(row) for row in m.entries]
    nrows, ncols = m.rows, m.cols
    u = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(i, j, q):
        # row_i -= q * row_j
        a[i] = [x - q * y for x, y in zip(a[i], a[j])]
        u[i] = [x - q * y for x, y in zip(u[i], u[j])]

    def addmul_col(i, j, q):
        # col_i -= q * col_j
        for row in a:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    def diagonalize():
        t = 0
        while t < min(nrows, ncols):
            best = None
            for i in range(t, nrows):
                for j in range(t, ncols):
                    if a[i][j] != 0:
                        key = (abs(a[i][j]), i, j)
                        if best is None or key < best:
                            best = key
            if best is None:
                break
            _, bi, bj = best
            if bi != t:
                swap_rows(t, bi)
            if bj != t:
                swap_cols(t, bj)
            if a[t][t] < 0:
                negate_row(t)
            dirty = False
            for i in range(t + 1, nrows):
                if a[i][t] != 0:
                    addmul_row(i, t, a[i][t] // a[t][t])
                    if a[i][t] != 0:
                        dirty = True
            for j in range(t + 1, ncols):
                if a[t][j] != 0:
                    addmul_col(j, t, a[t][j] // a[t][t])
                    if a[t][j] != 0:
                        dirty = True
            if dirty:
                continue
            t += 1

    diagonalize()
    # Divisibility chain: fold a violating column into its predecessor and
    # re-diagonalize.  Each fold replaces d_i by gcd(d_i, d_{i+1}), which
    # strictly decreases, so this terminates.
    while True:
        viol = None
        for i in range(min(nrows, ncols) - 1):
            di, dj = a[i][i], a[i + 1][i + 1]
            if di != 0 and dj % di != 0:
                viol = i
                break
        if viol is None:
            break
        addmul_col(viol, viol + 1, -1)  # col_i += col_{i+1}
        diagonalize()

    return (
        IntMatrix.from_rows(u),
        IntMatrix.from_rows(a),
        IntMatrix.from_rows(v),
    )


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Exact inverse of an integer matrix with determinant +-1."""
    n = m.rows
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m.entries)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise PreconditionError("matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    out = []
    for row in aug:
        vals = row[n:]
        if any(x.denominator != 1 for x in vals):
            raise PreconditionError("matrix is not unimodular")
        out.append([int(x) for x in vals])
    return IntMatrix.from_rows(out)


def rational_inverse(m: IntMatrix) -> Tuple[Tuple[Fraction, ...], ...]:
    """Exact inverse of a non-singular integer matrix, as Fractions."""
    n = m.rows
    if not m.is_square():
        raise PreconditionError("inverse of a non-square matrix")
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m.entries)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise DegenerateLatticeError("singular matrix has no inverse")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)
