"""Even integral lattices in basis coordinates.

A lattice is presented purely by its Gram matrix; the ambient Euclidean
space never appears as a separate object.  This module provides validity
checks, the dual basis, the finite discriminant group with an explicit
coset transversal, the locality sign 2-cocycles in both the standard and
the Kac normalization, and the constructive decomposition of an arbitrary
symmetric even integer matrix into Gram matrices of positive even
lattices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exact_core import (
    DegenerateLatticeError,
    EvennessError,
    IntMatrix,
    Phase,
    PreconditionError,
    QVector,
    is_positive_definite,
    rational_inverse,
    smith_normal_form,
)
from .sampling import SplitMix64, sample_int_vector


@dataclass(frozen=True)
class EvenLattice:
    """Even lattice given by its Gram matrix G[i][j] = <e_i, e_j>."""

    gram: IntMatrix
    definite: bool = False

    def __post_init__(self):
        g = self.gram
        if not g.is_square():
            raise PreconditionError("Gram matrix must be square")
        if not g.is_symmetric():
            raise PreconditionError("Gram matrix must be symmetric")
        if not g.has_even_diagonal():
            raise EvennessError("Gram matrix must have even diagonal entries")
        if self.definite and not is_positive_definite(g):
            raise PreconditionError("lattice flagged definite but Gram matrix is not")

    @property
    def rank(self) -> int:
        return self.gram.rows

    def inner(self, x: Sequence, y: Sequence):
        """<x, y> in basis coordinates, i.e. x . G . y."""
        return sum(a * b for a, b in zip(x, self.gram.mat_vec(y)))

    def determinant(self) -> int:
        return self.gram.det()


@dataclass(frozen=True)
class BilinearTwoCocycle:
    """Sign-valued 2-cocycle b(x, y) = (-1)^(x . B . y) with B taken mod 2."""

    matrix: IntMatrix
    variant: str  # "std" | "kac"

    def __post_init__(self):
        reduced = IntMatrix.from_rows([[x % 2 for x in row] for row in self.matrix.entries])
        object.__setattr__(self, "matrix", reduced)
        if self.variant not in ("std", "kac"):
            raise PreconditionError(f"unknown two-cocycle variant {self.variant!r}")

    def exponent(self, x: Sequence[int], y: Sequence[int]) -> int:
        """The integer x . B . y, so the phase value is (-1)^exponent."""
        if len(x) != self.matrix.rows or len(y) != self.matrix.cols:
            raise PreconditionError("vector length mismatch in two-cocycle")
        return sum(a * b for a, b in zip(x, self.matrix.mat_vec(y)))

    def value(self, x: Sequence[int], y: Sequence[int]) -> Phase:
        return Phase(Fraction(self.exponent(x, y)))


@dataclass(frozen=True)
class FiniteAbelianGroupData:
    """Invariant-factor presentation d_1 | d_2 | ... with trivial factors dropped."""

    invariant_factors: Tuple[int, ...]

    @property
    def order(self) -> int:
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1


@dataclass(frozen=True)
class DiscriminantGroup:
    """The finite quotient (dual lattice)/(lattice), with coset representatives.

    Representatives are torus points in [0,1)^n listed lexicographically in
    Smith-box coordinates; ``coordinates[k]`` are the invariant-factor
    coordinates of ``representatives[k]``.
    """

    group: FiniteAbelianGroupData
    representatives: Tuple[QVector, ...]
    coordinates: Tuple[Tuple[int, ...], ...]
    order: int

    def representative_of(self, coords: Sequence[int]) -> QVector:
        key = tuple(
            c % d for c, d in zip(coords, self.group.invariant_factors)
        )
        return self.representatives[self.coordinates.index(key)]


def dual_basis(lattice: EvenLattice) -> Tuple[Tuple[Fraction, ...], ...]:
    """Columns of the inverse Gram matrix: the dual basis in lattice coordinates."""
    if lattice.determinant() == 0:
        raise DegenerateLatticeError("dual basis requires a non-degenerate Gram matrix")
    return rational_inverse(lattice.gram)


def discriminant_group(lattice: EvenLattice) -> DiscriminantGroup:
    """Invariant factors and an explicit transversal of (dual)/(lattice).

    The cokernel of the Gram matrix is read off from its Smith normal form
    U G V = S; the transversal enumerates the box prod [0, S_ii) in Smith
    coordinates w and maps back through x = V S^{-1} w, reduced mod 1.
    """
    det = lattice.determinant()
    if det == 0:
        raise DegenerateLatticeError("discriminant group requires det != 0")
    _, s, v = smith_normal_form(lattice.gram)
    n = lattice.rank
    diag = [s[i, i] for i in range(n)]
    factors = tuple(d for d in diag if d > 1)
    reps: List[QVector] = []
    coords: List[Tuple[int, ...]] = []

    def enumerate_box(prefix):
        i = len(prefix)
        if i == n:
            w = prefix
            x = tuple(
                sum(Fraction(v[r, c], diag[c]) * w[c] for c in range(n)) % 1
                for r in range(n)
            )
            reps.append(x)
            coords.append(tuple(w[c] for c in range(n) if diag[c] > 1))
            return
        for k in range(diag[i]):
            enumerate_box(prefix + [k])

    enumerate_box([])
    group = FiniteAbelianGroupData(factors)
    assert len(reps) == abs(det)
    return DiscriminantGroup(group, tuple(reps), tuple(coords), abs(det))


def two_cocycle(lattice: EvenLattice, variant: str = "std") -> BilinearTwoCocycle:
    """The locality sign cocycle on the lattice, in either normalization.

    std: exponent matrix is the strict upper triangle of G mod 2, so
         b(e_i, e_j) = (-1)^(G_ij) for i < j and 1 otherwise.
    kac: additionally G_ii/2 on the diagonal, so b(e_i, e_i) = (-1)^(G_ii/2).
    """
    g = lattice.gram
    if not g.has_even_diagonal():
        raise EvennessError("two-cocycle requires an even lattice")
    b = [[g[i, j] % 2 if j > i else 0 for j in range(g.cols)] for i in range(g.rows)]
    if variant == "kac":
        for i in range(g.rows):
            b[i][i] = (g[i, i] // 2) % 2
    elif variant != "std":
        raise PreconditionError(f"unknown two-cocycle variant {variant!r}")
    return BilinearTwoCocycle(IntMatrix.from_rows(b), variant)


@dataclass
class CocycleCheckReport:
    ok: bool
    counterexample: Optional[dict] = None


def verify_two_cocycle(
    cocycle: BilinearTwoCocycle,
    lattice: EvenLattice,
    samples: int = 64,
    seed: int = 0,
) -> CocycleCheckReport:
    """Check the 2-cocycle identity and the commutator rule.

    Basis triples are checked exhaustively (bilinearity makes that
    sufficient), and the commutator rule
    b(x,y) b(y,x)^{-1} = (-1)^{<x,y>} is checked on sampled integer pairs.
    """
    n = lattice.rank
    basis = [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def vadd(x, y):
        return tuple(a + b for a, b in zip(x, y))

    for x in basis:
        for y in basis:
            for z in basis:
                total = (
                    cocycle.exponent(y, z)
                    - cocycle.exponent(vadd(x, y), z)
                    + cocycle.exponent(x, vadd(y, z))
                    - cocycle.exponent(x, y)
                )
                if total % 2 != 0:
                    return CocycleCheckReport(False, {
                        "identity": "two-cocycle",
                        "triple": [list(x), list(y), list(z)],
                    })
    rng = SplitMix64(seed)
    for _ in range(samples):
        x = sample_int_vector(rng, n, -4, 4)
        y = sample_int_vector(rng, n, -4, 4)
        z = sample_int_vector(rng, n, -4, 4)
        total = (
            cocycle.exponent(y, z)
            - cocycle.exponent(vadd(x, y), z)
            + cocycle.exponent(x, vadd(y, z))
            - cocycle.exponent(x, y)
        )
        if total % 2 != 0:
            return CocycleCheckReport(False, {
                "identity": "two-cocycle",
                "triple": [list(x), list(y), list(z)],
            })
        comm = cocycle.exponent(x, y) - cocycle.exponent(y, x)
        if (comm - lattice.inner(x, y)) % 2 != 0:
            return CocycleCheckReport(False, {
                "identity": "commutator",
                "pair": [list(x), list(y)],
            })
    return CocycleCheckReport(True)


def _k_matrix(n: int, i: int, j: int) -> IntMatrix:
    """2*Id - E_ij - E_ji: the rank-n Gram matrix with a single -1 coupling."""
    rows = [[2 * int(r == c) for c in range(n)] for r in range(n)]
    rows[i][j] -= 1
    rows[j][i] -= 1
    return IntMatrix.from_rows(rows)


def decompose_even_symmetric(h: IntMatrix) -> List[Tuple[int, EvenLattice]]:
    """Write a symmetric even-diagonal H as an integer combination of Gram
    matrices of positive even lattices.

    Construction: every off-diagonal entry H_ij (i < j) contributes the
    coefficient -H_ij on K_ij = 2*Id - E_ij - E_ji; the remaining diagonal
    matrix R is made positive by a uniform shift 2t*Id, emitted as
    (1, R + 2t*Id) and (-t, 2*Id).  Terms with equal Gram matrices are
    merged and zero coefficients dropped, so the result re-sums to H
    exactly with every term positive definite and even.
    """
    if not h.is_square() or not h.is_symmetric():
        raise PreconditionError("decomposition requires a symmetric matrix")
    if not h.has_even_diagonal():
        raise EvennessError("decomposition requires an even diagonal")
    n = h.rows
    terms: List[Tuple[int, IntMatrix]] = []
    acc = IntMatrix.zero(n, n)
    for i in range(n):
        for j in range(i + 1, n):
            c = -h[i, j]
            if c != 0:
                k = _k_matrix(n, i, j)
                terms.append((c, k))
                acc = acc + k.scale(c)
    residual = h - acc
    # residual is diagonal by construction
    assert all(
        residual[i, j] == 0 for i in range(n) for j in range(n) if i != j
    ), "off-diagonal residual in decomposition"
    min_diag = min(residual[i, i] for i in range(n))
    t = max(0, 1 - min_diag // 2)
    shifted = residual + IntMatrix.identity(n).scale(2 * t)
    terms.append((1, shifted))
    if t != 0:
        terms.append((-t, IntMatrix.identity(n).scale(2)))
    # merge equal Gram matrices, drop zero coefficients
    merged: List[Tuple[int, IntMatrix]] = []
    for c, g in terms:
        for idx, (c0, g0) in enumerate(merged):
            if g0.entries == g.entries:
                merged[idx] = (c0 + c, g0)
                break
        else:
            merged.append((c, g))
    out: List[Tuple[int, EvenLattice]] = []
    for c, g in merged:
        if c == 0:
            continue
        out.append((c, EvenLattice(g, definite=True)))
    return out


def resum(terms: Sequence[Tuple[int, EvenLattice]], n: int) -> IntMatrix:
    """Sum of coefficient * Gram over the decomposition terms."""
    acc = IntMatrix.zero(n, n)
    for c, lat in terms:
        acc = acc + lat.gram.scale(c)
    return acc
