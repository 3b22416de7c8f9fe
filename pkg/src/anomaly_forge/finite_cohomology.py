"""Cohomology of finite abelian groups with circle coefficients, computed
through the bar resolution over the finite coefficient model (1/D)Z/Z.

The third cohomology of the group is presented by invariant factors with
explicit basis cocycles; arbitrary 3-cocycles with denominators dividing
D are classified against that presentation.  Coboundaries are drawn from
2-cochains over the finer module (1/(e*D))Z/Z, where e is the group
exponent: a circle-valued coboundary whose values land in (1/D)Z/Z is
always the coboundary of such a cochain, so the presentation agrees with
the divisible-coefficient cohomology rather than overshooting it.

Also here: restriction of a lattice obstruction cocycle to the
discriminant group, the exhaustive pentagon check, and order-two
indicators.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exact_core import (
    BudgetExceededError,
    NotACocycleError,
    Phase,
    PreconditionError,
)
from .lattice import DiscriminantGroup, EvenLattice, discriminant_group
from .modular import howell, howell_solve, kernel_mod, smith_quotient
from .torus_cocycle import SectionFn, Sign, TorusPoint, omega_closed_form

DEFAULT_BUDGET = 12


def size_budget() -> int:
    raw = os.environ.get("ANOMALY_FORGE_BUDGET", "")
    try:
        return int(raw) if raw else DEFAULT_BUDGET
    except ValueError:
        return DEFAULT_BUDGET


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Direct sum of cyclic groups given by invariant factors d_1 | d_2 | ..."""

    invariant_factors: Tuple[int, ...]

    def __post_init__(self):
        facs = tuple(int(d) for d in self.invariant_factors)
        if any(d < 2 for d in facs):
            raise PreconditionError("invariant factors must be >= 2")
        for a, b in zip(facs, facs[1:]):
            if b % a:
                raise PreconditionError("invariant factors must form a divisibility chain")
        object.__setattr__(self, "invariant_factors", facs)

    @property
    def order(self) -> int:
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    def elements(self) -> List[Tuple[int, ...]]:
        if not self.invariant_factors:
            return [()]
        return [tuple(e) for e in product(*[range(d) for d in self.invariant_factors])]

    def add(self, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariant_factors))

    def neg(self, a: Sequence[int]) -> Tuple[int, ...]:
        return tuple((-x) % d for x, d in zip(a, self.invariant_factors))

    def zero(self) -> Tuple[int, ...]:
        return tuple(0 for _ in self.invariant_factors)

    def index_of(self, a: Sequence[int]) -> int:
        idx = 0
        for x, d in zip(a, self.invariant_factors):
            idx = idx * d + (x % d)
        return idx

    def addition_table(self) -> List[List[int]]:
        elems = self.elements()
        return [[self.index_of(self.add(a, b)) for b in elems] for a in elems]


@dataclass(frozen=True)
class FiniteCochain:
    """Dense arity-n cochain table over a finite abelian group.

    Values are exponents of e^{2*pi*i}, reduced mod 1, all with
    denominator dividing ``denominator``.  The table is indexed
    lexicographically by element coordinate tuples.
    """

    group: FiniteAbelianGroup
    arity: int
    table: Tuple[Fraction, ...]
    denominator: int

    def __post_init__(self):
        n = self.group.order
        if len(self.table) != n ** self.arity:
            raise PreconditionError("cochain table has the wrong size")
        vals = tuple(Fraction(v) % 1 for v in self.table)
        for v in vals:
            if self.denominator % v.denominator:
                raise PreconditionError(
                    f"cochain value {v} has a denominator not dividing {self.denominator}"
                )
        object.__setattr__(self, "table", vals)

    def flat_index(self, elems: Sequence[Sequence[int]]) -> int:
        n = self.group.order
        idx = 0
        for e in elems:
            idx = idx * n + self.group.index_of(e)
        return idx

    def value(self, *elems: Sequence[int]) -> Fraction:
        if len(elems) != self.arity:
            raise PreconditionError("wrong number of arguments")
        return self.table[self.flat_index(elems)]

    def phase(self, *elems: Sequence[int]) -> Phase:
        return Phase(2 * self.value(*elems))

    def numerators(self) -> np.ndarray:
        d = self.denominator
        return np.array([int(v * d) for v in self.table], dtype=np.int64)

    def multiply(self, other: "FiniteCochain") -> "FiniteCochain":
        if self.group != other.group or self.arity != other.arity:
            raise PreconditionError("cochain mismatch in product")
        d = lcm(self.denominator, other.denominator)
        return FiniteCochain(
            self.group,
            self.arity,
            tuple((a + b) % 1 for a, b in zip(self.table, other.table)),
            d,
        )


def constant_one_cochain(group: FiniteAbelianGroup, arity: int = 3, denominator: int = 2) -> FiniteCochain:
    return FiniteCochain(
        group, arity, tuple(Fraction(0) for _ in range(group.order ** arity)), denominator
    )


@dataclass(frozen=True)
class CohomologyClass:
    """Coordinates of a class in the computed invariant-factor presentation."""

    coordinates: Tuple[int, ...]
    invariant_factors: Tuple[int, ...]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coordinates)

    def order(self) -> int:
        from math import gcd

        o = 1
        for c, d in zip(self.coordinates, self.invariant_factors):
            o_i = d // gcd(c, d) if c else 1
            o = o * o_i // gcd(o, o_i)
        return o

    def add(self, other: "CohomologyClass") -> "CohomologyClass":
        if self.invariant_factors != other.invariant_factors:
            raise PreconditionError("classes from different presentations")
        return CohomologyClass(
            tuple((a + b) % d for a, b, d in zip(self.coordinates, other.coordinates, self.invariant_factors)),
            self.invariant_factors,
        )


@dataclass(frozen=True)
class H3Presentation:
    """H^3 of a finite abelian group: invariant factors, basis cocycles,
    and the solve data used to classify cocycles against them."""

    group: FiniteAbelianGroup
    modulus: int
    invariant_factors: Tuple[int, ...]
    basis: Tuple[FiniteCochain, ...]
    _kernel_basis: np.ndarray
    _pivots: tuple
    _transform: np.ndarray
    _diag: Tuple[int, ...]


def _d3_constraints(add: List[List[int]], n: int) -> Iterable[Tuple[List[int], List[int]]]:
    for a in range(n):
        for b in range(n):
            ab = add[a][b]
            for c in range(n):
                bc = add[b][c]
                base_bcd = (b * n + c) * n
                base_abc = (a * n + b) * n + c
                for d in range(n):
                    cd = add[c][d]
                    cols = [
                        base_bcd + d,
                        (ab * n + c) * n + d,
                        (a * n + bc) * n + d,
                        (a * n + b) * n + cd,
                        base_abc,
                    ]
                    yield cols, (1, -1, 1, -1, 1)


def _d2_matrix(add: List[List[int]], n: int) -> np.ndarray:
    """Dense matrix of the degree-2 boundary, rows indexed by G^3."""
    out = np.zeros((n ** 3, n ** 2), dtype=np.int64)
    r = 0
    for a in range(n):
        for b in range(n):
            ab = add[a][b]
            for c in range(n):
                bc = add[b][c]
                out[r, b * n + c] += 1
                out[r, ab * n + c] -= 1
                out[r, a * n + bc] += 1
                out[r, a * n + b] -= 1
                r += 1
    return out


def h_three(group: FiniteAbelianGroup, modulus: Optional[int] = None) -> H3Presentation:
    """Compute H^3(G, U(1)) through the finite model (1/D)Z/Z.

    D defaults to 2 * exponent(G)^2 and must be a multiple of it.  The
    returned presentation lists invariant factors in divisibility order
    together with explicit basis cocycle tables.
    """
    e = group.exponent
    default_d = 2 * e * e
    d = modulus if modulus is not None else default_d
    if d % default_d:
        raise PreconditionError(
            f"coefficient modulus {d} must be a multiple of 2*exponent^2 = {default_d}"
        )
    n = group.order
    if n > size_budget():
        raise BudgetExceededError(
            f"group order {n} exceeds budget {size_budget()} (set ANOMALY_FORGE_BUDGET)"
        )
    d2 = e * d
    add = group.addition_table()
    n3, n2 = n ** 3, n ** 2

    kernel = kernel_mod(_d3_constraints(add, n), n3, d)
    hk, pivots = howell(kernel, d)

    # coboundaries of (1/(e*D))-valued 2-cochains that land in (1/D)-cochains:
    # y mod e*D with (d2_matrix y) == 0 mod e, images (d2_matrix y)/e mod D
    bmat = _d2_matrix(add, n)

    def den_constraints():
        for r in range(n3):
            cols = np.nonzero(bmat[r])[0]
            if cols.size:
                yield cols, (d * bmat[r, cols]) % d2

    k2 = kernel_mod(den_constraints(), n2, d2)
    images = k2 @ bmat.T
    if (images % e).any():
        raise AssertionError("denominator kernel violated its defining congruence")
    images = (images // e) % d

    coords = []
    for row in images:
        c = howell_solve(hk, pivots, d, row)
        if c is None:
            raise AssertionError("coboundary fell outside the cocycle span")
        coords.append(c)

    k = hk.shape[0]

    def syzygy_constraints():
        for col in range(hk.shape[1]):
            rows = np.nonzero(hk[:, col])[0]
            if rows.size:
                yield rows, hk[rows, col]

    syz = kernel_mod(syzygy_constraints(), k, d)
    rel_cols = [np.array(coords, dtype=np.int64).T] if coords else []
    rel_cols.append(syz.T)
    relations = np.concatenate(rel_cols, axis=1) if rel_cols else np.zeros((k, 0), dtype=np.int64)

    diag, u, uinv = smith_quotient(relations, k, d)
    factors = tuple(int(x) for x in diag if x > 1)
    basis_tables = []
    for i in range(k):
        if diag[i] > 1:
            vec = (uinv[:, i] @ hk) % d
            basis_tables.append(
                FiniteCochain(group, 3, tuple(Fraction(int(x), d) for x in vec), d)
            )
    return H3Presentation(
        group=group,
        modulus=d,
        invariant_factors=factors,
        basis=tuple(basis_tables),
        _kernel_basis=hk,
        _pivots=tuple(pivots),
        _transform=u,
        _diag=tuple(diag),
    )


def coboundary3(cochain: FiniteCochain) -> FiniteCochain:
    """The degree-3 coboundary of a 3-cochain, an arity-4 table mod 1."""
    g = cochain.group
    elems = g.elements()
    vals = []
    for a in elems:
        for b in elems:
            ab = g.add(a, b)
            for c in elems:
                bc = g.add(b, c)
                for dd in elems:
                    cd = g.add(c, dd)
                    v = (
                        cochain.value(b, c, dd)
                        - cochain.value(ab, c, dd)
                        + cochain.value(a, bc, dd)
                        - cochain.value(a, b, cd)
                        + cochain.value(a, b, c)
                    ) % 1
                    vals.append(v)
    return FiniteCochain(g, 4, tuple(vals), cochain.denominator)


def pentagon_check(group: FiniteAbelianGroup, cochain: FiniteCochain):
    """Exhaustive associator pentagon over G^4.

    Returns (True, None) when
    w(h,k,l) * w(g,h+k,l) * w(g,h,k) == w(g+h,k,l) * w(g,h,k+l)
    for every 4-tuple, else (False, witness tuple).
    """
    g = group
    elems = g.elements()
    for a in elems:
        for b in elems:
            ab = g.add(a, b)
            for c in elems:
                bc = g.add(b, c)
                for dd in elems:
                    cd = g.add(c, dd)
                    lhs = cochain.value(b, c, dd) + cochain.value(a, bc, dd) + cochain.value(a, b, c)
                    rhs = cochain.value(ab, c, dd) + cochain.value(a, b, cd)
                    if (lhs - rhs) % 1 != 0:
                        return False, (a, b, c, dd)
    return True, None


def classify(cochain: FiniteCochain, presentation: H3Presentation) -> CohomologyClass:
    """Coordinates of a 3-cocycle in the computed presentation.

    The input must be closed (checked first) and its denominators must
    divide the presentation modulus.
    """
    if cochain.group != presentation.group:
        raise PreconditionError("cochain group does not match the presentation")
    d = presentation.modulus
    if d % cochain.denominator:
        raise PreconditionError(
            f"cochain denominator {cochain.denominator} does not divide modulus {d}"
        )
    ok, witness = pentagon_check(presentation.group, cochain)
    if not ok:
        raise NotACocycleError(f"input is not a cocycle; boundary nonzero at {witness}")
    scaled = np.array([int(v * d) for v in cochain.table], dtype=np.int64)
    c = howell_solve(presentation._kernel_basis, list(presentation._pivots), d, scaled)
    if c is None:
        raise NotACocycleError("cocycle table not in the computed kernel span")
    y = (presentation._transform @ c) % d
    coords = tuple(
        int(y[i]) % presentation._diag[i]
        for i in range(len(presentation._diag))
        if presentation._diag[i] > 1
    )
    return CohomologyClass(coords, presentation.invariant_factors)


def restrict_to_discriminant(
    lattice: EvenLattice,
    sign: Sign = Sign.MINUS,
    section_map: Optional[SectionFn] = None,
    disc: Optional[DiscriminantGroup] = None,
):
    """Evaluate the lattice obstruction cocycle on the discriminant group.

    Returns (FiniteCochain, DiscriminantGroup).  Exponents t of e^{i*pi*t}
    convert to e^{2*pi*i} exponents t/2 mod 1.  The table is indexed by
    invariant-factor coordinates in lexicographic order, matching the
    representative enumeration of the discriminant group.
    """
    if disc is None:
        disc = discriminant_group(lattice)
    if disc.order > size_budget():
        raise BudgetExceededError(
            f"discriminant order {disc.order} exceeds budget {size_budget()}"
        )
    facs = disc.group.invariant_factors
    group = FiniteAbelianGroup(facs) if facs else FiniteAbelianGroup(())
    omega = omega_closed_form(lattice.gram, sign, section_map)
    points = [TorusPoint(rep) for rep in disc.representatives]
    e = group.exponent
    denom = 2 * e * e
    vals = []
    for p in points:
        for q in points:
            for r in points:
                t = omega(p, q, r).exponent
                vals.append((t / 2) % 1)
    cochain = FiniteCochain(group, 3, tuple(vals), denom)
    return cochain, disc


def fs_indicator(cochain: FiniteCochain, element: Sequence[int]) -> int:
    """Indicator of an order <= 2 element: the sign w(g,g,g).

    Checks 2g = 0, requires the value to be +-1, and asserts nu^2 = 1.
    """
    g = cochain.group
    el = tuple(element)
    if g.add(el, el) != g.zero():
        raise PreconditionError(f"element {el} does not have order <= 2")
    v = cochain.value(el, el, el) % 1
    if v == 0:
        nu = 1
    elif v == Fraction(1, 2):
        nu = -1
    else:
        raise PreconditionError(f"indicator value e^(2*pi*i*{v}) is not a sign")
    assert nu * nu == 1
    return nu
