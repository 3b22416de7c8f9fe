"""Anomaly 3-cocycles on the torus, assembled and in closed form.

The torus R^n/Z^n is handled in lattice basis coordinates: a point is a
vector of rationals mod 1, the Borel section takes coordinatewise
fractional parts, and all cocycle values are exact phases e^{i*pi*t}
with rational t.

Contents:

* braiding phases e^{i*pi*<p, G q>} of charge vectors,
* the generic 3-cocycle assembler from a bicharacter mu, a pairing
  lambda, and a section (the twisted-crossed-product obstruction recipe),
* closed forms for the obstruction cocycle of any even symmetric G and
  the one-dimensional family indexed by a positive level m,
* the cochain boundary calculus with trivial coefficients,
* degree-2 integer carry generators b_i, their cup products, Bockstein
  lifts to integer 4-cochains, and the carry 3-cochains that make the
  lifts additive in G.

Sign convention: the two induction directions give a pair of mutually
inverse cocycles; ``Sign.MINUS`` (the default, matching the positive
pairing lambda) multiplies exponents by +1 and ``Sign.PLUS`` by -1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from .exact_core import (
    EvennessError,
    IntMatrix,
    LiftConsistencyError,
    Phase,
    PreconditionError,
    QVector,
)
from .lattice import (
    BilinearTwoCocycle,
    EvenLattice,
    decompose_even_symmetric,
    two_cocycle,
)


class Sign(enum.Enum):
    """Branch selector for the two induction directions."""

    PLUS = "plus"
    MINUS = "minus"

    @property
    def exponent_multiplier(self) -> int:
        return -1 if self is Sign.PLUS else 1


def frac(x: Fraction) -> Fraction:
    """Fractional part, in [0, 1)."""
    return x % 1


@dataclass(frozen=True)
class TorusPoint:
    """Point of R^n/Z^n: rational coordinates normalized into [0, 1)."""

    coords: QVector

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(frac(Fraction(c)) for c in self.coords))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        if self.rank != other.rank:
            raise PreconditionError("torus point rank mismatch")
        return TorusPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(tuple(-c for c in self.coords))

    @staticmethod
    def zero(rank: int) -> "TorusPoint":
        return TorusPoint(tuple(Fraction(0) for _ in range(rank)))


SectionFn = Callable[[TorusPoint], QVector]


@dataclass(frozen=True)
class SectionMap:
    """Borel section of R^n -> R^n/Z^n acting coordinatewise.

    The standard section returns the representative in [0,1)^n.  An
    optional integer shift chi (a function of the point) produces the
    alternative sections s'(x) = s(x) + chi(x) used to test that
    cohomology classes do not depend on the section.
    """

    rank: int
    shift: Optional[Callable[[TorusPoint], Tuple[int, ...]]] = None

    def __call__(self, x: TorusPoint) -> QVector:
        base = x.coords
        if self.shift is None:
            return base
        offs = self.shift(x)
        if len(offs) != len(base):
            raise PreconditionError("section shift has wrong rank")
        return tuple(b + o for b, o in zip(base, offs))


def section(x: TorusPoint) -> QVector:
    """The standard section: coordinatewise fractional part."""
    return x.coords


def carry_vector(s: SectionFn, x: TorusPoint, y: TorusPoint) -> Tuple[Fraction, ...]:
    """s(x) + s(y) - s(x+y); integer-valued for any section."""
    sx, sy, sxy = s(x), s(y), s(x + y)
    return tuple(a + b - c for a, b, c in zip(sx, sy, sxy))


def braiding_phase(p: Sequence[Fraction], q: Sequence[Fraction], g: IntMatrix) -> Phase:
    """The abelian braiding of charge vectors p, q: exponent <p, G q> mod 2."""
    if not g.is_symmetric():
        raise PreconditionError("braiding needs a symmetric Gram matrix")
    if len(p) != g.rows or len(q) != g.rows:
        raise PreconditionError("charge vector dimension mismatch")
    return Phase(sum(a * b for a, b in zip(p, g.mat_vec(q))))


@dataclass(frozen=True)
class PhaseCochain:
    """An n-argument cochain on the torus valued in exact phases.

    ``real_lift``, when present, is the canonical real-valued cochain r
    with e^{2*pi*i*r} equal to the phase value; closed-form cocycles carry
    the lift given by their defining expression, which is what the
    Bockstein calculus differentiates.
    """

    arity: int
    evaluate: Callable[..., Phase]
    provenance: str
    real_lift: Optional[Callable[..., Fraction]] = None

    def __call__(self, *args: TorusPoint) -> Phase:
        if len(args) != self.arity:
            raise PreconditionError(f"cochain arity {self.arity}, got {len(args)} arguments")
        return self.evaluate(*args)

    def lift_value(self, *args: TorusPoint, normalized: bool = False) -> Fraction:
        """Real lift r with e^{2*pi*i*r} = value.

        The canonical lift is used when the cochain carries one and
        ``normalized`` is False; otherwise the phase exponent t of
        e^{i*pi*t} (already reduced into [0,2)) is halved into [0,1).
        """
        if self.real_lift is not None and not normalized:
            return self.real_lift(*args)
        return self.evaluate(*args).exponent / 2


@dataclass(frozen=True)
class RawCochain:
    """Bare evaluator with an arity; used for real-valued intermediates."""

    arity: int
    evaluate: Callable[..., Fraction]

    def __call__(self, *args: TorusPoint) -> Fraction:
        return self.evaluate(*args)


@dataclass(frozen=True)
class IntCochain:
    """An n-argument integer-valued cochain on the torus."""

    arity: int
    evaluate: Callable[..., int]
    provenance: str

    def __call__(self, *args: TorusPoint) -> int:
        if len(args) != self.arity:
            raise PreconditionError(f"cochain arity {self.arity}, got {len(args)} arguments")
        value = self.evaluate(*args)
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise LiftConsistencyError(f"integer cochain produced {value}")
            value = value.numerator
        return int(value)

    def __add__(self, other: "IntCochain") -> "IntCochain":
        if self.arity != other.arity:
            raise PreconditionError("cochain arity mismatch")
        return IntCochain(self.arity, lambda *a: self.evaluate(*a) + other.evaluate(*a), "sum")

    def __sub__(self, other: "IntCochain") -> "IntCochain":
        if self.arity != other.arity:
            raise PreconditionError("cochain arity mismatch")
        return IntCochain(self.arity, lambda *a: self.evaluate(*a) - other.evaluate(*a), "difference")

    def scale(self, c: int) -> "IntCochain":
        return IntCochain(self.arity, lambda *a: c * self.evaluate(*a), "scaled")

    @staticmethod
    def zero(arity: int) -> "IntCochain":
        return IntCochain(arity, lambda *a: 0, "zero")


def _require_even_symmetric(g: IntMatrix):
    if not g.is_symmetric():
        raise PreconditionError("Gram matrix must be symmetric")
    if not g.has_even_diagonal():
        raise EvennessError("Gram matrix must have even diagonal")


def _closed_form_expression(
    g: IntMatrix, sign: Sign, s: SectionFn
) -> Callable[[TorusPoint, TorusPoint, TorusPoint], Fraction]:
    """The exponent expression of the closed-form cocycle, before any
    normalization: bracket terms through the strict upper triangle of G
    plus the pairing term <s(q), G (s(r)+s(t)-s(r+t))>."""
    gu = g.strictly_upper()
    mult = sign.exponent_multiplier

    def expr(q: TorusPoint, r: TorusPoint, t: TorusPoint) -> Fraction:
        a_qr = carry_vector(s, q, r)
        a_qr_t = carry_vector(s, q + r, t)
        a_rt = carry_vector(s, r, t)
        a_q_rt = carry_vector(s, q, r + t)
        bracket1 = sum(x * y for x, y in zip(a_qr, gu.mat_vec(a_qr_t)))
        bracket2 = sum(x * y for x, y in zip(a_rt, gu.mat_vec(a_q_rt)))
        pairing = sum(x * y for x, y in zip(s(q), g.mat_vec(a_rt)))
        return mult * (bracket1 - bracket2 + pairing)

    return expr


def omega_closed_form(
    g: IntMatrix,
    sign: Sign = Sign.MINUS,
    section_map: Optional[SectionFn] = None,
) -> PhaseCochain:
    """Closed-form obstruction 3-cocycle of an even symmetric G."""
    _require_even_symmetric(g)
    s = section_map if section_map is not None else section
    expr = _closed_form_expression(g, sign, s)
    return PhaseCochain(
        arity=3,
        evaluate=lambda q, r, t: Phase(expr(q, r, t)),
        provenance="closed-form",
        real_lift=lambda q, r, t: expr(q, r, t) / 2,
    )


def omega_one_dim(m: int, sign: Sign = Sign.MINUS) -> PhaseCochain:
    """Rank-one obstruction cocycle at level m >= 1.

    Exponent 2*m*s(x)*(s(y)+s(z)-s(y+z)) in e^{i*pi} units; coincides with
    the closed form for the 1x1 Gram matrix [[2m]].
    """
    if m < 1:
        raise PreconditionError("level m must be a positive integer")
    mult = sign.exponent_multiplier

    def expr(x: TorusPoint, y: TorusPoint, z: TorusPoint) -> Fraction:
        if x.rank != 1 or y.rank != 1 or z.rank != 1:
            raise PreconditionError("rank-1 cocycle evaluated on higher-rank points")
        return mult * 2 * m * x.coords[0] * carry_vector(section, y, z)[0]

    return PhaseCochain(
        arity=3,
        evaluate=lambda x, y, z: Phase(expr(x, y, z)),
        provenance="one-dim",
        real_lift=lambda x, y, z: expr(x, y, z) / 2,
    )


MuFn = Callable[[Sequence[int], Sequence[int]], Phase]
LambdaFn = Callable[[Sequence[Fraction], Sequence[int]], Phase]


def mu_from_two_cocycle(cocycle: BilinearTwoCocycle) -> MuFn:
    """The bicharacter on integer vectors defined by a sign 2-cocycle."""

    def mu(x: Sequence[int], y: Sequence[int]) -> Phase:
        for v in (*x, *y):
            if Fraction(v).denominator != 1:
                raise LiftConsistencyError("bicharacter argument must be an integer vector")
        xi = [int(v) for v in x]
        yi = [int(v) for v in y]
        return cocycle.value(xi, yi)

    return mu


def lambda_from_braiding(g: IntMatrix, sign: Sign = Sign.MINUS) -> LambdaFn:
    """The pairing of a rational charge against a lattice vector.

    The MINUS branch is the positive braiding pairing; the PLUS branch is
    its inverse.
    """

    def lam(t: Sequence[Fraction], ell: Sequence[int]) -> Phase:
        value = braiding_phase(tuple(Fraction(v) for v in t), tuple(Fraction(v) for v in ell), g)
        return value if sign.exponent_multiplier == 1 else value.inverse()

    return lam


def jones_assemble(
    mu: MuFn,
    lam: LambdaFn,
    s: SectionFn,
    q: TorusPoint,
    r: TorusPoint,
    t: TorusPoint,
) -> Phase:
    """Assemble the obstruction 3-cocycle from its crossed-product data.

    gamma(q,r,t) = mu(c(q,r), c(q+r,t)) * mu(c(r,t), c(q,r+t))^{-1}
                   * lambda(s(q), c(r,t)),
    where c is the integer carry of the section.  All mu arguments are
    asserted to be integer vectors.
    """
    c_qr = carry_vector(s, q, r)
    c_qr_t = carry_vector(s, q + r, t)
    c_rt = carry_vector(s, r, t)
    c_q_rt = carry_vector(s, q, r + t)
    for vec in (c_qr, c_qr_t, c_rt, c_q_rt):
        if any(Fraction(v).denominator != 1 for v in vec):
            raise LiftConsistencyError("section carry was not an integer vector")
    return mu(c_qr, c_qr_t) * mu(c_rt, c_q_rt).inverse() * lam(s(q), c_rt)


def jones_cochain(lattice: EvenLattice, sign: Sign = Sign.MINUS, variant: str = "std") -> PhaseCochain:
    """The assembled 3-cocycle of a lattice as a PhaseCochain."""
    mu = mu_from_two_cocycle(two_cocycle(lattice, variant))
    lam = lambda_from_braiding(lattice.gram, sign)
    return PhaseCochain(
        3,
        lambda q, r, t: jones_assemble(mu, lam, section, q, r, t),
        "assembled",
    )


def boundary(cochain, args: Sequence[TorusPoint]):
    """Coboundary with trivial coefficients.

    For a phase cochain of arity n and n+1 points, returns the alternating
    product; for an integer or real valued cochain, the alternating sum.
    """
    n = cochain.arity
    if len(args) != n + 1:
        raise PreconditionError(f"boundary of arity-{n} cochain needs {n + 1} points")

    def term_args(j):
        if j == 0:
            return args[1:]
        if j == n + 1:
            return args[:-1]
        merged = args[j - 1] + args[j]
        return tuple(args[: j - 1]) + (merged,) + tuple(args[j + 1:])

    if isinstance(cochain, PhaseCochain):
        out = Phase.one()
        for j in range(n + 2):
            value = cochain(*term_args(j))
            out = out * (value if j % 2 == 0 else value.inverse())
        return out
    out = 0
    for j in range(n + 2):
        sign = 1 if j % 2 == 0 else -1
        out += sign * cochain(*term_args(j))
    return out


def boundary_cochain(cochain: IntCochain) -> IntCochain:
    """The coboundary as a cochain of one higher arity."""
    return IntCochain(
        cochain.arity + 1,
        lambda *args: boundary(cochain, args),
        "boundary",
    )


def b_generator(i: int, rank: int) -> IntCochain:
    """Degree-2 carry generator in coordinate i (1-based index)."""
    if not 1 <= i <= rank:
        raise PreconditionError(f"coordinate index {i} out of range 1..{rank}")

    def ev(x1: TorusPoint, x2: TorusPoint) -> int:
        c = carry_vector(section, x1, x2)[i - 1]
        return int(c)

    return IntCochain(2, ev, "carry-generator")


def cup_bb(i: int, j: int, rank: int) -> IntCochain:
    """Cup product (b_i ^ b_j)(x1..x4) = b_i(x1,x2) * b_j(x3,x4)."""
    bi = b_generator(i, rank)
    bj = b_generator(j, rank)
    return IntCochain(
        4,
        lambda x1, x2, x3, x4: bi(x1, x2) * bj(x3, x4),
        "cup-product",
    )


def section_coordinate_cochain(i: int, rank: int) -> PhaseCochain:
    """Arity-1 real cochain s(x)_i wrapped with its canonical lift.

    Its coboundary is exactly b_i; this is the defining property of the
    carry generators.
    """
    if not 1 <= i <= rank:
        raise PreconditionError(f"coordinate index {i} out of range 1..{rank}")
    expr = lambda x: x.coords[i - 1]
    return PhaseCochain(1, lambda x: Phase(2 * expr(x)), "section-coordinate", real_lift=expr)


def bockstein_lift(omega: PhaseCochain, normalized: bool = False) -> IntCochain:
    """Connecting homomorphism at the cochain level: the coboundary of the
    real lift of a 3-cocycle, an integer 4-cochain.

    Uses the cocycle's canonical lift when it has one (closed forms do);
    ``normalized=True`` forces the [0,1)-normalized lift of the bare phase
    values instead.  A non-integer boundary value raises, signalling a
    non-cocycle input.
    """
    if omega.arity != 3:
        raise PreconditionError("Bockstein lift expects an arity-3 cochain")

    lift = RawCochain(3, lambda *a: omega.lift_value(*a, normalized=normalized))

    def ev(x1, x2, x3, x4):
        value = boundary(lift, (x1, x2, x3, x4))
        if isinstance(value, Fraction) and value.denominator != 1:
            raise LiftConsistencyError(f"Bockstein boundary value {value} is not an integer")
        return int(value)

    return IntCochain(4, ev, "bockstein")


def gram_pairing_cochain(g: IntMatrix) -> IntCochain:
    """(1/2) sum_i G_ii b_i^b_i + sum_{i<j} G_ij b_i^b_j as an integer 4-cochain."""
    _require_even_symmetric(g)
    n = g.rows
    terms: List[Tuple[int, IntCochain]] = []
    for i in range(n):
        if g[i, i] != 0:
            terms.append((g[i, i] // 2, cup_bb(i + 1, i + 1, n)))
    for i in range(n):
        for j in range(i + 1, n):
            if g[i, j] != 0:
                terms.append((g[i, j], cup_bb(i + 1, j + 1, n)))

    def ev(*args):
        return sum(c * t(*args) for c, t in terms)

    return IntCochain(4, ev, "gram-pairing")


def carry_cochain(
    g1: IntMatrix, g2: IntMatrix, sign: Sign = Sign.MINUS, normalized: bool = False
) -> IntCochain:
    """kappa = lift(omega_{G1}) + lift(omega_{G2}) - lift(omega_{G1+G2}).

    Integer valued (asserted at every evaluation).  By construction the
    boundary of kappa measures the failure of additivity of the Bockstein
    lifts: d3(omega_{G1+G2}) = d3(omega_{G1}) + d3(omega_{G2}) - d(kappa).
    With the canonical closed-form lifts kappa vanishes identically; the
    normalized lifts give the nontrivial {0,1}-valued carries.
    """
    _require_even_symmetric(g1)
    _require_even_symmetric(g2)
    if g1.rows != g2.rows:
        raise PreconditionError("carry cochain needs Gram matrices of equal rank")
    w1 = omega_closed_form(g1, sign)
    w2 = omega_closed_form(g2, sign)
    w12 = omega_closed_form(g1 + g2, sign)

    def ev(x, y, z):
        value = (
            w1.lift_value(x, y, z, normalized=normalized)
            + w2.lift_value(x, y, z, normalized=normalized)
            - w12.lift_value(x, y, z, normalized=normalized)
        )
        if value.denominator != 1:
            raise LiftConsistencyError(f"carry cochain value {value} is not an integer")
        return int(value)

    return IntCochain(3, ev, "carry")


def bockstein_certificate(
    g: IntMatrix, sign: Sign = Sign.MINUS
) -> Tuple[IntCochain, List[Tuple[int, IntMatrix]]]:
    """Explicit eta with d3(omega_G) - c_G = boundary(eta) pointwise.

    eta is assembled by summing carry cochains along the generator
    decomposition of G: walk the signed unit steps of the expansion,
    adding carry_cochain(partial sum, step) at each step, plus the
    inversion carries for negative coefficients.  With canonical lifts
    every carry vanishes, so the certificate also witnesses that the
    Bockstein identity holds exactly, not just up to coboundary.

    The formal sum of carries is collapsed to one integer combination of
    lifts per distinct matrix before evaluation, which keeps the cochain
    cheap even for long expansions.
    """
    _require_even_symmetric(g)
    n = g.rows
    terms = decompose_even_symmetric(g)
    steps: List[Tuple[int, IntMatrix]] = []
    for c, lat in terms:
        unit = 1 if c > 0 else -1
        for _ in range(abs(c)):
            steps.append((unit, lat.gram))

    coeffs: dict = {}

    def add_lift(matrix: IntMatrix, c: int):
        key = matrix.entries
        coeffs[key] = coeffs.get(key, 0) + c

    def add_carry(m1: IntMatrix, m2: IntMatrix, c: int):
        # kappa(m1, m2) = lift(m1) + lift(m2) - lift(m1 + m2), times c
        add_lift(m1, c)
        add_lift(m2, c)
        add_lift(m1 + m2, -c)

    partial = IntMatrix.zero(n, n)
    for unit, gram in steps:
        signed = gram if unit > 0 else gram.scale(-1)
        if unit < 0:
            # lift of the negated generator: kappa(G_k, -G_k) corrects the sign
            add_carry(gram, gram.scale(-1), +1)
        add_carry(partial, signed, -1)
        partial = partial + signed
    assert partial.entries == g.entries

    lifts = [
        (c, omega_closed_form(IntMatrix(key), sign))
        for key, c in sorted(coeffs.items())
        if c != 0
    ]

    def ev(x, y, z):
        total = sum(c * w.lift_value(x, y, z) for c, w in lifts)
        if isinstance(total, Fraction):
            if total.denominator != 1:
                raise LiftConsistencyError(f"certificate value {total} is not an integer")
            total = total.numerator
        return int(total)

    eta = IntCochain(3, ev, "carry-sum")
    return eta, steps
