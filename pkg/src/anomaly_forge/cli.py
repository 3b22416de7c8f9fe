"""Command-line front door.

    anomaly-forge <command> --gram <file|inline-json> [options]

Commands: analyze, verify, decompose, restrict, classify, selftest.
Reports are deterministic: identical jobs (including the seed) produce
byte-identical JSON.  Exit codes: 0 all checks passed, 1 a check failed,
2 usage or schema error, 3 mathematical precondition violated.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .exact_core import (
    EvennessError,
    IntMatrix,
    Phase,
    PreconditionError,
    is_positive_definite,
)
from .finite_cohomology import (
    FiniteAbelianGroup,
    classify as classify_cochain,
    fs_indicator,
    h_three,
    pentagon_check,
    restrict_to_discriminant,
)
from .lattice import (
    EvenLattice,
    decompose_even_symmetric,
    discriminant_group,
    dual_basis,
    resum,
    two_cocycle,
    verify_two_cocycle,
)
from .sampling import DEFAULT_DENOMINATORS, SplitMix64, sample_coords
from .torus_cocycle import (
    PhaseCochain,
    SectionMap,
    Sign,
    TorusPoint,
    bockstein_certificate,
    bockstein_lift,
    boundary,
    braiding_phase,
    carry_cochain,
    cup_bb,
    gram_pairing_cochain,
    jones_cochain,
    omega_closed_form,
    omega_one_dim,
)

USAGE_EXIT = 2
DOMAIN_EXIT = 3
CHECK_FAIL_EXIT = 1

COMMANDS = ("analyze", "verify", "decompose", "restrict", "classify", "selftest")


class UsageError(Exception):
    pass


@dataclass
class JobSpec:
    command: str
    gram: Optional[List[List[int]]] = None
    variant: str = "std"
    sign: str = "minus"
    seed: int = 0
    samples: int = 200
    denominators: List[int] = field(default_factory=lambda: list(DEFAULT_DENOMINATORS))
    format: str = "json"

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.variant not in ("std", "kac"):
            raise UsageError("variant must be std or kac")
        if self.sign not in ("plus", "minus"):
            raise UsageError("sign must be plus or minus")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.samples < 1:
            raise UsageError("samples must be positive")
        if not self.denominators or any(d < 2 for d in self.denominators):
            raise UsageError("denominators must all be >= 2")
        if self.format not in ("json", "markdown"):
            raise UsageError("format must be json or markdown")
        if self.command != "selftest" and self.gram is None:
            raise UsageError(f"command {self.command!r} requires --gram")


def rational_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def phase_str(p: Phase) -> str:
    return rational_str(p.exponent)


def parse_lattice(gram_arg: str) -> EvenLattice:
    """Load a lattice from inline JSON or a JSON file with key "gram"."""
    text = gram_arg
    if not gram_arg.lstrip().startswith(("{", "[")):
        if not os.path.exists(gram_arg):
            raise UsageError(f"gram file {gram_arg!r} not found")
        with open(gram_arg, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"gram input is not valid JSON: {exc}") from exc
    if isinstance(data, list):
        data = {"gram": data}
    if not isinstance(data, dict) or "gram" not in data:
        raise UsageError('gram JSON must be an object with a "gram" key')
    rows = data["gram"]
    if (
        not isinstance(rows, list)
        or not rows
        or not all(isinstance(r, list) and r for r in rows)
        or not all(isinstance(x, int) and not isinstance(x, bool) for r in rows for x in r)
    ):
        raise UsageError("gram must be a non-empty array of arrays of integers")
    matrix = IntMatrix.from_rows(rows)
    if not matrix.is_square() or not matrix.is_symmetric():
        raise PreconditionError("rejected: Gram matrix must be square and symmetric")
    if not matrix.has_even_diagonal():
        raise EvennessError("rejected: Gram matrix diagonal must be even")
    return EvenLattice(matrix)


@dataclass
class Check:
    name: str
    passed: bool
    detail: Optional[dict] = None

    def as_dict(self):
        out = {"name": self.name, "passed": self.passed}
        if self.detail is not None:
            out["detail"] = self.detail
        return out


def _sign(job: JobSpec) -> Sign:
    return Sign.MINUS if job.sign == "minus" else Sign.PLUS


def _sample_points(rng: SplitMix64, rank: int, count: int, denominators, arity: int):
    for _ in range(count):
        yield tuple(TorusPoint(sample_coords(rng, rank, denominators)) for _ in range(arity))


def _pt_strs(pts) -> list:
    return [[rational_str(c) for c in p.coords] for p in pts]


def run_analyze(job: JobSpec, checks: List[Check], artifacts: dict):
    lat = parse_lattice_from_job(job)
    g = lat.gram
    artifacts["rank"] = lat.rank
    artifacts["determinant"] = g.det()
    artifacts["even"] = True
    artifacts["positive_definite"] = is_positive_definite(g)
    inv = dual_basis(lat)
    artifacts["dual_basis"] = [[rational_str(x) for x in row] for row in inv]
    disc = discriminant_group(lat)
    artifacts["discriminant"] = {
        "invariant_factors": list(disc.group.invariant_factors),
        "order": disc.order,
        "representatives": [[rational_str(c) for c in rep] for rep in disc.representatives],
    }
    ident = [
        [sum(inv[i][k] * g[k, j] for k in range(lat.rank)) for j in range(lat.rank)]
        for i in range(lat.rank)
    ]
    checks.append(Check("dual_basis_inverts_gram", all(
        ident[i][j] == (1 if i == j else 0) for i in range(lat.rank) for j in range(lat.rank)
    )))
    checks.append(Check("discriminant_order_is_abs_det", disc.order == abs(g.det())))
    checks.append(Check(
        "representatives_pair_integrally",
        all(
            all(Fraction(v).denominator == 1 for v in g.mat_vec(rep))
            for rep in disc.representatives
        ),
    ))


def run_verify(job: JobSpec, checks: List[Check], artifacts: dict):
    lat = parse_lattice_from_job(job)
    g = lat.gram
    sign = _sign(job)
    rank = lat.rank
    dens = job.denominators
    omega = omega_closed_form(g, sign)
    rng = SplitMix64(job.seed)

    cocycle = two_cocycle(lat, job.variant)
    rep = verify_two_cocycle(cocycle, lat, samples=max(32, job.samples // 4), seed=job.seed)
    checks.append(Check(f"two_cocycle_{job.variant}", rep.ok, rep.counterexample))

    bad = None
    for pts in _sample_points(rng.split(1), rank, job.samples, dens, 4):
        if not boundary(omega, pts).is_one():
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("cocycle_law", bad is None, bad))

    omega2 = omega_closed_form(g.scale(2), sign)
    bad = None
    for pts in _sample_points(rng.split(2), rank, job.samples, dens, 3):
        x, y, z = pts
        if (omega(x, y, z) * omega(x, y, z)).exponent != omega2(x, y, z).exponent:
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("multiplicativity", bad is None, bad))

    assembled = jones_cochain(lat, sign, "std")
    bad = None
    for pts in _sample_points(rng.split(3), rank, job.samples, dens, 3):
        if assembled(*pts).exponent != omega(*pts).exponent:
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("assembler_agreement", bad is None, bad))

    bad = None
    for pts in _sample_points(rng.split(4), rank, job.samples, dens, 3):
        p, q, r = pts
        # charge vectors add in Q^n, not on the torus
        total = braiding_phase(
            tuple(a + b for a, b in zip(p.coords, q.coords)), r.coords, g
        )
        prod = braiding_phase(p.coords, r.coords, g) * braiding_phase(q.coords, r.coords, g)
        if total.exponent != prod.exponent:
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("braiding_bilinearity", bad is None, bad))

    lift = bockstein_lift(omega)
    pairing = gram_pairing_cochain(g)
    mult = sign.exponent_multiplier
    bad = None
    for pts in _sample_points(rng.split(5), rank, job.samples, dens, 4):
        if lift(*pts) != mult * pairing(*pts):
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("bockstein_pointwise", bad is None, bad))

    eta, steps = bockstein_certificate(g, sign)
    artifacts["certificate_steps"] = len(steps)
    bad = None
    eta_samples = []
    for pts in _sample_points(rng.split(6), rank, max(50, job.samples // 4), dens, 4):
        lhs = lift(*pts) - mult * pairing(*pts)
        if lhs != boundary(eta, pts):
            bad = {"points": _pt_strs(pts)}
            break
        if len(eta_samples) < 5:
            eta_samples.append(eta(*pts[:3]))
    artifacts["certificate_sample_values"] = eta_samples
    checks.append(Check("bockstein_certificate", bad is None, bad))

    other = IntMatrix.identity(rank).scale(2)
    kappa = carry_cochain(g, other, sign, normalized=True)
    la = bockstein_lift(omega_closed_form(g, sign), normalized=True)
    lb = bockstein_lift(omega_closed_form(other, sign), normalized=True)
    lab = bockstein_lift(omega_closed_form(g + other, sign), normalized=True)
    bad = None
    nontrivial = 0
    for pts in _sample_points(rng.split(7), rank, max(50, job.samples // 4), dens, 4):
        if lab(*pts) != la(*pts) + lb(*pts) - boundary(kappa, pts):
            bad = {"points": _pt_strs(pts)}
            break
        if kappa(*pts[:3]) != 0:
            nontrivial += 1
    artifacts["normalized_carry_nonzero_samples"] = nontrivial
    checks.append(Check("carry_additivity_normalized", bad is None, bad))

    two_cochain = PhaseCochain(
        2, lambda x, y: braiding_phase(x.coords, y.coords, g), "bilinear"
    )
    d2 = PhaseCochain(3, lambda *a: boundary(two_cochain, a), "boundary")
    bad = None
    for pts in _sample_points(rng.split(8), rank, max(50, job.samples // 4), dens, 4):
        if not boundary(d2, pts).is_one():
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("boundary_of_boundary_trivial", bad is None, bad))


def run_decompose(job: JobSpec, checks: List[Check], artifacts: dict):
    lat = parse_lattice_from_job(job)
    terms = decompose_even_symmetric(lat.gram)
    artifacts["terms"] = [
        {"coefficient": c, "gram": [list(r) for r in t.gram.entries]} for c, t in terms
    ]
    total = resum(terms, lat.rank)
    checks.append(Check("resums_to_input", total.entries == lat.gram.entries))
    checks.append(Check(
        "terms_positive_definite", all(is_positive_definite(t.gram) for _, t in terms)
    ))
    checks.append(Check(
        "terms_even", all(t.gram.has_even_diagonal() for _, t in terms)
    ))


def run_restrict(job: JobSpec, checks: List[Check], artifacts: dict):
    lat = parse_lattice_from_job(job)
    cochain, disc = restrict_to_discriminant(lat, _sign(job))
    artifacts["group"] = {
        "invariant_factors": list(cochain.group.invariant_factors),
        "order": disc.order,
    }
    artifacts["representatives"] = [
        [rational_str(c) for c in rep] for rep in disc.representatives
    ]
    artifacts["table_denominator"] = cochain.denominator
    elems = cochain.group.elements()
    artifacts["table"] = [
        {
            "args": [list(a), list(b), list(c)],
            "exponent": rational_str(cochain.value(a, b, c)),
        }
        for a in elems
        for b in elems
        for c in elems
    ]
    ok, witness = pentagon_check(cochain.group, cochain)
    checks.append(Check("pentagon", ok, None if ok else {"witness": [list(w) for w in witness]}))


def run_classify(job: JobSpec, checks: List[Check], artifacts: dict):
    lat = parse_lattice_from_job(job)
    sign = _sign(job)
    cochain, disc = restrict_to_discriminant(lat, sign)
    pres = h_three(cochain.group)
    artifacts["h3_invariant_factors"] = list(pres.invariant_factors)
    artifacts["coefficient_modulus"] = pres.modulus
    cls = classify_cochain(cochain, pres)
    artifacts["class_coordinates"] = list(cls.coordinates)
    artifacts["class_order"] = cls.order()
    checks.append(Check("restriction_is_cocycle", True))

    # stability: shifting the section by integers must not move the class
    def shift(x: TorusPoint) -> Tuple[int, ...]:
        return tuple(1 if c != 0 else 0 for c in x.coords)

    shifted = SectionMap(lat.rank, shift=shift)
    cochain2, _ = restrict_to_discriminant(lat, sign, section_map=shifted, disc=disc)
    cls2 = classify_cochain(cochain2, pres)
    checks.append(Check(
        "section_stability",
        cls2.coordinates == cls.coordinates,
        None if cls2.coordinates == cls.coordinates else {
            "default": list(cls.coordinates), "shifted": list(cls2.coordinates)
        },
    ))


def run_selftest(job: JobSpec, checks: List[Check], artifacts: dict):
    half = Fraction(1, 2)
    a2 = IntMatrix.from_rows([[2, -1], [-1, 2]])
    g2 = IntMatrix.from_rows([[2]])
    q = TorusPoint((half,))

    omega = omega_closed_form(g2)
    checks.append(Check("omega_qqq_is_minus_one", omega(q, q, q).as_sign() == -1))
    checks.append(Check("omega_one_dim_qqq_is_minus_one", omega_one_dim(1)(q, q, q).as_sign() == -1))
    checks.append(Check("omega_vanishes_at_zero", omega_closed_form(a2)(
        TorusPoint.zero(2), TorusPoint((half, half)), TorusPoint((Fraction(1, 3), half))
    ).is_one()))

    checks.append(Check("selfbraid_unit_charges", braiding_phase(
        (Fraction(1),), (Fraction(1),), IntMatrix.from_rows([[1]])
    ).as_sign() == -1))

    lat_a2 = EvenLattice(a2)
    b_std = two_cocycle(lat_a2, "std")
    checks.append(Check("std_cocycle_off_diagonal", b_std.value((1, 0), (0, 1)).as_sign() == -1))
    checks.append(Check("std_cocycle_lower_triangle", b_std.value((0, 1), (1, 0)).is_one()))
    checks.append(Check("std_cocycle_diagonal", b_std.value((1, 0), (1, 0)).is_one()))
    b_kac = two_cocycle(EvenLattice(g2), "kac")
    checks.append(Check("kac_cocycle_diagonal", b_kac.value((1,), (1,)).as_sign() == -1))
    checks.append(Check("std_cocycle_verifies_a2", verify_two_cocycle(b_std, lat_a2).ok))

    checks.append(Check("a2_positive_definite", is_positive_definite(a2)))
    inv = dual_basis(EvenLattice(g2))
    checks.append(Check("dual_basis_halves", inv[0][0] == half))
    for n, name in ((1, "z2"), (2, "z4"), (3, "z6")):
        disc = discriminant_group(EvenLattice(IntMatrix.from_rows([[2 * n]])))
        checks.append(Check(
            f"discriminant_2n_{name}",
            disc.group.invariant_factors == (2 * n,) and disc.order == 2 * n,
        ))
    disc2 = discriminant_group(EvenLattice(g2))
    checks.append(Check(
        "discriminant_sqrt2_reps",
        set(disc2.representatives) == {(Fraction(0),), (half,)},
    ))

    rng = SplitMix64(job.seed)
    om_a2 = omega_closed_form(a2)
    bad = None
    for pts in _sample_points(rng.split(10), 2, 100, job.denominators, 4):
        if not boundary(om_a2, pts).is_one():
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("cocycle_law_a2", bad is None, bad))

    om1 = omega_one_dim(1)
    om2 = omega_one_dim(2)
    bad = None
    for pts in _sample_points(rng.split(13), 1, 60, job.denominators, 3):
        if (om1(*pts) * om1(*pts)).exponent != om2(*pts).exponent:
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("one_dim_levels_multiply", bad is None, bad))

    two_cochain = PhaseCochain(
        2, lambda x, y: braiding_phase(x.coords, y.coords, a2), "bilinear"
    )
    d2 = PhaseCochain(3, lambda *a: boundary(two_cochain, a), "boundary")
    bad = None
    for pts in _sample_points(rng.split(14), 2, 40, job.denominators, 4):
        if not boundary(d2, pts).is_one():
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("boundary_squared_trivial", bad is None, bad))

    lift1 = bockstein_lift(om1)
    cup = gram_pairing_cochain(g2)
    bad = None
    for pts in _sample_points(rng.split(11), 1, 100, job.denominators, 4):
        if lift1(*pts) != cup(*pts):
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("bockstein_rank1", bad is None, bad))

    cup_a2_by_hand = (
        cup_bb(1, 1, 2) + cup_bb(2, 2, 2) + cup_bb(1, 2, 2).scale(-1)
    )
    pairing_a2 = gram_pairing_cochain(a2)
    bad = None
    for pts in _sample_points(rng.split(15), 2, 60, job.denominators, 4):
        if pairing_a2(*pts) != cup_a2_by_hand(*pts):
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("gram_pairing_a2_display", bad is None, bad))

    lift_a2 = bockstein_lift(omega_closed_form(a2))
    cup_a2 = gram_pairing_cochain(a2)
    bad = None
    for pts in _sample_points(rng.split(12), 2, 100, job.denominators, 4):
        if lift_a2(*pts) != cup_a2(*pts):
            bad = {"points": _pt_strs(pts)}
            break
    checks.append(Check("bockstein_a2", bad is None, bad))

    pres2 = h_three(FiniteAbelianGroup((2,)))
    checks.append(Check("h3_z2", pres2.invariant_factors == (2,)))
    pres3 = h_three(FiniteAbelianGroup((3,)))
    checks.append(Check("h3_z3", pres3.invariant_factors == (3,)))

    coch, _ = restrict_to_discriminant(EvenLattice(g2))
    cls = classify_cochain(coch, pres2)
    checks.append(Check("sqrt2_class_is_generator", cls.coordinates == (1,) and cls.order() == 2))
    checks.append(Check("trivial_class_is_zero", classify_cochain(
        coch.multiply(coch), pres2
    ).is_zero()))
    ok, _w = pentagon_check(coch.group, coch)
    checks.append(Check("pentagon_restricted_sqrt2", ok))
    checks.append(Check("fs_indicator_sqrt2", fs_indicator(coch, (1,)) == -1))
    checks.append(Check(
        "restricted_sqrt2_exponent_half", coch.value((1,), (1,), (1,)) == Fraction(1, 2)
    ))

    artifacts["pinned_reference_checks"] = len(checks)


def parse_lattice_from_job(job: JobSpec) -> EvenLattice:
    assert job.gram is not None
    return parse_lattice(json.dumps({"gram": job.gram}))


RUNNERS = {
    "analyze": run_analyze,
    "verify": run_verify,
    "decompose": run_decompose,
    "restrict": run_restrict,
    "classify": run_classify,
    "selftest": run_selftest,
}


def run(job: JobSpec) -> dict:
    """Execute a job and return the Report as a plain dict."""
    job.validate()
    checks: List[Check] = []
    artifacts: dict = {}
    RUNNERS[job.command](job, checks, artifacts)
    report = {
        "tool": {"name": "anomaly-forge", "version": __version__},
        "job": {
            "command": job.command,
            "gram": job.gram,
            "variant": job.variant,
            "sign": job.sign,
            "seed": job.seed,
            "samples": job.samples,
            "denominators": list(job.denominators),
            "format": job.format,
        },
        "exact_arithmetic": True,
        "checks": [c.as_dict() for c in checks],
        "all_passed": all(c.passed for c in checks),
        "artifacts": artifacts,
    }
    return report


def render_markdown(report: dict) -> str:
    lines = [f"# anomaly-forge {report['job']['command']} report", ""]
    lines.append(f"- tool version: {report['tool']['version']}")
    lines.append(f"- exact arithmetic: {report['exact_arithmetic']}")
    job = report["job"]
    lines.append(
        f"- job: variant={job['variant']} sign={job['sign']} seed={job['seed']} "
        f"samples={job['samples']}"
    )
    if job["gram"] is not None:
        lines.append(f"- gram: {job['gram']}")
    lines.append("")
    lines.append("## Checks")
    lines.append("")
    for check in report["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        lines.append(f"- [{status}] {check['name']}")
        if not check["passed"] and check.get("detail"):
            lines.append(f"  - counterexample: {json.dumps(check['detail'], sort_keys=True)}")
    lines.append("")
    if report["artifacts"]:
        lines.append("## Artifacts")
        lines.append("")
        lines.append("```json")
        lines.append(json.dumps(report["artifacts"], indent=2, sort_keys=True))
        lines.append("```")
        lines.append("")
    lines.append(f"Overall: {'PASS' if report['all_passed'] else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render(report: dict) -> str:
    if report["job"]["format"] == "markdown":
        return render_markdown(report)
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anomaly-forge",
        description="Exact even-lattice anomaly cocycle toolkit",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--gram", help="Gram matrix: JSON file path or inline JSON")
    parser.add_argument("--variant", default="std", choices=["std", "kac"])
    parser.add_argument("--sign", default="minus", choices=["plus", "minus"])
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument(
        "--denominators",
        default=",".join(str(d) for d in DEFAULT_DENOMINATORS),
        help="comma-separated coordinate denominators for sampling",
    )
    parser.add_argument("--format", default="json", choices=["json", "markdown"])
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    try:
        denominators = [int(x) for x in str(ns.denominators).split(",") if x.strip()]
    except ValueError:
        print("error: denominators must be a comma-separated integer list", file=sys.stderr)
        return USAGE_EXIT
    gram = None
    try:
        if ns.gram is not None:
            gram = [list(r) for r in parse_lattice(ns.gram).gram.entries]
        job = JobSpec(
            command=ns.command,
            gram=gram,
            variant=ns.variant,
            sign=ns.sign,
            seed=ns.seed,
            samples=ns.samples,
            denominators=denominators,
            format=ns.format,
        )
        report = run(job)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except PreconditionError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT
    sys.stdout.write(render(report))
    return 0 if report["all_passed"] else CHECK_FAIL_EXIT


if __name__ == "__main__":
    sys.exit(main())
