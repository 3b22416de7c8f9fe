from fractions import Fraction

import pytest

from anomaly_forge.exact_core import (
    DegenerateLatticeError,
    EvennessError,
    IntMatrix,
    is_positive_definite,
)
from anomaly_forge.lattice import (
    BilinearTwoCocycle,
    EvenLattice,
    decompose_even_symmetric,
    discriminant_group,
    dual_basis,
    resum,
    two_cocycle,
    verify_two_cocycle,
)
from anomaly_forge.sampling import SplitMix64

from oracle import adjugate_inverse

A2 = IntMatrix.from_rows([[2, -1], [-1, 2]])
G2 = IntMatrix.from_rows([[2]])


def random_even_symmetric(rng, n, lo=-8, hi=8):
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = lo + rng.next_below(hi - lo + 1)
            if i == j:
                v -= v % 2
            m[i][j] = m[j][i] = v
    return IntMatrix.from_rows(m)


def random_even_positive(rng, n):
    # diagonally dominant even symmetric matrices are positive definite
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            m[i][j] = m[j][i] = -2 + rng.next_below(5)
    for i in range(n):
        off = sum(abs(m[i][j]) for j in range(n) if j != i)
        m[i][i] = 2 * (off + 1 + rng.next_below(3))
    g = IntMatrix.from_rows(m)
    assert is_positive_definite(g)
    return g


# ------------------------------------------------------------ validity


def test_even_lattice_rejects_odd_diagonal():
    with pytest.raises(EvennessError):
        EvenLattice(IntMatrix.from_rows([[1]]))


def test_even_lattice_rejects_asymmetric():
    with pytest.raises(Exception):
        EvenLattice(IntMatrix.from_rows([[2, 1], [0, 2]]))


# ---------------------------------------------------------- dual basis


def test_dual_rank_one():
    assert dual_basis(EvenLattice(G2)) == ((Fraction(1, 2),),)


def test_dual_diagonal():
    d = dual_basis(EvenLattice(IntMatrix.from_rows([[2, 0], [0, 2]])))
    assert d == ((Fraction(1, 2), Fraction(0)), (Fraction(0), Fraction(1, 2)))


def test_dual_a2_matches_adjugate_oracle():
    assert dual_basis(EvenLattice(A2)) == adjugate_inverse(A2)


def test_dual_degenerate_raises():
    with pytest.raises(DegenerateLatticeError):
        dual_basis(EvenLattice(IntMatrix.from_rows([[2, 2], [2, 2]])))


# ------------------------------------------------------- discriminants


def test_discriminant_rank_one():
    disc = discriminant_group(EvenLattice(G2))
    assert disc.group.invariant_factors == (2,)
    assert set(disc.representatives) == {(Fraction(0),), (Fraction(1, 2),)}


def test_discriminant_a2():
    disc = discriminant_group(EvenLattice(A2))
    assert disc.group.invariant_factors == (3,)
    assert disc.order == 3
    assert set(disc.representatives) == {
        (Fraction(0), Fraction(0)),
        (Fraction(1, 3), Fraction(2, 3)),
        (Fraction(2, 3), Fraction(1, 3)),
    }


def test_discriminant_two_by_two():
    disc = discriminant_group(EvenLattice(IntMatrix.from_rows([[2, 0], [0, 2]])))
    assert disc.group.invariant_factors == (2, 2)
    assert disc.order == 4


def test_discriminant_order_is_abs_det_random():
    rng = SplitMix64(5)
    for _ in range(25):
        n = 1 + rng.next_below(4)
        g = random_even_positive(rng, n)
        disc = discriminant_group(EvenLattice(g))
        assert disc.order == abs(g.det())
        assert len(disc.representatives) == disc.order


def test_representatives_form_transversal():
    rng = SplitMix64(6)
    disc = discriminant_group(EvenLattice(A2))
    reps = disc.representatives
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            diff = [a - b for a, b in zip(reps[i], reps[j])]
            assert any(Fraction(x).denominator != 1 for x in diff)
    # adding a lattice vector and reducing mod 1 reproduces a listed point
    for rep in reps:
        shifted = tuple((c + 3) % 1 for c in rep)
        assert shifted in reps


def test_representative_lookup_by_coordinates():
    disc = discriminant_group(EvenLattice(A2))
    for coords, rep in zip(disc.coordinates, disc.representatives):
        assert disc.representative_of(coords) == rep
    # coordinates reduce mod the invariant factors
    assert disc.representative_of((4,)) == disc.representative_of((1,))


def test_representatives_pair_integrally():
    disc = discriminant_group(EvenLattice(A2))
    for rep in disc.representatives:
        image = A2.mat_vec(rep)
        assert all(Fraction(v).denominator == 1 for v in image)


# -------------------------------------------------------- two-cocycles


def test_std_cocycle_values_on_a2():
    b = two_cocycle(EvenLattice(A2), "std")
    assert b.value((1, 0), (0, 1)).as_sign() == -1
    assert b.value((0, 1), (1, 0)).is_one()
    assert b.value((1, 0), (1, 0)).is_one()
    assert b.value((0, 1), (0, 1)).is_one()


def test_kac_cocycle_diagonal():
    b = two_cocycle(EvenLattice(G2), "kac")
    assert b.value((1,), (1,)).as_sign() == -1


def test_verify_std_a2():
    lat = EvenLattice(A2)
    assert verify_two_cocycle(two_cocycle(lat, "std"), lat).ok


def test_verify_kac_rank_one():
    lat = EvenLattice(G2)
    assert verify_two_cocycle(two_cocycle(lat, "kac"), lat).ok


def test_verify_both_variants_random():
    rng = SplitMix64(11)
    for _ in range(12):
        n = 1 + rng.next_below(4)
        lat = EvenLattice(random_even_symmetric(rng, n, -4, 4))
        for variant in ("std", "kac"):
            assert verify_two_cocycle(two_cocycle(lat, variant), lat, seed=3).ok


def test_all_ones_cocycle_fails_commutator_on_a2():
    # symmetric exponent matrix cannot reproduce the odd pairing <e1,e2> = -1
    bad = BilinearTwoCocycle(IntMatrix.from_rows([[1, 1], [1, 1]]), "std")
    report = verify_two_cocycle(bad, EvenLattice(A2))
    assert not report.ok
    assert report.counterexample["identity"] == "commutator"


def test_all_ones_cocycle_passes_on_diagonal_gram():
    # with gram diag(2,2) both sides of the commutator rule are +1 everywhere,
    # so the all-ones exponent matrix is a valid (if unusual) cocycle there
    bad = BilinearTwoCocycle(IntMatrix.from_rows([[1, 1], [1, 1]]), "std")
    lat = EvenLattice(IntMatrix.from_rows([[2, 0], [0, 2]]))
    assert verify_two_cocycle(bad, lat).ok


# -------------------------------------------------------- decomposition


def test_decompose_a2_single_term():
    terms = decompose_even_symmetric(A2)
    assert len(terms) == 1
    coeff, lat = terms[0]
    assert coeff == 1
    assert lat.gram.entries == A2.entries


def test_decompose_zero_is_empty():
    assert decompose_even_symmetric(IntMatrix.from_rows([[0, 0], [0, 0]])) == []


def test_decompose_hyperbolic_plane():
    h = IntMatrix.from_rows([[0, 1], [1, 0]])
    terms = decompose_even_symmetric(h)
    assert resum(terms, 2).entries == h.entries
    for c, lat in terms:
        assert c != 0
        assert is_positive_definite(lat.gram)
        assert lat.gram.has_even_diagonal()


def test_decompose_rejects_odd_diagonal():
    with pytest.raises(EvennessError):
        decompose_even_symmetric(IntMatrix.from_rows([[1]]))


def test_decompose_random_resums_exactly():
    rng = SplitMix64(13)
    for _ in range(60):
        n = 1 + rng.next_below(6)
        h = random_even_symmetric(rng, n)
        terms = decompose_even_symmetric(h)
        assert resum(terms, n).entries == h.entries
        for c, lat in terms:
            assert c != 0
            assert is_positive_definite(lat.gram)
            assert lat.gram.has_even_diagonal()
