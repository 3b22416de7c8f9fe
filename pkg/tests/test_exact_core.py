from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anomaly_forge.exact_core import (
    IntMatrix,
    Phase,
    PreconditionError,
    is_positive_definite,
    phase_combine,
    smith_normal_form,
)
from anomaly_forge.sampling import SplitMix64

from oracle import brute_positive_on_box


def random_matrix(rng, rows, cols, lo=-9, hi=9):
    span = hi - lo + 1
    return IntMatrix.from_rows(
        [[lo + rng.next_below(span) for _ in range(cols)] for _ in range(rows)]
    )


def random_symmetric(rng, n, lo=-4, hi=4):
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = lo + rng.next_below(hi - lo + 1)
    return IntMatrix.from_rows(m)


# ---------------------------------------------------------------- SNF


def snf_diag(m):
    _, s, _ = smith_normal_form(m)
    return [s[i, i] for i in range(min(s.rows, s.cols))]


def test_snf_identity():
    assert snf_diag(IntMatrix.identity(2)) == [1, 1]


def test_snf_already_diagonal():
    assert snf_diag(IntMatrix.from_rows([[2]])) == [2]


def test_snf_a2_is_one_three():
    # hand row/column reduction: [[2,-1],[-1,2]] -> swap to pivot -1 -> diag(1,3)
    assert snf_diag(IntMatrix.from_rows([[2, -1], [-1, 2]])) == [1, 3]


def test_snf_round_trip_random():
    rng = SplitMix64(2024)
    for _ in range(120):
        rows = 1 + rng.next_below(4)
        cols = 1 + rng.next_below(4)
        m = random_matrix(rng, rows, cols)
        u, s, v = smith_normal_form(m)
        assert (u @ m @ v).entries == s.entries
        assert abs(u.det()) == 1
        assert abs(v.det()) == 1
        diag = [s[i, i] for i in range(min(rows, cols))]
        assert all(d >= 0 for d in diag)
        for a, b in zip(diag, diag[1:]):
            if a == 0:
                assert b == 0
            else:
                assert b % a == 0
        # off-diagonal must vanish
        for i in range(rows):
            for j in range(cols):
                if i != j:
                    assert s[i, j] == 0


# ------------------------------------------------- positive definiteness


def test_posdef_a2():
    assert is_positive_definite(IntMatrix.from_rows([[2, -1], [-1, 2]]))


def test_posdef_zero_leading_minor():
    assert not is_positive_definite(IntMatrix.from_rows([[0, 1], [1, 0]]))


def test_posdef_rank_one():
    assert is_positive_definite(IntMatrix.from_rows([[2]]))


def test_posdef_rejects_asymmetric():
    with pytest.raises(PreconditionError):
        is_positive_definite(IntMatrix.from_rows([[1, 2], [0, 1]]))


def test_posdef_matches_brute_force():
    rng = SplitMix64(7)
    checked_definite = checked_indefinite = 0
    for _ in range(150):
        n = 2 + rng.next_below(2)
        m = random_symmetric(rng, n)
        fast = is_positive_definite(m)
        slow = brute_positive_on_box(m, box=3)
        assert fast == slow, (m.entries, fast, slow)
        if fast:
            checked_definite += 1
        else:
            checked_indefinite += 1
    assert checked_definite > 0 and checked_indefinite > 0


# ---------------------------------------------------------------- Phase

rationals = st.fractions(
    min_value=-8, max_value=8, max_denominator=48
)


@given(rationals, rationals, rationals)
@settings(max_examples=200, deadline=None)
def test_phase_group_laws(a, b, c):
    pa, pb, pc = Phase(a), Phase(b), Phase(c)
    assert ((pa * pb) * pc).exponent == (pa * (pb * pc)).exponent
    assert (pa * Phase.one()).exponent == pa.exponent
    assert (pa * pa.inverse()).is_one()
    assert Phase(pa.exponent).exponent == pa.exponent  # normalization idempotent
    assert 0 <= pa.exponent < 2


def test_phase_combine_square_of_minus_one():
    assert phase_combine([(Phase(Fraction(1)), 2)]).is_one()


def test_phase_combine_empty():
    assert phase_combine([]).is_one()


def test_phase_combine_inverse_pair():
    assert phase_combine(
        [(Phase(Fraction(1, 2)), 1), (Phase(Fraction(3, 2)), 1)]
    ).is_one()


def test_phase_powers():
    p = Phase(Fraction(1, 3))
    assert (p ** 6).is_one()
    assert (p ** -1).exponent == Fraction(5, 3)
