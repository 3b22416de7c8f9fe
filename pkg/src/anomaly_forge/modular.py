"""Linear algebra over Z/D with numpy int64, exactly.

All values live in [0, D); D is capped so that every intermediate
product fits in int64 with room to spare.  The three tools are the
incremental kernel of a constraint stream, a Howell-style echelon basis
of a row span with a greedy membership solver, and a Smith reduction of
a relation matrix that tracks the left transform mod D.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .exact_core import PreconditionError

MAX_MODULUS = 1 << 20


def _check_modulus(d: int):
    if d < 1 or d > MAX_MODULUS:
        raise PreconditionError(f"modulus {d} outside supported range 1..{MAX_MODULUS}")


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """g, u, w with u*a + w*b == g == gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def kernel_mod(
    constraints: Iterable[Tuple[Sequence[int], Sequence[int]]],
    nvars: int,
    modulus: int,
) -> np.ndarray:
    """Generators (rows) of {x in (Z/D)^nvars : c . x == 0 for every c}.

    Constraints stream in as (column indices, coefficients) pairs.  The
    generator matrix starts as the identity and each violated constraint
    is eliminated with a unit pivot when one exists, otherwise with a
    gcd-combined pivot row plus its annihilator.
    """
    _check_modulus(modulus)
    m = np.eye(nvars, dtype=np.int64)
    for cols, coefs in constraints:
        if m.shape[0] == 0:
            break
        v = (m[:, list(cols)] @ np.asarray(list(coefs), dtype=np.int64)) % modulus
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            continue
        unit = -1
        for i in nz:
            if gcd(int(v[i]), modulus) == 1:
                unit = int(i)
                break
        if unit >= 0:
            inv = pow(int(v[unit]), -1, modulus)
            mult = (v * inv) % modulus
            mult[unit] = 0
            m = (m - np.outer(mult, m[unit])) % modulus
            m = np.delete(m, unit, axis=0)
            continue
        i0 = int(nz[0])
        acc = m[i0].copy()
        accv = int(v[i0])
        for i in nz[1:]:
            g, u, w = xgcd(accv, int(v[i]))
            acc = ((u % modulus) * acc + (w % modulus) * m[i]) % modulus
            accv = g
        g2 = gcd(accv, modulus)
        if modulus // g2 > 1:
            t = pow((accv // g2) % (modulus // g2), -1, modulus // g2)
            acc = (t * acc) % modulus
        mult = np.zeros(m.shape[0], dtype=np.int64)
        mult[nz] = v[nz] // g2
        m = (m - np.outer(mult, acc)) % modulus
        ann = ((modulus // g2) * acc) % modulus
        if ann.any():
            m = np.vstack([m, ann])
        m = m[np.any(m, axis=1)]
    return m


def howell(m: np.ndarray, modulus: int) -> Tuple[np.ndarray, List[Tuple[int, int]]]:
    """Echelon basis of the row span over Z/D with the Howell property.

    Returns (H, pivots) where pivots lists (column, pivot value) with
    strictly increasing columns; pivot values divide D.  Membership of a
    vector in the span can then be decided greedily.
    """
    _check_modulus(modulus)
    pool = [row.copy() for row in (m % modulus) if row.any()]
    out: List[np.ndarray] = []
    pivots: List[Tuple[int, int]] = []
    ncols = m.shape[1]
    for col in range(ncols):
        hit = [r for r in pool if r[col]]
        rest = [r for r in pool if not r[col]]
        if not hit:
            pool = rest
            continue
        acc = hit[0].copy()
        accv = int(acc[col])
        for r in hit[1:]:
            g, u, w = xgcd(accv, int(r[col]))
            acc = ((u % modulus) * acc + (w % modulus) * r) % modulus
            accv = g
        g2 = gcd(accv, modulus)
        if modulus // g2 > 1:
            t = pow((accv // g2) % (modulus // g2), -1, modulus // g2)
            acc = (t * acc) % modulus
        for r in hit:
            q = int(r[col]) // g2
            r2 = (r - q * acc) % modulus
            if r2.any():
                rest.append(r2)
        ann = ((modulus // g2) * acc) % modulus
        if ann.any():
            rest.append(ann)
        for prev in out:
            q = int(prev[col]) // g2
            if q:
                prev -= q * acc
                prev %= modulus
        out.append(acc)
        pivots.append((col, g2))
        pool = rest
    h = np.array(out, dtype=np.int64) if out else np.zeros((0, ncols), dtype=np.int64)
    return h, pivots


def howell_solve(
    h: np.ndarray, pivots: List[Tuple[int, int]], modulus: int, x: np.ndarray
):
    """Coefficients c with c @ H == x mod D, or None if x is not in the span."""
    x = np.asarray(x, dtype=np.int64) % modulus
    c = np.zeros(h.shape[0], dtype=np.int64)
    for i, (col, piv) in enumerate(pivots):
        if x[col] % piv:
            return None
        q = int(x[col]) // piv
        c[i] = q % modulus
        x = (x - q * h[i]) % modulus
    return c if not x.any() else None


def smith_quotient(
    relations: np.ndarray, k: int, modulus: int
) -> Tuple[List[int], np.ndarray, np.ndarray]:
    """Invariant factors of Z^k / (colspan(relations) + D Z^k).

    Returns (diag, U, Uinv) where the quotient is the direct sum of
    Z/diag[i] in the coordinates y = U x, and Uinv carries component
    generators back; both transforms are tracked mod D, which is enough
    because the quotient is annihilated by D.
    """
    _check_modulus(modulus)
    d = modulus
    if relations.size:
        a = np.concatenate([relations % d, d * np.eye(k, dtype=np.int64)], axis=1)
    else:
        a = d * np.eye(k, dtype=np.int64)
    u = np.eye(k, dtype=np.int64)
    uinv = np.eye(k, dtype=np.int64)
    rows, cols = a.shape

    def swap_rows(i, j):
        a[[i, j]] = a[[j, i]]
        u[[i, j]] = u[[j, i]]
        uinv[:, [i, j]] = uinv[:, [j, i]]

    def addmul_row(i, j, q):
        # row_i -= q * row_j; entries of a stay reduced mod d
        a[i] = (a[i] - q * a[j]) % d
        u[i] = (u[i] - q * u[j]) % d
        uinv[:, j] = (uinv[:, j] + q * uinv[:, i]) % d

    t = 0
    while t < rows:
        sub = a[t:, t:]
        nzr, nzc = np.nonzero(sub)
        if nzr.size == 0:
            break
        vals = sub[nzr, nzc]
        # minimal nonzero value, ties by (row, col): deterministic
        order = np.lexsort((nzc, nzr, vals))
        bi, bj = int(nzr[order[0]]) + t, int(nzc[order[0]]) + t
        if bi != t:
            swap_rows(t, bi)
        if bj != t:
            a[:, [t, bj]] = a[:, [bj, t]]
        dirty = False
        for i in range(t + 1, rows):
            if a[i, t]:
                addmul_row(i, t, int(a[i, t]) // int(a[t, t]))
                if a[i, t]:
                    dirty = True
        piv = int(a[t, t])
        col_mask = np.nonzero(a[t, t + 1:])[0]
        for joff in col_mask:
            j = int(joff) + t + 1
            q = int(a[t, j]) // piv
            a[:, j] = (a[:, j] - q * a[:, t]) % d
            if a[t, j]:
                dirty = True
        if dirty:
            continue
        t += 1

    diag = [gcd(int(a[i, i]), d) if i < min(rows, cols) and a[i, i] else d for i in range(k)]
    # normalize the trailing block: a zero diagonal entry mod d means the
    # relation d * e_i alone survives there
    for i in range(k):
        if diag[i] == 0:
            diag[i] = d

    # enforce the divisibility chain with tracked 2x2 transforms
    changed = True
    while changed:
        changed = False
        for i in range(k - 1):
            x, y = diag[i], diag[i + 1]
            if y % x:
                g = gcd(x, y)
                l = gcd((x * y) // g, d)
                _, uu, ww = xgcd(x, y)
                p = np.array([[uu, ww], [-(y // g), x // g]], dtype=np.int64)
                pinv = np.array([[x // g, -ww], [y // g, uu]], dtype=np.int64)
                u[[i, i + 1]] = (p @ u[[i, i + 1]]) % d
                uinv[:, [i, i + 1]] = (uinv[:, [i, i + 1]] @ pinv) % d
                diag[i], diag[i + 1] = g, l
                changed = True
    return diag, u % d, uinv % d
