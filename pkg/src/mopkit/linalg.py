"""Small dense linear algebra in extended and exact precision.

LAPACK only accepts float32/float64, so the 80-bit ``numpy.longdouble`` path
(used to tame Hankel conditioning at moderate n) and the exact
``fractions.Fraction`` path (used for large-n zero studies with rational
moments) are implemented directly.  Matrices here are at most ~30 x 30, so
plain row-loop elimination is more than fast enough.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exceptions import NumericError

LD = np.longdouble


def lu_factor(a):
    """LU with partial pivoting in longdouble.

    Returns (lu, piv, parity): compact LU, pivot rows, and the permutation
    sign (+1/-1).
    """
    lu = np.array(a, dtype=LD, copy=True)
    n = lu.shape[0]
    if lu.shape != (n, n):
        raise NumericError("lu_factor expects a square matrix")
    piv = np.arange(n)
    parity = 1
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            piv[[k, p]] = piv[[p, k]]
            parity = -parity
        pivot = lu[k, k]
        if pivot == 0:
            continue
        lu[k + 1 :, k] /= pivot
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, piv, parity


def lu_det(lu, parity):
    return float(parity * np.prod(np.diagonal(lu)))


def lu_slogdet(lu, parity):
    """(sign, log|det|) from a longdouble LU."""
    d = np.diagonal(lu)
    sign = parity
    logabs = LD(0.0)
    for v in d:
        if v == 0:
            return 0, -np.inf
        if v < 0:
            sign = -sign
        logabs += np.log(np.abs(v))
    return sign, float(logabs)


def lu_solve(lu, piv, b):
    """Solve A x = b (b may be a vector or a matrix of columns)."""
    n = lu.shape[0]
    x = np.array(b, dtype=LD, copy=True)
    one_d = x.ndim == 1
    if one_d:
        x = x[:, None]
    x = x[piv]
    for k in range(n):  # forward, unit lower triangle
        x[k + 1 :] -= np.outer(lu[k + 1 :, k], x[k])
    for k in range(n - 1, -1, -1):  # backward
        if lu[k, k] == 0:
            raise NumericError("singular matrix in lu_solve")
        x[k] /= lu[k, k]
        x[:k] -= np.outer(lu[:k, k], x[k])
    return x[:, 0] if one_d else x


def solve(a, b):
    lu, piv, _ = lu_factor(a)
    return lu_solve(lu, piv, b)


def det(a):
    lu, _, parity = lu_factor(a)
    return lu_det(lu, parity)


def inverse(a):
    lu, piv, _ = lu_factor(a)
    return lu_solve(lu, piv, np.eye(a.shape[0], dtype=LD))


def cond1(a):
    """1-norm condition estimate via the explicit inverse (tiny matrices)."""
    a = np.asarray(a, dtype=LD)
    try:
        inv = inverse(a)
    except NumericError:
        return np.inf
    norm = np.abs(a).sum(axis=0).max()
    inorm = np.abs(inv).sum(axis=0).max()
    return float(norm * inorm)


def solve_pivoting(a, b, zero):
    """Gaussian elimination with partial pivoting over any exact-ish field.

    ``a`` is a list of row lists, ``b`` the right-hand side; elements need
    +, -, *, /, abs, and comparison with ``zero``.  Works for Fraction and
    for mpmath.mpf alike.
    """
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(m[r][k]))
        if m[p][k] == zero:
            raise NumericError("singular system in exact solve")
        if p != k:
            m[k], m[p] = m[p], m[k]
        for r in range(k + 1, n):
            if m[r][k] == zero:
                continue
            factor = m[r][k] / m[k][k]
            row_r, row_k = m[r], m[k]
            for c in range(k, n + 1):
                row_r[c] -= factor * row_k[c]
    x = [zero] * n
    for k in range(n - 1, -1, -1):
        acc = m[k][n]
        row = m[k]
        for c in range(k + 1, n):
            acc -= row[c] * x[c]
        x[k] = acc / row[k]
    return x


def solve_fractions(a, b):
    """Exact solve of A x = b over the rationals."""
    return solve_pivoting(a, b, Fraction(0))
