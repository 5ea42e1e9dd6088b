"""Exact matrix algebra over the integers and rationals.

All routines use arbitrary-precision Python ints / ``fractions.Fraction`` so no
intermediate result is ever rounded.  Matrices are lists of row lists; numpy
arrays (``dtype=object`` or integer dtypes) are accepted and converted.

The integer normal forms implemented here (Hermite, Smith) return transform
matrices, which the callers need (e.g. discriminant-group generators);
rank-deficient and non-square inputs are supported.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

Mat = "list[list[int]]"


def to_rows(A) -> list[list[int]]:
    """Copy matrix-like input into a list of rows of Python ints."""
    return [[int(x) for x in row] for row in A]


def identity_rows(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul_rows(A, B) -> list[list[int]]:
    """Exact product of integer matrices given as row lists."""
    n, k = len(A), len(B)
    assert k == len(A[0]) if A else True
    m = len(B[0]) if B else 0
    Bc = [[B[i][j] for i in range(k)] for j in range(m)]  # columns of B
    return [[sum(ra[t] * cb[t] for t in range(k)) for cb in Bc] for ra in A]


def transpose_rows(A) -> list[list[int]]:
    return [list(col) for col in zip(*A)]


def det_bareiss(A) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = to_rows(A)
    n = len(M)
    if n == 0:
        return 1
    assert all(len(r) == n for r in M), "determinant needs a square matrix"
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (pk * M[i][j] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = pk
    return sign * M[n - 1][n - 1]


def leading_minors(A) -> list[int]:
    """Leading principal minors det(A[:k,:k]) for k = 1..n."""
    M = to_rows(A)
    return [det_bareiss([row[: k + 1] for row in M[: k + 1]]) for k in range(len(M))]


def is_positive_definite(A) -> bool:
    return all(m > 0 for m in leading_minors(A))


def inverse_frac(A) -> tuple[list[list[int]], int]:
    """Return (M, d) with A^{-1} = M/d exactly; d = det(A) (nonzero).

    Computed by Gauss-Jordan over Fraction, then rescaled to a single integer
    denominator.
    """
    n = len(A)
    W = [[Fraction(int(A[i][j])) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if W[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        W[col], W[piv] = W[piv], W[col]
        pv = W[col][col]
        W[col] = [x / pv for x in W[col]]
        for r in range(n):
            if r != col and W[r][col] != 0:
                f = W[r][col]
                W[r] = [x - f * y for x, y in zip(W[r], W[col])]
    d = det_bareiss(A)
    M = [[W[i][n + j] * d for j in range(n)] for i in range(n)]
    assert all(x.denominator == 1 for row in M for x in row)
    return [[int(x) for x in row] for row in M], d


def hnf_rows(A) -> list[list[int]]:
    """Row-style Hermite normal form of the row span of A.

    Returns the nonzero rows: echelon form with positive pivots and the
    entries above each pivot reduced into [0, pivot).  This is the canonical
    basis used for lattices given by generating sets.
    """
    H = [row[:] for row in to_rows(A) if any(row)]
    if not H:
        return []
    ncols = len(H[0])
    row = 0
    for col in range(ncols):
        if row >= len(H):
            break
        # gcd-eliminate entries in this column at or below `row`
        while True:
            live = [i for i in range(row, len(H)) if H[i][col] != 0]
            if not live:
                break
            piv = min(live, key=lambda i: abs(H[i][col]))
            H[row], H[piv] = H[piv], H[row]
            done = True
            for i in range(row + 1, len(H)):
                if H[i][col] != 0:
                    q = round(Fraction(H[i][col], H[row][col]))
                    H[i] = [a - q * b for a, b in zip(H[i], H[row])]
                    if H[i][col] != 0:
                        done = False
            if done:
                break
        if row < len(H) and H[row][col] != 0:
            if H[row][col] < 0:
                H[row] = [-a for a in H[row]]
            p = H[row][col]
            for i in range(row):
                q = H[i][col] // p
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[row])]
            row += 1
    return [r for r in H[:row]]


def snf_with_transform(A) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Smith normal form with transforms: S·A·T = diag(d), S and T unimodular.

    Returns (d, S, T) where d lists the diagonal (length min(m,n)) with
    d[i] >= 0 and d[i] | d[i+1].
    """
    M = to_rows(A)
    m, n = len(M), len(M[0]) if M else 0
    S = identity_rows(m)
    T = identity_rows(n)

    def row_op(i, j, q):  # row_i -= q*row_j
        M[i] = [a - q * b for a, b in zip(M[i], M[j])]
        S[i] = [a - q * b for a, b in zip(S[i], S[j])]

    def col_op(i, j, q):  # col_i -= q*col_j
        for r in range(m):
            M[r][i] -= q * M[r][j]
        for r in range(n):
            T[r][i] -= q * T[r][j]

    def row_swap(i, j):
        M[i], M[j] = M[j], M[i]
        S[i], S[j] = S[j], S[i]

    def col_swap(i, j):
        for r in range(m):
            M[r][i], M[r][j] = M[r][j], M[r][i]
        for r in range(n):
            T[r][i], T[r][j] = T[r][j], T[r][i]

    t = 0
    while t < min(m, n):
        # locate a minimal nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if M[i][j] != 0 and (best is None or abs(M[i][j]) < abs(M[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        row_swap(t, best[0])
        col_swap(t, best[1])
        # clear row and column t
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if M[i][t] != 0:
                    q = round(Fraction(M[i][t], M[t][t]))
                    row_op(i, t, q)
                    if M[i][t] != 0:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if M[t][j] != 0:
                    q = round(Fraction(M[t][j], M[t][t]))
                    col_op(j, t, q)
                    if M[t][j] != 0:
                        col_swap(t, j)
                        dirty = True
        # divisibility: d_t must divide every remaining entry
        viol = next(
            ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % M[t][t] != 0),
            None,
        )
        if viol is not None:
            # fold the offending row into row t and redo this corner
            i, _ = viol
            M[t] = [a + b for a, b in zip(M[t], M[i])]
            S[t] = [a + b for a, b in zip(S[t], S[i])]
            continue
        t += 1

    d = []
    for i in range(min(m, n)):
        v = M[i][i]
        if v < 0:
            M[i] = [-a for a in M[i]]
            S[i] = [-a for a in S[i]]
            v = -v
        d.append(v)
    return d, S, T


# ---------------------------------------------------------------------------
# rational (Fraction) linear algebra, used for q-expansion linear systems
# ---------------------------------------------------------------------------


def frac_rows(A) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in A]


def frac_rref(A) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (R, pivot_columns)."""
    R = frac_rows(A)
    m = len(R)
    n = len(R[0]) if m else 0
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if R[r][col] != 0), None)
        if piv is None:
            continue
        R[row], R[piv] = R[piv], R[row]
        pv = R[row][col]
        R[row] = [x / pv for x in R[row]]
        for r in range(m):
            if r != row and R[r][col] != 0:
                f = R[r][col]
                R[r] = [x - f * y for x, y in zip(R[r], R[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return R, pivots


def frac_rank(A) -> int:
    return len(frac_rref(A)[1])


def frac_solve(A, b) -> "list[Fraction] | None":
    """One solution x of A x = b over Q, or None if inconsistent.

    Free variables are set to 0.  A has m rows and n columns; b has m entries.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    aug = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(A, b)]
    R, pivots = frac_rref(aug)
    if n in pivots:  # pivot in the constants column: inconsistent
        return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        x[c] = R[r][n]
    return x


def frac_nullspace(A) -> list[list[Fraction]]:
    """Basis of the right kernel of A over Q."""
    m = len(A)
    n = len(A[0]) if m else 0
    R, pivots = frac_rref(A)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -R[r][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# small number-theory helpers shared across modules
# ---------------------------------------------------------------------------


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (inputs here are small)."""
    assert n != 0
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def squarefree_part(n: int) -> int:
    """The squarefree kernel of n (sign preserved)."""
    assert n != 0
    s = 1 if n > 0 else -1
    out = 1
    for p, e in factorize(n).items():
        if e % 2:
            out *= p
    return s * out


def divisors(n: int) -> list[int]:
    fac = factorize(n)
    divs = [1]
    for p, e in fac.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def moebius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return (-1) ** len(fac)


def gcd_list(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, int(x))
    return g


def np_int(A) -> np.ndarray:
    """Convert to an int64 numpy array, asserting no overflow occurred."""
    arr = np.array([[int(x) for x in row] for row in A], dtype=np.int64)
    assert all(abs(int(x)) < 2**62 for row in A for x in row)
    return arr
