"""Exact LLL reduction of positive definite integer Gram matrices.

Integral variant maintaining the exact rational Gram–Schmidt data through the
scaled integers d_i (leading principal Gram determinants) and
lambda_{i,j} = d_{j+1} * mu_{i,j}, so no floating point is involved.  The
Lovász parameter is delta = 99/100.
"""

from __future__ import annotations

from fractions import Fraction

DELTA_NUM = 99
DELTA_DEN = 100


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b (ties toward even, like round())."""
    return round(Fraction(a, b))


def lll_gram(G, delta=(DELTA_NUM, DELTA_DEN)) -> tuple[list[list[int]], list[list[int]]]:
    """LLL-reduce a positive definite integer Gram matrix.

    Returns (B, U) with U unimodular (as rows: new basis vectors in old
    coordinates) and B = U·G·Uᵀ the reduced Gram.
    """
    n = len(G)
    dn, dd = delta
    B = [[int(x) for x in row] for row in G]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if n <= 1:
        return B, U
    d = [0] * (n + 1)
    d[0] = 1
    d[1] = B[0][0]
    lam = [[0] * n for _ in range(n)]

    def size_reduce(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = _round_div(lam[k][l], d[l + 1])
            # b_k <- b_k - q*b_l
            U[k] = [a - q * b for a, b in zip(U[k], U[l])]
            new_diag = B[k][k] - 2 * q * B[k][l] + q * q * B[l][l]
            B[k] = [a - q * b for a, b in zip(B[k], B[l])]
            for j in range(n):
                B[j][k] = B[k][j]
            B[k][k] = new_diag
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap_step(k: int) -> None:
        U[k], U[k - 1] = U[k - 1], U[k]
        B[k], B[k - 1] = B[k - 1], B[k]
        for j in range(n):
            B[j][k], B[j][k - 1] = B[j][k - 1], B[j][k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lmb = lam[k][k - 1]
        bnew = (d[k - 1] * d[k + 1] + lmb * lmb) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lmb * t) // d[k]
            lam[i][k - 1] = (bnew * t + lmb * lam[i][k]) // d[k + 1]
        d[k] = bnew

    k = 1
    kmax = 0
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = B[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    d[k + 1] = u
                    assert u > 0, "Gram matrix is not positive definite"
        size_reduce(k, k - 1)
        if dd * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < dn * d[k] * d[k]:
            swap_step(k)
            k = max(k - 1, 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(k, l)
            k += 1
    return B, U


def is_lll_reduced(B, delta=(DELTA_NUM, DELTA_DEN)) -> bool:
    """Check size-reduction and the Lovász condition via exact rational GS."""
    n = len(B)
    dn, dd = delta
    mu = [[Fraction(0)] * n for _ in range(n)]
    c = [Fraction(0)] * n  # |b_i*|^2
    for i in range(n):
        c[i] = Fraction(B[i][i])
        for j in range(i):
            mu[i][j] = Fraction(B[i][j]) - sum(mu[i][t] * mu[j][t] * c[t] for t in range(j))
            mu[i][j] /= c[j]
            c[i] -= mu[i][j] ** 2 * c[j]
        for j in range(i):
            if 2 * abs(mu[i][j]) > 1:
                return False
        if i >= 1 and c[i] < (Fraction(dn, dd) - mu[i][i - 1] ** 2) * c[i - 1]:
            return False
    return True
