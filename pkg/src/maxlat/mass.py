"""Exact Siegel mass of a genus of even lattices with squarefree level.

The mass (sum of 1/|Aut| over the isometry classes of a genus) is computed
from purely local data, so it provides an independent completeness
certificate for neighbor-method genus enumeration: an enumeration is
complete if and only if its accumulated 1/|Aut| sum equals this value.

Implementation follows the standard local-mass factorization: a global
Bernoulli-number part times one correction factor per prime dividing
2*det.  Restricted to even lattices of even dimension whose Jordan
constituents all have even rank (true for every even lattice of squarefree
level and square determinant handled by this package); everything is exact
rational arithmetic.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, prod

from maxlat.intmat import factorize
from maxlat.modforms import bernoulli
from maxlat.qforms import Lattice, discriminant_form, fundamental_discriminant, legendre


def _bernoulli_poly(n: int, x: Fraction) -> Fraction:
    return sum(Fraction(comb(n, k)) * bernoulli(k) * x ** (n - k) for k in range(n + 1))


def _kronecker(a: int, n: int) -> int:
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * _kronecker(a, -n)
    k = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            k = -k
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                k = -k
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            k = -k
        a %= n
    return k if n == 1 else 0


def generalized_bernoulli(s: int, D: int) -> Fraction:
    """B_{s,chi} for the Kronecker character chi of fundamental discriminant D."""
    if D == 1:
        return bernoulli(s)
    f = abs(D)
    return f ** (s - 1) * sum(
        _kronecker(D, a) * _bernoulli_poly(s, Fraction(a, f)) for a in range(1, f + 1)
    )


def _even_block_factor(p: int, t: int, eps: int) -> Fraction:
    """1 / [(1 - eps p^-t) prod_{i<t} (1 - p^-2i)]: even-rank unimodular block."""
    den = (1 - eps * Fraction(1, p**t)) * prod(
        1 - Fraction(1, p ** (2 * i)) for i in range(1, t)
    )
    return 1 / Fraction(den)


def _jordan_ranks(L: Lattice, disc, p: int) -> tuple[int, int]:
    """(rank of the unimodular block, rank of the p-scaled block) at p."""
    n1 = sum(1 for o in disc.generator_orders if o % p == 0)
    return L.dim - n1, n1


def _eps_odd(p: int, t: int, det_class: int) -> int:
    """Sign for an even-rank 2t block over Z_p, p odd, from its det square class."""
    return legendre((-1) ** t * det_class, p)


def _disc_det_class(disc, p: int) -> int:
    """det mod squares of the p-part of the discriminant bilinear form (p odd).

    Generators of composite order are projected to their p-primary component
    by the cofactor multiple order/p (level squarefree, so v_p = 1).
    """
    idx = [i for i, o in enumerate(disc.generator_orders) if o % p == 0]
    cof = [disc.generator_orders[i] // p for i in idx]
    r = len(idx)
    M = [[0] * r for _ in range(r)]
    for a, i in enumerate(idx):
        for b, j in enumerate(idx):
            v = disc.bvalues[i][j] if i != j else 2 * disc.qvalues[i]
            x = Fraction(cof[a] * cof[b] * p) * v
            assert x.denominator == 1
            M[a][b] = int(x) % p
    # determinant mod p by Gaussian elimination
    det = 1
    M = [row[:] for row in M]
    for c in range(r):
        piv = next((k for k in range(c, r) if M[k][c] % p), None)
        assert piv is not None, "discriminant p-part must be nondegenerate"
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c] % p
        inv = pow(M[c][c], -1, p)
        for k in range(c + 1, r):
            f = M[k][c] * inv % p
            for cc in range(c, r):
                M[k][cc] = (M[k][cc] - f * M[c][cc]) % p
    return det % p


def _local_correction(L: Lattice, disc, p: int, s: int, chi_p: int) -> Fraction:
    n0, n1 = _jordan_ranks(L, disc, p)
    assert n0 % 2 == 0 and n1 % 2 == 0, "odd-rank Jordan blocks are not supported"
    d = L.det
    dp = d // p**n1
    assert d % p**n1 == 0 and dp % p != 0, "level must be squarefree"

    if p == 2:
        blocks = []
        if n1:
            det1 = 3 if disc.is_anisotropic(2) else 7  # V-plane vs U-plane det mod 8
            det0 = dp * pow(det1, -1, 8) % 8
            if n0:
                blocks.append((n0 // 2, 1 if det0 in (1, 7) else -1))
            blocks.append((n1 // 2, 1 if det1 in (1, 7) else -1))
        else:
            blocks.append((L.dim // 2, 1 if d % 8 in (1, 7) else -1))
        m_p = prod(_even_block_factor(2, t, e) for t, e in blocks)
        m_p *= Fraction(2 ** (n0 * n1 // 2), 2 ** len(blocks))
    else:
        det1 = _disc_det_class(disc, p) if n1 else 1
        det0 = dp * det1 % p  # det0*det1 = unit square class of d/p^n1
        m_p = Fraction(1)
        if n0:
            m_p *= Fraction(1, 2) * _even_block_factor(p, n0 // 2, _eps_odd(p, n0 // 2, det0))
        if n1:
            m_p *= Fraction(1, 2) * _even_block_factor(p, n1 // 2, _eps_odd(p, n1 // 2, det1))
        m_p *= p ** (n0 * n1 // 2)

    std = (1 - chi_p * Fraction(1, p**s)) * prod(
        1 - Fraction(1, p ** (2 * j)) for j in range(1, s)
    )
    return 2 * m_p * std


def try_siegel_mass(L: Lattice) -> "Fraction | None":
    """siegel_mass(L) when the implemented hypotheses hold, else None.

    Applicable when dim is even and >= 4, the level is squarefree, and every
    Jordan constituent has even rank (automatic for square determinant).
    """
    if L.dim % 2 or L.dim < 4:
        return None
    if any(e > 1 for e in factorize(L.level).values()):
        return None
    disc = discriminant_form(L)
    for p in {2} | set(factorize(L.det)):
        if _jordan_ranks(L, disc, p)[1] % 2:
            return None
    return siegel_mass(L)


def siegel_mass(L: Lattice) -> Fraction:
    """Exact mass of the genus of the even lattice L (squarefree level, even dim).

    Validated against independently known masses: the D4, E8, and level-p
    quaternary genera, and complete neighbor enumerations in dimensions 8-12.
    """
    n = L.dim
    assert n % 2 == 0 and n >= 4, "mass formula implemented for even dim >= 4"
    s = n // 2
    d = L.det
    level = L.level
    assert all(e == 1 for e in factorize(level).values()), "level must be squarefree"
    disc = discriminant_form(L)

    D = fundamental_discriminant((-1) ** s * d)
    special = abs(generalized_bernoulli(s, D)) / (2 * s)
    global_part = special * prod(abs(bernoulli(2 * j)) / (4 * j) for j in range(1, s))

    out = global_part
    ps = sorted({2} | set(factorize(d)))
    for p in ps:
        out *= _local_correction(L, disc, p, s, _kronecker(D, p))
    return out
