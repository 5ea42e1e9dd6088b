"""Even lattices and their exact quadratic-form algebra.

Everything works on integer Gram matrices; there are no ambient coordinates.
Provides duals, adjoints, levels, discriminant forms (finite quadratic groups
with values in Q/Z) and local invariants (Jordan scales, Witt invariant s_p,
the eighth root of unity gamma_p) — all in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd, prod

import json

import numpy as np

from maxlat import intmat
from maxlat.intmat import (
    det_bareiss,
    factorize,
    hnf_rows,
    inverse_frac,
    is_positive_definite,
    matmul_rows,
    snf_with_transform,
    squarefree_part,
    transpose_rows,
)

# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------


class Lattice:
    """Even positive definite lattice given by an integer Gram matrix.

    gram[i][j] is the bilinear value (b_i, b_j); the quadratic form is
    Q(x) = (x,x)/2.  Instances are immutable and hash/compare on the Gram
    matrix (names are labels only).
    """

    __slots__ = ("_gram", "name", "_np", "_det", "_level")

    def __init__(self, gram, name: "str | None" = None, check: bool = True):
        rows = tuple(tuple(int(x) for x in row) for row in gram)
        if check:
            n = len(rows)
            assert n >= 1, "dimension must be at least 1"
            assert all(len(r) == n for r in rows), "Gram matrix must be square"
            assert all(rows[i][j] == rows[j][i] for i in range(n) for j in range(n)), "Gram must be symmetric"
            assert all(rows[i][i] % 2 == 0 for i in range(n)), "lattice must be even (even diagonal)"
            assert is_positive_definite(rows), "Gram must be positive definite"
        self._gram = rows
        self.name = name
        self._np = None
        self._det = None
        self._level = None

    @property
    def gram(self) -> tuple:
        return self._gram

    @property
    def dim(self) -> int:
        return len(self._gram)

    def gram_np(self) -> np.ndarray:
        if self._np is None:
            self._np = intmat.np_int(self._gram)
            self._np.setflags(write=False)
        return self._np

    def gram_rows(self) -> list[list[int]]:
        return [list(r) for r in self._gram]

    @property
    def det(self) -> int:
        if self._det is None:
            self._det = det_bareiss(self._gram)
        return self._det

    @property
    def level(self) -> int:
        if self._level is None:
            M, d = inverse_frac(self._gram)
            d = abs(d)
            N = 1
            for row in M:
                for x in row:
                    if x:
                        N = N * (d // gcd(abs(x), d)) // gcd(N, d // gcd(abs(x), d))
            # force even diagonal of N * gram^{-1}
            if any((N * M[i][i] // d) % 2 for i in range(len(M))):
                N *= 2
            self._level = N
        return self._level

    def renamed(self, name: str) -> "Lattice":
        out = Lattice(self._gram, name=name, check=False)
        return out

    def to_json(self) -> str:
        return json.dumps(
            {"name": self.name, "dim": self.dim, "gram": [list(r) for r in self._gram]}
        )

    @staticmethod
    def from_json(text: str) -> "Lattice":
        obj = json.loads(text)
        L = Lattice(obj["gram"], name=obj.get("name"))
        assert L.dim == obj["dim"], "declared dimension does not match the Gram matrix"
        return L

    def __eq__(self, other):
        return isinstance(other, Lattice) and self._gram == other._gram

    def __hash__(self):
        return hash(self._gram)

    def __repr__(self):
        label = self.name or f"{self.dim}-dim"
        return f"Lattice({label}, det={self.det})"


class QLattice:
    """Positive definite lattice with an exact rational Gram matrix.

    Stored as an integer matrix `num` over a common positive denominator
    `den` (in lowest terms entry-wise as a matrix).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den: int = 1):
        assert den != 0
        rows = [[int(x) for x in row] for row in num]
        if den < 0:
            den = -den
            rows = [[-x for x in row] for row in rows]
        g = den
        for row in rows:
            for x in row:
                g = gcd(g, x)
        if g > 1:
            den //= g
            rows = [[x // g for x in row] for row in rows]
        n = len(rows)
        assert all(len(r) == n for r in rows) and all(
            rows[i][j] == rows[j][i] for i in range(n) for j in range(n)
        )
        assert is_positive_definite(rows)
        self.num = tuple(tuple(r) for r in rows)
        self.den = den

    @property
    def dim(self) -> int:
        return len(self.num)

    def gram_fractions(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in row] for row in self.num]

    @property
    def det(self) -> Fraction:
        return Fraction(det_bareiss(self.num), self.den ** len(self.num))

    def __eq__(self, other):
        return isinstance(other, QLattice) and self.num == other.num and self.den == other.den

    def __repr__(self):
        return f"QLattice(dim={self.dim}, det={self.det})"


# ---------------------------------------------------------------------------
# Discriminant forms
# ---------------------------------------------------------------------------


def _mod1(x: Fraction) -> Fraction:
    return x - floor(x)


@dataclass(frozen=True)
class DiscriminantForm:
    """The finite quadratic group L^#/L with Q-values in Q/Z.

    generator_orders is the Smith normal form (each dividing the next);
    gens[i] is a representative of the i-th generator in L-coordinates
    (a rational row vector); qvalues[i] = Q(gens[i]) mod 1 and
    bvalues[i][j] = b(gens[i], gens[j]) mod 1.
    """

    generator_orders: tuple
    qvalues: tuple
    bvalues: tuple
    gens: tuple

    @property
    def group_order(self) -> int:
        return prod(self.generator_orders) if self.generator_orders else 1

    @property
    def exponent(self) -> int:
        return self.generator_orders[-1] if self.generator_orders else 1

    def q_of(self, coeffs) -> Fraction:
        """Q-value (mod 1) of the class sum_i coeffs[i]*gens[i]."""
        r = len(self.generator_orders)
        assert len(coeffs) == r
        val = Fraction(0)
        for i in range(r):
            val += coeffs[i] * coeffs[i] * self.qvalues[i]
            for j in range(i + 1, r):
                val += coeffs[i] * coeffs[j] * self.bvalues[i][j]
        return _mod1(val)

    def elements(self):
        """Iterate coefficient tuples of all group elements (lexicographic)."""
        assert self.group_order <= 10**6, "discriminant group too large to scan"

        def rec(i, prefix):
            if i == len(self.generator_orders):
                yield tuple(prefix)
                return
            for c in range(self.generator_orders[i]):
                yield from rec(i + 1, prefix + [c])

        yield from rec(0, [])

    def vector_of(self, coeffs) -> list[Fraction]:
        """Representative of the class in L-coordinates (rational vector)."""
        n = len(self.gens[0]) if self.gens else 0
        out = [Fraction(0)] * n
        for c, g in zip(coeffs, self.gens):
            for t in range(n):
                out[t] += c * g[t]
        return out

    def p_part_gens(self, p: int) -> list[tuple[int, int]]:
        """(index, p-power order) for generators of the p-Sylow subgroup."""
        out = []
        for i, d in enumerate(self.generator_orders):
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if e:
                out.append((i, p**e))
        return out

    def is_anisotropic(self, p: "int | None" = None) -> bool:
        """No nonzero element (of the p-part if p given) has Q ≡ 0 mod 1."""
        return self.first_isotropic(p) is None

    def first_isotropic(self, p: "int | None" = None):
        """Coefficient tuple of an isotropic nonzero class of minimal order.

        Scanning order is deterministic (by order, then lexicographic).
        Returns None if the (p-part of the) form is anisotropic.
        """
        r = len(self.generator_orders)
        if p is None:
            candidates = [(i, self.generator_orders[i]) for i in range(r)]
        else:
            candidates = self.p_part_gens(p)
        if not candidates:
            return None
        best = None
        best_order = None

        def order_of(coeffs):
            o = 1
            for c, d in zip(coeffs, self.generator_orders):
                if c:
                    o = o * (d // gcd(c, d)) // gcd(o, d // gcd(c, d))
            return o

        def rec(idx, prefix):
            nonlocal best, best_order
            if idx == len(candidates):
                full = [0] * r
                for (i, _), c in zip(candidates, prefix):
                    full[i] = c
                if all(c == 0 for c in full):
                    return
                if self.q_of(full) == 0:
                    o = order_of(full)
                    key = (o, tuple(full))
                    if best is None or key < (best_order, best):
                        best, best_order = tuple(full), o
                return
            i, pk = candidates[idx]
            step = self.generator_orders[i] // pk
            for c in range(pk):
                rec(idx + 1, prefix + [c * step])

        # enumerate the relevant subgroup; for p given, coefficients run over
        # multiples of d_i / p^{v_p(d_i)} so classes stay inside the p-part
        total = prod(pk for _, pk in candidates)
        assert total <= 10**6, "discriminant p-part too large to scan"
        rec(0, [])
        return best


def discriminant_form(L: Lattice) -> DiscriminantForm:
    """Smith-normal-form presentation of L^#/L with exact Q/Z values."""
    G = L.gram_rows()
    n = L.dim
    d, S, T = snf_with_transform(G)
    Sinv, sden = inverse_frac(S)
    assert abs(sden) == 1
    Ginv, gden = inverse_frac(G)
    # generator i (order d[i]) is column i of G^{-1}·S^{-1}, as a vector in L-coords
    gens = []
    orders = []
    for i in range(n):
        if d[i] == 1:
            continue
        col = [
            Fraction(
                sum(Ginv[r][t] * Sinv[t][i] * sden for t in range(n)), gden
            )
            for r in range(n)
        ]
        gens.append(tuple(col))
        orders.append(d[i])
    qv = []
    bv = [[Fraction(0)] * len(gens) for _ in range(len(gens))]
    for i, gi in enumerate(gens):
        val = sum(gi[r] * G[r][t] * gi[t] for r in range(n) for t in range(n))
        qv.append(_mod1(val / 2))
        for j, gj in enumerate(gens):
            b = sum(gi[r] * G[r][t] * gj[t] for r in range(n) for t in range(n))
            bv[i][j] = _mod1(Fraction(b))
    disc = DiscriminantForm(
        tuple(orders), tuple(qv), tuple(tuple(row) for row in bv), tuple(gens)
    )
    assert disc.group_order == abs(L.det), "group order must equal det"
    return disc


# ---------------------------------------------------------------------------
# Spec operations: det/level, adjoint, partial dual, sums
# ---------------------------------------------------------------------------


def det_level(L: Lattice) -> tuple[int, int]:
    """(determinant, level): level is minimal N with N·gram⁻¹ integral, even diagonal."""
    return L.det, L.level


def adjoint(L: Lattice, N: "int | None" = None) -> Lattice:
    """The adjoint lattice sqrt(N)·L^# with Gram N·gram⁻¹ (N = exact level)."""
    if N is None:
        N = L.level
    if N != L.level:
        raise ValueError(f"adjoint requires the exact level {L.level}, got {N}")
    M, d = inverse_frac(L.gram_rows())
    assert all(N * x % d == 0 for row in M for x in row)
    gram = [[N * x // d for x in row] for row in M]
    name = f"adj({L.name})" if L.name else None
    out = Lattice(gram, name=name)
    assert out.det * L.det == N**L.dim, "adjoint determinant identity failed"
    return out


def dual_at_p(L: Lattice, p: int) -> QLattice:
    """The partial dual L^{#,p} = L^# ∩ Z[1/p]·L as a rational Gram matrix."""
    if L.level % p != 0:
        return QLattice(L.gram_rows(), 1)  # documented no-op
    disc = discriminant_form(L)
    n = L.dim
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for i, pk in disc.p_part_gens(p):
        g = disc.gens[i]
        step = disc.generator_orders[i] // pk
        rows.append(tuple(step * x for x in g))
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
    int_rows = [[int(x * den) for x in r] for r in rows]
    H = hnf_rows(int_rows)
    assert len(H) == n
    G = L.gram_rows()
    HG = matmul_rows(H, G)
    HGHt = matmul_rows(HG, transpose_rows(H))
    q = QLattice(HGHt, den * den)
    # index [L^{#,p} : L] equals the p-part of det(L)
    ppart = 1
    for _i, pk in disc.p_part_gens(p):
        ppart *= pk
    assert q.det == Fraction(L.det, ppart**2), "partial dual determinant identity failed"
    return q


def orthogonal_sum(L1: Lattice, L2: Lattice) -> Lattice:
    n1, n2 = L1.dim, L2.dim
    gram = [[0] * (n1 + n2) for _ in range(n1 + n2)]
    for i in range(n1):
        for j in range(n1):
            gram[i][j] = L1.gram[i][j]
    for i in range(n2):
        for j in range(n2):
            gram[n1 + i][n1 + j] = L2.gram[i][j]
    name = f"{L1.name}+{L2.name}" if (L1.name and L2.name) else None
    return Lattice(gram, name=name, check=False)


# ---------------------------------------------------------------------------
# Local invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianRational:
    """Exact element of Q(i), used for the eighth roots of unity gamma_p."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(Fraction(other))
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = GaussianRational(Fraction(1))
        b = self
        assert e >= 0
        while e:
            if e & 1:
                out = out * b
            b = b * b
            e >>= 1
        return out

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        if self.re == 0:
            return f"{self.im}*i"
        return f"({self.re}+{self.im}*i)"


ONE = GaussianRational(Fraction(1))
MINUS_I = GaussianRational(Fraction(0), Fraction(-1))


def legendre(a: int, p: int) -> int:
    assert p % 2 == 1 and p > 1
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Hilbert symbol (a,b)_p for nonzero integers; p = 0 means the real place."""
    assert a != 0 and b != 0
    if p == 0:
        return -1 if (a < 0 and b < 0) else 1
    if p == 2:
        alpha, u = 0, a
        while u % 2 == 0:
            u //= 2
            alpha += 1
        beta, v = 0, b
        while v % 2 == 0:
            v //= 2
            beta += 1
        eps = lambda w: ((w - 1) // 2) % 2
        omg = lambda w: ((w * w - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omg(v) + beta * omg(u)
        return -1 if e % 2 else 1
    alpha, u = 0, a
    while u % p == 0:
        u //= p
        alpha += 1
    beta, v = 0, b
    while v % p == 0:
        v //= p
        beta += 1
    e = alpha * beta * ((p - 1) // 2)
    sign = -1 if e % 2 else 1
    return sign * legendre(u, p) ** beta * legendre(v, p) ** alpha


def diagonalize_rational(G) -> list[Fraction]:
    """Diagonal entries of a symmetric Gauss diagonalization of G over Q."""
    M = [[Fraction(x) for x in row] for row in G]
    n = len(M)
    diag = []
    for i in range(n):
        if M[i][i] == 0:
            j = next((t for t in range(i + 1, n) if M[t][t] != 0), None)
            if j is not None:
                M[i], M[j] = M[j], M[i]
                for r in range(n):
                    M[r][i], M[r][j] = M[r][j], M[r][i]
            else:
                j = next(t for t in range(i + 1, n) if M[i][t] != 0)
                for t in range(n):
                    M[i][t] += M[j][t]
                for t in range(n):
                    M[t][i] += M[t][j]
        d = M[i][i]
        assert d != 0
        diag.append(d)
        for j in range(i + 1, n):
            f = M[i][j] / d
            if f:
                for t in range(i, n):
                    M[j][t] -= f * M[i][t]
                for t in range(i, n):
                    M[t][j] = M[j][t]
    return diag


def hasse_invariant(G, p: int) -> int:
    """Product of Hilbert symbols over the diagonalization (i < j pairs)."""
    diag = [squarefree_part(x.numerator * x.denominator) for x in diagonalize_rational(G)]
    h = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            h *= hilbert_symbol(diag[i], diag[j], p)
    return h


def witt_invariant(G, p: int) -> int:
    """Witt invariant s_p of the quadratic space (normalization pinned by tests).

    For even dimension m = 2k: s_p = hasse_p(V) · (−1,−1)_p^{k(k+1)/2}.
    With this normalization, spaces carrying even lattices of level N and
    det N² have s_p = −1 exactly at the primes dividing N, and
    s_∞ = −1 iff m ≡ 4 mod 8 (for 4 | m).
    """
    m = len(G)
    assert m % 2 == 0, "Witt invariant implemented for even dimension only"
    k = m // 2
    corr = hilbert_symbol(-1, -1, p) if (k * (k + 1) // 2) % 2 else 1
    return hasse_invariant(G, p) * corr


def s_infinity(m: int) -> int:
    """s_∞ of an m-dimensional positive definite space (m even)."""
    assert m % 2 == 0
    k = m // 2
    return -1 if (k * (k + 1) // 2) % 2 else 1


def fundamental_discriminant(n: int) -> int:
    """Discriminant of Q(sqrt(n))."""
    assert n != 0
    n0 = squarefree_part(n)
    return n0 if n0 % 4 == 1 else 4 * n0


def gamma_p(x: int, p: int) -> GaussianRational:
    """gamma_p(x) for odd p: 1 on p-units; (x/p , p)_p · (−i)^{p(p−1)/2} at valuation 1."""
    assert p % 2 == 1 and p > 1, "gamma_p is exposed for odd p only"
    assert x != 0
    v = 0
    u = x
    while u % p == 0:
        u //= p
        v += 1
    assert v <= 1, "gamma_p implemented for squarefree p-part"
    if v == 0:
        return ONE
    return hilbert_symbol(u, p, p) * MINUS_I ** ((p * (p - 1) // 2) % 4)


@dataclass(frozen=True)
class LocalInvariants:
    p: int
    s_p: int
    d_class: int
    gamma_p: "GaussianRational | None"
    jordan_scales: tuple

    def __post_init__(self):
        assert self.s_p in (1, -1)


def local_invariants(L: Lattice, p: int) -> LocalInvariants:
    """Jordan scales, Witt invariant and gamma at p (squarefree-level regime)."""
    N = L.level
    if p == 2 and N % 4 == 0:
        raise ValueError("p=2 local invariants unsupported when 4 divides the level")
    disc = discriminant_form(L)
    scale_ranks: dict[int, int] = {}
    for d in disc.generator_orders:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if e:
            scale_ranks[e] = scale_ranks.get(e, 0) + 1
    scale_ranks[0] = L.dim - sum(scale_ranks.values())
    jordan = tuple(sorted(scale_ranks.items()))
    k = L.dim // 2 if L.dim % 2 == 0 else None
    assert k is not None, "local invariants implemented for even dimension"
    D = L.det
    fd = fundamental_discriminant((-1) ** k * D)
    d_val = abs(fd)
    dp = 1
    while d_val % p == 0:
        d_val //= p
        dp *= p
    gam = None
    if p % 2 == 1:
        gam = gamma_p(_gamma_arg(abs(fd), N, p), p)
    s = witt_invariant(L.gram_rows(), p)
    return LocalInvariants(p=p, s_p=s, d_class=dp, gamma_p=gam, jordan_scales=jordan)


def _gamma_arg(d_abs: int, N: int, p: int) -> int:
    """Argument to gamma_p for a lattice of level N: d_p times p^{v_p(N)}."""
    dp = 1
    u = d_abs
    while u % p == 0:
        u //= p
        dp *= p
    if N % p == 0 and dp == 1:
        return u * p
    return u * dp
