"""Short-vector enumeration: shells, theta series, minima, coset minima.

Fincke–Pohst enumeration over an LLL-reduced basis.  The level-by-level
interval bounds are evaluated in float64 with a generous safety slack (only
ever admitting extra candidates), and every surviving vector is then checked
against the exact integer Gram matrix, so the results themselves are exact.
Large searches are processed in bounded-size chunks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from maxlat.intmat import frac_solve, inverse_frac, np_int
from maxlat.lll import lll_gram
from maxlat.qforms import Lattice, QLattice
from maxlat.qseries import QSeries

CHUNK_ROWS = 1_000_000


def _gram_rows_of(L) -> list[list[int]]:
    """Accept a Lattice or a raw integral Gram matrix (odd lattices allowed)."""
    if isinstance(L, Lattice):
        return L.gram_rows()
    rows = [[int(x) for x in row] for row in L]
    n = len(rows)
    assert all(len(r) == n for r in rows) and all(
        rows[i][j] == rows[j][i] for i in range(n) for j in range(n)
    ), "Gram matrix must be square and symmetric"
    return rows


@dataclass(frozen=True)
class Shell:
    """All lattice vectors of one norm, one representative per ± pair."""

    norm: int
    vectors: np.ndarray  # (count, dim) int64, lexicographically sorted

    @property
    def pair_count(self) -> int:
        return len(self.vectors)


class MemoryBudgetExceeded(RuntimeError):
    """Raised when an enumeration would materialize too many vectors."""


def _ldl(B) -> tuple[list[Fraction], list[list[Fraction]]]:
    """Exact LDL^T of a positive definite matrix: B = Mᵀ·diag(D)·M, M unit upper."""
    n = len(B)
    D = [Fraction(0)] * n
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = Fraction(1)
    for i in range(n):
        acc = Fraction(B[i][i])
        for t in range(i):
            acc -= D[t] * M[t][i] * M[t][i]
        D[i] = acc
        assert acc > 0
        for j in range(i + 1, n):
            v = Fraction(B[i][j])
            for t in range(i):
                v -= D[t] * M[t][i] * M[t][j]
            M[i][j] = v / D[i]
    return D, M


def _fp_core(B, bound: Fraction, shift=None, canonical=True):
    """Yield (Y, exact_norm_numerators) chunks for the reduced Gram B.

    Y rows are integer coordinate vectors y (in the reduced basis) with
    (y+shift)ᵀ·B·(y+shift) ≤ bound; exact norms are returned as numerators
    over den(shift)².  With canonical=True (only for shift=None), exactly one
    of each ±y is produced and y = 0 is dropped.
    """
    n = len(B)
    D, M = _ldl(B)
    Df = np.array([float(d) for d in D])
    Mf = np.array([[float(x) for x in row] for row in M])
    bound_f = float(bound)
    eps = 1e-6 * (bound_f + 1.0)

    if shift is None:
        s = [Fraction(0)] * n
        t_den = 1
    else:
        s = [Fraction(x) for x in shift]
        t_den = 1
        for x in s:
            t_den = t_den * x.denominator // gcd(t_den, x.denominator)
    sf = np.array([float(x) for x in s])
    # s_contrib[i] = s_i + sum_{j>i} M[i][j]*s_j
    s_contrib = sf + np.array([float(sum(M[i][j] * s[j] for j in range(i + 1, n))) for i in range(n)])

    Bnp = np_int(B)
    ts = np.array([int(x * t_den) for x in s], dtype=np.int64)
    bound_num = (bound * t_den * t_den).numerator
    bound_den = (bound * t_den * t_den).denominator

    def finalize(Y):
        if not len(Y):
            return
        W = t_den * Y + ts
        assert np.abs(W).max(initial=0) < 2**20 and np.abs(Bnp).max() < 2**40
        norms = np.einsum("ij,jk,ik->i", W, Bnp, W)
        keep = norms * bound_den <= bound_num
        if canonical:
            keep &= norms > 0
        Y = Y[keep]
        norms = norms[keep]
        if len(Y):
            yield Y, norms

    def descend(level, Y, REM, ZSF):
        if len(Y) == 0:
            return
        if level < 0:
            yield from finalize(Y)
            return
        if Y.shape[1]:
            C = Y @ Mf[level, level + 1 :] + s_contrib[level]
        else:
            C = np.full(len(REM), s_contrib[level])
        w = np.sqrt(np.maximum(REM, 0.0) / Df[level]) + eps
        lo = np.ceil(-C - w).astype(np.int64)
        hi = np.floor(-C + w).astype(np.int64)
        if canonical:
            lo = np.where(ZSF, np.maximum(lo, 0), lo)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return
        if total > CHUNK_ROWS and len(Y) > 1:
            mid = len(Y) // 2
            yield from descend(level, Y[:mid], REM[:mid], ZSF[:mid])
            yield from descend(level, Y[mid:], REM[mid:], ZSF[mid:])
            return
        idx = np.repeat(np.arange(len(Y)), cnt)
        offs = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        yi = lo[idx] + offs
        Cn = C[idx] + yi
        REMn = REM[idx] - Df[level] * Cn * Cn
        keep = REMn >= -eps
        yi = yi[keep]
        idx2 = idx[keep]
        Yn = np.column_stack([yi, Y[idx2]]) if Y.shape[1] else yi.reshape(-1, 1)
        ZSFn = ZSF[idx2] & (yi == 0) if canonical else ZSF[idx2]
        yield from descend(level - 1, Yn, REMn[keep], ZSFn)

    Y0 = np.zeros((1, 0), dtype=np.int64)
    REM0 = np.array([bound_f + eps])
    ZSF0 = np.array([True])
    yield from descend(n - 1, Y0, REM0, ZSF0)


def _reduced(L):
    B, U = lll_gram(_gram_rows_of(L))
    return B, np_int(U)


def _canonical_rows(X: np.ndarray) -> np.ndarray:
    """Sign-normalize (first nonzero positive) and lexicographically sort rows."""
    if not len(X):
        return X
    Xc = X.copy()
    for i in range(len(Xc)):
        row = Xc[i]
        nz = np.nonzero(row)[0]
        if len(nz) and row[nz[0]] < 0:
            Xc[i] = -row
    order = np.lexsort(Xc.T[::-1])
    return Xc[order]


def shells_up_to(L, bound: int, max_vectors: int = 5_000_000) -> list[Shell]:
    """All ±-classes of nonzero vectors with (x,x) ≤ bound, grouped by norm."""
    assert bound >= 2
    B, U = _reduced(L)
    by_norm: dict[int, list[np.ndarray]] = {}
    count = 0
    for Y, norms in _fp_core(B, Fraction(bound)):
        count += len(Y)
        if count > max_vectors:
            raise MemoryBudgetExceeded(
                f"more than {max_vectors} short vectors; use count_by_norm for streaming counts"
            )
        X = Y @ U
        for nv in np.unique(norms):
            by_norm.setdefault(int(nv), []).append(X[norms == nv])
    out = []
    for nv in sorted(by_norm):
        X = _canonical_rows(np.vstack(by_norm[nv]))
        X.setflags(write=False)
        out.append(Shell(norm=nv, vectors=X))
    return out


def count_by_norm(L, bound: int) -> dict[int, int]:
    """Streaming ±-pair counts by norm (no vector storage)."""
    assert bound >= 2
    B, _U = _reduced(L)
    counts: dict[int, int] = {}
    for _Y, norms in _fp_core(B, Fraction(bound)):
        vals, cnt = np.unique(norms, return_counts=True)
        for v, c in zip(vals, cnt):
            counts[int(v)] = counts.get(int(v), 0) + int(c)
    return counts


def minimum(L) -> int:
    """Least nonzero norm (x,x)."""
    B, _U = _reduced(L)
    bound = min(B[i][i] for i in range(len(B)))
    best = bound
    for _Y, norms in _fp_core(B, Fraction(bound)):
        m = int(norms.min())
        if m < best:
            best = m
    return int(best)


def theta_series(L, prec: int) -> QSeries:
    """Theta series: coefficient at Q-exponent n counts {x : Q(x) = n}.

    Accepts a Lattice (denom 1) or a QLattice (fractional exponents allowed).
    """
    assert prec >= 1
    if isinstance(L, QLattice):
        num_gram = [list(r) for r in L.num]
        den = L.den
    else:
        num_gram = _gram_rows_of(L)
        den = 1
    # (x,x) = xᵀ·num·x / den ; Q = (x,x)/2 < prec  <=>  xᵀ·num·x < 2·den·prec
    B, _U = lll_gram(num_gram)
    bound = Fraction(2 * den * prec - 1)
    counts: dict[int, int] = {}
    for _Y, norms in _fp_core(B, bound):
        vals, cnt = np.unique(norms, return_counts=True)
        for v, c in zip(vals, cnt):
            counts[int(v)] = counts.get(int(v), 0) + int(c)
    # exponent of a vector with numerator-norm v is v/(2*den)
    denominators = [2 * den // gcd(2 * den, v) for v in counts if v] or [1]
    series_denom = 1
    for q in denominators:
        series_denom = series_denom * q // gcd(series_denom, q)
    coeffs = {0: Fraction(1)}
    for v, c in counts.items():
        numer = v * series_denom // (2 * den)
        if numer < prec * series_denom:
            coeffs[numer] = coeffs.get(numer, Fraction(0)) + 2 * c
    return QSeries(series_denom, prec * series_denom, coeffs)


def coset_min(L, shift) -> tuple[Fraction, np.ndarray]:
    """Minimal (x+shift, x+shift) over x ∈ L and a minimizing x (integer coords).

    shift is a rational vector in lattice coordinates.  L may be a Lattice or
    a raw integral Gram matrix (odd lattices allowed).
    """
    s = [Fraction(x) for x in shift]
    n = len(_gram_rows_of(L))
    assert len(s) == n
    B, U = _reduced(L)
    # shift in reduced coordinates: s' with s'·U = s
    Ur = [list(map(int, row)) for row in U]
    Uinv, ud = inverse_frac(Ur)
    sp = [sum(s[j] * Fraction(Uinv[j][i], ud) for j in range(n)) for i in range(n)]
    if all(x.denominator == 1 for x in sp):
        rep = -np.array([int(x) for x in sp], dtype=np.int64) @ U
        return Fraction(0), rep
    # initial bound from the rounded point
    y0 = [-round(x) for x in sp]
    v0 = [Fraction(a) + b for a, b in zip(y0, sp)]
    bound = sum(v0[i] * B[i][j] * v0[j] for i in range(n) for j in range(n))
    best = bound
    best_y = np.array([int(a) for a in y0], dtype=np.int64)
    t = 1
    for x in sp:
        t = t * x.denominator // gcd(t, x.denominator)
    for Y, norm_nums in _fp_core(B, bound, shift=sp, canonical=False):
        i = int(np.argmin(norm_nums))
        val = Fraction(int(norm_nums[i]), t * t)
        if val < best:
            best = val
            best_y = Y[i]
    return best, best_y @ U


# ---------------------------------------------------------------------------
# harmonic theta series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HarmonicPoly:
    """Homogeneous polynomial in dim variables, given in lattice coordinates.

    coeffs maps exponent tuples to rational coefficients.  Harmonicity is
    with respect to the inner product transported from the Gram matrix:
    the associated Laplacian is Σ_ij (G⁻¹)_ij ∂_i ∂_j.
    """

    degree: int
    coeffs: tuple  # ((exponents...), Fraction) pairs

    @staticmethod
    def make(coeffs: dict) -> "HarmonicPoly":
        items = {tuple(int(e) for e in k): Fraction(v) for k, v in coeffs.items() if v}
        assert items, "zero polynomial not allowed"
        degs = {sum(k) for k in items}
        assert len(degs) == 1, "polynomial must be homogeneous"
        return HarmonicPoly(degs.pop(), tuple(sorted(items.items())))

    @property
    def dim(self) -> int:
        return len(self.coeffs[0][0])

    def evaluate_many(self, X: np.ndarray) -> list[Fraction]:
        """Exact values on the rows of an integer matrix X."""
        vals = [Fraction(0)] * len(X)
        for exps, c in self.coeffs:
            term = np.ones(len(X), dtype=object)
            for j, e in enumerate(exps):
                if e:
                    term = term * X[:, j].astype(object) ** e
            for i in range(len(X)):
                vals[i] += c * int(term[i])
        return vals

    def is_harmonic_for(self, L: Lattice) -> bool:
        Ginv, d = inverse_frac(L.gram_rows())
        lap: dict[tuple, Fraction] = {}
        for exps, c in self.coeffs:
            for i in range(len(exps)):
                for j in range(len(exps)):
                    w = Fraction(Ginv[i][j], d) * c
                    e = list(exps)
                    # ∂_i ∂_j
                    if e[j] == 0:
                        continue
                    w *= e[j]
                    e[j] -= 1
                    if e[i] == 0:
                        continue
                    w *= e[i]
                    e[i] -= 1
                    key = tuple(e)
                    lap[key] = lap.get(key, Fraction(0)) + w
        return all(v == 0 for v in lap.values())


def harmonic_theta(L: Lattice, P: HarmonicPoly, prec: int) -> QSeries:
    """Σ_x P(x)·q^{Q(x)}, summed over full shells (both signs)."""
    assert P.degree >= 1
    assert P.dim == L.dim
    assert P.is_harmonic_for(L), "polynomial is not harmonic for this Gram matrix"
    if P.degree % 2 == 1:
        return QSeries.zero(prec)
    if prec == 1:
        return QSeries.zero(prec)
    coeffs: dict[int, Fraction] = {}
    for shell in shells_up_to(L, 2 * (prec - 1)):
        n = shell.norm // 2
        vals = P.evaluate_many(shell.vectors)
        total = 2 * sum(vals, Fraction(0))  # both signs, even degree
        if total:
            coeffs[n] = coeffs.get(n, Fraction(0)) + total
    return QSeries(1, prec, coeffs)
