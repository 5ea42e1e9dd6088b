"""Dual extremal classification: table rows, odd unimodular overlattices,
s-extremality, spherical design strength, and complements in unimodular hosts.

A maximal even lattice L of squarefree level N and determinant N² is *dual
extremal* when the theta series of its rescaled dual √N·L^# equals the
extremal form of the trace-killed space in weight dim(L)/2 — the unique
normalized form of maximal vanishing order.  `table_row` packages the whole
per-(level, dimension) computation: genus enumeration, extremal form, count
of dual extremal classes and the adjoint minimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from maxlat.genus import GenusRecord, StopRule, construct_seed, enumerate_genus, is_maximal
from maxlat.intmat import hnf_rows, matmul_rows, np_int, snf_with_transform, transpose_rows
from maxlat.lll import lll_gram
from maxlat.modforms import dim_star, extremal_form, star_basis_products, theta_basis
from maxlat.qforms import Lattice, adjoint, discriminant_form
from maxlat.qseries import QSeries
from maxlat.shells import coset_min, minimum, shells_up_to, theta_series


# ---------------------------------------------------------------------------
# extremal forms and table rows
# ---------------------------------------------------------------------------


def star_basis(N: int, k: int, classes: "list[Lattice] | None", prec: int) -> list[QSeries]:
    """A basis of the trace-killed space: level-one products when N ∈ {2, 3}
    (independent of any genus data), adjoint theta series otherwise."""
    if N in (2, 3):
        return star_basis_products(N, k, prec)
    assert classes, "theta basis requires genus classes for levels beyond 3"
    basis, _rank = theta_basis(classes, N, k, prec)
    return basis


def is_dual_extremal(L: Lattice, extremal: QSeries) -> bool:
    """Whether θ(√N·L^#) equals the extremal form of its weight.

    Comparing the first dim-many coefficients suffices: the extremal form
    construction verified the leading coefficient block is injective on the
    space, and both series lie in it.
    """
    N = L.level
    k = L.dim // 2
    d = dim_star(N, k).dim_full
    th = theta_series(adjoint(L, N), d)
    assert th.denom == 1
    return all(th.coeff_at_q(n) == extremal.coeff_at_q(n) for n in range(d))


@dataclass
class TableRow:
    N: int
    m: int
    class_number: int
    h_ext: int
    min_adjoint: int  # 2 × vanishing order of the extremal form
    flagged: bool  # no class attains the extremal form
    complete: bool
    mass_certified: bool
    dim_space: int
    theta_rank: "int | None"
    extremal: QSeries
    record: GenusRecord
    extremal_indices: list

    @property
    def triple(self) -> tuple:
        return (self.class_number, self.h_ext, self.min_adjoint)


def table_row(
    N: int,
    m: int,
    *,
    record: "GenusRecord | None" = None,
    q: "int | None" = None,
    stop: "StopRule | None" = None,
    prec: "int | None" = None,
    progress: "callable | None" = None,
) -> TableRow:
    """Classify one (level, dimension) cell: (h, h_ext, min √N·L^#).

    The adjoint minimum column is twice the vanishing order of the extremal
    form; when no lattice attains it the row is flagged and the minimum is
    the hypothetical extremal one.
    """
    k = m // 2
    d = dim_star(N, k).dim_full
    if prec is None:
        prec = 2 * d + 4
    if record is None:
        record = enumerate_genus(construct_seed(N, m), q=q, stop=stop, progress=progress)
    classes = record.lattices()
    rank = None
    if N in (2, 3):
        basis = star_basis(N, k, None, prec)
    else:
        basis, rank = theta_basis(classes, N, k, prec)
    ext = extremal_form(N, k, basis)
    val = min(n for n in range(1, ext.prec) if ext.coeff_at_q(n))
    ext_idx = [i for i, L in enumerate(classes) if is_dual_extremal(L, ext)]
    return TableRow(
        N=N,
        m=m,
        class_number=record.class_number,
        h_ext=len(ext_idx),
        min_adjoint=2 * val,
        flagged=not ext_idx,
        complete=record.complete,
        mass_certified=record.mass_certified,
        dim_space=d,
        theta_rank=rank,
        extremal=ext,
        record=record,
        extremal_indices=ext_idx,
    )


def extremal_by_rank(N: int, m: int, *, q: "int | None" = None, prec: "int | None" = None):
    """Extremal form via a rank-target enumeration (no complete genus needed).

    Stops the neighbor search once the adjoint theta span fills the space,
    so it works where the full class number is out of reach.
    """
    k = m // 2
    d = dim_star(N, k).dim_full
    if prec is None:
        prec = 2 * d + 4
    rec = enumerate_genus(construct_seed(N, m), q=q, stop=StopRule.rank(d))
    basis, rank = theta_basis(rec.lattices(), N, k, prec)
    assert rank == d, f"rank target not reached: {rank} < {d}"
    return extremal_form(N, k, basis), rec


def level2_min_formula(k: int) -> int:
    """Adjoint minimum of dual extremal level-2 lattices: 2·⌊(k+4)/6⌋."""
    return 2 * ((k + 4) // 6)


# ---------------------------------------------------------------------------
# level 2: odd unimodular overlattices, characteristic vectors, s-extremality
# ---------------------------------------------------------------------------


def _adjoin_gram(L: Lattice, vec) -> list[list[int]]:
    """Integral Gram of L + Z·v for a rational vector v with (v, L) ⊆ Z."""
    n = L.dim
    den = 1
    for x in vec:
        den = den * x.denominator // gcd(den, x.denominator)
    rows = [[den if i == j else 0 for j in range(n)] for i in range(n)]
    rows.append([int(x * den) for x in vec])
    H = hnf_rows(rows)
    G = L.gram_rows()
    HG = matmul_rows(matmul_rows(H, G), transpose_rows(H))
    assert all(x % (den * den) == 0 for row in HG for x in row)
    return [[x // (den * den) for x in row] for row in HG]


def _det_gram(gram: list[list[int]]) -> int:
    H = hnf_rows([list(r) for r in gram])
    out = 1
    for i, row in enumerate(H):
        out *= row[i]
    return out


def odd_unimodular_overlattices(L: Lattice) -> list[list[list[int]]]:
    """The three odd unimodular lattices containing a maximal 2-elementary L.

    Requires level 2, determinant 4 and dimension ≡ 4 (mod 8); each nonzero
    discriminant class has half-integral square, so adjoining it yields an
    odd unimodular overlattice.  Returns raw Gram matrices (odd diagonal).
    """
    assert L.level == 2 and L.det == 4 and L.dim % 8 == 4
    disc = discriminant_form(L)
    out = []
    for coeffs in disc.elements():
        if not any(coeffs):
            continue
        assert disc.q_of(coeffs) == Fraction(1, 2)
        gram = _adjoin_gram(L, disc.vector_of(coeffs))
        assert _det_gram(gram) == 1
        assert any(gram[i][i] % 2 for i in range(len(gram))), "overlattice is not odd"
        out.append(gram)
    assert len(out) == 3
    return out


def even_sublattice(gram: list[list[int]]) -> Lattice:
    """The even vectors of an odd integral lattice (an index-2 sublattice)."""
    n = len(gram)
    par = [gram[i][i] % 2 for i in range(n)]
    assert any(par), "lattice is already even"
    i0 = min(i for i in range(n) if par[i])
    rows = []
    for i in range(n):
        if i == i0:
            continue
        r = [0] * n
        r[i] = 1
        if par[i]:
            r[i0] = 1
        rows.append(r)
    r = [0] * n
    r[i0] = 2
    rows.append(r)
    H = hnf_rows(rows)
    HG = matmul_rows(matmul_rows(H, gram), transpose_rows(H))
    return Lattice(HG)


def _solve_mod2(A: list[list[int]], b: list[int]) -> list[int]:
    """One solution of A·x ≡ b (mod 2); raises if the system is inconsistent."""
    n = len(A)
    M = [[A[i][j] & 1 for j in range(n)] + [b[i] & 1] for i in range(n)]
    piv = []
    r = 0
    for c in range(n):
        row = next((i for i in range(r, n) if M[i][c]), None)
        if row is None:
            continue
        M[r], M[row] = M[row], M[r]
        for i in range(n):
            if i != r and M[i][c]:
                M[i] = [(x + y) & 1 for x, y in zip(M[i], M[r])]
        piv.append(c)
        r += 1
    assert all(not M[i][n] for i in range(r, n)), "no characteristic vector (mod 2)"
    x = [0] * n
    for i, c in enumerate(piv):
        x[c] = M[i][n]
    return x


def characteristic_sigma(gram: list[list[int]]) -> int:
    """σ where 4σ is the least norm of a characteristic vector (w, x) ≡ (x, x) mod 2."""
    n = len(gram)
    c = _solve_mod2(gram, [gram[i][i] for i in range(n)])
    val, _x = coset_min(gram, [Fraction(ci, 2) for ci in c])
    m4 = 4 * val
    assert m4.denominator == 1 and int(m4) % 8 == n % 8, "characteristic norm violates 8-periodicity"
    sigma = int(m4) // 4
    return sigma


def gaborit_check(gram: list[list[int]]) -> dict:
    """μ, σ and the bound μ + σ/2 ≤ 1 + m/8 for an odd unimodular lattice."""
    m = len(gram)
    mu = minimum(gram)
    sigma = characteristic_sigma(gram)
    lhs = Fraction(mu) + Fraction(sigma, 2)
    rhs = 1 + Fraction(m, 8)
    return {
        "m": m,
        "mu": mu,
        "sigma": sigma,
        "bound_holds": lhs <= rhs,
        "s_extremal": lhs == rhs,
    }


def gaborit_sweep(record: GenusRecord) -> list[dict]:
    """Run the μ + σ/2 bound over every odd unimodular overlattice of a level-2 genus."""
    out = []
    for ci, (L, _aut) in enumerate(record.classes):
        for oi, gram in enumerate(odd_unimodular_overlattices(L)):
            res = gaborit_check(gram)
            res.update({"class_index": ci, "overlattice_index": oi})
            # consistency: the even sublattice returns the class we started from
            assert even_sublattice(gram).det == L.det
            out.append(res)
    return out


def min_via_overlattices(L: Lattice) -> int:
    """min(√2·L^#) as 2·min(μ, σ) over the three odd unimodular overlattices."""
    vals = []
    for gram in odd_unimodular_overlattices(L):
        res = gaborit_check(gram)
        vals.append(2 * min(res["mu"], res["sigma"]))
    assert len(set(vals)) == 1, "all three overlattices give the same dual minimum"
    return vals[0]


# ---------------------------------------------------------------------------
# spherical design strength (Venkov moment test, exact)
# ---------------------------------------------------------------------------


def _shell_vectors(L, norm: int) -> np.ndarray:
    for sh in shells_up_to(L, norm):
        if sh.norm == norm:
            return sh.vectors
    raise ValueError(f"no vectors of norm {norm}")


def design_strength(L, norm: "int | None" = None, max_strength: int = 13) -> int:
    """Largest t ≤ max_strength such that the ±shell of the given norm is a
    spherical t-design.

    Antipodal sets kill odd moments, so only even moments are tested: the
    shell is a 2j-design iff Σ_{x,y} (x·y)^{2j} equals
    |S|²·s^{2j}·Π_{i=1..j} (2i−1)/(m+2i−2) — an exact rational identity.
    """
    gram = L.gram_rows() if isinstance(L, Lattice) else [list(r) for r in L]
    if norm is None:
        norm = minimum(gram)
    X = _shell_vectors(gram, norm)  # one per ± pair
    m = len(gram)
    G = np_int(gram)
    dots = X @ G @ X.T  # int64; |entries| ≤ norm
    half = len(X)
    # Σ over the full antipodal set = 4 × Σ over half-set pairs
    use_object = (norm ** max_strength) * half * half >= 2**62
    D = dots.astype(object) if use_object else dots
    power = D * D
    j = 1
    while 2 * j + 1 <= max_strength + 1:
        lhs = 4 * int(power.sum())
        rhs = Fraction(4 * half * half) * Fraction(norm) ** (2 * j)
        for i in range(1, j + 1):
            rhs *= Fraction(2 * i - 1, m + 2 * i - 2)
        if Fraction(lhs) != rhs:
            return 2 * j - 1
        j += 1
        power = power * D * D
    return max_strength


def strong_perfection_report(L, norm: "int | None" = None) -> dict:
    """Design strength of the minimal shell; strength ≥ 4 means strongly perfect."""
    t = design_strength(L, norm)
    return {"strength": t, "strongly_perfect": t >= 4}


# ---------------------------------------------------------------------------
# embeddings into unimodular hosts and orthogonal complements
# ---------------------------------------------------------------------------


def _kernel_rows(M: list[list[int]]) -> list[list[int]]:
    """Saturated basis of {x ∈ Z^n : x·M = 0} via Smith normal form."""
    d, S, _T = snf_with_transform(M)
    n = len(M)
    rank = sum(1 for v in d if v)
    return [S[i] for i in range(rank, n)]


def complement_in_unimodular(
    S: Lattice,
    U: Lattice,
    *,
    max_nodes: int = 5_000_000,
) -> "tuple[np.ndarray, Lattice] | None":
    """Embed S primitively into a unimodular host U and return (images, complement).

    Candidate images are drawn from the shells of U matching the reduced
    Gram diagonal of S; backtracking filters by pairwise inner products.
    Returns None if no embedding is found within the node budget — which is
    inconclusive, not a proof of non-embeddability.
    """
    assert U.det == 1
    Bs, _Us = lll_gram(S.gram_rows())
    n = len(Bs)
    Gu = U.gram_np()
    norms_needed = sorted({Bs[i][i] for i in range(n)})
    shells = {}
    for sh in shells_up_to(U, max(norms_needed)):
        if sh.norm in norms_needed:
            both = np.vstack([sh.vectors, -sh.vectors])
            shells[sh.norm] = np.ascontiguousarray(both)
    if any(nv not in shells for nv in norms_needed):
        return None
    pools0 = {j: shells[Bs[j][j]] for j in range(n)}
    nodes = [0]

    def search(chosen: list, pools: dict) -> "list | None":
        if len(chosen) == n:
            return chosen
        j = len(chosen)
        cand = pools[j]
        for idx in range(len(cand)):
            nodes[0] += 1
            if nodes[0] > max_nodes:
                return None
            w = cand[idx]
            gw = Gu @ w
            deeper = {}
            ok = True
            for l in range(j + 1, n):
                sub = pools[l][pools[l] @ gw == Bs[j][l]]
                if not len(sub):
                    ok = False
                    break
                deeper[l] = sub
            if not ok:
                continue
            result = search(chosen + [w], deeper)
            if result is not None:
                return result
        return None

    imgs = search([], pools0)
    if imgs is None:
        return None
    I = np.array(imgs, dtype=np.int64)
    assert (I @ Gu @ I.T == np_int(Bs)).all()
    # complement = kernel of x ↦ (x, image_j); SNF transform keeps it saturated
    M = (Gu @ I.T).tolist()
    K = _kernel_rows([[int(v) for v in row] for row in M])
    Kg = matmul_rows(matmul_rows(K, U.gram_rows()), transpose_rows(K))
    comp = Lattice(Kg)
    if comp.det != S.det:
        return None  # embedding was not primitive
    return I, comp
