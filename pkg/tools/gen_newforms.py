#!/usr/bin/env python3
"""Generate the exact eigenform data file for weight-8 level-5 newforms.

Builds M_8(Gamma_0(5)) from products of level-1 Eisenstein series and their
V(5) images, cuts out the cusp subspace by constant terms at both cusps (the
second cusp via the Fricke involution), computes the Hecke operator T_2 on an
echelonized cusp basis, factors its characteristic polynomial over Q, and
solves for one normalized eigenform per irreducible factor with exact
coordinates in the power basis of Q[x]/(factor).

The output file `newforms_5_8.json` is a list of eigenform records in the
schema ingested by `maxlat.modforms.EigenformData`:

    {"level": 5, "weight": 8, "field_poly": [c0, ..., 1],
     "coeffs": [[...], ...]}   # coeffs[n-1] = power-basis coords of a_n

Every record is round-tripped through `EigenformData.from_json`, which
verifies normalization, multiplicativity, and the Hecke recursion at prime
powers before anything is written.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from maxlat.intmat import frac_nullspace, frac_rank, frac_rref, frac_solve
from maxlat.modforms import (
    EigenformData,
    _poly_mul_mod,
    apply_operator,
    dim_star,
    eisenstein,
)
from maxlat.qseries import QSeries

LEVEL = 5
WEIGHT = 8


# ---------------------------------------------------------------------------
# exact linear algebra over Q[x]/(poly)
# ---------------------------------------------------------------------------


def field_inv(u: list[Fraction], poly: list[Fraction]) -> list[Fraction]:
    """Inverse of u in Q[x]/(poly) via the multiplication-by-u matrix."""
    d = len(poly) - 1
    cols = []
    for j in range(d):
        ej = [Fraction(0)] * d
        ej[j] = Fraction(1)
        cols.append(_poly_mul_mod(list(u), ej, poly))
    mat = [[cols[j][i] for j in range(d)] for i in range(d)]
    rhs = [Fraction(1)] + [Fraction(0)] * (d - 1)
    y = frac_solve(mat, rhs)
    assert y is not None, "element is not invertible"
    return y


def field_kernel_vector(B: list[list[list[Fraction]]], poly: list[Fraction]) -> list[list[Fraction]]:
    """One kernel vector of a square matrix over Q[x]/(poly).

    Requires the kernel to be exactly one-dimensional (simple eigenvalue).
    """
    n = len(B)
    rows = [[list(entry) for entry in row] for row in B]
    pivots: dict[int, int] = {}
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if any(x != 0 for x in rows[i][c])), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = field_inv(rows[r][c], poly)
        rows[r] = [_poly_mul_mod(inv, x, poly) for x in rows[r]]
        for i in range(n):
            if i != r and any(x != 0 for x in rows[i][c]):
                f = rows[i][c]
                rows[i] = [
                    [a - b for a, b in zip(rows[i][j], _poly_mul_mod(f, rows[r][j], poly))]
                    for j in range(n)
                ]
        pivots[c] = r
        r += 1
    free = [c for c in range(n) if c not in pivots]
    assert len(free) == 1, f"expected a simple eigenvalue, kernel dimension {len(free)}"
    d = len(poly) - 1
    v: list[list[Fraction]] = [[Fraction(0)] * d for _ in range(n)]
    v[free[0]][0] = Fraction(1)
    for c, rr in pivots.items():
        v[c] = [-x for x in rows[rr][free[0]]]
    return v


# ---------------------------------------------------------------------------
# characteristic polynomial and rational factorization
# ---------------------------------------------------------------------------


def charpoly(A: list[list[Fraction]]) -> list[Fraction]:
    """Monic characteristic polynomial, low-to-high, by Faddeev-LeVerrier."""
    n = len(A)
    ident = [[Fraction(i == j) for j in range(n)] for i in range(n)]
    M = [row[:] for row in ident]
    coeffs = [Fraction(1)]  # leading coefficient
    for i in range(1, n + 1):
        AM = [
            [sum(A[r][t] * M[t][c] for t in range(n)) for c in range(n)]
            for r in range(n)
        ]
        c = -sum(AM[r][r] for r in range(n)) / i
        coeffs.append(c)
        M = [
            [AM[r][cc] + (c if r == cc else 0) for cc in range(n)]
            for r in range(n)
        ]
    assert all(all(x == 0 for x in row) for row in M), "Faddeev-LeVerrier check failed"
    return list(reversed(coeffs))


def poly_div_linear(poly: list[Fraction], root: Fraction) -> list[Fraction]:
    """Divide a monic polynomial (low-to-high) by (x - root); remainder must vanish."""
    n = len(poly) - 1
    out = [Fraction(0)] * n
    carry = Fraction(0)
    for i in range(n - 1, -1, -1):
        carry = poly[i + 1] + root * carry
        out[i] = carry
    rem = poly[0] + root * out[0]
    assert rem == 0, "not a root"
    return out + [Fraction(0)] * 0


def factor_integer_monic(poly: list[Fraction], root_bound: int) -> list[list[Fraction]]:
    """Irreducible monic factors over Q of a monic integer polynomial.

    Strips integer roots (all rational roots of a monic integer polynomial are
    integers, and Hecke eigenvalues obey the Deligne bound `root_bound`), then
    relies on the fact that a rootless quadratic or cubic is irreducible.
    """
    assert all(c.denominator == 1 for c in poly), "expected integer coefficients"
    factors: list[list[Fraction]] = []
    rest = list(poly)

    def value(p: list[Fraction], x: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(p):
            acc = acc * x + c
        return acc

    changed = True
    while changed and len(rest) > 1:
        changed = False
        for r in range(-root_bound, root_bound + 1):
            if value(rest, r) == 0:
                factors.append([Fraction(-r), Fraction(1)])
                rest = poly_div_linear(rest, Fraction(r))
                changed = True
                break
    if len(rest) - 1 >= 4:
        raise NotImplementedError("rootless factor of degree >= 4")
    if len(rest) > 1:
        factors.append(rest)
    factors.sort(key=lambda f: (len(f), [str(c) for c in f]))
    return factors


# ---------------------------------------------------------------------------
# the weight-8 level-5 space
# ---------------------------------------------------------------------------


def weight8_level5_basis(prec: int) -> tuple[list[QSeries], list[Fraction]]:
    """Basis of M_8(Gamma_0(5)) and the Fricke constant-term row.

    Basis: E4^2, E4*V5E4, (V5E4)^2, phi^4, phi^2*E4 where phi = E2 - 5*V5E2
    is the weight-2 Eisenstein series of level 5 (constant term -4).  The
    Fricke involution W_5 acts by E4 -> 25*V5E4, V5E4 -> E4/25, phi -> -phi,
    so the constant term of f|W_5 is a known linear functional of the
    coordinates; it vanishes exactly when f vanishes at the cusp 0.
    """
    e2 = eisenstein(2, prec)
    e4 = eisenstein(4, prec)
    v5e4 = apply_operator(e4, "V", 5).truncate(prec)
    phi = e2 - apply_operator(e2, "V", 5).truncate(prec) * 5
    basis = [e4 * e4, e4 * v5e4, v5e4 * v5e4, phi**4, phi * phi * e4]
    basis = [b.truncate(prec) for b in basis]
    fricke_consts = [
        Fraction(625),      # (25 V5E4)^2
        Fraction(1),        # (25 V5E4)(E4/25)
        Fraction(1, 625),   # (E4/25)^2
        Fraction(256),      # (-phi)^4
        Fraction(400),      # (-phi)^2 * 25 V5E4
    ]
    return basis, fricke_consts


def hecke_t2(f: QSeries) -> QSeries:
    """T_2 in weight 8 on a level-5 form: a(n) -> a(2n) + 128 a(n/2)."""
    prec = f.prec // 2
    coeffs = {}
    for n in range(prec):
        a = f.coeff_at_q(2 * n)
        if n % 2 == 0:
            a += 128 * f.coeff_at_q(n // 2)
        if a:
            coeffs[n] = a
    return QSeries(1, prec, coeffs)


def compute_eigenforms(prec: int) -> list[dict]:
    spec = dim_star(LEVEL, WEIGHT)
    basis, fricke = weight8_level5_basis(prec)
    coeff_mat = [[b.coeff_at_q(n) for n in range(prec)] for b in basis]
    assert frac_rank(coeff_mat) == len(basis), "spanning set is degenerate"

    # cusp subspace: constant term zero at infinity and at 0 (Fricke image)
    cond = [
        [b.coeff_at_q(0) for b in basis],
        list(fricke),
    ]
    cusp_coords = frac_nullspace(cond)
    assert len(cusp_coords) == spec.dim_cusp, (len(cusp_coords), spec.dim_cusp)

    cusp_mat = [
        [sum(v[i] * coeff_mat[i][n] for i in range(len(basis))) for n in range(prec)]
        for v in cusp_coords
    ]
    assert all(row[0] == 0 for row in cusp_mat)
    ech, pivots = frac_rref([row[1:] for row in cusp_mat])  # columns are a_1, a_2, ...
    ech = ech[: len(pivots)]
    g_forms = [
        QSeries(1, prec, {n + 1: c for n, c in enumerate(row) if c}) for row in ech
    ]
    ncusp = len(g_forms)
    t2_prec = prec // 2
    assert max(pivots) + 1 < t2_prec, "precision too low to read coordinates"

    # T_2 action matrix: row i holds the coordinates of T_2 g_i
    A: list[list[Fraction]] = []
    for g in g_forms:
        tg = hecke_t2(g)
        coords = [tg.coeff_at_q(p + 1) for p in pivots]
        A.append(coords)
        # verify the claimed coordinates reproduce T_2 g everywhere it is known
        for n in range(1, t2_prec):
            lhs = tg.coeff_at_q(n)
            rhs = sum(coords[j] * g_forms[j].coeff_at_q(n) for j in range(ncusp))
            assert lhs == rhs, f"T_2 does not stabilize the cusp space at q^{n}"

    cp = charpoly(A)
    root_bound = 2 * math.isqrt(2 ** (WEIGHT - 1)) + 1
    factors = factor_integer_monic(cp, root_bound)
    assert sum(len(f) - 1 for f in factors) == ncusp

    records = []
    for poly in factors:
        d = len(poly) - 1
        omega = [-poly[0]] if d == 1 else [Fraction(0), Fraction(1)] + [Fraction(0)] * (d - 2)
        # left eigenvector of A over Q[x]/(poly): right kernel of A^T - omega I
        B: list[list[list[Fraction]]] = []
        for i in range(ncusp):
            row = []
            for j in range(ncusp):
                entry = [Fraction(0)] * d
                entry[0] = A[j][i]
                if i == j:
                    entry = [entry[t] - omega[t] for t in range(d)]
                row.append(entry)
            B.append(row)
        v = field_kernel_vector(B, poly)
        # eigenform coefficients a_n = sum_i v_i g_i(n), then normalize a_1 = 1
        a1 = [Fraction(0)] * d
        for i in range(ncusp):
            c = g_forms[i].coeff_at_q(1)
            if c:
                for t in range(d):
                    a1[t] += v[i][t] * c
        scale = field_inv(a1, poly)
        coeffs = []
        for n in range(1, prec):
            an = [Fraction(0)] * d
            for i in range(ncusp):
                c = g_forms[i].coeff_at_q(n)
                if c:
                    for t in range(d):
                        an[t] += v[i][t] * c
            coeffs.append(_poly_mul_mod(an, scale, poly))
        # a_2 must equal the field generator (or the rational eigenvalue)
        assert coeffs[1] == omega, (coeffs[1], omega)
        records.append(
            {
                "level": LEVEL,
                "weight": WEIGHT,
                "field_poly": [_fr_json(c) for c in poly],
                "coeffs": [[_fr_json(c) for c in row] for row in coeffs],
            }
        )

    for rec in records:
        EigenformData.from_json(rec)  # runs the full multiplicativity/Hecke validation
    return records


def _fr_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--prec", type=int, default=60, help="coefficients a_1..a_{prec-1}")
    ap.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parent.parent / "src" / "maxlat" / "data"),
        help="output directory",
    )
    args = ap.parse_args()
    records = compute_eigenforms(args.prec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"newforms_{LEVEL}_{WEIGHT}.json"
    path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
    degs = [len(r["field_poly"]) - 1 for r in records]
    print(f"wrote {path}: {len(records)} orbit(s), degrees {degs}")


if __name__ == "__main__":
    main()
