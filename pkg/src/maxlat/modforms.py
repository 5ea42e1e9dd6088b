"""Exact q-expansion linear algebra for the trace-killed spaces M_k(N)^*.

M_k(N)^* consists of the weight-k level-N forms annihilated by
W_p + p^{1-k/2} U(p) for every p | N.  The module provides:

* dimensions via a newform-sum oracle (classical dimension formulas for
  cusp forms on Gamma_0(M) plus Moebius inversion for new subspaces),
  with the one-line closed form as a cross-check where it is unambiguous;
* coefficient-local operators U(p), V(p), U^0(p);
* Eisenstein series E_k and their level-N combinations E_k^(N);
* the exact 2x2 action of U(p), W_p and the trace on the span {f, f|V(p)}
  of a level-one eigenform;
* ingestion of newform coefficient data (exact coordinates in a power
  basis of a stated minimal polynomial) and rational spanning sets;
* theta-series bases from genus classes, extremal-form solving with a
  Weierstrass-property check, and congruence checks;
* verification that the level-2 and level-3 trace-killed modules are free
  over level-one forms with bases (e_2, e_4) and (e_2, e_4, h_6).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from maxlat.intmat import divisors, factorize, frac_rank, frac_rref, frac_solve, moebius
from maxlat.qseries import QSeries, sigma
from maxlat.qforms import Lattice, adjoint


# ---------------------------------------------------------------------------
# classical dimensions for Gamma_0(M), trivial character, even weight
# ---------------------------------------------------------------------------


def _ell_term_2(p: int) -> int:
    """Factor (1 + (-1|p)) in the count of order-2 elliptic points."""
    if p == 2:
        return 1
    return 2 if p % 4 == 1 else 0


def _ell_term_3(p: int) -> int:
    """Factor (1 + (-3|p)) in the count of order-3 elliptic points."""
    if p == 3:
        return 1
    if p == 2:
        return 0
    return 2 if p % 3 == 1 else 0


def _gamma0_data(M: int) -> tuple[int, int, int, int, int]:
    """(index, eps2, eps3, eps_inf, genus) of X_0(M) for squarefree M."""
    fac = factorize(M)
    index = M
    for p in fac:
        index = index * (p + 1) // p
    eps2 = 1
    eps3 = 1
    for p in fac:
        eps2 *= _ell_term_2(p)
        eps3 *= _ell_term_3(p)
    eps_inf = len(divisors(M))  # squarefree: gcd(d, M/d) = 1 at every cusp
    g = Fraction(index, 12) - Fraction(eps2, 4) - Fraction(eps3, 3) - Fraction(eps_inf, 2) + 1
    assert g.denominator == 1
    return index, eps2, eps3, eps_inf, int(g)


def dim_cusp_gamma0(M: int, k: int) -> int:
    """dim S_k(Gamma_0(M)) for even k ≥ 2 and squarefree M."""
    assert k >= 2 and k % 2 == 0
    _index, eps2, eps3, eps_inf, g = _gamma0_data(M)
    if k == 2:
        return g
    d = (k - 1) * (g - 1) + (k // 4) * eps2 + (k // 3) * eps3 + (k // 2 - 1) * eps_inf
    assert d >= 0
    return d


def dim_modular_gamma0(M: int, k: int) -> int:
    """dim M_k(Gamma_0(M)) for even k ≥ 2 and squarefree M."""
    _index, _e2, _e3, eps_inf, _g = _gamma0_data(M)
    return dim_cusp_gamma0(M, k) + eps_inf - 1


def dim_new_gamma0(M: int, k: int) -> int:
    """dim S_k^new(Gamma_0(M)) by Moebius-type inversion (squarefree M)."""
    total = 0
    for d in divisors(M):
        total += (-2) ** len(factorize(M // d)) * dim_cusp_gamma0(d, k)
    assert total >= 0
    return total


@dataclass(frozen=True)
class SpaceSpec:
    N: int
    k: int
    dim_cusp: int

    @property
    def dim_full(self) -> int:
        return self.dim_cusp + 1


def dim_star(N: int, k: int) -> SpaceSpec:
    """Dimensions of S_k(N)^* / M_k(N)^* via the newform-sum oracle."""
    if k % 2 != 0:
        raise ValueError("weight must be even")
    assert N > 1 and all(e == 1 for e in factorize(N).values()), "N must be squarefree > 1"
    dim_cusp = sum(dim_new_gamma0(M, k) for M in divisors(N))
    return SpaceSpec(N=N, k=k, dim_cusp=dim_cusp)


def _jacobi_odd(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd n > 0."""
    assert n > 0 and n % 2 == 1
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def dim_star_closed_form(N: int, k: int) -> Fraction:
    """The one-line closed form for dim S_k(N)^*; only meaningful for odd (k-1)N.

    Returned as an exact rational so callers can detect non-integral output
    (which signals the ambiguous symbol convention at even arguments).
    """
    n = (k - 1) * N
    if n % 2 == 1:
        s1 = _jacobi_odd((-1) % n, n)
        s3 = _jacobi_odd((-3) % n, n)
    else:
        # even bottom: evaluate with the Kronecker extension, flagged unreliable
        s1 = _kronecker(-1, n)
        s3 = _kronecker(-3, n)
    return Fraction(n, 12) - Fraction(1, 2) - Fraction(s1, 4) - Fraction(s3, 3)


def _kronecker(a: int, n: int) -> int:
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    return result * _jacobi_odd(a % n, n)


# ---------------------------------------------------------------------------
# coefficient-local operators
# ---------------------------------------------------------------------------


def apply_operator(s: QSeries, op: str, p: int) -> QSeries:
    """U(p): a_n -> a_{np};  V(p): exponent n -> np;  U^0(p): keep integral exponents."""
    if op in ("U", "V"):
        if s.denom != 1:
            raise ValueError(f"{op}({p}) requires an integral-exponent series")
        if op == "U":
            prec = (s.prec + p - 1) // p
            coeffs = {n // p: a for n, a in s.coeffs.items() if n % p == 0}
            return QSeries(1, prec, coeffs)
        prec = (s.prec - 1) * p + 1
        return QSeries(1, prec, {n * p: a for n, a in s.coeffs.items()})
    if op == "U0":
        if s.denom != p:
            raise ValueError(f"U^0({p}) requires a series with exponent denominator {p}")
        prec = (s.prec + p - 1) // p
        coeffs = {n // p: a for n, a in s.coeffs.items() if n % p == 0}
        return QSeries(1, prec, coeffs)
    raise ValueError(f"unknown operator {op!r}")


# ---------------------------------------------------------------------------
# Eisenstein series and level-one forms
# ---------------------------------------------------------------------------


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n (B_1 = -1/2)."""
    assert n >= 0
    B = [Fraction(0)] * (n + 1)
    B[0] = Fraction(1)
    for m in range(1, n + 1):
        # sum_{j<m} C(m+1, j) B_j = 0  =>  B_m
        acc = Fraction(0)
        c = 1
        for j in range(m):
            acc += c * B[j]
            c = c * (m + 1 - j) // (j + 1)
        B[m] = -acc / (m + 1)
    return B[n]


def eisenstein(k: int, prec: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, exact rational coefficients."""
    assert k >= 2 and k % 2 == 0
    c = Fraction(-2 * k) / bernoulli(k)
    coeffs = {0: Fraction(1)}
    for n in range(1, prec):
        coeffs[n] = c * sigma(n, k - 1)
    return QSeries(1, prec, coeffs)


def eisenstein_star(N: int, k: int, prec: int) -> QSeries:
    """E_k^(N) = sum_{d|N} mu(d) (d sigma_{k-1}(d) / sigma_1(d)) E_k(d tau)."""
    if k == 2:
        raise ValueError("the weight-2 combination is not supported; use theta bases")
    assert k >= 4 and k % 2 == 0
    Ek = eisenstein(k, prec)
    out = QSeries.zero(prec)
    for d in divisors(N):
        coef = Fraction(moebius(d) * d * sigma(d, k - 1), sigma(d, 1))
        term = apply_operator(Ek, "V", d).truncate(prec) if d > 1 else Ek
        out = out + term * coef
    return out


def delta_series(prec: int) -> QSeries:
    """The discriminant cusp form (E_4^3 - E_6^2)/1728."""
    e4 = eisenstein(4, prec)
    e6 = eisenstein(6, prec)
    return (e4**3 - e6**2) / 1728


def dim_level1(k: int) -> int:
    """dim M_k(1) for even k (0 for negative or odd k)."""
    if k < 0 or k % 2 == 1:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def level1_basis(k: int, prec: int) -> list[QSeries]:
    """Monomials E_4^a E_6^b with 4a + 6b = k, in deterministic order."""
    if k == 0:
        return [QSeries.one(prec)]
    out = []
    e4 = eisenstein(4, prec)
    e6 = eisenstein(6, prec)
    for b in range(k // 6 + 1):
        rem = k - 6 * b
        if rem >= 0 and rem % 4 == 0:
            a = rem // 4
            out.append((e4**a) * (e6**b))
    assert len(out) == dim_level1(k)
    return out


# ---------------------------------------------------------------------------
# the 2-dimensional old-space span {f, f|V(p)} of a level-one eigenform
# ---------------------------------------------------------------------------


def oldspace_matrices(p: int, k: int, a_p: Fraction) -> dict[str, list[list[Fraction]]]:
    """Exact 2x2 matrices of U(p), W_p and the trace on coords (c0, c1).

    Coordinates represent c0 f + c1 f|V(p) for a normalized level-one
    eigenform f with f|U(p) = a_p f - p^(k-1) f|V(p), f|W_p = p^(k/2) f|V(p),
    (f|V(p))|W_p = p^(-k/2) f.
    """
    a_p = Fraction(a_p)
    half = Fraction(p) ** (k // 2)
    MU = [[a_p, Fraction(1)], [-(Fraction(p) ** (k - 1)), Fraction(0)]]
    MW = [[Fraction(0), 1 / half], [half, Fraction(0)]]
    scale = Fraction(p) ** (1 - k // 2)
    # trace(f) = f + p^{1-k/2} (f|W_p)|U(p): apply W first, then U
    MT = [
        [
            (1 if i == j else 0) + scale * sum(MU[i][t] * MW[t][j] for t in range(2))
            for j in range(2)
        ]
        for i in range(2)
    ]
    Mmem = [[MW[i][j] + scale * MU[i][j] for j in range(2)] for i in range(2)]
    return {"U": MU, "W": MW, "trace": MT, "membership": Mmem}


def oldspace_coords(p: int, a_p: Fraction) -> tuple[Fraction, Fraction]:
    """Coordinates of the trace-killed combination f^(p) = f - (p a_p/(p+1)) f|V(p)."""
    return (Fraction(1), -Fraction(p) * Fraction(a_p) / (p + 1))


def trace_eigenvalue(p: int, k: int, a_p: Fraction) -> Fraction:
    """lambda with trace(f^(p)) = lambda * f; equals p+1 - (p/(p+1)) a_p^2 p^(1-k)."""
    mats = oldspace_matrices(p, k, a_p)
    c = oldspace_coords(p, a_p)
    img = [sum(mats["trace"][i][j] * c[j] for j in range(2)) for i in range(2)]
    assert img[1] == 0, "trace of the killed combination must land on level one"
    lam = img[0]
    assert lam == (p + 1) - Fraction(p, p + 1) * Fraction(a_p) ** 2 * Fraction(p) ** (1 - k)
    return lam


# ---------------------------------------------------------------------------
# newform data with exact number-field coordinates
# ---------------------------------------------------------------------------


def _poly_mul_mod(a: list[Fraction], b: list[Fraction], poly: list[Fraction]) -> list[Fraction]:
    """Product of power-basis vectors modulo the monic polynomial (coeff list, low to high)."""
    d = len(poly) - 1
    prod = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] += x * y
    for i in range(len(prod) - 1, d - 1, -1):
        c = prod[i]
        if c:
            prod[i] = Fraction(0)
            for j in range(d):
                prod[i - d + j] -= c * poly[j]
    out = prod[:d]
    return out + [Fraction(0)] * (d - len(out))


def _power_sums(poly: list[Fraction], upto: int) -> list[Fraction]:
    """Newton power sums p_0..p_{upto-1} of the roots of the monic polynomial."""
    d = len(poly) - 1
    e = [Fraction((-1) ** i) * poly[d - i] for i in range(d + 1)]  # elementary symmetric
    p = [Fraction(d)]
    for m in range(1, upto):
        acc = Fraction(0)
        for i in range(1, min(m - 1, d) + 1):
            acc += Fraction((-1) ** (i - 1)) * e[i] * p[m - i]
        if m <= d:
            acc += Fraction((-1) ** (m - 1)) * m * e[m]
        p.append(acc)
    return p


@dataclass(frozen=True)
class EigenformData:
    """Normalized newform with coefficients in Q[x]/(field_poly), power-basis coords."""

    level: int
    weight: int
    field_poly: tuple[Fraction, ...]  # monic, low-to-high, length degree+1
    coeffs: tuple[tuple[Fraction, ...], ...]  # coeffs[n-1] = coords of a_n

    @property
    def degree(self) -> int:
        return len(self.field_poly) - 1

    @property
    def prec(self) -> int:
        return len(self.coeffs) + 1  # a_1..a_prec-1 available

    def a(self, n: int) -> tuple[Fraction, ...]:
        assert 1 <= n < self.prec
        return self.coeffs[n - 1]

    def validate(self) -> None:
        d = self.degree
        assert d >= 1 and self.field_poly[-1] == 1, "field polynomial must be monic"
        one = tuple([Fraction(1)] + [Fraction(0)] * (d - 1))
        assert self.a(1) == one, "newform must be normalized (a_1 = 1)"
        poly = list(self.field_poly)
        for m in range(2, self.prec):
            for n in range(2, self.prec):
                if m * n < self.prec and gcd(m, n) == 1:
                    prod = _poly_mul_mod(list(self.a(m)), list(self.a(n)), poly)
                    assert tuple(prod) == self.a(m * n), f"a_{m} a_{n} != a_{m*n}"
        for p in _primes_below(self.prec):
            if self.level % p == 0:
                continue
            pk = Fraction(p) ** (self.weight - 1)
            r = 2
            while p**r < self.prec:
                lhs = list(self.a(p**r))
                rec = _poly_mul_mod(list(self.a(p)), list(self.a(p ** (r - 1))), poly)
                prev = [pk * c for c in self.a(p ** (r - 2))]
                rhs = [rec[i] - prev[i] for i in range(d)]
                assert lhs == rhs, f"Hecke recursion fails at {p}^{r}"
                r += 1

    @staticmethod
    def from_json(obj: dict) -> "EigenformData":
        poly = tuple(Fraction(c) for c in obj["field_poly"])
        coeffs = tuple(tuple(Fraction(c) for c in row) for row in obj["coeffs"])
        data = EigenformData(
            level=int(obj["level"]), weight=int(obj["weight"]), field_poly=poly, coeffs=coeffs
        )
        data.validate()
        return data


def _primes_below(upto: int) -> list[int]:
    out = []
    for n in range(2, upto):
        if all(n % p for p in out):
            out.append(n)
    return out


def rational_orbit_span(data: EigenformData, N: int, prec: int) -> list[QSeries]:
    """Rational spanning set of the Galois orbit of the lifted form f^(N).

    Computes f^(N) = sum_{d | N/M} mu(d) (d a_f(d)/sigma_1(d)) f(d tau) with
    field coefficients, then returns the trace forms Tr(omega^i f^(N)) for
    i < degree — a rational basis of the orbit span.
    """
    M = data.level
    assert N % M == 0 and all(e == 1 for e in factorize(N).values())
    d_field = data.degree
    poly = list(data.field_poly)
    assert prec <= data.prec, "newform data precision too small"
    coeffs_field: list[list[Fraction]] = [[Fraction(0)] * d_field for _ in range(prec)]
    for d in divisors(N // M):
        mu = moebius(d)
        if mu == 0:
            continue
        scal = Fraction(mu * d, sigma(d, 1))
        factor = [scal * c for c in data.a(d)]
        for n in range(d, prec, d):
            term = _poly_mul_mod(factor, list(data.a(n // d)), poly)
            for i in range(d_field):
                coeffs_field[n][i] += term[i]
    # trace forms Tr(omega^i f^(N)): a rational basis of the Galois-orbit span
    psums = _power_sums(poly, 2 * d_field + 1)
    omega = [Fraction(0), Fraction(1)] + [Fraction(0)] * (d_field - 2)
    basis_pow = [[Fraction(1)] + [Fraction(0)] * (d_field - 1)]
    for _i in range(1, d_field):
        basis_pow.append(_poly_mul_mod(basis_pow[-1], omega, poly))
    out = []
    for i in range(d_field):
        series_coeffs = {}
        for n in range(1, prec):
            vec = _poly_mul_mod(coeffs_field[n], basis_pow[i], poly)
            tr = sum(vec[j] * psums[j] for j in range(d_field))
            if tr:
                series_coeffs[n] = tr
        out.append(QSeries(1, prec, series_coeffs))
    return out


def lift_newform(data: EigenformData, N: int, prec: int) -> QSeries:
    """f^(N) for a rational newform (degree-1 coefficient field)."""
    if data.degree != 1:
        raise ValueError("non-rational newform: use rational_orbit_span for a rational basis")
    return rational_orbit_span(data, N, prec)[0]


def newform_star_basis(N: int, k: int, prec: int, data_dir: "str | None" = None) -> list[QSeries]:
    """Basis of the trace-killed space assembled from ingested eigenform data.

    Expects one JSON file ``newforms_{M}_{k}.json`` per divisor M of N whose
    new subspace is nonzero, each holding a list of eigenform records in the
    ``EigenformData`` schema (one per Galois orbit).  The basis consists of
    the Eisenstein combination plus the rational orbit span of each lifted
    newform.  Raises ``FileNotFoundError`` with the missing path when data
    has not been ingested; callers that can fall back should catch it.
    """
    import json
    from pathlib import Path

    spec = dim_star(N, k)
    if data_dir is None:
        base = Path(__file__).resolve().parent / "data"
    else:
        base = Path(data_dir)
    basis = [eisenstein_star(N, k, prec)]
    for M in sorted(divisors(N)):
        want = dim_new_gamma0(M, k)
        if want == 0:
            continue
        path = base / f"newforms_{M}_{k}.json"
        if not path.is_file():
            raise FileNotFoundError(
                f"eigenform data not ingested: {path} (expected {want} dimensions of "
                f"level-{M} weight-{k} newforms; generate with tools/gen_newforms.py)"
            )
        records = json.loads(path.read_text())
        got = 0
        for rec in records:
            data = EigenformData.from_json(rec)
            assert data.level == M and data.weight == k, "data file mislabeled"
            basis.extend(rational_orbit_span(data, N, prec))
            got += data.degree
        assert got == want, f"{path} holds {got} dimensions, expected {want}"
    assert len(basis) == spec.dim_full
    rows = [[s.coeff_at_q(n) for n in range(min(prec, len(basis) + 8))] for s in basis]
    assert frac_rank(rows) == len(basis), "ingested basis is degenerate"
    return basis


# ---------------------------------------------------------------------------
# theta bases, extremal forms, congruences
# ---------------------------------------------------------------------------


def theta_basis(classes: list[Lattice], N: int, k: int, prec: int) -> tuple[list[QSeries], int]:
    """Adjoint theta series of genus classes and the rank of their coefficient matrix."""
    from maxlat.genus import is_maximal
    from maxlat.shells import theta_series

    m = 2 * k
    if m < 4:
        raise ValueError("theta bases need dimension at least 4")
    # spanning is a theorem for dimension > 4; for dimension 4 the caller
    # must check the returned rank against the space dimension itself
    spec = dim_star(N, k)
    assert prec >= spec.dim_full + 1, "precision below dim + margin"
    out = []
    for L in classes:
        assert L.dim == m and L.level == N and L.det == N * N
        assert is_maximal(L)
        out.append(theta_series(adjoint(L, N), prec))
    rows = [[s.coeff_at_q(n) for n in range(prec)] for s in out]
    return out, frac_rank(rows)


def extremal_form(N: int, k: int, basis: list[QSeries]) -> QSeries:
    """The unique normalized form 1 + O(q^d) in the span (d = dim M_k(N)^*).

    Verifies the Weierstrass property first: the projection of the span to
    the first d coefficients must be injective.
    """
    spec = dim_star(N, k)
    d = spec.dim_full
    assert basis, "empty basis"
    prec = min(s.prec for s in basis)
    assert all(s.denom == 1 for s in basis)
    assert prec >= 2 * d, "need precision at least 2*dim"
    rows = [[s.coeff_at_q(n) for n in range(prec)] for s in basis]
    full_rank = frac_rank(rows)
    assert full_rank <= d
    lead = [row[:d] for row in rows]
    lead_rank = frac_rank(lead)
    if lead_rank < full_rank:
        raise ValueError("Weierstrass property violated: leading block loses rank")
    if full_rank < d:
        raise ValueError(
            f"basis spans only {full_rank} of {d} dimensions; precision or genus insufficient"
        )
    # solve sum c_i * rows[i][:d] = (1, 0, ..., 0)
    cols = [[lead[i][j] for i in range(len(basis))] for j in range(d)]
    target = [Fraction(1)] + [Fraction(0)] * (d - 1)
    sol = frac_solve(cols, target)
    assert sol is not None
    out = QSeries.zero(prec)
    for c, s in zip(sol, basis):
        if c:
            out = out + s.truncate(prec) * c
    assert out.coeff_at_q(0) == 1 and all(out.coeff_at_q(n) == 0 for n in range(1, d))
    return out


def congruence_check(F: QSeries, p: int, k: int) -> bool:
    """True iff every stored non-constant coefficient of F is ≡ 0 mod p.

    Requires p ≥ 5 prime, (p-1) | k, constant term 1; raises on a
    non-p-integral coefficient (that signals a basis defect upstream).
    """
    assert p >= 5 and (k % (p - 1)) == 0
    assert F.denom == 1 and F.coeff_at_q(0) == 1
    for n, a in F.coeffs.items():
        if n == 0:
            continue
        if a.denominator % p == 0:
            raise ValueError(f"coefficient at q^{n} is not {p}-integral")
        if a.numerator % p != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# free-module structure of the trace-killed spaces at levels 2 and 3
# ---------------------------------------------------------------------------


def _euler_product(prec: int, step: int) -> QSeries:
    """prod_{n>=1} (1 - q^(step*n)) to the given precision."""
    # pentagonal number theorem: sum_{j} (-1)^j q^(step * j(3j-1)/2)
    coeffs = {0: Fraction(1)}
    j = 1
    while True:
        e1 = step * j * (3 * j - 1) // 2
        e2 = step * j * (3 * j + 1) // 2
        if e1 >= prec and e2 >= prec:
            break
        s = Fraction((-1) ** j)
        if e1 < prec:
            coeffs[e1] = s
        if e2 < prec:
            coeffs[e2] = s
        j += 1
    return QSeries(1, prec, coeffs)


def eta_power_series(prec: int, *, sixth_at: tuple[int, ...] = (1,)) -> QSeries:
    """q-expansion of prod_t eta(t tau)^6 over the given scales t (integral weight)."""
    shift = sum(6 * t for t in sixth_at)
    assert shift % 24 == 0, "eta product must have integral q-power"
    q_pow = shift // 24
    out = QSeries.one(prec)
    for t in sixth_at:
        base = _euler_product(prec, t)
        out = out * (base**6)
    return QSeries(1, prec, {n + q_pow: a for n, a in out.coeffs.items() if n + q_pow < prec})


def h6_series(prec: int) -> QSeries:
    """The normalized cusp form of weight 6 for level 3: eta(tau)^6 eta(3 tau)^6."""
    return eta_power_series(prec, sixth_at=(1, 3))


def e2_series(p: int, prec: int) -> QSeries:
    """The Eisenstein generator of the weight-2 trace-killed space (a theta series)."""
    from maxlat import catalog
    from maxlat.shells import theta_series

    if p == 2:
        return theta_series(catalog.catalog_get("D4"), prec)
    if p == 3:
        return theta_series(catalog.catalog_get("A2+A2"), prec)
    raise ValueError("only levels 2 and 3 have a catalogued weight-2 generator")


def e4_series(p: int, prec: int) -> QSeries:
    """The Eisenstein generator of the weight-4 trace-killed space at level 2 or 3."""
    E4 = eisenstein(4, prec)
    E4p = apply_operator(E4, "V", p).truncate(prec)
    if p == 2:
        return (E4p * 8 - E4 * 3) / 5
    if p == 3:
        return (E4p * 27 - E4 * 7) / 20
    raise ValueError("only levels 2 and 3 are supported")


def star_basis_products(p: int, k: int, prec: int) -> list[QSeries]:
    """A basis of the trace-killed space at level p ∈ {2, 3} built without thetas.

    Weight 2 is the Eisenstein generator alone; higher weights use the free
    module structure over level one (products of level-one bases with the
    weight-2/4/6 generators).  Dimension agreement and linear independence
    are asserted, so the return value is a genuine basis.
    """
    assert p in (2, 3) and k % 2 == 0 and k >= 2
    spec = dim_star(p, k)
    if k == 2:
        assert spec.dim_full == 1
        return [e2_series(p, prec)]
    weights = (k - 2, k - 4) if p == 2 else (k - 2, k - 4, k - 6)
    gens = [e2_series(p, prec), e4_series(p, prec)]
    if p == 3:
        gens.append(h6_series(prec))
    products = []
    for w, g in zip(weights, gens):
        for b in level1_basis(w, prec):
            products.append(b * g)
    assert len(products) == spec.dim_full, "module structure does not match the dimension"
    rows = [[s.coeff_at_q(n) for n in range(prec)] for s in products]
    assert frac_rank(rows) == len(products), "product basis unexpectedly degenerate"
    return products


def verify_module_decomposition(p: int, k: int, prec: "int | None" = None) -> dict:
    """Check the free-module structure of the trace-killed space at level p in weight k.

    Verifies dim M_{k-2}(1) + dim M_{k-4}(1) (+ dim M_{k-6}(1) at p=3)
    equals dim M_k(p)^* and that the products of level-one monomials with
    the generators are linearly independent.
    """
    assert p in (2, 3) and k % 2 == 0 and k >= 4
    spec = dim_star(p, k)
    weights = (k - 2, k - 4) if p == 2 else (k - 2, k - 4, k - 6)
    expected = sum(dim_level1(w) for w in weights)
    if prec is None:
        prec = expected + 6
    gens = [e2_series(p, prec), e4_series(p, prec)]
    if p == 3:
        gens.append(h6_series(prec))
    products = []
    for w, g in zip(weights, gens):
        for b in level1_basis(w, prec):
            products.append(b * g)
    rows = [[s.coeff_at_q(n) for n in range(prec)] for s in products]
    rank = frac_rank(rows)
    return {
        "dim_sum": expected,
        "dim_star": spec.dim_full,
        "dims_match": expected == spec.dim_full,
        "product_count": len(products),
        "product_rank": rank,
        "independent": rank == len(products),
        "ok": expected == spec.dim_full and rank == len(products),
    }
