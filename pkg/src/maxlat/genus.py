"""Maximality, even overlattices, Kneser q-neighbors and genus enumeration.

Neighbor generation at a prime q coprime to det·level: isotropic lines of the
quadratic form mod q are enumerated (fully, when q^dim is small enough, with
orbit reduction under the automorphism group; otherwise by deterministic
seeded sampling with saturation passes), each line is lifted so that
q² | (x,x), and the neighbor  L(x,q) = {y : (x,y) ≡ 0 mod q} + Z·(x/q)  is
built by Hermite normal form.  Genus enumeration is a breadth-first search
with fingerprint + isometry deduplication.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from maxlat.intmat import (
    factorize,
    frac_rank,
    hnf_rows,
    matmul_rows,
    np_int,
    transpose_rows,
)
from maxlat.lll import lll_gram
from maxlat.isometry import are_isometric, aut_info, fingerprint
from maxlat.mass import try_siegel_mass
from maxlat.qforms import Lattice, discriminant_form, adjoint, dual_at_p
from maxlat.shells import theta_series

LINE_CAP = 2_000_000  # largest q^dim for full isotropic-line enumeration


# ---------------------------------------------------------------------------
# maximality and overlattices
# ---------------------------------------------------------------------------


def is_maximal(L: Lattice) -> bool:
    """True iff L admits no proper even overlattice (discriminant form anisotropic)."""
    N = L.level
    assert all(e == 1 for e in factorize(N).values()), "squarefree level required"
    return discriminant_form(L).first_isotropic() is None


def is_maximal_at(L: Lattice, p: int) -> bool:
    """True iff the p-part of the discriminant form is anisotropic."""
    return discriminant_form(L).first_isotropic(p) is None


def _adjoin_class(L: Lattice, disc, coeffs) -> Lattice:
    """Even overlattice L + Z·v where v is the representative of a disc class."""
    v = disc.vector_of(coeffs)
    n = L.dim
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    rows = [[den if i == j else 0 for j in range(n)] for i in range(n)]
    rows.append([int(x * den) for x in v])
    H = hnf_rows(rows)
    G = L.gram_rows()
    HG = matmul_rows(matmul_rows(H, G), transpose_rows(H))
    assert all(x % (den * den) == 0 for row in HG for x in row)
    return Lattice([[x // (den * den) for x in row] for row in HG])


def _saturate_even(L: Lattice) -> Lattice:
    """Adjoin isotropic discriminant classes until none remain (any level)."""
    while True:
        disc = discriminant_form(L)
        iso = disc.first_isotropic()
        if iso is None:
            return L
        L = _adjoin_class(L, disc, iso)


def maximal_overlattice(L: Lattice) -> Lattice:
    """A maximal even overlattice of L (deterministic first-found glue chain)."""
    N = L.level
    assert all(e == 1 for e in factorize(N).values()), "squarefree level required"
    return _saturate_even(L)


# ---------------------------------------------------------------------------
# neighbors
# ---------------------------------------------------------------------------


def _modinv(a: int, q: int) -> int:
    return pow(a % q, -1, q)


def _lift_line(L: Lattice, q: int, x: np.ndarray) -> np.ndarray:
    """Lift a mod-q isotropic vector so that Q(x) ≡ 0 mod q² (and x ∉ qL)."""
    G = L.gram_np()
    x = x.astype(np.int64)
    t = int(x @ G @ x)
    assert (t // 2) % q == 0, "line is not isotropic mod q"
    c = (-((t // 2) // q)) % q
    if c:
        w = (G @ x) % q
        i = int(np.flatnonzero(w)[0])
        lam = (c * _modinv(int(w[i]), q)) % q
        x = x.copy()
        x[i] += q * lam
        t = int(x @ G @ x)
    assert (t // 2) % (q * q) == 0
    return x


def _neighbor_from_line(L: Lattice, q: int, x: np.ndarray) -> Lattice:
    """The q-neighbor L(x,q) for a lifted x (Q(x) ≡ 0 mod q², x ∉ qL)."""
    G = L.gram_rows()
    Gnp = L.gram_np()
    n = L.dim
    w = (Gnp @ x) % q
    nz = np.flatnonzero(w)
    assert len(nz), "x lies in q·L^#; form degenerate mod q?"
    i0 = int(nz[0])
    inv = _modinv(int(w[i0]), q)
    rows = []
    for i in range(n):
        if i == i0:
            rows.append([q * q if j == i0 else 0 for j in range(n)])  # q·(q·e_i0)
        else:
            coef = (-int(w[i]) * inv) % q
            r = [0] * n
            r[i] = q
            r[i0] = q * coef
            rows.append(r)  # q·(e_i + coef·e_i0)
    rows.append([int(v) for v in x])
    H = hnf_rows(rows)
    assert len(H) == n
    HG = matmul_rows(matmul_rows(H, G), transpose_rows(H))
    q2 = q * q
    assert all(v % q2 == 0 for row in HG for v in row), "neighbor Gram not integral"
    gram = [[v // q2 for v in row] for row in HG]
    out = Lattice(gram)
    assert out.det == L.det, "neighbor must preserve the determinant"
    return out


def _all_line_reps(q: int, m: int) -> np.ndarray:
    """Canonical projective-line representatives of F_q^m (first nonzero = 1)."""
    total = q**m
    assert total <= LINE_CAP * max(1, q - 1), "too many lines for full enumeration"
    idx = np.arange(total, dtype=np.int64)
    digits = np.empty((total, m), dtype=np.int8)
    for j in range(m):
        digits[:, m - 1 - j] = (idx // q**j) % q
    nz = digits != 0
    first = np.argmax(nz, axis=1)
    lead = digits[np.arange(total), first]
    keep = lead == 1
    return digits[keep]


def _isotropic_lines(L: Lattice, q: int) -> np.ndarray:
    """All canonical line representatives with Q ≡ 0 mod q (form nondegenerate)."""
    reps = _all_line_reps(q, L.dim)
    G = L.gram_np()
    R = reps.astype(np.int64)
    t = np.einsum("ij,jk,ik->i", R, G, R)
    keep = ((t // 2) % q) == 0
    return reps[keep]


def neighbors(L: Lattice, q: int) -> list[Lattice]:
    """One q-neighbor per isotropic projective line mod q (full enumeration)."""
    assert (L.det * L.level) % q != 0, "q must be coprime to det·level"
    assert L.dim >= 2
    out = []
    for rep in _isotropic_lines(L, q):
        x = _lift_line(L, q, rep.astype(np.int64))
        out.append(_neighbor_from_line(L, q, x))
    return out


# ---------------------------------------------------------------------------
# orbit reduction of lines under Aut(L) mod q
# ---------------------------------------------------------------------------


def _encode(rows: np.ndarray, q: int) -> np.ndarray:
    m = rows.shape[1]
    pw = (q ** np.arange(m - 1, -1, -1)).astype(np.int64)
    return rows.astype(np.int64) @ pw


def _canonicalize_mod_q(rows: np.ndarray, q: int) -> np.ndarray:
    """Scale rows mod q so the first nonzero entry is 1."""
    R = rows % q
    nz = R != 0
    first = np.argmax(nz, axis=1)
    lead = R[np.arange(len(R)), first]
    inv_table = np.array([0] + [_modinv(a, q) for a in range(1, q)], dtype=np.int64)
    return (R * inv_table[lead][:, None]) % q


def _orbit_reps(lines: np.ndarray, gens: list[np.ndarray], q: int) -> np.ndarray:
    """Representatives of the ⟨gens⟩-orbits on the given canonical lines."""
    if not len(lines) or not gens:
        return lines
    codes = _encode(lines, q)
    order = np.argsort(codes)
    lines = lines[order]
    codes = codes[order]
    labels = np.arange(len(lines), dtype=np.int64)
    perms = []
    for g in gens:
        img = _canonicalize_mod_q(lines.astype(np.int64) @ g.T % q, q)
        img_codes = _encode(img, q)
        pos = np.searchsorted(codes, img_codes)
        ok = (pos < len(codes)) & (codes[pos.clip(max=len(codes) - 1)] == img_codes)
        assert ok.all(), "generator does not permute the lines"
        perms.append(pos)
    while True:
        changed = False
        for p in perms:
            new = np.minimum(labels, labels[p])
            if not np.array_equal(new, labels):
                labels = new
                changed = True
        new = np.minimum(labels, labels[labels])
        if not np.array_equal(new, labels):
            labels = new
            changed = True
        if not changed:
            break
    return lines[np.unique(labels)]


# ---------------------------------------------------------------------------
# genus enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StopRule:
    kind: str  # "closure" | "rank" | "classes"
    target: int = 0

    @staticmethod
    def closure() -> "StopRule":
        return StopRule("closure")

    @staticmethod
    def rank(target: int) -> "StopRule":
        return StopRule("rank", target)

    @staticmethod
    def class_budget(target: int) -> "StopRule":
        return StopRule("classes", target)


@dataclass
class GenusRecord:
    seed: Lattice
    neighbor_prime: int
    classes: list  # [(Lattice, aut_order), ...]
    mass_sum: Fraction
    complete: bool
    method: str  # "closure" | "mass" | "saturation" | "rank" | "classes"
    target_mass: "Fraction | None" = None  # analytic mass of the genus, when computable

    @property
    def class_number(self) -> int:
        return len(self.classes)

    @property
    def mass_certified(self) -> bool:
        """True iff the accumulated 1/|Aut| sum equals the analytic genus mass."""
        return self.target_mass is not None and self.mass_sum == self.target_mass

    def lattices(self) -> list[Lattice]:
        return [L for L, _a in self.classes]


def default_neighbor_prime(L: Lattice) -> int:
    q = 2
    while (L.det * L.level) % q == 0 or any(q % d == 0 for d in range(2, isqrt(q) + 1)):
        q += 1
    return q


def _canonical_class(L: Lattice) -> Lattice:
    B, _U = lll_gram(L.gram_rows())
    return Lattice(B, check=False)


def _adjoint_theta_rank(classes: list[Lattice], prec: int) -> int:
    rows = []
    for L in classes:
        adj = _canonical_class(adjoint(L, L.level))
        th = theta_series(adj, prec)
        rows.append([th.coeff(i) for i in range(prec)])
    return frac_rank(rows)


def enumerate_genus(
    seed: Lattice,
    q: "int | None" = None,
    stop: "StopRule | None" = None,
    *,
    sample_lines: int = 250,
    clean_passes: int = 2,
    rank_prec_margin: int = 4,
    progress: "callable | None" = None,
) -> GenusRecord:
    """BFS over the q-neighbor graph with fingerprint + isometry dedup.

    Stop rules: closure (explore every orbit of lines of every class — falls
    back to seeded sampling with saturation when q^dim is too large), rank
    (stop once the adjoint theta span reaches the target dimension), classes
    (stop at a class budget).

    Whenever the analytic genus mass is computable, the accumulated 1/|Aut|
    sum is compared against it: reaching the target proves completeness (and
    lets the search stop early, method "mass"), while closure with a smaller
    sum is reported as incomplete instead of trusting graph connectivity.
    """
    stop = stop or StopRule.closure()
    assert is_maximal(seed), "seed must be a maximal even lattice"
    if q is None:
        q = default_neighbor_prime(seed)
    assert (seed.det * seed.level) % q != 0
    m = seed.dim
    # Early-stop searches (rank / class budget) do not need every line of every
    # class, so they switch to sampling at a much smaller threshold; closure
    # needs the full orbit sweep for its completeness claim.
    line_cap = LINE_CAP if stop.kind == "closure" else 100_000
    full_lines = q**m <= line_cap * max(1, q - 1)
    # High-dimensional high-level lattices are dense (millions of vectors below
    # the reduced diagonal), which drowns the shell-based invariants.  Their
    # adjoints are sparse and Aut(L) = Aut(sqrt(N) L^#), so all per-class
    # bookkeeping (fingerprint, isometry, automorphisms) runs on the adjoint.
    adjoint_side = m >= 16 and seed.level > 3
    if adjoint_side:
        full_lines = False  # line-orbit reduction would need primary-side generators
    mass_target = try_siegel_mass(seed)

    classes: list[Lattice] = []
    reps: list[Lattice] = []  # bookkeeping side: the class itself, or its adjoint
    auts: list[int] = []
    by_fp: dict = {}
    mass_running = Fraction(0)
    digest = hashlib.sha256(repr((seed.gram, q)).encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))

    def register(L: Lattice) -> bool:
        nonlocal mass_running
        Lc = _canonical_class(L)
        rep = _canonical_class(adjoint(Lc, seed.level)) if adjoint_side else Lc
        fp = fingerprint(rep)
        for idx in by_fp.get(fp, []):
            if are_isometric(reps[idx], rep) is not None:
                return False
        classes.append(Lc)
        reps.append(rep)
        auts.append(aut_info(rep)[0])
        mass_running += Fraction(1, auts[-1])
        by_fp.setdefault(fp, []).append(len(classes) - 1)
        if progress:
            progress(len(classes), Lc)
        return True

    register(seed)

    def mass_reached() -> bool:
        return mass_target is not None and mass_running == mass_target

    def done(complete: bool, method: str) -> GenusRecord:
        return _finish(seed, q, classes, auts, complete, method, mass_target, reps)

    def reached_stop() -> bool:
        if stop.kind == "classes":
            return len(classes) >= stop.target
        if stop.kind == "rank":
            return _adjoint_theta_rank(classes, stop.target + rank_prec_margin) >= stop.target
        return False

    def explore_lines(L: Lattice, lines: np.ndarray) -> tuple["str | None", bool]:
        """Process lines of one class; returns (early-exit reason, new class found)."""
        found_any = False
        for rep in lines:
            if mass_reached():
                return "mass", found_any
            x = _lift_line(L, q, rep.astype(np.int64))
            nb = _neighbor_from_line(L, q, x)
            if register(nb):
                found_any = True
                if stop.kind != "closure" and reached_stop():
                    return "stop", found_any
        if mass_reached():
            return "mass", found_any
        return None, found_any

    if stop.kind != "closure" or full_lines:
        # breadth-first closure over orbit representatives
        queue = [0]
        seen = set()
        while queue:
            if mass_reached():
                return done(True, "mass")
            i = queue.pop(0)
            if i in seen:
                continue
            seen.add(i)
            L = classes[i]
            if full_lines:
                lines = _isotropic_lines(L, q)
                gens = [g % q for g in aut_info(L)[1]]
                lines = _orbit_reps(lines, gens, q)
            else:
                lines = _sample_isotropic_lines(L, q, sample_lines, rng)
            before = len(classes)
            code, _found = explore_lines(L, lines)
            if code == "mass":
                return done(True, "mass")
            if code == "stop":
                return done(False, stop.kind)
            queue.extend(range(before, len(classes)))
            queue = [t for t in queue if t not in seen]
            if stop.kind != "closure" and reached_stop():
                return done(False, stop.kind)
        if stop.kind == "closure":
            # graph closure; if a mass target exists it must agree, else the
            # genus has neighbor-unreachable classes (several spinor genera)
            return done(mass_target is None or mass_running == mass_target, "closure")
        # stop rule was rank/classes but closure happened first
        return done(full_lines and (mass_target is None or mass_running == mass_target), stop.kind)

    # sampled saturation for closure on large q^dim
    clean = 0
    while clean < clean_passes:
        if mass_reached():
            return done(True, "mass")
        new_found = False
        for i in range(len(classes)):
            L = classes[i]
            lines = _sample_isotropic_lines(L, q, sample_lines, rng)
            code, found = explore_lines(L, lines)
            if code == "mass":
                return done(True, "mass")
            if found:
                new_found = True
        clean = 0 if new_found else clean + 1
    return done(False, "saturation")


def _sample_isotropic_lines(L: Lattice, q: int, count: int, rng) -> np.ndarray:
    """Deterministically seeded random isotropic lines (canonical, deduplicated)."""
    G = L.gram_np()
    m = L.dim
    out = []
    seen = set()
    tries = 0
    while len(out) < count and tries < 40:
        tries += 1
        batch = rng.integers(0, q, size=(count * 4, m), dtype=np.int64)
        t = np.einsum("ij,jk,ik->i", batch, G, batch)
        batch = batch[((t // 2) % q) == 0]
        batch = batch[(batch % q).any(axis=1)]
        if not len(batch):
            continue
        batch = _canonicalize_mod_q(batch, q)
        for row in batch:
            key = tuple(int(v) for v in row)
            if key not in seen:
                seen.add(key)
                out.append(row)
                if len(out) >= count:
                    break
    return np.array(out, dtype=np.int8) if out else np.zeros((0, m), dtype=np.int8)


def _finish(seed, q, classes, auts, complete, method, target_mass=None, reps=None) -> GenusRecord:
    reps = reps if reps is not None else classes
    order = sorted(range(len(classes)), key=lambda i: (fingerprint(reps[i]), classes[i].gram))
    classes = [classes[i] for i in order]
    auts = [auts[i] for i in order]
    mass = sum((Fraction(1, a) for a in auts), Fraction(0))
    return GenusRecord(
        seed=seed,
        neighbor_prime=q,
        classes=list(zip(classes, auts)),
        mass_sum=mass,
        complete=complete,
        method=method,
        target_mass=target_mass,
    )


# ---------------------------------------------------------------------------
# existence and seeds (quaternion-order construction)
# ---------------------------------------------------------------------------


def exists_maximal(N: int, m: int) -> bool:
    """Existence of a maximal even lattice of level N, det N², dimension m."""
    assert N > 1 and all(e == 1 for e in factorize(N).values()), "N must be squarefree > 1"
    assert m % 2 == 0
    omega = len(factorize(N))
    if m % 8 == 4:
        return omega % 2 == 1
    if m % 8 == 0:
        return omega % 2 == 0
    return False


def construct_seed(N: int, m: int) -> Lattice:
    """A maximal even lattice of level N, det N², dim m (catalog orders + E8 padding)."""
    from maxlat import catalog

    assert exists_maximal(N, m), f"no maximal even lattice with level {N}, det {N * N}, dim {m}"
    primes = sorted(factorize(N))
    omega = len(primes)
    if omega % 2 == 1:
        core = catalog.quaternion_order_lattice(N)
        pad = (m - 4) // 8
    else:
        # split N into two parts with odd numbers of primes: first prime | rest
        N1, N2 = primes[0], N // primes[0]
        core = catalog.orthogonal_sum_named(
            catalog.quaternion_order_lattice(N1), catalog.quaternion_order_lattice(N2)
        )
        pad = (m - 8) // 8
    L = core
    for _ in range(pad):
        L = catalog.orthogonal_sum_named(L, catalog.root_lattice("E8"))
    D, lvl = L.det, L.level
    assert (D, lvl) == (N * N, N), f"seed invariants wrong: det {D}, level {lvl}"
    assert is_maximal(L)
    return L


# ---------------------------------------------------------------------------
# executable form of the local maximality criterion via partial dual thetas
# ---------------------------------------------------------------------------


def theorem31_check(L: Lattice, p: int, prec: int) -> bool:
    """Compare integral-exponent theta counts of L^{#,p} with theta of L.

    Returns True iff the two agree up to the given precision — which happens
    exactly when L is maximal at p.
    """
    assert L.level % p == 0 and (L.level // p) % p != 0, "p must exactly divide the level"
    th_dual = theta_series(dual_at_p(L, p), prec)
    th = theta_series(L, prec)
    d = th_dual.denom
    for n in range(prec):
        lhs = th_dual.coeffs.get(n * d, Fraction(0))
        if lhs != th.coeffs.get(n, Fraction(0)):
            return False
    return True
