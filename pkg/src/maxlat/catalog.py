"""Named lattice catalog: root lattices, quaternion-order lattices, glue
constructions, the Leech lattice, and two even unimodular 24-dimensional
hosts built from glue codes.

Every entry is built deterministically and validated against its expected
invariants (dimension, determinant, level, minimum) on first access; a
failing entry raises immediately rather than returning unverified data.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from maxlat.intmat import hnf_rows, matmul_rows, transpose_rows
from maxlat.qforms import Lattice, discriminant_form, orthogonal_sum
from maxlat.genus import _saturate_even, is_maximal


# ---------------------------------------------------------------------------
# root lattices
# ---------------------------------------------------------------------------


def _gram_An(n: int) -> list[list[int]]:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = 2
    for i in range(n - 1):
        g[i][i + 1] = g[i + 1][i] = -1
    return g


def _gram_Dn(n: int) -> list[list[int]]:
    # simple roots e_1-e_2, ..., e_{n-1}-e_n, e_{n-1}+e_n
    assert n >= 3
    g = _gram_An(n)
    g[n - 1][n - 2] = g[n - 2][n - 1] = 0
    g[n - 1][n - 3] = g[n - 3][n - 1] = -1
    return g


def _gram_En(n: int) -> list[list[int]]:
    # chain of n-1 nodes with the last node attached to chain node 3
    assert n in (6, 7, 8)
    g = _gram_An(n)
    g[n - 1][n - 2] = g[n - 2][n - 1] = 0
    g[n - 1][2] = g[2][n - 1] = -1
    return g


def root_lattice(name: str) -> Lattice:
    """Root lattice by name: An, Dn (n from the name), E6, E7, E8."""
    if name in ("E6", "E7", "E8"):
        return Lattice(_gram_En(int(name[1])), name=name)
    kind, num = name[0], name[1:]
    n = int(num)
    if kind == "A" and n >= 1:
        return Lattice(_gram_An(n), name=name)
    if kind == "D" and n >= 3:
        return Lattice(_gram_Dn(n), name=name)
    raise KeyError(f"unknown root lattice {name!r}")


def orthogonal_sum_named(L1: Lattice, L2: Lattice) -> Lattice:
    out = orthogonal_sum(L1, L2)
    if L1.name and L2.name:
        out = out.renamed(f"{L1.name}+{L2.name}")
    return out


# ---------------------------------------------------------------------------
# quaternion-order lattices: maximal even lattices in definite norm forms
# ---------------------------------------------------------------------------

_QUATERNION_PAIRS = {2: (1, 1), 3: (1, 3), 5: (2, 5), 7: (1, 7), 11: (1, 11), 13: (2, 13)}


def quaternion_order_lattice(p: int) -> Lattice:
    """Maximal even lattice of level p, det p², dim 4 (ramified quaternion norm form).

    Starts from the even Gram diag(2, 2a, 2b, 2ab) of the norm form
    x² + a y² + b z² + ab w² of the definite algebra (-a, -b) ramified
    exactly at p, then saturates to a maximal even lattice.
    """
    if p not in _QUATERNION_PAIRS:
        raise KeyError(f"no catalogued quaternion order for {p}")
    a, b = _QUATERNION_PAIRS[p]
    seed = Lattice([[2, 0, 0, 0], [0, 2 * a, 0, 0], [0, 0, 2 * b, 0], [0, 0, 0, 2 * a * b]])
    L = _saturate_even(seed).renamed(f"O{p}")
    assert (L.det, L.level) == (p * p, p), f"O({p}) invariants wrong: {L.det}, {L.level}"
    assert is_maximal(L)
    return L


# ---------------------------------------------------------------------------
# glue codes
# ---------------------------------------------------------------------------


def binary_golay_generators() -> list[list[int]]:
    """Generator rows of the extended binary Golay [24,12,8] code.

    Cyclic [23,12] quadratic-residue code with generator polynomial
    x^11+x^10+x^6+x^5+x^4+x^2+1, extended by a parity bit; validated by
    rank, self-duality, and the full weight distribution.
    """
    gpoly = [1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1]  # low degree first
    rows = []
    for s in range(12):
        row = [0] * 23
        for i, c in enumerate(gpoly):
            row[s + i] = c
        row.append(sum(row) % 2)
        rows.append(row)
    _validate_binary_golay(rows)
    return rows


def _validate_binary_golay(rows: list[list[int]]) -> None:
    R = np.array(rows, dtype=np.int64) % 2
    assert R.shape == (12, 24)
    # rank 12 over F2
    M = R.copy()
    rank = 0
    for col in range(24):
        piv = None
        for r in range(rank, 12):
            if M[r, col]:
                piv = r
                break
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        for r in range(12):
            if r != rank and M[r, col]:
                M[r] = (M[r] + M[rank]) % 2
        rank += 1
    assert rank == 12
    assert not ((R @ R.T) % 2).any(), "code must be self-dual"
    # full weight distribution via all 4096 words
    idx = np.arange(4096)
    bits = (idx[:, None] >> np.arange(12)[None, :]) & 1
    words = (bits @ R) % 2
    w = words.sum(axis=1)
    dist = np.bincount(w, minlength=25)
    expect = np.zeros(25, dtype=np.int64)
    expect[0], expect[8], expect[12], expect[16], expect[24] = 1, 759, 2576, 759, 1
    assert (dist == expect).all(), f"Golay weight distribution wrong: {dist}"


def ternary_golay_generators() -> list[list[int]]:
    """Generator rows of the extended ternary Golay [12,6,6] code (self-dual)."""
    gpoly = [2, 0, 1, 2, 1, 1]  # x^5+x^4+2x^3+x^2+2, low degree first
    rows = []
    for s in range(6):
        row = [0] * 11
        for i, c in enumerate(gpoly):
            row[s + i] = c
        row.append((-sum(row)) % 3)
        rows.append(row)
    R = np.array(rows, dtype=np.int64) % 3
    assert not ((R @ R.T) % 3).any(), "ternary code must be self-dual"
    # weight distribution over all 729 words
    idx = np.arange(729)
    digs = (idx[:, None] // 3 ** np.arange(6)[None, :]) % 3
    words = (digs @ R) % 3
    w = (words != 0).sum(axis=1)
    dist = np.bincount(w, minlength=13)
    expect = np.zeros(13, dtype=np.int64)
    expect[0], expect[6], expect[9], expect[12] = 1, 264, 440, 24
    assert (dist == expect).all(), f"ternary Golay weight distribution wrong: {dist}"
    return rows


def hexacode_words() -> list[list[int]]:
    """All 64 words of the hexacode [6,3] over F4 = {0,1,2,3} (bitwise xor addition).

    Words are (a, b, c, f(1), f(omega), f(omega^2)) for f(x) = a x^2 + b x + c.
    """

    def f4mul(x: int, y: int) -> int:
        # F4 with 2 = omega, 3 = omega^2 = omega + 1
        table = {
            (1, 1): 1, (1, 2): 2, (1, 3): 3,
            (2, 2): 3, (2, 3): 1, (3, 3): 2,
        }
        if x == 0 or y == 0:
            return 0
        if x > y:
            x, y = y, x
        return table[(x, y)]

    words = []
    for a in range(4):
        for b in range(4):
            for c in range(4):
                w = [a, b, c]
                for x in (1, 2, 3):
                    x2 = f4mul(x, x)
                    w.append(f4mul(a, x2) ^ f4mul(b, x) ^ c)
                words.append(w)
    weights = sorted(sum(1 for s in w if s) for w in words)
    assert weights.count(0) == 1 and min(w for w in weights if w) == 4
    return words


# ---------------------------------------------------------------------------
# glue construction
# ---------------------------------------------------------------------------


def glue_construct(blocks: list[Lattice], glue: list[list[Fraction]]) -> Lattice:
    """Even overlattice of an orthogonal block sum generated by glue vectors.

    Glue vectors are rational coordinate vectors w.r.t. the concatenated
    block bases; they must pair integrally with the blocks and have even
    norms (validated via the resulting Gram).
    """
    total = blocks[0]
    for B in blocks[1:]:
        total = orthogonal_sum(total, B)
    n = total.dim
    G = total.gram_rows()
    den = 1
    for v in glue:
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
    rows = [[den if i == j else 0 for j in range(n)] for i in range(n)]
    for v in glue:
        assert len(v) == n
        rows.append([int(Fraction(x) * den) for x in v])
    H = hnf_rows(rows)
    assert len(H) == n
    HG = matmul_rows(matmul_rows(H, G), transpose_rows(H))
    d2 = den * den
    assert all(x % d2 == 0 for row in HG for x in row), "glue vectors not integral on the blocks"
    out = Lattice([[x // d2 for x in row] for row in HG])
    idx2, rem = divmod(total.det, out.det)
    assert rem == 0
    assert round(idx2 ** 0.5) ** 2 == idx2, "glue index must be integral"
    return out


def niemeier_D4_6() -> Lattice:
    """The even unimodular 24-dimensional lattice with root system D4^6 (hexacode glue)."""
    D4 = root_lattice("D4")
    disc = discriminant_form(D4)
    gens = disc.generator_orders
    assert gens == (2, 2)
    # symbol -> discriminant class coefficients: 1 -> g1, 2 -> g2, 3 -> g1+g2
    sym_coeffs = {0: (0, 0), 1: (1, 0), 2: (0, 1), 3: (1, 1)}
    reps = {s: disc.vector_of(c) for s, c in sym_coeffs.items()}
    words = hexacode_words()
    # additive generators: the glue group is elementary abelian, so the three
    # F4-basis words and their omega-multiples are needed (6 generators)
    starts = ([1, 0, 0], [2, 0, 0], [0, 1, 0], [0, 2, 0], [0, 0, 1], [0, 0, 2])
    gen_words = [w for w in words if w[:3] in starts]
    assert len(gen_words) == 6
    glue = []
    for w in gen_words:
        vec: list[Fraction] = []
        for s in w:
            vec.extend(reps[s])
        glue.append(vec)
    out = glue_construct([D4] * 6, glue)
    assert out.det == 1 and out.dim == 24
    return out.renamed("N(D4^6)")


def niemeier_A2_12() -> Lattice:
    """The even unimodular 24-dimensional lattice with root system A2^12 (ternary glue)."""
    A2 = root_lattice("A2")
    disc = discriminant_form(A2)
    assert disc.generator_orders == (3,)
    reps = {s: disc.vector_of((s,)) for s in range(3)}
    glue = []
    for row in ternary_golay_generators():
        vec: list[Fraction] = []
        for s in row:
            vec.extend(reps[s % 3])
        glue.append(vec)
    out = glue_construct([A2] * 12, glue)
    assert out.det == 1 and out.dim == 24
    return out.renamed("N(A2^12)")


# ---------------------------------------------------------------------------
# the Leech lattice
# ---------------------------------------------------------------------------


def _leech_member(x: np.ndarray, golay: np.ndarray) -> bool:
    """Membership of an integer vector in the sqrt(8)-scaled Leech lattice."""
    m = int(x[0]) % 2
    if not ((x % 2) == m).all():
        return False
    pattern = ((x - m) // 2) % 2  # 1 where x_i = m + 2 mod 4
    if ((pattern[None, :] @ golay.T) % 2).any():  # self-dual: in code iff orthogonal
        return False
    return int(x.sum()) % 8 == 4 * m


def leech_lattice() -> Lattice:
    """The Leech lattice (det 1, min 4), built from the binary Golay code.

    In the sqrt(8) scaling the members are the integer vectors with all
    coordinates congruent mod 2, whose mod-4 pattern is a Golay word and
    whose coordinate sum is 4m mod 8 (m the common parity).
    """
    golay = np.array(binary_golay_generators(), dtype=np.int64)
    rows = []
    for g in golay:
        rows.append((2 * g).tolist())
    rows.append([-3] + [1] * 23)
    for j in range(1, 24):
        r = [0] * 24
        r[0] = 4
        r[j] = 4
        rows.append(r)
    r = [0] * 24
    r[0] = 8
    rows.append(r)
    for row in rows:
        assert _leech_member(np.array(row, dtype=np.int64), golay), f"non-member row {row}"
    H = hnf_rows(rows)
    assert len(H) == 24
    HG = matmul_rows(H, transpose_rows(H))
    assert all(v % 8 == 0 for row in HG for v in row)
    gram = [[v // 8 for v in row] for row in HG]
    out = Lattice(gram, name="Leech")
    assert out.det == 1
    return out


# ---------------------------------------------------------------------------
# catalog access with invariant validation
# ---------------------------------------------------------------------------

_CACHE: dict[str, Lattice] = {}

# name -> (builder, expected invariants {dim, det, level, min, kissing?})
_ENTRIES: dict = {
    "D4": (lambda: root_lattice("D4"), {"dim": 4, "det": 4, "level": 2, "min": 2}),
    "E6": (lambda: root_lattice("E6"), {"dim": 6, "det": 3, "level": 3, "min": 2}),
    "E7": (lambda: root_lattice("E7"), {"dim": 7, "det": 2, "level": 4, "min": 2}),
    "E8": (lambda: root_lattice("E8"), {"dim": 8, "det": 1, "level": 1, "min": 2}),
    "A2": (lambda: root_lattice("A2"), {"dim": 2, "det": 3, "level": 3, "min": 2}),
    "A2+A2": (
        lambda: orthogonal_sum_named(root_lattice("A2"), root_lattice("A2")),
        {"dim": 4, "det": 9, "level": 3, "min": 2},
    ),
    "E6+E6": (
        lambda: orthogonal_sum_named(root_lattice("E6"), root_lattice("E6")),
        {"dim": 12, "det": 9, "level": 3, "min": 2},
    ),
    "O2": (lambda: quaternion_order_lattice(2), {"dim": 4, "det": 4, "level": 2, "min": 2}),
    "O3": (lambda: quaternion_order_lattice(3), {"dim": 4, "det": 9, "level": 3, "min": 2}),
    "O5": (lambda: quaternion_order_lattice(5), {"dim": 4, "det": 25, "level": 5, "min": 2}),
    "O7": (lambda: quaternion_order_lattice(7), {"dim": 4, "det": 49, "level": 7, "min": 2}),
    "O11": (lambda: quaternion_order_lattice(11), {"dim": 4, "det": 121, "level": 11, "min": 2}),
    "O13": (lambda: quaternion_order_lattice(13), {"dim": 4, "det": 169, "level": 13, "min": 2}),
    "Leech": (leech_lattice, {"dim": 24, "det": 1, "level": 1, "min": 4, "kissing": 196560}),
    "N(D4^6)": (niemeier_D4_6, {"dim": 24, "det": 1, "level": 1, "min": 2, "kissing": 144}),
    "N(A2^12)": (niemeier_A2_12, {"dim": 24, "det": 1, "level": 1, "min": 2, "kissing": 72}),
}


def catalog_names() -> list[str]:
    return sorted(_ENTRIES)


def catalog_get(name: str) -> Lattice:
    """A validated catalog lattice (builders are cached after first validation)."""
    if name in _CACHE:
        return _CACHE[name]
    if name not in _ENTRIES:
        # allow arbitrary root-lattice names like A5, D12
        L = root_lattice(name)
        _CACHE[name] = L
        return L
    builder, expect = _ENTRIES[name]
    L = builder()
    assert L.dim == expect["dim"], name
    assert L.det == expect["det"], name
    assert L.level == expect["level"], name
    from maxlat.shells import count_by_norm, minimum

    mn = minimum(L)
    assert mn == expect["min"], f"{name}: minimum {mn} != {expect['min']}"
    if "kissing" in expect:
        counts = count_by_norm(L, mn)
        assert 2 * counts.get(mn, 0) == expect["kissing"], name
    _CACHE[name] = L
    return L
