"""Isometry testing and automorphism group orders for even lattices.

Backtracking over short-vector systems: candidate images of each basis vector
are filtered by norm, by inner products with already-chosen images
(forward checking), and by a per-vector invariant profile (multiset of inner
products against the minimal shell).  Automorphism group order is computed
layer by layer as a product of orbit sizes along the stabilizer chain of the
basis, with orbit closure under already-found generators to avoid redundant
searches.  All arithmetic on vectors is int64 with magnitude guards.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from maxlat.intmat import inverse_frac, matmul_rows, np_int
from maxlat.lll import lll_gram
from maxlat.qforms import Lattice
from maxlat.shells import _fp_core  # exact enumeration core

_PROFILE_BLOCK = 4096


@dataclass(frozen=True, order=True)
class Fingerprint:
    det: int
    level: int
    minimum: int
    shell_sizes: tuple  # ((norm, pair count), ...) for norms ≤ fingerprint bound
    theta_prefix: tuple


class _VectorSystem:
    """Short vectors of a reduced Gram matrix with profile invariants.

    keep_norms/bound default to the diagonal norms of Gr and their maximum;
    isometry testing passes the union over both lattices with a common bound
    so that the two systems are directly comparable (LLL does not guarantee
    equal diagonal norm sets for isometric inputs).
    """

    def __init__(self, Gr: list[list[int]], keep_norms=None, bound: "int | None" = None):
        self.G = Gr
        self.n = len(Gr)
        self.Gnp = np_int(Gr)
        diag_norms = {Gr[i][i] for i in range(self.n)}
        if keep_norms is None:
            keep_norms = diag_norms
        keep_norms = sorted(set(keep_norms))
        if bound is None:
            bound = max(keep_norms)
        assert diag_norms <= set(keep_norms) and bound >= max(keep_norms)
        vecs = []
        for Y, norms in _fp_core(Gr, Fraction(bound)):
            vecs.append((Y, norms))
        if vecs:
            Yall = np.vstack([v for v, _ in vecs])
            Nall = np.concatenate([m for _, m in vecs])
        else:  # pragma: no cover - positive definite lattices always have vectors
            Yall = np.zeros((0, self.n), dtype=np.int64)
            Nall = np.zeros(0, dtype=np.int64)
        # keep only norms that can be basis-vector images
        keep = np.isin(Nall, keep_norms)
        Yall, Nall = Yall[keep], Nall[keep]
        # both signs, deterministic order
        V = np.vstack([Yall, -Yall])
        N2 = np.concatenate([Nall, Nall])
        order = np.lexsort(V.T[::-1])
        self.V = np.ascontiguousarray(V[order])
        self.norms = N2[order]
        self.PV = self.V @ self.Gnp  # row i ⋅ w = (v_i, w)
        self.index_of = {tuple(map(int, row)): i for i, row in enumerate(self.V)}
        self.pools = {int(nv): np.flatnonzero(self.norms == nv) for nv in keep_norms}
        self._profiles = None

    def profiles(self):
        """Per-vector invariant: (norm, sorted inner-product counts vs min shell)."""
        if self._profiles is None:
            min_norm = int(self.norms.min())
            cols = self.V[self.norms == min_norm]
            out = []
            for start in range(0, len(self.V), _PROFILE_BLOCK):
                block = self.PV[start : start + _PROFILE_BLOCK] @ cols.T
                for r, row in enumerate(block):
                    vals, cnts = np.unique(row, return_counts=True)
                    out.append(
                        (int(self.norms[start + r]), tuple(zip(map(int, vals), map(int, cnts))))
                    )
            self._profiles = out
        return self._profiles

    def basis_profile(self, j: int):
        e = tuple(1 if t == j else 0 for t in range(self.n))
        return self.profiles()[self.index_of[e]]


def _complete(sys1: _VectorSystem, G2, pools, chosen, levels_left):
    """Depth-first completion: images chosen for some target levels; try the rest.

    chosen: dict level → index into sys1.V; pools: dict level → candidate index
    array (already consistent with all chosen).  Returns full dict or None.
    """
    if not levels_left:
        return dict(chosen)
    # most-constrained level first
    j = min(levels_left, key=lambda l: len(pools[l]))
    for idx in pools[j]:
        w = sys1.V[idx]
        new_pools = {}
        ok = True
        for l in levels_left:
            if l == j:
                continue
            dots = sys1.PV[pools[l]] @ w
            sub = pools[l][dots == G2[l][j]]
            if not len(sub):
                ok = False
                break
            new_pools[l] = sub
        if not ok:
            continue
        chosen[j] = int(idx)
        result = _complete(sys1, G2, new_pools, chosen, levels_left - {j})
        if result is not None:
            return result
        del chosen[j]
    return None


def _initial_pools(sys1: _VectorSystem, G2, profiles2_basis):
    """Candidate pools per target level from norms and profiles; None if empty."""
    n = len(G2)
    prof1 = sys1.profiles()
    pools = {}
    for j in range(n):
        nv = G2[j][j]
        if nv not in sys1.pools:
            return None
        base = sys1.pools[nv]
        target = profiles2_basis[j]
        sel = np.array([prof1[int(i)] == target for i in base], dtype=bool)
        pool = base[sel]
        if not len(pool):
            return None
        pools[j] = pool
    return pools


def _witness_matrix(sys1: _VectorSystem, assignment: dict) -> np.ndarray:
    n = sys1.n
    W = np.zeros((n, n), dtype=np.int64)
    for j, idx in assignment.items():
        W[:, j] = sys1.V[idx]
    return W


def fingerprint(L: Lattice, theta_prec: "int | None" = None) -> Fingerprint:
    """Cheap isometry invariants (equal for isometric lattices).

    The theta prefix length shrinks with the dimension: shell sizes explode
    like a ball volume, and the prefix is only a bucketing pre-filter.
    """
    from maxlat.shells import count_by_norm

    if theta_prec is None:
        theta_prec = 8 if L.dim <= 8 else (4 if L.dim <= 14 else 3)
    key = (L.gram, theta_prec)
    if key in _FP_CACHE:
        return _FP_CACHE[key]
    Gr, _ = lll_gram(L.gram_rows())
    bound = max(max(Gr[i][i] for i in range(len(Gr))), 2 * (theta_prec - 1))
    counts = count_by_norm(L, bound)
    mn = min(counts) if counts else 0
    shell_sizes = tuple(sorted((nv, c) for nv, c in counts.items()))
    theta = tuple(2 * counts.get(2 * t, 0) if t else 1 for t in range(theta_prec))
    fp = Fingerprint(
        det=L.det, level=L.level, minimum=mn, shell_sizes=shell_sizes, theta_prefix=theta
    )
    _FP_CACHE[key] = fp
    if len(_FP_CACHE) > 1024:
        _FP_CACHE.pop(next(iter(_FP_CACHE)))
    return fp


_FP_CACHE: dict[tuple, Fingerprint] = {}


_LLL_CACHE: dict[tuple, tuple] = {}
_SYSTEM_CACHE: dict[tuple, _VectorSystem] = {}


def _reduced_gram(L: Lattice):
    key = L.gram
    if key not in _LLL_CACHE:
        B, U = lll_gram(L.gram_rows())
        _LLL_CACHE[key] = (B, np_int(U))
        if len(_LLL_CACHE) > 512:
            _LLL_CACHE.pop(next(iter(_LLL_CACHE)))
    return _LLL_CACHE[key]


def _system_for(gram_key, B, keep_norms, bound) -> _VectorSystem:
    key = (gram_key, tuple(sorted(keep_norms)), bound)
    if key not in _SYSTEM_CACHE:
        _SYSTEM_CACHE[key] = _VectorSystem(B, keep_norms, bound)
        if len(_SYSTEM_CACHE) > 256:
            _SYSTEM_CACHE.pop(next(iter(_SYSTEM_CACHE)))
    return _SYSTEM_CACHE[key]


def _reduced_system(L: Lattice):
    B, U = _reduced_gram(L)
    diag = {B[i][i] for i in range(len(B))}
    return B, U, _system_for(L.gram, B, diag, max(diag))


def are_isometric(L1: Lattice, L2: Lattice) -> "np.ndarray | None":
    """A unimodular U with Uᵀ·G1·U = G2, or None if the lattices differ."""
    if L1.dim != L2.dim:
        return None
    if L1.gram == L2.gram:
        return np.eye(L1.dim, dtype=np.int64)
    if (L1.det, L1.level) != (L2.det, L2.level):
        return None
    B1, U1 = _reduced_gram(L1)
    B2, U2 = _reduced_gram(L2)
    n = L1.dim
    keep = {B1[i][i] for i in range(n)} | {B2[i][i] for i in range(n)}
    bound = max(keep)
    sys1 = _system_for(L1.gram, B1, keep, bound)
    sys2 = _system_for(L2.gram, B2, keep, bound)
    if sorted(sys1.norms.tolist()) != sorted(sys2.norms.tolist()):
        return None
    if sorted(sys1.profiles()) != sorted(sys2.profiles()):
        return None
    profiles2_basis = [sys2.basis_profile(j) for j in range(sys2.n)]
    pools = _initial_pools(sys1, B2, profiles2_basis)
    if pools is None:
        return None
    assignment = _complete(sys1, B2, pools, {}, frozenset(range(sys1.n)))
    if assignment is None:
        return None
    W = _witness_matrix(sys1, assignment)  # Wᵀ·B1·W = B2
    # transport: T1ᵀ G1 T1 = B1 with T1 = U1ᵀ; final U = T1·W·T2⁻¹
    T1 = U1.T
    T2 = U2.T
    T2inv, d = inverse_frac([[int(x) for x in row] for row in T2])
    assert abs(d) == 1
    T2inv = np_int(T2inv) * d
    U = T1 @ W @ T2inv
    check = U.T @ np_int(L1.gram_rows()) @ U
    assert (check == np_int(L2.gram_rows())).all(), "isometry witness failed verification"
    return U


_AUT_CACHE: dict[tuple, tuple] = {}


def aut_info(L: Lattice) -> tuple[int, list[np.ndarray]]:
    """(order of Aut(L), generator matrices in the original basis).

    Order is the product over basis layers of the orbit size of e_j under the
    stabilizer of e_0..e_{j-1}; generators come from the successful layer
    searches and generate the full group.
    """
    key = L.gram
    if key in _AUT_CACHE:
        return _AUT_CACHE[key]
    B, U, sys1 = _reduced_system(L)
    n = sys1.n
    profiles_basis = [sys1.basis_profile(j) for j in range(n)]
    pools0 = _initial_pools(sys1, B, profiles_basis)
    assert pools0 is not None, "basis vectors must survive their own filters"
    basis = [sys1.V[sys1.index_of[tuple(1 if t == j else 0 for t in range(n))]] for j in range(n)]
    # pools_chain[l]: candidates for level l consistent with e_i → e_i for all i < j
    pools_chain = dict(pools0)
    order = 1
    gens_reduced: list[np.ndarray] = []
    prefix: dict[int, int] = {}
    for j in range(n):
        layer_gens: list[np.ndarray] = []
        orbit = {tuple(int(x) for x in basis[j])}
        for idx in pools_chain[j]:
            vt = tuple(int(x) for x in sys1.V[idx])
            if vt in orbit:
                continue
            # deeper pools consistent with the identity prefix and e_j → v
            pools = {}
            ok = True
            w = sys1.V[idx]
            for l in range(j + 1, n):
                sub = pools_chain[l]
                sub = sub[sys1.PV[sub] @ w == B[j][l]]
                if not len(sub):
                    ok = False
                    break
                pools[l] = sub
            if ok:
                chosen = dict(prefix)
                chosen[j] = int(idx)
                result = _complete(sys1, B, pools, chosen, frozenset(range(j + 1, n)))
            else:
                result = None
            if result is not None:
                g = _witness_matrix(sys1, result)
                layer_gens.append(g)
                # close the orbit under all generators found at this layer
                frontier = list(orbit)
                while frontier:
                    x = np.array(frontier.pop(), dtype=np.int64)
                    for gmat in layer_gens:
                        y = tuple(int(t) for t in (gmat @ x))
                        if y not in orbit:
                            orbit.add(y)
                            frontier.append(y)
        order *= len(orbit)
        gens_reduced.extend(layer_gens)
        prefix[j] = sys1.index_of[tuple(1 if t == j else 0 for t in range(n))]
        for l in range(j + 1, n):
            sub = pools_chain[l]
            pools_chain[l] = sub[sys1.PV[sub] @ basis[j] == B[j][l]]
    # transport generators to the original basis: g_orig = T·g·T⁻¹, T = Uᵀ
    T = U.T
    Tinv, d = inverse_frac([[int(x) for x in row] for row in T])
    assert abs(d) == 1
    Tinv = np_int(Tinv) * d
    gens = []
    G0 = np_int(L.gram_rows())
    for g in gens_reduced:
        go = T @ g @ Tinv
        assert (go.T @ G0 @ go == G0).all()
        gens.append(go)
    _AUT_CACHE[key] = (order, gens)
    if len(_AUT_CACHE) > 512:
        _AUT_CACHE.pop(next(iter(_AUT_CACHE)))
    return _AUT_CACHE[key]


def aut_order(L: Lattice) -> int:
    """Exact order of the integral orthogonal group of the Gram matrix."""
    return aut_info(L)[0]
