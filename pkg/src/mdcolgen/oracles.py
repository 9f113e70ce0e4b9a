"""Brute-force reference solvers for small instances.

These are deliberately naive: they enumerate partitions, bipartitions, subsets
or LP bases and share no code with the solvers they check beyond the graph
container.  Size guards are hard refusals.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .graph import Graph, VertexSet
from .objectives import Partition, modularity_density

MAX_PARTITION_N = 12
MAX_CUT_N = 24
MAX_SUBSET_N = 20
_CHUNK_BITS = 16


def _refuse(what: str, n: int, limit: int) -> None:
    if n > limit:
        raise ValueError(f"{what} refused for n={n} > {limit}")


def _subset_chunks(n: int, first: int = 1):
    """Yield ``(masks, bits)`` blocks covering masks ``first .. 2^n - 1``."""
    total = 1 << n
    step = 1 << _CHUNK_BITS
    shifts = np.arange(n, dtype=np.int64)
    for lo in range(first, total, step):
        masks = np.arange(lo, min(lo + step, total), dtype=np.int64)
        yield masks, ((masks[:, None] >> shifts) & 1).astype(bool)


def brute_force_partition_opt(G: Graph, min_clusters: int = 1,
                              exact: bool = False) -> Tuple[float, Partition]:
    """Maximum modularity density over all partitions with at least ``min_clusters`` parts.

    Partitions are enumerated as restricted-growth strings.  Ties (within
    1e-12) go to fewer clusters, then to the lexicographically smallest string.
    """
    n = G.n
    _refuse("partition enumeration", n, MAX_PARTITION_N)
    if n < 1:
        raise ValueError("graph has no vertices")
    if not 1 <= min_clusters <= n:
        raise ValueError(f"min_clusters must lie in 1..{n}")
    nbr = [sum(1 << int(u) for u in G.neighbors(v)) for v in range(n)]
    deg = [G.degree(v) for v in range(n)]

    masks: List[int] = []
    inner: List[int] = []
    dsum: List[int] = []
    size: List[int] = []
    labels = [0] * n
    best = [-math.inf, n + 1, None]

    def leaf():
        k = len(masks)
        if k < min_clusters:
            return
        val = sum((4 * inner[i] - dsum[i]) / size[i] for i in range(k))
        if val > best[0] + 1e-12 or (val >= best[0] - 1e-12 and k < best[1]):
            best[0], best[1], best[2] = val, k, list(labels)

    def rec(v):
        if v == n:
            leaf()
            return
        # cannot reach min_clusters any more
        if len(masks) + (n - v) < min_clusters:
            return
        bit = 1 << v
        for i in range(len(masks)):
            gain = (nbr[v] & masks[i]).bit_count()
            masks[i] |= bit
            inner[i] += gain
            dsum[i] += deg[v]
            size[i] += 1
            labels[v] = i
            rec(v + 1)
            masks[i] ^= bit
            inner[i] -= gain
            dsum[i] -= deg[v]
            size[i] -= 1
        masks.append(bit)
        inner.append(0)
        dsum.append(deg[v])
        size.append(1)
        labels[v] = len(masks) - 1
        rec(v + 1)
        masks.pop()
        inner.pop()
        dsum.pop()
        size.pop()

    rec(0)
    P = Partition.from_labels(best[2])
    if exact:
        return modularity_density(G, P, exact=True), P
    return best[0], P


def brute_force_max_cut(G: Graph) -> Tuple[int, Tuple[VertexSet, VertexSet]]:
    """Maximum number of edges across a proper bipartition ``{X, Y}``.

    The last vertex is kept in ``Y``; among optimal cuts the one whose ``X``
    has the smallest bitmask is returned.
    """
    n = G.n
    _refuse("max-cut enumeration", n, MAX_CUT_N)
    if n < 2:
        raise ValueError("a proper bipartition needs at least two vertices")
    E = G.edges
    best_val, best_mask = -1, 0
    for masks, bits in _subset_chunks(n - 1):
        if len(E):
            # the last vertex (column n-1) is always on the Y side
            side = np.concatenate([bits, np.zeros((len(masks), 1), bool)], axis=1)
            val = np.count_nonzero(side[:, E[:, 0]] != side[:, E[:, 1]], axis=1)
        else:
            val = np.zeros(len(masks), dtype=np.int64)
        i = int(np.argmax(val))
        if val[i] > best_val:
            best_val, best_mask = int(val[i]), int(masks[i])
    X = tuple(v for v in range(n) if best_mask >> v & 1)
    Y = tuple(v for v in range(n) if not best_mask >> v & 1)
    return best_val, (X, Y)


def _inner_counts(G: Graph, bits: np.ndarray) -> np.ndarray:
    E = G.edges
    if not len(E):
        return np.zeros(len(bits), dtype=np.int64)
    return np.count_nonzero(bits[:, E[:, 0]] & bits[:, E[:, 1]], axis=1)


def brute_force_densest(G: Graph, exact: bool = False):
    """Maximum of ``|E(S)|/|S|`` over nonempty ``S``; ties to the smallest bitmask."""
    n = G.n
    _refuse("subset enumeration", n, MAX_SUBSET_N)
    if n < 1:
        raise ValueError("graph has no vertices")
    best_e, best_s, best_mask = -1, 1, 0
    for masks, bits in _subset_chunks(n):
        e = _inner_counts(G, bits)
        s = bits.sum(axis=1)
        i = int(np.argmax(e / s))
        if e[i] * best_s > best_e * s[i]:
            best_e, best_s, best_mask = int(e[i]), int(s[i]), int(masks[i])
    S = tuple(v for v in range(n) if best_mask >> v & 1)
    return (Fraction(best_e, best_s) if exact else best_e / best_s), S


def brute_force_pricing(G: Graph, lam, exact: bool = False):
    """Minimum of ``sum_{v in S} lam_v - c(S)`` over nonempty ``S``.

    The float pass is vectorized; with ``exact`` every subset within 1e-6 of
    the float minimum is re-evaluated in rational arithmetic.  Ties go to the
    smallest bitmask.
    """
    n = G.n
    _refuse("subset enumeration", n, MAX_SUBSET_N)
    if n < 1:
        raise ValueError("graph has no vertices")
    lam_f = np.array([float(x) for x in lam])
    deg = G.degrees.astype(np.int64)
    vals, all_masks = [], []
    for masks, bits in _subset_chunks(n):
        num = 4 * _inner_counts(G, bits) - bits @ deg
        vals.append(bits @ lam_f - num / bits.sum(axis=1))
        all_masks.append(masks)
    vals = np.concatenate(vals)
    all_masks = np.concatenate(all_masks)
    i = int(np.argmin(vals))
    if not exact:
        m = int(all_masks[i])
        return float(vals[i]), tuple(v for v in range(n) if m >> v & 1)
    lam_q = [Fraction(x) for x in lam]
    nbr = [sum(1 << int(u) for u in G.neighbors(v)) for v in range(n)]
    best, best_mask = None, 0
    for m in all_masks[vals <= vals[i] + 1e-6].tolist():
        members = [v for v in range(n) if m >> v & 1]
        e = sum((nbr[v] & m).bit_count() for v in members) // 2
        val = sum((lam_q[v] for v in members), Fraction(0)) - Fraction(
            4 * e - sum(int(deg[v]) for v in members), len(members))
        if best is None or val < best or (val == best and m < best_mask):
            best, best_mask = val, m
    return best, tuple(v for v in range(n) if best_mask >> v & 1)


def brute_force_clique_number(G: Graph) -> int:
    """Size of a largest clique, by subset enumeration (n <= 20)."""
    n = G.n
    _refuse("subset enumeration", n, MAX_SUBSET_N)
    if n == 0:
        return 0
    best = 1
    for _, bits in _subset_chunks(n):
        s = bits.sum(axis=1)
        full = _inner_counts(G, bits) == s * (s - 1) // 2
        if full.any():
            best = max(best, int(s[full].max()))
    return best


def brute_force_lp(c, A, b) -> Tuple[Optional[float], Optional[np.ndarray]]:
    """Maximize ``c @ z`` s.t. ``A z = b``, ``z >= 0`` by enumerating every basis.

    ``A`` must have full row rank.  Returns ``(None, None)`` when infeasible;
    unboundedness is not detected (set-partitioning LPs are bounded).
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    if n > 16:
        raise ValueError(f"basis enumeration refused for {n} > 16 columns")
    if np.linalg.matrix_rank(A) < m:
        raise ValueError("constraint matrix must have full row rank")
    best, best_z = None, None
    for cols in itertools.combinations(range(n), m):
        B = A[:, cols]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        zb = np.linalg.solve(B, b)
        if zb.min(initial=0.0) < -1e-9:
            continue
        z = np.zeros(n)
        z[list(cols)] = zb
        val = float(c @ z)
        if best is None or val > best + 1e-12:
            best, best_z = val, z
    return best, best_z


def brute_force_set_partition(columns: Sequence[Tuple[VertexSet, float]], n: int):
    """Best exact cover of ``0..n-1`` by a subset of ``(members, value)`` columns.

    Enumerates all column subsets (at most 20 columns).  Returns
    ``(value, chosen member tuples)`` or ``(None, None)`` if nothing covers.
    """
    if len(columns) > 20:
        raise ValueError("column subset enumeration refused for more than 20 columns")
    full = (1 << n) - 1
    masks = [sum(1 << v for v in S) for S, _ in columns]
    best, pick = None, None
    for r in range(1, len(columns) + 1):
        for combo in itertools.combinations(range(len(columns)), r):
            acc = 0
            ok = True
            for j in combo:
                if acc & masks[j]:
                    ok = False
                    break
                acc |= masks[j]
            if not ok or acc != full:
                continue
            val = sum(columns[j][1] for j in combo)
            if best is None or val > best + 1e-12:
                best, pick = val, [columns[j][0] for j in combo]
    return best, pick
