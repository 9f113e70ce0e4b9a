"""Instance generators for the two hardness reductions, plus regular-graph identities.

``build_md_gadget`` blows a 3-regular max-cut instance ``(G, k)`` up into a
modularity-density instance: the complement of ``G*`` with threshold ``r*``.
Vertex ``(v, side, offset)`` of ``G*`` gets id ``(2 v + side) M + offset``;
side 0 is the block ``I_v``, side 1 the block ``I'_v``.

``build_ap_gadget`` turns an ``(n-4)``-regular graph and a clique size ``k``
into a pricing instance with uniform duals ``2(k-1)/k``: the best pricing
objective reaches ``r* = -(n-4)`` exactly when the largest clique has size
``k`` (larger cliques exceed it, and for ``k`` above the clique number every
set stays strictly below it).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .graph import (Graph, VertexSet, complement, cut_size, induced_edge_count,
                    regular_degree, vertex_set)
from .objectives import Partition

NON_CERTIFYING = "non-certifying"
CERTIFYING = "certifying"


class GadgetWarning(UserWarning):
    """Gadget built with a blow-up size the reduction does not cover."""


# -- regular graphs -------------------------------------------------------------


def _require_regular(G: Graph) -> int:
    d = regular_degree(G)
    if d is None:
        raise ValueError("graph is not regular")
    return d


def regular_density_forms(G: Graph, P) -> Tuple[Fraction, Fraction]:
    """The two rewritten forms of ``D`` on a ``d``-regular graph, exactly:

    ``4 sum |E(C)|/|C| - d |P|`` and ``d |P| - 2 sum cut(C)/|C|``.
    """
    d = _require_regular(G)
    P = P if isinstance(P, Partition) else Partition.from_clusters(P, G.n)
    inner = sum((Fraction(4 * induced_edge_count(G, C), len(C)) for C in P.clusters), Fraction(0))
    cut = sum((Fraction(2 * cut_size(G, C), len(C)) for C in P.clusters), Fraction(0))
    return inner - d * len(P), d * len(P) - cut


def two_cluster_density(G: Graph, C: Sequence[int]) -> Fraction:
    """``2d - 2 n cut(C) / (|C| |V \\ C|)``: ``D`` of ``{C, V \\ C}`` on a ``d``-regular graph."""
    d = _require_regular(G)
    C = vertex_set(C, G.n)
    rest = G.n - len(C)
    if not C or not rest:
        raise ValueError("C must be a proper nonempty subset")
    return 2 * d - Fraction(2 * G.n * cut_size(G, C), len(C) * rest)


# -- max-cut gadget ---------------------------------------------------------------


def _block_template(M: int) -> np.ndarray:
    """Offset pairs ``(i, j)`` joining ``v_i`` to ``v'_j`` inside one vertex's blocks."""
    pairs = [(0, j) for j in range(4, M)]
    pairs += [(i, j) for i in (1, 2, 3) for j in range(1, M)]
    pairs += [(i, j) for i in range(4, M) for j in range(M) if j != i]
    return np.array(pairs, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class MdGadget:
    source: Graph
    M: int
    k: int
    g_star: Graph
    r_star: Fraction
    stamp: str

    @cached_property
    def complement_g_star(self) -> Graph:
        return complement(self.g_star)

    @property
    def n_star(self) -> int:
        return 2 * self.M * self.source.n

    @cached_property
    def block_index(self) -> np.ndarray:
        """``(n_star, 3)`` rows ``(source vertex, side, offset)``."""
        ids = np.arange(self.n_star)
        return np.stack([ids // (2 * self.M), (ids // self.M) % 2, ids % self.M], axis=1)

    def vertex_id(self, v: int, side: int, offset: int) -> int:
        return (2 * v + side) * self.M + offset

    def block(self, v: int, side: int) -> VertexSet:
        start = self.vertex_id(v, side, 0)
        return tuple(range(start, start + self.M))

    def metadata(self) -> dict:
        return {
            "kind": "md", "k": self.k, "M": self.M, "source_n": self.source.n,
            "n": self.n_star, "r_star": float(self.r_star), "r_star_exact": str(self.r_star),
            "g_star_degree": self.M - 1, "regular_degree": self.n_star - self.M,
            "graph": "complement of G*", "stamp": self.stamp,
        }


def md_threshold(M: int, n: int, k: int) -> Fraction:
    """``2M - 4 - 12/M + 8k/(Mn)``."""
    return 2 * M - 4 - Fraction(12, M) + Fraction(8 * k, M * n)


def build_md_gadget(G: Graph, k: int, M_override: Optional[int] = None) -> MdGadget:
    """Max-cut instance ``(G, k)`` on a 3-regular ``G`` to its modularity-density gadget."""
    if regular_degree(G) != 3:
        raise ValueError("source graph must be 3-regular")
    n = G.n
    if n < 4:
        raise ValueError("source graph needs at least 4 vertices")
    if k < 1:
        raise ValueError("k must be positive")
    M = n ** 3
    stamp = CERTIFYING
    if M_override is not None:
        if M_override < 5:
            raise ValueError("M_override must be at least 5")
        if M_override != M:
            warnings.warn(f"M={M_override} differs from n^3={M}; the reduction's "
                          "correctness argument does not apply", GadgetWarning, stacklevel=2)
            stamp = NON_CERTIFYING
        M = M_override
    tmpl = _block_template(M)
    parts = []
    for v in range(n):
        base = 2 * v * M
        parts.append(np.stack([base + tmpl[:, 0], base + M + tmpl[:, 1]], axis=1))
    E = G.edges
    zero = 2 * M * E
    parts.append(zero)
    parts.append(zero + M)
    g_star = Graph.from_edge_array(2 * M * n, np.concatenate(parts))
    gadget = MdGadget(G, M, k, g_star, md_threshold(M, n, k), stamp)
    _audit_md(gadget)
    return gadget


def _audit_md(g: MdGadget) -> None:
    M, n = g.M, g.source.n
    if regular_degree(g.g_star) != M - 1:
        raise AssertionError("G* is not (M-1)-regular")
    if g.g_star.m != n * (M * M - M - 3) + 2 * g.source.m:
        raise AssertionError("unexpected edge count in G*")
    blk = g.block_index
    e = g.g_star.edges
    a, b = blk[e[:, 0]], blk[e[:, 1]]
    between = (a[:, 0] == b[:, 0]) & (a[:, 1] != b[:, 1])
    per_v = np.bincount(a[between, 0], minlength=n)
    if not np.all(per_v == M * M - M - 3):
        raise AssertionError("I_v and I'_v are not joined by M^2-M-3 edges")


def cut_to_partition(g: MdGadget, X: Iterable[int]) -> Partition:
    """Two-cluster partition of ``V*`` induced by the source cut ``{X, V \\ X}``."""
    n = g.source.n
    X = set(int(v) for v in X)
    if not X or len(X) >= n or not X <= set(range(n)):
        raise ValueError("X must be a proper nonempty subset of the source vertices")
    C: List[int] = []
    for v in range(n):
        C.extend(g.block(v, 0 if v in X else 1))
    rest = sorted(set(range(g.n_star)) - set(C))
    return Partition.from_clusters([C, rest], g.n_star)


# -- pricing gadget -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ApGadget:
    graph: Graph
    k: int
    lam: np.ndarray = field(repr=False)
    r_star: int = 0

    @property
    def lam_exact(self) -> List[Fraction]:
        return [Fraction(2 * (self.k - 1), self.k)] * self.graph.n

    def metadata(self) -> dict:
        value = Fraction(2 * (self.k - 1), self.k)
        return {
            "kind": "ap", "k": self.k, "n": self.graph.n, "lambda": float(value),
            "lambda_exact": str(value), "r_star": self.r_star,
            "regular_degree": self.graph.n - 4, "stamp": CERTIFYING,
        }


def build_ap_gadget(G: Graph, k: int) -> ApGadget:
    """Pricing instance on an ``(n-4)``-regular graph with uniform duals ``2(k-1)/k``."""
    n = G.n
    if n < 5 or regular_degree(G) != n - 4:
        raise ValueError(f"graph must be (n-4)-regular with n >= 5 (n={n})")
    if k < 2:
        raise ValueError("k must be at least 2")
    lam = np.full(n, 2.0 * (k - 1) / k)
    lam.setflags(write=False)
    return ApGadget(G, k, lam, -(n - 4))
