"""Cluster contribution, modularity density and the pricing objectives.

All values are computed from integer counts first and divided once at the end.
Passing ``exact=True`` where offered returns a :class:`fractions.Fraction`
instead of a float; the lambda values must then be ints or Fractions too.

Note that ``c(S)`` is twice the generalized density ``f_{1/2}(S)`` of
Miyauchi and Kakimura, which is what makes greedy peeling a natural heuristic
for the pricing problem.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple

import numpy as np

from .graph import Graph, VertexSet, cut_size, degree_sum, induced_edge_count, vertex_set

# DualSolution: one finite real per vertex.  Plain numpy arrays are used.
DualSolution = np.ndarray


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty clusters covering ``0..n-1``, sorted by smallest member."""

    clusters: Tuple[VertexSet, ...]
    cluster_of: Tuple[int, ...]

    @classmethod
    def from_clusters(cls, clusters: Iterable[Iterable[int]], n: int) -> "Partition":
        canon = [vertex_set(c, n) for c in clusters]
        if any(len(c) == 0 for c in canon):
            raise ValueError("empty cluster in partition")
        canon.sort()
        owner = [-1] * n
        for i, c in enumerate(canon):
            for v in c:
                if owner[v] != -1:
                    raise ValueError(f"vertex {v} appears in two clusters")
                owner[v] = i
        if -1 in owner:
            raise ValueError(f"vertex {owner.index(-1)} is not covered")
        return cls(tuple(canon), tuple(owner))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        groups: dict = {}
        for v, lab in enumerate(labels):
            groups.setdefault(lab, []).append(v)
        return cls.from_clusters(groups.values(), len(labels))

    @property
    def n(self) -> int:
        return len(self.cluster_of)

    def __len__(self) -> int:
        return len(self.clusters)


def _as_partition(G: Graph, P) -> Partition:
    if isinstance(P, Partition):
        if P.n != G.n:
            raise ValueError("partition does not match graph size")
        return P
    return Partition.from_clusters(P, G.n)


def cluster_contribution(G: Graph, S: Sequence[int], exact: bool = False):
    """``(2|E(S)| - |E(S, V\\S)|) / |S|``, computed as ``(4|E(S)| - sum deg) / |S|``."""
    S = vertex_set(S, G.n)
    if not S:
        raise ValueError("contribution of an empty set is undefined")
    inner = induced_edge_count(G, S)
    num = 4 * inner - degree_sum(G, S)
    if __debug__:
        assert num == 2 * inner - cut_size(G, S)
    return Fraction(num, len(S)) if exact else num / len(S)


def modularity_density(G: Graph, P, exact: bool = False):
    """Sum of cluster contributions over a partition (or a list of clusters)."""
    P = _as_partition(G, P)
    if exact:
        return sum((cluster_contribution(G, c, exact=True) for c in P.clusters), Fraction(0))
    return float(sum(cluster_contribution(G, c) for c in P.clusters))


def _lam_sum(lam, S):
    return sum(lam[v] for v in S) if not isinstance(lam, np.ndarray) else float(lam[list(S)].sum())


def pricing_objective(G: Graph, S: Sequence[int], lam, exact: bool = False):
    """``g(S) = c(S) - sum_{v in S} lam_v``; positive means ``lam`` violates the cut for ``S``."""
    S = vertex_set(S, G.n)
    return cluster_contribution(G, S, exact=exact) - _lam_sum(lam, S)


def blended_objective(G: Graph, S: Sequence[int], lam, p: float) -> float:
    """Convex combination ``p c(S) + (1-p)(-sum lam_S)`` of the two terms of g."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    S = vertex_set(S, G.n)
    return p * cluster_contribution(G, S) - (1.0 - p) * _lam_sum(lam, S)


def blended_numerator(G: Graph, S: Sequence[int], lam, p: float) -> float:
    """Numerator of the blended objective over the common denominator ``|S|``."""
    S = vertex_set(S, G.n)
    if not S:
        return 0.0
    num = 4 * induced_edge_count(G, S) - degree_sum(G, S)
    return p * num - (1.0 - p) * len(S) * _lam_sum(lam, S)


def contribution(G: Graph, S: Sequence[int], lam, v: int, p: float, q: float) -> float:
    """Peeling score of ``v`` inside ``S``: ``q * cont_sum + (1-q) * cont_diff``.

    ``cont_sum`` is ``v``'s term when the blended numerator is split per vertex;
    ``cont_diff`` is the drop of that numerator when ``v`` leaves ``S``, minus the
    part that is the same for every vertex.
    """
    S = vertex_set(S, G.n)
    if v not in S:
        raise ValueError(f"vertex {v} is not in S")
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError("p and q must lie in [0, 1]")
    members = set(S)
    deg_in = sum(1 for u in G.neighbors(v) if int(u) in members)
    deg_out = G.degree(v) - deg_in
    size = len(S)
    cont_sum = p * (deg_in - deg_out) - (1 - p) * size * lam[v]
    cont_diff = p * (3 * deg_in - deg_out) - (1 - p) * (size - 1) * lam[v]
    return q * cont_sum + (1 - q) * cont_diff
