"""Greedy peeling: the classic densest-subgraph peel and the pricing heuristic.

The pricing peel scores every remaining vertex with a blend of two measures and
drops the lowest one, keeping every intermediate set whose pricing objective
``g(S) = c(S) - sum lam_S`` exceeds ``epsilon``.  Because the scores carry a
``|S|`` factor, all of them change after each removal, so a pass is O(n^2)
and there is no point in a heap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set

import numpy as np

from .graph import Graph, VertexSet


def _default_p() -> List[float]:
    return [round(0.1 * i, 1) for i in range(11)]


@dataclass(frozen=True)
class PeelConfig:
    p_grid: Sequence[float] = field(default_factory=_default_p)
    q_grid: Sequence[float] = (0.0, 0.5, 1.0)
    epsilon: float = 1e-6

    def __post_init__(self):
        if not self.p_grid or not self.q_grid:
            raise ValueError("p_grid and q_grid must be nonempty")
        for x in list(self.p_grid) + list(self.q_grid):
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"grid value {x} outside [0, 1]")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def peel_sequence(G: Graph) -> List[int]:
    """Removal order of the min-degree peel (ties to the lowest id); length n."""
    if G.n < 1:
        raise ValueError("peeling needs at least one vertex")
    alive = np.ones(G.n, dtype=bool)
    deg = G.degrees.astype(np.int64).copy()
    big = G.n + 1
    order = []
    for _ in range(G.n):
        v = int(np.argmin(np.where(alive, deg, big)))
        order.append(v)
        alive[v] = False
        deg[G.neighbors(v)] -= 1
    return order


def peel_densest(G: Graph) -> VertexSet:
    """Best set of the min-degree peeling sequence by density ``|E(S)|/|S|``.

    A 1/2-approximation of the densest subgraph.  Among equally dense sets the
    largest one wins (sizes along the sequence are distinct).
    """
    order = peel_sequence(G)
    alive = np.ones(G.n, dtype=bool)
    deg_in = G.degrees.astype(np.int64).copy()
    edges = G.m
    best_e, best_size, best_idx = edges, G.n, 0
    for i, v in enumerate(order[:-1]):
        edges -= int(deg_in[v])
        alive[v] = False
        deg_in[G.neighbors(v)] -= 1
        size = G.n - i - 1
        # strictly denser only: keeps the larger set on ties
        if edges * best_size > best_e * size:
            best_e, best_size, best_idx = edges, size, i + 1
    return tuple(sorted(order[best_idx:]))


def _peel_pass(G: Graph, lam: np.ndarray, p: float, q: float, epsilon: float,
               stats: Optional[dict] = None) -> List[VertexSet]:
    n = G.n
    deg = G.degrees.astype(np.float64)
    deg_in = deg.copy()
    alive = np.ones(n, dtype=bool)
    inner = G.m
    degsum = 2 * G.m
    size = n
    found = []
    evals = 0
    while size > 1:
        lamsum = float(lam[alive].sum())
        if (4 * inner - degsum) / size - lamsum > epsilon:
            found.append(tuple(np.flatnonzero(alive).tolist()))
        deg_out = deg - deg_in
        cont_sum = p * (deg_in - deg_out) - (1 - p) * size * lam
        cont_diff = p * (3 * deg_in - deg_out) - (1 - p) * (size - 1) * lam
        score = q * cont_sum + (1 - q) * cont_diff
        score[~alive] = np.inf
        evals += size
        v = int(np.argmin(score))
        alive[v] = False
        inner -= int(deg_in[v])
        degsum -= int(deg[v])
        deg_in[G.neighbors(v)] -= 1
        size -= 1
    if stats is not None:
        stats["contribution_evals"] = stats.get("contribution_evals", 0) + evals
        stats["passes"] = stats.get("passes", 0) + 1
    return found


def peel_pricing(G: Graph, lam, cfg: PeelConfig = PeelConfig(),
                 exclude: Optional[Set[VertexSet]] = None,
                 stats: Optional[dict] = None) -> List[VertexSet]:
    """Violated columns found by peeling once per ``(p, q)`` in the grids.

    Returns sets with ``g(S) > cfg.epsilon`` in discovery order, without
    duplicates and without members of ``exclude``.  Singletons are never
    produced.
    """
    if G.n < 1:
        raise ValueError("peeling needs at least one vertex")
    lam = np.asarray(lam, dtype=np.float64)
    if lam.shape != (G.n,):
        raise ValueError("lambda must have one entry per vertex")
    seen = set(exclude) if exclude else set()
    family = []
    for p in cfg.p_grid:
        for q in cfg.q_grid:
            for S in _peel_pass(G, lam, float(p), float(q), cfg.epsilon, stats):
                if S not in seen:
                    seen.add(S)
                    family.append(S)
    return family
