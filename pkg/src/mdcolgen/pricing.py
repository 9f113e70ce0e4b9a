"""Exact pricing through the size-indexed 0-1 linear programs AP(k).

For a fixed size ``k`` the pricing problem

    minimize  sum_{v in S} lam_v - c(S)   over |S| = k

is linear in indicator variables ``y_v`` (vertex chosen) and ``x_e`` (both ends
chosen):

    minimize  sum_v (lam_v + deg(v)/k) y_v - (4/k) sum_e x_e
    s.t.      sum_v y_v = k,   x_e <= y_u,  x_e <= y_w  for e = {u, w}

Each AP(k) is solved by depth-first branch-and-bound on the ``y`` variables.
A node fixes some vertices in (``F1``) and some out (``F0``).  Its bound is the
larger of

* a combinatorial bound: every free vertex ``t`` can gain at most
  ``min(deg_free(t), r - 1)`` inner neighbours among the ``r = k - |F1|`` still
  to pick, which makes the best completion a sort over per-vertex weights;
* the LP relaxation of the node's reduced model, strengthened with the valid
  rows ``sum_{e ∋ t} x_e <= (r - 1) y_t`` and solved with :mod:`mdcolgen.lp`.

Every feasible set met along the way (integral LP optima and the greedy
completion used for the combinatorial bound) is evaluated exactly; those below
``-epsilon`` are collected as new columns.
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np

from .graph import Graph, VertexSet
from .lp import LpError, Simplex, WarmStart

log = logging.getLogger(__name__)


@dataclass
class ExactConfig:
    epsilon: float = 1e-6
    use_lp: bool = True
    skip_k1: bool = True
    early_exit: bool = False
    # prune every node whose bound is >= -epsilon: enough to certify or find
    # violated sets, but optima above -epsilon are then upper bounds only
    certify_only: bool = False
    time_limit: Optional[float] = None
    # called as hook(k, fixed_in, fixed_out, bound) for every bounded node
    node_hook: Optional[Callable] = None


@dataclass
class PricingResult:
    best_value: float
    best_set: Optional[VertexSet]
    collected: List[VertexSet]
    per_k_optima: List[Tuple[int, float]]
    certified: bool
    nodes: int = 0
    unfinished: List[int] = field(default_factory=list)


@dataclass
class ApkResult:
    optimum: float
    collected: List[VertexSet]
    best_set: Optional[VertexSet]
    finished: bool
    nodes: int
    lp_solves: int = 0


class _NodeModel:
    """AP(k) relaxation over all vertices; nodes only change the ``y`` bounds.

    Columns are ``y`` (n), ``x`` (one per edge) and one slack per inequality
    row.  Rows: ``x_e - y_u <= 0``, ``x_e - y_w <= 0``, the degree caps
    ``sum_{e ∋ t} x_e - (k-1) y_t <= 0`` and finally ``sum y = k``.
    """

    def __init__(self, G: Graph, coef: np.ndarray, k: int):
        n, m = G.n, G.m
        E = G.edges
        rows = 2 * m + n + 1
        cols = n + m + 2 * m + n
        A = np.zeros((rows, cols))
        ar = np.arange(m)
        A[ar, n + ar] = 1.0
        A[ar, E[:, 0]] = -1.0
        A[m + ar, n + ar] = 1.0
        A[m + ar, E[:, 1]] = -1.0
        cap = 2 * m + np.arange(n)
        A[cap, np.arange(n)] = -(k - 1.0)
        A[2 * m + E[:, 0], n + ar] = 1.0
        A[2 * m + E[:, 1], n + ar] = 1.0
        A[np.arange(2 * m + n), n + m + np.arange(2 * m + n)] = 1.0
        A[-1, :n] = 1.0
        b = np.zeros(rows)
        b[-1] = k
        c = np.concatenate([coef, np.full(m, -4.0 / k), np.zeros(2 * m + n)])
        hi = np.concatenate([np.ones(n + m), np.full(2 * m + n, np.inf)])
        self.n, self.m = n, m
        self.lp = Simplex(A, b, c, np.zeros(cols), hi)

    def crash(self, chosen: np.ndarray) -> WarmStart:
        """Primal feasible start: slacks basic, ``y = 1`` on ``chosen`` (size k)."""
        n, m = self.n, self.m
        idx = np.flatnonzero(chosen)
        basis = list(range(n + m, n + m + 2 * m + n)) + [int(idx[0])]
        at_upper = np.zeros(self.lp.n, dtype=bool)
        at_upper[idx[1:]] = True
        return WarmStart(basis, at_upper)

    def solve(self, fin: np.ndarray, free: np.ndarray, warm: WarmStart):
        n = self.n
        self.lp.set_bounds(np.arange(n), fin.astype(np.float64), (fin | free).astype(np.float64))
        try:
            res = self.lp.solve(warm=warm)
        except LpError:
            # numerical trouble: the node keeps its combinatorial bound
            return None, None, None
        if res.status != "optimal":
            return None, None, None
        return res.objective, res.x[:n], res.warm


class _ApkSearch:
    def __init__(self, G: Graph, lam: np.ndarray, k: int, cfg: ExactConfig,
                 deadline: Optional[float]):
        self.G, self.k, self.cfg = G, k, cfg
        self.A = G.matrix.astype(np.float64)
        self.coef = lam + G.degrees / k
        self.deadline = deadline
        self.best = math.inf
        self.best_set: Optional[VertexSet] = None
        self.collected = {}
        self.nodes = 0
        self.lp_solves = 0
        self.finished = True
        self.model = _NodeModel(G, self.coef, k) if cfg.use_lp and G.m else None

    def value(self, mask: np.ndarray) -> float:
        inner = float(mask @ self.A @ mask) / 2.0
        return float(self.coef[mask].sum()) - 4.0 * inner / self.k

    def offer(self, mask: np.ndarray) -> None:
        S = tuple(np.flatnonzero(mask).tolist())
        val = self.value(mask)
        if val < -self.cfg.epsilon and S not in self.collected:
            self.collected[S] = val
        if val < self.best - 1e-12 or (abs(val - self.best) <= 1e-12 and
                                       (self.best_set is None or S < self.best_set)):
            self.best, self.best_set = val, S

    def threshold(self) -> float:
        if self.cfg.certify_only:
            return min(self.best, -self.cfg.epsilon)
        return self.best

    def combinatorial(self, fin: np.ndarray, free: np.ndarray, r: int):
        k = self.k
        d_in = self.A @ fin
        base = float(self.coef[fin].sum()) - 2.0 * float(fin @ d_in) / k
        if r == 0:
            return base, None
        d_free = self.A @ free
        w = self.coef - (4.0 * d_in + 2.0 * np.minimum(d_free, r - 1)) / k
        idx = np.flatnonzero(free)
        wf = w[idx]
        if r < len(idx):
            part = np.argpartition(wf, r - 1)[:r]
        else:
            part = np.arange(len(idx))
        return base + float(wf[part].sum()), (idx[part], w)

    def run(self) -> None:
        n, k = self.G.n, self.k
        root_in, root_free = np.zeros(n, dtype=bool), np.ones(n, dtype=bool)
        warm0 = None
        if self.model is not None:
            _, (picked, _) = self.combinatorial(root_in, root_free, k)
            chosen = np.zeros(n, dtype=bool)
            chosen[picked] = True
            warm0 = self.model.crash(chosen)
        stack = [(root_in, root_free, warm0)]
        while stack:
            if self.deadline is not None and time.perf_counter() > self.deadline:
                self.finished = False
                return
            fin, free, warm = stack.pop()
            r = k - int(fin.sum())
            nfree = int(free.sum())
            if r < 0 or r > nfree:
                continue
            self.nodes += 1
            if r == 0 or r == nfree:
                mask = fin | free if r == nfree else fin
                self.offer(mask)
                if self.cfg.node_hook:
                    self.cfg.node_hook(k, fin.copy(), ~(fin | free), self.value(mask))
                continue
            bound, (picked, w) = self.combinatorial(fin, free, r)
            greedy = fin.copy()
            greedy[picked] = True
            self.offer(greedy)
            y = None
            if bound < self.threshold() - 1e-9 and self.model is not None:
                lp_bound, y, warm = self.model.solve(fin, free, warm)
                self.lp_solves += 1
                if lp_bound is not None:
                    bound = max(bound, lp_bound)
            if self.cfg.node_hook:
                self.cfg.node_hook(k, fin.copy(), ~(fin | free), bound)
            if bound >= self.threshold() - 1e-9:
                continue
            if y is not None:
                yf = y[free]
                if np.all(np.minimum(yf, 1.0 - yf) <= 1e-9):
                    mask = fin.copy()
                    mask[np.flatnonzero(free)[yf > 0.5]] = True
                    self.offer(mask)
                    continue
                frac = np.where(free, np.abs(y - 0.5), np.inf)
                j = int(np.argmin(frac))
            else:
                j = int(picked[np.argmin(w[picked])])
            free_j = free.copy()
            free_j[j] = False
            child_in = fin.copy()
            child_in[j] = True
            kids = [(fin.copy(), free_j), (child_in, free_j.copy())]
            # explore the child whose combinatorial bound is lower first
            keys = []
            for kin, kfree in kids:
                rr = k - int(kin.sum())
                if rr < 0 or rr > int(kfree.sum()):
                    keys.append(math.inf)
                elif rr == 0:
                    keys.append(self.value(kin))
                else:
                    keys.append(self.combinatorial(kin, kfree, rr)[0])
            order = sorted(range(2), key=lambda i: (keys[i], -i), reverse=True)
            for i in order:
                if keys[i] < self.threshold() - 1e-9:
                    # solve() never mutates a warm start, so siblings share it
                    stack.append(kids[i] + (warm,))


def solve_apk(G: Graph, lam, k: int, cfg: ExactConfig = ExactConfig(),
              deadline: Optional[float] = None) -> ApkResult:
    """Optimum of AP(k) and the violated sets found while solving it.

    ``optimum`` is proven when ``finished`` is true (with ``cfg.certify_only``
    only if it is below ``-cfg.epsilon``).  ``collected`` is sorted by value.
    """
    if not 1 <= k <= G.n:
        raise ValueError(f"k must lie in 1..{G.n}, got {k}")
    lam = np.asarray(lam, dtype=np.float64)
    if lam.shape != (G.n,):
        raise ValueError("lambda must have one entry per vertex")
    search = _ApkSearch(G, lam, k, cfg, deadline)
    search.run()
    collected = sorted(search.collected, key=lambda S: (search.collected[S], S))
    return ApkResult(search.best, collected, search.best_set, search.finished,
                     search.nodes, search.lp_solves)


def exact_pricing(G: Graph, lam, cfg: ExactConfig = ExactConfig(),
                  singletons_known: bool = False) -> PricingResult:
    """Solve AP(k) for every k and merge the violated sets.

    An empty ``collected`` together with ``certified`` proves that ``lam`` is
    feasible for the full dual problem up to ``epsilon``.  With
    ``singletons_known`` (all singleton cuts already enforced) and
    ``cfg.skip_k1``, AP(1) is not solved.
    """
    start = time.perf_counter()
    deadline = None if cfg.time_limit is None else start + cfg.time_limit
    ks = list(range(1, G.n + 1))
    if cfg.skip_k1 and singletons_known:
        ks = ks[1:]
    collected: dict = {}
    per_k = []
    unfinished = []
    best, best_set, nodes = math.inf, None, 0
    for i, k in enumerate(ks):
        k_deadline = None
        if deadline is not None:
            left = deadline - time.perf_counter()
            k_deadline = time.perf_counter() + max(left, 0.0) / (len(ks) - i)
        res = solve_apk(G, lam, k, cfg, k_deadline)
        nodes += res.nodes
        if not res.finished:
            unfinished.append(k)
        per_k.append((k, res.optimum))
        for T in res.collected:
            collected.setdefault(T, None)
        if res.optimum < best:
            best, best_set = res.optimum, res.best_set
        if cfg.early_exit and collected:
            unfinished.extend(ks[i + 1:])
            break
    return PricingResult(best, best_set, list(collected), per_k, not unfinished,
                         nodes, unfinished)


def enumerate_pricing(G: Graph, lam, exact: bool = False):
    """Minimum of ``sum lam_S - c(S)`` over all nonempty ``S`` by Gray-code enumeration.

    Practical up to about 20 vertices; refuses more than 25.  With ``exact`` the
    arithmetic is rational (``lam`` entries should then be ints or Fractions).
    Returns ``(optimum, best_set)``.
    """
    n = G.n
    if n > 25:
        raise ValueError(f"enumeration refused for n={n} > 25")
    if n == 0:
        raise ValueError("empty graph has no nonempty subsets")
    nbr = [sum(1 << int(u) for u in G.neighbors(v)) for v in range(n)]
    deg = [G.degree(v) for v in range(n)]
    lam = [Fraction(x) for x in lam] if exact else [float(x) for x in lam]

    def recompute(mask):
        members = [v for v in range(n) if mask >> v & 1]
        inner = sum((nbr[v] & mask).bit_count() for v in members) // 2
        num = 4 * inner - sum(deg[v] for v in members)
        if exact:
            return sum(lam[v] for v in members) - Fraction(num, len(members))
        return math.fsum(lam[v] for v in members) - num / len(members)

    mask = size = inner = degsum = 0
    lamsum = Fraction(0) if exact else 0.0
    best, best_mask = None, 0
    for i in range(1, 1 << n):
        v = (i & -i).bit_length() - 1
        bit = 1 << v
        if mask & bit:
            mask ^= bit
            size -= 1
            inner -= (nbr[v] & mask).bit_count()
            degsum -= deg[v]
            lamsum -= lam[v]
        else:
            inner += (nbr[v] & mask).bit_count()
            mask |= bit
            size += 1
            degsum += deg[v]
            lamsum += lam[v]
        if exact:
            val = lamsum - Fraction(4 * inner - degsum, size)
        else:
            val = lamsum - (4 * inner - degsum) / size
            if best is not None and val > best + 1e-9:
                continue
            val = recompute(mask)
        if best is None or val < best or (val == best and mask < best_mask):
            best, best_mask = val, mask
    return best, tuple(v for v in range(n) if best_mask >> v & 1)
