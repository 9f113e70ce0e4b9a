"""Column generation for modularity density maximization.

The driver alternates between the restricted master LP and pricing: greedy
peeling first, exact AP(k) pricing only when peeling finds nothing.  When exact
pricing completes without a violated set, the duals are optimal for the full
dual problem and the master optimum is an upper bound on every partition's
modularity density.  If the final master solution is integral it is an optimal
partition; otherwise the best partition over the generated columns is found by
branch-and-bound and reported as a lower bound only.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from .graph import Graph, VertexSet, vertex_set
from .lp import Column, LpError, LpSolution, RestrictedMaster
from .objectives import Partition, cluster_contribution, modularity_density, pricing_objective
from .peeling import PeelConfig, peel_pricing
from .pricing import ExactConfig, exact_pricing

log = logging.getLogger(__name__)

INTEGRAL_TOL = 1e-6


class InconsistentPrimal(RuntimeError):
    """Near-integral master solution whose unit columns do not partition V."""


@dataclass
class ColGenConfig:
    peel: PeelConfig = field(default_factory=PeelConfig)
    epsilon: float = 1e-6
    time_limit: Optional[float] = None
    max_iterations: Optional[int] = None
    skip_k1: bool = True
    early_exit_exact: bool = False
    lp_bound: bool = True
    column_cap: Optional[int] = None
    initial_columns: Sequence[Sequence[int]] = ()

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.time_limit is not None and not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass
class IterationRecord:
    iteration: int
    mode: str  # peel | exact
    columns_added: int
    master_objective: float
    elapsed: float
    min_violation: float = math.nan
    duals: Optional[np.ndarray] = None
    added: List[VertexSet] = field(default_factory=list)


@dataclass
class ColGenReport:
    dual_objective: float
    duals: np.ndarray
    status: str  # dual-optimal | time-limit | iteration-limit
    primal_status: str  # integral | fractional
    partition: Optional[Partition]
    modularity_density: Optional[float]
    lower_bound_only: bool
    iterations: List[IterationRecord]
    total_columns: int
    certificate: bool
    exact_calls: int = 0
    duplicates_dropped: int = 0
    wall_time: float = 0.0
    columns: List[Column] = field(default_factory=list)


def recover_primal(sol: LpSolution, columns: Sequence[Column], n: int):
    """``("integral", Partition)`` if every ``z_S`` is within 1e-6 of 0 or 1,
    else ``("fractional", None)``."""
    z = np.asarray(sol.primal, dtype=np.float64)
    if np.any(np.minimum(np.abs(z), np.abs(z - 1.0)) > INTEGRAL_TOL):
        return "fractional", None
    chosen = [columns[j].members for j in np.flatnonzero(z > 0.5)]
    try:
        return "integral", Partition.from_clusters(chosen, n)
    except ValueError as exc:
        raise InconsistentPrimal(f"integral master solution is not a partition: {exc}") from exc


def integer_restricted_master(columns: Sequence[Column], n: int) -> Partition:
    """Best set partition using only ``columns`` (branch-and-bound on ``z``).

    Branches on the lowest uncovered vertex, trying the columns that cover it
    in order of decreasing contribution.  The bound gives every uncovered vertex
    the best per-member share ``c(S)/|S|`` of any column containing it.
    """
    by_vertex: List[list] = [[] for _ in range(n)]
    share = np.full(n, -math.inf)
    for col in columns:
        mask = 0
        for v in col.members:
            mask |= 1 << v
        for v in col.members:
            share[v] = max(share[v], col.contribution / len(col.members))
        by_vertex[col.members[0]].append((col.contribution, mask, col.members))
    singles = {c.members[0] for c in columns if len(c.members) == 1}
    for v in range(n):
        if v not in singles:
            raise ValueError(f"singleton column for vertex {v} is missing")
        by_vertex[v].sort(key=lambda t: (-t[0], t[2]))
    full = (1 << n) - 1
    share_list = share.tolist()

    best_val = sum(c.contribution for c in columns if len(c.members) == 1)
    best_pick = [(v,) for v in range(n)]

    # columns are indexed by their smallest member, which is the vertex being
    # covered when they are considered: the lowest uncovered vertex
    def rest_bound(covered):
        return sum(share_list[v] for v in range(n) if not covered >> v & 1)

    def dfs(covered, value, picked):
        nonlocal best_val, best_pick
        if covered == full:
            if value > best_val + 1e-12:
                best_val, best_pick = value, list(picked)
            return
        if value + rest_bound(covered) <= best_val + 1e-12:
            return
        v = (~covered & (covered + 1)).bit_length() - 1
        for contrib, mask, members in by_vertex[v]:
            if mask & covered:
                continue
            picked.append(members)
            dfs(covered | mask, value + contrib, picked)
            picked.pop()

    dfs(0, 0.0, [])
    return Partition.from_clusters(best_pick, n)


def run_colgen(G: Graph, cfg: Optional[ColGenConfig] = None) -> ColGenReport:
    cfg = cfg or ColGenConfig()
    n = G.n
    if n < 1:
        raise ValueError("graph has no vertices")
    t0 = time.perf_counter()
    deadline = None if cfg.time_limit is None else t0 + cfg.time_limit
    peel_cfg = replace(cfg.peel, epsilon=cfg.epsilon)

    start = [(v,) for v in range(n)]
    start += [vertex_set(S, n) for S in cfg.initial_columns]
    master = RestrictedMaster(n, [Column(S, cluster_contribution(G, S)) for S in start])
    added_at = {}

    trace: List[IterationRecord] = []
    status, certificate = "dual-optimal", False
    exact_calls = duplicates = 0
    prev_obj = -math.inf
    it = 0
    while True:
        sol = master.solve()
        if sol.status != "optimal":
            raise LpError("restricted master did not reach optimality")
        if sol.objective < prev_obj - 1e-8:
            raise LpError(f"master objective decreased: {prev_obj} -> {sol.objective}")
        prev_obj = sol.objective
        lam = sol.duals
        if deadline is not None and time.perf_counter() > deadline:
            status = "time-limit"
            break
        if cfg.max_iterations is not None and it >= cfg.max_iterations:
            status = "iteration-limit"
            break
        it += 1

        mode = "peel"
        family = peel_pricing(G, lam, peel_cfg)
        fresh = [S for S in family if S not in master]
        duplicates += len(family) - len(fresh)
        if not fresh:
            mode = "exact"
            remaining = None if deadline is None else max(deadline - time.perf_counter(), 1e-3)
            res = exact_pricing(G, lam, ExactConfig(epsilon=cfg.epsilon, use_lp=cfg.lp_bound,
                                                    skip_k1=cfg.skip_k1,
                                                    early_exit=cfg.early_exit_exact,
                                                    certify_only=True,
                                                    time_limit=remaining),
                                singletons_known=True)
            exact_calls += 1
            log.info("exact pricing at iteration %d: %d violated sets, %d nodes, master %.6f",
                     it, len(res.collected), res.nodes, sol.objective)
            fresh = [S for S in res.collected if S not in master]
            duplicates += len(res.collected) - len(fresh)
            if not fresh:
                if res.certified:
                    certificate = True
                else:
                    status = "time-limit"
                break

        cols, worst = [], math.inf
        for S in fresh:
            g = pricing_objective(G, S, lam)
            if g > cfg.epsilon:
                cols.append((g, Column(S, cluster_contribution(G, S))))
                worst = min(worst, g)
        if cfg.column_cap is not None:
            cols.sort(key=lambda t: -t[0])
            cols = cols[:cfg.column_cap]
        if not cols:
            raise LpError("pricing returned no violated column")
        master.add_columns([c for _, c in cols])
        for _, c in cols:
            added_at[c.members] = it
        trace.append(IterationRecord(it, mode, len(cols), sol.objective,
                                     time.perf_counter() - t0, worst, lam.copy(),
                                     [c.members for _, c in cols]))
        log.debug("iter %d %s +%d master=%.6f", it, mode, len(cols), sol.objective)

    primal_status, partition = recover_primal(sol, master.columns, n)
    lower_only = False
    if partition is None:
        partition = integer_restricted_master(master.columns, n)
        lower_only = True
    D = modularity_density(G, partition)
    if primal_status == "integral" and abs(D - sol.objective) > 1e-6:
        raise InconsistentPrimal(f"integral partition value {D} differs from master {sol.objective}")
    return ColGenReport(
        dual_objective=float(lam.sum()), duals=lam, status=status,
        primal_status=primal_status, partition=partition, modularity_density=D,
        lower_bound_only=lower_only or status != "dual-optimal", iterations=trace,
        total_columns=len(master), certificate=certificate, exact_calls=exact_calls,
        duplicates_dropped=duplicates, wall_time=time.perf_counter() - t0,
        columns=list(master.columns))
