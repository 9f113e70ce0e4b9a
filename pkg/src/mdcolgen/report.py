"""JSON run reports for :func:`mdcolgen.colgen.run_colgen`."""
from __future__ import annotations

import copy
import json
from typing import Any, Dict, Optional

from .colgen import ColGenConfig, ColGenReport
from .graph import Graph

SCHEMA_KEYS = ("instance", "config", "result", "trace", "totals")
TIMING_KEYS = ("elapsed_s", "wall_s")


def build_report(G: Graph, rep: ColGenReport, cfg: ColGenConfig, name: str) -> Dict[str, Any]:
    clusters = None
    if rep.partition is not None:
        clusters = [[G.label(v) for v in C] for C in rep.partition.clusters]
    return {
        "instance": {"name": name, "n": G.n, "m": G.m},
        "config": {
            "epsilon": cfg.epsilon,
            "p_grid": [float(p) for p in cfg.peel.p_grid],
            "q_grid": [float(q) for q in cfg.peel.q_grid],
            "time_limit_s": cfg.time_limit,
            "seedless": True,
        },
        "result": {
            "status": rep.status,
            "dual_objective": rep.dual_objective,
            "primal_status": rep.primal_status,
            "modularity_density": rep.modularity_density,
            "lower_bound_only": rep.lower_bound_only,
            "clusters": clusters,
            "certificate": rep.certificate,
        },
        "trace": [
            {"iter": r.iteration, "mode": r.mode, "columns_added": r.columns_added,
             "master_objective": r.master_objective, "elapsed_s": r.elapsed}
            for r in rep.iterations
        ],
        "totals": {"columns": rep.total_columns, "exact_calls": rep.exact_calls,
                   "wall_s": rep.wall_time},
    }


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def loads(text: str) -> Dict[str, Any]:
    data = json.loads(text)
    missing = [k for k in SCHEMA_KEYS if k not in data]
    if missing:
        raise ValueError(f"report is missing keys: {missing}")
    return data


def without_timings(report: Dict[str, Any]) -> Dict[str, Any]:
    """Copy of ``report`` with every elapsed/wall-clock field removed."""
    out = copy.deepcopy(report)
    for row in out.get("trace", []):
        for key in TIMING_KEYS:
            row.pop(key, None)
    for key in TIMING_KEYS:
        out.get("totals", {}).pop(key, None)
    return out


def same_content(a: Dict[str, Any], b: Dict[str, Any], tol: Optional[float] = None) -> bool:
    """Semantic equality ignoring timings; floats compared within ``tol`` if given."""
    a, b = without_timings(a), without_timings(b)
    if tol is None:
        return a == b
    return _close(a, b, tol)


def _close(x, y, tol) -> bool:
    if isinstance(x, dict) and isinstance(y, dict):
        return x.keys() == y.keys() and all(_close(x[k], y[k], tol) for k in x)
    if isinstance(x, list) and isinstance(y, list):
        return len(x) == len(y) and all(_close(p, q, tol) for p, q in zip(x, y))
    if isinstance(x, float) or isinstance(y, float):
        try:
            return abs(float(x) - float(y)) <= tol
        except (TypeError, ValueError):
            return False
    return x == y
