"""Benchmark harness: solve every manifest instance and compare with its expected value.

A manifest is a JSON list of objects with keys ``path``, ``expected_D`` and
``tolerance`` and optionally ``name``, ``one_indexed`` and ``stretch``.
Relative paths are resolved against the manifest's directory.  Missing files
are skipped; stretch rows are reported but never fail.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from .colgen import ColGenConfig, run_colgen
from .graph import read_edge_list

log = logging.getLogger(__name__)


@dataclass
class BenchRow:
    name: str
    path: str
    expected: float
    tolerance: float
    stretch: bool = False
    outcome: str = "SKIP"  # PASS | FAIL | SKIP | INFO
    value: Optional[float] = None
    certificate: bool = False
    primal_status: str = ""
    wall: float = 0.0
    note: str = ""


def load_manifest(path) -> List[dict]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list):
        raise ValueError("manifest must be a JSON list")
    for i, e in enumerate(entries):
        missing = {"path", "expected_D", "tolerance"} - set(e)
        if missing:
            raise ValueError(f"manifest entry {i} lacks {sorted(missing)}")
        resolved = Path(e["path"])
        if not resolved.is_absolute():
            resolved = path.parent / resolved
        e["path"] = str(resolved)
        e.setdefault("name", resolved.stem)
    return entries


def run_entry(entry: dict, time_limit: Optional[float] = None) -> BenchRow:
    row = BenchRow(entry["name"], entry["path"], float(entry["expected_D"]),
                   float(entry["tolerance"]), bool(entry.get("stretch", False)))
    if not Path(row.path).exists():
        row.note = "file not found"
        return row
    t0 = time.perf_counter()
    try:
        G = read_edge_list(row.path, one_indexed=bool(entry.get("one_indexed", False)))
        rep = run_colgen(G, ColGenConfig(time_limit=time_limit))
    except Exception as exc:  # a broken row must not stop the run
        row.wall = time.perf_counter() - t0
        row.outcome = "INFO" if row.stretch else "FAIL"
        row.note = f"{type(exc).__name__}: {exc}"
        return row
    row.wall = time.perf_counter() - t0
    row.value = rep.modularity_density
    row.certificate = rep.certificate
    row.primal_status = rep.primal_status
    ok = (rep.certificate and rep.primal_status == "integral" and row.value is not None
          and abs(row.value - row.expected) <= row.tolerance)
    if ok:
        row.outcome = "PASS"
    else:
        row.outcome = "INFO" if row.stretch else "FAIL"
        row.note = rep.status
    return row


def run_bench(entries: List[dict], time_limit: Optional[float] = None,
              workers: int = 1) -> List[BenchRow]:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_entry, entries, [time_limit] * len(entries)))
    rows = []
    for e in entries:
        row = run_entry(e, time_limit)
        log.info("%s: %s", row.name, row.outcome)
        rows.append(row)
    return rows


def format_table(rows: List[BenchRow]) -> str:
    head = f"{'instance':<12} {'outcome':<7} {'expected':>10} {'D':>10} {'cert':>5} {'time_s':>8}  note"
    lines = [head, "-" * len(head)]
    for r in rows:
        val = "-" if r.value is None else f"{r.value:.5f}"
        cert = "yes" if r.certificate else "no"
        lines.append(f"{r.name:<12} {r.outcome:<7} {r.expected:>10.5f} {val:>10} {cert:>5} "
                     f"{r.wall:>8.1f}  {r.note}")
    return "\n".join(lines)
