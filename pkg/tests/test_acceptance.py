"""Acceptance criteria, one test each.

Every test records a single PASS / FAIL / SKIP / INFO line that is repeated in
the "acceptance criteria" section at the end of the pytest run.
"""
import itertools
import json
import os
import time

import networkx as nx
import numpy as np
import pytest

from conftest import k4_pendant, random_graph, record
from mdcolgen import cli
from mdcolgen.bench import load_manifest, run_bench
from mdcolgen.colgen import run_colgen
from mdcolgen.fixtures import fixture_path
from mdcolgen.gadgets import (NON_CERTIFYING, GadgetWarning, build_ap_gadget, build_md_gadget,
                              cut_to_partition, md_threshold, regular_density_forms,
                              two_cluster_density)
from mdcolgen.graph import Graph, complement, induced_edge_count
from mdcolgen.objectives import Partition, modularity_density, pricing_objective
from mdcolgen.oracles import (brute_force_clique_number, brute_force_densest,
                              brute_force_partition_opt, brute_force_pricing)
from mdcolgen.peeling import peel_densest
from mdcolgen.pricing import enumerate_pricing, exact_pricing

KARATE_D = 7.8451
KARATE_LIMIT_S = 30 * 60


def test_criterion_01_karate(tmp_path):
    out = tmp_path / "karate.json"
    t0 = time.perf_counter()
    code = cli.main(["solve", "--input", str(fixture_path("karate.txt")), "--one-indexed",
                     "--out", str(out)])
    wall = time.perf_counter() - t0
    res = json.loads(out.read_text())["result"] if code == 0 else {}
    D = res.get("modularity_density")
    ok = (code == 0 and res["primal_status"] == "integral" and res["certificate"] is True
          and D is not None and abs(D - KARATE_D) <= 1e-3 and wall <= KARATE_LIMIT_S)
    record(1, ok, f"karate D={D} primal={res.get('primal_status')} "
                  f"certificate={res.get('certificate')} wall={wall:.0f}s")
    assert ok


def test_criterion_02_strike_dolphins():
    manifest = os.environ.get("MDCOLGEN_BENCH_MANIFEST") or str(fixture_path("bench.json"))
    entries = [e for e in load_manifest(manifest) if e["name"] in ("strike", "dolphins")]
    rows = run_bench(entries)
    outcomes = {r.name: r.outcome for r in rows}
    ok = len(rows) == 2 and all(o in ("PASS", "SKIP") for o in outcomes.values())
    outcome = "SKIP" if ok and set(outcomes.values()) == {"SKIP"} else None
    detail = ", ".join(f"{r.name}={r.outcome}" + ("" if r.value is None else f"(D={r.value:.5f})")
                       for r in rows)
    record(2, ok, detail + " (supply files via MDCOLGEN_BENCH_MANIFEST)", outcome)
    assert ok


def test_criterion_03_partition_oracle():
    rng = np.random.default_rng(3)
    failures, integral, checked = [], 0, 0
    for i in range(200):
        n = int(rng.integers(1, 10))
        p = float(rng.choice([0.2, 0.5, 0.8]))
        G = random_graph(rng, n, p)
        rep = run_colgen(G)
        best, _ = brute_force_partition_opt(G)
        checked += 1
        if rep.dual_objective < best - 1e-6:
            failures.append((i, "weak duality"))
        if rep.primal_status == "integral":
            integral += 1
            if abs(modularity_density(G, rep.partition) - best) > 1e-6:
                failures.append((i, "integral partition not optimal"))
    ok = not failures
    record(3, ok, f"{checked} graphs, {integral} integral, failures={failures[:3]}")
    assert ok


def test_criterion_04_pricing_oracle():
    rng = np.random.default_rng(4)
    failures = []
    for i in range(100):
        n = int(rng.integers(1, 13))
        G = random_graph(rng, n, float(rng.choice([0.2, 0.5, 0.8])))
        lam = rng.uniform(-3, 3, n)
        res = exact_pricing(G, lam)
        opt, _ = enumerate_pricing(G, lam)
        if not res.certified or abs(res.best_value - opt) > 1e-9:
            failures.append((i, res.best_value, opt))
        for S in res.collected:
            if -pricing_objective(G, S, lam) >= -1e-6:
                failures.append((i, "collected set not violated", S))
    ok = not failures
    record(4, ok, f"100 (graph, lambda) pairs, failures={failures[:3]}")
    assert ok


def test_criterion_05_dual_certificate():
    rng = np.random.default_rng(5)
    failures, worst = [], np.inf
    for i in range(50):
        n = int(rng.integers(2, 16))
        G = random_graph(rng, n, float(rng.choice([0.2, 0.5, 0.8])))
        rep = run_colgen(G)
        # minimum over all 2^n - 1 constraints of sum(lam_S) - c(S)
        slack, _ = brute_force_pricing(G, rep.duals)
        worst = min(worst, slack)
        if not rep.certificate or slack < -1e-6:
            failures.append((i, n, slack))
    ok = not failures
    record(5, ok, f"50 graphs n<=15, min constraint slack {worst:.2e}, failures={failures[:3]}")
    assert ok


def test_criterion_06_peeling_half_approximation():
    rng = np.random.default_rng(6)
    worst, failures = np.inf, []
    for i in range(200):
        n = int(rng.integers(1, 15))
        G = random_graph(rng, n, float(rng.uniform(0.1, 0.9)))
        opt, _ = brute_force_densest(G)
        S = peel_densest(G)
        got = induced_edge_count(G, S) / len(S)
        if opt > 0:
            worst = min(worst, got / opt)
        if got < 0.5 * opt - 1e-12:
            failures.append(i)
    for n in range(1, 9):
        Kn = Graph.from_edges(n, list(itertools.combinations(range(n), 2)))
        S = peel_densest(Kn)
        if induced_edge_count(Kn, S) / len(S) != brute_force_densest(Kn)[0]:
            failures.append(f"K{n}")
    S = peel_densest(k4_pendant())
    pendant = induced_edge_count(k4_pendant(), S) / len(S)
    if pendant != 1.5 or brute_force_densest(k4_pendant())[0] != 1.5:
        failures.append("K4+pendant")
    ok = not failures
    record(6, ok, f"200 graphs n<=14, worst ratio {worst:.3f}, K_n and K4+pendant exact, "
                  f"failures={failures[:3]}")
    assert ok


def _bipartition_identity(G: Graph, d: int) -> bool:
    """Two-cluster form against the direct value on every bipartition, in integers."""
    n = G.n
    E = G.edges
    shifts = np.arange(n - 1, dtype=np.int64)
    for lo in range(1, 1 << (n - 1), 1 << 15):
        masks = np.arange(lo, min(lo + (1 << 15), 1 << (n - 1)), dtype=np.int64)
        bits = np.zeros((len(masks), n), dtype=bool)
        bits[:, :n - 1] = (masks[:, None] >> shifts) & 1
        a = bits[:, E[:, 0]]
        b = bits[:, E[:, 1]]
        e_in = np.count_nonzero(a & b, axis=1)
        e_out = np.count_nonzero(~a & ~b, axis=1)
        cut = np.count_nonzero(a != b, axis=1)
        c = bits.sum(axis=1)
        r = n - c
        # (4 e_C - d|C|)/|C| + (4 e_R - d|R|)/|R| == 2d - 2 n cut/(|C||R|), times |C||R|
        lhs = (4 * e_in - d * c) * r + (4 * e_out - d * r) * c
        rhs = 2 * d * c * r - 2 * n * cut
        if not np.array_equal(lhs, rhs):
            return False
    return True


def test_criterion_07_regular_identities():
    rng = np.random.default_rng(7)
    graphs, max_err, failures = 0, 0.0, []
    while graphs < 100:
        d = int(rng.choice([2, 3, 4]))
        n = int(rng.integers(d + 1, 21))
        if n * d % 2:
            continue
        H = nx.random_regular_graph(d, n, seed=int(rng.integers(2**31)))
        G = Graph.from_edges(n, list(H.edges()))
        graphs += 1
        for _ in range(20):
            labels = rng.integers(0, int(rng.integers(1, n + 1)), size=n)
            P = Partition.from_labels(labels.tolist())
            direct = modularity_density(G, P)
            inner, cut = regular_density_forms(G, P)
            max_err = max(max_err, abs(float(inner) - direct), abs(float(cut) - direct))
            if inner != cut or max_err > 1e-9:
                failures.append((graphs, "forms"))
        if not _bipartition_identity(G, d):
            failures.append((graphs, "bipartition identity"))
        # the library function on a sample of bipartitions
        for _ in range(5):
            C = [v for v in range(n) if rng.random() < 0.5]
            if 0 < len(C) < n:
                rest = [v for v in range(n) if v not in C]
                if two_cluster_density(G, C) != modularity_density(G, [C, rest], exact=True):
                    failures.append((graphs, "two_cluster_density"))
    ok = not failures
    record(7, ok, f"{graphs} regular graphs x 20 partitions, max error {max_err:.1e}, "
                  f"all bipartitions checked, failures={failures[:3]}")
    assert ok


def _all_cuts(n):
    """One side of every unordered proper bipartition of ``range(n)``: the side holding 0."""
    for r in range(1, n):
        for X in itertools.combinations(range(n), r):
            if X[0] == 0:
                yield X


def test_criterion_08_md_gadget_identity():
    failures, cuts = [], 0
    K4 = Graph.from_edges(4, list(itertools.combinations(range(4), 2)))
    K33 = Graph.from_edges(6, [(u, v) for u in range(3) for v in range(3, 6)])
    cases = [(K4, None), (K33, 8)]
    for G, override in cases:
        if override is None:
            g = build_md_gadget(G, 4)
        else:
            with pytest.warns(GadgetWarning):
                g = build_md_gadget(G, 9, M_override=override)
            if g.stamp != NON_CERTIFYING:
                failures.append("K33 gadget not stamped non-certifying")
        H = g.complement_g_star
        for X in _all_cuts(G.n):
            val = sum(1 for u, v in G.edges if (u in X) != (v in X))
            D = modularity_density(H, cut_to_partition(g, X), exact=True)
            cuts += 1
            if D != md_threshold(g.M, G.n, val):
                failures.append((G.n, X, D))
    ok = not failures
    record(8, ok, f"{cuts} cuts (K4 at M=64, K33 at M=8), exact rational match, "
                  f"failures={failures[:3]}")
    assert ok


def _circulant(n, offsets):
    return Graph.from_edges(n, [(v, (v + s) % n) for v in range(n) for s in offsets])


def _ap_instances(rng):
    out = []
    for n in (8, 10, 12):
        # circulants C_n(S) of degree n - 4
        half = list(range(1, n // 2))
        for S in itertools.combinations(half, (n - 4) // 2):
            G = _circulant(n, S)
            if G.degrees.min() == G.degrees.max() == n - 4:
                out.append((f"C{n}{S}", G))
        # complements of random 3-regular graphs are (n-4)-regular
        for _ in range(4):
            H = nx.random_regular_graph(3, n, seed=int(rng.integers(2**31)))
            out.append((f"co-3reg{n}", complement(Graph.from_edges(n, list(H.edges())))))
    return out


def test_criterion_09_ap_gadget():
    rng = np.random.default_rng(9)
    instances = _ap_instances(rng)
    failures, checks = [], 0
    for name, G in instances:
        omega = brute_force_clique_number(G)
        # a largest clique reaches r*, a size with no clique stays below it;
        # smaller sizes (cliques of size > k exist) exceed it
        for k in (omega - 1, omega, omega + 1):
            if k < 2 or k > G.n:
                continue
            gad = build_ap_gadget(G, k)
            opt, _ = enumerate_pricing(G, gad.lam_exact, exact=True)
            best = -opt  # largest violation sum c(S) - lambda(S)
            checks += 1
            if k == omega and best != gad.r_star:
                failures.append((name, k, best, "expected equality"))
            if k == omega + 1 and not best < gad.r_star:
                failures.append((name, k, best, "expected strict inequality"))
            if k == omega - 1 and not best > gad.r_star:
                failures.append((name, k, best, "expected excess"))
    ok = len(instances) >= 20 and not failures
    record(9, ok, f"{len(instances)} (n-4)-regular graphs, {checks} (graph, k) checks against "
                  f"brute-force clique number, failures={failures[:3]}")
    assert ok


def test_criterion_10_out_of_scope():
    entries = load_manifest(fixture_path("bench.json"))
    stretch = sorted(e["name"] for e in entries if e.get("stretch"))
    ok = {"adjnoun", "football"} <= set(stretch)
    record(10, ok, "not targets: large-instance runtimes, long-run comparisons, ablations; "
                   f"stretch manifest rows without pass requirement: {', '.join(stretch)}",
           "INFO" if ok else None)
    assert ok
