import itertools

import numpy as np
import pytest

from conftest import k4_pendant, random_graph
from mdcolgen.colgen import (ColGenConfig, InconsistentPrimal, integer_restricted_master,
                             recover_primal, run_colgen)
from mdcolgen.graph import Graph
from mdcolgen.lp import Column, LpSolution
from mdcolgen.objectives import Partition, cluster_contribution, modularity_density
from mdcolgen.oracles import brute_force_partition_opt, brute_force_set_partition
from mdcolgen.pricing import enumerate_pricing

K3 = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


def columns_for(G, sets):
    return [Column(tuple(S), cluster_contribution(G, S)) for S in sets]


def test_k3():
    rep = run_colgen(K3)
    assert rep.dual_objective == pytest.approx(2.0, abs=1e-9)
    assert rep.primal_status == "integral"
    assert rep.partition.clusters == ((0, 1, 2),)
    assert rep.modularity_density == pytest.approx(2.0)
    assert rep.certificate and not rep.lower_bound_only
    assert rep.status == "dual-optimal"


def test_edgeless():
    rep = run_colgen(Graph.from_edges(3, []))
    assert rep.dual_objective == pytest.approx(0.0, abs=1e-12)
    assert rep.partition.clusters == ((0,), (1,), (2,))
    assert rep.modularity_density == 0
    assert rep.certificate


def test_single_vertex():
    rep = run_colgen(Graph.from_edges(1, []))
    assert rep.certificate and rep.modularity_density == 0


def test_k4_pendant_matches_oracle():
    G = k4_pendant()
    rep = run_colgen(G)
    best, _ = brute_force_partition_opt(G)
    assert rep.certificate
    assert rep.dual_objective >= best - 1e-6
    if rep.primal_status == "integral":
        assert rep.modularity_density == pytest.approx(best, abs=1e-6)


def test_against_partition_oracle(rng):
    for _ in range(25):
        G = random_graph(rng, int(rng.integers(2, 9)), float(rng.choice([0.2, 0.5, 0.8])))
        rep = run_colgen(G)
        best, _ = brute_force_partition_opt(G)
        assert rep.certificate
        assert rep.dual_objective >= best - 1e-6
        # the reported partition is real and never beats the optimum
        assert rep.modularity_density == pytest.approx(modularity_density(G, rep.partition))
        assert rep.modularity_density <= best + 1e-6
        if rep.primal_status == "integral":
            assert rep.modularity_density == pytest.approx(best, abs=1e-6)
        else:
            assert rep.lower_bound_only


def test_final_duals_are_dual_feasible(rng):
    for _ in range(10):
        G = random_graph(rng, int(rng.integers(3, 11)), 0.5)
        rep = run_colgen(G)
        opt, _ = enumerate_pricing(G, rep.duals)
        assert opt >= -1e-6


def test_trace_invariants(rng):
    G = random_graph(rng, 10, 0.5)
    rep = run_colgen(G)
    objs = [r.master_objective for r in rep.iterations]
    assert all(b >= a - 1e-8 for a, b in zip(objs, objs[1:]))
    assert objs[-1] <= rep.dual_objective + 1e-8
    for rec in rep.iterations:
        assert rec.columns_added == len(rec.added) > 0
        for S in rec.added:
            # every column was violated by the duals it was priced against
            g = cluster_contribution(G, S) - rec.duals[list(S)].sum()
            assert g > 1e-6
    assert rep.total_columns == G.n + sum(r.columns_added for r in rep.iterations)


def test_iteration_and_time_limits(rng):
    G = random_graph(rng, 12, 0.5)
    rep = run_colgen(G, ColGenConfig(max_iterations=1))
    assert rep.status == "iteration-limit"
    assert not rep.certificate and rep.lower_bound_only
    assert len(rep.iterations) == 1
    rep = run_colgen(G, ColGenConfig(time_limit=1e-6))
    assert rep.status == "time-limit"
    assert not rep.certificate
    assert rep.partition is not None


def test_initial_columns_are_used():
    rep = run_colgen(K3, ColGenConfig(initial_columns=[[0, 1, 2]]))
    assert rep.certificate and rep.modularity_density == pytest.approx(2.0)
    assert rep.iterations == [] or rep.iterations[0].master_objective == pytest.approx(2.0)


def test_config_validation():
    with pytest.raises(ValueError):
        ColGenConfig(epsilon=0)
    with pytest.raises(ValueError):
        ColGenConfig(time_limit=0)
    with pytest.raises(ValueError):
        ColGenConfig(max_iterations=0)
    with pytest.raises(ValueError):
        run_colgen(Graph.from_edges(0, []))


def test_deterministic(rng):
    G = random_graph(rng, 10, 0.5)
    a, b = run_colgen(G), run_colgen(G)
    assert a.dual_objective == b.dual_objective
    assert [r.added for r in a.iterations] == [r.added for r in b.iterations]


# -- primal recovery ---------------------------------------------------------------


def solution(z):
    z = np.asarray(z, dtype=float)
    return LpSolution(0.0, z, np.zeros(2), [], "optimal")


def test_recover_two_column_cover():
    cols = [Column((0, 1), 0.0), Column((0,), 0.0), Column((1,), 0.0), Column((2, 3), 0.0)]
    status, P = recover_primal(solution([1, 0, 0, 1]), cols, 4)
    assert status == "integral"
    assert P.clusters == ((0, 1), (2, 3))


def test_recover_fractional():
    cols = [Column((0,), 0.0), Column((1,), 0.0), Column((0, 1), 0.0)]
    assert recover_primal(solution([0.5, 0.5, 0.5]), cols, 2) == ("fractional", None)


def test_recover_inconsistent():
    cols = [Column((0, 1), 0.0), Column((1, 2), 0.0)]
    with pytest.raises(InconsistentPrimal):
        recover_primal(solution([1, 1]), cols, 3)


def test_integer_master_examples():
    single = columns_for(K3, [(0,), (1,), (2,)])
    assert integer_restricted_master(single, 3).clusters == ((0,), (1,), (2,))
    full = single + columns_for(K3, [(0, 1, 2)])
    assert integer_restricted_master(full, 3).clusters == ((0, 1, 2),)
    with pytest.raises(ValueError):
        integer_restricted_master(single[:2], 3)


def test_integer_master_matches_enumeration(rng):
    for _ in range(30):
        n = int(rng.integers(2, 9))
        G = random_graph(rng, n, 0.5)
        pool = [S for r in range(2, n + 1) for S in itertools.combinations(range(n), r)]
        extra = min(len(pool), 20 - n)
        picks = rng.choice(len(pool), size=extra, replace=False)
        cols = columns_for(G, [(v,) for v in range(n)] + [pool[i] for i in sorted(picks)])
        P = integer_restricted_master(cols, n)
        best, _ = brute_force_set_partition([(c.members, c.contribution) for c in cols], n)
        assert modularity_density(G, P) == pytest.approx(best, abs=1e-9)
        assert set(P.clusters) <= {c.members for c in cols}


def test_partition_type_roundtrip():
    P = Partition.from_labels([0, 0, 1])
    assert P.clusters == ((0, 1), (2,))
