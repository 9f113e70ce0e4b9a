import numpy as np
import pytest

from conftest import k4_pendant, random_graph
from mdcolgen.graph import Graph, induced_edge_count
from mdcolgen.objectives import pricing_objective
from mdcolgen.oracles import brute_force_densest
from mdcolgen.peeling import PeelConfig, peel_densest, peel_pricing, peel_sequence

K3 = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


def density(G, S):
    return induced_edge_count(G, S) / len(S)


def test_densest_k4_pendant():
    S = peel_densest(k4_pendant())
    assert S == (0, 1, 2, 3)
    assert density(k4_pendant(), S) == 1.5


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_densest_complete(n):
    G = Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])
    S = peel_densest(G)
    assert S == tuple(range(n))
    assert density(G, S) == (n - 1) / 2


def test_densest_edgeless():
    S = peel_densest(Graph.from_edges(4, []))
    assert len(S) >= 1 and density(Graph.from_edges(4, []), S) == 0


def test_densest_rejects_empty():
    with pytest.raises(ValueError):
        peel_densest(Graph.from_edges(0, []))


def test_sequence_lowest_id_ties():
    # every vertex of C4 has degree 2, so vertex 0 leaves first
    C4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert peel_sequence(C4)[0] == 0
    assert sorted(peel_sequence(C4)) == [0, 1, 2, 3]


def test_densest_half_approximation(rng):
    for _ in range(30):
        G = random_graph(rng, int(rng.integers(2, 11)), 0.4)
        opt, _ = brute_force_densest(G)
        assert density(G, peel_densest(G)) >= 0.5 * opt - 1e-12


def test_pricing_zero_duals_k3():
    assert (0, 1, 2) in peel_pricing(K3, [0.0, 0.0, 0.0])


def test_pricing_feasible_duals_k3():
    assert peel_pricing(K3, [2 / 3] * 3) == []


def test_pricing_negative_duals_k3():
    fam = peel_pricing(K3, [-2.0, -2.0, -2.0])
    # the lowest-id tie rule drops vertex 0 first, so the only pair reached is {1, 2}
    assert fam == [(0, 1, 2), (1, 2)]
    assert pricing_objective(K3, (0, 1, 2), [-2.0] * 3) == pytest.approx(8.0)
    assert pricing_objective(K3, (1, 2), [-2.0] * 3) == pytest.approx(4.0)


def test_pricing_sets_are_violated_and_not_singletons(rng):
    for _ in range(40):
        G = random_graph(rng, int(rng.integers(2, 13)), 0.5)
        lam = rng.uniform(-3, 3, G.n)
        cfg = PeelConfig()
        fam = peel_pricing(G, lam, cfg)
        assert len(set(fam)) == len(fam)
        for S in fam:
            assert len(S) >= 2
            assert list(S) == sorted(S)
            assert pricing_objective(G, S, lam) > cfg.epsilon


def test_pricing_exclusion_and_determinism(rng):
    G = random_graph(rng, 12, 0.5)
    lam = rng.uniform(-3, 1, G.n)
    fam = peel_pricing(G, lam)
    assert fam == peel_pricing(G, lam.copy())
    assert fam, "expected violated sets for strongly negative duals"
    rest = peel_pricing(G, lam, exclude={fam[0]})
    assert rest == fam[1:]


def test_pricing_single_vertex_graph():
    assert peel_pricing(Graph.from_edges(1, []), [-5.0]) == []


def test_pricing_rejects_bad_input():
    with pytest.raises(ValueError):
        peel_pricing(K3, [0.0, 0.0])
    with pytest.raises(ValueError):
        PeelConfig(p_grid=())
    with pytest.raises(ValueError):
        PeelConfig(q_grid=(1.5,))
    with pytest.raises(ValueError):
        PeelConfig(epsilon=0.0)


def test_pass_work_is_quadratic():
    # contribution evaluations per pass grow like n^2 / 2
    counts = []
    sizes = [50, 100, 200]
    rng = np.random.default_rng(7)
    for n in sizes:
        G = random_graph(rng, n, 0.1)
        stats = {}
        peel_pricing(G, np.zeros(n), PeelConfig(p_grid=(0.5,), q_grid=(0.5,)), stats=stats)
        assert stats["passes"] == 1
        counts.append(stats["contribution_evals"])
    for n, c in zip(sizes, counts):
        assert c == n * (n + 1) // 2 - 1
    # doubling n multiplies the work by about 4, not 8
    assert 3.5 < counts[2] / counts[1] < 4.5
