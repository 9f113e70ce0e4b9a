from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mdcolgen.fixtures import load_fixture
from mdcolgen.graph import complete_graph, empty_graph, path_graph
from mdcolgen.objectives import (Partition, blended_numerator, blended_objective,
                                 cluster_contribution, contribution, modularity_density,
                                 pricing_objective)

from conftest import random_graph

# three-cluster karate partition, 0-indexed (vertex v is member v+1)
KARATE_BEST = [
    (0, 1, 2, 3, 7, 9, 11, 12, 13, 17, 19, 21),
    (4, 5, 6, 10, 16),
    (8, 14, 15, 18, 20, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33),
]


def test_contribution_examples():
    K3, P3 = complete_graph(3), path_graph(3)
    assert cluster_contribution(K3, (0, 1, 2)) == 2.0
    assert cluster_contribution(P3, (0, 1)) == 0.5
    for v in range(3):
        assert cluster_contribution(P3, (v,)) == -P3.degree(v)
    assert cluster_contribution(empty_graph(2), (1,)) == 0.0
    assert cluster_contribution(P3, (0, 1), exact=True) == Fraction(1, 2)
    with pytest.raises(ValueError):
        cluster_contribution(K3, ())


def test_density_examples():
    K3, P3 = complete_graph(3), path_graph(3)
    assert modularity_density(K3, [[0, 1, 2]]) == 2.0
    assert modularity_density(P3, [[0, 1], [2]]) == -0.5
    with pytest.raises(ValueError):
        modularity_density(P3, [[0, 1]])
    with pytest.raises(ValueError):
        modularity_density(P3, [[0, 1], [1, 2]])


def test_karate_partition_value():
    G = load_fixture("karate")
    assert modularity_density(G, KARATE_BEST) == pytest.approx(7.8451, abs=1e-4)
    assert modularity_density(G, KARATE_BEST, exact=True) == Fraction(4001, 510)


def test_pricing_examples():
    K3 = complete_graph(3)
    assert pricing_objective(K3, (0, 1, 2), [-2, -2, -2]) == 8.0
    assert pricing_objective(K3, (0, 1, 2), [Fraction(2, 3)] * 3, exact=True) == 0
    assert pricing_objective(K3, (0, 1), np.zeros(3)) == cluster_contribution(K3, (0, 1))


def test_blended_examples():
    K3 = complete_graph(3)
    lam = [1.0, 1.0, 1.0]
    assert blended_objective(K3, (0, 1, 2), lam, 0.0) == -3.0
    assert blended_objective(K3, (0, 1, 2), lam, 0.5) == -0.5
    assert blended_objective(K3, (0, 1, 2), lam, 1.0) == 2.0
    with pytest.raises(ValueError):
        blended_objective(K3, (0,), lam, 1.5)


def test_contribution_score_example():
    K3 = complete_graph(3)
    assert contribution(K3, (0, 1, 2), [5, 5, 5], 0, p=1.0, q=0.5) == 4.0
    assert contribution(K3, (0, 1, 2), [5, 5, 5], 0, p=1.0, q=1.0) == 2.0
    assert contribution(K3, (0, 1, 2), [5, 5, 5], 0, p=1.0, q=0.0) == 6.0


def test_partition_from_labels():
    P = Partition.from_labels([2, 0, 2, 1])
    assert P.clusters == ((0, 2), (1,), (3,))
    assert P.cluster_of == (0, 1, 0, 2)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 9), st.floats(0, 1), st.integers(0, 2**32 - 1), st.floats(0, 1),
       st.floats(0, 1))
def test_score_pieces(n, dens, seed, p, q):
    rng = np.random.default_rng(seed)
    G = random_graph(rng, n, dens)
    S = tuple(v for v in range(n) if rng.random() < 0.6) or (0,)
    lam = rng.uniform(-3, 3, n)
    # per-vertex cont_sum terms add up to the blended numerator
    total = sum(contribution(G, S, lam, v, p, 1.0) for v in S)
    assert total == pytest.approx(blended_numerator(G, S, lam, p), abs=1e-9)
    # cont_diff(v) is the numerator drop on removing v, up to a shift common to all v
    if len(S) > 1:
        shifts = []
        for v in S:
            rest = tuple(u for u in S if u != v)
            drop = blended_numerator(G, S, lam, p) - blended_numerator(G, rest, lam, p)
            shifts.append(drop - contribution(G, S, lam, v, p, 0.0))
        assert max(shifts) - min(shifts) == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 10), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_exact_matches_float(n, dens, seed):
    rng = np.random.default_rng(seed)
    G = random_graph(rng, n, dens)
    P = Partition.from_labels(rng.integers(0, 3, n).tolist())
    assert float(modularity_density(G, P, exact=True)) == pytest.approx(
        modularity_density(G, P), abs=1e-12)
    assert modularity_density(G, P) == pytest.approx(
        sum(cluster_contribution(G, C) for C in P.clusters), abs=1e-12)
