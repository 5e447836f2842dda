import math

import numpy as np
import pytest

from mfc.analysis import brute_force_full_mst
from mfc.completion import (
    CoarsenedGraph,
    SpanningTreeError,
    complete,
    coarsened_mst,
    exact_call_count,
    exact_coarsened,
    mfc_opt,
    multirep_call_count,
    multirep_coarsened,
    multirep_mfc,
    save_completion,
)
from mfc.datasets import synthetic_space
from mfc.forest import InitialForest, Partition, build_initial_forest, exact_component_mst
from mfc.metric import MetricKind, MetricSpace
from mfc.reps import RepAssignment, all_points_reps, build_cost_curves, dp_allocate, materialize, single_reps

from oracles import UnionFind, kruskal_weight, raw_distance


def setup(metric, n, t, seed):
    space = synthetic_space(metric, n, seed=seed)
    return space, build_initial_forest(space, t)


def oracle_weights(space, forest, reps=None):
    """Coarsened weights from raw distances: BCP, or the representative-restricted variant."""
    pts, metric = space.points, space.metric.value
    members = forest.partition.members
    t = len(members)

    def d(a, b):
        return raw_distance(metric, pts[a], pts[b])

    def between(xs, ys):
        return min(d(x, y) for x in xs for y in ys)

    w = {}
    for i in range(t):
        for j in range(i + 1, t):
            if reps is None:
                w[i, j] = between(members[i], members[j])
            else:
                w[i, j] = min(between(members[i], reps.reps[j]), between(members[j], reps.reps[i]))
    return w


def oracle_tree_weight(forest, w):
    return forest.forest_weight + kruskal_weight(range(forest.t), lambda i, j: w[min(i, j), max(i, j)])


@pytest.mark.parametrize("metric", list(MetricKind))
def test_exact_coarsened_weights_and_witnesses(metric):
    space, forest = setup(metric, 45, 5, seed=3)
    g = exact_coarsened(space, forest)
    want = oracle_weights(space, forest)
    comp = forest.partition.assignment
    for (i, j), w in want.items():
        assert g.weights[i, j] == pytest.approx(w, abs=1e-12)
        assert g.weights[j, i] == g.weights[i, j]
        a, b = g.witness[i, j]
        assert comp[a] == i and comp[b] == j
        assert raw_distance(metric.value, space.points[a], space.points[b]) == pytest.approx(w, abs=1e-12)
    assert np.all(np.isinf(np.diag(g.weights)))


@pytest.mark.parametrize("metric", list(MetricKind))
def test_mfc_opt_against_oracle(metric):
    space, forest = setup(metric, 50, 6, seed=4)
    res = mfc_opt(space, forest)
    assert len(res.added_edges) == 5
    assert res.tree_weight == pytest.approx(oracle_tree_weight(forest, oracle_weights(space, forest)), abs=1e-9)
    assert res.distance_calls == exact_call_count(forest)


@pytest.mark.parametrize("metric", list(MetricKind))
def test_multirep_against_oracle(metric):
    space, forest = setup(metric, 50, 6, seed=5)
    curves = build_cost_curves(space, forest, 6)
    reps = materialize(curves, dp_allocate(curves, 6).counts, 6)
    res = multirep_mfc(space, forest, reps)
    w = oracle_weights(space, forest, reps)
    assert res.tree_weight == pytest.approx(oracle_tree_weight(forest, w), abs=1e-9)
    assert res.distance_calls == multirep_call_count(forest, reps)
    # every added edge touches a representative
    rep_set = {r for rs in reps.reps for r in rs}
    assert all(u in rep_set or v in rep_set for u, v, _ in res.added_edges)


def test_multirep_never_beats_opt():
    for seed in range(10):
        space, forest = setup("euclidean", 60, 7, seed=seed)
        opt = mfc_opt(space, forest)
        res = multirep_mfc(space, forest, single_reps(forest))
        assert res.tree_weight >= opt.tree_weight


def test_all_points_reps_give_opt():
    space, forest = setup("levenshtein", 40, 5, seed=6)
    assert multirep_mfc(space, forest, all_points_reps(forest)).tree_weight == mfc_opt(space, forest).tree_weight


def test_single_component_is_the_forest():
    space, forest = setup("euclidean", 12, 1, seed=7)
    res = mfc_opt(space, forest)
    assert res.added_edges == [] and res.tree_weight == forest.forest_weight
    assert res.tree_weight == brute_force_full_mst(space)[0]
    assert res.distance_calls == 0
    with pytest.raises(ValueError):
        exact_coarsened(space, forest)


def test_singletons_give_full_mst():
    space, forest = setup("hamming", 20, 20, seed=8)
    assert mfc_opt(space, forest).tree_weight == brute_force_full_mst(space)[0]


def test_direction_tie_keeps_first_direction():
    # P_0 = {0, 1}, P_1 = {2, 3}; both directions give distance 1
    space = MetricSpace([(0.0,), (5.0,), (1.0,), (9.0,)], "euclidean")
    partition = Partition.from_assignment([0, 0, 1, 1])
    forest = InitialForest(partition, [exact_component_mst(space, m) for m in partition.members])
    g = multirep_coarsened(space, forest, RepAssignment([[0], [2]], 0))
    assert g.weights[0, 1] == 1.0
    assert tuple(g.witness[0, 1]) == (0, 2)


def test_multirep_rejects_bad_reps():
    space, forest = setup("euclidean", 10, 2, seed=9)
    bad = RepAssignment([[forest.partition.members[1][0]], [forest.partition.members[1][0]]], 0)
    with pytest.raises(ValueError):
        multirep_coarsened(space, forest, bad)


def test_coarsened_mst_tie_order():
    g = CoarsenedGraph.empty(3)
    g.set(0, 1, 1.0, 0, 1)
    g.set(0, 2, 1.0, 0, 2)
    g.set(1, 2, 1.0, 1, 2)
    assert coarsened_mst(g) == [(0, 1), (0, 2)]


def test_complete_detects_broken_tree():
    space = MetricSpace([(0.0,), (1.0,), (2.0,)], "euclidean")
    partition = Partition.from_assignment([0, 0, 1])
    # forest claims an edge inside component 0 twice: too many edges
    forest = InitialForest(partition, [[(0, 1, 1.0), (0, 1, 1.0)], []])
    g = CoarsenedGraph.empty(2)
    g.set(0, 1, 1.0, 1, 2)
    with pytest.raises(SpanningTreeError):
        complete(space, forest, g)


def test_call_count_formulas():
    space, forest = setup("euclidean", 30, 4, seed=10)
    sizes = [len(m) for m in forest.partition.members]
    assert exact_call_count(forest) == sum(sizes[i] * sizes[j] for i in range(4) for j in range(i + 1, 4))
    reps = single_reps(forest)
    assert multirep_call_count(forest, reps) == sum(30 - s for s in sizes)


def test_tree_is_spanning():
    space, forest = setup("jaccard", 40, 6, seed=11)
    res = mfc_opt(space, forest)
    uf = UnionFind(range(40))
    assert all(uf.union(u, v) for u, v, _ in res.tree_edges)
    assert len(res.tree_edges) == 39
    assert res.tree_weight == pytest.approx(res.forest_weight + res.added_weight, rel=1e-12)


def test_save_completion(tmp_path):
    space, forest = setup("euclidean", 15, 3, seed=12)
    res = mfc_opt(space, forest)
    save_completion(res, tmp_path / "tree.txt")
    lines = (tmp_path / "tree.txt").read_text().splitlines()
    assert lines[0].startswith("# tree_weight=")
    edges = [tuple(l.split()) for l in lines[1:]]
    assert len(edges) == 14
    assert math.fsum(float(w) for _, _, w in edges) == res.tree_weight
