import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mfc.forest import (
    InitialForest,
    Partition,
    build_initial_forest,
    exact_component_mst,
    gamma_overlap,
    gonzalez_kcenter,
    load_forest,
    save_forest,
    truncated_kruskal_forest,
)
from mfc.metric import MetricSpace

from oracles import UnionFind, component_of, distance_matrix, kcenter_optimum, kruskal_weight, raw_distance


def planar(n, seed):
    pts = np.random.default_rng(seed).random((n, 2))
    return pts, MetricSpace(pts, "euclidean")


# -- gonzalez ------------------------------------------------------------------

def test_kcenter_all_points_are_centers():
    _, space = planar(7, 0)
    res = gonzalez_kcenter(space, range(7), 7, first=3)
    assert sorted(res.centers) == list(range(7))
    assert res.radii[-1] == 0.0


def test_kcenter_single_center():
    pts, space = planar(9, 1)
    res = gonzalez_kcenter(space, range(9), 1, first=4)
    assert res.centers == [4]
    assert res.radii == [pytest.approx(max(raw_distance("euclidean", pts[4], p) for p in pts))]
    assert set(res.assignment.values()) == {0}


def test_kcenter_two_approximation_small():
    pts, space = planar(8, 2)
    res = gonzalez_kcenter(space, range(8), 3, first=0)
    opt = kcenter_optimum(distance_matrix("euclidean", pts), range(8), 3)
    assert res.radii[-1] <= 2 * opt + 1e-12


def test_kcenter_query_budget():
    _, space = planar(30, 3)
    gonzalez_kcenter(space, range(30), 5, first=0)
    assert space.query_counter <= 5 * 30


def test_kcenter_farthest_ties_pick_smallest_index():
    # 1 and 2 are both at distance 1 from 0
    space = MetricSpace([(0.0,), (1.0,), (-1.0,)], "euclidean")
    assert gonzalez_kcenter(space, [0, 1, 2], 2, first=0).centers == [0, 1]
    space = MetricSpace([(0.0,), (-1.0,), (1.0,)], "euclidean")
    assert gonzalez_kcenter(space, [2, 0, 1], 2, first=0).centers == [0, 1]


def test_kcenter_equidistant_point_keeps_earlier_center():
    space = MetricSpace([(0.0,), (2.0,), (1.0,)], "euclidean")
    res = gonzalez_kcenter(space, range(3), 2, first=0)
    assert res.centers == [0, 1]
    assert res.assignment[2] == 0


def test_kcenter_duplicates_still_yield_k_distinct_centers():
    space = MetricSpace([(0.0,), (0.0,), (0.0,)], "euclidean")
    res = gonzalez_kcenter(space, range(3), 3, first=0)
    assert res.centers == [0, 1, 2]
    assert [res.assignment[c] for c in res.centers] == [0, 1, 2]


@pytest.mark.parametrize("k, first", [(0, 0), (4, 0), (2, 9)])
def test_kcenter_errors(k, first):
    _, space = planar(3, 4)
    with pytest.raises(ValueError):
        gonzalez_kcenter(space, range(3), k, first=first)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 25), st.integers(0, 10_000))
def test_kcenter_radii_non_increasing(m, seed):
    _, space = planar(m, seed)
    radii = gonzalez_kcenter(space, range(m), m, first=0).radii
    assert all(a >= b for a, b in zip(radii, radii[1:]))


# -- per-component MST -----------------------------------------------------------

def test_component_mst_singleton():
    _, space = planar(3, 5)
    assert exact_component_mst(space, [2]) == []


def test_component_mst_collinear():
    space = MetricSpace([(0.0,), (1.0,), (2.0,)], "euclidean")
    edges = exact_component_mst(space, [0, 1, 2])
    assert sorted((u, v) for u, v, _ in edges) == [(0, 1), (1, 2)]
    assert math.fsum(w for *_, w in edges) == 2.0


@pytest.mark.parametrize("seed", range(6))
def test_component_mst_matches_full_kruskal(seed):
    n = 12 + seed % 4
    pts, space = planar(n, 10 + seed)
    edges = exact_component_mst(space, range(n))
    assert len(edges) == n - 1
    want = kruskal_weight(range(n), lambda u, v: raw_distance("euclidean", pts[u], pts[v]))
    assert math.fsum(w for *_, w in edges) == pytest.approx(want, rel=1e-12)


# -- initial forests ---------------------------------------------------------------

def _spans(forest):
    uf = UnionFind(range(forest.n))
    for u, v, _ in forest.edges:
        assert uf.union(u, v), "cycle"
    comp = component_of(forest.partition.members)
    roots = {}
    for x in range(forest.n):
        roots.setdefault(comp[x], uf.find(x))
        assert roots[comp[x]] == uf.find(x)
    assert len(set(roots.values())) == forest.t


def test_forest_t1_is_full_mst():
    pts, space = planar(20, 6)
    forest = build_initial_forest(space, 1)
    want = kruskal_weight(range(20), lambda u, v: raw_distance("euclidean", pts[u], pts[v]))
    assert forest.forest_weight == pytest.approx(want, rel=1e-12)


def test_forest_all_singletons():
    _, space = planar(9, 7)
    forest = build_initial_forest(space, 9)
    assert forest.t == 9 and forest.forest_weight == 0.0 and forest.edges == []


def test_forest_sixty_points_six_parts():
    _, space = planar(60, 8)
    forest = build_initial_forest(space, 6)
    forest.validate()
    assert len(forest.edges) == 54
    _spans(forest)


def test_forest_default_t_is_floor_sqrt():
    _, space = planar(50, 9)
    assert build_initial_forest(space).t == 7


def test_forest_t_out_of_range():
    _, space = planar(5, 9)
    for t in (0, 6):
        with pytest.raises(ValueError):
            build_initial_forest(space, t)


def test_truncated_kruskal_limits():
    pts, space = planar(15, 11)
    assert truncated_kruskal_forest(space, 15).edges == []
    full = truncated_kruskal_forest(space, 1)
    want = kruskal_weight(range(15), lambda u, v: raw_distance("euclidean", pts[u], pts[v]))
    assert full.forest_weight == pytest.approx(want, rel=1e-12)


def test_truncated_kruskal_has_gamma_one():
    _, space = planar(40, 12)
    forest = truncated_kruskal_forest(space, 5)
    forest.validate()
    assert forest.t == 5
    assert gamma_overlap(space, forest) == 1.0


def test_gamma_empty_forest_convention():
    _, space = planar(6, 13)
    assert gamma_overlap(space, build_initial_forest(space, 6)) == 1.0


def test_gamma_kcenter_forest_matches_oracle():
    pts, space = planar(30, 14)
    forest = build_initial_forest(space, 5)
    gamma = gamma_overlap(space, forest)
    # the MST of random planar points is unique, so the oracle's MST is the one
    comp = component_of(forest.partition.members)
    edges = sorted(
        (raw_distance("euclidean", pts[u], pts[v]), u, v) for u in range(30) for v in range(u + 1, 30)
    )
    uf, internal = UnionFind(range(30)), 0.0
    for w, u, v in edges:
        if uf.union(u, v) and comp[u] == comp[v]:
            internal += w
    assert gamma >= 1.0
    assert gamma == pytest.approx(forest.forest_weight / internal, rel=1e-12)


def test_gamma_prefers_internal_edges_among_tied_msts():
    # unit square: 4 edges of length 1, any 3 form an MST
    space = MetricSpace([(0, 0), (1, 0), (1, 1), (0, 1)], "euclidean")
    partition = Partition.from_assignment([0, 0, 1, 1])
    forest = InitialForest(partition, [[(0, 1, 1.0)], [(2, 3, 1.0)]])
    assert gamma_overlap(space, forest) == 1.0


def test_gamma_unbounded_when_no_mst_edge_is_internal():
    space = MetricSpace([(0.0,), (1.0,), (2.0,)], "euclidean")
    partition = Partition.from_assignment([0, 1, 0])
    forest = InitialForest(partition, [[(0, 2, 2.0)], []])
    with pytest.warns(RuntimeWarning):
        assert gamma_overlap(space, forest) == math.inf


def test_gamma_size_guard():
    _, space = planar(30, 15)
    with pytest.raises(ValueError):
        gamma_overlap(space, build_initial_forest(space, 3), max_n=20)


def test_forest_file_round_trip(tmp_path):
    _, space = planar(25, 16)
    forest = build_initial_forest(space, 5)
    path = tmp_path / "f.txt"
    save_forest(forest, path)
    back = load_forest(path)
    assert back.partition.assignment == forest.partition.assignment
    assert back.trees == forest.trees
    assert back.forest_weight == forest.forest_weight
    assert path.read_text().splitlines()[0] == "25 5"


def test_validate_rejects_broken_tree():
    partition = Partition.from_assignment([0, 0, 0])
    with pytest.raises(ValueError):
        InitialForest(partition, [[(0, 1, 1.0), (0, 1, 1.0)]]).validate()
    with pytest.raises(ValueError):
        InitialForest(partition, [[(0, 1, 1.0)]]).validate()
