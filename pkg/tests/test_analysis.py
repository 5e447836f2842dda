import itertools
import math

import pytest

from mfc.analysis import alpha_bound, alpha_from_cost, brute_force_full_mst, ratios, tight_instance, tight_ratio
from mfc.completion import mfc_opt, multirep_mfc
from mfc.datasets import synthetic_space
from mfc.forest import build_initial_forest
from mfc.reps import single_reps

from oracles import kruskal_weight, raw_distance


def test_alpha_conventions():
    assert alpha_from_cost(0.0, 0.0) == 1.0
    assert alpha_from_cost(1.0, 0.0) == math.inf
    assert alpha_from_cost(1.0, 4.0) == 1.25


def test_tight_reference_values():
    inst = tight_instance(5, 3, 0.1)
    assert inst.space.n == 20
    approx = multirep_mfc(inst.space, inst.forest, inst.reps)
    opt = mfc_opt(inst.space, inst.forest)
    assert approx.tree_weight == pytest.approx(10.0, abs=1e-12)
    assert opt.tree_weight == pytest.approx(6.4, abs=1e-12)
    assert approx.tree_weight / opt.tree_weight == pytest.approx(1.5625, abs=1e-12)
    assert inst.predicted_ratio == pytest.approx(1.5625, abs=1e-12)
    rep = alpha_bound(inst.space, inst.forest, inst.reps)
    assert rep.alpha == pytest.approx(1 + 5 / 6, abs=1e-12)
    assert approx.tree_weight / opt.tree_weight <= rep.alpha


def test_tight_geometry_oracle():
    inst = tight_instance(3, 2, 0.25)
    pts = inst.space.points
    small = [inst.index(i, 0) for i in range(3)]
    for a, b in itertools.combinations(small, 2):
        assert raw_distance("linf", pts[a], pts[b]) == 0.25
    for i in range(3):
        for j in range(1, 3):
            assert raw_distance("linf", pts[inst.index(i, 0)], pts[inst.index(i, j)]) == 1.0
    inst.forest.validate()
    inst.reps.validate(inst.forest)


@pytest.mark.parametrize("p, ell, eps", [(2, 1, 0.5), (4, 5, 0.125), (10, 2, 1 / 64)])
def test_tight_ratio_realised(p, ell, eps):
    inst = tight_instance(p, ell, eps)
    ratio = multirep_mfc(inst.space, inst.forest, inst.reps).tree_weight / mfc_opt(inst.space, inst.forest).tree_weight
    assert abs(ratio - tight_ratio(p, ell, eps)) <= 1e-9


@pytest.mark.parametrize("args", [(0, 1, 0.5), (2, 0, 0.5), (2, 1, 1.0), (2, 1, 0.0)])
def test_tight_bad_parameters(args):
    with pytest.raises(ValueError):
        tight_instance(*args)


def test_ratios():
    space = synthetic_space("euclidean", 40, seed=1)
    forest = build_initial_forest(space, 5)
    opt = mfc_opt(space, forest)
    approx = multirep_mfc(space, forest, single_reps(forest))
    cr, comp = ratios(approx, opt)
    assert cr == approx.tree_weight / opt.tree_weight >= 1.0
    assert comp == approx.added_weight / opt.added_weight >= 1.0
    assert ratios(opt, opt) == (1.0, 1.0)
    other = mfc_opt(space, build_initial_forest(space, 4))
    with pytest.raises(ValueError):
        ratios(approx, other)


def test_ratios_without_added_edges():
    space = synthetic_space("euclidean", 10, seed=2)
    forest = build_initial_forest(space, 1)
    opt = mfc_opt(space, forest)
    assert ratios(opt, opt) == (1.0, None)


@pytest.mark.parametrize("metric", ["euclidean", "hamming", "jaccard", "levenshtein", "linf"])
def test_brute_force_mst_matches_oracle(metric):
    space = synthetic_space(metric, 18, seed=3)
    weight, edges = brute_force_full_mst(space)
    assert len(edges) == 17
    want = kruskal_weight(range(18), lambda u, v: raw_distance(metric, space.points[u], space.points[v]))
    assert weight == pytest.approx(want, abs=1e-12)
    assert space.query_counter == 18 * 17 // 2
    with pytest.raises(ValueError):
        brute_force_full_mst(space, max_n=10)
