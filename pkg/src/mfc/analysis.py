"""Approximation certificates, quality ratios and the worst-case construction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .completion import CompletionResult
from .forest import Edge, InitialForest, Partition, full_distance_edges
from .metric import MetricKind, MetricSpace
from .reps import RepAssignment, cost_of

__all__ = [
    "BoundReport",
    "TightInstance",
    "alpha_from_cost",
    "alpha_bound",
    "ratios",
    "tight_instance",
    "tight_ratio",
    "brute_force_full_mst",
]

BRUTE_MST_MAX_N = 2000


@dataclass
class BoundReport:
    cost_P_R: float
    forest_weight: float
    alpha: float
    epsilon_alpha: float
    cost_ratio: float | None = None
    completion_ratio: float | None = None
    epsilon: float | None = None

    def with_ratios(self, cost_ratio: float, completion_ratio: float | None) -> "BoundReport":
        self.cost_ratio = cost_ratio
        self.completion_ratio = completion_ratio
        self.epsilon = cost_ratio - 1.0
        return self


def alpha_from_cost(cost: float, forest_weight: float) -> float:
    """1 + cost / forest weight; 1 for 0/0 and +inf for x/0."""
    if forest_weight == 0.0:
        return 1.0 if cost == 0.0 else math.inf
    return 1.0 + cost / forest_weight


def alpha_bound(space: MetricSpace, forest: InitialForest, reps: RepAssignment) -> BoundReport:
    cost = math.fsum(
        cost_of(space, mem, r) for mem, r in zip(forest.partition.members, reps.reps)
    )
    alpha = alpha_from_cost(cost, forest.forest_weight)
    return BoundReport(cost, forest.forest_weight, alpha, alpha - 1.0)


def ratios(approx: CompletionResult, opt: CompletionResult) -> tuple[float, float | None]:
    """(cost ratio, completion ratio); the latter is None when nothing was added."""
    if approx.forest_weight != opt.forest_weight or len(approx.added_edges) != len(opt.added_edges):
        raise ValueError("results come from different initial forests")
    cost_ratio = approx.tree_weight / opt.tree_weight if opt.tree_weight else 1.0
    if not opt.added_edges:
        return cost_ratio, None
    if opt.added_weight == 0.0:
        completion = 1.0 if approx.added_weight == 0.0 else math.inf
    else:
        completion = approx.added_weight / opt.added_weight
    return cost_ratio, completion


def tight_ratio(p: int, ell: int, eps: float) -> float:
    return ((2 + ell * eps - eps) * p - 1) / ((1 + eps * ell) * p - eps)


@dataclass
class TightInstance:
    space: MetricSpace
    forest: InitialForest
    reps: RepAssignment
    predicted_ratio: float
    p: int
    ell: int
    eps: float

    def index(self, i: int, j: int) -> int:
        """Point index of the j-th point (j = 0 is the small one) of component i."""
        return i * (self.ell + 1) + j


def tight_instance(p: int, ell: int, eps: float) -> TightInstance:
    """Worst case for a fixed ``ell`` representatives per component, under l_inf.

    Component i holds a small point ``eps * e_{p+i}`` and ``ell`` points
    ``e_i + eps * e_{p+j}``; its tree is the path small, 1, 2, ..., ell and
    the representatives are the non-small points.  Small points are
    eps-close to each other, so the best completion joins them, while any
    edge touching a representative across components has length 1.
    """
    if p < 1 or ell < 1 or not 0.0 < eps < 1.0:
        raise ValueError("need p >= 1, ell >= 1 and 0 < eps < 1")
    dim = p + max(ell, p)
    pts = np.zeros((p * (ell + 1), dim))
    for i in range(p):
        base = i * (ell + 1)
        pts[base, p + i] = eps
        for j in range(1, ell + 1):
            pts[base + j, i] = 1.0
            pts[base + j, p + j - 1] = eps
    space = MetricSpace(pts, MetricKind.CHEBYSHEV)
    assignment = [i for i in range(p) for _ in range(ell + 1)]
    partition = Partition.from_assignment(assignment)
    trees: list[list[Edge]] = []
    for i in range(p):
        base = i * (ell + 1)
        tree = [(base, base + 1, 1.0)]
        tree += [(base + j, base + j + 1, eps) for j in range(1, ell)]
        trees.append(tree)
    forest = InitialForest(partition, trees)
    reps = RepAssignment([[i * (ell + 1) + j for j in range(1, ell + 1)] for i in range(p)], p * (ell - 1))
    return TightInstance(space, forest, reps, tight_ratio(p, ell, eps), p, ell, eps)


def brute_force_full_mst(space: MetricSpace, max_n: int = BRUTE_MST_MAX_N) -> tuple[float, list[Edge]]:
    """Kruskal over every pairwise distance, ties by (weight, u, v)."""
    n = space.n
    if n > max_n:
        raise ValueError(f"brute-force MST limited to n <= {max_n}, got {n}")
    u, v, w = full_distance_edges(space, max_n)
    order = np.lexsort((v, u, w))
    ds = DisjointSet(range(n))
    edges: list[Edge] = []
    for e in order:
        if len(edges) == n - 1:
            break
        if ds.merge(int(u[e]), int(v[e])):
            edges.append((int(u[e]), int(v[e]), float(w[e])))
    return math.fsum(e[2] for e in edges), edges
