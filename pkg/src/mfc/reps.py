"""Choosing representatives under a shared budget.

Each component gets a greedy k-center cost curve ``c_i(j)`` (covering radius
of its first ``j`` farthest-first centers).  A budget of ``b`` extra
representatives is then split across components by one of three
allocators, and the split is turned back into concrete representative sets.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .forest import InitialForest, gonzalez_kcenter
from .metric import MetricSpace

__all__ = [
    "CostCurves",
    "RepAssignment",
    "Allocation",
    "cost_of",
    "build_cost_curves",
    "dp_allocate",
    "greedy_allocate",
    "fixed_allocate",
    "allocate",
    "materialize",
    "single_reps",
    "all_points_reps",
    "brute_force_bestreps",
    "save_reps",
    "load_reps",
]


@dataclass
class CostCurves:
    """``values[i][j - 1]`` holds c_i(j) for j = 1 .. len(values[i]).

    Beyond the component size the cost is zero; beyond the computed length
    (and below the size) it is unknown.
    """

    values: list[list[float]]
    sizes: list[int]
    centers: list[list[int]]

    @property
    def t(self) -> int:
        return len(self.values)

    def cost(self, i: int, j: int) -> float:
        """c_i(j), the cost of component ``i`` with ``j >= 1`` representatives."""
        if j >= self.sizes[i]:
            return 0.0
        if j > len(self.values[i]):
            raise ValueError(f"cost curve {i} only covers {len(self.values[i])} representatives")
        return self.values[i][j - 1]

    def objective(self, counts: Sequence[int]) -> float:
        """sum_i c_i(counts[i] + 1), added left to right in component order.

        Rounded addition is monotone, so the DP below is exact for this
        particular float sum (fsum would not be, on ties).
        """
        total = 0.0
        for i, c in enumerate(counts):
            total += self.cost(i, c + 1)
        return total


@dataclass
class RepAssignment:
    reps: list[list[int]]
    b: int

    @property
    def counts(self) -> list[int]:
        return [len(r) - 1 for r in self.reps]

    @property
    def t(self) -> int:
        return len(self.reps)

    def validate(self, forest: InitialForest) -> None:
        if self.t != forest.t:
            raise ValueError(f"{self.t} rep sets for {forest.t} components")
        for i, (r, mem) in enumerate(zip(self.reps, forest.partition.members)):
            if not r:
                raise ValueError(f"component {i} has no representative")
            if not set(r) <= set(mem):
                raise ValueError(f"component {i}: representative outside its component")
        if sum(self.counts) > self.b:
            raise ValueError(f"{sum(self.counts)} extra representatives exceed budget {self.b}")


@dataclass
class Allocation:
    counts: list[int]
    objective: float


def cost_of(space: MetricSpace, members: Sequence[int], reps: Sequence[int]) -> float:
    """Largest distance from a member to its nearest representative."""
    if len(reps) == 0:
        raise ValueError("cost_of needs at least one representative")
    d = space.block(reps, members)
    return float(d.min(axis=0).max())


def build_cost_curves(space: MetricSpace, forest: InitialForest, b: int) -> CostCurves:
    """One farthest-first run per component with k = min(b + 1, |P_i|).

    The radii sequence *is* the cost curve, so no extra queries are spent.
    The first center of each component is its smallest point index.
    """
    if b < 0:
        raise ValueError("budget must be non-negative")
    values, sizes, centers = [], [], []
    for mem in forest.partition.members:
        k = min(b + 1, len(mem))
        kc = gonzalez_kcenter(space, mem, k, first=min(mem))
        curve = list(kc.radii) + [0.0] * (b + 1 - k)
        values.append(curve)
        sizes.append(len(mem))
        centers.append(kc.centers)
    return CostCurves(values, sizes, centers)


def dp_allocate(curves: CostCurves, b: int) -> Allocation:
    """Exact minimiser of sum_i c_i(b_i + 1) subject to sum_i b_i = b.

    F(T, B) = min_k F(T-1, k) + f_T(B - k) with f_i(x) = c_i(x + 1).  Only the
    previous layer's values and allocation vectors are kept (O(tb) memory).
    Ties prefer the smallest k, i.e. pushing budget to later components.
    """
    t = curves.t
    if t == 0:
        return Allocation([], 0.0)
    f = [np.array([curves.cost(i, x + 1) for x in range(b + 1)]) for i in range(t)]
    prev_val = f[0].copy()
    prev_vec: list[list[int]] = [[B] for B in range(b + 1)]
    for T in range(1, t):
        cur_val = np.empty(b + 1)
        cur_vec: list[list[int]] = []
        for B in range(b + 1):
            totals = prev_val[: B + 1] + f[T][B::-1]
            k = int(np.argmin(totals))
            cur_val[B] = totals[k]
            cur_vec.append(prev_vec[k] + [B - k])
        prev_val, prev_vec = cur_val, cur_vec
    counts = prev_vec[b]
    return Allocation(counts, curves.objective(counts))


def greedy_allocate(curves: CostCurves, b: int) -> Allocation:
    """Hand out the budget one unit at a time to the largest marginal drop.

    Max-heap on (gain, -i), so ties go to the smallest component index.
    """
    t = curves.t
    counts = [0] * t

    def gain(i: int) -> float:
        return curves.cost(i, counts[i] + 1) - curves.cost(i, counts[i] + 2)

    heap = [(-gain(i), i) for i in range(t)] if b else []
    heapq.heapify(heap)
    for step in range(b if t else 0):
        _, i = heapq.heappop(heap)
        counts[i] += 1
        if step + 1 < b:
            heapq.heappush(heap, (-gain(i), i))
    return Allocation(counts, curves.objective(counts))


def fixed_allocate(curves: CostCurves, ell: int) -> Allocation:
    """``ell`` representatives per component, saturating at the component size."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    counts = [min(ell, s) - 1 for s in curves.sizes]
    return Allocation(counts, curves.objective(counts))


def allocate(curves: CostCurves, variant: str, b: int) -> Allocation:
    if variant == "dp":
        return dp_allocate(curves, b)
    if variant == "greedy":
        return greedy_allocate(curves, b)
    if variant == "fixed":
        if curves.t and b % curves.t:
            raise ValueError(f"fixed allocation needs b divisible by t={curves.t}, got b={b}")
        return fixed_allocate(curves, b // max(curves.t, 1) + 1)
    raise ValueError(f"unknown allocation variant {variant!r}")


def materialize(curves: CostCurves, counts: Sequence[int], b: int | None = None) -> RepAssignment:
    """First ``counts[i] + 1`` farthest-first centers of each component.

    Counts past the component size (zero-benefit excess) are clamped.
    """
    reps = []
    for i, c in enumerate(counts):
        want = min(c + 1, curves.sizes[i])
        if want > len(curves.centers[i]):
            raise ValueError(
                f"component {i}: {want} representatives requested, only "
                f"{len(curves.centers[i])} centers computed"
            )
        reps.append(list(curves.centers[i][:want]))
    return RepAssignment(reps, sum(counts) if b is None else b)


def single_reps(forest: InitialForest) -> RepAssignment:
    """One representative per component (its smallest index)."""
    return RepAssignment([[min(m)] for m in forest.partition.members], 0)


def all_points_reps(forest: InitialForest) -> RepAssignment:
    members = forest.partition.members
    return RepAssignment([list(m) for m in members], sum(len(m) - 1 for m in members))


BRUTE_MAX_POINTS = 14
BRUTE_MAX_BUDGET = 4


def _exact_kcenter(space: MetricSpace, members: list[int], k: int) -> tuple[float, tuple[int, ...]]:
    d = space.block(members, members)
    best, best_set = math.inf, ()
    for combo in itertools.combinations(range(len(members)), k):
        r = float(d[list(combo)].min(axis=0).max())
        if r < best:
            best, best_set = r, tuple(members[c] for c in combo)
    return best, best_set


def brute_force_bestreps(space: MetricSpace, forest: InitialForest, b: int) -> tuple[RepAssignment, float]:
    """Exact BestReps by exhaustive search (tiny instances only).

    Each component's optimum for every representative count is found over
    all center subsets, then every split of the budget is tried.
    """
    members = forest.partition.members
    if sum(len(m) for m in members) > BRUTE_MAX_POINTS or b > BRUTE_MAX_BUDGET:
        raise ValueError(
            f"brute_force_bestreps is limited to {BRUTE_MAX_POINTS} points and b <= {BRUTE_MAX_BUDGET}"
        )
    table = []
    for mem in members:
        row = [_exact_kcenter(space, mem, min(j, len(mem))) for j in range(1, b + 2)]
        table.append(row)
    t = len(members)
    best, best_counts = math.inf, None
    for counts in _compositions(b, t):
        value = math.fsum(table[i][c][0] for i, c in enumerate(counts))
        if value < best:
            best, best_counts = value, counts
    reps = [list(table[i][c][1]) for i, c in enumerate(best_counts)]
    return RepAssignment(reps, b), best


def _compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for bar in bars:
            out.append(bar - prev - 1)
            prev = bar
        out.append(total + parts - 1 - prev - 1)
        yield tuple(out)


def save_reps(reps: RepAssignment, path: str | Path) -> None:
    """One line per component listing its representatives; first line is ``b``."""
    lines = [str(reps.b)] + [" ".join(map(str, r)) for r in reps.reps]
    Path(path).write_text("\n".join(lines) + "\n")


def load_reps(path: str | Path) -> RepAssignment:
    lines = Path(path).read_text().splitlines()
    b = int(lines[0])
    return RepAssignment([[int(x) for x in line.split()] for line in lines[1:]], b)
