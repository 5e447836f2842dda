"""Self-check: run the implementations against brute-force oracles.

Each suite returns a :class:`SuiteReport`; :func:`run_verification` runs them
all.  The DP allocator is injectable so that a deliberately broken one can be
shown to fail (negative control).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analysis import brute_force_full_mst, tight_instance
from .completion import mfc_opt, multirep_mfc
from .datasets import synthetic_space
from .forest import Partition, InitialForest, exact_component_mst, gonzalez_kcenter
from .metric import MetricKind, MetricSpace
from .reps import (
    CostCurves,
    brute_force_bestreps,
    build_cost_curves,
    cost_of,
    dp_allocate,
    materialize,
)

TIGHT_TOL = 1e-9


@dataclass
class SuiteReport:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.checked - len(self.failures)}/{self.checked}"


def random_curves(rng: np.random.Generator, t: int, b: int) -> CostCurves:
    values = [sorted(rng.random(b + 1).tolist(), reverse=True) for _ in range(t)]
    return CostCurves(values, [b + 2] * t, [list(range(b + 1))] * t)


def _enumerate_allocations(curves: CostCurves, b: int) -> float:
    best = math.inf
    for counts in itertools.product(range(b + 1), repeat=curves.t):
        if sum(counts) == b:
            best = min(best, curves.objective(counts))
    return best


def suite_dp(dp: Callable = dp_allocate, trials: int = 100, seed: int = 0) -> SuiteReport:
    rep = SuiteReport("dp-composition")
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        t, b = int(rng.integers(1, 5)), int(rng.integers(0, 7))
        curves = random_curves(rng, t, b)
        got = dp(curves, b)
        want = _enumerate_allocations(curves, b)
        rep.checked += 1
        if got.objective != want or sum(got.counts) != b:
            rep.failures.append(f"trial {trial}: t={t} b={b} dp={got.objective} oracle={want}")
    return rep


def _best_kcenter_radius(d: np.ndarray, k: int) -> float:
    return min(float(d[list(c)].min(axis=0).max()) for c in itertools.combinations(range(d.shape[0]), k))


def suite_kcenter(trials: int = 60, seed: int = 1) -> SuiteReport:
    rep = SuiteReport("kcenter-exhaustive")
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        m, k = int(rng.integers(2, 11)), int(rng.integers(1, 5))
        k = min(k, m)
        space = MetricSpace(rng.random((m, 2)), MetricKind.EUCLIDEAN)
        radius = gonzalez_kcenter(space, range(m), k, first=0).radii[-1]
        opt = _best_kcenter_radius(space.block(range(m), range(m)), k)
        rep.checked += 1
        if radius > 2 * opt:
            rep.failures.append(f"trial {trial}: radius {radius} > 2 * {opt}")
    return rep


def suite_mst(trials: int = 30, seed: int = 2) -> SuiteReport:
    rep = SuiteReport("full-matrix-mst")
    metrics = list(MetricKind)
    for trial in range(trials):
        metric = metrics[trial % len(metrics)]
        space = synthetic_space(metric, 15, seed=seed * 1000 + trial)
        prim = math.fsum(w for _, _, w in exact_component_mst(space, range(space.n)))
        kruskal, _ = brute_force_full_mst(space)
        rep.checked += 1
        if prim != kruskal:
            rep.failures.append(f"trial {trial} ({metric.value}): prim {prim} != kruskal {kruskal}")
    return rep


def suite_tight() -> SuiteReport:
    rep = SuiteReport("tight-grid")
    for p, ell, eps in itertools.product((2, 5, 10), (1, 3, 8), (0.5, 0.125, 1 / 64)):
        inst = tight_instance(p, ell, eps)
        approx = multirep_mfc(inst.space, inst.forest, inst.reps)
        opt = mfc_opt(inst.space, inst.forest)
        ratio = approx.tree_weight / opt.tree_weight
        rep.checked += 1
        if abs(ratio - inst.predicted_ratio) > TIGHT_TOL:
            rep.failures.append(f"p={p} ell={ell} eps={eps}: {ratio} vs {inst.predicted_ratio}")
    return rep


def suite_bestreps(trials: int = 20, seed: int = 3) -> SuiteReport:
    rep = SuiteReport("bestreps-2approx")
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        t = int(rng.integers(1, 4))
        sizes = [int(rng.integers(1, 5)) for _ in range(t)]
        n = sum(sizes)
        b = int(rng.integers(0, 5))
        space = MetricSpace(rng.random((n, 2)), MetricKind.EUCLIDEAN)
        assignment = [i for i, s in enumerate(sizes) for _ in range(s)]
        partition = Partition.from_assignment(assignment)
        forest = InitialForest(partition, [exact_component_mst(space, m) for m in partition.members])
        curves = build_cost_curves(space, forest, b)
        reps = materialize(curves, dp_allocate(curves, b).counts, b)
        got = math.fsum(cost_of(space, m, r) for m, r in zip(partition.members, reps.reps))
        _, best = brute_force_bestreps(space, forest, b)
        rep.checked += 1
        if got > 2 * best + 1e-12:
            rep.failures.append(f"trial {trial}: {got} > 2 * {best}")
    return rep


def suite_metric(samples: int = 300, seed: int = 4) -> SuiteReport:
    rep = SuiteReport("metric-axioms")
    rng = np.random.default_rng(seed)
    for metric in MetricKind:
        space = synthetic_space(metric, 40, seed=seed)
        d = space.block(range(40), range(40))
        for _ in range(samples):
            x, y, z = (int(v) for v in rng.integers(0, 40, size=3))
            rep.checked += 1
            bad = (
                d[x, y] < 0
                or d[x, y] != d[y, x]
                or d[x, x] != 0
                or d[x, z] > d[x, y] + d[y, z] + 1e-12
                or (d[x, y] == 0) != (space.points[x] == space.points[y])
            )
            if bad:
                rep.failures.append(f"{metric.value}: triple ({x}, {y}, {z})")
    return rep


def run_verification(dp: Callable = dp_allocate) -> list[SuiteReport]:
    return [
        suite_dp(dp),
        suite_kcenter(),
        suite_mst(),
        suite_tight(),
        suite_bestreps(),
        suite_metric(),
    ]
