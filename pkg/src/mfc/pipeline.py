"""One experiment cell (variant x budget on a fixed forest) and budget sweeps."""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .analysis import alpha_bound, alpha_from_cost, ratios
from .completion import CompletionResult, mfc_opt, multirep_mfc
from .datasets import ResultRow, write_results
from .forest import InitialForest, build_initial_forest, default_t
from .metric import MetricSpace
from .reps import RepAssignment, allocate, build_cost_curves, materialize

log = logging.getLogger(__name__)

VARIANTS = ("dp", "greedy", "fixed")
WORKERS_ENV = "MFC_WORKERS"
OPT_MAX_N = 3000


def default_budgets(t: int, top: int = 38, step: int = 2) -> list[int]:
    return [k * t for k in range(0, top + 1, step)]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass
class CellOutcome:
    row: ResultRow
    result: CompletionResult
    reps: RepAssignment
    cost: float


def run_variant(
    space: MetricSpace,
    forest: InitialForest,
    variant: str,
    b: int,
    seed: int = 0,
    opt: CompletionResult | None = None,
    reps: RepAssignment | None = None,
) -> CellOutcome:
    """Pick representatives with ``variant`` and complete the forest.

    ``variant="given"`` uses ``reps`` as-is.  The row's distance calls cover
    representative selection plus completion, on a private counter.
    """
    s = space.fork()
    start = time.perf_counter()
    if variant == "given":
        if reps is None:
            raise ValueError("variant 'given' needs explicit representatives")
        result = multirep_mfc(s, forest, reps)
        cost = alpha_bound(s, forest, reps).cost_P_R
    else:
        t = forest.t
        if variant == "fixed" and b % t:
            raise ValueError(f"fixed variant needs b divisible by t={t}, got b={b}")
        curve_budget = b // t if variant == "fixed" else b
        curves = build_cost_curves(s, forest, curve_budget)
        alloc = allocate(curves, variant, b)
        reps = materialize(curves, alloc.counts, b)
        result = multirep_mfc(s, forest, reps)
        cost = alloc.objective
    elapsed = (time.perf_counter() - start) * 1e3
    alpha = alpha_from_cost(cost, forest.forest_weight)
    cost_ratio = completion = None
    if opt is not None:
        cost_ratio, completion = ratios(result, opt)
    row = ResultRow(
        algorithm=variant,
        b=b,
        tree_weight=result.tree_weight,
        forest_weight=forest.forest_weight,
        opt_weight=None if opt is None else opt.tree_weight,
        alpha=alpha,
        cost_ratio=cost_ratio,
        completion_ratio=completion,
        distance_calls=s.query_counter,
        elapsed_ms=elapsed,
        seed=seed,
    )
    return CellOutcome(row, result, reps, cost)


def opt_row(space: MetricSpace, forest: InitialForest, seed: int = 0) -> tuple[ResultRow, CompletionResult]:
    s = space.fork()
    start = time.perf_counter()
    opt = mfc_opt(s, forest)
    elapsed = (time.perf_counter() - start) * 1e3
    _, completion = ratios(opt, opt)
    row = ResultRow(
        algorithm="mfc-opt",
        b=forest.n - forest.t,
        tree_weight=opt.tree_weight,
        forest_weight=forest.forest_weight,
        opt_weight=opt.tree_weight,
        alpha=1.0,
        cost_ratio=1.0,
        completion_ratio=completion,
        distance_calls=s.query_counter,
        elapsed_ms=elapsed,
        seed=seed,
    )
    return row, opt


@dataclass
class SweepConfig:
    """What to run.  ``make_instance(seed)`` returns the space and, optionally,
    a prebuilt forest and representatives (used by the worst-case generator)."""

    make_instance: Callable[[int], tuple[MetricSpace, InitialForest | None, RepAssignment | None]]
    t: int | None = None
    budgets: Sequence[int] | None = None
    variants: Sequence[str] = VARIANTS
    seeds: Sequence[int] = tuple(range(16))
    run_opt: bool = True
    output: str | Path | None = None
    timing: bool = True
    workers: int = field(default_factory=worker_count)


def _summary(rows: list[ResultRow]) -> list[dict]:
    groups: dict[tuple[str, int], list[ResultRow]] = {}
    for r in rows:
        groups.setdefault((r.algorithm, r.b), []).append(r)

    def mean(vals):
        vals = [v for v in vals if v is not None]
        return math.fsum(vals) / len(vals) if vals else None

    out = []
    for (alg, b), rs in groups.items():
        alpha = mean([r.alpha for r in rs])
        cr = mean([r.cost_ratio for r in rs])
        out.append(
            {
                "algorithm": alg,
                "b": b,
                "runs": len(rs),
                "tree_weight": mean([r.tree_weight for r in rs]),
                "alpha": alpha,
                "epsilon_alpha": None if alpha is None else alpha - 1.0,
                "cost_ratio": cr,
                "epsilon": None if cr is None else cr - 1.0,
                "completion_ratio": mean([r.completion_ratio for r in rs]),
                "distance_calls": mean([r.distance_calls for r in rs]),
                "elapsed_ms": mean([r.elapsed_ms for r in rs]),
            }
        )
    return out


def write_summary(rows: list[ResultRow], path: str | Path) -> None:
    import csv

    summary = _summary(rows)
    cols = ["algorithm", "b", "runs", "tree_weight", "alpha", "epsilon_alpha", "cost_ratio",
            "epsilon", "completion_ratio", "distance_calls", "elapsed_ms"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for rec in summary:
            w.writerow(["" if rec[c] is None else (format(rec[c], ".12g") if isinstance(rec[c], float) else rec[c])
                        for c in cols])


def summary_path(output: str | Path) -> Path:
    p = Path(output)
    return p.with_name(p.stem + ".summary.csv")


class SweepError(RuntimeError):
    pass


def run_sweep(config: SweepConfig, notice: Callable[[str], None] = log.info) -> list[ResultRow]:
    """Every seed x variant x budget cell, rows in (seed, variant, budget) order."""
    rows: list[ResultRow] = []
    for seed in config.seeds:
        space, forest, given = config.make_instance(seed)
        if forest is None:
            forest = build_initial_forest(space.fork(), config.t or default_t(space.n), first=0)
        t = forest.t
        budgets = list(config.budgets) if config.budgets is not None else default_budgets(t)
        opt = None
        if config.run_opt:
            if space.n > OPT_MAX_N:
                raise SweepError(f"n={space.n} is above {OPT_MAX_N}; disable the optimal baseline for large n")
            row, opt = opt_row(space, forest, seed)
            rows.append(row)

        cells = []
        for variant in config.variants:
            if variant == "given":
                cells.append((variant, given.b if given else 0))
                continue
            for b in budgets:
                if variant == "fixed" and b % t:
                    notice(f"skipping fixed variant at b={b}: not a multiple of t={t}")
                    continue
                cells.append((variant, b))

        def run(cell):
            variant, b = cell
            try:
                return run_variant(space, forest, variant, b, seed=seed, opt=opt, reps=given).row
            except Exception as exc:
                raise SweepError(f"cell seed={seed} variant={variant} b={b} failed: {exc}") from exc

        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                cell_rows = list(pool.map(run, cells))
        else:
            cell_rows = [run(c) for c in cells]
        rows.extend(cell_rows)

    if not config.timing:
        for r in rows:
            r.elapsed_ms = 0.0
    if config.output is not None:
        write_results(rows, config.output)
        write_summary(rows, summary_path(config.output))
    return rows
