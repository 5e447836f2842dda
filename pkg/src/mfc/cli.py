"""Command-line driver: ``mfc forest|complete|sweep|verify|tight|oracle-mst``."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click

from .analysis import brute_force_full_mst, tight_instance
from .completion import save_completion
from .datasets import (
    DatasetSpec,
    ResultRow,
    RESULT_HEADER,
    load_dataset,
    read_results,
    synthetic_space,
    write_results,
)
from .forest import build_initial_forest, default_t, load_forest, save_forest, truncated_kruskal_forest
from .metric import MetricKind, MetricSpace
from .pipeline import VARIANTS, SweepConfig, opt_row, run_sweep, run_variant, summary_path
from .reps import save_reps
from .verify import run_verification

_EXAMPLES = """\
  mfc forest --data names.txt --format strings --metric levenshtein --sample 2000 --out f.txt
  mfc complete --data names.txt --format strings --metric levenshtein --sample 2000 \\
      --forest f.txt --variant dp -b 88 --opt --out rows.csv
  mfc sweep --synthetic euclidean --n 1000 --budgets 0,31,62 --variants dp,greedy --seeds 0-7 --out s.csv
  mfc sweep --tight 5,3,0.1 --seeds 0 --out tight.csv
  mfc verify"""


def _data_options(f):
    f = click.option("--data", "data", type=click.Path(exists=True, dir_okay=False), help="Input file.")(f)
    f = click.option(
        "--format", "fmt", type=click.Choice(["vectors", "strings", "sets", "sequences"]), help="Input format."
    )(f)
    f = click.option("--metric", type=click.Choice([m.value for m in MetricKind]), help="Distance function.")(f)
    f = click.option("--sample", type=int, default=None, help="Uniform sample size (default: all rows).")(f)
    f = click.option("--seed", type=int, default=0, show_default=True, help="Sampling / generator seed.")(f)
    f = click.option("--synthetic", type=click.Choice([m.value for m in MetricKind]), default=None,
                     help="Use random data of the natural kind for this metric instead of a file.")(f)
    f = click.option("--n", "n_points", type=int, default=300, show_default=True, help="Synthetic size.")(f)
    f = click.option("--dim", type=int, default=8, show_default=True, help="Synthetic vector dimension.")(f)
    return f


def _space(data, fmt, metric, sample, seed, synthetic, n_points, dim) -> MetricSpace:
    if synthetic:
        return synthetic_space(synthetic, n_points, seed=seed, dim=dim)
    if not (data and fmt and metric):
        raise click.UsageError("give --data with --format and --metric, or --synthetic")
    try:
        return load_dataset(DatasetSpec(data, fmt, metric, sample, seed))
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    cfg = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = value.strip()
    return cfg


@click.group(epilog="Examples:\n\n" + _EXAMPLES)
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose: bool) -> None:
    """Approximate metric MSTs by completing an initial forest."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")


@main.command()
@_data_options
@click.option("-t", "t", type=int, default=None, help="Number of components (default floor(sqrt(n))).")
@click.option("--method", type=click.Choice(["kcenter", "kruskal"]), default="kcenter", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Forest file to write.")
def forest(data, fmt, metric, sample, seed, synthetic, n_points, dim, t, method, out):
    """Build an initial forest and write it to a file."""
    space = _space(data, fmt, metric, sample, seed, synthetic, n_points, dim)
    t = default_t(space.n) if t is None else t
    f = build_initial_forest(space, t) if method == "kcenter" else truncated_kruskal_forest(space, t)
    save_forest(f, out)
    click.echo(f"n={f.n} t={f.t} forest_weight={f.forest_weight!r} distance_calls={space.query_counter}")


def _append_rows(rows: list[ResultRow], out: str) -> None:
    path = Path(out)
    if not path.exists() or path.stat().st_size == 0:
        write_results(rows, path)
        return
    existing = read_results(path)
    write_results(existing + rows, path)


@main.command()
@_data_options
@click.option("--forest", "forest_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--variant", type=click.Choice(list(VARIANTS)), default="dp", show_default=True)
@click.option("-b", "budget", type=int, default=0, show_default=True, help="Extra representatives.")
@click.option("--opt/--no-opt", default=False, help="Also run the optimal completion and fill ratios.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Results CSV to append to.")
@click.option("--tree-out", type=click.Path(dir_okay=False), default=None, help="Write the completed tree.")
@click.option("--reps-out", type=click.Path(dir_okay=False), default=None, help="Write the representatives.")
def complete(data, fmt, metric, sample, seed, synthetic, n_points, dim, forest_path, variant, budget, opt,
             out, tree_out, reps_out):
    """Complete a forest with one representative-allocation variant."""
    space = _space(data, fmt, metric, sample, seed, synthetic, n_points, dim)
    f = load_forest(forest_path)
    if f.n != space.n:
        raise click.UsageError(f"forest has {f.n} points but the dataset has {space.n}")
    rows = []
    opt_result = None
    if opt:
        row, opt_result = opt_row(space, f, seed)
        rows.append(row)
    try:
        cell = run_variant(space, f, variant, budget, seed=seed, opt=opt_result)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    rows.append(cell.row)
    click.echo(",".join(RESULT_HEADER))
    for r in rows:
        click.echo(_row_text(r))
    if out:
        _append_rows(rows, out)
    if tree_out:
        save_completion(cell.result, tree_out)
    if reps_out:
        save_reps(cell.reps, reps_out)


def _row_text(row: ResultRow) -> str:
    vals = []
    for k in RESULT_HEADER:
        v = getattr(row, k)
        vals.append("" if v is None else (format(v, ".12g") if isinstance(v, float) else str(v)))
    return ",".join(vals)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="key=value file; command-line flags take precedence.")
@_data_options
@click.option("--tight", default=None, help="Worst-case instance 'p,ell,eps' instead of data.")
@click.option("-t", "t", type=int, default=None, help="Components (default floor(sqrt(n))).")
@click.option("--budgets", default=None, help="Comma list, e.g. 0,62,124 (default 0..38t step 2t).")
@click.option("--variants", default=",".join(VARIANTS), show_default=True)
@click.option("--seeds", default="0-15", show_default=True, help="Comma list or ranges, e.g. 0-7.")
@click.option("--opt/--no-opt", default=True, show_default=True, help="Run the optimal baseline.")
@click.option("--timing/--no-timing", default=True, show_default=True,
              help="--no-timing writes elapsed_ms=0 so reruns are byte-identical.")
@click.option("--out", type=click.Path(dir_okay=False), required=False)
@click.pass_context
def sweep(ctx, config_path, data, fmt, metric, sample, seed, synthetic, n_points, dim, tight, t, budgets,
          variants, seeds, opt, timing, out):
    """Run every seed x variant x budget cell and write a results table."""
    cfg = _read_config(config_path)
    params = dict(ctx.params)
    # config keys are the long flag names, dashes or underscores
    by_flag = {}
    for p in ctx.command.params:
        by_flag[p.name] = p
        for o in p.opts:
            if o.startswith("--"):
                by_flag[o[2:].replace("-", "_")] = p
    for key, value in cfg.items():
        opt_obj = by_flag.get(key)
        if opt_obj is None or opt_obj.name == "config_path":
            raise click.UsageError(f"unknown config key {key!r}")
        if ctx.get_parameter_source(opt_obj.name) is not click.core.ParameterSource.DEFAULT:
            continue
        params[opt_obj.name] = opt_obj.type_cast_value(ctx, value)
    if not params["out"]:
        raise click.UsageError("--out is required (flag or config)")

    variant_list = [v.strip() for v in params["variants"].split(",") if v.strip()]
    seed_list = _parse_int_list(params["seeds"])
    budget_list = _parse_int_list(params["budgets"]) if params["budgets"] else None

    if params["tight"]:
        try:
            p_s, ell_s, eps_s = params["tight"].split(",")
            p, ell, eps = int(p_s), int(ell_s), float(eps_s)
        except ValueError:
            raise click.UsageError("--tight expects p,ell,eps") from None

        def make(_seed):
            inst = tight_instance(p, ell, eps)
            return inst.space, inst.forest, inst.reps

        if ctx.get_parameter_source("variants") is click.core.ParameterSource.DEFAULT and "variants" not in cfg:
            variant_list = ["given"]
    else:
        for v in variant_list:
            if v not in VARIANTS:
                raise click.UsageError(f"unknown variant {v!r}")

        def make(s):
            space = _space(params["data"], params["fmt"], params["metric"], params["sample"], s,
                           params["synthetic"], params["n_points"], params["dim"])
            return space, None, None

    config = SweepConfig(
        make_instance=make,
        t=params["t"],
        budgets=budget_list,
        variants=variant_list,
        seeds=seed_list,
        run_opt=params["opt"],
        output=params["out"],
        timing=params["timing"],
    )
    rows = run_sweep(config, notice=lambda msg: click.echo(msg, err=True))
    click.echo(f"wrote {len(rows)} rows to {params['out']} (summary: {summary_path(params['out'])})")


@main.command()
def verify():
    """Run the brute-force oracle suites; exit status 1 on any failure."""
    reports = run_verification()
    for rep in reports:
        click.echo(rep.line())
        for msg in rep.failures[:5]:
            click.echo(f"    {msg}")
    if not all(r.ok for r in reports):
        sys.exit(1)


@main.command()
@click.option("-p", "p", type=int, required=True, help="Number of components.")
@click.option("--ell", type=int, required=True, help="Representatives per component.")
@click.option("--eps", type=float, required=True, help="Small distance in (0, 1).")
@click.option("--prefix", type=click.Path(), required=True,
              help="Writes PREFIX.vectors, PREFIX.forest and PREFIX.reps.")
def tight(p, ell, eps, prefix):
    """Write the worst-case instance as a dataset plus forest and representatives."""
    inst = tight_instance(p, ell, eps)
    pts = inst.space.points
    Path(f"{prefix}.vectors").write_text("\n".join(" ".join(repr(float(x)) for x in row) for row in pts) + "\n")
    save_forest(inst.forest, f"{prefix}.forest")
    save_reps(inst.reps, f"{prefix}.reps")
    click.echo(f"n={inst.space.n} dim={inst.space.dimension} metric=linf predicted_ratio={inst.predicted_ratio!r}")


@main.command("oracle-mst")
@_data_options
@click.option("--edges-out", type=click.Path(dir_okay=False), default=None)
def oracle_mst(data, fmt, metric, sample, seed, synthetic, n_points, dim, edges_out):
    """Exact MST by brute force over all pairwise distances."""
    space = _space(data, fmt, metric, sample, seed, synthetic, n_points, dim)
    try:
        weight, edges = brute_force_full_mst(space)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    if edges_out:
        Path(edges_out).write_text("".join(f"{u} {v} {w!r}\n" for u, v, w in edges))
    click.echo(f"n={space.n} mst_weight={weight!r} distance_calls={space.query_counter}")


if __name__ == "__main__":  # pragma: no cover
    main()
