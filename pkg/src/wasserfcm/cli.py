"""Command-line batch interface.

Subcommands:

* ``cluster``    run the weighted fuzzy c-means engine on a dataset file
* ``transform``  map a dataset to or from the Euclidean-equivalent space
* ``simulate``   run configured benchmark scenarios and write report tables
* ``report``     re-aggregate raw per-replication output into a summary

All table outputs are deterministic for a fixed config and seed; wall
clock timestamps appear only in the JSON run summary.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from .clustering import run
from .datafiles import (
    read_dataset,
    read_run_config,
    read_scenarios,
    read_transformed,
    write_dataset,
    write_transformed,
)
from .simulate import (
    THRESHOLDS,
    ScenarioResult,
    generate,
    replication_seeds,
    run_scenario,
)
from .transform import build_transform, inverse_transform_vector, transform_array

JOBS_ENV = "WASSERFCM_JOBS"

_FLOAT = "{:.17g}".format

_METRIC_COLUMNS = ("pct_u050", "pct_u075", "pct_u090", "mse_centers",
                   "mse_left", "mse_right", "outlier_weight_ratio")


def _jobs() -> int:
    raw = os.environ.get(JOBS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    jobs = int(raw)
    if jobs < 1:
        raise ValueError(f"{JOBS_ENV} must be a positive integer, got {raw!r}")
    return jobs


def _fmt(value) -> str:
    return "" if value is None else _FLOAT(float(value))


def _report_cells(report) -> list[str]:
    pct = report.pct_well_classified or {}
    return [
        _fmt(pct.get(t)) for t in THRESHOLDS
    ] + [
        _fmt(report.mse_centers),
        _fmt(report.mse_left),
        _fmt(report.mse_right),
        _fmt(report.outlier_weight_ratio),
    ]


def cmd_cluster(args) -> int:
    cfg = read_run_config(args.config)
    vectors, _labels, names = read_dataset(args.data)
    result = run(vectors, cfg)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_dataset(outdir / "prototypes.csv", result.prototypes,
                  feature_names=names)
    memberships = result.memberships.values
    with open(outdir / "memberships.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"cluster_{i + 1}" for i in range(cfg.clusters)])
        for k in range(memberships.shape[1]):
            writer.writerow([_FLOAT(v) for v in memberships[:, k]])
    with open(outdir / "weights.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["weight"])
        for value in result.weights.values:
            writer.writerow([_FLOAT(value)])
    summary = {
        "engine": cfg.engine,
        "iterations": result.iterations,
        "converged": result.converged,
        "final_objective": result.objective_trace[-1],
        "objective_trace": list(result.objective_trace),
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    with open(outdir / "summary.json", "w") as handle:
        json.dump(summary, handle, indent=2)
        handle.write("\n")
    print(f"cluster: {result.iterations} iterations, "
          f"converged={result.converged}, "
          f"objective={result.objective_trace[-1]:.6g}, wrote {outdir}")
    return 0


def cmd_transform(args) -> int:
    form = build_transform()
    if args.inverse:
        matrix, names = read_transformed(args.data)
        vectors = [inverse_transform_vector(row, form) for row in matrix]
        write_dataset(args.out, vectors, feature_names=names)
    else:
        vectors, _labels, names = read_dataset(args.data)
        matrix = transform_array(np.vstack([v.to_array() for v in vectors]),
                                 form)
        write_transformed(args.out, matrix, feature_names=names)
    return 0


def _write_raw(outdir: Path, name: str, outcome: ScenarioResult) -> None:
    with open(outdir / f"raw_{name}.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("replication",) + _METRIC_COLUMNS)
        for index, report in enumerate(outcome.replicates):
            writer.writerow([str(index)] + _report_cells(report))


def _write_aggregate(path: Path, rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("scenario", "case", "outliers", "n", "p", "theta",
                         "h", "m", "q", "omega", "replications")
                        + _METRIC_COLUMNS)
        for sc, outcome in rows:
            spec = outcome.spec
            writer.writerow([
                sc.name, spec.case, str(spec.outliers).lower(), str(spec.n),
                str(spec.p), _FLOAT(spec.theta), _FLOAT(spec.h),
                _FLOAT(spec.fuzzifier), _FLOAT(spec.weight_exponent),
                _FLOAT(spec.weight_budget), str(spec.replications),
            ] + _report_cells(outcome.mean_report))


def _write_plots(outdir: Path, sc) -> None:
    """Representative pictures from the first replication of a scenario."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .clustering import RunConfig

    data_seed, init_seed = replication_seeds(sc.spec.seed,
                                             sc.spec.replications)[0]
    dataset = generate(replace(sc.spec, seed=data_seed, replications=1))
    cfg = RunConfig(
        clusters=sc.clusters, fuzzifier=sc.spec.fuzzifier,
        weight_exponent=sc.spec.weight_exponent,
        weight_budget=sc.spec.weight_budget, tolerance=sc.tolerance,
        max_iter=sc.max_iter, seed=init_seed, engine=sc.engine)
    result = run(dataset.data, cfg)
    memberships = result.memberships.values

    fig, ax = plt.subplots(figsize=(9, 2.5))
    image = ax.imshow(memberships, aspect="auto", vmin=0.0, vmax=1.0,
                      interpolation="nearest", cmap="viridis")
    fig.colorbar(image, ax=ax, label="membership")
    ax.set_xlabel("datum")
    ax.set_ylabel("cluster")
    ax.set_title(f"{sc.name}: membership matrix")
    fig.tight_layout()
    fig.savefig(outdir / f"{sc.name}_memberships.png", dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(9, 3))
    colors = np.where(dataset.outlier_flags, "tab:red", "tab:blue")
    ax.bar(np.arange(len(dataset)), result.weights.values, color=colors)
    ax.set_xlabel("datum (red = planted outlier)")
    ax.set_ylabel("weight")
    ax.set_title(f"{sc.name}: outlier weights")
    fig.tight_layout()
    fig.savefig(outdir / f"{sc.name}_weights.png", dpi=120)
    plt.close(fig)

    centers = np.vstack([v.to_array() for v in dataset.data])[:, 0::3]
    protos = np.vstack([v.to_array() for v in result.prototypes])
    hard = memberships.argmax(axis=0)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    if centers.shape[1] >= 2:
        xs, ys = centers[:, 0], centers[:, 1]
        px, py = protos[:, 0], protos[:, 3]
        ax.set_xlabel("feature 1 center")
        ax.set_ylabel("feature 2 center")
    else:
        xs, ys = np.arange(len(dataset)), centers[:, 0]
        px = np.full(len(protos), len(dataset) / 2.0)
        py = protos[:, 0]
        ax.set_xlabel("datum")
        ax.set_ylabel("center")
    ax.scatter(xs, ys, c=hard, cmap="coolwarm", s=18, alpha=0.75)
    ax.scatter(px, py, marker="*", c="black", s=220, label="prototype")
    ax.legend()
    ax.set_title(f"{sc.name}: data and prototypes")
    fig.tight_layout()
    fig.savefig(outdir / f"{sc.name}_prototypes.png", dpi=120)
    plt.close(fig)


def cmd_simulate(args) -> int:
    scenario_runs = read_scenarios(args.config)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = _jobs()

    rows = []
    failures = 0
    for sc in scenario_runs:
        try:
            outcome = run_scenario(
                sc.spec, engine=sc.engine, clusters=sc.clusters,
                tolerance=sc.tolerance, max_iter=sc.max_iter, jobs=jobs)
            if args.raw:
                _write_raw(outdir, sc.name, outcome)
            if args.plots:
                _write_plots(outdir, sc)
        except Exception as err:
            failures += 1
            print(f"error: scenario {sc.name}: {err}", file=sys.stderr)
            continue
        rows.append((sc, outcome))
        pct = outcome.mean_report.pct_well_classified or {}
        print(f"simulate: {sc.name}: {sc.spec.replications} replications, "
              f"well-classified at 0.5 = {pct.get(0.5, float('nan')):.2f}%")
    if rows:
        _write_aggregate(outdir / "report.csv", rows)
    return 1 if failures else 0


def cmd_report(args) -> int:
    raw_dir = Path(args.raw)
    raw_files = sorted(raw_dir.glob("raw_*.csv"))
    if not raw_files:
        raise FileNotFoundError(f"no raw_*.csv files under {raw_dir}")
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(("scenario", "replications") + _METRIC_COLUMNS)
        for raw_file in raw_files:
            name = raw_file.stem[len("raw_"):]
            with open(raw_file, newline="") as raw_handle:
                reader = csv.reader(raw_handle)
                header = next(reader, None)
                if header != list(("replication",) + _METRIC_COLUMNS):
                    raise ValueError(f"{raw_file}: unexpected raw header")
                columns: list[list[float]] = [[] for _ in _METRIC_COLUMNS]
                count = 0
                for row in reader:
                    if not row:
                        continue
                    count += 1
                    for j, cell in enumerate(row[1:]):
                        if cell:
                            columns[j].append(float(cell))
            means = [(_FLOAT(float(np.mean(vals))) if vals else "")
                     for vals in columns]
            writer.writerow([name, str(count)] + means)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wasserfcm",
        description="Outlier-weighted fuzzy c-means for triangular fuzzy data")
    sub = parser.add_subparsers(dest="command", required=True)

    cluster = sub.add_parser("cluster", help="cluster a dataset file")
    cluster.add_argument("--data", required=True, help="dataset CSV")
    cluster.add_argument("--config", required=True, help="INI config with [run]")
    cluster.add_argument("--out", required=True, help="output directory")
    cluster.set_defaults(func=cmd_cluster)

    transform = sub.add_parser(
        "transform", help="map a dataset to or from the crisp space")
    transform.add_argument("--data", required=True, help="input CSV")
    transform.add_argument("--out", required=True, help="output CSV")
    transform.add_argument("--inverse", action="store_true",
                           help="map a crisp file back to fuzzy form")
    transform.set_defaults(func=cmd_transform)

    simulate = sub.add_parser("simulate", help="run benchmark scenarios")
    simulate.add_argument("--config", required=True,
                          help="INI config with [scenario:<name>] sections")
    simulate.add_argument("--out", required=True, help="output directory")
    simulate.add_argument("--raw", action="store_true",
                          help="also write per-replication raw CSVs")
    simulate.add_argument("--plots", action="store_true",
                          help="also write PNG plots per scenario")
    simulate.set_defaults(func=cmd_simulate)

    report = sub.add_parser("report", help="re-aggregate raw replication CSVs")
    report.add_argument("--raw", required=True,
                        help="directory holding raw_*.csv files")
    report.add_argument("--out", required=True, help="output CSV")
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except Exception as err:  # CLI boundary: message and exit code, no traceback
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
