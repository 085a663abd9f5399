"""Command-line interface.

Exit codes: 0 success, 2 usage or validation failure, 3 numerical failure
during training.
"""

import csv
import functools
import json
import logging
import os
import sys
import time

import click
import numpy as np

from .dataset import samples_to_table, synth_generate, to_samples, load_csv, write_csv
from .errors import DataError, DimensionError, NumericalError, RBFPNNError
from .frechet import as_sequence, discrete_frechet, generalized_frechet
from .gasa import TRACE_HEADER, TrainingTrace
from .model import load_model, save_model
from .pipeline import RunConfig, evaluate_model, run_experiment, summarize

EXIT_USAGE = 2
EXIT_NUMERICAL = 3

logger = logging.getLogger("rbfpnn")


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NumericalError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        except RBFPNNError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        except OSError as exc:
            click.echo(f"error: {exc.filename or ''}: {exc.strerror or exc}", err=True)
            sys.exit(EXIT_USAGE)

    return wrapper


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def main(verbose):
    """Fréchet-distance RBF process networks trained with GA-SA."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


def read_components(path):
    """One sequence per non-blank line, comma separated."""
    comps = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    values = [float(v) for v in line.split(",") if v.strip()]
                    comps.append(as_sequence(values, f"{path}:{lineno}"))
                except ValueError as exc:
                    raise DataError(f"{path}:{lineno}: {exc}") from None
    except FileNotFoundError:
        raise DataError(f"{path}: no such file") from None
    if not comps:
        raise DataError(f"{path}: no sequences found")
    return comps


@main.command()
@click.argument("file_a", type=click.Path())
@click.argument("file_b", type=click.Path())
@handle_errors
def distance(file_a, file_b):
    """Fréchet distance between the samples stored in FILE_A and FILE_B.

    Each file holds one component sequence per line. Single-component files
    give the discrete Fréchet distance, multi-component files the
    generalized one.
    """
    a, b = read_components(file_a), read_components(file_b)
    if len(a) != len(b):
        raise DimensionError(f"component count mismatch: {len(a)} vs {len(b)}")
    d = discrete_frechet(a[0], b[0]) if len(a) == 1 else generalized_frechet(a, b)
    click.echo(f"{d:.6f}")


@main.command()
@click.option("--n-per-class", type=click.IntRange(min=1), default=30, show_default=True)
@click.option("--length", "S", type=click.IntRange(min=2), default=14, show_default=True)
@click.option("--noise", "noise_sd", type=click.FloatRange(min=0), default=0.05, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@handle_errors
def synth(n_per_class, S, noise_sd, seed, out_path):
    """Write a synthetic sine-vs-ramp dataset as CSV."""
    samples = synth_generate(n_per_class, S, noise_sd, np.random.default_rng(seed))
    write_csv(out_path, samples_to_table(samples))
    click.echo(f"wrote {len(samples)} rows to {out_path}")


def _output_path(template, mode, seed, multi):
    if not multi:
        return template
    stem, ext = os.path.splitext(template)
    return f"{stem}-{mode}-s{seed}{ext}"


@main.command()
@click.argument("config_path", type=click.Path())
@click.option("--seed", type=int, help="Optimizer seed (overrides the config).")
@click.option("--mode", type=click.Choice(["ga_sa", "ga_only", "both"]), help="Training mode.")
@click.option("--data", type=click.Path(), help="Dataset CSV (overrides the config).")
@click.option("--max-iterations", type=int, help="Generation cap M.")
@click.option("--workers", type=int, help="Threads for objective evaluation.")
@click.option("--model-out", type=click.Path())
@click.option("--trace-out", type=click.Path())
@click.option("--repeats", type=click.IntRange(min=1), default=1, show_default=True,
              help="Train R times with seeds seed..seed+R-1 and report mean/std accuracy.")
@click.option("--resplit", is_flag=True, help="Re-draw the train/test split with every repeat seed.")
@click.option("--summary", "summary_prefix", type=click.Path(),
              help="Write PREFIX.csv with per-run results and PREFIX.png with the accuracy bars.")
@handle_errors
def train(config_path, seed, mode, data, max_iterations, workers, model_out, trace_out,
          repeats, resplit, summary_prefix):
    """Train a network from a JSON run configuration."""
    config = RunConfig.load(config_path)
    overrides = {}
    if seed is not None:
        overrides["rng_seed"] = seed
    if mode is not None and mode != "both":
        overrides["mode"] = mode
    if max_iterations is not None:
        overrides["max_iterations"] = max_iterations
    if workers is not None:
        overrides["workers"] = workers
    if overrides:
        config = config.with_trainer(**overrides)
    if data is not None:
        config.data = data
    if model_out is not None:
        config.model_out = model_out
    if trace_out is not None:
        config.trace_out = trace_out
    modes = ["ga_sa", "ga_only"] if mode == "both" else [config.mode]
    multi = repeats > 1 or len(modes) > 1

    start = time.perf_counter()
    results = run_experiment(config, repeats=repeats, resplit=resplit, modes=modes)
    elapsed = time.perf_counter() - start

    rows = []
    for m in modes:
        for rec in results[m]:
            model_path = _output_path(config.model_out, m, rec["seed"], multi)
            trace_path = _output_path(config.trace_out, m, rec["seed"], multi)
            save_model(model_path, rec["model"])
            rec["trace"].write_csv(trace_path)
            trace = rec["trace"]
            test_acc = rec["test"].accuracy if rec["test"] else None
            rows.append({
                "mode": m,
                "seed": rec["seed"],
                "generations": len(trace),
                "best_E": trace.final_best_E,
                "converged": trace.converged,
                "train_accuracy": rec["train"].accuracy,
                "test_accuracy": test_acc,
                "model": model_path,
                "trace": trace_path,
            })
            line = (f"{m} seed={rec['seed']} best_E={trace.final_best_E:.6g} "
                    f"generations={len(trace)} train_acc={rec['train'].accuracy:.4f}")
            if test_acc is not None:
                line += f" test_acc={test_acc:.4f}"
            click.echo(line)
    click.echo(f"wall time {elapsed:.1f}s")

    if multi:
        accuracy = {}
        for m in modes:
            mine = [r for r in rows if r["mode"] == m]
            key = "test_accuracy" if mine[0]["test_accuracy"] is not None else "train_accuracy"
            mean, std = summarize([r[key] for r in mine])
            e_mean, e_std = summarize([r["best_E"] for r in mine])
            accuracy[m] = (mean, std)
            click.echo(f"{m}: mean {key} {mean:.4f} (std {std:.4f}), mean best_E {e_mean:.6g} (std {e_std:.3g}) over {len(mine)} runs")
        if summary_prefix:
            _write_rows(summary_prefix + ".csv", rows)
            from .plots import plot_accuracy

            plot_accuracy(accuracy, summary_prefix + ".png")
            click.echo(f"summary written to {summary_prefix}.csv and {summary_prefix}.png")


def _write_rows(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


@main.command()
@click.argument("model_path", type=click.Path())
@click.argument("data_path", type=click.Path())
@click.option("--json", "json_out", type=click.Path(), help="Also write the report as JSON.")
@handle_errors
def evaluate(model_path, data_path, json_out):
    """Classify DATA_PATH with a trained model and report accuracy."""
    model = load_model(model_path)
    samples = to_samples(load_csv(data_path))
    if samples and samples[0].input.shape != (model.shape.n, model.shape.S):
        raise DimensionError(
            f"data rows have S={samples[0].input.shape[1]}, model expects S={model.shape.S}"
        )
    report = evaluate_model(model, samples)
    click.echo(report.format())
    if json_out:
        with open(json_out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=1)
            fh.write("\n")


@main.command()
@click.argument("trace_paths", nargs=-1, required=True, type=click.Path())
@click.option("--label", "labels", multiple=True, help="Display label per trace (in order).")
@click.option("--out", "prefix", default="report", show_default=True,
              help="Writes PREFIX.csv (merged traces) and PREFIX.png (convergence plot).")
@click.option("--no-figure", is_flag=True, help="Skip the convergence figure.")
@handle_errors
def report(trace_paths, labels, prefix, no_figure):
    """Compare training traces side by side."""
    traces = [TrainingTrace.read_csv(p) for p in trace_paths]
    if labels and len(labels) != len(traces):
        raise DataError(f"got {len(labels)} labels for {len(traces)} traces")
    labels = list(labels) or [os.path.splitext(os.path.basename(p))[0] for p in trace_paths]

    width = max(len(label) for label in labels)
    click.echo(f"{'trace':<{width}}  {'generations':>11}  {'best_E':>12}  {'mean_E':>12}  {'sa_accepts':>10}")
    for label, trace in zip(labels, traces):
        last = trace.records[-1]
        accepts = sum(r.sa_accepts for r in trace.records)
        click.echo(f"{label:<{width}}  {len(trace):>11}  {last.best_E:>12.6g}  {last.mean_E:>12.6g}  {accepts:>10}")

    merged = prefix + ".csv"
    with open(merged, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trace"] + TRACE_HEADER)
        for label, trace in zip(labels, traces):
            for r in trace.records:
                writer.writerow([label, r.generation, repr(r.best_E), repr(r.mean_E),
                                 repr(r.best_fitness), repr(r.temperature), r.sa_accepts])
    click.echo(f"merged trace written to {merged}")
    if not no_figure:
        from .plots import plot_convergence

        figure = plot_convergence(traces, labels, prefix + ".png")
        click.echo(f"figure written to {figure}")


if __name__ == "__main__":
    main()
