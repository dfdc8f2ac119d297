"""Parameter sweeps over delay range, sparsity and firing-rate bounds.

Every (grid point, replicate) pair is one cell, trained with seed
base_seed + cell_index. Finished cells are recorded in the progress file of
the output directory so an interrupted sweep resumes where it stopped.
"""
import hashlib
import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass

import numpy as np

from src import config
from src.cli.common import EXIT_OK, EXIT_RUNTIME, UsageError, checked_config, emit, load_dataset, resolve_config
from src.core.errors import ConfigError, DelaySNNError
from src.core.rng import seeded_rng
from src.core.schema import RunConfig, serialize_config, validate_run_config
from src.core.types import RegConfig
from src.metrics import buffer_bits_for_model, write_rows
from src.network import init_parameters
from src.progress_manager import completed_cells, get_progress_summary, initialize_progress, log_event, update_cell_status
from src.train import evaluate, train

logger = logging.getLogger(__name__)

SWEEP_KINDS = ("delay_range", "sparsity", "regularization")
SWEEP_COLUMNS = [
    "kind", "point", "d_max", "eta", "kappa", "alpha_max", "seeds", "failed",
    "accuracy_mean", "accuracy_std", "spikes_mean", "spikes_std", "sops_mean", "sops_std",
    "buffer_bits", "status",
]
SPARSITY_KEYS = {"eta": "delay_sparsity", "kappa": "weight_sparsity"}


def _numbers(text, cast, what):
    try:
        values = [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise UsageError(f"bad {what} grid '{text}': {e}") from e
    if not values:
        raise UsageError(f"{what} grid is empty")
    return values


def parse_grid(kind, text):
    """Grid points as dicts of changes.

    delay_range: "5,15,31"; sparsity: "eta=0,0.8;kappa=0,0.6" (cartesian
    product); regularization: alpha_max values "0.01,0.05".
    """
    if not text or not text.strip():
        raise UsageError("sweep grid is empty")
    if kind == "delay_range":
        return [{"d_max": v} for v in _numbers(text, int, "d_max")]
    if kind == "regularization":
        return [{"alpha_max": v} for v in _numbers(text, float, "alpha_max")]
    if kind != "sparsity":
        raise UsageError(f"unknown sweep kind '{kind}'")
    axes = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        name, sep, values = part.partition("=")
        name = name.strip()
        if not sep or name not in SPARSITY_KEYS:
            raise UsageError(f"sparsity grid entries look like eta=0,0.8 or kappa=0,0.6, got '{part}'")
        axes[name] = _numbers(values, float, name)
    if not axes:
        raise UsageError("sweep grid is empty")
    names = sorted(axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*(axes[n] for n in names))]


def apply_changes(run_cfg, changes, seed):
    model_changes = {"seed": seed}
    train_cfg = run_cfg.train
    for key, value in changes.items():
        if key in SPARSITY_KEYS:
            model_changes[SPARSITY_KEYS[key]] = value
        elif key == "d_max":
            model_changes["d_max"] = value
        elif key == "alpha_max":
            train_cfg = train_cfg.replace(reg=RegConfig(config.REG_ALPHA_MIN, value, config.REG_STRENGTH))
        else:
            raise ConfigError(f"unknown sweep parameter '{key}'")
    return RunConfig(run_cfg.model.replace(**model_changes), train_cfg, run_cfg.data)


@dataclass(frozen=True)
class SweepTask:
    index: int
    point: int
    changes: dict
    seed: int
    run_cfg: RunConfig
    train_data: object
    test_data: object


def run_cell(task):
    """Trains and evaluates one cell; failures are returned, not raised."""
    try:
        run_cfg = apply_changes(task.run_cfg, task.changes, task.seed)
        problems = validate_run_config(run_cfg)
        if problems:
            raise ConfigError(problems)
        model = init_parameters(run_cfg.model, seeded_rng(task.seed))
        model, _ = train(model, task.train_data, run_cfg.train)
        result = evaluate(model, task.test_data, discrete=run_cfg.train.eval_discrete,
                          batch_size=run_cfg.train.batch_size)
        return {
            "index": task.index,
            "status": "done",
            "accuracy": result.accuracy,
            "spikes": result.spikes_per_sample,
            "sops": result.sops_per_sample,
            "buffer_bits": buffer_bits_for_model(run_cfg.model),
            "error": "",
        }
    except (DelaySNNError, ValueError, RuntimeError) as e:
        logger.error(f"Sweep cell {task.index} failed: {e}")
        return {"index": task.index, "status": "failed", "error": str(e)}


def execute(tasks, workers=1):
    if workers <= 1:
        for task in tasks:
            yield run_cell(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_cell, task) for task in tasks]
        for future in as_completed(futures):
            yield future.result()


def sweep_key(kind, points, seeds, run_cfg):
    text = f"{kind}|{points}|{seeds}|{serialize_config(run_cfg)}"
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _stat(values, fn):
    return float(fn(values)) if values else float("nan")


def aggregate(kind, points, tasks, results, run_cfg):
    """One row per grid point: mean and population std over its successful replicates."""
    rows = []
    for point, changes in enumerate(points):
        cell = [results.get(t.index, {"status": "failed"}) for t in tasks if t.point == point]
        ok = [r for r in cell if r.get("status") == "done"]
        failed = len(cell) - len(ok)
        row = {
            "kind": kind,
            "point": point,
            "d_max": changes.get("d_max", run_cfg.model.d_max),
            "eta": changes.get("eta", run_cfg.model.delay_sparsity),
            "kappa": changes.get("kappa", run_cfg.model.weight_sparsity),
            "alpha_max": changes.get("alpha_max", run_cfg.train.reg.alpha_max if run_cfg.train.reg else ""),
            "seeds": len(ok),
            "failed": failed,
            "buffer_bits": ok[0]["buffer_bits"] if ok else "",
            "status": "ok" if not failed else ("failed" if not ok else "partial"),
        }
        for metric in ("accuracy", "spikes", "sops"):
            values = [r[metric] for r in ok]
            row[f"{metric}_mean"] = _stat(values, np.mean)
            row[f"{metric}_std"] = _stat(values, np.std)
        rows.append(row)
    return rows


def cmd_sweep(args):
    points = parse_grid(args.kind, args.grid)
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    run_cfg = resolve_config(args)
    train_data = load_dataset(args.data, run_cfg, "train")
    test_data = load_dataset(args.test_data, run_cfg, "test") if (args.test_data or args.data is None) else train_data
    run_cfg = checked_config(run_cfg, train_data)
    base_seed = run_cfg.model.seed

    tasks = []
    for point, changes in enumerate(points):
        for _ in range(args.seeds):
            index = len(tasks)
            tasks.append(SweepTask(index, point, changes, base_seed + index, run_cfg, train_data, test_data))

    os.makedirs(args.out_dir, exist_ok=True)
    progress_path = config.get_sweep_progress_file(args.out_dir)
    progress = initialize_progress(progress_path, sweep_key(args.kind, points, args.seeds, run_cfg))
    results = completed_cells(progress)
    pending = [t for t in tasks if t.index not in results]
    logger.info(f"Sweep '{args.kind}': {len(points)} points x {args.seeds} seeds, {len(pending)} cells to run")

    for result in execute(pending, args.workers):
        index = result["index"]
        results[index] = result
        update_cell_status(progress, progress_path, index, result["status"], result, result.get("error", ""))

    rows = aggregate(args.kind, points, tasks, results, run_cfg)
    write_rows(rows, os.path.join(args.out_dir, config.SWEEP_FILE), "csv", SWEEP_COLUMNS)
    emit(rows, SWEEP_COLUMNS, args.format, args.out, title=f"{args.kind} sweep")

    summary = get_progress_summary(progress)
    if summary["failed"]:
        log_event(progress, progress_path, "error", f"{summary['failed']} of {len(tasks)} cells failed")
        return EXIT_RUNTIME
    log_event(progress, progress_path, "done", f"{len(tasks)} cells complete")
    return EXIT_OK
