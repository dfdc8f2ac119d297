import logging
import os

import numpy as np

from src import config
from src.cli.common import EXIT_OK, checked_config, emit, load_dataset, resolve_config
from src.core.errors import ConfigError, ShapeMismatchError
from src.core.rng import seeded_rng
from src.core.schema import save_config
from src.data.events import write_events, write_spike_trains
from src.data.synth import generate
from src.engine import OCCUPANCY_COLUMNS, aggregate_occupancy, check_equivalence, compile_model, occupancy_report
from src.metrics import (
    BufferModelInputs,
    MetricsReport,
    buffer_bits_for_model,
    cost_table,
    count_parameters,
    write_rows,
)
from src.network import init_parameters, load_checkpoint, save_checkpoint
from src.train import HISTORY_COLUMNS, evaluate, train

logger = logging.getLogger(__name__)

EVAL_COLUMNS = MetricsReport.columns() + ["loss", "samples", "params", "mechanism", "strategy"]
EVENTS_COLUMNS = ["equivalent"] + OCCUPANCY_COLUMNS
COST_COLUMNS = ["mechanism", "strategy", "layers", "hidden", "d_max", "state_bits", "buffer_term_bits", "total_bits"]
GEN_DATA_COLUMNS = ["split", "path", "samples", "steps", "channels", "classes", "spikes", "bytes"]


def cmd_train(args):
    run_cfg = resolve_config(args)
    train_data = load_dataset(args.data, run_cfg, "train")
    test_data = None
    if args.test_data is not None or args.data is None:
        test_data = load_dataset(args.test_data, run_cfg, "test")
    run_cfg = checked_config(run_cfg, train_data)
    if test_data is not None and (test_data.channels, test_data.num_classes) != (train_data.channels,
                                                                                 train_data.num_classes):
        raise ConfigError("train and test data differ in channel or class count")

    os.makedirs(args.out_dir, exist_ok=True)
    save_config(run_cfg, os.path.join(args.out_dir, config.CONFIG_SNAPSHOT_FILE))
    model = init_parameters(run_cfg.model, seeded_rng(run_cfg.model.seed))
    model, history = train(model, train_data, run_cfg.train, test_dataset=test_data,
                           show_progress=args.progress)

    save_checkpoint(model, os.path.join(args.out_dir, config.CHECKPOINT_FILE))
    metrics_path = os.path.join(args.out_dir, config.METRICS_FILE)
    write_rows(history, metrics_path, "csv", HISTORY_COLUMNS)
    logger.info(f"Metrics written to {metrics_path}")
    last_epoch = history[-1]["epoch"]
    emit([row for row in history if row["epoch"] == last_epoch], HISTORY_COLUMNS, args.format, args.out)
    return EXIT_OK


def cmd_eval(args):
    model = load_checkpoint(args.checkpoint)
    run_cfg = resolve_config(args, seed_target="data")
    dataset = load_dataset(args.data, run_cfg, "test")
    if dataset.channels != model.cfg.input_channels:
        raise ShapeMismatchError("evaluation data channels", model.cfg.input_channels, dataset.channels)

    result = evaluate(model, dataset, discrete=not args.continuous, batch_size=run_cfg.train.batch_size)
    metrics = MetricsReport(
        total_spikes=result.total_spikes,
        sops=result.total_sops,
        buffer_bits=buffer_bits_for_model(model.cfg, args.strategy),
        accuracy=result.accuracy,
    )
    row = {
        **metrics.to_dict(),
        "loss": result.loss,
        "samples": result.samples,
        "params": count_parameters(model),
        "mechanism": model.cfg.delay_mechanism,
        "strategy": args.strategy,
    }
    logger.info(f"Evaluated {result.samples} samples: accuracy={result.accuracy:.4f}")
    emit([row], EVAL_COLUMNS, args.format, args.out)
    return EXIT_OK


def cmd_events(args):
    """Compiles a checkpoint, checks both engines against the dense forward and reports occupancy."""
    model = load_checkpoint(args.checkpoint)
    run_cfg = resolve_config(args, seed_target="data")
    dataset = load_dataset(args.data, run_cfg, "test")
    if dataset.channels != model.cfg.input_channels:
        raise ShapeMismatchError("event data channels", model.cfg.input_channels, dataset.channels)

    em = compile_model(model)
    strategies = ("unshared", "shared") if args.strategy == "both" else (args.strategy,)
    count = min(len(dataset), args.samples) if args.samples else len(dataset)
    reports, outputs, predictions = [], [], []
    for index in range(count):
        sample, _ = dataset[index]
        results, _ = check_equivalence(em, sample, capacity=args.capacity)
        for strategy in strategies:
            reports.append(occupancy_report(results[strategy]))
        outputs.append(results["unshared"].spike_trains()[-1])
        predictions.append(int(np.argmax(results["unshared"].logits)))
    logger.info(f"equivalent: true ({count} samples, both buffering strategies)")

    if args.spikes_out:
        write_spike_trains(args.spikes_out, outputs, predictions, model.cfg.classes)
    rows = [{"equivalent": True, **row} for row in aggregate_occupancy(reports)]
    emit(rows, EVENTS_COLUMNS, args.format, args.out, title="Buffer occupancy")
    return EXIT_OK


def cmd_cost(args):
    inputs = BufferModelInputs(
        layers=args.layers,
        hidden=args.hidden,
        d_max=args.d_max,
        state_bits=args.state_bits,
        weight_bits=args.weight_bits,
        address_bits=args.address_bits,
        rho_n=args.rho_n,
        rho_p=args.rho_p,
        input_channels=args.input_channels,
        delay_sparsity=args.delay_sparsity,
    )
    problems = [f"{name} must be >= 1" for name in ("layers", "hidden", "d_max", "state_bits", "weight_bits")
                if getattr(inputs, name) < 1]
    if not 0 <= inputs.rho_p <= 1 or not inputs.rho_n > 0:
        problems.append("rates must satisfy 0 <= rho_p <= 1 and rho_n > 0")
    if not 0 <= inputs.delay_sparsity <= 1:
        problems.append("delay_sparsity must lie in [0,1]")
    if problems:
        raise ConfigError(problems)
    emit(cost_table(inputs), COST_COLUMNS, args.format, args.out, title="Buffer cost")
    return EXIT_OK


def cmd_gen_data(args):
    run_cfg = resolve_config(args, seed_target="data")
    problems = run_cfg.data.violations()
    if problems:
        raise ConfigError(problems)
    os.makedirs(args.out_dir, exist_ok=True)
    rows = []
    for split in ("train", "test"):
        dataset = generate(run_cfg.data, split=split)
        path = os.path.join(args.out_dir, f"{split}.evt")
        size = write_events(path, dataset)
        rows.append({
            "split": split,
            "path": path,
            "samples": len(dataset),
            "steps": dataset.steps,
            "channels": dataset.channels,
            "classes": dataset.num_classes,
            "spikes": int(dataset.inputs.sum()),
            "bytes": size,
        })
    emit(rows, GEN_DATA_COLUMNS, args.format, args.out)
    return EXIT_OK
