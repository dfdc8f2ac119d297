import logging
import os
from dataclasses import replace

from src.core.errors import ConfigError
from src.core.schema import RunConfig, align_to_dataset, load_config, validate_run_config
from src.data.events import read_events
from src.data.synth import generate
from src.logger import print_rows, render_table
from src.metrics.report import rows_to_csv, rows_to_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_EQUIVALENCE = 4


class UsageError(Exception):
    """Bad command-line input that argparse cannot detect on its own."""


def resolve_config(args, seed_target="model"):
    """Loads the config document and applies `--seed` to the model or to the synthetic data."""
    run_cfg = load_config(args.config)
    seed = getattr(args, "seed", None)
    if seed is None:
        return run_cfg
    if seed_target == "data":
        return RunConfig(run_cfg.model, run_cfg.train, replace(run_cfg.data, seed=seed))
    return RunConfig(run_cfg.model.replace(seed=seed), run_cfg.train, run_cfg.data)


def load_dataset(path, run_cfg, split="train"):
    """Reads an event file, or generates the `split` of the config's synthetic task when `path` is None."""
    if path is None:
        return generate(run_cfg.data, split=split)
    if not os.path.exists(path):
        raise ConfigError(f"data file '{path}' not found")
    logger.info(f"Loading {split} data from {path}")
    return read_events(path)


def checked_config(run_cfg, dataset):
    run_cfg = align_to_dataset(run_cfg, dataset)
    problems = validate_run_config(run_cfg)
    if problems:
        raise ConfigError(problems)
    return run_cfg


def emit(rows, columns, fmt="csv", out=None, title=None):
    """Writes rows as CSV/JSON to `out` or stdout; `table` renders them for humans."""
    if fmt == "table":
        render_table(rows, columns, title=title)
        return
    rows = [{c: row.get(c, "") for c in columns} for row in rows]
    text = rows_to_json(rows) if fmt == "json" else rows_to_csv(rows, columns)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Wrote {len(rows)} rows to {out}")
    else:
        print_rows(text)
