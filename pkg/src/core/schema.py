"""Config documents: JSON with `model`, `train` and `data` sections.

Unknown sections and keys are rejected so a typo in a sweep script fails
loudly instead of silently falling back to a default.
"""
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace

from src.core.errors import ConfigError
from src.core.types import (
    MECHANISMS,
    MODES,
    READOUT_REDUCTIONS,
    SCHEDULERS,
    ModelConfig,
    RegConfig,
    TrainConfig,
)
from src.data.synth import SynthSpec

logger = logging.getLogger(__name__)

SECTIONS = ("model", "train", "data")


@dataclass(frozen=True)
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    data: SynthSpec = field(default_factory=SynthSpec)


def validate_config(cfg, tcfg):
    """Returns every violated invariant as a message; an empty list means valid."""
    problems = []
    if not 0 < cfg.beta < 1:
        problems.append("beta must lie in (0,1)")
    if cfg.d_max < 1:
        problems.append("d_max must be ≥ 1")
    if not cfg.threshold > 0:
        problems.append("threshold must be > 0")
    if not cfg.surrogate_slope > 0:
        problems.append("surrogate_slope must be > 0")
    for name in ("layers", "hidden", "input_channels", "classes"):
        if getattr(cfg, name) < 1:
            problems.append(f"{name} must be ≥ 1")
    if not 0 <= cfg.weight_sparsity <= 1:
        problems.append("weight_sparsity must lie in [0,1]")
    if not 0 <= cfg.delay_sparsity <= 1:
        problems.append("delay_sparsity must lie in [0,1]")
    if not 0 <= cfg.dropout < 1:
        problems.append("dropout must lie in [0,1)")
    if cfg.delay_mechanism not in MECHANISMS:
        problems.append(f"delay_mechanism must be one of {', '.join(MECHANISMS)}")
    if cfg.readout_reduce not in READOUT_REDUCTIONS:
        problems.append(f"readout_reduce must be one of {', '.join(READOUT_REDUCTIONS)}")
    if cfg.mode not in MODES:
        problems.append(f"mode must be one of {', '.join(MODES)}")
    if cfg.sigma_init is not None and not cfg.sigma_init > 0:
        problems.append("sigma_init must be > 0")
    if not 0 <= cfg.seed < 2**64:
        problems.append("seed must be a 64-bit unsigned integer")

    if tcfg.epochs < 1:
        problems.append("epochs must be ≥ 1")
    if tcfg.batch_size < 1:
        problems.append("batch_size must be ≥ 1")
    if not tcfg.lr_weights > 0:
        problems.append("lr_weights must be > 0")
    if not tcfg.lr_delays > 0:
        problems.append("lr_delays must be > 0")
    for name in ("weight_scheduler", "delay_scheduler"):
        if getattr(tcfg, name) not in SCHEDULERS:
            problems.append(f"{name} must be one of {', '.join(SCHEDULERS)}")
    if not 0 < tcfg.sigma_anneal_fraction <= 1:
        problems.append("sigma_anneal_fraction must lie in (0,1]")
    if not 0 < tcfg.one_cycle_warmup < 1:
        problems.append("one_cycle_warmup must lie in (0,1)")
    if tcfg.one_cycle_initial_div < 1 or tcfg.one_cycle_final_div < 1:
        problems.append("one_cycle divisors must be ≥ 1")
    if tcfg.threads < 1:
        problems.append("threads must be ≥ 1")
    if not 0 <= tcfg.rounded_finetune_fraction < 1:
        problems.append("rounded_finetune_fraction must lie in [0,1)")
    if tcfg.reg is not None:
        problems.extend(tcfg.reg.violations())
    return problems


def validate_run_config(run_cfg):
    problems = validate_config(run_cfg.model, run_cfg.train)
    problems.extend(run_cfg.data.violations())
    if run_cfg.data.channels != run_cfg.model.input_channels:
        problems.append(
            f"data.channels ({run_cfg.data.channels}) must equal model.input_channels ({run_cfg.model.input_channels})"
        )
    if run_cfg.data.classes != run_cfg.model.classes:
        problems.append(
            f"data.classes ({run_cfg.data.classes}) must equal model.classes ({run_cfg.model.classes})"
        )
    return problems


def _section(cls, values, section):
    if not isinstance(values, dict):
        raise ConfigError(f"section '{section}' must be an object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError([f"unknown key '{section}.{key}'" for key in unknown])
    values = dict(values)
    if cls is TrainConfig and values.get("reg") is not None:
        values["reg"] = _section(RegConfig, values["reg"], "train.reg")
    try:
        return cls(**values)
    except TypeError as e:
        raise ConfigError(f"section '{section}': {e}") from e


def parse_config(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = sorted(set(document) - set(SECTIONS))
    if unknown:
        raise ConfigError([f"unknown section '{name}'" for name in unknown])
    return RunConfig(
        model=_section(ModelConfig, document.get("model", {}), "model"),
        train=_section(TrainConfig, document.get("train", {}), "train"),
        data=_section(SynthSpec, document.get("data", {}), "data"),
    )


def _finite(value, path):
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigError(f"'{path}' must be finite")
    if isinstance(value, dict):
        for key, item in value.items():
            _finite(item, f"{path}.{key}")


def serialize_config(run_cfg):
    document = {
        "data": asdict(run_cfg.data),
        "model": asdict(run_cfg.model),
        "train": asdict(run_cfg.train),
    }
    _finite(document, "config")
    return json.dumps(document, indent=4, sort_keys=True, ensure_ascii=False) + "\n"


def load_config(path):
    if path is None:
        return RunConfig()
    if not os.path.exists(path):
        raise ConfigError(f"config file '{path}' not found")
    with open(path, "r", encoding="utf-8") as f:
        run_cfg = parse_config(f.read())
    logger.info(f"Loaded config from {path}")
    return run_cfg


def save_config(run_cfg, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(serialize_config(run_cfg))
    logger.debug(f"Config snapshot written to {path}")


def align_to_dataset(run_cfg, dataset):
    """Takes input width, class count and length from a loaded dataset."""
    model, data = run_cfg.model, run_cfg.data
    if (model.input_channels, model.classes) != (dataset.channels, dataset.num_classes):
        logger.info(
            f"Using dataset shape: {dataset.channels} input channels, {dataset.num_classes} classes "
            f"(config had {model.input_channels}, {model.classes})"
        )
    model = model.replace(input_channels=dataset.channels, classes=dataset.num_classes)
    data = replace(data, channels=dataset.channels, classes=dataset.num_classes, steps=dataset.steps)
    return RunConfig(model=model, train=run_cfg.train, data=data)
