from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np
import torch

from src import config
from src.core.errors import ConfigError, NonBinarySpikeError, ShapeMismatchError

MECHANISMS = ("synaptic", "axonal", "dendritic", "none")
SCHEDULERS = ("one_cycle", "cosine", "none")
MODES = ("hard", "soft")
READOUT_REDUCTIONS = ("mean", "max", "sum")
STRATEGIES = ("unshared", "shared")


class SpikeTrain:
    """Binary activity over (time, channel)."""

    __slots__ = ("data",)

    def __init__(self, data):
        data = np.asarray(data)
        if data.ndim != 2:
            raise ShapeMismatchError("spike train", "(steps, channels)", data.shape)
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ShapeMismatchError("spike train", "steps >= 1 and channels >= 1", data.shape)
        if not np.isin(data, (0, 1)).all():
            raise NonBinarySpikeError(np.setdiff1d(np.unique(data), (0, 1)).tolist())
        self.data = data.astype(np.uint8)

    @property
    def steps(self):
        return self.data.shape[0]

    @property
    def channels(self):
        return self.data.shape[1]

    @property
    def num_spikes(self):
        return int(self.data.sum())

    def to_events(self):
        """Returns (steps, channels) index arrays sorted by (step, channel)."""
        steps, channels = np.nonzero(self.data)
        return steps.astype(np.uint32), channels.astype(np.uint16)

    @classmethod
    def from_events(cls, steps, channels, num_steps, num_channels):
        data = np.zeros((num_steps, num_channels), dtype=np.uint8)
        data[np.asarray(steps, dtype=np.int64), np.asarray(channels, dtype=np.int64)] = 1
        return cls(data)

    def as_tensor(self, dtype=torch.float32):
        return torch.as_tensor(self.data, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"SpikeTrain(steps={self.steps}, channels={self.channels}, spikes={self.num_spikes})"


@dataclass
class SpikeDataset:
    """Labeled collection of equally shaped spike trains."""

    inputs: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.uint8)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.inputs.ndim != 3:
            raise ShapeMismatchError("dataset inputs", "(samples, steps, channels)", self.inputs.shape)
        if self.labels.shape != (self.inputs.shape[0],):
            raise ShapeMismatchError("dataset labels", (self.inputs.shape[0],), self.labels.shape)

    def __len__(self):
        return self.inputs.shape[0]

    def __getitem__(self, index):
        return SpikeTrain(self.inputs[index]), int(self.labels[index])

    @property
    def steps(self):
        return self.inputs.shape[1]

    @property
    def channels(self):
        return self.inputs.shape[2]

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return SpikeDataset(self.inputs[indices], self.labels[indices], self.num_classes)

    def tensors(self, dtype=torch.float32):
        return torch.as_tensor(self.inputs, dtype=dtype), torch.as_tensor(self.labels)


@dataclass(frozen=True)
class RegConfig:
    alpha_min: float = config.REG_ALPHA_MIN
    alpha_max: float = 1.0
    r: float = config.REG_STRENGTH

    def violations(self):
        problems = []
        if not 0 <= self.alpha_min <= self.alpha_max:
            problems.append("reg requires 0 <= alpha_min <= alpha_max")
        if self.r < 0:
            problems.append("reg strength r must be >= 0")
        return problems


@dataclass(frozen=True)
class ModelConfig:
    layers: int = config.NUM_LAYERS
    hidden: int = config.HIDDEN_SIZE
    input_channels: int = config.INPUT_CHANNELS
    classes: int = config.NUM_CLASSES
    beta: float = config.BETA
    threshold: float = config.U_TH
    d_max: int = config.D_MAX
    surrogate_slope: float = config.SURROGATE_SLOPE
    delay_mechanism: str = "axonal"
    weight_sparsity: float = 0.0
    delay_sparsity: float = 0.0
    dropout: float = config.DROPOUT
    seed: int = 0
    readout_reduce: str = "mean"
    batch_norm: bool = True
    sigma_init: Optional[float] = None
    mode: str = "hard"

    @property
    def initial_sigma(self):
        return self.sigma_init if self.sigma_init is not None else self.d_max / 2.0

    @property
    def has_delays(self):
        return self.delay_mechanism != "none"

    def layer_sizes(self):
        """(fan_in, fan_out) of every hidden layer."""
        sizes = []
        fan_in = self.input_channels
        for _ in range(self.layers):
            sizes.append((fan_in, self.hidden))
            fan_in = self.hidden
        return sizes

    def replace(self, **changes):
        return _replace(self, changes)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = config.EPOCHS
    batch_size: int = config.BATCH_SIZE
    lr_weights: float = config.LR_WEIGHTS
    lr_delays: float = config.LR_DELAYS
    weight_scheduler: str = config.WEIGHT_SCHEDULER
    delay_scheduler: str = config.DELAY_SCHEDULER
    sigma_anneal_fraction: float = config.SIGMA_ANNEAL_FRACTION
    reg: Optional[RegConfig] = None
    one_cycle_warmup: float = config.ONE_CYCLE_WARMUP
    one_cycle_initial_div: float = config.ONE_CYCLE_INITIAL_DIV
    one_cycle_final_div: float = config.ONE_CYCLE_FINAL_DIV
    threads: int = config.NUM_THREADS
    eval_discrete: bool = True
    rounded_finetune_fraction: float = config.ROUNDED_FINETUNE_FRACTION
    recalibrate_bn: bool = True

    def replace(self, **changes):
        return _replace(self, changes)


def _replace(instance, changes):
    known = {f.name for f in fields(instance)}
    unknown = sorted(set(changes) - known)
    if unknown:
        raise ConfigError([f"unknown key '{key}' for {type(instance).__name__}" for key in unknown])
    values = {f.name: getattr(instance, f.name) for f in fields(instance)}
    values.update(changes)
    return type(instance)(**values)
