"""Synthetic delayed-pattern classification task.

Every class is a fixed set of inter-channel lags over one shared channel set, so
per-channel spike counts are identical across classes and only timing carries
the label. Samples place the class pattern at a random onset, jitter each
spike and add Bernoulli background noise.
"""
import logging
from dataclasses import dataclass

import numpy as np

from src.core.errors import SynthSpecError
from src.core.rng import seeded_rng
from src.core.types import SpikeDataset

logger = logging.getLogger(__name__)

_MAX_PROTOTYPE_DRAWS = 1000


@dataclass(frozen=True)
class SynthSpec:
    classes: int = 8
    channels: int = 20
    steps: int = 60
    spikes_per_pattern: int = 6
    max_lag: int = 12
    jitter: int = 1
    noise_rate: float = 0.01
    seed: int = 0
    train_samples: int = 2000
    test_samples: int = 500

    def violations(self):
        problems = []
        for name in ("classes", "channels", "steps", "spikes_per_pattern", "train_samples", "test_samples"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if self.max_lag < 0 or self.max_lag >= self.steps:
            problems.append("max_lag must lie in [0, steps)")
        if self.jitter < 0:
            problems.append("jitter must be >= 0")
        if not 0.0 <= self.noise_rate <= 1.0:
            problems.append("noise_rate must lie in [0, 1]")
        if self.spikes_per_pattern > self.channels:
            problems.append(
                f"spikes_per_pattern ({self.spikes_per_pattern}) exceeds channels ({self.channels})"
            )
        return problems


def prototypes(spec):
    """Returns (channels, lags): the shared channel set and one lag row per class.

    Lag rows are shifted so their minimum is 0, which makes them distinct up to
    onset, the only invariance a sample has.
    """
    problems = spec.violations()
    if problems:
        raise SynthSpecError("; ".join(problems))
    if spec.classes > 1 and spec.spikes_per_pattern == 1:
        raise SynthSpecError("a single spike per pattern cannot separate classes by timing")

    proto_rng = seeded_rng(spec.seed).spawn(3)[0]
    channels = np.sort(proto_rng.generator.choice(spec.channels, spec.spikes_per_pattern, replace=False))

    rows = []
    seen = set()
    draws = 0
    while len(rows) < spec.classes:
        draws += 1
        if draws > _MAX_PROTOTYPE_DRAWS * spec.classes:
            raise SynthSpecError(
                f"could not draw {spec.classes} distinct lag patterns with max_lag={spec.max_lag}"
            )
        lags = proto_rng.integers(0, spec.max_lag + 1, size=spec.spikes_per_pattern)
        lags = lags - lags.min()
        key = tuple(int(v) for v in lags)
        if key in seen:
            continue
        seen.add(key)
        rows.append(lags)
    return channels.astype(np.int64), np.stack(rows).astype(np.int64)


def generate(spec, split="train"):
    channels, lags = prototypes(spec)
    _, train_rng, test_rng = seeded_rng(spec.seed).spawn(3)
    if split == "train":
        rng, count = train_rng, spec.train_samples
    elif split == "test":
        rng, count = test_rng, spec.test_samples
    else:
        raise SynthSpecError(f"unknown split '{split}'")

    labels = np.arange(count, dtype=np.int64) % spec.classes
    labels = labels[rng.generator.permutation(count)]

    inputs = (rng.uniform(size=(count, spec.steps, spec.channels)) < spec.noise_rate).astype(np.uint8)

    span = int(lags.max()) if lags.size else 0
    onsets = rng.integers(0, spec.steps - span, size=count)
    offsets = rng.integers(-spec.jitter, spec.jitter + 1, size=(count, spec.spikes_per_pattern))
    times = onsets[:, None] + lags[labels] + offsets
    times = np.clip(times, 0, spec.steps - 1)

    sample_idx = np.repeat(np.arange(count), spec.spikes_per_pattern)
    inputs[sample_idx, times.ravel(), np.tile(channels, count)] = 1

    logger.info(
        f"Generated {count} {split} samples: {spec.classes} classes, {spec.channels} channels, "
        f"{spec.steps} steps, {int(inputs.sum())} spikes"
    )
    return SpikeDataset(inputs, labels, spec.classes)
