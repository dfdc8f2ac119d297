from src.core.errors import *  # noqa: F401,F403
from src.core.rng import SeededRNG, seeded_rng
from src.core.types import (
    ModelConfig,
    RegConfig,
    SpikeDataset,
    SpikeTrain,
    TrainConfig,
)

__all__ = [
    "SeededRNG",
    "seeded_rng",
    "ModelConfig",
    "RegConfig",
    "SpikeDataset",
    "SpikeTrain",
    "TrainConfig",
]
