"""Checkpoint container.

A checkpoint is a `torch.save` dict:
    format_version: int (currently 1)
    model_config:   ModelConfig fields as plain values
    state_dict:     every parameter and buffer (weights, weight/delay masks,
                    delay positions, sigma, batch-norm affine and running stats)
    dtype:          parameter dtype name
"""
import logging
import os
from dataclasses import asdict

import torch

from src.config import CHECKPOINT_FORMAT_VERSION
from src.core.errors import CheckpointError
from src.core.rng import seeded_rng
from src.core.types import ModelConfig
from src.network.model import init_parameters

logger = logging.getLogger(__name__)


def save_checkpoint(model, path):
    payload = {
        "format_version": CHECKPOINT_FORMAT_VERSION,
        "model_config": asdict(model.cfg),
        "state_dict": {k: v.detach().cpu() for k, v in model.state_dict().items()},
        "dtype": str(model.readout.dtype).replace("torch.", ""),
    }
    torch.save(payload, path)
    logger.info(f"Checkpoint saved to {path}")


def load_checkpoint(path):
    if not os.path.exists(path):
        raise CheckpointError(f"checkpoint '{path}' not found")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise CheckpointError(f"cannot read checkpoint '{path}': {e}") from e
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise CheckpointError(f"'{path}' is not a checkpoint")
    if payload["format_version"] != CHECKPOINT_FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint version {payload['format_version']} (expected {CHECKPOINT_FORMAT_VERSION})"
        )
    try:
        cfg = ModelConfig(**payload["model_config"])
        model = init_parameters(cfg, seeded_rng(cfg.seed))
        model.to(getattr(torch, payload.get("dtype", "float32")))
        model.load_state_dict(payload["state_dict"], strict=True)
    except (KeyError, TypeError, RuntimeError, AttributeError) as e:
        raise CheckpointError(f"checkpoint '{path}' does not match its config: {e}") from e
    model.eval()
    logger.info(f"Checkpoint loaded from {path}")
    return model
