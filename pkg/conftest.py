import os
import sys

import numpy as np
import pytest
import torch

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src.core.rng import seeded_rng  # noqa: E402
from src.core.types import ModelConfig, SpikeTrain, TrainConfig  # noqa: E402
from src.network.model import init_parameters  # noqa: E402


@pytest.fixture
def float64():
    previous = torch.get_default_dtype()
    torch.set_default_dtype(torch.float64)
    yield
    torch.set_default_dtype(previous)


@pytest.fixture
def tiny_cfg():
    return ModelConfig(layers=2, hidden=8, input_channels=6, classes=3, d_max=5, dropout=0.0, seed=3)


@pytest.fixture
def tiny_tcfg():
    return TrainConfig(epochs=2, batch_size=4, threads=1)


@pytest.fixture
def make_model():
    """Factory for float64 models built from a seeded stream."""

    def build(cfg, seed=None, dtype=torch.float64):
        model = init_parameters(cfg, seeded_rng(cfg.seed if seed is None else seed))
        return model.to(dtype)

    return build


@pytest.fixture
def random_train():
    def build(steps, channels, rate=0.3, seed=0):
        rng = np.random.default_rng(seed)
        return SpikeTrain((rng.uniform(size=(steps, channels)) < rate).astype(np.uint8))

    return build


def central_difference(fn, tensor, eps=1e-6):
    """Central finite-difference gradient of the scalar `fn()` w.r.t. every entry of `tensor`."""
    grad = torch.zeros_like(tensor)
    flat = tensor.data.view(-1)
    for i in range(flat.numel()):
        original = flat[i].item()
        flat[i] = original + eps
        plus = float(fn())
        flat[i] = original - eps
        minus = float(fn())
        flat[i] = original
        grad.view(-1)[i] = (plus - minus) / (2 * eps)
    return grad


@pytest.fixture
def numeric_grad():
    return central_difference


def relative_error(a, b):
    a, b = torch.as_tensor(a), torch.as_tensor(b)
    return float((a - b).abs().max() / max(float(a.abs().max()), float(b.abs().max()), 1e-8))


@pytest.fixture
def rel_err():
    return relative_error
