import logging
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from src.core.errors import ShapeMismatchError
from src.core.types import SpikeTrain
from src.network.layer import DelayedLIFLayer, variance_scaled_uniform
from src.neuron.readout import readout_integrate

logger = logging.getLogger(__name__)


@dataclass
class ForwardRecord:
    spikes: list
    rates: list
    currents: list
    readout_trace: torch.Tensor
    logits: torch.Tensor

    @property
    def num_layers(self):
        return len(self.spikes)


class DelayedSNN(nn.Module):
    def __init__(self, cfg, generators=None):
        super().__init__()
        self.cfg = cfg
        generators = generators or [None] * (cfg.layers + 1)
        self.layers = nn.ModuleList(
            DelayedLIFLayer(h_pre, h_post, cfg, generator=gen)
            for (h_pre, h_post), gen in zip(cfg.layer_sizes(), generators)
        )
        self.readout = nn.Parameter(variance_scaled_uniform((cfg.classes, cfg.hidden), cfg.hidden, generators[-1]))

    @property
    def delay_stages(self):
        return [layer.delays for layer in self.layers if layer.delays is not None]

    def forward(self, x, mode=None, discrete=False, generator=None, straight_through=False):
        mode = mode or self.cfg.mode
        spikes, rates, currents = [], [], []
        h = x
        for layer in self.layers:
            out = layer(h, mode=mode, discrete=discrete, generator=generator, straight_through=straight_through)
            spikes.append(out.spikes)
            rates.append(out.rates)
            currents.append(out.currents)
            h = out.output
        trace, logits = readout_integrate(h @ self.readout.T, self.cfg.beta, self.cfg.readout_reduce)
        return ForwardRecord(spikes, rates, currents, trace, logits)

    def set_sigma(self, value):
        for stage in self.delay_stages:
            stage.set_sigma(value)

    @property
    def sigma(self):
        stages = self.delay_stages
        return float(stages[0].sigma) if stages else 0.0

    def enforce_constraints(self):
        """Re-applies weight masks and clamps delays; called after every optimizer step."""
        with torch.no_grad():
            for layer in self.layers:
                layer.weight.mul_(layer.weight_mask)
        for stage in self.delay_stages:
            stage.clamp_()

    def parameter_groups(self):
        """Named optimizer groups: weights (incl. batch-norm affine and readout) and delays.

        Sigma is scheduled, not learned, so it belongs to neither group.
        """
        weights, delays = [], []
        for name, param in self.named_parameters():
            if name.endswith("delays.sigma"):
                continue
            if name.endswith("delays.positions"):
                delays.append(param)
            else:
                weights.append(param)
        return {"weights": weights, "delays": delays}


def as_input_tensor(x, input_channels, dtype):
    if isinstance(x, SpikeTrain):
        x = x.data
    if isinstance(x, np.ndarray):
        x = torch.from_numpy(x.astype(np.float64))
    x = x.to(dtype)
    if x.dim() == 2:
        x = x.unsqueeze(0)
    if x.dim() != 3 or x.shape[-1] != input_channels:
        raise ShapeMismatchError("network input", f"(batch, steps, {input_channels})", tuple(x.shape))
    return x


def network_forward(x, model, mode=None, training=False, discrete=False, generator=None, straight_through=False):
    model.train(training)
    x = as_input_tensor(x, model.cfg.input_channels, model.readout.dtype)
    return model(x, mode=mode, discrete=discrete, generator=generator, straight_through=straight_through)


def init_parameters(cfg, rng):
    """Builds a model whose weights, delays and masks all come from `rng` (one substream per layer)."""
    generators = [sub.torch_generator() for sub in rng.spawn(cfg.layers + 1)]
    model = DelayedSNN(cfg, generators=generators)
    logger.debug(
        f"Initialized {cfg.layers}x{cfg.hidden} network, mechanism={cfg.delay_mechanism}, "
        f"kappa={cfg.weight_sparsity}, eta={cfg.delay_sparsity}"
    )
    return model
