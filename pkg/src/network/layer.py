import math
from dataclasses import dataclass

import torch
from torch import nn

from src import config
from src.delays.stage import DelayStage, sparsity_mask
from src.neuron.lif import lif_run


@dataclass
class LayerOutput:
    output: torch.Tensor
    spikes: torch.Tensor
    currents: torch.Tensor
    rates: torch.Tensor


def variance_scaled_uniform(shape, fan_in, generator=None):
    bound = math.sqrt(3.0 / fan_in)
    return (torch.rand(shape, generator=generator) * 2.0 - 1.0) * bound


class DelayedLIFLayer(nn.Module):
    """Delay stage, masked linear map, batch norm, LIF and dropout.

    For dendritic delays the linear map runs first and the per-target delay
    after it: all inputs of neuron i share d_i, so shifting the weighted sum
    equals shifting every input before weighting.
    """

    def __init__(self, h_pre, h_post, cfg, generator=None):
        super().__init__()
        self.h_pre = h_pre
        self.h_post = h_post
        self.mechanism = cfg.delay_mechanism
        self.beta = cfg.beta
        self.threshold = cfg.threshold
        self.slope = cfg.surrogate_slope
        self.dropout = cfg.dropout

        mask = sparsity_mask((h_post, h_pre), cfg.weight_sparsity, generator)
        self.weight = nn.Parameter(variance_scaled_uniform((h_post, h_pre), h_pre, generator) * mask)
        self.register_buffer("weight_mask", mask)

        if cfg.has_delays:
            self.delays = DelayStage(
                cfg.delay_mechanism, h_pre, h_post, cfg.d_max, cfg.initial_sigma,
                delay_sparsity=cfg.delay_sparsity, generator=generator,
            )
        else:
            self.delays = None
        self.bn = nn.BatchNorm1d(h_post, eps=config.BN_EPS, momentum=config.BN_MOMENTUM) if cfg.batch_norm else None

    def masked_weight(self):
        return self.weight * self.weight_mask

    def input_currents(self, x, discrete=False, straight_through=False):
        w = self.masked_weight()
        if self.delays is None:
            return x @ w.T
        delay = dict(discrete=discrete, straight_through=straight_through)
        if self.mechanism == "synaptic":
            return self.delays(x, weight=w, **delay)
        if self.mechanism == "axonal":
            return self.delays(x, **delay) @ w.T
        return self.delays(x @ w.T, **delay)

    def normalize(self, currents):
        if self.bn is None:
            return currents
        batch, steps, channels = currents.shape
        # statistics over batch x time per channel
        return self.bn(currents.reshape(batch * steps, channels)).reshape(batch, steps, channels)

    def forward(self, x, mode="hard", discrete=False, generator=None, straight_through=False):
        x = x.to(self.weight.dtype)
        currents = self.normalize(self.input_currents(x, discrete, straight_through))
        spikes, _ = lif_run(currents, self.beta, self.threshold, mode, self.slope)
        rates = spikes.sum(dim=-2)
        output = spikes
        if self.training and self.dropout > 0:
            keep = torch.rand(spikes.shape, generator=generator, dtype=spikes.dtype) >= self.dropout
            output = spikes * keep.to(spikes.dtype) / (1.0 - self.dropout)
        return LayerOutput(output, spikes, currents, rates)


def layer_forward(x, layer, mode="hard", training=False, discrete=False, generator=None):
    layer.train(training)
    squeeze = x.dim() == 2
    out = layer(x.unsqueeze(0) if squeeze else x, mode=mode, discrete=discrete, generator=generator)
    if squeeze:
        out = LayerOutput(*(t.squeeze(0) for t in (out.output, out.spikes, out.currents, out.rates)))
    return out
