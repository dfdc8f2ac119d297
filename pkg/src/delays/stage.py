import logging
import math
from fractions import Fraction

import torch
from torch import nn

from src.delays.conv import apply_delay_conv
from src.delays.params import DelayParameterSet, clamp_delays

logger = logging.getLogger(__name__)


def delay_shape(mechanism, h_pre, h_post):
    if mechanism == "synaptic":
        return (h_post, h_pre)
    if mechanism == "axonal":
        return (h_pre,)
    if mechanism == "dendritic":
        return (h_post,)
    raise ValueError(f"unknown delay mechanism '{mechanism}'")


def sparsity_mask(shape, fraction, generator):
    """Binary mask with exactly floor(numel * fraction) zeros at random positions.

    The fraction is taken at its decimal value, so 100 entries at 0.29 give 29 zeros.
    """
    numel = 1
    for size in shape:
        numel *= size
    zeros = math.floor(numel * Fraction(str(float(fraction))))
    mask = torch.ones(numel)
    if zeros:
        mask[torch.randperm(numel, generator=generator)[:zeros]] = 0.0
    return mask.reshape(shape)


class DelayStage(nn.Module):
    """Learnable delays of one layer: positions, shared sigma and a fixed delay mask."""

    def __init__(self, mechanism, h_pre, h_post, d_max, sigma, delay_sparsity=0.0, generator=None):
        super().__init__()
        self.mechanism = mechanism
        self.d_max = d_max
        shape = delay_shape(mechanism, h_pre, h_post)
        mask = sparsity_mask(shape, delay_sparsity, generator)
        positions = torch.rand(shape, generator=generator) * (d_max - 1)
        self.positions = nn.Parameter(positions * mask)
        self.sigma = nn.Parameter(torch.tensor(float(sigma)))
        self.register_buffer("delay_mask", mask)

    def parameter_set(self):
        return DelayParameterSet(self.mechanism, self.positions, self.sigma, self.d_max, self.delay_mask)

    def kernel_bank(self, discrete=False, straight_through=False):
        return self.parameter_set().kernel_bank(discrete=discrete, straight_through=straight_through)

    def set_sigma(self, value):
        with torch.no_grad():
            self.sigma.fill_(float(value))

    def clamp_(self):
        clamp_delays(self.parameter_set())

    def forward(self, x, weight=None, discrete=False, straight_through=False):
        return apply_delay_conv(x, self.kernel_bank(discrete, straight_through), weight=weight)

    def extra_repr(self):
        return f"mechanism={self.mechanism}, shape={tuple(self.positions.shape)}, d_max={self.d_max}"
