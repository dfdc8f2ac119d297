"""ATan spike nonlinearity.

Hard and soft spikes share `atan_surrogate_grad` as their backward, so the soft
mode (where that derivative is exact) validates the hard-mode gradient path.
"""
import math

import torch


def softspike(u, a):
    """(1/pi) * atan((pi/2) * a * u) + 1/2, strictly inside (0, 1)."""
    u = torch.as_tensor(u)
    return torch.atan((math.pi / 2.0) * a * u) / math.pi + 0.5


def atan_surrogate_grad(u, a):
    return a / (2.0 * (1.0 + ((math.pi / 2.0) * a * u) ** 2))


class ATanSpike(torch.autograd.Function):
    """Heaviside forward (spike iff u >= 0), ATan surrogate backward."""

    @staticmethod
    def forward(ctx, u, a):
        ctx.save_for_backward(u)
        ctx.a = a
        return (u >= 0).to(u.dtype)

    @staticmethod
    def backward(ctx, grad_output):
        (u,) = ctx.saved_tensors
        return grad_output * atan_surrogate_grad(u, ctx.a), None


class SoftSpike(torch.autograd.Function):
    @staticmethod
    def forward(ctx, u, a):
        ctx.save_for_backward(u)
        ctx.a = a
        return softspike(u, a)

    @staticmethod
    def backward(ctx, grad_output):
        (u,) = ctx.saved_tensors
        return grad_output * atan_surrogate_grad(u, ctx.a), None


def spike_fn(u, a, mode):
    if mode == "hard":
        return ATanSpike.apply(u, a)
    if mode == "soft":
        return SoftSpike.apply(u, a)
    raise ValueError(f"unknown spike mode '{mode}'")
