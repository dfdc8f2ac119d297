"""Delay kernels.

Index convention: kernel slot u holds the weight of a delay of d_max - 1 - u
steps, so the Gaussian centred at d_max - d - 1 encodes delay d and a one-hot
at d_max - 1 - k is an exact k-step shift.
"""
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from src.core.errors import InvalidSigmaError


def gaussian_delay_kernel(d, sigma, d_max):
    """Unit-mass Gaussian over d_max slots centred at d_max - d - 1.

    `d` may be a scalar or any tensor of delays; the kernel axis is appended last.
    Differentiable w.r.t. both `d` and `sigma`.
    """
    sigma = torch.as_tensor(sigma)
    if not bool((sigma > 0).all()):
        raise InvalidSigmaError(float(sigma.min()))
    d = torch.as_tensor(d)
    if d.is_floating_point():
        dtype = d.dtype
    elif sigma.is_floating_point():
        dtype = sigma.dtype
    else:
        dtype = torch.get_default_dtype()
    d = d.to(dtype)
    u = torch.arange(d_max, dtype=dtype, device=d.device)
    center = (d_max - 1) - d
    logits = -((u - center.unsqueeze(-1)) ** 2) / (2.0 * sigma.to(dtype) ** 2)
    # softmax keeps very narrow kernels from underflowing to 0/0
    return torch.softmax(logits, dim=-1)


def one_hot_kernel(delays, d_max, dtype=torch.float32):
    delays = torch.as_tensor(delays, dtype=torch.long)
    return F.one_hot((d_max - 1) - delays, d_max).to(dtype)


@dataclass
class KernelBank:
    """One kernel per delay parameter; layout follows the tying scheme.

    synaptic: (H_post, H_pre, d_max); axonal: (H_pre, d_max); dendritic: (H_post, d_max).
    """

    kernels: torch.Tensor
    mechanism: str

    @property
    def d_max(self):
        return self.kernels.shape[-1]

    @property
    def input_dim(self):
        """Channel count the bank convolves over."""
        if self.mechanism == "synaptic":
            return self.kernels.shape[1]
        return self.kernels.shape[0]

    def connection_kernels(self, h_post, h_pre):
        """Per-connection view (H_post, H_pre, d_max) regardless of tying."""
        if self.mechanism == "synaptic":
            return self.kernels
        if self.mechanism == "axonal":
            return self.kernels.unsqueeze(0).expand(h_post, h_pre, self.d_max)
        if self.mechanism == "dendritic":
            return self.kernels.unsqueeze(1).expand(h_post, h_pre, self.d_max)
        raise ValueError(f"unknown delay mechanism '{self.mechanism}'")
