from dataclasses import dataclass

import torch

from src.delays.kernels import KernelBank, gaussian_delay_kernel, one_hot_kernel


@dataclass
class DelayParameterSet:
    """Real-valued delay positions under one tying scheme plus the shared sigma.

    `delay_mask` is 1 for trainable delays and 0 for delays pinned at zero.
    """

    mechanism: str
    positions: torch.Tensor
    sigma: torch.Tensor
    d_max: int
    delay_mask: torch.Tensor

    def kernel_bank(self, discrete=False, straight_through=False):
        """One kernel per delay.

        `discrete` selects one-hot kernels at the rounded delays. With
        `straight_through` as well, the forward values are those one-hot kernels
        while gradients flow through the Gaussian kernels at the current sigma.
        """
        if discrete and not straight_through:
            return KernelBank(one_hot_kernel(discretize(self), self.d_max, dtype=self.positions.dtype),
                              self.mechanism)
        kernels = gaussian_delay_kernel(self.positions, self.sigma, self.d_max)
        zero_delay = one_hot_kernel(
            torch.zeros_like(self.positions, dtype=torch.long), self.d_max, dtype=kernels.dtype
        )
        kernels = torch.where(self.delay_mask.bool().unsqueeze(-1), kernels, zero_delay)
        if discrete:
            rounded = one_hot_kernel(discretize(self), self.d_max, dtype=kernels.dtype)
            kernels = kernels + (rounded - kernels).detach()
        return KernelBank(kernels, self.mechanism)


def discretize(params):
    """Round half up into [0, d_max - 1]; masked delays become 0."""
    rounded = torch.floor(params.positions.detach() + 0.5).clamp(0, params.d_max - 1).long()
    return torch.where(params.delay_mask.bool(), rounded, torch.zeros_like(rounded))


def clamp_delays(params):
    """Projects positions into [0, d_max - 1] in place and re-zeroes masked delays."""
    with torch.no_grad():
        params.positions.clamp_(0.0, float(params.d_max - 1))
        params.positions.mul_(params.delay_mask.to(params.positions.dtype))
    return params
