import torch
import torch.nn.functional as F

from src.core.errors import ShapeMismatchError


def apply_delay_conv(spikes, bank, weight=None):
    """Causal delayed signal y_c(t) = sum_u k_c[u] * x_c(t - (d_max - 1 - u)).

    `spikes` is (T, C) or (B, T, C). Axonal and dendritic banks act depthwise;
    a synaptic bank needs `weight` (H_post, H_pre) and returns the weighted sum
    over sources, i.e. the delayed input currents.
    """
    squeeze = spikes.dim() == 2
    x = spikes.unsqueeze(0) if squeeze else spikes
    kernels = bank.kernels
    channels = x.shape[-1]
    if channels != bank.input_dim:
        raise ShapeMismatchError(f"{bank.mechanism} delay input channels", bank.input_dim, channels)

    x = x.to(kernels.dtype).transpose(1, 2)
    x = F.pad(x, (bank.d_max - 1, 0))
    if bank.mechanism == "synaptic":
        if weight is None:
            raise ValueError("synaptic delays are applied jointly with the weight matrix")
        if tuple(weight.shape) != tuple(kernels.shape[:2]):
            raise ShapeMismatchError("synaptic weight", tuple(kernels.shape[:2]), tuple(weight.shape))
        y = F.conv1d(x, weight.unsqueeze(-1) * kernels)
    elif bank.mechanism in ("axonal", "dendritic"):
        y = F.conv1d(x, kernels.unsqueeze(1), groups=channels)
    else:
        raise ValueError(f"unknown delay mechanism '{bank.mechanism}'")

    y = y.transpose(1, 2)
    return y.squeeze(0) if squeeze else y
