from src.delays.conv import apply_delay_conv
from src.delays.kernels import KernelBank, gaussian_delay_kernel, one_hot_kernel
from src.delays.params import DelayParameterSet, clamp_delays, discretize
from src.delays.stage import DelayStage, delay_shape, sparsity_mask

__all__ = [
    "apply_delay_conv",
    "KernelBank",
    "gaussian_delay_kernel",
    "one_hot_kernel",
    "DelayParameterSet",
    "clamp_delays",
    "discretize",
    "DelayStage",
    "delay_shape",
    "sparsity_mask",
]
