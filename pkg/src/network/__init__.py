from src.network.checkpoint import load_checkpoint, save_checkpoint
from src.network.layer import DelayedLIFLayer, LayerOutput, layer_forward
from src.network.model import DelayedSNN, ForwardRecord, init_parameters, network_forward

__all__ = [
    "load_checkpoint",
    "save_checkpoint",
    "DelayedLIFLayer",
    "LayerOutput",
    "layer_forward",
    "DelayedSNN",
    "ForwardRecord",
    "init_parameters",
    "network_forward",
]
