from src.neuron.lif import LIFState, lif_run, lif_step
from src.neuron.readout import readout_integrate
from src.neuron.surrogate import ATanSpike, SoftSpike, atan_surrogate_grad, softspike, spike_fn

__all__ = [
    "LIFState",
    "lif_run",
    "lif_step",
    "readout_integrate",
    "ATanSpike",
    "SoftSpike",
    "atan_surrogate_grad",
    "softspike",
    "spike_fn",
]
