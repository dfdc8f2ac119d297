from src.data.binning import bin_events
from src.data.events import event_file_size, read_events, write_events, write_spike_trains
from src.data.synth import SynthSpec, generate, prototypes

__all__ = [
    "bin_events",
    "event_file_size",
    "read_events",
    "write_events",
    "write_spike_trains",
    "SynthSpec",
    "generate",
    "prototypes",
]
