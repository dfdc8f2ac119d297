import numpy as np

from src.core.errors import ShapeMismatchError
from src.core.types import SpikeTrain


def bin_events(timestamps, channels, bin_width, channel_group, num_channels, num_steps=None):
    """Bins raw (timestamp, channel) events into a binary SpikeTrain.

    A bin is 1 iff at least one event falls in it; groups of `channel_group`
    adjacent channels are OR-merged into one output channel.
    """
    if bin_width < 1 or channel_group < 1:
        raise ValueError("bin_width and channel_group must be >= 1")
    if num_channels % channel_group:
        raise ShapeMismatchError("channel grouping", f"a divisor of {num_channels}", channel_group)
    timestamps = np.asarray(timestamps, dtype=np.int64)
    channels = np.asarray(channels, dtype=np.int64)
    if timestamps.shape != channels.shape:
        raise ShapeMismatchError("event arrays", timestamps.shape, channels.shape)
    if timestamps.size and (timestamps.min() < 0 or channels.min() < 0 or channels.max() >= num_channels):
        raise ValueError("event timestamp or channel out of range")

    bins = timestamps // bin_width
    if num_steps is None:
        num_steps = int(bins.max()) + 1 if bins.size else 1
    keep = bins < num_steps
    out = np.zeros((num_steps, num_channels // channel_group), dtype=np.uint8)
    out[bins[keep], channels[keep] // channel_group] = 1
    return SpikeTrain(out)
