"""Sparse binary spike-event files.

Layout (little-endian):

    header   version u8, channels u16, steps u32, samples u32, classes u16
    sample   label u16, event count u32, then count x (step u32, channel u16)

Events within a sample are strictly increasing in (step, channel).
"""
import logging
import struct
from pathlib import Path

import numpy as np

from src import config
from src.core.errors import EventFileError
from src.core.types import SpikeDataset, SpikeTrain

logger = logging.getLogger(__name__)

HEADER = struct.Struct("<BHIIH")
SAMPLE_HEADER = struct.Struct("<HI")
EVENT_DTYPE = np.dtype([("step", "<u4"), ("channel", "<u2")])
EVENT_BITS = EVENT_DTYPE.itemsize * 8
SAMPLES_FIELD_OFFSET = struct.calcsize("<BHI")


def encode_sample(train, label):
    steps, channels = train.to_events()
    events = np.empty(steps.size, dtype=EVENT_DTYPE)
    events["step"] = steps
    events["channel"] = channels
    return SAMPLE_HEADER.pack(label, steps.size) + events.tobytes()


def write_events(path, dataset):
    if dataset.channels > 0xFFFF or dataset.num_classes > 0xFFFF:
        raise ValueError("channel and class counts must fit in 16 bits")
    parts = [HEADER.pack(config.EVENT_FILE_VERSION, dataset.channels, dataset.steps, len(dataset),
                         dataset.num_classes)]
    for index in range(len(dataset)):
        train, label = dataset[index]
        parts.append(encode_sample(train, label))
    payload = b"".join(parts)
    Path(path).write_bytes(payload)
    logger.info(f"Wrote {len(dataset)} samples ({len(payload)} bytes) to {path}")
    return len(payload)


def _sorted_offset(events):
    """Index of the first event not strictly after its predecessor, or None."""
    if events.size < 2:
        return None
    keys = events["step"].astype(np.int64) * 0x10000 + events["channel"].astype(np.int64)
    bad = np.nonzero(np.diff(keys) <= 0)[0]
    return int(bad[0]) + 1 if bad.size else None


def read_events(path):
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise EventFileError("truncated header", len(data))
    version, channels, steps, samples, classes = HEADER.unpack_from(data, 0)
    if version != config.EVENT_FILE_VERSION:
        raise EventFileError(f"unsupported event file version {version}", 0)
    if channels < 1 or steps < 1 or classes < 1:
        raise EventFileError("header declares an empty dimension", 1)
    room = (len(data) - HEADER.size) // SAMPLE_HEADER.size
    if samples > room:
        raise EventFileError(f"header declares {samples} samples but the file holds at most {room}",
                             SAMPLES_FIELD_OFFSET)
    if samples * steps * channels > config.MAX_DENSE_EVENT_CELLS:
        raise EventFileError(
            f"{samples}x{steps}x{channels} dense cells exceed the limit of {config.MAX_DENSE_EVENT_CELLS}", 1
        )

    inputs = np.zeros((samples, steps, channels), dtype=np.uint8)
    labels = np.zeros(samples, dtype=np.int64)
    offset = HEADER.size
    for index in range(samples):
        if offset + SAMPLE_HEADER.size > len(data):
            raise EventFileError(f"truncated header of sample {index}", offset)
        label, count = SAMPLE_HEADER.unpack_from(data, offset)
        if label >= classes:
            raise EventFileError(f"label {label} out of range for {classes} classes", offset)
        offset += SAMPLE_HEADER.size
        end = offset + count * EVENT_DTYPE.itemsize
        if end > len(data):
            raise EventFileError(f"truncated events of sample {index}", offset)
        events = np.frombuffer(data, dtype=EVENT_DTYPE, count=count, offset=offset)
        out_of_range = np.nonzero((events["step"] >= steps) | (events["channel"] >= channels))[0]
        if out_of_range.size:
            raise EventFileError(f"event out of range in sample {index}",
                                 offset + int(out_of_range[0]) * EVENT_DTYPE.itemsize)
        unsorted = _sorted_offset(events)
        if unsorted is not None:
            raise EventFileError(f"events of sample {index} not sorted by (step, channel)",
                                 offset + unsorted * EVENT_DTYPE.itemsize)
        inputs[index, events["step"].astype(np.int64), events["channel"].astype(np.int64)] = 1
        labels[index] = label
        offset = end
    if offset != len(data):
        raise EventFileError("trailing bytes after last sample", offset)
    logger.debug(f"Read {samples} samples ({steps} steps x {channels} channels) from {path}")
    return SpikeDataset(inputs, labels, classes)


def write_spike_trains(path, trains, labels=None, num_classes=1):
    """Writes engine outputs (one SpikeTrain per sample) as an event file."""
    inputs = np.stack([t.data if isinstance(t, SpikeTrain) else np.asarray(t) for t in trains])
    labels = np.zeros(len(inputs), dtype=np.int64) if labels is None else np.asarray(labels)
    return write_events(path, SpikeDataset(inputs, labels, num_classes))


def event_file_size(dataset):
    """Exact byte size of the event file for `dataset`, without writing it."""
    events = int(dataset.inputs.sum())
    return HEADER.size + len(dataset) * SAMPLE_HEADER.size + events * EVENT_DTYPE.itemsize
