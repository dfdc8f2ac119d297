"""Delay structures of the event engine.

A lane is whatever one buffer entry belongs to: a source neuron (axonal), an
outgoing edge (synaptic) or a target neuron (dendritic). Events carry a delay
in [1, d_max - 1]; zero-delay events never enter a buffer.
"""
import numpy as np

from src.core.errors import EngineInvariantError, QueueOverflowError


class RingBuffer:
    """Per-lane ring of d_max slots sharing a single head.

    Slots hold a spike bit, or an accumulated weighted value when `valued`.
    """

    def __init__(self, d_max, lanes, valued=False, layer=0):
        self.d_max = d_max
        self.lanes = lanes
        self.valued = valued
        self.layer = layer
        self.head = 0
        self.pending = np.zeros((d_max, lanes), dtype=bool)
        self.values = np.zeros((d_max, lanes)) if valued else None

    def push(self, step, lanes, delays, values=None):
        if lanes.size == 0:
            return
        if delays.min() < 1 or delays.max() >= self.d_max:
            raise EngineInvariantError(f"layer {self.layer}: delay outside [1, {self.d_max - 1}] at step {step}")
        slots = (self.head + delays) % self.d_max
        if self.pending[slots, lanes].any():
            raise EngineInvariantError(f"layer {self.layer}: ring slot written twice at step {step}")
        self.pending[slots, lanes] = True
        if self.valued:
            if not np.isfinite(values).all():
                raise EngineInvariantError(f"layer {self.layer}: non-finite ring value at step {step}")
            self.values[slots, lanes] = values

    def pop(self, step):
        """Lanes (and values) maturing at the head; clears the slot and advances."""
        lanes = np.nonzero(self.pending[self.head])[0]
        values = self.values[self.head, lanes].copy() if self.valued else None
        self.pending[self.head] = False
        if self.valued:
            self.values[self.head] = 0.0
        self.head = (self.head + 1) % self.d_max
        return lanes, values

    def occupancy(self):
        return int(self.pending.sum())

    def lane_occupancy(self):
        return self.pending.sum(axis=0)


class SharedQueue:
    """Layer-wide calendar queue: slot = due_step mod d_max.

    Each slot keeps chunks of (due_step, addresses, values).
    """

    def __init__(self, d_max, capacity, address_limit, valued=False, layer=0):
        self.d_max = d_max
        self.capacity = capacity
        self.address_limit = address_limit
        self.valued = valued
        self.layer = layer
        self.size = 0
        self.slots = [[] for _ in range(d_max)]

    def push(self, step, addresses, delays, values=None):
        if addresses.size == 0:
            return
        if addresses.max() >= self.address_limit:
            raise EngineInvariantError(f"layer {self.layer}: address {int(addresses.max())} out of range")
        if delays.min() < 1 or delays.max() >= self.d_max:
            raise EngineInvariantError(f"layer {self.layer}: delay outside [1, {self.d_max - 1}] at step {step}")
        if self.size + addresses.size > self.capacity:
            raise QueueOverflowError(self.layer, step, self.capacity)
        for delay in np.unique(delays):
            pick = delays == delay
            due = step + int(delay)
            chunk_values = values[pick] if self.valued else None
            self.slots[due % self.d_max].append((due, addresses[pick], chunk_values))
        self.size += addresses.size

    def pop(self, step):
        chunks = self.slots[step % self.d_max]
        self.slots[step % self.d_max] = []
        if not chunks:
            return np.zeros(0, dtype=np.int64), (np.zeros(0) if self.valued else None)
        if any(due != step for due, _, _ in chunks):
            raise EngineInvariantError(f"layer {self.layer}: entry popped before its due step {step}")
        addresses = np.concatenate([a for _, a, _ in chunks])
        values = np.concatenate([v for _, _, v in chunks]) if self.valued else None
        self.size -= addresses.size
        return addresses, values

    def occupancy(self):
        return self.size
