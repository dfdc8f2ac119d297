import logging
from dataclasses import dataclass, field

import numpy as np
import torch

from src import config
from src.core.errors import EngineInvariantError, EquivalenceError, NonFiniteError, ShapeMismatchError
from src.core.types import SpikeTrain
from src.delays.conv import apply_delay_conv
from src.delays.kernels import KernelBank, one_hot_kernel
from src.engine.buffers import RingBuffer, SharedQueue
from src.metrics.buffer_model import BufferModelInputs
from src.neuron.lif import lif_run
from src.neuron.readout import readout_integrate

logger = logging.getLogger(__name__)

OCCUPANCY_COLUMNS = [
    "layer", "mechanism", "strategy", "hidden", "d_max", "steps", "spikes",
    "peak_entries", "mean_entries", "peak_bits", "mean_bits", "analytic_bits",
    "rho_p_per_step", "rho_p_per_window", "rho_p_assumed",
]


@dataclass
class LayerStats:
    layer: int
    mechanism: str
    strategy: str
    hidden: int
    lanes: int
    d_max: int
    entry_bits: int
    capacity: int
    entries: list = field(default_factory=list)

    def sample(self, count):
        self.entries.append(count)

    @property
    def peak_entries(self):
        return max(self.entries, default=0)

    @property
    def mean_entries(self):
        return float(np.mean(self.entries)) if self.entries else 0.0


@dataclass
class EngineResult:
    spikes: list
    currents: list
    readout_trace: np.ndarray
    logits: np.ndarray
    stats: list

    def spike_trains(self):
        return [SpikeTrain(s) for s in self.spikes]


def lane_count(layer):
    if layer.mechanism == "synaptic":
        return layer.num_edges
    if layer.mechanism == "dendritic":
        return layer.h_post
    return layer.h_pre


def address_bits(population):
    return BufferModelInputs().address(max(population, 1))


def entry_bits(layer, strategy):
    """Bits one buffered entry costs: a spike bit, a weighted value, or an address (plus value)."""
    valued = layer.mechanism == "dendritic"
    if strategy == "unshared":
        return config.WEIGHT_BITS if valued else 1
    # shared entries address the lane they were queued on: a neuron or a synaptic edge
    population = lane_count(layer)
    return address_bits(population) + (config.WEIGHT_BITS if valued else 0)


class EventEngine:
    """Step-by-step simulation of a compiled model.

    Per step and layer: route the previous layer's spikes into the delay
    structure, sample occupancy, deliver matured events, then update LIF.
    """

    def __init__(self, em, capacity=None):
        self.em = em
        self.capacity = capacity

    def _buffer(self, index, layer):
        lanes = lane_count(layer)
        valued = layer.mechanism == "dendritic"
        if self.em.buffering == "unshared":
            return RingBuffer(layer.d_max, lanes, valued=valued, layer=index)
        capacity = self.capacity if self.capacity is not None else lanes * layer.d_max
        return SharedQueue(layer.d_max, capacity, lanes, valued=valued, layer=index)

    def _route(self, step, layer, buffer, sources):
        """Schedules delayed events; returns what arrives this step with zero delay."""
        if layer.mechanism == "axonal":
            delays = layer.delays[sources]
            buffer.push(step, sources[delays > 0], delays[delays > 0])
            return sources[delays == 0], None
        if layer.mechanism == "synaptic":
            edges = layer.edges_of(sources)
            delays = layer.edge_delay[edges]
            buffer.push(step, edges[delays > 0], delays[delays > 0])
            return edges[delays == 0], None
        if sources.size == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        summed = layer.weight[:, sources].sum(axis=1)
        targets = np.nonzero(layer.mask[:, sources].any(axis=1))[0]
        delays = layer.delays[targets]
        later = targets[delays > 0]
        buffer.push(step, later, delays[delays > 0], summed[later])
        now = targets[delays == 0]
        return now, summed[now]

    def _deliver(self, layer, lanes, values):
        if layer.mechanism == "axonal":
            return layer.weight[:, np.sort(lanes)].sum(axis=1)
        if layer.mechanism == "synaptic":
            lanes = np.sort(lanes)
            return np.bincount(layer.edge_target[lanes], weights=layer.edge_weight[lanes], minlength=layer.h_post)
        currents = np.zeros(layer.h_post)
        if np.unique(lanes).size != lanes.size:
            raise EngineInvariantError("dendritic target received two deliveries in one step")
        currents[lanes] = values
        return currents

    def _check_lanes(self, index, layer, buffer):
        if isinstance(buffer, RingBuffer) and buffer.lanes and buffer.lane_occupancy().max() > layer.d_max:
            raise EngineInvariantError(f"layer {index}: a ring holds more than d_max entries")

    def run(self, x):
        em = self.em
        data = x.data if isinstance(x, SpikeTrain) else np.asarray(x, dtype=np.uint8)
        if data.ndim != 2 or data.shape[1] != em.input_channels:
            raise ShapeMismatchError("engine input", f"(steps, {em.input_channels})", data.shape)
        steps = data.shape[0]

        buffers = [self._buffer(i, layer) for i, layer in enumerate(em.layers)]
        stats = [
            LayerStats(i, layer.mechanism, em.buffering, layer.h_post, lane_count(layer), layer.d_max,
                       entry_bits(layer, em.buffering), getattr(buf, "capacity", lane_count(layer) * layer.d_max))
            for i, (layer, buf) in enumerate(zip(em.layers, buffers))
        ]
        potentials = [np.zeros(layer.h_post) for layer in em.layers]
        spikes = [np.zeros((steps, layer.h_post), dtype=np.uint8) for layer in em.layers]
        currents = [np.zeros((steps, layer.h_post)) for layer in em.layers]

        for t in range(steps):
            incoming = data[t]
            for index, (layer, buffer) in enumerate(zip(em.layers, buffers)):
                sources = np.nonzero(incoming)[0]
                now, now_values = self._route(t, layer, buffer, sources)
                stats[index].sample(buffer.occupancy())
                self._check_lanes(index, layer, buffer)
                matured, matured_values = buffer.pop(t)
                lanes = np.concatenate((now, matured))
                values = np.concatenate((now_values, matured_values)) if now_values is not None else None
                current = self._deliver(layer, lanes, values) + layer.bias
                if not np.isfinite(current).all():
                    raise NonFiniteError("engine current", int(np.nonzero(~np.isfinite(current))[0][0]))
                u = layer.beta * potentials[index] + current
                fired = u >= layer.threshold
                potentials[index] = np.where(fired, 0.0, u)
                spikes[index][t] = fired
                currents[index][t] = current
                incoming = spikes[index][t]

        readout_currents = spikes[-1].astype(np.float64) @ em.readout.T
        trace, logits = readout_integrate(torch.from_numpy(readout_currents), em.beta_out, em.readout_reduce)
        logger.debug(
            f"Engine run ({em.buffering}): {steps} steps, "
            f"{sum(int(s.sum()) for s in spikes)} spikes, peaks {[s.peak_entries for s in stats]}"
        )
        return EngineResult(spikes, currents, trace.numpy(), logits.numpy(), stats)


def run(em, x, capacity=None):
    return EventEngine(em, capacity=capacity).run(x)


@dataclass
class ReferenceResult:
    spikes: list
    currents: list
    logits: np.ndarray


def reference_forward(em, x):
    """Dense one-hot-kernel forward of a compiled model in float64 torch."""
    data = x.data if isinstance(x, SpikeTrain) else np.asarray(x)
    h = torch.from_numpy(data.astype(np.float64))
    spikes, currents = [], []
    for layer in em.layers:
        weight = torch.from_numpy(layer.weight)
        bank = KernelBank(one_hot_kernel(torch.from_numpy(layer.delays), layer.d_max, torch.float64), layer.mechanism)
        if layer.mechanism == "synaptic":
            current = apply_delay_conv(h, bank, weight=weight)
        elif layer.mechanism == "axonal":
            current = apply_delay_conv(h, bank) @ weight.T
        else:
            current = apply_delay_conv(h @ weight.T, bank)
        current = current + torch.from_numpy(layer.bias)
        h, _ = lif_run(current, layer.beta, layer.threshold, mode="hard")
        spikes.append(h.numpy().astype(np.uint8))
        currents.append(current.numpy())
    _, logits = readout_integrate(h @ torch.from_numpy(em.readout).T, em.beta_out, em.readout_reduce)
    return ReferenceResult(spikes, currents, logits.numpy())


def first_mismatch(result, reference):
    """(layer, step, neuron) of the first differing spike, or None."""
    for index, (got, want) in enumerate(zip(result.spikes, reference.spikes)):
        diff = np.argwhere(got != want)
        if diff.size:
            return index, int(diff[0][0]), int(diff[0][1])
    return None


def check_equivalence(em, x, capacity=None):
    """Runs both buffering strategies against the dense oracle; raises on any spike mismatch."""
    reference = reference_forward(em, x)
    results = {}
    for strategy in ("unshared", "shared"):
        result = run(em.with_buffering(strategy), x, capacity=capacity)
        mismatch = first_mismatch(result, reference)
        if mismatch is not None:
            layer, step, neuron = mismatch
            raise EquivalenceError(
                f"{strategy} engine differs from dense forward at layer {layer}, step {step}, neuron {neuron}"
            )
        if not np.allclose(result.logits, reference.logits, rtol=1e-9, atol=1e-9):
            raise EquivalenceError(f"{strategy} engine logits differ from dense forward")
        results[strategy] = result
    return results, reference


def window_rate(spikes, d_max):
    """Mean fraction of neurons that fire at least once per d_max-step window."""
    steps, hidden = spikes.shape
    width = min(d_max, steps)
    windows = steps // width
    active = spikes[:windows * width].reshape(windows, width, hidden).any(axis=1)
    return float(active.mean())


def analytic_bits(stats):
    """Worst-case buffered bits of one layer: every lane full at rho_n (unshared) or rho_p (shared)."""
    rate = config.RHO_N if stats.strategy == "unshared" else config.RHO_P
    return int(np.ceil(stats.lanes * stats.d_max * stats.entry_bits * rate))


def occupancy_report(result):
    rows = []
    for stats, spikes in zip(result.stats, result.spikes):
        steps = spikes.shape[0]
        total = int(spikes.sum())
        rows.append({
            "layer": stats.layer,
            "mechanism": stats.mechanism,
            "strategy": stats.strategy,
            "hidden": stats.hidden,
            "d_max": stats.d_max,
            "steps": steps,
            "spikes": total,
            "peak_entries": stats.peak_entries,
            "mean_entries": stats.mean_entries,
            "peak_bits": stats.peak_entries * stats.entry_bits,
            "mean_bits": stats.mean_entries * stats.entry_bits,
            "analytic_bits": analytic_bits(stats),
            "rho_p_per_step": total / (steps * stats.hidden),
            "rho_p_per_window": window_rate(spikes, stats.d_max),
            "rho_p_assumed": config.RHO_P,
        })
    return rows


def aggregate_occupancy(reports):
    """Merges per-sample occupancy reports into one row per (strategy, layer)."""
    merged = {}
    for rows in reports:
        for row in rows:
            merged.setdefault((row["strategy"], row["layer"]), []).append(row)
    out = []
    for _, group in sorted(merged.items()):
        first = group[0]
        spikes = sum(r["spikes"] for r in group)
        steps = sum(r["steps"] for r in group)
        out.append({
            **{k: first[k] for k in ("layer", "mechanism", "strategy", "hidden", "d_max", "analytic_bits",
                                     "rho_p_assumed")},
            "steps": steps,
            "spikes": spikes,
            "peak_entries": max(r["peak_entries"] for r in group),
            "mean_entries": float(np.mean([r["mean_entries"] for r in group])),
            "peak_bits": max(r["peak_bits"] for r in group),
            "mean_bits": float(np.mean([r["mean_bits"] for r in group])),
            "rho_p_per_step": spikes / (steps * first["hidden"]),
            "rho_p_per_window": float(np.mean([r["rho_p_per_window"] for r in group])),
        })
    return out
