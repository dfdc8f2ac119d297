import logging
from dataclasses import dataclass, field

import numpy as np
import torch

from src.core.errors import FoldError
from src.core.types import STRATEGIES
from src.delays.params import discretize

logger = logging.getLogger(__name__)


@dataclass
class EventLayer:
    """Inference-ready layer: integer delays, bn-folded weights, adjacency lists.

    `delays` is shaped by the tying scheme: (H_post, H_pre) synaptic, (H_pre,)
    axonal, (H_post,) dendritic. Delay-free layers compile as axonal with all
    delays 0. Edges are ordered by source, then target.
    """

    mechanism: str
    d_max: int
    delays: np.ndarray
    weight: np.ndarray
    bias: np.ndarray
    mask: np.ndarray
    beta: float
    threshold: float
    edge_source: np.ndarray = field(init=False)
    edge_target: np.ndarray = field(init=False)
    edge_weight: np.ndarray = field(init=False)
    edge_delay: np.ndarray = field(init=False)
    source_ptr: np.ndarray = field(init=False)

    def __post_init__(self):
        target, source = np.nonzero(self.mask)
        order = np.lexsort((target, source))
        self.edge_source = source[order]
        self.edge_target = target[order]
        self.edge_weight = self.weight[self.edge_target, self.edge_source]
        if self.mechanism == "synaptic":
            self.edge_delay = self.delays[self.edge_target, self.edge_source]
        elif self.mechanism == "axonal":
            self.edge_delay = self.delays[self.edge_source]
        else:
            self.edge_delay = self.delays[self.edge_target]
        counts = np.bincount(self.edge_source, minlength=self.h_pre)
        self.source_ptr = np.concatenate(([0], np.cumsum(counts)))

    @property
    def h_pre(self):
        return self.weight.shape[1]

    @property
    def h_post(self):
        return self.weight.shape[0]

    @property
    def num_edges(self):
        return self.edge_source.shape[0]

    def adjacency(self, source):
        """(targets, weights, delays) of the unmasked outgoing edges of one source neuron."""
        lo, hi = self.source_ptr[source], self.source_ptr[source + 1]
        return self.edge_target[lo:hi], self.edge_weight[lo:hi], self.edge_delay[lo:hi]

    def edges_of(self, sources):
        if len(sources) == 0:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.arange(self.source_ptr[j], self.source_ptr[j + 1]) for j in sources])


@dataclass
class EventModel:
    layers: list
    readout: np.ndarray
    beta_out: float
    readout_reduce: str
    input_channels: int
    buffering: str = "unshared"

    def with_buffering(self, buffering):
        if buffering not in STRATEGIES:
            raise ValueError(f"unknown buffering strategy '{buffering}'")
        return EventModel(self.layers, self.readout, self.beta_out, self.readout_reduce,
                          self.input_channels, buffering)


def fold_batch_norm(weight, bn, layer_index):
    if bn is None:
        return weight, np.zeros(weight.shape[0])
    var = bn.running_var.detach().double().numpy()
    zero = np.nonzero(var == 0)[0]
    if zero.size:
        raise FoldError(layer_index, int(zero[0]))
    mean = bn.running_mean.detach().double().numpy()
    gamma = bn.weight.detach().double().numpy()
    beta = bn.bias.detach().double().numpy()
    scale = gamma / np.sqrt(var + bn.eps)
    return scale[:, None] * weight, beta - scale * mean


def compile_model(model, buffering="unshared"):
    """Discretizes delays, folds batch norm into weights/biases and drops masked edges."""
    cfg = model.cfg
    layers = []
    with torch.no_grad():
        for index, layer in enumerate(model.layers):
            mask = layer.weight_mask.detach().numpy() > 0
            weight = (layer.weight * layer.weight_mask).detach().double().numpy()
            weight, bias = fold_batch_norm(weight, layer.bn, index)
            weight = np.where(mask, weight, 0.0)
            if layer.delays is None:
                mechanism = "axonal"
                delays = np.zeros(layer.h_pre, dtype=np.int64)
            else:
                mechanism = layer.mechanism
                delays = discretize(layer.delays.parameter_set()).numpy().astype(np.int64)
            layers.append(EventLayer(mechanism, cfg.d_max, delays, weight, bias, mask, cfg.beta, cfg.threshold))
            logger.debug(f"Compiled layer {index}: {mechanism}, {layers[-1].num_edges} edges")
    readout = model.readout.detach().double().numpy()
    em = EventModel(layers, readout, cfg.beta, cfg.readout_reduce, cfg.input_channels, buffering)
    logger.info(f"Compiled {len(layers)} layers for event-driven inference ({buffering} buffering)")
    return em
