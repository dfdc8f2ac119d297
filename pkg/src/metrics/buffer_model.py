"""Analytic buffer size: per layer H*s + C*d_max, summed over layers.

C depends on mechanism and buffering strategy:

    mechanism   unshared       shared
    synaptic    H^2 rho_n      m H^2 rho_p
    axonal      H rho_n        m H rho_p
    dendritic   v H rho_n      (v + m) H rho_p

Where layer widths differ, presynaptic buffers (axonal, synaptic) scale with the
layer's fan-in and postsynaptic ones (dendritic) with its fan-out.

m is the neuron address width ceil(log2 H). The event engine's synaptic queue
stores edge indices instead and reports that wider entry in its occupancy rows.
"""
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from src import config
from src.core.types import STRATEGIES

BUFFERED_MECHANISMS = ("synaptic", "axonal", "dendritic")


@dataclass(frozen=True)
class BufferModelInputs:
    layers: int = config.NUM_LAYERS
    hidden: int = config.HIDDEN_SIZE
    d_max: int = config.D_MAX
    mechanism: str = "axonal"
    strategy: str = "unshared"
    state_bits: int = config.STATE_BITS
    weight_bits: int = config.WEIGHT_BITS
    address_bits: Optional[int] = None
    rho_n: float = config.RHO_N
    rho_p: float = config.RHO_P
    input_channels: Optional[int] = None
    delay_sparsity: float = 0.0

    def layer_sizes(self):
        sizes = []
        for index in range(self.layers):
            h_pre = self.input_channels if (index == 0 and self.input_channels) else self.hidden
            sizes.append((h_pre, self.hidden))
        return sizes

    def address(self, population):
        if self.address_bits is not None:
            return self.address_bits
        return max(1, math.ceil(math.log2(population)))


def _exact(value):
    return Fraction(str(value))


def coefficient(inputs, h_pre, h_post):
    """Effective buffering coefficient C of one layer, as an exact fraction."""
    mech, strategy = inputs.mechanism, inputs.strategy
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown buffering strategy '{strategy}'")
    if mech == "none":
        return Fraction(0)
    rho_n, rho_p = _exact(inputs.rho_n), _exact(inputs.rho_p)
    v = inputs.weight_bits
    if mech == "synaptic":
        c = h_pre * h_post * rho_n if strategy == "unshared" else inputs.address(h_pre) * h_pre * h_post * rho_p
    elif mech == "axonal":
        c = h_pre * rho_n if strategy == "unshared" else inputs.address(h_pre) * h_pre * rho_p
    elif mech == "dendritic":
        c = v * h_post * rho_n if strategy == "unshared" else (v + inputs.address(h_post)) * h_post * rho_p
    else:
        raise ValueError(f"unknown delay mechanism '{mech}'")
    # masked delays are pinned at zero and need no buffering
    return c * (1 - _exact(inputs.delay_sparsity))


def layer_terms(inputs):
    """(state_bits, buffer_bits) per layer as exact fractions."""
    terms = []
    for h_pre, h_post in inputs.layer_sizes():
        terms.append((Fraction(h_post * inputs.state_bits), coefficient(inputs, h_pre, h_post) * inputs.d_max))
    return terms


def buffer_bits(inputs):
    return sum(math.ceil(state + buffered) for state, buffered in layer_terms(inputs))


def buffer_inputs_for_model(cfg, strategy="unshared", **overrides):
    values = dict(
        layers=cfg.layers,
        hidden=cfg.hidden,
        d_max=cfg.d_max,
        mechanism=cfg.delay_mechanism,
        strategy=strategy,
        input_channels=cfg.input_channels,
        delay_sparsity=cfg.delay_sparsity,
    )
    values.update(overrides)
    return BufferModelInputs(**values)


def buffer_bits_for_model(cfg, strategy="unshared", **overrides):
    return buffer_bits(buffer_inputs_for_model(cfg, strategy, **overrides))


def cost_table(base):
    """One row per mechanism x strategy for the given topology."""
    rows = []
    for mechanism in BUFFERED_MECHANISMS:
        for strategy in STRATEGIES:
            inputs = replace(base, mechanism=mechanism, strategy=strategy)
            terms = layer_terms(inputs)
            state = sum(s for s, _ in terms)
            buffered = sum(b for _, b in terms)
            rows.append({
                "mechanism": mechanism,
                "strategy": strategy,
                "layers": inputs.layers,
                "hidden": inputs.hidden,
                "d_max": inputs.d_max,
                "state_bits": int(math.ceil(state)),
                "buffer_term_bits": int(math.ceil(buffered)),
                "total_bits": buffer_bits(inputs),
            })
    return rows
