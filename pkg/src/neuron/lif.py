from dataclasses import dataclass

import torch

from src.core.errors import NonFiniteError
from src.neuron.surrogate import spike_fn


@dataclass
class LIFState:
    U: torch.Tensor

    @classmethod
    def zeros(cls, shape, dtype=torch.float32, device=None):
        return cls(torch.zeros(shape, dtype=dtype, device=device))


def check_finite(tensor, what):
    finite = torch.isfinite(tensor)
    if not bool(finite.all()):
        index = tuple(int(i) for i in torch.nonzero(~finite)[0])
        raise NonFiniteError(what, index if len(index) > 1 else index[0])


def lif_step(state, current, beta, threshold, mode="hard", slope=5.0, validate=True):
    """One discrete LIF update: integrate, spike on U >= threshold, multiplicative reset."""
    if validate:
        check_finite(current, "input current")
    u = beta * state.U + current
    spikes = spike_fn(u - threshold, slope, mode)
    u = (1.0 - spikes) * u
    return LIFState(u), spikes


def lif_run(currents, beta, threshold, mode="hard", slope=5.0, state=None):
    """Runs LIF over the time axis of `currents` shaped (..., T, H)."""
    check_finite(currents, "input current")
    if state is None:
        state = LIFState.zeros(currents[..., 0, :].shape, dtype=currents.dtype, device=currents.device)
    spikes = []
    for t in range(currents.shape[-2]):
        state, s = lif_step(state, currents[..., t, :], beta, threshold, mode, slope, validate=False)
        spikes.append(s)
    return torch.stack(spikes, dim=-2), state
