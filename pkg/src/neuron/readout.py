import torch


def readout_integrate(currents, beta_out, reduce="mean"):
    """Non-spiking leaky integrator over (..., T, classes).

    V(t) = beta_out * V(t-1) + I(t) with V(-1) = 0; no threshold, no reset.
    Returns the potential trace and the logits aggregated over time.
    """
    v = torch.zeros_like(currents[..., 0, :])
    trace = []
    for t in range(currents.shape[-2]):
        v = beta_out * v + currents[..., t, :]
        trace.append(v)
    trace = torch.stack(trace, dim=-2)
    if reduce == "mean":
        logits = trace.mean(dim=-2)
    elif reduce == "sum":
        logits = trace.sum(dim=-2)
    elif reduce == "max":
        logits = trace.max(dim=-2).values
    else:
        raise ValueError(f"unknown readout reduction '{reduce}'")
    return trace, logits
