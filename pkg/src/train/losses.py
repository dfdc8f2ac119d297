import torch
import torch.nn.functional as F

from src.neuron.lif import check_finite


def cross_entropy_loss(logits, labels):
    """Softmax cross-entropy, averaged over the batch."""
    check_finite(logits, "logits")
    labels = torch.as_tensor(labels, dtype=torch.long)
    if logits.dim() == 1:
        logits = logits.unsqueeze(0)
        labels = labels.reshape(1)
    return F.cross_entropy(logits, labels)


def firing_rate_reg(rates, reg):
    """r * (R_quiet + R_burst) over all layers and neurons.

    `rates` holds one tensor per layer whose last axis is neurons; leading
    (batch) axes are averaged after summing over layers and neurons.
    """
    quiet = 0.0
    burst = 0.0
    for layer_rates in rates:
        layer_rates = torch.as_tensor(layer_rates)
        quiet = quiet + torch.relu(reg.alpha_min - layer_rates).sum(dim=-1)
        burst = burst + torch.relu(layer_rates - reg.alpha_max).sum(dim=-1)
    return (reg.r * (quiet + burst)).mean()
