import torch


def count_spikes(record):
    """Spikes emitted by all hidden layers; the readout does not spike."""
    total = sum(float(s.detach().sum()) for s in record.spikes)
    return int(round(total))


def fanouts(model):
    """Per hidden layer, the number of unmasked outgoing weights of each neuron."""
    out = []
    layers = list(model.layers)
    for index, layer in enumerate(layers):
        if index + 1 < len(layers):
            fanout = layers[index + 1].weight_mask.sum(dim=0)
        else:
            fanout = torch.full((layer.h_post,), float(model.readout.shape[0]), dtype=layer.weight_mask.dtype)
        out.append(fanout)
    return out


def count_sops(record, model):
    """Each spike costs one synaptic operation per unmasked weight it traverses."""
    total = 0.0
    for spikes, fanout in zip(record.spikes, fanouts(model)):
        per_neuron = spikes.detach().reshape(-1, spikes.shape[-1]).sum(dim=0)
        total += float((per_neuron.to(torch.float64) * fanout.to(torch.float64)).sum())
    return int(round(total))


def count_parameters(model):
    """Trainable parameters as deployed: unmasked weights and delays, bn affine, readout."""
    total = model.readout.numel()
    for layer in model.layers:
        total += int(layer.weight_mask.sum())
        if layer.delays is not None:
            total += int(layer.delays.delay_mask.sum())
        if layer.bn is not None:
            total += layer.bn.weight.numel() + layer.bn.bias.numel()
    return total
