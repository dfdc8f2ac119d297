import logging

import torch

from src.core.errors import NonFiniteError

logger = logging.getLogger(__name__)


def build_optimizer(model, tcfg):
    """Adam with two independent parameter groups, `weights` and `delays`."""
    groups = model.parameter_groups()
    lrs = {"weights": tcfg.lr_weights, "delays": tcfg.lr_delays}
    param_groups = [
        {"params": params, "lr": lrs[name], "name": name}
        for name, params in groups.items()
        if params
    ]
    return torch.optim.Adam(param_groups)


def adam_step(optimizer, lrs=None, model=None):
    """One Adam update; rejects non-finite gradients, then re-applies masks and clamps.

    `lrs` optionally overrides the learning rate of named groups for this step.
    """
    names = {id(p): n for n, p in model.named_parameters()} if model is not None else {}
    for group in optimizer.param_groups:
        if lrs and group.get("name") in lrs:
            group["lr"] = lrs[group["name"]]
        for index, param in enumerate(group["params"]):
            if param.grad is not None and not bool(torch.isfinite(param.grad).all()):
                name = names.get(id(param), f"{group.get('name', 'group')}[{index}]")
                raise NonFiniteError(f"gradient of {name}")
    optimizer.step()
    if model is not None:
        model.enforce_constraints()
