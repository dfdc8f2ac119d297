import math

from torch.optim.lr_scheduler import LambdaLR

from src import config


def sigma_schedule(epoch, total_epochs, d_max, anneal_fraction=config.SIGMA_ANNEAL_FRACTION,
                   sigma_init=None, sigma_final=config.SIGMA_FINAL):
    """Linear anneal from sigma_init (default d_max / 2) to sigma_final, then constant."""
    start = d_max / 2.0 if sigma_init is None else sigma_init
    end_epoch = anneal_fraction * total_epochs
    if epoch >= end_epoch:
        return sigma_final
    return start + (sigma_final - start) * (epoch / end_epoch)


def lr_schedule(kind, step, total_steps, base_lr, warmup=config.ONE_CYCLE_WARMUP,
                initial_div=config.ONE_CYCLE_INITIAL_DIV, final_div=config.ONE_CYCLE_FINAL_DIV):
    if kind == "none":
        return base_lr
    if kind == "cosine":
        return base_lr * 0.5 * (1.0 + math.cos(math.pi * step / total_steps))
    if kind == "one_cycle":
        peak = warmup * total_steps
        if step <= peak:
            start = base_lr / initial_div
            return start + (base_lr - start) * (step / peak)
        end = base_lr / final_div
        progress = (step - peak) / (total_steps - peak)
        return end + (base_lr - end) * 0.5 * (1.0 + math.cos(math.pi * progress))
    raise ValueError(f"unknown lr schedule '{kind}'")


def build_lr_scheduler(optimizer, tcfg, total_steps):
    """LambdaLR whose per-group factor follows lr_schedule for that group's scheduler kind."""
    kinds = {"weights": tcfg.weight_scheduler, "delays": tcfg.delay_scheduler}

    def factor(kind):
        def fn(step):
            return lr_schedule(
                kind, min(step, total_steps - 1), total_steps, 1.0,
                warmup=tcfg.one_cycle_warmup,
                initial_div=tcfg.one_cycle_initial_div,
                final_div=tcfg.one_cycle_final_div,
            )
        return fn

    return LambdaLR(optimizer, [factor(kinds[group["name"]]) for group in optimizer.param_groups])
