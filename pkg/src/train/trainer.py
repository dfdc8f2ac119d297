import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import torch
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn

from src.core.errors import DivergenceError, NonFiniteError
from src.core.rng import seeded_rng
from src.logger import console
from src.metrics.counts import count_sops, count_spikes
from src.train.losses import cross_entropy_loss, firing_rate_reg
from src.train.optim import adam_step, build_optimizer
from src.train.schedules import build_lr_scheduler, sigma_schedule

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "split", "loss", "accuracy", "spikes", "sops", "sigma", "lr_w", "lr_d"]


@dataclass
class EvalResult:
    loss: float
    accuracy: float
    spikes_per_sample: float
    sops_per_sample: float
    total_spikes: int
    total_sops: int
    samples: int


def _batches(count, batch_size, order=None):
    order = torch.arange(count) if order is None else order
    for start in range(0, count, batch_size):
        yield order[start:start + batch_size]


def evaluate(model, dataset, discrete=True, batch_size=512, reg=None):
    """Inference-mode pass (frozen bn statistics, no dropout, hard spikes)."""
    model.eval()
    inputs, labels = dataset.tensors(dtype=model.readout.dtype)
    loss_sum = 0.0
    correct = 0
    spikes = 0
    sops = 0
    with torch.no_grad():
        for idx in _batches(len(dataset), batch_size):
            record = model(inputs[idx], mode="hard", discrete=discrete)
            loss = cross_entropy_loss(record.logits, labels[idx])
            if reg is not None and reg.r > 0:
                loss = loss + firing_rate_reg(record.rates, reg)
            loss_sum += float(loss) * len(idx)
            correct += int((record.logits.argmax(dim=-1) == labels[idx]).sum())
            spikes += count_spikes(record)
            sops += count_sops(record, model)
    n = len(dataset)
    return EvalResult(loss_sum / n, correct / n, spikes / n, sops / n, spikes, sops, n)


def recalibrate_batch_norm(model, dataset, discrete=True, batch_size=512):
    """Replaces every batch-norm running statistic by its average over `dataset`.

    The statistics are measured on the forward evaluation uses (rounded or
    continuous delays, hard spikes, no dropout).
    """
    norms = [layer.bn for layer in model.layers if layer.bn is not None]
    if not norms or len(dataset) == 0:
        return model
    inputs, _ = dataset.tensors(dtype=model.readout.dtype)
    momenta = [bn.momentum for bn in norms]
    model.eval()
    for bn in norms:
        bn.reset_running_stats()
        bn.momentum = None
        bn.train()
    try:
        with torch.no_grad():
            for idx in _batches(len(dataset), batch_size):
                model(inputs[idx], mode="hard", discrete=discrete)
    finally:
        for bn, momentum in zip(norms, momenta):
            bn.momentum = momentum
        model.eval()
    logger.debug(f"Recalibrated {len(norms)} batch-norm layers on {len(dataset)} samples (discrete={discrete})")
    return model


def rounded_epochs(tcfg):
    """Number of closing epochs trained on rounded delays."""
    return math.floor(tcfg.epochs * Fraction(str(float(tcfg.rounded_finetune_fraction))))


class Trainer:
    def __init__(self, model, tcfg, train_data, test_data=None, seed=None, show_progress=False):
        self.model = model
        self.tcfg = tcfg
        self.train_data = train_data
        self.test_data = test_data
        self.seed = model.cfg.seed if seed is None else seed
        self.show_progress = show_progress
        self.history = []

    def _row(self, epoch, split, loss, accuracy, spikes, sops, sigma, lr_w, lr_d):
        return {
            "epoch": epoch,
            "split": split,
            "loss": float(loss),
            "accuracy": float(accuracy),
            "spikes": float(spikes),
            "sops": float(sops),
            "sigma": float(sigma),
            "lr_w": float(lr_w),
            "lr_d": float(lr_d),
        }

    def _group_lrs(self, optimizer):
        lrs = {group["name"]: group["lr"] for group in optimizer.param_groups}
        return lrs.get("weights", 0.0), lrs.get("delays", 0.0)

    def fit(self):
        model, tcfg, cfg = self.model, self.tcfg, self.model.cfg
        if len(self.train_data) == 0:
            raise ValueError("training dataset is empty")
        torch.set_num_threads(tcfg.threads)
        shuffle_rng, dropout_rng = seeded_rng(self.seed).spawn(2)
        shuffle_gen = shuffle_rng.torch_generator()
        dropout_gen = dropout_rng.torch_generator()

        n = len(self.train_data)
        batch_size = min(tcfg.batch_size, n)
        steps_per_epoch = math.ceil(n / batch_size)
        total_steps = tcfg.epochs * steps_per_epoch
        optimizer = build_optimizer(model, tcfg)
        scheduler = build_lr_scheduler(optimizer, tcfg, total_steps)
        inputs, labels = self.train_data.tensors(dtype=model.readout.dtype)
        reg = tcfg.reg if tcfg.reg is not None and tcfg.reg.r > 0 else None
        first_rounded = tcfg.epochs - rounded_epochs(tcfg) if cfg.has_delays else tcfg.epochs

        logger.info(
            f"Training {cfg.delay_mechanism} model for {tcfg.epochs} epochs "
            f"({steps_per_epoch} steps/epoch, batch {batch_size}, {n} samples, "
            f"{tcfg.epochs - first_rounded} on rounded delays)"
        )
        progress = Progress(
            TextColumn("[bold]epoch {task.completed}/{task.total}"),
            BarColumn(),
            TextColumn("{task.fields[status]}"),
            TimeElapsedColumn(),
            console=console,
            disable=not self.show_progress,
            transient=True,
        )
        step = 0
        with progress:
            task = progress.add_task("train", total=tcfg.epochs, status="")
            for epoch in range(tcfg.epochs):
                sigma = sigma_schedule(epoch, tcfg.epochs, cfg.d_max, tcfg.sigma_anneal_fraction,
                                       sigma_init=cfg.initial_sigma)
                model.set_sigma(sigma)
                lr_w, lr_d = self._group_lrs(optimizer)
                rounded = epoch >= first_rounded
                model.train()
                loss_sum, correct, spikes, sops = 0.0, 0, 0, 0
                order = torch.randperm(n, generator=shuffle_gen)
                for idx in _batches(n, batch_size, order):
                    try:
                        record = model(inputs[idx], mode=cfg.mode, generator=dropout_gen,
                                       discrete=rounded, straight_through=rounded)
                        loss = cross_entropy_loss(record.logits, labels[idx])
                    except NonFiniteError as e:
                        raise DivergenceError(epoch, step, float("nan")) from e
                    if reg is not None:
                        loss = loss + firing_rate_reg(record.rates, reg)
                    if not bool(torch.isfinite(loss)):
                        raise DivergenceError(epoch, step, float(loss))
                    model.zero_grad(set_to_none=True)
                    loss.backward()
                    adam_step(optimizer, model=model)
                    scheduler.step()
                    step += 1

                    loss_sum += float(loss.detach()) * len(idx)
                    correct += int((record.logits.detach().argmax(dim=-1) == labels[idx]).sum())
                    spikes += count_spikes(record)
                    sops += count_sops(record, model)

                self.history.append(self._row(epoch, "train", loss_sum / n, correct / n, spikes / n, sops / n,
                                              sigma, lr_w, lr_d))
                status = f"loss={loss_sum / n:.4f} acc={correct / n:.3f}"
                if tcfg.recalibrate_bn and (self.test_data is not None or epoch == tcfg.epochs - 1):
                    recalibrate_batch_norm(model, self.train_data, discrete=tcfg.eval_discrete,
                                           batch_size=batch_size)
                if self.test_data is not None:
                    result = evaluate(model, self.test_data, discrete=tcfg.eval_discrete,
                                      batch_size=batch_size, reg=reg)
                    self.history.append(self._row(epoch, "test", result.loss, result.accuracy,
                                                  result.spikes_per_sample, result.sops_per_sample,
                                                  sigma, lr_w, lr_d))
                    status += f" test_acc={result.accuracy:.3f}"
                logger.debug(f"Epoch {epoch}: {status} sigma={sigma:.3f} lr_w={lr_w:.2e} lr_d={lr_d:.2e}")
                progress.update(task, advance=1, status=status)

        logger.info(f"Training complete: {status}")
        return model, self.history


def train(model, dataset, tcfg, test_dataset=None, seed=None, show_progress=False):
    return Trainer(model, tcfg, dataset, test_dataset, seed=seed, show_progress=show_progress).fit()
