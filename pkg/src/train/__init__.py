from src.core.types import RegConfig
from src.train.losses import cross_entropy_loss, firing_rate_reg
from src.train.optim import adam_step, build_optimizer
from src.train.schedules import build_lr_scheduler, lr_schedule, sigma_schedule
from src.train.trainer import (
    HISTORY_COLUMNS,
    EvalResult,
    Trainer,
    evaluate,
    recalibrate_batch_norm,
    rounded_epochs,
    train,
)

__all__ = [
    "RegConfig",
    "cross_entropy_loss",
    "firing_rate_reg",
    "adam_step",
    "build_optimizer",
    "build_lr_scheduler",
    "lr_schedule",
    "sigma_schedule",
    "HISTORY_COLUMNS",
    "EvalResult",
    "Trainer",
    "evaluate",
    "recalibrate_batch_norm",
    "rounded_epochs",
    "train",
]
