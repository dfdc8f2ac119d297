from src.cli.commands import cmd_cost, cmd_eval, cmd_events, cmd_gen_data, cmd_train
from src.cli.common import EXIT_CONFIG, EXIT_EQUIVALENCE, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, UsageError
from src.cli.sweep import SWEEP_KINDS, cmd_sweep, parse_grid

__all__ = [
    "cmd_cost",
    "cmd_eval",
    "cmd_events",
    "cmd_gen_data",
    "cmd_train",
    "cmd_sweep",
    "parse_grid",
    "SWEEP_KINDS",
    "UsageError",
    "EXIT_OK",
    "EXIT_USAGE",
    "EXIT_CONFIG",
    "EXIT_RUNTIME",
    "EXIT_EQUIVALENCE",
]
