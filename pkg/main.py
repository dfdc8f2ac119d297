#!/usr/bin/env python3
import argparse
import logging
import sys

from src import config
from src.cli import (
    EXIT_CONFIG,
    EXIT_EQUIVALENCE,
    EXIT_RUNTIME,
    EXIT_USAGE,
    SWEEP_KINDS,
    UsageError,
    cmd_cost,
    cmd_eval,
    cmd_events,
    cmd_gen_data,
    cmd_sweep,
    cmd_train,
)
from src.core.errors import ConfigError, DelaySNNError, EquivalenceError
from src.core.types import STRATEGIES
from src.logger import setup_logging

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def common_options():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="Override the config seed")
    parent.add_argument("--config", default=None, help="Path to a JSON config document")
    parent.add_argument("--out", default=None, help="Write the result table here instead of stdout")
    parent.add_argument("--format", default="csv", choices=["csv", "json", "table"],
                        help="Result table format (default csv)")
    parent.add_argument("--log-level", default=None, help=f"Console log level (default {config.LOG_LEVEL})")
    parent.add_argument("--log-file", default=None,
                        help=f"JSON log file, empty string to disable (default {config.LOG_FILE})")
    return parent


def build_parser():
    parent = common_options()
    parser = ArgumentParser(
        prog="delaysnn",
        description="Train delay-learning spiking networks, run them event-driven and model their buffer cost",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("train", parents=[parent], help="Train a model and write checkpoint + metrics")
    p.add_argument("--data", default=None, help="Training event file (default: generate from config)")
    p.add_argument("--test-data", default=None, help="Test event file")
    p.add_argument("--out-dir", default="run", help="Directory for checkpoint, metrics and config snapshot")
    p.add_argument("--progress", action="store_true", help="Show a progress bar")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("eval", parents=[parent], help="Evaluate a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("--data", default=None, help="Event file (default: generated test split)")
    p.add_argument("--strategy", default="unshared", choices=STRATEGIES, help="Buffering strategy for buffer bits")
    p.add_argument("--continuous", action="store_true", help="Evaluate with Gaussian kernels instead of rounded delays")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("events", parents=[parent], help="Run the event-driven engine against the dense forward")
    p.add_argument("checkpoint")
    p.add_argument("--data", default=None, help="Event file (default: generated test split)")
    p.add_argument("--strategy", default="both", choices=[*STRATEGIES, "both"])
    p.add_argument("--samples", type=int, default=16, help="Number of samples to simulate (0 for all)")
    p.add_argument("--capacity", type=int, default=None, help="Shared queue capacity per layer")
    p.add_argument("--spikes-out", default=None, help="Write last-layer output spikes as an event file")
    p.set_defaults(handler=cmd_events)

    p = sub.add_parser("cost", parents=[parent], help="Analytic buffer cost for every mechanism and strategy")
    p.add_argument("--layers", type=int, default=config.NUM_LAYERS)
    p.add_argument("--hidden", type=int, default=config.HIDDEN_SIZE)
    p.add_argument("--d-max", type=int, default=config.D_MAX)
    p.add_argument("--state-bits", type=int, default=config.STATE_BITS)
    p.add_argument("--weight-bits", type=int, default=config.WEIGHT_BITS)
    p.add_argument("--address-bits", type=int, default=None, help="Default ceil(log2 H)")
    p.add_argument("--rho-n", type=float, default=config.RHO_N)
    p.add_argument("--rho-p", type=float, default=config.RHO_P)
    p.add_argument("--input-channels", type=int, default=None, help="Fan-in of the first layer (default H)")
    p.add_argument("--delay-sparsity", type=float, default=0.0)
    p.set_defaults(handler=cmd_cost)

    p = sub.add_parser("sweep", parents=[parent], help="Train over a parameter grid")
    p.add_argument("kind", choices=SWEEP_KINDS)
    p.add_argument("--grid", required=True, help="e.g. 5,15,31 | eta=0,0.8;kappa=0,0.6 | 0.01,0.05")
    p.add_argument("--seeds", type=int, default=1, help="Replicates per grid point")
    p.add_argument("--workers", type=int, default=1, help="Parallel worker processes")
    p.add_argument("--data", default=None)
    p.add_argument("--test-data", default=None)
    p.add_argument("--out-dir", default="sweep", help="Directory for progress and sweep CSV")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("gen-data", parents=[parent], help="Write the synthetic task as event files")
    p.add_argument("--out-dir", default="data")
    p.set_defaults(handler=cmd_gen_data)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_file)
    logger.debug(f"Running '{args.command}' with arguments: {vars(args)}")
    try:
        return args.handler(args)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except ConfigError as e:
        for violation in e.violations:
            logger.error(f"Invalid config: {violation}")
        return EXIT_CONFIG
    except EquivalenceError as e:
        logger.error(f"Correctness check failed: {e}")
        return EXIT_EQUIVALENCE
    except (DelaySNNError, OSError) as e:
        logger.error(f"Error occurred: {e}")
        return EXIT_RUNTIME


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
