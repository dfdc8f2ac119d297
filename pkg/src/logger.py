import logging
import sys

from pythonjsonlogger import jsonlogger
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.config import LOG_FILE, LOG_LEVEL

# Logs go to stderr so CSV/JSON written to stdout stays clean.
console = Console(stderr=True)

_ROOT_LOGGERS = ("src", "main", "__main__")


def setup_logging(level=None, log_file=None, console_output=True):
    level = (level or LOG_LEVEL).upper()
    log_file = LOG_FILE if log_file is None else log_file

    handlers = []
    if console_output:
        console_handler = RichHandler(console=console, show_path=False)
        console_handler.setFormatter(logging.Formatter("%(message)s"))
        console_handler.setLevel(level)
        handlers.append(console_handler)
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(
            jsonlogger.JsonFormatter("%(asctime)s %(name)s %(levelname)s %(message)s")
        )
        file_handler.setLevel(logging.DEBUG)
        handlers.append(file_handler)

    for name in _ROOT_LOGGERS:
        logger = logging.getLogger(name)
        logger.setLevel(logging.DEBUG if log_file else level)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()
        for handler in handlers:
            logger.addHandler(handler)
        logger.propagate = False
    return handlers


def print_rows(rows, file=None):
    """Writes already formatted CSV/JSON text to stdout (or the given stream)."""
    stream = file or sys.stdout
    stream.write(rows)
    stream.flush()


def render_table(rows, columns, title=None):
    """Human-readable rendering of report rows on stdout."""
    table = Table(title=title, show_lines=False)
    for column in columns:
        table.add_column(column, justify="right" if rows and isinstance(rows[0].get(column), (int, float)) else "left")
    for row in rows:
        table.add_row(*(f"{row.get(c):.6g}" if isinstance(row.get(c), float) else str(row.get(c, "")) for c in columns))
    Console().print(table)
