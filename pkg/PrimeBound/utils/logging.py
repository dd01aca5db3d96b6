import logging
import os
from logging.handlers import RotatingFileHandler

from rich.console import Console
from rich.logging import RichHandler

EVENTS_LEVEL_NUM = 38
DEFAULT_LOG_BACKUP_COUNT = 10
DEFAULT_EVENTS_RETENTION_SIZE = 64 * 1024 * 1024  # 64 MB

logging.addLevelName(EVENTS_LEVEL_NUM, "EVENT")

# One record per scan, threshold, root search and audit; silent until a file is attached.
events_logger = logging.getLogger("event")
events_logger.setLevel(EVENTS_LEVEL_NUM)
events_logger.propagate = False
events_logger.addHandler(logging.NullHandler())


def log_event(message: str) -> None:
    events_logger.log(EVENTS_LEVEL_NUM, message)


def setup_events_logger(full_path, events_retention_size):
    formatter = logging.Formatter(
        "%(asctime)s | %(levelname)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    file_handler = RotatingFileHandler(
        os.path.join(full_path, "events.log"),
        maxBytes=events_retention_size,
        backupCount=DEFAULT_LOG_BACKUP_COUNT,
    )
    file_handler.setFormatter(formatter)
    file_handler.setLevel(EVENTS_LEVEL_NUM)
    events_logger.addHandler(file_handler)

    return events_logger


def setup_logging(debug: bool = False, trace: bool = False) -> None:
    """Send PrimeBound logs to standard error; standard output carries only the report."""
    level = logging.WARNING
    if debug:
        level = logging.INFO
    if trace:
        level = logging.DEBUG

    handler = RichHandler(
        console=Console(stderr=True),
        show_path=trace,
        rich_tracebacks=trace,
    )
    handler.setFormatter(logging.Formatter("%(message)s"))

    logger = logging.getLogger("PrimeBound")
    for existing in list(logger.handlers):
        if isinstance(existing, RichHandler):
            logger.removeHandler(existing)
    logger.addHandler(handler)
    logger.setLevel(level)
