"""qtwins entry point: logging setup and the command-line interface."""

import logging
from pathlib import Path

from config import settings

LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"

logger = logging.getLogger(__name__)


def setup_logging(level: str | int | None = None, log_file: Path | None = None):
    """Configure the root logger with console output and an optional log file.

    Handlers installed by an earlier call are replaced, so commands may call
    this once per invocation.
    """
    level = level or settings.log_level
    log_file = log_file or settings.log_file
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())

    root_logger = logging.getLogger()
    for handler in [h for h in root_logger.handlers if getattr(h, "_qtwins", False)]:
        root_logger.removeHandler(handler)
        handler.close()
    root_logger.setLevel(level)

    # Console handler
    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    console_handler._qtwins = True
    root_logger.addHandler(console_handler)

    # File handler
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler._qtwins = True
        root_logger.addHandler(file_handler)


def main():
    from cli import cli

    cli()


if __name__ == "__main__":
    main()
