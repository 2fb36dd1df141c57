"""Point d'entrée de superloc."""

from __future__ import annotations

import logging
import sys
import threading
from typing import Sequence

from superloc import cli
from superloc.config import ConfigError, RunConfig

_DEFAULT_CONFIG = RunConfig()


def _init_logging(config: RunConfig | None = None) -> logging.Logger:
    logger = logging.getLogger("superloc")
    if logger.handlers:
        return logger
    logger.setLevel(logging.INFO)
    path = (config or _DEFAULT_CONFIG).log_path
    try:
        handler: logging.Handler = logging.FileHandler(path, encoding="utf-8")
    except OSError:
        handler = logging.NullHandler()
    formatter = logging.Formatter(
        fmt="%(asctime)s [%(levelname)s] %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    logger.info("superloc started")
    return logger


def _install_exception_hooks() -> None:
    def _handle_exception(exc_type, exc, tb) -> None:
        logger = _init_logging()
        logger.error("Unhandled exception", exc_info=(exc_type, exc, tb))
        sys.__excepthook__(exc_type, exc, tb)

    def _thread_exception(args: threading.ExceptHookArgs) -> None:
        _handle_exception(args.exc_type, args.exc_value, args.exc_traceback)

    sys.excepthook = _handle_exception
    threading.excepthook = _thread_exception


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = RunConfig.from_env()
    except ConfigError:
        config = None
    _init_logging(config)
    _install_exception_hooks()
    return cli.main(argv)


if __name__ == "__main__":
    raise SystemExit(main())
