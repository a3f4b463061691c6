"""Logging configuration for GKZ period computations."""

import logging
import os
import sys
from pathlib import Path
from typing import Optional, Union

LOG_LEVEL_ENV = "GKZ_LOG_LEVEL"


def resolve_level(level: Optional[Union[int, str]] = None) -> int:
    """
    Resolve a logging level from an argument or the environment.

    Args:
        level: Explicit level (int or name); falls back to $GKZ_LOG_LEVEL, then WARNING

    Returns:
        Numeric logging level
    """
    if level is None:
        level = os.environ.get(LOG_LEVEL_ENV, "WARNING")
    if isinstance(level, str):
        numeric = logging.getLevelName(level.upper())
        return numeric if isinstance(numeric, int) else logging.WARNING
    return level


def setup_logger(
    name: str,
    log_file: Optional[Path] = None,
    level: Optional[Union[int, str]] = None,
    console: bool = True,
) -> logging.Logger:
    """
    Configure and return a logger instance.

    Console output goes to stderr; stdout carries JSON reports only.

    Args:
        name: Logger name (typically __name__ or the package name)
        log_file: Optional path to log file
        level: Logging level (default: $GKZ_LOG_LEVEL or WARNING)
        console: Whether to log to console (default: True)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    numeric_level = resolve_level(level)
    logger.setLevel(numeric_level)

    # Remove existing handlers to avoid duplicates
    logger.handlers.clear()

    formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(numeric_level)
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger
