"""Structured logging configuration."""
import logging
import os
import sys
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
PACKAGE_PREFIX = "src"

def get_logger(name: str, level: Optional[str] = None) -> logging.Logger:
    """Get a configured logger instance."""
    logger = logging.getLogger(name)

    if not logger.handlers:
        handler = logging.StreamHandler(sys.stdout)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
        logger.propagate = False

        logger.setLevel(_resolve_level(level))

    return logger

def configure_logging(level: str) -> None:
    """Apply a level to every logger already created by this package."""
    resolved = _resolve_level(level)
    for name, logger in logging.root.manager.loggerDict.items():
        if isinstance(logger, logging.Logger) and (
            name == PACKAGE_PREFIX or name.startswith(PACKAGE_PREFIX + ".") or name == "__main__"
        ):
            logger.setLevel(resolved)
    os.environ["LOG_LEVEL"] = level.upper()

def _resolve_level(level: Optional[str]) -> int:
    name = (level or os.getenv("LOG_LEVEL") or "INFO").upper()
    resolved = logging.getLevelName(name)
    return resolved if isinstance(resolved, int) else logging.INFO
