import logging
import sys

from nisqkit.core.config import settings

_configured = False


def configure_logging(level: str | None = None) -> None:
    """
    Configure the package logger once.

    Args:
        level: Log level name; defaults to settings.LOG_LEVEL.
    """
    global _configured
    root = logging.getLogger("nisqkit")
    root.setLevel((level or settings.LOG_LEVEL).upper())
    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
        root.propagate = False
        _configured = True


def get_logger(name: str) -> logging.Logger:
    """Return a module logger under the package namespace."""
    configure_logging()
    return logging.getLogger(name)
