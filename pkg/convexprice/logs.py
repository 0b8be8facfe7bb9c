"""structlog setup.

Log records go to stderr; stdout is reserved for command output.
"""

import logging
import sys

import structlog

_configured = False


def configure_logging(level: str = "WARNING", json_output: bool = False) -> None:
    """Configure structlog for the whole process.

    Args:
        level: Standard logging level name (``DEBUG``, ``INFO``, ...).
        json_output: Render one JSON object per line instead of the console format.
    """
    global _configured
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.WARNING

    renderer = structlog.processors.JSONRenderer() if json_output else structlog.dev.ConsoleRenderer(colors=False)
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )
    _configured = True


def get_logger(name: str) -> structlog.typing.FilteringBoundLogger:
    if not _configured:
        configure_logging()
    return structlog.get_logger(name)
