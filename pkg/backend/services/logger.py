"""
Structured Logging Service using structlog.

Colored console output for interactive runs, JSON lines otherwise. Log lines go
to stderr; stdout carries only command output (tables and records).
"""
import logging
import sys
from contextlib import contextmanager
from typing import IO, Iterator, Optional

import structlog

from config import Config

_HANDLER_NAME = "ffcodes-structlog"


def _render_algebra(_, __, event_dict):
    """Field specs, elements and matrices log as their text form."""
    for key, value in event_dict.items():
        if hasattr(value, "spec") and not isinstance(value, (str, bytes)):
            event_dict[key] = str(value) if not hasattr(value, "to_ints") else value.to_ints()
        elif type(value).__name__ == "FieldSpec":
            event_dict[key] = str(value)
    return event_dict


def configure_logger(log_format: Optional[str] = None, level: Optional[int] = None,
                     stream: Optional[IO[str]] = None):
    """Install the structlog pipeline on the root logger; safe to call again."""
    log_format = log_format or Config.LOG_FORMAT
    level = Config.LOG_LEVEL if level is None else level

    shared_processors = [
        structlog.contextvars.merge_contextvars,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        _render_algebra,
        structlog.processors.UnicodeDecoder(),
    ]

    renderer = (structlog.dev.ConsoleRenderer() if log_format == "console"
                else structlog.processors.JSONRenderer(sort_keys=True))

    structlog.configure(
        processors=shared_processors + [structlog.stdlib.ProcessorFormatter.wrap_for_formatter],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    handler = logging.StreamHandler(stream or sys.stderr)
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=shared_processors,
        processors=[structlog.stdlib.ProcessorFormatter.remove_processors_meta, renderer],
    ))

    root_logger = logging.getLogger()
    for existing in [h for h in root_logger.handlers if h.get_name() == _HANDLER_NAME]:
        root_logger.removeHandler(existing)
    root_logger.addHandler(handler)
    root_logger.setLevel(level)

    # numba compiles galois ufuncs and is chatty at debug level
    logging.getLogger("numba").setLevel(logging.WARNING)


def get_logger(name=None):
    """Get a structured logger."""
    return structlog.get_logger(name)


@contextmanager
def command_context(command: str, **fields) -> Iterator[None]:
    """Tag every log line emitted inside one CLI command."""
    with structlog.contextvars.bound_contextvars(command=command, **fields):
        yield


# Auto-configure on import
try:
    configure_logger()
except Exception as e:
    print(f"Logging config failed: {e}", file=sys.stderr)
