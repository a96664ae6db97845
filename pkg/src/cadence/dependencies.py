# src/cadence/dependencies.py
from __future__ import annotations

import logging
from typing import Any, Optional

logger = logging.getLogger(__name__)

# Track availability of optional dependencies
_rich_available: Optional[bool] = None
_typer_available: Optional[bool] = None


def check_rich() -> bool:
    """Check if rich is available for CLI formatting."""
    global _rich_available
    if _rich_available is None:
        try:
            import rich  # noqa: F401

            _rich_available = True
        except ImportError:
            _rich_available = False
            logger.debug("rich not available - basic formatting will be used")
    return _rich_available


def check_typer() -> bool:
    """Check if typer is available for the bench CLI."""
    global _typer_available
    if _typer_available is None:
        try:
            import typer  # noqa: F401

            _typer_available = True
        except ImportError:
            _typer_available = False
            logger.warning("typer not available - the cadence command will not start")
    return _typer_available


class BasicConsole:
    """Fallback console-like object."""

    def print(self, *args: Any, **kwargs: Any) -> None:
        print(*args)


def get_console() -> Any:
    """Get rich console or fallback to basic print."""
    if check_rich():
        from rich.console import Console

        return Console(highlight=False)
    return BasicConsole()


def install_log_handler(level: str = "INFO") -> None:
    """Route logging through rich when available, plain stderr otherwise."""
    handlers: list[logging.Handler]
    if check_rich():
        from rich.console import Console
        from rich.logging import RichHandler

        handlers = [RichHandler(console=Console(stderr=True), show_path=False)]
        fmt = "%(message)s"
    else:
        handlers = [logging.StreamHandler()]
        fmt = "%(levelname)s %(name)s: %(message)s"
    logging.basicConfig(level=level.upper(), format=fmt, datefmt="[%X]", handlers=handlers)
