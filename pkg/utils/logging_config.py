"""
Logging setup: rich console handler on stderr, optional plain file handler
"""
import logging
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler

from utils.config import config

_LEVELS = {0: None, 1: logging.INFO, 2: logging.DEBUG}


def setup_logging(verbosity: int = 0) -> None:
    """
    Configure the root logger

    Args:
        verbosity: 0 uses LOG_LEVEL, 1 forces INFO, 2+ forces DEBUG
    """
    level = _LEVELS.get(min(verbosity, 2)) or getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING)

    handlers = [RichHandler(console=Console(stderr=True), show_path=False, rich_tracebacks=True)]
    if config.LOG_FILE:
        log_path = Path(config.LOG_FILE)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_path, encoding='utf-8')
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        handlers.append(file_handler)

    logging.basicConfig(level=level, format='%(message)s', handlers=handlers, force=True)
