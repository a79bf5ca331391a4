"""
Logging utility for the MBT extinction solver.
Configures logging for the command-line application.
"""
import logging
import os
from datetime import datetime
from logging.handlers import RotatingFileHandler

from .config import LOG_DIR, LOG_LEVEL, LOG_TO_FILE

PACKAGE_LOGGER = 'src'


def setup_logger(level: str = LOG_LEVEL, log_to_file: bool = LOG_TO_FILE) -> logging.Logger:
    """Configure and return the package logger; safe to call more than once."""
    logger = logging.getLogger(PACKAGE_LOGGER)
    if logger.handlers:
        return logger

    logger.setLevel(logging.DEBUG)
    logger.propagate = False

    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    # Console goes to stderr; stdout carries command output only
    console_handler = logging.StreamHandler()
    console_handler.setLevel(getattr(logging, level, logging.INFO))
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if not log_to_file:
        return logger

    try:
        os.makedirs(LOG_DIR, exist_ok=True)
    except OSError as e:
        logger.warning(f"Cannot create log directory {LOG_DIR}: {e}")
        return logger

    stamp = datetime.now().strftime("%Y%m%d")

    debug_handler = RotatingFileHandler(
        os.path.join(LOG_DIR, f'qve_debug_{stamp}.log'),
        maxBytes=10485760,  # 10MB
        backupCount=5
    )
    debug_handler.setLevel(logging.DEBUG)
    debug_handler.setFormatter(formatter)

    error_handler = RotatingFileHandler(
        os.path.join(LOG_DIR, f'qve_error_{stamp}.log'),
        maxBytes=10485760,  # 10MB
        backupCount=5
    )
    error_handler.setLevel(logging.ERROR)
    error_handler.setFormatter(formatter)

    logger.addHandler(debug_handler)
    logger.addHandler(error_handler)

    return logger
