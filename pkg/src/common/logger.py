import logging
import sys
from pathlib import Path

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(name, log_file=None, level=logging.INFO):
    """Attach console and (optionally) file handlers to a named logger once."""
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    formatter = logging.Formatter(LOG_FORMAT)

    # Console handler; stdout carries the human summary, so logs go to stderr
    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)

    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        logger.addHandler(stream_handler)
        if log_file is not None:
            log_path = Path(log_file)
            log_path.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_path)
            file_handler.setFormatter(formatter)
            logger.addHandler(file_handler)

    return logger
