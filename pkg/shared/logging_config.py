import logging
import logging.handlers
from pathlib import Path
from typing import Optional, Union


def setup_file_logging(
    service_name: str,
    log_level: int = logging.INFO,
    file_log_level: int = logging.DEBUG,
    max_bytes: int = 5 * 1024 * 1024,
    backup_count: int = 5,
    log_dir: Union[str, Path] = "logs",
) -> Optional[Path]:
    """
    Configure logging to write to both console (stderr) and a rotating file.

    Args:
        service_name: Name used for the log file (e.g. 'ldpc-fl')
        log_level: Console logging level (default: INFO)
        file_log_level: File logging level (default: DEBUG)
        max_bytes: Maximum size of each log file before rotation
        backup_count: Number of backup files to keep
        log_dir: Directory to store log files

    Returns:
        Path to the log file if successful, None otherwise
    """
    file_formatter = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    console_formatter = logging.Formatter(
        "%(asctime)s - %(levelname)s - %(message)s", datefmt="%H:%M:%S"
    )

    root_logger = logging.getLogger()
    root_logger.setLevel(min(log_level, file_log_level))
    root_logger.handlers.clear()

    # stdout carries JSON/CSV results, so the console handler writes to stderr
    console_handler = logging.StreamHandler()
    console_handler.setLevel(log_level)
    console_handler.setFormatter(console_formatter)
    root_logger.addHandler(console_handler)

    log_path = Path(log_dir)
    log_filename = log_path / f"{service_name}.log"
    try:
        log_path.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_filename, maxBytes=max_bytes, backupCount=backup_count
        )
        file_handler.setLevel(file_log_level)
        file_handler.setFormatter(file_formatter)
        root_logger.addHandler(file_handler)

        logging.debug(f"{service_name} logging initialized. Log file: {log_filename}")
        return log_filename
    except OSError as e:
        logging.error(f"Failed to setup file logging: {e}")
        return None


def level_from_name(name: str) -> int:
    """Translate a level name such as 'info' into its logging constant."""
    level = logging.getLevelName(name.upper())
    if not isinstance(level, int):
        raise ValueError(f"unknown log level: {name}")
    return level
