"""
Shared configuration, logging, errors and output helpers.

Every analysis, optimization and simulation module reads its numerical
settings from here and raises the exceptions defined in ``shared.errors``.
"""

from .config import Settings, get_settings, load_settings
from .console_utils import ConsoleFormatter
from .errors import ConfigError, LdpcError

__all__ = [
    # Configuration
    "Settings",
    "get_settings",
    "load_settings",
    # Errors
    "ConfigError",
    "LdpcError",
    # Utilities
    "ConsoleFormatter",
]
