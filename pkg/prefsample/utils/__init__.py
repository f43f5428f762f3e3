"""
prefsample.utils - Utility modules for the prefsample library
"""

from .logger import get_logger, setup_logging, LogLevel, get_default_logger, current_level

__all__ = ["get_logger", "setup_logging", "LogLevel", "get_default_logger", "current_level"]
