"""
Capacity regions of two-sender quantum multiple-access channels
"""

__version__ = "1.0.0"

from .errors import (
    ConfigurationError,
    DimensionCapError,
    LayoutError,
    NumericalError,
    QmacError,
    SpecFileError,
    ValidationError
)

from .settings import Settings, configure_logging, load_settings

__all__ = [
    '__version__',
    'ConfigurationError',
    'DimensionCapError',
    'LayoutError',
    'NumericalError',
    'QmacError',
    'SpecFileError',
    'ValidationError',
    'Settings',
    'configure_logging',
    'load_settings'
]
