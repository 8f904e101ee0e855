"""Exception taxonomy shared across the toolkit.

``ConfigError`` marks unusable configuration (bad values, missing files,
malformed JSON); ``DataError`` marks invalid data content (malformed rows,
duplicate keys, non-finite values, mismatched inputs).  The CLI maps them
to distinct exit codes.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Configuration file or parameter is unusable."""


class DataError(ValueError):
    """Data content failed validation."""
