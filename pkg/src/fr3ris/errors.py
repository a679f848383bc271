"""Error taxonomy shared across the package.

The CLI maps these onto distinct exit codes (config=2, numeric=3, I/O=4,
size=5); see cli.dispatch.
"""


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


class DimensionError(ValueError):
    """Array arguments with incompatible shapes."""


class NumericError(ValueError):
    """Non-finite values or inputs outside a numeric domain."""


class SizeError(ValueError):
    """Combinatorial instance larger than the configured cap."""
