from __future__ import annotations

__all__ = ["GuardError", "ConfigError"]


class GuardError(ValueError):
    """A size guard on an exponential-cost routine was exceeded."""


class ConfigError(ValueError):
    """An experiment configuration or input file is invalid."""
