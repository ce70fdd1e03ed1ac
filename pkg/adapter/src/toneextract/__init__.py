"""Model hidden-state and token-manifest extraction."""

__version__ = "0.1.0"
