"""Skin-tone bias audit toolkit for emoji embeddings and tokenizers."""

__version__ = "0.1.0"
