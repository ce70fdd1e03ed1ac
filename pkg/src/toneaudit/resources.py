"""Bundled data files: the pinned emoji data file, word sets, and manifests."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path

PINNED_EMOJI_VERSION = "17.0"

MANIFEST_MODELS = ("gemma", "qwen", "llama", "mistral")


def data_path(*parts: str) -> Path:
    node = files("toneaudit")
    for part in ("data", *parts):
        node = node.joinpath(part)
    return Path(str(node))


def bundled_emoji_test() -> Path:
    return data_path(f"emoji-test-{PINNED_EMOJI_VERSION}.txt")


def bundled_attribute_sets() -> Path:
    return data_path("attribute_sets.json")


def bundled_vad_lexicon() -> Path:
    return data_path("vad_fixture.tsv")


def bundled_manifest(model: str) -> Path:
    if model not in MANIFEST_MODELS:
        raise ValueError(f"no bundled manifest for {model!r}; have {MANIFEST_MODELS}")
    return data_path("manifests", f"{model}.jsonl")
