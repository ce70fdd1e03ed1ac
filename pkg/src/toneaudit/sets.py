"""Attribute/target set configuration: named word or emoji id sets."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence


class SetsError(ValueError):
    """Raised for malformed set configuration files."""


@dataclass(frozen=True)
class AttributeSets:
    sets: dict[str, tuple[str, ...]]
    benchmarks: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...]
    good_emoji: tuple[str, ...]
    bad_emoji: tuple[str, ...]
    positive_seeds: tuple[str, ...]
    negative_seeds: tuple[str, ...]

    def set_named(self, name: str) -> tuple[str, ...]:
        if name not in self.sets:
            raise SetsError(f"unknown set {name!r}; have: {', '.join(sorted(self.sets))}")
        return self.sets[name]


def load_attribute_sets(path: str | Path) -> AttributeSets:
    return parse_attribute_sets(Path(path).read_text(encoding="utf-8"))


def parse_attribute_sets(text: str) -> AttributeSets:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SetsError(f"malformed sets file: {exc}")

    raw_sets = obj.get("sets")
    if not isinstance(raw_sets, dict) or not raw_sets:
        raise SetsError("sets file needs a non-empty 'sets' object")
    sets = {name: tuple(members) for name, members in raw_sets.items()}
    for name, members in sets.items():
        if not members:
            raise SetsError(f"set {name!r} is empty")

    def named(name: str) -> tuple[str, ...]:
        if name not in sets:
            raise SetsError(f"reference to unknown set {name!r}")
        return sets[name]

    benchmarks = []
    for bench in obj.get("benchmarks", []):
        benchmarks.append((bench["name"], named(bench["a"]), named(bench["b"])))

    emoji_attr = obj.get("emoji_attributes", {})
    good = named(emoji_attr["good"]) if "good" in emoji_attr else ()
    bad = named(emoji_attr["bad"]) if "bad" in emoji_attr else ()

    seeds = obj.get("sentiment_seeds", {})
    positive = named(seeds["positive"]) if "positive" in seeds else good
    negative = named(seeds["negative"]) if "negative" in seeds else bad

    return AttributeSets(sets, tuple(benchmarks), good, bad, positive, negative)
