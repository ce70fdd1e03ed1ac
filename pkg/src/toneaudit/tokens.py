"""Token-cost audits: per-emoji statistics and modifier asymmetry findings."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Mapping

import numpy as np

from .catalog import MODIFIER_TONES, SkinTone, codepoints_to_hex


class AuditError(ValueError):
    """Raised for malformed manifests or missing entries."""


@dataclass(frozen=True)
class ManifestEntry:
    token_ids: tuple[int, ...]
    count: int

    def __post_init__(self):
        if self.count != len(self.token_ids):
            raise AuditError("entry count must equal token id list length")
        if self.count < 1:
            raise AuditError("entry count must be positive")


@dataclass(frozen=True)
class TokenManifest:
    model_label: str
    tokenizer_label: str
    entries: Mapping[str, ManifestEntry]

    def counts_for(self, ids: Iterable[str]) -> list[int]:
        counts = []
        for item_id in ids:
            entry = self.entries.get(item_id)
            if entry is None:
                raise AuditError(f"manifest {self.model_label!r} has no entry for {item_id!r}")
            counts.append(entry.count)
        return counts


@dataclass(frozen=True)
class TokenStats:
    mean: float
    min: int
    max: int
    mode: int
    mode_frequency: int
    quartiles: tuple[float, float, float]

    def __post_init__(self):
        q1, median, q3 = self.quartiles
        if not (self.min <= q1 <= median <= q3 <= self.max):
            raise AuditError("quartiles out of order")
        if not (self.min <= self.mode <= self.max):
            raise AuditError("mode outside range")


@dataclass(frozen=True)
class AsymmetryFinding:
    tone: SkinTone
    count: int
    min_count: int

    @property
    def ratio(self) -> float:
        return self.count / self.min_count


def _iter_lines(stream: str | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(stream, str):
        yield from stream.splitlines()
    else:
        for line in stream:
            yield line.rstrip("\n")


def load_manifest(stream: str | IO[str] | Iterable[str]) -> TokenManifest:
    """Load the line-delimited manifest format (header, then entries)."""
    lines = _iter_lines(stream)
    header_line = None
    for line in lines:
        if line.strip():
            header_line = line
            break
    if header_line is None:
        raise AuditError("empty manifest: missing header")
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise AuditError(f"malformed manifest header: {exc}")

    entries: dict[str, ManifestEntry] = {}
    for line_number, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise AuditError(f"line {line_number}: malformed entry: {exc}")
        item_id = obj.get("id")
        if not item_id:
            raise AuditError(f"line {line_number}: entry missing 'id'")
        token_ids = tuple(obj.get("token_ids", ()))
        count = obj.get("count", len(token_ids))
        try:
            entries[item_id] = ManifestEntry(token_ids, count)
        except AuditError as exc:
            raise AuditError(f"line {line_number}: {exc}")
    return TokenManifest(header.get("model_label", ""), header.get("tokenizer_label", ""), entries)


def write_manifest(manifest: TokenManifest, stream: IO[str]):
    header = {"model_label": manifest.model_label, "tokenizer_label": manifest.tokenizer_label}
    stream.write(json.dumps(header, separators=(",", ":")) + "\n")
    for item_id in sorted(manifest.entries):
        entry = manifest.entries[item_id]
        obj = {"id": item_id, "token_ids": list(entry.token_ids), "count": entry.count}
        stream.write(json.dumps(obj, separators=(",", ":")) + "\n")


def summarize(manifest: TokenManifest, ids: Iterable[str]) -> TokenStats:
    """Token-count statistics over exactly the requested ids.

    Mode ties break toward the smaller count. Quartiles use inclusive
    linear interpolation.
    """
    counts = manifest.counts_for(ids)
    if not counts:
        raise AuditError("no ids to summarize")
    arr = np.asarray(counts, dtype=np.float64)
    frequency = Counter(counts)
    best = max(frequency.values())
    mode = min(c for c, f in frequency.items() if f == best)
    q1, median, q3 = np.percentile(arr, [25, 50, 75], method="linear")
    return TokenStats(
        mean=float(arr.mean()),
        min=int(arr.min()),
        max=int(arr.max()),
        mode=mode,
        mode_frequency=best,
        quartiles=(float(q1), float(median), float(q3)),
    )


def modifier_lengths(manifest: TokenManifest) -> dict[SkinTone, int]:
    """Token counts for the five bare modifier codepoints."""
    lengths: dict[SkinTone, int] = {}
    for tone in MODIFIER_TONES:
        item_id = codepoints_to_hex([tone.codepoint])
        entry = manifest.entries.get(item_id)
        if entry is None:
            raise AuditError(
                f"manifest {manifest.model_label!r} has no entry for modifier {item_id}"
            )
        lengths[tone] = entry.count
    return lengths


def asymmetry_flags(lengths: Mapping[SkinTone, int]) -> list[AsymmetryFinding]:
    """One finding per tone costlier than the cheapest modifier."""
    missing = [t for t in MODIFIER_TONES if t not in lengths]
    if missing:
        raise AuditError(f"missing modifier counts for: {', '.join(t.label for t in missing)}")
    floor = min(lengths[t] for t in MODIFIER_TONES)
    return [
        AsymmetryFinding(tone, lengths[tone], floor)
        for tone in MODIFIER_TONES
        if lengths[tone] > floor
    ]
