"""Embedding sets: word2vec text loading, dump loading, merge, and coverage.

All vectors are held at 64-bit precision regardless of the on-disk source.
Emoji identifiers are uppercase hex codepoints joined by '-', never raw
emoji characters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Iterator

import numpy as np

from .catalog import (
    FE0F,
    ZWJ,
    Catalog,
    codepoints_to_hex,
    hex_to_codepoints,
)

DUMP_FORMAT_VERSION = 1


class StoreError(ValueError):
    """Raised for malformed embedding inputs."""


class RecordKind(Enum):
    EMOJI = "emoji"
    TEXT = "text"


@dataclass(frozen=True)
class TokenSequence:
    """Per-token vectors for one item (the discrete representation)."""

    vectors: np.ndarray  # (m, d) float64
    token_ids: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] < 1:
            raise StoreError("token sequence needs at least one vector")
        if self.token_ids is not None and len(self.token_ids) != self.vectors.shape[0]:
            raise StoreError("token id count must match vector count")

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class EmbeddingRecord:
    id: str
    kind: RecordKind
    aggregated: np.ndarray  # (d,) float64
    discrete: TokenSequence | None = None
    text: str | None = None

    @property
    def sequence(self) -> TokenSequence:
        """Discrete representation; static records degrade to one token."""
        if self.discrete is not None:
            return self.discrete
        return TokenSequence(self.aggregated.reshape(1, -1))


@dataclass(frozen=True)
class CoverageReport:
    total_tokens: int
    emojis_supported: int
    skin_toned_supported: int

    def __post_init__(self):
        if not self.skin_toned_supported <= self.emojis_supported <= self.total_tokens:
            raise StoreError("coverage counts must be nested")


class EmbeddingSet:
    """Immutable id -> record map with a fixed dimension."""

    def __init__(self, dimension: int, records: dict[str, EmbeddingRecord], source_label: str = ""):
        if dimension <= 0:
            raise StoreError("dimension must be positive")
        for record in records.values():
            _check_vector(record.aggregated, dimension, record.id)
            if record.discrete is not None and record.discrete.dimension != dimension:
                raise StoreError(
                    f"record {record.id!r}: token vectors have dimension "
                    f"{record.discrete.dimension}, set dimension is {dimension}"
                )
        self.dimension = dimension
        self.records = records
        self.source_label = source_label

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self.records

    def get(self, record_id: str) -> EmbeddingRecord | None:
        return self.records.get(record_id)

    def resolve(self, record_id: str) -> EmbeddingRecord | None:
        """Lookup tolerant of variation-selector differences in emoji ids."""
        record = self.records.get(record_id)
        if record is not None:
            return record
        try:
            cps = hex_to_codepoints(record_id)
        except ValueError:
            return None
        stripped = codepoints_to_hex(cp for cp in cps if cp != FE0F)
        record = self.records.get(stripped)
        if record is not None:
            return record
        return self._fe0f_stripped_index().get(stripped)

    def _fe0f_stripped_index(self) -> dict[str, EmbeddingRecord]:
        index = getattr(self, "_stripped", None)
        if index is None:
            index = {}
            for record in self.records.values():
                if record.kind is not RecordKind.EMOJI:
                    continue
                try:
                    cps = hex_to_codepoints(record.id)
                except ValueError:
                    continue
                index.setdefault(codepoints_to_hex(cp for cp in cps if cp != FE0F), record)
            object.__setattr__(self, "_stripped", index)
        return index


def _check_vector(vec: np.ndarray, dimension: int, record_id: str):
    if vec.shape != (dimension,):
        raise StoreError(
            f"record {record_id!r}: vector has {vec.shape[0] if vec.ndim == 1 else vec.shape} "
            f"components, expected {dimension}"
        )
    if not np.all(np.isfinite(vec)):
        raise StoreError(f"record {record_id!r}: vector has non-finite components")


# Scalar ranges that may appear in emoji sequences. Keycap bases (#, *, 0-9)
# count only when the combining keycap U+20E3 is present in the same token.
_EMOJI_RANGES = (
    (0x1F000, 0x1FFFF),
    (0x2600, 0x27BF),
    (0x2190, 0x21FF),
    (0x2300, 0x23FF),
    (0x25A0, 0x25FF),
    (0x2B00, 0x2BFF),
    (0x2900, 0x297F),
    (0xE0020, 0xE007F),
)
_EMOJI_SINGLETONS = frozenset(
    {0x00A9, 0x00AE, 0x203C, 0x2049, 0x2122, 0x2139, 0x24C2, 0x3030, 0x303D, 0x3297, 0x3299,
     ZWJ, FE0F, 0x20E3, 0xFE0E}
)
_KEYCAP_BASES = frozenset({0x23, 0x2A} | set(range(0x30, 0x3A)))


def _is_emoji_scalar(cp: int, has_keycap: bool) -> bool:
    if cp in _EMOJI_SINGLETONS:
        return True
    if cp in _KEYCAP_BASES:
        return has_keycap
    return any(lo <= cp <= hi for lo, hi in _EMOJI_RANGES)


def is_emoji_token(token: str) -> bool:
    """True when every scalar of the token lies in an emoji range."""
    if not token:
        return False
    has_keycap = "⃣" in token
    return all(_is_emoji_scalar(ord(ch), has_keycap) for ch in token)


def _iter_lines(stream: str | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(stream, str):
        yield from stream.splitlines()
    else:
        for line in stream:
            yield line.rstrip("\n")


def load_word2vec_text(stream: str | IO[str] | Iterable[str], source_label: str = "") -> EmbeddingSet:
    """Load the whitespace-separated word2vec text format.

    The first line may be a ``count dim`` header. Emoji tokens are keyed by
    their hex codepoint id; word tokens by the token itself.
    """
    records: dict[str, EmbeddingRecord] = {}
    dimension: int | None = None
    first_data_line = True
    for line_number, line in enumerate(_iter_lines(stream), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if first_data_line and len(parts) == 2:
            try:
                int(parts[0]), int(parts[1])
            except ValueError:
                pass
            else:
                first_data_line = False
                continue
        first_data_line = False
        token, components = parts[0], parts[1:]
        if not components:
            raise StoreError(f"line {line_number}: no vector components")
        try:
            vec = np.array([float(c) for c in components], dtype=np.float64)
        except ValueError:
            raise StoreError(f"line {line_number}: non-numeric vector component")
        if dimension is None:
            dimension = len(vec)
        elif len(vec) != dimension:
            raise StoreError(
                f"line {line_number}: dimension {len(vec)} does not match {dimension}"
            )
        if not np.all(np.isfinite(vec)):
            raise StoreError(f"line {line_number}: non-finite vector component")
        if is_emoji_token(token):
            record_id = codepoints_to_hex(ord(ch) for ch in token)
            kind = RecordKind.EMOJI
        else:
            record_id, kind = token, RecordKind.TEXT
        records[record_id] = EmbeddingRecord(record_id, kind, vec)
    if dimension is None:
        raise StoreError("empty embedding file")
    return EmbeddingSet(dimension, records, source_label)


def load_dump(stream: str | IO[str] | Iterable[str], source_label: str = "") -> EmbeddingSet:
    """Load the line-delimited JSON dump format (header line, then records)."""
    lines = _iter_lines(stream)
    header_line = None
    for line in lines:
        if line.strip():
            header_line = line
            break
    if header_line is None:
        raise StoreError("empty dump: missing header")
    try:
        header = json.loads(header_line)
    except json.JSONDecodeError as exc:
        raise StoreError(f"malformed dump header: {exc}")
    dimension = header.get("dimension")
    if not isinstance(dimension, int) or dimension <= 0:
        raise StoreError("dump header needs a positive integer 'dimension'")
    label = source_label or header.get("model_label", "")

    records: dict[str, EmbeddingRecord] = {}
    for line_number, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise StoreError(f"line {line_number}: malformed record: {exc}")
        record = _record_from_json(obj, dimension, line_number)
        if record.id in records:
            raise StoreError(f"line {line_number}: duplicate record id {record.id!r}")
        records[record.id] = record
    return EmbeddingSet(dimension, records, label)


def _record_from_json(obj: dict, dimension: int, line_number: int) -> EmbeddingRecord:
    record_id = obj.get("id")
    if not record_id:
        raise StoreError(f"line {line_number}: record missing 'id'")
    if "aggregated" not in obj:
        raise StoreError(f"line {line_number}: record {record_id!r} missing aggregated vector")
    try:
        kind = RecordKind(obj.get("kind", "emoji"))
    except ValueError:
        raise StoreError(f"line {line_number}: unknown record kind {obj.get('kind')!r}")
    aggregated = np.asarray(obj["aggregated"], dtype=np.float64)
    if aggregated.shape != (dimension,):
        raise StoreError(
            f"line {line_number}: record {record_id!r} has dimension "
            f"{aggregated.shape}, header says {dimension}"
        )
    if not np.all(np.isfinite(aggregated)):
        raise StoreError(f"line {line_number}: record {record_id!r} has non-finite values")
    discrete = None
    if "tokens" in obj:
        token_vectors = obj["tokens"]
        if not token_vectors:
            raise StoreError(f"line {line_number}: record {record_id!r} has empty token list")
        matrix = np.asarray(token_vectors, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] != dimension:
            raise StoreError(
                f"line {line_number}: record {record_id!r} token vectors do not match "
                f"dimension {dimension}"
            )
        if not np.all(np.isfinite(matrix)):
            raise StoreError(f"line {line_number}: record {record_id!r} has non-finite values")
        token_ids = tuple(obj["token_ids"]) if obj.get("token_ids") is not None else None
        discrete = TokenSequence(matrix, token_ids)
    return EmbeddingRecord(record_id, kind, aggregated, discrete, obj.get("text"))


def write_dump(embedding_set: EmbeddingSet, stream: IO[str], representation: str = "final_hidden"):
    """Serialize in the canonical dump form; loading it back is byte-stable."""
    header = {
        "format_version": DUMP_FORMAT_VERSION,
        "dimension": embedding_set.dimension,
        "model_label": embedding_set.source_label,
        "representation": representation,
    }
    stream.write(json.dumps(header, separators=(",", ":")) + "\n")
    for record_id in sorted(embedding_set.records):
        record = embedding_set.records[record_id]
        obj: dict = {
            "id": record.id,
            "kind": record.kind.value,
            "aggregated": record.aggregated.tolist(),
        }
        if record.text is not None:
            obj["text"] = record.text
        if record.discrete is not None:
            if record.discrete.token_ids is not None:
                obj["token_ids"] = list(record.discrete.token_ids)
            obj["tokens"] = record.discrete.vectors.tolist()
        stream.write(json.dumps(obj, separators=(",", ":")) + "\n")


def coverage(embedding_set: EmbeddingSet, catalog: Catalog) -> CoverageReport:
    """Count catalog emoji and skin-toned emoji present in the set."""
    emojis = toned = 0
    for record in embedding_set.records.values():
        try:
            cps = hex_to_codepoints(record.id)
        except ValueError:
            continue
        if catalog.lookup(cps) is None:
            continue
        emojis += 1
        if catalog.classify(cps).is_skin_toned:
            toned += 1
    return CoverageReport(len(embedding_set), emojis, toned)


def merge(a: EmbeddingSet, b: EmbeddingSet) -> EmbeddingSet:
    """Union of two sets; identical duplicate vectors pass, conflicts raise."""
    if a.dimension != b.dimension:
        raise StoreError(
            f"cannot merge sets of dimension {a.dimension} and {b.dimension}"
        )
    records = dict(a.records)
    for record_id, record in b.records.items():
        existing = records.get(record_id)
        if existing is None:
            records[record_id] = record
            continue
        if not np.array_equal(existing.aggregated, record.aggregated):
            raise StoreError(
                f"merge collision on {record_id!r}: vectors differ"
            )
    label = " + ".join(part for part in (a.source_label, b.source_label) if part)
    return EmbeddingSet(a.dimension, records, label)
