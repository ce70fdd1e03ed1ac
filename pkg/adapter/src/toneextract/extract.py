"""Hidden-state extraction: per-item final-layer states and token manifests.

For each item the model runs on the standalone payload; the dump records
the full per-token hidden-state sequence (mandatory prefix tokens such as
BOS excluded, but noted per record) and the final token's hidden state as
the aggregated vector. States are serialized at full 64-bit round-trip
precision regardless of inference precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import torch

FORMAT_VERSION = 1

MODIFIER_CODEPOINTS = (0x1F3FB, 0x1F3FC, 0x1F3FD, 0x1F3FE, 0x1F3FF)


class JobError(RuntimeError):
    """Raised when the job as a whole cannot run (bad items, model load)."""


@dataclass(frozen=True)
class Item:
    id: str
    payload: str
    kind: str = "emoji"  # "emoji" | "text"

    def __post_init__(self):
        if not self.id:
            raise JobError("item needs an id")
        if not self.payload:
            raise JobError(f"item {self.id!r} has an empty payload")
        if self.kind not in ("emoji", "text"):
            raise JobError(f"item {self.id!r} has unknown kind {self.kind!r}")


@dataclass(frozen=True)
class ExtractionJob:
    model_id: str
    items: tuple[Item, ...]
    dump_path: Path
    manifest_path: Path
    precision: str = "full"  # "full" | "half-upconverted"

    def __post_init__(self):
        if not self.items:
            raise JobError("job needs at least one item")
        ids = [item.id for item in self.items]
        if len(set(ids)) != len(ids):
            raise JobError("item ids must be unique")


@dataclass
class ExtractionReport:
    written: int = 0
    skipped: dict[str, str] = field(default_factory=dict)


def load_items(path: str | Path) -> tuple[Item, ...]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise JobError("items file must contain a JSON list")
    return tuple(Item(obj["id"], obj["payload"], obj.get("kind", "emoji")) for obj in raw)


def load_model(model_id: str):
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise JobError(f"cannot load model {model_id!r}: {exc}")
    return tokenizer, model


def _encode(tokenizer, payload: str) -> tuple[list[int], int]:
    """Token ids with special tokens, plus the mandatory prefix length.

    The prefix is whatever the tokenizer prepends beyond the payload's own
    tokens (BOS and friends); suffix specials would break the final-token
    aggregation, so they are rejected.
    """
    with_special = tokenizer(payload, add_special_tokens=True)["input_ids"]
    bare = tokenizer(payload, add_special_tokens=False)["input_ids"]
    if len(bare) == 0:
        return [], 0
    prefix = len(with_special) - len(bare)
    if prefix < 0 or with_special[prefix:] != bare:
        raise JobError(
            "tokenizer adds non-prefix special tokens; final-token aggregation "
            "would not represent the payload"
        )
    return with_special, prefix


def run_extraction(job: ExtractionJob, tokenizer=None, model=None) -> ExtractionReport:
    """Run the model over every item and write the dump and manifest."""
    if tokenizer is None or model is None:
        tokenizer, model = load_model(job.model_id)
    model.eval()

    dimension = int(model.config.hidden_size)
    records: dict[str, dict] = {}
    manifest_entries: dict[str, dict] = {}
    report = ExtractionReport()

    with torch.no_grad():
        for item in job.items:  # sequential, batch size 1: reproducibility first
            token_ids, prefix = _encode(tokenizer, item.payload)
            if not token_ids:
                report.skipped[item.id] = "tokenizer produced zero tokens"
                continue
            output = model(input_ids=torch.tensor([token_ids]))
            hidden = output.last_hidden_state[0].double()
            discrete = hidden[prefix:]
            aggregated = hidden[-1]
            payload_ids = token_ids[prefix:]
            record = {
                "id": item.id,
                "kind": item.kind,
                "aggregated": aggregated.tolist(),
                "token_ids": payload_ids,
                "tokens": discrete.tolist(),
            }
            if item.kind == "text":
                record["text"] = item.payload
            if prefix:
                record["prefix_token_ids"] = token_ids[:prefix]
            records[item.id] = record
            manifest_entries[item.id] = {
                "id": item.id,
                "token_ids": payload_ids,
                "count": len(payload_ids),
            }
            report.written += 1

    if not records:
        raise JobError("every item was skipped; nothing to write")

    header = {
        "format_version": FORMAT_VERSION,
        "dimension": dimension,
        "model_label": job.model_id,
        "representation": "final_hidden",
        "precision": job.precision,
    }
    _write_jsonl(job.dump_path, header, records)

    manifest_header = {
        "model_label": job.model_id,
        "tokenizer_label": getattr(tokenizer, "name_or_path", "") or job.model_id,
    }
    _write_jsonl(job.manifest_path, manifest_header, manifest_entries)
    return report


def _write_jsonl(path: Path, header: dict, records: dict[str, dict]):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for key in sorted(records):
            fh.write(json.dumps(records[key], separators=(",", ":")) + "\n")


def modifier_items() -> tuple[Item, ...]:
    return tuple(
        Item(f"{cp:04X}", chr(cp), "emoji") for cp in MODIFIER_CODEPOINTS
    )


def emit_modifier_manifest(
    model_id: str, manifest_path: Path, tokenizer=None
) -> dict[str, int]:
    """Manifest holding exactly the five bare tone modifiers."""
    if tokenizer is None:
        from transformers import AutoTokenizer

        try:
            tokenizer = AutoTokenizer.from_pretrained(model_id)
        except Exception as exc:
            raise JobError(f"cannot load tokenizer {model_id!r}: {exc}")

    entries: dict[str, dict] = {}
    counts: dict[str, int] = {}
    for item in modifier_items():
        token_ids, prefix = _encode(tokenizer, item.payload)
        payload_ids = token_ids[prefix:]
        if not payload_ids:
            raise JobError(f"tokenizer produced zero tokens for modifier {item.id}")
        entries[item.id] = {"id": item.id, "token_ids": payload_ids, "count": len(payload_ids)}
        counts[item.id] = len(payload_ids)
    header = {
        "model_label": model_id,
        "tokenizer_label": getattr(tokenizer, "name_or_path", "") or model_id,
    }
    _write_jsonl(Path(manifest_path), header, entries)
    return counts
