"""Regenerate the bundled per-model token manifests.

The manifests are fixtures: token-count distributions constructed so that
the audit statistics reproduce each model family's published summary
(mean/range/mode over 2,735 skin-toned emojis, and the five bare modifier
costs). Token ids are synthesized deterministically; reproducing the exact
ids requires the extraction adapter against the real tokenizers.

Usage:
    python tools/make_manifests.py --out src/toneaudit/data/manifests
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from toneaudit.catalog import parse_emoji_test, Qualification
from toneaudit.resources import bundled_emoji_test

TARGET_POPULATION = 2735

# count value -> number of emojis at that count
DISTRIBUTIONS = {
    "gemma": {1: 100, 2: 329, 3: 893, 4: 500, 5: 400, 6: 321, 7: 100, 8: 60, 9: 32},
    "qwen": {1: 30, 2: 80, 3: 248, 4: 300, 5: 500, 6: 635, 7: 352, 8: 250, 9: 150,
             10: 90, 11: 50, 12: 30, 13: 20},
    "llama": {3: 21, 4: 40, 5: 80, 6: 214, 7: 180, 8: 249, 9: 350, 10: 550, 11: 350,
              12: 250, 13: 86, 14: 120, 15: 80, 16: 60, 17: 45, 18: 35, 19: 25},
    "mistral": {2: 40, 3: 120, 4: 10, 5: 360, 6: 490, 7: 287, 8: 230, 9: 160, 10: 120,
                11: 100, 12: 143, 13: 80, 14: 70, 15: 60, 16: 50, 17: 40, 18: 280,
                19: 25, 20: 20, 21: 15, 22: 10, 23: 8, 24: 7, 25: 5, 26: 5},
}

MODIFIER_COSTS = {
    "gemma": {"1F3FB": 1, "1F3FC": 1, "1F3FD": 1, "1F3FE": 1, "1F3FF": 1},
    "qwen": {"1F3FB": 1, "1F3FC": 1, "1F3FD": 1, "1F3FE": 1, "1F3FF": 1},
    "llama": {"1F3FB": 3, "1F3FC": 3, "1F3FD": 3, "1F3FE": 3, "1F3FF": 3},
    "mistral": {"1F3FB": 2, "1F3FC": 2, "1F3FD": 2, "1F3FE": 2, "1F3FF": 5},
}

TOKENIZERS = {
    "gemma": "gemma-sentencepiece",
    "qwen": "qwen-bpe",
    "llama": "llama-bpe",
    "mistral": "mistral-bpe",
}


def toned_ids() -> list[str]:
    catalog = parse_emoji_test(bundled_emoji_test().read_text(encoding="utf-8"))
    fq, mq = [], []
    for seq in catalog.sequences:
        if not seq.tones:
            continue
        if seq.qualification is Qualification.FULLY_QUALIFIED:
            fq.append(seq.hex_id)
        elif seq.qualification is Qualification.MINIMALLY_QUALIFIED:
            mq.append(seq.hex_id)
    ids = fq + mq[: TARGET_POPULATION - len(fq)]
    if len(ids) != TARGET_POPULATION:
        raise SystemExit(f"expected {TARGET_POPULATION} toned ids, found {len(ids)}")
    return ids


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    ids = toned_ids()
    for model, dist in DISTRIBUTIONS.items():
        counts = [c for c, n in sorted(dist.items()) for _ in range(n)]
        if len(counts) != TARGET_POPULATION:
            raise SystemExit(f"{model}: distribution covers {len(counts)} emojis")
        rng = np.random.default_rng(_seed(model))
        order = rng.permutation(TARGET_POPULATION)
        path = args.out / f"{model}.jsonl"
        with path.open("w", encoding="utf-8") as fh:
            header = {"model_label": model, "tokenizer_label": TOKENIZERS[model]}
            fh.write(json.dumps(header, separators=(",", ":")) + "\n")
            for mod_id, cost in MODIFIER_COSTS[model].items():
                token_ids = [int(v) for v in rng.integers(3, 256_000, size=cost)]
                entry = {"id": mod_id, "token_ids": token_ids, "count": cost}
                fh.write(json.dumps(entry, separators=(",", ":")) + "\n")
            for position, item_id in enumerate(ids):
                count = counts[order[position]]
                token_ids = [int(v) for v in rng.integers(3, 256_000, size=count)]
                entry = {"id": item_id, "token_ids": token_ids, "count": count}
                fh.write(json.dumps(entry, separators=(",", ":")) + "\n")
        total = sum(c * n for c, n in dist.items())
        print(f"{model}: mean {total / TARGET_POPULATION:.5f}, "
              f"range {min(dist)}-{max(dist)}, mode {max(dist, key=dist.get)} "
              f"({max(dist.values())} emojis) -> {path}")


def _seed(model: str) -> int:
    return sum(ord(ch) * 31**i for i, ch in enumerate(model)) % (2**32)


if __name__ == "__main__":
    main()
