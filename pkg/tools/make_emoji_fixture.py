"""Regenerate the pinned emoji data fixture bundled with the package.

Builds an emoji-test.txt-format file from two real upstream datasets:

  - emojibase-data (npm): CLDR short names, group/subgroup assignment,
    CLDR ordering, and emoji version per sequence.
  - emoji-datasource (npm): exact fully-qualified codepoint forms, used to
    recover the variation selectors that emojibase normalizes away.

Usage:
    npm pack emojibase-data emoji-datasource
    tar xzf emojibase-data-*.tgz  -C /tmp/eb
    tar xzf emoji-datasource-*.tgz -C /tmp/eds
    python tools/make_emoji_fixture.py \
        --emojibase /tmp/eb/package --datasource /tmp/eds/package \
        --version 17.0 --out src/toneaudit/data/emoji-test-17.0.txt

The output is committed; this script is not run at build or test time.
"""

from __future__ import annotations

import argparse
import itertools
import json
from pathlib import Path

FE0F = 0xFE0F
TONES = {0x1F3FB, 0x1F3FC, 0x1F3FD, 0x1F3FE, 0x1F3FF}

GROUP_DISPLAY = {
    "smileys-emotion": "Smileys & Emotion",
    "people-body": "People & Body",
    "component": "Component",
    "animals-nature": "Animals & Nature",
    "food-drink": "Food & Drink",
    "travel-places": "Travel & Places",
    "activities": "Activities",
    "objects": "Objects",
    "symbols": "Symbols",
    "flags": "Flags",
}
# emoji-test.txt lists groups in this order; emojibase numbers them differently.
GROUP_ORDER = [
    "smileys-emotion",
    "people-body",
    "component",
    "animals-nature",
    "food-drink",
    "travel-places",
    "activities",
    "objects",
    "symbols",
    "flags",
]


def parse_hex(hexcode: str) -> tuple[int, ...]:
    return tuple(int(part, 16) for part in hexcode.split("-"))


def fmt_cps(cps: tuple[int, ...]) -> str:
    return " ".join(f"{cp:04X}" for cp in cps)


def strip_fe0f(cps: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(cp for cp in cps if cp != FE0F)


def emoji_version(v) -> str:
    if v is None:
        return "E0.0"
    f = float(v)
    return f"E{f:g}" if f != int(f) else f"E{int(f)}.0"


def load_qualified_forms(datasource: Path) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Map FE0F-stripped codepoints -> exact fully-qualified codepoints."""
    out: dict[tuple[int, ...], tuple[int, ...]] = {}
    for entry in json.loads((datasource / "emoji.json").read_text()):
        unified = parse_hex(entry["unified"])
        out[strip_fe0f(unified)] = unified
        for skin in (entry.get("skin_variations") or {}).values():
            s = parse_hex(skin["unified"])
            out[strip_fe0f(s)] = s
    return out


def variant_lines(fq: tuple[int, ...]):
    """Yield (codepoints, status) for every FE0F-dropping combination.

    Drop combinations are ordered with the last selector toggling slowest,
    matching the upstream file. A combination is unqualified when the
    selector directly after the first character is dropped, otherwise
    minimally-qualified.
    """
    positions = [i for i, cp in enumerate(fq) if cp == FE0F]
    if not positions:
        return
    for keeps in itertools.product((True, False), repeat=len(positions)):
        keep_by_pos = dict(zip(positions, reversed(keeps)))
        if all(keep_by_pos.values()):
            continue
        cps = tuple(
            cp for i, cp in enumerate(fq) if cp != FE0F or keep_by_pos[i]
        )
        if 1 in keep_by_pos and not keep_by_pos[1]:
            status = "unqualified"
        else:
            status = "minimally-qualified"
        yield cps, status


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--emojibase", type=Path, required=True)
    ap.add_argument("--datasource", type=Path, required=True)
    ap.add_argument("--version", default="17.0")
    ap.add_argument("--out", type=Path, required=True)
    args = ap.parse_args()

    data = json.loads((args.emojibase / "en" / "data.json").read_text())
    meta = json.loads((args.emojibase / "meta" / "groups.json").read_text())
    groups = {int(k): v for k, v in meta["groups"].items()}
    subgroups = {int(k): v for k, v in meta["subgroups"].items()}
    hierarchy = {int(k): v for k, v in meta["hierarchy"].items()}
    qualified = load_qualified_forms(args.datasource)

    # (group_key, subgroup_key) -> list of (order, fq_cps, version, label)
    buckets: dict[tuple[str, str], list] = {}
    for entry in data:
        if "group" not in entry:  # bare regional indicators: not listed upstream
            continue
        seqs = [entry] + list(entry.get("skins", []))
        for seq in seqs:
            cps = parse_hex(seq["hexcode"])
            fq = qualified.get(strip_fe0f(cps), cps)
            key = (groups[entry["group"]], subgroups[seq.get("subgroup", entry["subgroup"])])
            buckets.setdefault(key, []).append(
                (seq.get("order", 0), fq, emoji_version(seq.get("version")), seq["label"])
            )

    lines: list[str] = []
    lines.append("# emoji-test.txt")
    lines.append(f"# Version: {args.version}")
    lines.append("#")
    lines.append("# Emoji Keyboard/Display Test Data for UTS #51")
    lines.append("# For documentation and usage, see https://www.unicode.org/reports/tr51")
    lines.append("#")
    lines.append("# Format: code points; status # emoji name")
    lines.append("#     code points: list of one or more hex code points, separated by spaces")
    lines.append("#     status: fully-qualified, minimally-qualified, unqualified, or component")
    lines.append("")

    def emit(cps: tuple[int, ...], status: str, version: str, label: str):
        glyph = "".join(chr(cp) for cp in cps)
        lines.append(
            f"{fmt_cps(cps):<54} ; {status:<20} # {glyph} {version} {label}"
        )

    total_by_status = {
        "fully-qualified": 0,
        "minimally-qualified": 0,
        "unqualified": 0,
        "component": 0,
    }
    for group_key in GROUP_ORDER:
        group_idx = next(i for i, name in groups.items() if name == group_key)
        lines.append(f"# group: {GROUP_DISPLAY[group_key]}")
        lines.append("")
        group_count = 0
        for sub_idx in hierarchy[group_idx]:
            sub_key = subgroups[sub_idx]
            bucket = buckets.get((group_key, sub_key))
            if not bucket:
                continue
            lines.append(f"# subgroup: {sub_key}")
            for _, fq, version, label in sorted(bucket, key=lambda item: item[0]):
                status = "component" if group_key == "component" else "fully-qualified"
                emit(fq, status, version, label)
                total_by_status[status] += 1
                group_count += 1
                if status == "fully-qualified":
                    for cps, vstatus in variant_lines(fq):
                        emit(cps, vstatus, version, label)
                        total_by_status[vstatus] += 1
            lines.append("")
        lines.append(f"# {GROUP_DISPLAY[group_key]} subtotal: {group_count}")
        lines.append("")

    lines.append("# Status Counts")
    for status, count in total_by_status.items():
        lines.append(f"# {status} : {count}")
    lines.append("")
    lines.append("#EOF")

    args.out.write_text("\n".join(lines) + "\n", encoding="utf-8")

    toned_fq = toned_multi = toned_any = 0
    for line in lines:
        if line.startswith("#") or not line.strip():
            continue
        cps = parse_hex(line.split(";")[0].strip().replace(" ", "-"))
        n = sum(1 for cp in cps if cp in TONES)
        status = line.split(";")[1].split("#")[0].strip()
        if n >= 1:
            toned_any += 1
            if status == "fully-qualified":
                if n == 1:
                    toned_fq += 1
                else:
                    toned_multi += 1
    print(f"wrote {args.out}")
    print(f"status counts: {total_by_status}")
    print(
        f"fully-qualified single-tone: {toned_fq}, multi-tone: {toned_multi}, "
        f"sum: {toned_fq + toned_multi}, toned lines any status: {toned_any}"
    )


if __name__ == "__main__":
    main()
