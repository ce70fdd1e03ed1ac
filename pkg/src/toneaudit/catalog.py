"""Unicode emoji catalog: parsing, tone classification, and family grouping.

Parses the upstream ``emoji-test.txt`` data file, classifies every sequence
by skin-tone content, and groups fully-qualified sequences into families
(a base emoji plus its single-tone variants).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping

FE0F = 0xFE0F
ZWJ = 0x200D

_TONE_RANGE = range(0x1F3FB, 0x1F400)


class SkinTone(Enum):
    """The six tone categories: the unmodified base plus the five modifiers."""

    DEFAULT = None
    LIGHT = 0x1F3FB
    MEDIUM_LIGHT = 0x1F3FC
    MEDIUM = 0x1F3FD
    MEDIUM_DARK = 0x1F3FE
    DARK = 0x1F3FF

    @property
    def codepoint(self) -> int | None:
        return self.value

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def from_codepoint(cls, cp: int) -> "SkinTone":
        tone = _TONE_BY_CODEPOINT.get(cp)
        if tone is None:
            raise ValueError(f"U+{cp:04X} is not a skin tone modifier")
        return tone

    @classmethod
    def from_label(cls, label: str) -> "SkinTone":
        for tone in cls:
            if tone.label == label:
                return tone
        raise ValueError(f"unknown skin tone label {label!r}")


_TONE_BY_CODEPOINT = {t.value: t for t in SkinTone if t.value is not None}

TONE_ORDER: tuple[SkinTone, ...] = tuple(SkinTone)
MODIFIER_TONES: tuple[SkinTone, ...] = tuple(t for t in SkinTone if t is not SkinTone.DEFAULT)
TONE_CODEPOINTS = frozenset(_TONE_BY_CODEPOINT)


class Qualification(Enum):
    FULLY_QUALIFIED = "fully-qualified"
    MINIMALLY_QUALIFIED = "minimally-qualified"
    UNQUALIFIED = "unqualified"
    COMPONENT = "component"


_QUALIFICATION_BY_TOKEN = {q.value: q for q in Qualification}


class ParseError(ValueError):
    """Raised when the emoji data file violates the line grammar."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class UnknownGroupError(ValueError):
    """Raised when a subset filter names a group/subgroup absent from the data."""


def codepoints_to_hex(codepoints: Iterable[int]) -> str:
    return "-".join(f"{cp:04X}" for cp in codepoints)


def hex_to_codepoints(hex_id: str) -> tuple[int, ...]:
    try:
        return tuple(int(part, 16) for part in hex_id.split("-"))
    except ValueError as exc:
        raise ValueError(f"malformed codepoint id {hex_id!r}") from exc


def tones_in(codepoints: Iterable[int]) -> tuple[SkinTone, ...]:
    """Tone modifiers present, in sequence order (duplicates preserved)."""
    return tuple(_TONE_BY_CODEPOINT[cp] for cp in codepoints if cp in TONE_CODEPOINTS)


def base_of(codepoints: Iterable[int]) -> tuple[int, ...]:
    """Strip tone modifiers and variation selectors; idempotent."""
    return tuple(cp for cp in codepoints if cp not in TONE_CODEPOINTS and cp != FE0F)


@dataclass(frozen=True)
class EmojiSequence:
    codepoints: tuple[int, ...]
    qualification: Qualification
    name: str
    group: str = ""
    subgroup: str = ""

    def __post_init__(self):
        if not self.codepoints:
            raise ValueError("emoji sequence needs at least one codepoint")
        if not self.name and self.qualification is not Qualification.COMPONENT:
            raise ValueError("non-component sequence needs a name")

    @property
    def hex_id(self) -> str:
        return codepoints_to_hex(self.codepoints)

    @property
    def emoji(self) -> str:
        return "".join(chr(cp) for cp in self.codepoints)

    @property
    def tones(self) -> tuple[SkinTone, ...]:
        return tones_in(self.codepoints)


class ToneKind(Enum):
    NON_MODIFIABLE = "non-modifiable"
    DEFAULT_OF_MODIFIABLE = "default-of-modifiable"
    TONED = "toned"
    MULTI_TONE = "multi-tone"


@dataclass(frozen=True)
class ToneClassification:
    kind: ToneKind
    tones: tuple[SkinTone, ...] = ()

    def __post_init__(self):
        if self.kind is ToneKind.TONED and len(self.tones) != 1:
            raise ValueError("TONED carries exactly one tone")
        if self.kind is ToneKind.MULTI_TONE and len(self.tones) < 2:
            raise ValueError("MULTI_TONE carries at least two tones")

    @property
    def is_skin_toned(self) -> bool:
        return self.kind in (ToneKind.TONED, ToneKind.MULTI_TONE)


@dataclass(frozen=True)
class EmojiFamily:
    """A modifiable base emoji and its single-tone variants.

    ``variants`` maps DEFAULT to the base itself. Mixed- and uniform-pair
    tone sequences (two modifiers) have no slot here and stay catalog-only.
    """

    base: EmojiSequence
    variants: Mapping[SkinTone, EmojiSequence]

    def __post_init__(self):
        non_default = [t for t in self.variants if t is not SkinTone.DEFAULT]
        if not 1 <= len(non_default) <= 5:
            raise ValueError("family needs 1..5 non-default variants")
        base_key = base_of(self.base.codepoints)
        for tone, seq in self.variants.items():
            if tone is SkinTone.DEFAULT:
                continue
            if base_of(seq.codepoints) != base_key:
                raise ValueError(
                    f"variant {seq.hex_id} does not reduce to base {self.base.hex_id}"
                )

    @property
    def key(self) -> tuple[int, ...]:
        return base_of(self.base.codepoints)

    def variant(self, tone: SkinTone) -> EmojiSequence | None:
        return self.variants.get(tone)


@dataclass
class Catalog:
    sequences: list[EmojiSequence]
    families: list[EmojiFamily]
    unicode_version: str = ""
    _by_codepoints: dict[tuple[int, ...], EmojiSequence] = field(repr=False, default_factory=dict)
    _family_keys: frozenset[tuple[int, ...]] = field(repr=False, default_factory=frozenset)
    _groups: tuple[str, ...] = ()
    _subgroups: tuple[str, ...] = ()

    def __post_init__(self):
        if not self._by_codepoints:
            self._by_codepoints = {}
            for seq in self.sequences:
                self._by_codepoints.setdefault(seq.codepoints, seq)
        self._family_keys = frozenset(f.key for f in self.families)
        if not self._groups:
            seen_g: dict[str, None] = {}
            seen_s: dict[str, None] = {}
            for seq in self.sequences:
                if seq.group:
                    seen_g.setdefault(seq.group)
                if seq.subgroup:
                    seen_s.setdefault(seq.subgroup)
            self._groups = tuple(seen_g)
            self._subgroups = tuple(seen_s)

    @property
    def groups(self) -> tuple[str, ...]:
        return self._groups

    @property
    def subgroups(self) -> tuple[str, ...]:
        return self._subgroups

    def lookup(self, codepoints: Iterable[int]) -> EmojiSequence | None:
        return self._by_codepoints.get(tuple(codepoints))

    def classify(self, codepoints: Iterable[int]) -> ToneClassification:
        """Classify a sequence by its tone content.

        TONED/MULTI_TONE depend only on the codepoints; the base split into
        DEFAULT_OF_MODIFIABLE vs NON_MODIFIABLE consults the family index.
        """
        cps = tuple(codepoints)
        if not cps:
            raise ValueError("cannot classify an empty sequence")
        tones = tones_in(cps)
        if len(tones) == 1:
            return ToneClassification(ToneKind.TONED, tones)
        if len(tones) >= 2:
            return ToneClassification(ToneKind.MULTI_TONE, tones)
        if base_of(cps) in self._family_keys:
            return ToneClassification(ToneKind.DEFAULT_OF_MODIFIABLE)
        return ToneClassification(ToneKind.NON_MODIFIABLE)

    def subset(
        self,
        group: str | None = None,
        subgroup: str | None = None,
        predicate: Callable[[EmojiSequence], bool] | None = None,
    ) -> "Catalog":
        """Catalog restricted to families whose base matches the filter.

        Sequences are filtered by the same group/subgroup criteria so the
        returned catalog is self-consistent.
        """
        if group is not None and group not in self._groups:
            raise UnknownGroupError(
                f"unknown group {group!r}; valid groups: {', '.join(self._groups)}"
            )
        if subgroup is not None and subgroup not in self._subgroups:
            raise UnknownGroupError(
                f"unknown subgroup {subgroup!r}; valid subgroups: {', '.join(self._subgroups)}"
            )

        def matches(seq: EmojiSequence) -> bool:
            if group is not None and seq.group != group:
                return False
            if subgroup is not None and seq.subgroup != subgroup:
                return False
            if predicate is not None and not predicate(seq):
                return False
            return True

        sequences = [s for s in self.sequences if matches(s)]
        families = [f for f in self.families if matches(f.base)]
        return Catalog(sequences, families, self.unicode_version)

    def tone_counts(self) -> dict[str, int]:
        """Skin-tone census under the catalog's pinned data version."""
        single = multi = 0
        single_any = multi_any = 0
        for seq in self.sequences:
            n = len(seq.tones)
            if n == 0:
                continue
            if seq.qualification is Qualification.FULLY_QUALIFIED:
                if n == 1:
                    single += 1
                else:
                    multi += 1
            if n == 1:
                single_any += 1
            else:
                multi_any += 1
        return {
            "single_tone_fully_qualified": single,
            "multi_tone_fully_qualified": multi,
            "toned_fully_qualified": single + multi,
            "toned_any_status": single_any + multi_any,
            "families": len(self.families),
        }

    def to_json_dict(self) -> dict:
        return {
            "unicode_version": self.unicode_version,
            "counts": self.tone_counts(),
            "sequences": [
                {
                    "codepoints": seq.hex_id,
                    "qualification": seq.qualification.value,
                    "name": seq.name,
                    "group": seq.group,
                    "subgroup": seq.subgroup,
                }
                for seq in self.sequences
            ],
            "families": [
                {
                    "base": family.base.hex_id,
                    "variants": {
                        tone.label: seq.hex_id
                        for tone, seq in family.variants.items()
                        if tone is not SkinTone.DEFAULT
                    },
                }
                for family in self.families
            ],
        }


def _parse_line(line_number: int, line: str, group: str, subgroup: str) -> EmojiSequence:
    head, _, comment = line.partition("#")
    cp_field, sep, status_field = head.partition(";")
    if not sep:
        raise ParseError(line_number, "missing ';' status separator")
    try:
        codepoints = tuple(int(tok, 16) for tok in cp_field.split())
    except ValueError:
        raise ParseError(line_number, f"malformed codepoint field {cp_field.strip()!r}")
    if not codepoints:
        raise ParseError(line_number, "empty codepoint field")
    status_token = status_field.strip()
    qualification = _QUALIFICATION_BY_TOKEN.get(status_token)
    if qualification is None:
        raise ParseError(line_number, f"unknown status token {status_token!r}")
    name = _name_from_comment(comment.strip())
    try:
        return EmojiSequence(codepoints, qualification, name, group, subgroup)
    except ValueError as exc:
        raise ParseError(line_number, str(exc))


def _name_from_comment(comment: str) -> str:
    # Comment shape: "<emoji> E<version> <name>"; the emoji glyph may contain
    # spaces-free codepoints only, so split around the E-version token.
    parts = comment.split()
    for i, token in enumerate(parts):
        if len(token) > 1 and token[0] == "E" and token[1].isdigit():
            return " ".join(parts[i + 1 :])
    # Old-style files without an E-version: everything after the glyph.
    return " ".join(parts[1:]) if len(parts) > 1 else ""


def parse_emoji_test(source: str | Iterable[str], version: str = "") -> Catalog:
    """Parse emoji-test.txt content into a catalog.

    ``source`` is the full text or an iterable of lines. ``version``
    overrides the version recorded in the file header, if any.
    """
    if isinstance(source, str):
        lines = source.splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]

    sequences: list[EmojiSequence] = []
    group = subgroup = ""
    file_version = ""
    seen_fq: dict[tuple[int, ...], int] = {}

    for line_number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("group:"):
                group = body[len("group:") :].strip()
                subgroup = ""
            elif body.startswith("subgroup:"):
                subgroup = body[len("subgroup:") :].strip()
            elif body.startswith("Version:") and not file_version:
                file_version = body[len("Version:") :].strip()
            continue
        seq = _parse_line(line_number, line, group, subgroup)
        if seq.qualification is Qualification.FULLY_QUALIFIED:
            previous = seen_fq.get(seq.codepoints)
            if previous is not None:
                raise ParseError(
                    line_number,
                    f"duplicate fully-qualified sequence {seq.hex_id} (first at line {previous})",
                )
            seen_fq[seq.codepoints] = line_number
        sequences.append(seq)

    families = _assemble_families(sequences)
    return Catalog(sequences, families, version or file_version)


def _assemble_families(sequences: list[EmojiSequence]) -> list[EmojiFamily]:
    """Group fully-qualified sequences into base+variant families.

    Only fully-qualified sequences participate; qualification duplicates
    stay in the catalog for lookup but never join a family.
    """
    by_key: dict[tuple[int, ...], list[EmojiSequence]] = {}
    order: list[tuple[int, ...]] = []
    for seq in sequences:
        if seq.qualification is not Qualification.FULLY_QUALIFIED:
            continue
        key = base_of(seq.codepoints)
        if key not in by_key:
            by_key[key] = []
            order.append(key)
        by_key[key].append(seq)

    families: list[EmojiFamily] = []
    for key in order:
        members = by_key[key]
        base = next((s for s in members if not s.tones), None)
        if base is None:
            continue
        variants: dict[SkinTone, EmojiSequence] = {SkinTone.DEFAULT: base}
        for seq in members:
            tones = seq.tones
            if len(tones) == 1:
                variants[tones[0]] = seq
        if len(variants) > 1:
            families.append(EmojiFamily(base, variants))
    return families
