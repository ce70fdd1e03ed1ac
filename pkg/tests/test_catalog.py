import pytest
from hypothesis import given, strategies as st

from toneaudit.catalog import (
    Catalog,
    ParseError,
    Qualification,
    SkinTone,
    ToneKind,
    UnknownGroupError,
    base_of,
    codepoints_to_hex,
    hex_to_codepoints,
    parse_emoji_test,
    tones_in,
)

from conftest import RAISED_FIST_LINES


class TestSkinTone:
    def test_exactly_six_variants(self):
        assert len(SkinTone) == 6

    def test_modifiers_map_onto_ascending_codepoints(self):
        modifiers = [t for t in SkinTone if t is not SkinTone.DEFAULT]
        assert [t.codepoint for t in modifiers] == [0x1F3FB, 0x1F3FC, 0x1F3FD, 0x1F3FE, 0x1F3FF]

    def test_default_has_no_codepoint(self):
        assert SkinTone.DEFAULT.codepoint is None

    def test_from_codepoint_rejects_non_modifiers(self):
        with pytest.raises(ValueError):
            SkinTone.from_codepoint(0x270A)


class TestParsing:
    def test_single_line(self):
        catalog = parse_emoji_test(
            "270A ; fully-qualified # ✊ E0.6 raised fist"
        )
        (seq,) = catalog.sequences
        assert seq.codepoints == (0x270A,)
        assert seq.qualification is Qualification.FULLY_QUALIFIED
        assert seq.name == "raised fist"

    def test_empty_input(self):
        catalog = parse_emoji_test("")
        assert catalog.sequences == []
        assert catalog.families == []

    def test_raised_fist_family_assembly(self, raised_fist_catalog):
        assert len(raised_fist_catalog.sequences) == 6
        (family,) = raised_fist_catalog.families
        assert family.base.codepoints == (0x270A,)
        non_default = {t: s for t, s in family.variants.items() if t is not SkinTone.DEFAULT}
        assert len(non_default) == 5
        assert non_default[SkinTone.DARK].codepoints == (0x270A, 0x1F3FF)
        assert family.variants[SkinTone.DEFAULT] is family.base

    def test_group_subgroup_headers(self, raised_fist_catalog):
        seq = raised_fist_catalog.sequences[0]
        assert seq.group == "People & Body"
        assert seq.subgroup == "hand-fingers-closed"

    def test_malformed_codepoint_field_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_emoji_test("270A ; fully-qualified # x E0.6 ok\nZZZZ ; fully-qualified # y E0.6 bad")

    def test_unknown_status_token(self):
        with pytest.raises(ParseError, match="status"):
            parse_emoji_test("270A ; nonsense-status # ✊ E0.6 raised fist")

    def test_duplicate_fully_qualified_rejected(self):
        text = RAISED_FIST_LINES + "270A ; fully-qualified # ✊ E0.6 raised fist\n"
        with pytest.raises(ParseError, match="duplicate"):
            parse_emoji_test(text)


class TestClassification:
    def test_toned_dark(self, raised_fist_catalog):
        result = raised_fist_catalog.classify([0x270A, 0x1F3FF])
        assert result.kind is ToneKind.TONED
        assert result.tones == (SkinTone.DARK,)

    def test_base_of_known_family_is_default_of_modifiable(self, raised_fist_catalog):
        result = raised_fist_catalog.classify([0x270A])
        assert result.kind is ToneKind.DEFAULT_OF_MODIFIABLE

    def test_unknown_base_is_non_modifiable(self, raised_fist_catalog):
        result = raised_fist_catalog.classify([0x1F600])
        assert result.kind is ToneKind.NON_MODIFIABLE

    def test_two_modifier_sequence_from_data_file(self, pinned_catalog):
        # mixed-tone handshake: light + dark
        target = None
        for seq in pinned_catalog.sequences:
            cps = seq.codepoints
            if 0x1F3FB in cps and 0x1F3FF in cps and len(tones_in(cps)) == 2:
                target = seq
                break
        assert target is not None, "data file should contain a two-modifier sequence"
        result = pinned_catalog.classify(target.codepoints)
        assert result.kind is ToneKind.MULTI_TONE
        assert result.tones == (SkinTone.LIGHT, SkinTone.DARK)


class TestBaseOf:
    def test_strips_single_modifier(self):
        assert base_of([0x270A, 0x1F3FD]) == (0x270A,)

    def test_idempotent(self):
        assert base_of([0x270A]) == (0x270A,)
        assert base_of(base_of([0x270A, 0x1F3FD])) == (0x270A,)

    def test_zwj_sequence_reduces_to_data_file_base(self, pinned_catalog):
        toned = next(
            seq
            for seq in pinned_catalog.sequences
            if seq.name == "woman cook: medium skin tone"
        )
        base = next(seq for seq in pinned_catalog.sequences if seq.name == "woman cook")
        assert base_of(toned.codepoints) == base_of(base.codepoints)
        assert base_of(toned.codepoints) == (0x1F469, 0x200D, 0x1F373)


class TestSubset:
    def test_person_role_family_count_matches_pinned_snapshot(self, pinned_catalog):
        roles = pinned_catalog.subset(subgroup="person-role")
        assert len(roles.families) == 82

    def test_filter_matching_nothing(self, pinned_catalog):
        empty = pinned_catalog.subset(group="Flags", subgroup="country-flag")
        assert empty.families == []

    def test_unknown_subgroup_lists_valid_names(self, pinned_catalog):
        with pytest.raises(UnknownGroupError, match="person-role"):
            pinned_catalog.subset(subgroup="person-rolez")

    def test_hand_gesture_count_matches_recount(self, pinned_catalog):
        hand_subgroups = (
            "hand-fingers-open",
            "hand-fingers-partial",
            "hand-single-finger",
            "hand-fingers-closed",
            "hands",
        )
        total = sum(len(pinned_catalog.subset(subgroup=s).families) for s in hand_subgroups)

        # independent recount: fully-qualified bases in those subgroups that
        # have at least one single-tone variant anywhere in the file
        toned_keys = {
            base_of(seq.codepoints)
            for seq in pinned_catalog.sequences
            if seq.qualification is Qualification.FULLY_QUALIFIED and len(seq.tones) == 1
        }
        bases = {
            base_of(seq.codepoints)
            for seq in pinned_catalog.sequences
            if seq.subgroup in hand_subgroups
            and seq.qualification is Qualification.FULLY_QUALIFIED
            and not seq.tones
            and base_of(seq.codepoints) in toned_keys
        }
        assert total == len(bases)


class TestInvariants:
    def test_classify_of_base_is_never_toned(self, pinned_catalog):
        for seq in pinned_catalog.sequences:
            if not seq.tones or seq.qualification is Qualification.COMPONENT:
                continue
            base = base_of(seq.codepoints)
            assert not pinned_catalog.classify(base).is_skin_toned

    def test_family_completeness(self, pinned_catalog):
        single_tone_by_key = {}
        for seq in pinned_catalog.sequences:
            if seq.qualification is Qualification.FULLY_QUALIFIED and len(seq.tones) == 1:
                single_tone_by_key.setdefault(base_of(seq.codepoints), set()).add(seq.codepoints)
        for family in pinned_catalog.families:
            non_default = [t for t in family.variants if t is not SkinTone.DEFAULT]
            assert len(non_default) == len(single_tone_by_key[family.key])

    def test_parse_total_over_bundled_fixture(self, pinned_catalog):
        # pinned counts for the bundled 17.0 snapshot
        counts = pinned_catalog.tone_counts()
        assert counts["single_tone_fully_qualified"] == 1615
        assert counts["multi_tone_fully_qualified"] == 415
        assert counts["toned_any_status"] == 2910
        assert counts["families"] == 323
        assert pinned_catalog.unicode_version == "17.0"

    def test_every_family_has_one_to_five_variants(self, pinned_catalog):
        for family in pinned_catalog.families:
            non_default = [t for t in family.variants if t is not SkinTone.DEFAULT]
            assert 1 <= len(non_default) <= 5


class TestHexIds:
    @given(st.lists(st.integers(min_value=1, max_value=0x10FFFF), min_size=1, max_size=8))
    def test_hex_round_trip(self, cps):
        assert hex_to_codepoints(codepoints_to_hex(cps)) == tuple(cps)

    def test_malformed_hex_rejected(self):
        with pytest.raises(ValueError):
            hex_to_codepoints("270A-XYZ")
