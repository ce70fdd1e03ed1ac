import io
import json

import numpy as np
import pytest

from toneaudit.catalog import parse_emoji_test
from toneaudit.resources import bundled_emoji_test
from toneaudit.store import load_dump


RAISED_FIST_LINES = """\
# group: People & Body
# subgroup: hand-fingers-closed
270A                                                   ; fully-qualified      # ✊ E0.6 raised fist
270A 1F3FB                                             ; fully-qualified      # ✊\U0001f3fb E1.0 raised fist: light skin tone
270A 1F3FC                                             ; fully-qualified      # ✊\U0001f3fc E1.0 raised fist: medium-light skin tone
270A 1F3FD                                             ; fully-qualified      # ✊\U0001f3fd E1.0 raised fist: medium skin tone
270A 1F3FE                                             ; fully-qualified      # ✊\U0001f3fe E1.0 raised fist: medium-dark skin tone
270A 1F3FF                                             ; fully-qualified      # ✊\U0001f3ff E1.0 raised fist: dark skin tone
"""


@pytest.fixture(scope="session")
def pinned_catalog():
    return parse_emoji_test(bundled_emoji_test().read_text(encoding="utf-8"))


@pytest.fixture()
def raised_fist_catalog():
    return parse_emoji_test(RAISED_FIST_LINES)


def make_dump(dimension, records, model_label="toy"):
    """Serialize records into dump text. records: list of dicts."""
    header = {
        "format_version": 1,
        "dimension": dimension,
        "model_label": model_label,
        "representation": "final_hidden",
    }
    lines = [json.dumps(header)]
    for record in records:
        lines.append(json.dumps(record))
    return "\n".join(lines) + "\n"


def dump_record(record_id, aggregated, tokens=None, token_ids=None, kind="emoji", text=None):
    obj = {"id": record_id, "kind": kind, "aggregated": list(map(float, aggregated))}
    if text is not None:
        obj["text"] = text
    if tokens is not None:
        obj["tokens"] = [list(map(float, row)) for row in tokens]
        if token_ids is not None:
            obj["token_ids"] = list(token_ids)
    return obj


HAND_SUBGROUPS = (
    "hand-fingers-open",
    "hand-fingers-partial",
    "hand-single-finger",
    "hand-fingers-closed",
    "hands",
)


def synthetic_model_dump(catalog, seed=0, dimension=8, model_label="toymodel"):
    """Dump text for a fake model covering the analyses end to end.

    Emoji records (aggregated + discrete) for every hand-gesture and
    person-role variant, text records for their names, the bundled
    attribute emoji/words, and the neutral lexicon words.
    """
    import numpy as np

    from toneaudit.bias import filter_neutral, load_vad
    from toneaudit.resources import bundled_attribute_sets, bundled_vad_lexicon
    from toneaudit.sets import load_attribute_sets

    rng = np.random.default_rng(seed)

    def vec():
        return rng.normal(size=dimension) + 0.25

    records = []
    seen = set()

    def add(record_id, kind="emoji", tokens=None, token_ids=None, text=None):
        if record_id in seen:
            return
        seen.add(record_id)
        aggregated = vec()
        if tokens is None:
            length = int(rng.integers(1, 4))
            tokens = [vec() for _ in range(length)]
            token_ids = [int(t) for t in rng.integers(3, 50_000, size=length)]
        records.append(
            dump_record(record_id, aggregated, tokens=tokens, token_ids=token_ids,
                        kind=kind, text=text)
        )

    families = []
    for subgroup in HAND_SUBGROUPS + ("person-role",):
        families.extend(catalog.subset(subgroup=subgroup).families)
    for family in families:
        for seq in family.variants.values():
            add(seq.hex_id)
            add(seq.name, kind="text", text=seq.name)

    sets_cfg = load_attribute_sets(bundled_attribute_sets())
    for item in sets_cfg.good_emoji + sets_cfg.bad_emoji:
        add(item)
    for name, a_ids, b_ids in sets_cfg.benchmarks:
        for word in a_ids + b_ids:
            add(word, kind="text", text=word)
    lexicon = filter_neutral(load_vad(bundled_vad_lexicon().read_text()), 0.48, 0.52)
    for word in lexicon.words:
        add(word, kind="text", text=word)

    return make_dump(dimension, records, model_label=model_label)


@pytest.fixture(scope="session")
def synthetic_dump_text(pinned_catalog):
    return synthetic_model_dump(pinned_catalog, seed=424242)


@pytest.fixture(scope="session")
def synthetic_dump_file(tmp_path_factory, synthetic_dump_text):
    path = tmp_path_factory.mktemp("dumps") / "toymodel.jsonl"
    path.write_text(synthetic_dump_text, encoding="utf-8")
    return path


@pytest.fixture()
def toy_dump_set():
    """Two raised-fist variants plus their descriptions, d=3."""
    records = [
        dump_record("270A", [1.0, 0.0, 0.0], tokens=[[1.0, 0.0, 0.0]], token_ids=[7]),
        dump_record(
            "270A-1F3FF",
            [0.0, 1.0, 0.0],
            tokens=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            token_ids=[7, 9],
        ),
        dump_record("raised fist", [1.0, 0.0, 0.0], tokens=[[1.0, 0.0, 0.0]],
                    token_ids=[3], kind="text", text="raised fist"),
        dump_record("raised fist: dark skin tone", [0.0, 1.0, 0.0],
                    tokens=[[0.0, 1.0, 0.0]], token_ids=[4], kind="text",
                    text="raised fist: dark skin tone"),
    ]
    return load_dump(make_dump(3, records))
