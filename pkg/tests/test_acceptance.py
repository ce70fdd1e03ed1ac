"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible under ``pytest -s`` or
``-rA``); tolerances are pinned here, not configurable.
"""

import filecmp
import math
import os
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from toneaudit.bias import (
    NeutralLexicon,
    PermutationConfig,
    SentimentDirection,
    ToneGroup,
    negative_probability,
    rnd,
    rnd_matrix,
    rnsb,
    train_sentiment_direction,
    weat,
)
from toneaudit.catalog import SkinTone, parse_emoji_test
from toneaudit.cli import cli
from toneaudit.resources import bundled_emoji_test, bundled_manifest
from toneaudit.similarity import GroundMetric, ground_matrix, wmd
from toneaudit.store import TokenSequence, load_dump, load_word2vec_text, coverage
from toneaudit.tokens import load_manifest, modifier_lengths, summarize

from conftest import dump_record, make_dump
from test_report import write_config
from test_similarity import TWO_FAMILY_LINES, transport_oracle
from test_tokens import skin_toned_manifest_ids


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def test_wmd_oracle_equivalence():
    with criterion("WMD oracle equivalence (500 instances, <10s)"):
        rng = np.random.default_rng(987654321)
        started = time.perf_counter()
        for index in range(500):
            m = int(rng.integers(1, 4))
            n = int(rng.integers(1, 4))
            d = int(rng.integers(2, 5))
            left = TokenSequence(rng.normal(size=(m, d)) + 0.5)
            right = TokenSequence(rng.normal(size=(n, d)) + 0.5)
            metric = GroundMetric.COSINE if index % 2 else GroundMetric.EUCLIDEAN
            costs = ground_matrix(metric, left.vectors, right.vectors)
            cost, plan = wmd(left, right, metric)
            expected = transport_oracle(costs)
            assert abs(cost - expected) <= 1e-9, (index, cost, expected)
            assert abs(plan.flows.sum(axis=1) - 1.0 / m).max() <= 1e-9
            assert abs(plan.flows.sum(axis=0) - 1.0 / n).max() <= 1e-9
        elapsed = time.perf_counter() - started
        assert elapsed < 10.0, f"took {elapsed:.2f}s"


def test_weat_hand_case_and_swap_antisymmetry():
    with criterion("WEAT hand case (statistic 2.0, effect 2.0) + 200 swap checks"):
        result = weat([[1.0, 0.0]], [[0.0, 1.0]], [[1.0, 0.0]], [[0.0, 1.0]])
        assert result.statistic == 2.0
        assert result.effect_size == 2.0
        rng = np.random.default_rng(20250101)
        for _ in range(200):
            n = int(rng.integers(1, 5))
            x = rng.normal(size=(n, 3)) + 0.25
            y = rng.normal(size=(n, 3)) + 0.25
            a = rng.normal(size=(int(rng.integers(1, 4)), 3)) + 0.25
            b = rng.normal(size=(int(rng.integers(1, 4)), 3)) + 0.25
            forward = weat(x, y, a, b)
            backward = weat(y, x, a, b)
            assert abs(forward.statistic + backward.statistic) <= 1e-12
            assert abs(forward.effect_size + backward.effect_size) <= 1e-12


def test_weat_p_value_monte_carlo_agreement():
    with criterion("WEAT Monte Carlo vs exhaustive p-values (3 SE)"):
        rng = np.random.default_rng(31337)
        samples = 10_000
        for trial in range(25):
            n = int(rng.integers(1, 6))
            x = rng.normal(size=(n, 3)) + 0.25
            y = rng.normal(size=(n, 3)) + 0.25
            a = rng.normal(size=(2, 3)) + 0.25
            b = rng.normal(size=(2, 3)) + 0.25
            exact = weat(x, y, a, b, PermutationConfig(seed=9, name=f"exact{trial}"))
            assert exact.exact
            sampled = weat(
                x, y, a, b,
                PermutationConfig(seed=9, samples=samples, exact_limit=0, name=f"mc{trial}"),
            )
            assert not sampled.exact and sampled.permutations == samples
            se = math.sqrt(exact.p_value * (1.0 - exact.p_value) / samples)
            # the sampled estimator carries +1 smoothing, which costs < 2/(N+1)
            assert abs(sampled.p_value - exact.p_value) <= 3.0 * se + 2.0 / (samples + 1)


def test_rnd_hand_case_and_matrix_antisymmetry():
    with criterion("RND 1-D hand case (-2), exact antisymmetry, matrix structure"):
        g1 = ToneGroup.from_vectors(SkinTone.LIGHT, [[1.0]], normalize=False)
        g2 = ToneGroup.from_vectors(SkinTone.DARK, [[3.0]], normalize=False)
        assert rnd([[0.0]], g1, g2) == -2.0

        rng = np.random.default_rng(555)
        for _ in range(100):
            neutral = rng.normal(size=(5, 3))
            a = ToneGroup.from_vectors(SkinTone.LIGHT, rng.normal(size=(3, 3)) + 0.2)
            b = ToneGroup.from_vectors(SkinTone.DARK, rng.normal(size=(2, 3)) + 0.2)
            assert rnd(neutral, a, b) == -rnd(neutral, b, a)

        catalog = parse_emoji_test(TWO_FAMILY_LINES)
        for seed in range(5):
            gen = np.random.default_rng(seed)
            records = [
                dump_record(seq.hex_id, gen.normal(size=3) + 0.3)
                for seq in catalog.sequences
            ]
            records.append(dump_record("w1", gen.normal(size=3) + 0.3, kind="text"))
            records.append(dump_record("w2", gen.normal(size=3) + 0.3, kind="text"))
            embeddings = load_dump(make_dump(3, records))
            lexicon = NeutralLexicon((("w1", 0.5), ("w2", 0.5)))
            matrix = rnd_matrix(catalog.families, embeddings, lexicon, embeddings)
            assert np.all(np.diag(matrix) == 0.0)
            for i in range(6):
                for j in range(6):
                    if np.isfinite(matrix[i, j]):
                        assert matrix[i, j] == -matrix[j, i]


def test_rnsb_criteria():
    with criterion("RNSB uniform KL, hand case 0.130812, separable training <1s"):
        direction = SentimentDirection(np.array([1.0]), 0.0, 0.1, 0.0)
        uniform = rnsb(direction, {f"t{i}": np.array([0.4]) for i in range(5)})
        assert abs(uniform.kl_divergence) <= 1e-12

        two = rnsb(
            direction,
            {"a": np.array([math.log(9.0)]), "b": np.array([math.log(3.0 / 7.0)])},
        )
        assert abs(two.kl_divergence - 0.130812) <= 1e-6

        rng = np.random.default_rng(7)
        negatives = rng.normal(size=(10, 4)) * 0.3 + np.array([2.5, 0, 0, 0])
        positives = rng.normal(size=(10, 4)) * 0.3 - np.array([2.5, 0, 0, 0])
        vectors = np.vstack([negatives, positives])
        labels = ["neg"] * 10 + ["pos"] * 10
        started = time.perf_counter()
        trained = train_sentiment_direction(vectors, labels, lambda_=0.1)
        elapsed = time.perf_counter() - started
        assert elapsed < 1.0, f"training took {elapsed:.3f}s"
        for vec, label in zip(vectors, labels):
            assert (negative_probability(trained, vec) > 0.5) == (label == "neg")


def test_tokenization_audit_reproduces_published_rows():
    with criterion("Tokenization fixtures: modifier rows exact + Gemma summary row"):
        expected_modifiers = {
            "gemma": (1, 1, 1, 1, 1),
            "qwen": (1, 1, 1, 1, 1),
            "llama": (3, 3, 3, 3, 3),
            "mistral": (2, 2, 2, 2, 5),
        }
        for model, expected in expected_modifiers.items():
            manifest = load_manifest(bundled_manifest(model).read_text())
            lengths = modifier_lengths(manifest)
            ordered = tuple(
                lengths[t] for t in SkinTone if t is not SkinTone.DEFAULT
            )
            assert ordered == expected, model

        gemma = load_manifest(bundled_manifest("gemma").read_text())
        stats = summarize(gemma, skin_toned_manifest_ids(gemma))
        assert abs(stats.mean - 3.96) <= 0.01
        assert (stats.min, stats.max) == (1, 9)
        assert stats.mode == 3


EMOJI2VEC_ENV = "EMOJI2VEC_TXT"


def _emoji2vec_path():
    candidates = [os.environ.get(EMOJI2VEC_ENV, "")]
    candidates.append(str(Path(__file__).parent.parent / "data" / "emoji2vec.txt"))
    for candidate in candidates:
        if candidate and Path(candidate).exists():
            return Path(candidate)
    return None


def test_emoji2vec_coverage_integration():
    path = _emoji2vec_path()
    if path is None:
        pytest.skip(
            f"emoji2vec release file not present (set ${EMOJI2VEC_ENV} or put it at data/emoji2vec.txt)"
        )
    with criterion("Coverage over the emoji2vec release file (1661 / 280)"):
        catalog = parse_emoji_test(bundled_emoji_test().read_text(encoding="utf-8"))
        embeddings = load_word2vec_text(path.read_text(encoding="utf-8"))
        report = coverage(embeddings, catalog)
        assert report.total_tokens == 1661
        assert report.skin_toned_supported == 280


def test_audit_runs_are_byte_identical(tmp_path, synthetic_dump_file):
    with criterion("Determinism: identical config+seed audits byte-identical"):
        config_path = write_config(
            tmp_path,
            synthetic_dump_file,
            analyses=[
                "coverage", "tokens", "align", "pairwise",
                "rnd", "weat_roles", "weat_caliskan", "rnsb",
            ],
            seed=31,
            manifests=[bundled_manifest(m) for m in ("gemma", "qwen", "llama", "mistral")],
            extra_options={"permutations": 400, "exact_limit": 50},
        )
        runner = CliRunner()
        first = tmp_path / "first"
        second = tmp_path / "second"
        for out_dir in (first, second):
            result = runner.invoke(
                cli, ["audit", "--config", str(config_path), "--out", str(out_dir)]
            )
            assert result.exit_code == 0, result.output
        names = sorted(path.name for path in first.iterdir())
        assert names == sorted(path.name for path in second.iterdir())
        match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
        assert mismatch == [] and errors == [], (mismatch, errors)
        assert "report.md" in names
