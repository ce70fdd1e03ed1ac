import filecmp
import json
import math
from pathlib import Path

import numpy as np
import pytest

from toneaudit.catalog import TONE_ORDER
from toneaudit.render import render_boxplot, render_heatmap
from toneaudit.report import (
    AuditConfig,
    ConfigValidationError,
    EmbeddingSource,
    Provenance,
    config_from_dict,
    csv_table,
    file_digest,
    load_catalog_file,
    load_config,
    run,
    run_coverage,
    write_report,
)
from toneaudit.resources import bundled_emoji_test, bundled_manifest
from toneaudit.store import coverage, load_dump

GOLDEN_DIR = Path(__file__).parent / "golden"

FIXTURE_MATRIX = np.array(
    [
        [0.0, 0.12, 0.34, 0.56, 0.78, 0.91],
        [0.12, 0.0, 0.22, 0.44, 0.66, 0.88],
        [0.34, 0.22, 0.0, 0.11, 0.33, 0.55],
        [0.56, 0.44, 0.11, 0.0, 0.21, 0.42],
        [0.78, 0.66, 0.33, 0.21, 0.0, 0.17],
        [0.91, 0.88, 0.55, 0.42, 0.17, 0.0],
    ]
)


def write_config(tmp_path, dump_file, analyses, seed=7, extra_options=None, manifests=None):
    config = {
        "data_file": str(bundled_emoji_test()),
        "embedding_sources": [
            {"path": str(dump_file), "format": "dump", "label": "toymodel"}
        ],
        "manifests": [str(m) for m in (manifests or [])],
        "analyses": analyses,
        "seed": seed,
        "output_dir": str(tmp_path / "out"),
        "options": extra_options or {},
    }
    path = tmp_path / "audit.json"
    path.write_text(json.dumps(config))
    return path


class TestConfig:
    def test_empty_analyses_rejected(self, tmp_path):
        with pytest.raises(ConfigValidationError, match="analyses"):
            config_from_dict(
                {"data_file": str(bundled_emoji_test()), "analyses": []}, tmp_path
            )

    def test_unknown_analysis_rejected(self, tmp_path):
        with pytest.raises(ConfigValidationError, match="unknown analyses"):
            config_from_dict(
                {"data_file": str(bundled_emoji_test()), "analyses": ["nope"]}, tmp_path
            )

    def test_missing_paths_reported(self, tmp_path):
        with pytest.raises(ConfigValidationError, match="missing input files"):
            config_from_dict(
                {
                    "data_file": str(tmp_path / "absent.txt"),
                    "analyses": ["coverage"],
                },
                tmp_path,
            )

    def test_relative_paths_resolve_against_config_dir(self, tmp_path, synthetic_dump_file):
        (tmp_path / "data.txt").write_text(bundled_emoji_test().read_text())
        config_path = tmp_path / "cfg.json"
        config_path.write_text(
            json.dumps({"data_file": "data.txt", "analyses": ["coverage"], "seed": 1})
        )
        config = load_config(config_path)
        assert config.data_file == tmp_path / "data.txt"


class TestRunners:
    def test_coverage_table_matches_direct_call(self, tmp_path, synthetic_dump_file, pinned_catalog):
        embedding_set = load_dump(synthetic_dump_file.read_text())
        direct = coverage(embedding_set, pinned_catalog)
        source = EmbeddingSource(synthetic_dump_file, "dump", "toymodel")
        provenance = Provenance(seed=7, inputs=())
        result = run_coverage(pinned_catalog, [(source, embedding_set)], provenance)
        lines = [
            line for line in result.tables["coverage.csv"].splitlines()
            if line and not line.startswith("#")
        ]
        row = lines[1].split(",")
        assert int(row[2]) == direct.total_tokens
        assert int(row[3]) == direct.emojis_supported
        assert int(row[4]) == direct.skin_toned_supported

    def test_full_run_emits_expected_files(self, tmp_path, synthetic_dump_file):
        config_path = write_config(
            tmp_path,
            synthetic_dump_file,
            analyses=[
                "coverage", "tokens", "align", "pairwise",
                "rnd", "weat_roles", "weat_caliskan", "rnsb",
            ],
            manifests=[bundled_manifest("gemma"), bundled_manifest("mistral")],
            extra_options={"permutations": 200, "exact_limit": 100},
        )
        report = run(load_config(config_path))
        assert report.errors == {}
        written = write_report(report, tmp_path / "out")
        names = {path.name for path in written}
        expected = {
            "coverage.csv", "tokens.csv", "modifiers.csv", "align.csv",
            "pairwise_toymodel.csv", "pairwise_toymodel.svg",
            "rnd_toymodel.csv", "rnd_toymodel.svg",
            "weat_roles.csv", "weat_roles_tests.csv",
            "weat_caliskan.csv", "weat_caliskan_tests.csv",
            "significance.csv", "rnsb.csv", "report.md",
        }
        assert expected <= names

    def test_every_figure_has_a_backing_table(self, tmp_path, synthetic_dump_file):
        config_path = write_config(
            tmp_path, synthetic_dump_file, analyses=["pairwise", "rnd"]
        )
        report = run(load_config(config_path))
        for result in report.per_analysis.values():
            for figure_name in result.figures:
                assert figure_name.replace(".svg", ".csv") in result.tables

    def test_analysis_errors_collected_not_raised(self, tmp_path):
        empty_dump = tmp_path / "empty.jsonl"
        empty_dump.write_text(json.dumps({"format_version": 1, "dimension": 3,
                                          "model_label": "empty",
                                          "representation": "final_hidden"}) + "\n")
        config_path = write_config(tmp_path, empty_dump, analyses=["coverage", "align"])
        report = run(load_config(config_path))
        assert "coverage" in report.per_analysis
        assert "align" in report.errors
        assert "align" not in report.per_analysis
        assert "FAILED" in report.report_md

    def test_provenance_header_present_in_every_table(self, tmp_path, synthetic_dump_file):
        config_path = write_config(
            tmp_path, synthetic_dump_file, analyses=["coverage", "pairwise"], seed=99
        )
        report = run(load_config(config_path))
        for result in report.per_analysis.values():
            for table in result.tables.values():
                first = table.splitlines()[0]
                assert first.startswith("# provenance tool=toneaudit-")
                assert "seed=99" in first
                assert "emoji-test-17.0.txt:" in first


class TestDeterminism:
    def test_identical_config_and_seed_byte_identical_directories(
        self, tmp_path, synthetic_dump_file
    ):
        config_path = write_config(
            tmp_path,
            synthetic_dump_file,
            analyses=["coverage", "tokens", "pairwise", "rnd", "weat_roles", "rnsb"],
            manifests=[bundled_manifest("gemma")],
            extra_options={"permutations": 150, "exact_limit": 0},
        )
        config = load_config(config_path)
        first_dir = tmp_path / "run1"
        second_dir = tmp_path / "run2"
        write_report(run(config), first_dir)
        write_report(run(config), second_dir)
        first_files = sorted(p.name for p in first_dir.iterdir())
        second_files = sorted(p.name for p in second_dir.iterdir())
        assert first_files == second_files
        match, mismatch, errors = filecmp.cmpfiles(
            first_dir, second_dir, first_files, shallow=False
        )
        assert mismatch == [] and errors == []

    def test_differing_seed_changes_only_p_value_columns(self, tmp_path, synthetic_dump_file):
        manifests = [bundled_manifest("gemma")]
        base = write_config(
            tmp_path, synthetic_dump_file,
            analyses=["coverage", "tokens", "pairwise"], seed=1, manifests=manifests,
        )
        report_one = run(load_config(base))
        other = write_config(
            tmp_path, synthetic_dump_file,
            analyses=["coverage", "tokens", "pairwise"], seed=2, manifests=manifests,
        )
        report_two = run(load_config(other))

        def strip_provenance(table):
            return "\n".join(
                line for line in table.splitlines() if not line.startswith("#")
            )

        for name in ("coverage", "tokens", "pairwise"):
            tables_one = report_one.per_analysis[name].tables
            tables_two = report_two.per_analysis[name].tables
            assert set(tables_one) == set(tables_two)
            for table_name in tables_one:
                assert strip_provenance(tables_one[table_name]) == strip_provenance(
                    tables_two[table_name]
                )


class TestCsvTable:
    def test_floats_round_trip(self):
        provenance = Provenance(seed=0, inputs=())
        table = csv_table(provenance, ["a"], [[0.1 + 0.2]])
        value = table.splitlines()[2]
        assert float(value) == 0.1 + 0.2

    def test_nan_renders_empty(self):
        provenance = Provenance(seed=0, inputs=())
        table = csv_table(provenance, ["a", "b"], [[float("nan"), 1]])
        assert table.splitlines()[2] == ",1"


class TestHeatmapRendering:
    def test_zero_matrix_uniform_with_zero_labels(self):
        svg = render_heatmap(np.zeros((6, 6)), [t.label for t in TONE_ORDER], "zeros")
        assert svg.count(">0.000<") == 36
        assert 'fill="#ffffff"' in svg

    def test_antisymmetric_matrix_uses_diverging_palette(self):
        matrix = np.array([[0.0, 0.5], [-0.5, 0.0]])
        svg = render_heatmap(matrix, ["a", "b"], "antisym")
        # red side for positive, blue side for negative
        assert 'fill="#bc3631"' in svg
        assert 'fill="#2a5aaf"' in svg

    def test_missing_cells_hatched(self):
        matrix = np.array([[0.0, math.nan], [math.nan, 0.0]])
        svg = render_heatmap(matrix, ["a", "b"], "gaps")
        assert svg.count('fill="url(#hatch)"') == 2

    def test_golden_fixture_render(self):
        svg = render_heatmap(
            FIXTURE_MATRIX, [t.label for t in TONE_ORDER], "fixture matrix"
        )
        golden = GOLDEN_DIR / "heatmap_fixture.svg"
        assert svg == golden.read_text(encoding="utf-8")

    def test_boxplot_contains_each_model(self):
        svg = render_boxplot({"alpha": (1, 2, 3, 4, 9), "beta": (2, 3, 5, 8, 13)})
        assert ">alpha<" in svg and ">beta<" in svg


class TestDigest:
    def test_digest_stable(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("payload")
        assert file_digest(path) == file_digest(path)
        assert len(file_digest(path)) == 16
