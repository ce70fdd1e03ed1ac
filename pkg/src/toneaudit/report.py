"""End-to-end audit runs: config parsing, analysis runners, CSV/SVG payloads.

Every table carries a provenance header row (tool version, input digests,
seed); figures never carry numbers that are absent from the tables.
Identical config, seed, and input files produce byte-identical payloads.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import __version__
from .bias import (
    PermutationConfig,
    filter_neutral,
    load_vad,
    mean_effect_sizes,
    ordered_tone_pairs,
    rnd_matrix,
    rnsb,
    resolve_ids,
    significance_rates,
    train_sentiment_direction,
    weat_role_suite,
    weat_tone_target_suite,
)
from .catalog import Catalog, SkinTone, TONE_ORDER, parse_emoji_test
from .render import render_boxplot, render_heatmap
from .resources import bundled_attribute_sets, bundled_vad_lexicon
from .sets import AttributeSets, load_attribute_sets
from .similarity import alignment_table, tone_pair_matrix
from .store import EmbeddingSet, coverage, load_dump, load_word2vec_text, merge
from .tokens import (
    TokenManifest,
    asymmetry_flags,
    load_manifest,
    modifier_lengths,
    summarize,
)

ANALYSES = (
    "coverage",
    "tokens",
    "align",
    "pairwise",
    "rnd",
    "weat_roles",
    "weat_caliskan",
    "rnsb",
)

HAND_SUBGROUPS = (
    "hand-fingers-open",
    "hand-fingers-partial",
    "hand-single-finger",
    "hand-fingers-closed",
    "hands",
)

MODIFIER_HEX_IDS = ("1F3FB", "1F3FC", "1F3FD", "1F3FE", "1F3FF")

TONE_LABELS = tuple(t.label for t in TONE_ORDER)


class ConfigValidationError(ValueError):
    """Raised when an audit config is malformed or references missing files."""


@dataclass(frozen=True)
class EmbeddingSource:
    path: Path
    format: str  # "word2vec" | "dump"
    label: str
    merge_path: Path | None = None
    merge_format: str = "word2vec"


@dataclass(frozen=True)
class AuditOptions:
    neutral_low: float = 0.48
    neutral_high: float = 0.52
    vad_file: Path | None = None
    sets_file: Path | None = None
    rnd_subgroups: tuple[str, ...] = HAND_SUBGROUPS
    roles_subgroup: str = "person-role"
    pairwise_group: str | None = None
    pairwise_subgroup: str | None = None
    permutations: int = 10_000
    exact_limit: int = 20_000
    alpha: float = 0.05
    sentiment_lambda: float = 0.1
    normalize_centroids: bool = True
    strip_modifier_tokens: bool = False


@dataclass(frozen=True)
class AuditConfig:
    data_file: Path
    embedding_sources: tuple[EmbeddingSource, ...]
    manifests: tuple[Path, ...]
    analyses: tuple[str, ...]
    seed: int
    output_dir: Path
    options: AuditOptions = AuditOptions()


def load_config(path: str | Path) -> AuditConfig:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigValidationError(f"cannot read config {path}: {exc}")
    return config_from_dict(obj, base_dir=path.parent)


def config_from_dict(obj: dict, base_dir: Path) -> AuditConfig:
    def resolve(raw: str) -> Path:
        candidate = Path(raw)
        return candidate if candidate.is_absolute() else base_dir / candidate

    analyses = tuple(obj.get("analyses", ()))
    if not analyses:
        raise ConfigValidationError("config needs a non-empty 'analyses' list")
    unknown = [name for name in analyses if name not in ANALYSES]
    if unknown:
        raise ConfigValidationError(
            f"unknown analyses: {', '.join(unknown)}; valid: {', '.join(ANALYSES)}"
        )

    if "data_file" not in obj:
        raise ConfigValidationError("config needs 'data_file'")
    data_file = resolve(obj["data_file"])

    sources = []
    for raw in obj.get("embedding_sources", ()):
        fmt = raw.get("format", "dump")
        if fmt not in ("word2vec", "dump"):
            raise ConfigValidationError(f"unknown embedding format {fmt!r}")
        merge_raw = raw.get("merge_with")
        sources.append(
            EmbeddingSource(
                path=resolve(raw["path"]),
                format=fmt,
                label=raw.get("label") or Path(raw["path"]).stem,
                merge_path=resolve(merge_raw) if merge_raw else None,
                merge_format=raw.get("merge_format", "word2vec"),
            )
        )
    manifests = tuple(resolve(raw) for raw in obj.get("manifests", ()))

    options_obj = obj.get("options", {})
    options = AuditOptions(
        neutral_low=options_obj.get("neutral_low", 0.48),
        neutral_high=options_obj.get("neutral_high", 0.52),
        vad_file=resolve(options_obj["vad_file"]) if "vad_file" in options_obj else None,
        sets_file=resolve(options_obj["sets_file"]) if "sets_file" in options_obj else None,
        rnd_subgroups=tuple(options_obj.get("rnd_subgroups", HAND_SUBGROUPS)),
        roles_subgroup=options_obj.get("roles_subgroup", "person-role"),
        pairwise_group=options_obj.get("pairwise_group"),
        pairwise_subgroup=options_obj.get("pairwise_subgroup"),
        permutations=options_obj.get("permutations", 10_000),
        exact_limit=options_obj.get("exact_limit", 20_000),
        alpha=options_obj.get("alpha", 0.05),
        sentiment_lambda=options_obj.get("sentiment_lambda", 0.1),
        normalize_centroids=options_obj.get("normalize_centroids", True),
        strip_modifier_tokens=options_obj.get("strip_modifier_tokens", False),
    )

    config = AuditConfig(
        data_file=data_file,
        embedding_sources=tuple(sources),
        manifests=manifests,
        analyses=analyses,
        seed=int(obj.get("seed", 0)),
        output_dir=resolve(obj.get("output_dir", "audit-out")),
        options=options,
    )
    _check_paths(config)
    return config


def _check_paths(config: AuditConfig):
    missing = []
    if not config.data_file.exists():
        missing.append(str(config.data_file))
    for source in config.embedding_sources:
        if not source.path.exists():
            missing.append(str(source.path))
        if source.merge_path is not None and not source.merge_path.exists():
            missing.append(str(source.merge_path))
    for manifest in config.manifests:
        if not manifest.exists():
            missing.append(str(manifest))
    for extra in (config.options.vad_file, config.options.sets_file):
        if extra is not None and not extra.exists():
            missing.append(str(extra))
    if missing:
        raise ConfigValidationError(f"missing input files: {', '.join(missing)}")


# ---------------------------------------------------------------------------
# Payload plumbing
# ---------------------------------------------------------------------------


def file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


@dataclass(frozen=True)
class Provenance:
    seed: int
    inputs: tuple[tuple[str, str], ...]  # (name, digest)

    def header(self) -> str:
        inputs = ";".join(f"{name}:{digest}" for name, digest in self.inputs)
        return f"# provenance tool=toneaudit-{__version__} seed={self.seed} inputs={inputs}"


def csv_table(provenance: Provenance, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    buffer.write(provenance.header() + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(cell) for cell in row])
    return buffer.getvalue()


def _format_cell(cell) -> str:
    if isinstance(cell, float):
        if np.isnan(cell):
            return ""
        return repr(cell)
    if isinstance(cell, (np.floating,)):
        return _format_cell(float(cell))
    if isinstance(cell, (np.integer,)):
        return str(int(cell))
    return str(cell)


@dataclass
class AnalysisResult:
    tables: dict[str, str] = field(default_factory=dict)
    figures: dict[str, str] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)


@dataclass
class AuditReport:
    per_analysis: dict[str, AnalysisResult]
    errors: dict[str, str]
    report_md: str


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------


def load_catalog_file(path: Path) -> Catalog:
    return parse_emoji_test(path.read_text(encoding="utf-8"))


def load_source(source: EmbeddingSource) -> EmbeddingSet:
    loaded = _load_one(source.path, source.format, source.label)
    if source.merge_path is not None:
        extra = _load_one(source.merge_path, source.merge_format, source.merge_path.stem)
        loaded = merge(loaded, extra)
    return loaded


def _load_one(path: Path, fmt: str, label: str) -> EmbeddingSet:
    text = path.read_text(encoding="utf-8")
    if fmt == "word2vec":
        return load_word2vec_text(text, source_label=label)
    return load_dump(text, source_label=label)


def manifest_skin_toned_ids(manifest: TokenManifest) -> list[str]:
    """Manifest ids that are tone-modified emoji sequences (not bare modifiers)."""
    from .catalog import hex_to_codepoints, tones_in

    selected = []
    for item_id in manifest.entries:
        if item_id in MODIFIER_HEX_IDS:
            continue
        try:
            cps = hex_to_codepoints(item_id)
        except ValueError:
            continue
        if tones_in(cps):
            selected.append(item_id)
    return selected


# ---------------------------------------------------------------------------
# Analysis runners
# ---------------------------------------------------------------------------


def run_coverage(
    catalog: Catalog,
    sources: Sequence[tuple[EmbeddingSource, EmbeddingSet]],
    provenance: Provenance,
) -> AnalysisResult:
    rows = []
    for source, embedding_set in sources:
        report = coverage(embedding_set, catalog)
        rows.append(
            [
                source.label,
                source.format,
                report.total_tokens,
                report.emojis_supported,
                report.skin_toned_supported,
            ]
        )
    table = csv_table(
        provenance,
        ["model", "format", "total_tokens", "emojis_supported", "skin_toned_supported"],
        rows,
    )
    return AnalysisResult(tables={"coverage.csv": table}, meta={"sources": len(rows)})


def run_tokens(
    manifests: Sequence[TokenManifest],
    provenance: Provenance,
    boxplot: bool = False,
) -> AnalysisResult:
    stat_rows = []
    modifier_rows = []
    boxes = {}
    for manifest in manifests:
        ids = manifest_skin_toned_ids(manifest)
        if ids:
            stats = summarize(manifest, ids)
            stat_rows.append(
                [
                    manifest.model_label,
                    len(ids),
                    stats.mean,
                    stats.min,
                    stats.max,
                    stats.mode,
                    stats.mode_frequency,
                    stats.quartiles[0],
                    stats.quartiles[1],
                    stats.quartiles[2],
                ]
            )
            boxes[manifest.model_label] = (
                float(stats.min),
                stats.quartiles[0],
                stats.quartiles[1],
                stats.quartiles[2],
                float(stats.max),
            )
        lengths = modifier_lengths(manifest)
        findings = asymmetry_flags(lengths)
        modifier_rows.append(
            [manifest.model_label]
            + [lengths[tone] for tone in TONE_ORDER if tone is not SkinTone.DEFAULT]
            + ["; ".join(f"{f.tone.label} {f.ratio:.2f}x over minimum" for f in findings)]
        )
    tables = {
        "tokens.csv": csv_table(
            provenance,
            ["model", "emojis", "mean", "min", "max", "mode", "mode_frequency", "q1", "median", "q3"],
            stat_rows,
        ),
        "modifiers.csv": csv_table(
            provenance,
            ["model", "light", "medium-light", "medium", "medium-dark", "dark", "findings"],
            modifier_rows,
        ),
    }
    figures = {}
    if boxplot and boxes:
        figures["tokens_boxplot.svg"] = render_boxplot(boxes)
    return AnalysisResult(tables=tables, figures=figures, meta={"models": len(manifests)})


def run_align(
    catalog: Catalog,
    sources: Sequence[tuple[EmbeddingSource, EmbeddingSet]],
    provenance: Provenance,
    strip_modifier_tokens: bool = False,
) -> AnalysisResult:
    rows = []
    for source, embedding_set in sources:
        table = alignment_table(
            catalog, embedding_set, strip_modifier_tokens=strip_modifier_tokens
        )
        for tone in TONE_ORDER:
            row = table.rows[tone]
            rows.append(
                [
                    source.label,
                    tone.label,
                    row.mean_cosine,
                    row.mean_wmd_cosine,
                    row.mean_wmd_euclidean,
                    row.pairs,
                    row.skipped,
                ]
            )
    table_text = csv_table(
        provenance,
        ["model", "tone", "mean_cosine", "mean_wmd_cosine", "mean_wmd_euclidean", "pairs", "skipped"],
        rows,
    )
    return AnalysisResult(tables={"align.csv": table_text})


def _matrix_rows(values: np.ndarray) -> list[list]:
    rows = []
    for i, tone in enumerate(TONE_LABELS):
        rows.append([tone] + [float(values[i, j]) for j in range(len(TONE_LABELS))])
    return rows


def run_pairwise(
    catalog: Catalog,
    sources: Sequence[tuple[EmbeddingSource, EmbeddingSet]],
    provenance: Provenance,
    group: str | None = None,
    subgroup: str | None = None,
) -> AnalysisResult:
    result = AnalysisResult()
    scope = catalog.subset(group=group, subgroup=subgroup) if (group or subgroup) else catalog
    for source, embedding_set in sources:
        matrix = tone_pair_matrix(scope.families, embedding_set)
        name = f"pairwise_{source.label}"
        result.tables[f"{name}.csv"] = csv_table(
            provenance, ["tone"] + list(TONE_LABELS), _matrix_rows(matrix.values)
        )
        result.figures[f"{name}.svg"] = render_heatmap(
            matrix.values, TONE_LABELS, f"cosine distance per tone pair ({source.label})"
        )
        result.meta[source.label] = {"families_averaged": matrix.sample_count}
    return result


def run_rnd(
    catalog: Catalog,
    sources: Sequence[tuple[EmbeddingSource, EmbeddingSet]],
    provenance: Provenance,
    options: AuditOptions,
) -> AnalysisResult:
    vad_path = options.vad_file or bundled_vad_lexicon()
    lexicon = filter_neutral(
        load_vad(vad_path.read_text(encoding="utf-8")),
        options.neutral_low,
        options.neutral_high,
    )
    families = []
    for subgroup in options.rnd_subgroups:
        families.extend(catalog.subset(subgroup=subgroup).families)
    result = AnalysisResult(meta={"neutral_words": len(lexicon), "families": len(families)})
    for source, embedding_set in sources:
        matrix = rnd_matrix(
            families, embedding_set, lexicon, embedding_set, options.normalize_centroids
        )
        name = f"rnd_{source.label}"
        result.tables[f"{name}.csv"] = csv_table(
            provenance, ["tone"] + list(TONE_LABELS), _matrix_rows(matrix)
        )
        result.figures[f"{name}.svg"] = render_heatmap(
            matrix, TONE_LABELS, f"relative norm distance ({source.label})"
        )
    return result


def _aggregate_rows(label: str, cells, alpha: float) -> list[list]:
    means = mean_effect_sizes(cells)
    rates = significance_rates(cells, alpha)
    counts: dict = {}
    for cell in cells:
        counts[(cell.x_tone, cell.y_tone)] = counts.get((cell.x_tone, cell.y_tone), 0) + 1
    rows = []
    for pair in ordered_tone_pairs():
        if pair not in means:
            continue
        rows.append(
            [label, pair[0].label, pair[1].label, means[pair], rates[pair], counts[pair]]
        )
    return rows


def _test_rows(label: str, cells) -> list[list]:
    return [
        [
            label,
            cell.x_tone.label,
            cell.y_tone.label,
            cell.context,
            cell.result.statistic,
            cell.result.effect_size,
            cell.result.p_value,
            cell.result.permutations,
            "exact" if cell.result.exact else "monte-carlo",
        ]
        for cell in cells
    ]


_AGGREGATE_HEADER = ["model", "x_tone", "y_tone", "mean_effect_size", "significant_rate", "tests"]
_TEST_HEADER = [
    "model", "x_tone", "y_tone", "context", "statistic", "effect_size",
    "p_value", "permutations", "path",
]


def run_weat_roles(
    catalog: Catalog,
    sources: Sequence[tuple[EmbeddingSource, EmbeddingSet]],
    attribute_sets: AttributeSets,
    provenance: Provenance,
    options: AuditOptions,
) -> AnalysisResult:
    roles = catalog.subset(subgroup=options.roles_subgroup).families
    result = AnalysisResult(meta={"roles": len(roles), "alpha": options.alpha})
    aggregate_rows, test_rows = [], []
    for source, embedding_set in sources:
        config = PermutationConfig(
            seed=provenance.seed,
            samples=options.permutations,
            exact_limit=options.exact_limit,
            name=f"weat_roles|{source.label}",
        )
        cells = weat_role_suite(
            roles, embedding_set, attribute_sets.good_emoji, attribute_sets.bad_emoji, config
        )
        aggregate_rows.extend(_aggregate_rows(source.label, cells, options.alpha))
        test_rows.extend(_test_rows(source.label, cells))
        result.meta[source.label] = {"tests": len(cells)}
    result.tables["weat_roles.csv"] = csv_table(provenance, _AGGREGATE_HEADER, aggregate_rows)
    result.tables["weat_roles_tests.csv"] = csv_table(provenance, _TEST_HEADER, test_rows)
    return result


def run_weat_caliskan(
    catalog: Catalog,
    sources: Sequence[tuple[EmbeddingSource, EmbeddingSet]],
    attribute_sets: AttributeSets,
    provenance: Provenance,
    options: AuditOptions,
) -> AnalysisResult:
    result = AnalysisResult(
        meta={"benchmarks": len(attribute_sets.benchmarks), "alpha": options.alpha}
    )
    aggregate_rows, test_rows, significance_rows = [], [], []
    for source, embedding_set in sources:
        config = PermutationConfig(
            seed=provenance.seed,
            samples=options.permutations,
            exact_limit=options.exact_limit,
            name=f"weat_caliskan|{source.label}",
        )
        cells = weat_tone_target_suite(
            catalog.families, embedding_set, embedding_set, attribute_sets.benchmarks, config
        )
        aggregate_rows.extend(_aggregate_rows(source.label, cells, options.alpha))
        test_rows.extend(_test_rows(source.label, cells))
        rates = significance_rates(cells, options.alpha)
        for pair in ordered_tone_pairs():
            if pair in rates:
                significance_rows.append(
                    [source.label, pair[0].label, pair[1].label, rates[pair]]
                )
        result.meta[source.label] = {"tests": len(cells)}
    result.tables["weat_caliskan.csv"] = csv_table(provenance, _AGGREGATE_HEADER, aggregate_rows)
    result.tables["weat_caliskan_tests.csv"] = csv_table(provenance, _TEST_HEADER, test_rows)
    result.tables["significance.csv"] = csv_table(
        provenance,
        ["model", "x_tone", "y_tone", "rate_p_below_alpha"],
        significance_rows,
    )
    return result


def run_rnsb(
    catalog: Catalog,
    sources: Sequence[tuple[EmbeddingSource, EmbeddingSet]],
    attribute_sets: AttributeSets,
    provenance: Provenance,
    options: AuditOptions,
) -> AnalysisResult:
    roles = catalog.subset(subgroup=options.roles_subgroup).families
    result = AnalysisResult(meta={"roles": len(roles)})
    rows = []
    for source, embedding_set in sources:
        positives = resolve_ids(embedding_set, attribute_sets.positive_seeds, "positive_seeds")
        negatives = resolve_ids(embedding_set, attribute_sets.negative_seeds, "negative_seeds")
        vectors = np.vstack([positives, negatives])
        labels = ["pos"] * len(positives) + ["neg"] * len(negatives)
        direction = train_sentiment_direction(vectors, labels, options.sentiment_lambda)

        share_sums = {tone: 0.0 for tone in TONE_ORDER}
        share_counts = {tone: 0 for tone in TONE_ORDER}
        kl_values = []
        for family in roles:
            targets = {}
            for tone in TONE_ORDER:
                seq = family.variant(tone)
                if seq is None:
                    continue
                record = embedding_set.resolve(seq.hex_id)
                if record is not None:
                    targets[tone.label] = record.aggregated
            if len(targets) < 2:
                continue
            role_result = rnsb(direction, targets)
            kl_values.append(role_result.kl_divergence)
            for tone in TONE_ORDER:
                if tone.label in role_result.shares:
                    share_sums[tone] += role_result.shares[tone.label]
                    share_counts[tone] += 1
        if not kl_values:
            continue
        shares = [
            share_sums[tone] / share_counts[tone] if share_counts[tone] else float("nan")
            for tone in TONE_ORDER
        ]
        rows.append([source.label] + shares + [float(np.mean(kl_values)), len(kl_values)])
        result.meta[source.label] = {"roles_scored": len(kl_values)}
    result.tables["rnsb.csv"] = csv_table(
        provenance,
        ["model"] + list(TONE_LABELS) + ["avg_kl", "roles"],
        rows,
    )
    return result


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def run(config: AuditConfig) -> AuditReport:
    """Execute the configured analyses in dependency order."""
    catalog = load_catalog_file(config.data_file)
    inputs: list[tuple[str, str]] = [(config.data_file.name, file_digest(config.data_file))]

    sources: list[tuple[EmbeddingSource, EmbeddingSet]] = []
    for source in config.embedding_sources:
        sources.append((source, load_source(source)))
        inputs.append((source.path.name, file_digest(source.path)))
        if source.merge_path is not None:
            inputs.append((source.merge_path.name, file_digest(source.merge_path)))
    dump_sources = [(s, e) for s, e in sources if s.format == "dump"]

    manifests = []
    for manifest_path in config.manifests:
        manifests.append(load_manifest(manifest_path.read_text(encoding="utf-8")))
        inputs.append((manifest_path.name, file_digest(manifest_path)))

    sets_path = config.options.sets_file or bundled_attribute_sets()
    attribute_sets = load_attribute_sets(sets_path)
    provenance = Provenance(seed=config.seed, inputs=tuple(inputs))

    per_analysis: dict[str, AnalysisResult] = {}
    errors: dict[str, str] = {}
    for analysis in config.analyses:
        try:
            if analysis == "coverage":
                per_analysis[analysis] = run_coverage(catalog, sources, provenance)
            elif analysis == "tokens":
                per_analysis[analysis] = run_tokens(manifests, provenance)
            elif analysis == "align":
                per_analysis[analysis] = run_align(
                    catalog, dump_sources, provenance, config.options.strip_modifier_tokens
                )
            elif analysis == "pairwise":
                per_analysis[analysis] = run_pairwise(
                    catalog,
                    dump_sources,
                    provenance,
                    config.options.pairwise_group,
                    config.options.pairwise_subgroup,
                )
            elif analysis == "rnd":
                per_analysis[analysis] = run_rnd(
                    catalog, dump_sources, provenance, config.options
                )
            elif analysis == "weat_roles":
                per_analysis[analysis] = run_weat_roles(
                    catalog, dump_sources, attribute_sets, provenance, config.options
                )
            elif analysis == "weat_caliskan":
                per_analysis[analysis] = run_weat_caliskan(
                    catalog, dump_sources, attribute_sets, provenance, config.options
                )
            elif analysis == "rnsb":
                per_analysis[analysis] = run_rnsb(
                    catalog, dump_sources, attribute_sets, provenance, config.options
                )
        except Exception as exc:  # collected and reported per analysis
            errors[analysis] = f"{type(exc).__name__}: {exc}"

    report_md = _render_markdown(config, catalog, provenance, per_analysis, errors)
    return AuditReport(per_analysis, errors, report_md)


def _render_markdown(config, catalog, provenance, per_analysis, errors) -> str:
    lines = [
        "# Skin-tone bias audit",
        "",
        f"- tool: toneaudit {__version__}",
        f"- seed: {config.seed}",
        f"- emoji data version: {catalog.unicode_version or 'unknown'}",
        f"- catalog: {len(catalog.sequences)} sequences, {len(catalog.families)} families",
    ]
    counts = catalog.tone_counts()
    lines.append(
        f"- skin-toned sequences: {counts['toned_fully_qualified']} fully-qualified "
        f"({counts['single_tone_fully_qualified']} single-tone, "
        f"{counts['multi_tone_fully_qualified']} multi-tone), "
        f"{counts['toned_any_status']} across all statuses"
    )
    lines.append("")
    lines.append("## Inputs")
    for name, digest in provenance.inputs:
        lines.append(f"- `{name}` sha256:{digest}")
    lines.append("")
    for analysis in config.analyses:
        result = per_analysis.get(analysis)
        lines.append(f"## {analysis}")
        if analysis in errors:
            lines.append(f"FAILED: {errors[analysis]}")
            lines.append("")
            continue
        if result is None:
            lines.append("skipped")
            lines.append("")
            continue
        for table_name in result.tables:
            lines.append(f"- table: `{table_name}`")
        for figure_name in result.figures:
            lines.append(f"- figure: `{figure_name}`")
        if result.meta:
            lines.append(f"- parameters: `{json.dumps(result.meta, sort_keys=True)}`")
        lines.append("")
    return "\n".join(lines) + "\n"


def write_report(report: AuditReport, output_dir: Path) -> list[Path]:
    output_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for result in report.per_analysis.values():
        for name, payload in list(result.tables.items()) + list(result.figures.items()):
            path = output_dir / name
            path.write_text(payload, encoding="utf-8")
            written.append(path)
    path = output_dir / "report.md"
    path.write_text(report.report_md, encoding="utf-8")
    written.append(path)
    return written
