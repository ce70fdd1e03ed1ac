"""FastAPI application wrapping the audit toolkit.

Endpoints take paths to input files plus parameters and return CSV/SVG
payloads; clients decide where to persist them. Loaded catalogs and
embedding sets are cached by (path, mtime, size) so a long-running
service amortizes input parsing across requests.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..bias import (
    ConfigError,
    LexiconError,
    NumericError,
    TrainingError,
    filter_neutral,
    load_vad,
)
from ..catalog import Catalog, ParseError, TONE_ORDER, UnknownGroupError, parse_emoji_test
from ..report import (
    AuditOptions,
    ConfigValidationError,
    EmbeddingSource,
    HAND_SUBGROUPS,
    Provenance,
    file_digest,
    load_config,
    run,
    run_align,
    run_coverage,
    run_pairwise,
    run_rnd,
    run_rnsb,
    run_tokens,
    run_weat_caliskan,
    run_weat_roles,
)
from ..report import manifest_skin_toned_ids
from ..resources import PINNED_EMOJI_VERSION, bundled_attribute_sets
from ..sets import SetsError, load_attribute_sets
from ..similarity import AnalysisError, DomainError
from ..store import StoreError, load_dump, load_word2vec_text
from ..tokens import AuditError, load_manifest, modifier_lengths, asymmetry_flags, summarize
from . import schemas

_BAD_REQUEST = (
    ParseError,
    StoreError,
    AuditError,
    DomainError,
    ConfigError,
    SetsError,
    LexiconError,
    ConfigValidationError,
    UnknownGroupError,
    FileNotFoundError,
    ValueError,
)
_UNPROCESSABLE = (AnalysisError, TrainingError, NumericError)

_CACHE_SIZE = 8
_catalog_cache: dict = {}
_set_cache: dict = {}


def _stat_key(path: Path):
    stat = path.stat()
    return str(path), stat.st_mtime_ns, stat.st_size


def _cached(cache: dict, path: Path, loader):
    key = _stat_key(path)
    if key not in cache:
        if len(cache) >= _CACHE_SIZE:
            cache.pop(next(iter(cache)))
        cache[key] = loader(path)
    return cache[key]


def _load_catalog(path_text: str) -> Catalog:
    path = Path(path_text)
    if not path.exists():
        raise FileNotFoundError(f"data file not found: {path}")
    return _cached(
        _catalog_cache, path, lambda p: parse_emoji_test(p.read_text(encoding="utf-8"))
    )


def _load_set(path_text: str, fmt: str, label: str):
    path = Path(path_text)
    if not path.exists():
        raise FileNotFoundError(f"embedding file not found: {path}")

    def loader(p: Path):
        text = p.read_text(encoding="utf-8")
        if fmt == "word2vec":
            return load_word2vec_text(text, source_label=label)
        return load_dump(text, source_label=label)

    key = _stat_key(path) + (fmt,)
    if key not in _set_cache:
        if len(_set_cache) >= _CACHE_SIZE:
            _set_cache.pop(next(iter(_set_cache)))
        _set_cache[key] = loader(path)
    return _set_cache[key]


def _provenance(seed: int, paths: list[Path]) -> Provenance:
    return Provenance(seed=seed, inputs=tuple((p.name, file_digest(p)) for p in paths))


def _source(path_text: str, fmt: str, label: str | None) -> EmbeddingSource:
    path = Path(path_text)
    return EmbeddingSource(path=path, format=fmt, label=label or path.stem)


def _matrix_payload(values: np.ndarray) -> list[list[float | None]]:
    return [
        [None if math.isnan(v) else float(v) for v in row]
        for row in values.tolist()
    ]


def create_app() -> FastAPI:
    app = FastAPI(title="toneaudit", version=__version__)

    def guard(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except _UNPROCESSABLE as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except _BAD_REQUEST as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(
            status="ok", version=__version__, pinned_emoji_version=PINNED_EMOJI_VERSION
        )

    @app.post("/v1/catalog", response_model=schemas.CatalogResponse)
    def catalog_endpoint(request: schemas.CatalogRequest):
        def work():
            catalog = _load_catalog(request.data_file)
            if request.group or request.subgroup:
                catalog = catalog.subset(group=request.group, subgroup=request.subgroup)
            payload = catalog.to_json_dict()
            return schemas.CatalogResponse(
                unicode_version=catalog.unicode_version,
                counts=payload["counts"],
                catalog=payload,
            )

        return guard(work)

    @app.post("/v1/coverage", response_model=schemas.CoverageResponse)
    def coverage_endpoint(request: schemas.CoverageRequest):
        def work():
            catalog = _load_catalog(request.data_file)
            source = _source(request.embeddings_file, request.format, request.label)
            embedding_set = _load_set(request.embeddings_file, request.format, source.label)
            provenance = _provenance(0, [Path(request.data_file), source.path])
            result = run_coverage(catalog, [(source, embedding_set)], provenance)
            from ..store import coverage as coverage_op

            report = coverage_op(embedding_set, catalog)
            return schemas.CoverageResponse(
                model=source.label,
                total_tokens=report.total_tokens,
                emojis_supported=report.emojis_supported,
                skin_toned_supported=report.skin_toned_supported,
                tables=result.tables,
            )

        return guard(work)

    @app.post("/v1/tokens", response_model=schemas.TokensResponse)
    def tokens_endpoint(request: schemas.TokensRequest):
        def work():
            path = Path(request.manifest_file)
            if not path.exists():
                raise FileNotFoundError(f"manifest not found: {path}")
            manifest = load_manifest(path.read_text(encoding="utf-8"))
            provenance = _provenance(0, [path])
            result = run_tokens([manifest], provenance, boxplot=request.boxplot)
            lengths = modifier_lengths(manifest)
            findings = [
                f"{f.tone.label} modifier costs {f.count} tokens "
                f"({f.ratio:.2f}x the cheapest)"
                for f in asymmetry_flags(lengths)
            ]
            stats_payload = None
            if not request.modifiers_only:
                ids = manifest_skin_toned_ids(manifest)
                if request.data_file:
                    catalog = _load_catalog(request.data_file)
                    from ..catalog import hex_to_codepoints

                    ids = [i for i in ids if catalog.lookup(hex_to_codepoints(i)) is not None]
                if ids:
                    stats = summarize(manifest, ids)
                    stats_payload = schemas.TokenStatsPayload(
                        emojis=len(ids),
                        mean=stats.mean,
                        min=stats.min,
                        max=stats.max,
                        mode=stats.mode,
                        mode_frequency=stats.mode_frequency,
                        q1=stats.quartiles[0],
                        median=stats.quartiles[1],
                        q3=stats.quartiles[2],
                    )
            return schemas.TokensResponse(
                model=manifest.model_label,
                stats=stats_payload,
                modifier_lengths={tone.label: count for tone, count in lengths.items()},
                findings=findings,
                tables=result.tables,
                figures=result.figures,
            )

        return guard(work)

    @app.post("/v1/align", response_model=schemas.AlignResponse)
    def align_endpoint(request: schemas.AlignRequest):
        def work():
            catalog = _load_catalog(request.data_file)
            source = _source(request.dump_file, "dump", request.label)
            embedding_set = _load_set(request.dump_file, "dump", source.label)
            provenance = _provenance(0, [Path(request.data_file), source.path])
            result = run_align(
                catalog, [(source, embedding_set)], provenance, request.strip_modifier_tokens
            )
            from ..similarity import alignment_table

            table = alignment_table(
                catalog, embedding_set, strip_modifier_tokens=request.strip_modifier_tokens
            )
            rows = []
            for tone in TONE_ORDER:
                row = table.rows[tone]
                rows.append(
                    schemas.AlignRow(
                        tone=tone.label,
                        mean_cosine=None if math.isnan(row.mean_cosine) else row.mean_cosine,
                        mean_wmd_cosine=None
                        if math.isnan(row.mean_wmd_cosine)
                        else row.mean_wmd_cosine,
                        mean_wmd_euclidean=None
                        if math.isnan(row.mean_wmd_euclidean)
                        else row.mean_wmd_euclidean,
                        pairs=row.pairs,
                        skipped=row.skipped,
                    )
                )
            return schemas.AlignResponse(model=source.label, rows=rows, tables=result.tables)

        return guard(work)

    @app.post("/v1/pairwise", response_model=schemas.MatrixResponse)
    def pairwise_endpoint(request: schemas.PairwiseRequest):
        def work():
            catalog = _load_catalog(request.data_file)
            source = _source(request.dump_file, "dump", request.label)
            embedding_set = _load_set(request.dump_file, "dump", source.label)
            provenance = _provenance(0, [Path(request.data_file), source.path])
            result = run_pairwise(
                catalog, [(source, embedding_set)], provenance, request.group, request.subgroup
            )
            from ..similarity import tone_pair_matrix

            scope = (
                catalog.subset(group=request.group, subgroup=request.subgroup)
                if (request.group or request.subgroup)
                else catalog
            )
            matrix = tone_pair_matrix(scope.families, embedding_set)
            return schemas.MatrixResponse(
                model=source.label,
                tones=[t.label for t in TONE_ORDER],
                matrix=_matrix_payload(matrix.values),
                tables=result.tables,
                figures=result.figures,
                sample_count=matrix.sample_count,
            )

        return guard(work)

    @app.post("/v1/rnd", response_model=schemas.MatrixResponse)
    def rnd_endpoint(request: schemas.RndRequest):
        def work():
            catalog = _load_catalog(request.data_file)
            source = _source(request.dump_file, request.format, request.label)
            embedding_set = _load_set(request.dump_file, request.format, source.label)
            provenance = _provenance(0, [Path(request.data_file), source.path])
            options = AuditOptions(
                neutral_low=request.neutral_low,
                neutral_high=request.neutral_high,
                vad_file=Path(request.vad_file) if request.vad_file else None,
                rnd_subgroups=tuple(request.subgroups) if request.subgroups else HAND_SUBGROUPS,
                normalize_centroids=request.normalize,
            )
            result = run_rnd(catalog, [(source, embedding_set)], provenance, options)
            matrix = _matrix_from_rnd(catalog, embedding_set, options)
            return schemas.MatrixResponse(
                model=source.label,
                tones=[t.label for t in TONE_ORDER],
                matrix=_matrix_payload(matrix),
                tables=result.tables,
                figures=result.figures,
            )

        return guard(work)

    @app.post("/v1/weat", response_model=schemas.WeatResponse)
    def weat_endpoint(request: schemas.WeatRequest):
        def work():
            catalog = _load_catalog(request.data_file)
            source = _source(request.dump_file, request.format, request.label)
            embedding_set = _load_set(request.dump_file, request.format, source.label)
            provenance = _provenance(request.seed, [Path(request.data_file), source.path])
            sets_path = Path(request.sets_file) if request.sets_file else bundled_attribute_sets()
            attribute_sets = load_attribute_sets(sets_path)
            options = AuditOptions(
                permutations=request.permutations,
                exact_limit=request.exact_limit,
                alpha=request.alpha,
                roles_subgroup=request.roles_subgroup,
            )
            if request.mode == "roles":
                result = run_weat_roles(
                    catalog, [(source, embedding_set)], attribute_sets, provenance, options
                )
                aggregate_name = "weat_roles.csv"
            else:
                result = run_weat_caliskan(
                    catalog, [(source, embedding_set)], attribute_sets, provenance, options
                )
                aggregate_name = "weat_caliskan.csv"
            rows = _aggregate_rows_from_csv(result.tables[aggregate_name])
            return schemas.WeatResponse(
                model=source.label, mode=request.mode, rows=rows, tables=result.tables
            )

        return guard(work)

    @app.post("/v1/rnsb", response_model=schemas.RnsbResponse)
    def rnsb_endpoint(request: schemas.RnsbRequest):
        def work():
            catalog = _load_catalog(request.data_file)
            source = _source(request.dump_file, request.format, request.label)
            embedding_set = _load_set(request.dump_file, request.format, source.label)
            provenance = _provenance(0, [Path(request.data_file), source.path])
            sets_path = Path(request.sets_file) if request.sets_file else bundled_attribute_sets()
            attribute_sets = load_attribute_sets(sets_path)
            options = AuditOptions(
                sentiment_lambda=request.sentiment_lambda,
                roles_subgroup=request.roles_subgroup,
            )
            result = run_rnsb(
                catalog, [(source, embedding_set)], attribute_sets, provenance, options
            )
            rows = _rnsb_rows_from_csv(result.tables["rnsb.csv"])
            if not rows:
                raise AnalysisError("no roles had at least two embedded variants")
            row = rows[0]
            return schemas.RnsbResponse(
                model=source.label,
                mean_shares=row["shares"],
                avg_kl=row["avg_kl"],
                roles=row["roles"],
                tables=result.tables,
            )

        return guard(work)

    @app.post("/v1/audit", response_model=schemas.AuditResponse)
    def audit_endpoint(request: schemas.AuditRequest):
        def work():
            config = load_config(request.config_file)
            report = run(config)
            analyses = {
                name: schemas.AnalysisPayload(
                    tables=result.tables, figures=result.figures, meta=result.meta
                )
                for name, result in report.per_analysis.items()
            }
            return schemas.AuditResponse(
                analyses=analyses,
                report_md=report.report_md,
                errors=report.errors,
                output_dir=str(config.output_dir),
            )

        return guard(work)

    return app


def _matrix_from_rnd(catalog, embedding_set, options: AuditOptions):
    from ..bias import rnd_matrix
    from ..resources import bundled_vad_lexicon

    vad_path = options.vad_file or bundled_vad_lexicon()
    lexicon = filter_neutral(
        load_vad(vad_path.read_text(encoding="utf-8")), options.neutral_low, options.neutral_high
    )
    families = []
    for subgroup in options.rnd_subgroups:
        families.extend(catalog.subset(subgroup=subgroup).families)
    return rnd_matrix(
        families, embedding_set, lexicon, embedding_set, options.normalize_centroids
    )


def _aggregate_rows_from_csv(table: str) -> list[schemas.WeatAggregateRow]:
    rows = []
    lines = [line for line in table.splitlines() if line and not line.startswith("#")]
    for line in lines[1:]:
        _model, x_tone, y_tone, mean_effect, rate, tests = line.split(",")
        rows.append(
            schemas.WeatAggregateRow(
                x_tone=x_tone,
                y_tone=y_tone,
                mean_effect_size=float(mean_effect),
                significant_rate=float(rate),
                tests=int(tests),
            )
        )
    return rows


def _rnsb_rows_from_csv(table: str) -> list[dict]:
    lines = [line for line in table.splitlines() if line and not line.startswith("#")]
    rows = []
    for line in lines[1:]:
        fields = line.split(",")
        shares = {
            tone.label: (float(fields[1 + i]) if fields[1 + i] else None)
            for i, tone in enumerate(TONE_ORDER)
        }
        rows.append(
            {
                "model": fields[0],
                "shares": shares,
                "avg_kl": float(fields[7]),
                "roles": int(fields[8]),
            }
        )
    return rows
