"""Request/response models for the audit service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str
    pinned_emoji_version: str


class CatalogRequest(BaseModel):
    data_file: str
    group: str | None = None
    subgroup: str | None = None


class CatalogResponse(BaseModel):
    unicode_version: str
    counts: dict[str, int]
    catalog: dict


class CoverageRequest(BaseModel):
    embeddings_file: str
    format: Literal["word2vec", "dump"] = "word2vec"
    data_file: str
    label: str | None = None


class CoverageResponse(BaseModel):
    model: str
    total_tokens: int
    emojis_supported: int
    skin_toned_supported: int
    tables: dict[str, str]


class TokensRequest(BaseModel):
    manifest_file: str
    data_file: str | None = None
    modifiers_only: bool = False
    boxplot: bool = False


class TokenStatsPayload(BaseModel):
    emojis: int
    mean: float
    min: int
    max: int
    mode: int
    mode_frequency: int
    q1: float
    median: float
    q3: float


class TokensResponse(BaseModel):
    model: str
    stats: TokenStatsPayload | None = None
    modifier_lengths: dict[str, int]
    findings: list[str]
    tables: dict[str, str]
    figures: dict[str, str]


class AlignRequest(BaseModel):
    dump_file: str
    data_file: str
    strip_modifier_tokens: bool = False
    label: str | None = None


class AlignRow(BaseModel):
    tone: str
    mean_cosine: float | None
    mean_wmd_cosine: float | None
    mean_wmd_euclidean: float | None
    pairs: int
    skipped: int


class AlignResponse(BaseModel):
    model: str
    rows: list[AlignRow]
    tables: dict[str, str]


class PairwiseRequest(BaseModel):
    dump_file: str
    data_file: str
    group: str | None = None
    subgroup: str | None = None
    label: str | None = None


class MatrixResponse(BaseModel):
    model: str
    tones: list[str]
    matrix: list[list[float | None]]
    tables: dict[str, str]
    figures: dict[str, str]
    sample_count: int | None = None


class RndRequest(BaseModel):
    dump_file: str
    format: Literal["word2vec", "dump"] = "dump"
    data_file: str
    vad_file: str | None = None
    neutral_low: float = 0.48
    neutral_high: float = 0.52
    subgroups: list[str] | None = None
    normalize: bool = True
    label: str | None = None


class WeatRequest(BaseModel):
    dump_file: str
    format: Literal["word2vec", "dump"] = "dump"
    data_file: str
    mode: Literal["roles", "caliskan"] = "roles"
    sets_file: str | None = None
    seed: int = 0
    permutations: int = 10_000
    exact_limit: int = 20_000
    alpha: float = 0.05
    roles_subgroup: str = "person-role"
    label: str | None = None


class WeatAggregateRow(BaseModel):
    x_tone: str
    y_tone: str
    mean_effect_size: float
    significant_rate: float
    tests: int


class WeatResponse(BaseModel):
    model: str
    mode: str
    rows: list[WeatAggregateRow]
    tables: dict[str, str]


class RnsbRequest(BaseModel):
    dump_file: str
    format: Literal["word2vec", "dump"] = "dump"
    data_file: str
    sets_file: str | None = None
    sentiment_lambda: float = Field(default=0.1, ge=0.0)
    roles_subgroup: str = "person-role"
    label: str | None = None


class RnsbResponse(BaseModel):
    model: str
    mean_shares: dict[str, float | None]
    avg_kl: float
    roles: int
    tables: dict[str, str]


class AuditRequest(BaseModel):
    config_file: str


class AnalysisPayload(BaseModel):
    tables: dict[str, str]
    figures: dict[str, str]
    meta: dict


class AuditResponse(BaseModel):
    analyses: dict[str, AnalysisPayload]
    report_md: str
    errors: dict[str, str]
    output_dir: str
