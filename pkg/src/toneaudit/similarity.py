"""Cosine and Word Mover's distances, alignment tables, tone-pair matrices.

WMD is solved exactly as a transportation LP with uniform marginals; token
sequences here are short (tens of tokens), so exactness is affordable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np
from scipy.optimize import linprog

from .catalog import Catalog, EmojiFamily, SkinTone, TONE_ORDER
from .store import EmbeddingRecord, EmbeddingSet, TokenSequence

MARGINAL_TOL = 1e-9


class DomainError(ValueError):
    """Raised when metric preconditions are violated (zero vectors, shapes)."""


class AnalysisError(RuntimeError):
    """Raised when an analysis has no data to work on."""


class GroundMetric(Enum):
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cos(a, b), in [0, 2]; magnitude-independent."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise DomainError("cosine distance undefined for zero vectors")
    return float(1.0 - float(a @ b) / (norm_a * norm_b))


def ground_distance(metric: GroundMetric, a: np.ndarray, b: np.ndarray) -> float:
    if metric is GroundMetric.COSINE:
        return cosine_distance(a, b)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def ground_matrix(metric: GroundMetric, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Pairwise ground distances between the rows of two (m,d)/(n,d) arrays."""
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape[1] != right.shape[1]:
        raise DomainError(f"dimension mismatch: {left.shape[1]} vs {right.shape[1]}")
    if metric is GroundMetric.EUCLIDEAN:
        diff = left[:, None, :] - right[None, :, :]
        return np.sqrt((diff * diff).sum(axis=2))
    norms_l = np.linalg.norm(left, axis=1)
    norms_r = np.linalg.norm(right, axis=1)
    if np.any(norms_l == 0.0) or np.any(norms_r == 0.0):
        raise DomainError("cosine ground distance undefined for zero vectors")
    sims = (left @ right.T) / np.outer(norms_l, norms_r)
    return 1.0 - sims


@dataclass(frozen=True)
class TransportPlan:
    flows: np.ndarray  # (m, n), nonnegative
    cost: float


def wmd(
    seq_a: TokenSequence,
    seq_b: TokenSequence,
    metric: GroundMetric = GroundMetric.COSINE,
) -> tuple[float, TransportPlan]:
    """Exact minimum-cost transport between two uniformly weighted sequences.

    Marginals are 1/m per source token and 1/n per target token. Returns
    the optimal cost and the optimal flow matrix.
    """
    left = np.asarray(seq_a.vectors, dtype=np.float64)
    right = np.asarray(seq_b.vectors, dtype=np.float64)
    m, n = left.shape[0], right.shape[0]
    if m == 0 or n == 0:
        raise DomainError("token sequences must be non-empty")
    costs = ground_matrix(metric, left, right)

    if m == 1 or n == 1:
        # Marginals fully determine the plan.
        flows = np.full((m, n), 1.0 / (m * n))
        cost = float((flows * costs).sum())
        return cost, TransportPlan(flows, cost)

    a_eq = np.zeros((m + n, m * n))
    for i in range(m):
        a_eq[i, i * n : (i + 1) * n] = 1.0
    for j in range(n):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([np.full(m, 1.0 / m), np.full(n, 1.0 / n)])
    result = linprog(costs.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not result.success:
        raise AnalysisError(f"transport solve failed: {result.message}")
    flows = result.x.reshape(m, n)
    _check_plan(flows, m, n)
    cost = float((flows * costs).sum())
    return cost, TransportPlan(flows, cost)


def _check_plan(flows: np.ndarray, m: int, n: int):
    if np.any(flows < -MARGINAL_TOL):
        raise AnalysisError("transport plan has negative flow")
    if np.max(np.abs(flows.sum(axis=1) - 1.0 / m)) > MARGINAL_TOL:
        raise AnalysisError("transport plan violates row marginals")
    if np.max(np.abs(flows.sum(axis=0) - 1.0 / n)) > MARGINAL_TOL:
        raise AnalysisError("transport plan violates column marginals")


@dataclass(frozen=True)
class AlignmentRow:
    mean_cosine: float
    mean_wmd_cosine: float
    mean_wmd_euclidean: float
    pairs: int
    skipped: int


@dataclass(frozen=True)
class AlignmentTable:
    rows: Mapping[SkinTone, AlignmentRow]


def default_pairing(catalog: Catalog) -> dict[str, str]:
    """Emoji id -> description id, using each variant's own short name."""
    pairing: dict[str, str] = {}
    for family in catalog.families:
        for seq in family.variants.values():
            pairing[seq.hex_id] = seq.name
    return pairing


def _strip_modifier_tokens(
    variant: TokenSequence, base: TokenSequence | None
) -> TokenSequence:
    """Drop token positions the base does not share (the modifier's tokens).

    Multiset difference on token ids, order preserved. Falls back to the
    full sequence when ids are unavailable or nothing would remain.
    """
    if base is None or variant.token_ids is None or base.token_ids is None:
        return variant
    budget: dict[int, int] = {}
    for tid in base.token_ids:
        budget[tid] = budget.get(tid, 0) + 1
    keep = []
    for pos, tid in enumerate(variant.token_ids):
        if budget.get(tid, 0) > 0:
            budget[tid] -= 1
            keep.append(pos)
    if not keep:
        return variant
    ids = tuple(variant.token_ids[pos] for pos in keep)
    return TokenSequence(variant.vectors[keep], ids)


def alignment_table(
    catalog: Catalog,
    embedding_set: EmbeddingSet,
    pairing: Mapping[str, str] | None = None,
    strip_modifier_tokens: bool = False,
) -> AlignmentTable:
    """Per-tone mean distances between each emoji and its description.

    Aggregated vectors are compared by cosine distance; discrete sequences
    by WMD under both ground metrics. Families missing either side of a
    pair are skipped and counted.
    """
    if pairing is None:
        pairing = default_pairing(catalog)
    sums = {tone: np.zeros(3) for tone in TONE_ORDER}
    pairs = {tone: 0 for tone in TONE_ORDER}
    skipped = {tone: 0 for tone in TONE_ORDER}

    for family in catalog.families:
        base_record = embedding_set.resolve(family.base.hex_id)
        for tone in TONE_ORDER:
            seq = family.variant(tone)
            if seq is None:
                continue
            text_id = pairing.get(seq.hex_id)
            emoji_record = embedding_set.resolve(seq.hex_id)
            text_record = embedding_set.get(text_id) if text_id else None
            if emoji_record is None or text_record is None:
                skipped[tone] += 1
                continue
            emoji_seq = emoji_record.sequence
            if strip_modifier_tokens and tone is not SkinTone.DEFAULT:
                emoji_seq = _strip_modifier_tokens(
                    emoji_seq, base_record.sequence if base_record else None
                )
            cos = cosine_distance(emoji_record.aggregated, text_record.aggregated)
            wmd_cos, _ = wmd(emoji_seq, text_record.sequence, GroundMetric.COSINE)
            wmd_euc, _ = wmd(emoji_seq, text_record.sequence, GroundMetric.EUCLIDEAN)
            sums[tone] += (cos, wmd_cos, wmd_euc)
            pairs[tone] += 1

    if all(count == 0 for count in pairs.values()):
        raise AnalysisError("no emoji/description pairs resolvable in the embedding set")
    rows = {}
    for tone in TONE_ORDER:
        if pairs[tone]:
            mean = sums[tone] / pairs[tone]
            rows[tone] = AlignmentRow(
                float(mean[0]), float(mean[1]), float(mean[2]), pairs[tone], skipped[tone]
            )
        else:
            rows[tone] = AlignmentRow(float("nan"), float("nan"), float("nan"), 0, skipped[tone])
    return AlignmentTable(rows)


@dataclass(frozen=True)
class TonePairMatrix:
    """Mean pairwise cosine distance per tone pair; NaN marks missing pairs."""

    values: np.ndarray  # (6, 6), symmetric, zero diagonal
    counts: np.ndarray  # (6, 6) int, families averaged per cell
    sample_count: int
    tones: tuple[SkinTone, ...] = field(default=TONE_ORDER)


def tone_pair_matrix(families: list[EmojiFamily], embedding_set: EmbeddingSet) -> TonePairMatrix:
    """Average cosine distance between tone variants of the same base."""
    size = len(TONE_ORDER)
    sums = np.zeros((size, size))
    counts = np.zeros((size, size), dtype=int)
    contributing: set[tuple[int, ...]] = set()

    for family in families:
        vectors: dict[int, np.ndarray] = {}
        for idx, tone in enumerate(TONE_ORDER):
            seq = family.variant(tone)
            if seq is None:
                continue
            record = embedding_set.resolve(seq.hex_id)
            if record is not None:
                vectors[idx] = record.aggregated
        if len(vectors) >= 2:
            contributing.add(family.key)
        for i in vectors:
            for j in vectors:
                if i < j:
                    d = cosine_distance(vectors[i], vectors[j])
                    sums[i, j] += d
                    sums[j, i] += d
                    counts[i, j] += 1
                    counts[j, i] += 1

    values = np.full((size, size), np.nan)
    np.fill_diagonal(values, 0.0)
    mask = counts > 0
    values[mask] = sums[mask] / counts[mask]
    return TonePairMatrix(values, counts, len(contributing))
