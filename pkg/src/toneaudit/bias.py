"""Tone-bias metrics: relative norm distance, association tests, sentiment skew.

The permutation test uses exhaustive partition enumeration when the
partition count is small and a seeded Monte Carlo fallback otherwise;
per-test seeds derive from (global seed, test name) so parallel runs are
reproducible.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .catalog import EmojiFamily, SkinTone, TONE_ORDER
from .similarity import DomainError, AnalysisError
from .store import EmbeddingSet

# Comparisons between permuted statistics tolerate summation-order noise.
_STAT_TIE_TOL = 1e-12


class LexiconError(ValueError):
    """Raised for malformed lexicon files."""


class ConfigError(ValueError):
    """Raised when configured attribute/target ids cannot be resolved."""


class TrainingError(RuntimeError):
    """Raised when the sentiment classifier cannot be trained."""


class NumericError(ArithmeticError):
    """Raised when probabilities degenerate and cannot be normalized."""


# ---------------------------------------------------------------------------
# Neutral lexicon
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VadEntry:
    word: str
    valence: float
    arousal: float
    dominance: float


@dataclass(frozen=True)
class NeutralLexicon:
    entries: tuple[tuple[str, float], ...]  # (word, valence)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(word for word, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _iter_lines(stream: str | IO[str] | Iterable[str]) -> Iterator[str]:
    if isinstance(stream, str):
        yield from stream.splitlines()
    else:
        for line in stream:
            yield line.rstrip("\n")


def load_vad(stream: str | IO[str] | Iterable[str]) -> list[VadEntry]:
    """Load a tab-separated word/valence/arousal/dominance lexicon."""
    entries: list[VadEntry] = []
    lines = _iter_lines(stream)
    for line_number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if line_number == 1 and fields and not _is_number(fields[1] if len(fields) > 1 else ""):
            continue  # header row
        if len(fields) != 4:
            raise LexiconError(f"line {line_number}: expected 4 tab-separated fields")
        word = fields[0].strip()
        try:
            valence, arousal, dominance = (float(f) for f in fields[1:])
        except ValueError:
            raise LexiconError(f"line {line_number}: non-numeric score")
        if not word:
            raise LexiconError(f"line {line_number}: empty word")
        entries.append(VadEntry(word, valence, arousal, dominance))
    return entries


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def filter_neutral(entries: Sequence[VadEntry], low: float, high: float) -> NeutralLexicon:
    """Retain exactly the entries with low <= valence <= high (inclusive)."""
    if not (0.0 <= low <= high <= 1.0):
        raise ValueError(f"invalid valence bounds [{low}, {high}]")
    kept = tuple((e.word, e.valence) for e in entries if low <= e.valence <= high)
    return NeutralLexicon(kept)


# ---------------------------------------------------------------------------
# Relative norm distance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ToneGroup:
    tone: SkinTone
    vectors: np.ndarray  # (k, d)
    centroid: np.ndarray  # (d,)

    @classmethod
    def from_vectors(
        cls, tone: SkinTone, vectors: Sequence[np.ndarray] | np.ndarray, normalize: bool = True
    ) -> "ToneGroup":
        matrix = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        if matrix.shape[0] == 0:
            raise DomainError("tone group needs at least one vector")
        if normalize:
            norms = np.linalg.norm(matrix, axis=1, keepdims=True)
            if np.any(norms == 0.0):
                raise DomainError("cannot normalize a zero vector")
            matrix = matrix / norms
        return cls(tone, matrix, matrix.mean(axis=0))


def rnd(
    neutral: Sequence[np.ndarray] | np.ndarray, group1: ToneGroup, group2: ToneGroup
) -> float:
    """Sum over neutral words of ||w - c1|| - ||w - c2||.

    Positive means the neutral set sits closer to the second group's
    centroid; swapping groups negates the score exactly.
    """
    matrix = np.atleast_2d(np.asarray(neutral, dtype=np.float64))
    if matrix.shape[0] == 0:
        raise DomainError("neutral set is empty")
    if matrix.shape[1] != group1.centroid.shape[0] or matrix.shape[1] != group2.centroid.shape[0]:
        raise DomainError("neutral/centroid dimension mismatch")
    d1 = np.linalg.norm(matrix - group1.centroid, axis=1)
    d2 = np.linalg.norm(matrix - group2.centroid, axis=1)
    return float(np.sum(d1 - d2))


def rnd_matrix(
    families: Sequence[EmojiFamily],
    emoji_set: EmbeddingSet,
    neutral: NeutralLexicon,
    word_set: EmbeddingSet,
    normalize: bool = True,
) -> np.ndarray:
    """Pairwise RND over tone groups; antisymmetric with zero diagonal.

    Entry (s, t) uses groups built from the families that embed both
    variants. Pairs with no common family are NaN.
    """
    neutral_vectors = [
        word_set.records[word].aggregated for word in neutral.words if word in word_set
    ]
    if not neutral_vectors:
        raise AnalysisError("no neutral words resolvable in the word embedding set")
    neutral_matrix = np.vstack(neutral_vectors)

    tone_vectors: list[dict[int, np.ndarray]] = []
    for family in families:
        per_family: dict[int, np.ndarray] = {}
        for idx, tone in enumerate(TONE_ORDER):
            seq = family.variant(tone)
            if seq is None:
                continue
            record = emoji_set.resolve(seq.hex_id)
            if record is not None:
                per_family[idx] = record.aggregated
        tone_vectors.append(per_family)

    size = len(TONE_ORDER)
    matrix = np.full((size, size), np.nan)
    np.fill_diagonal(matrix, 0.0)
    for i in range(size):
        for j in range(i + 1, size):
            vec_i = [fam[i] for fam in tone_vectors if i in fam and j in fam]
            vec_j = [fam[j] for fam in tone_vectors if i in fam and j in fam]
            if not vec_i:
                continue
            g_i = ToneGroup.from_vectors(TONE_ORDER[i], vec_i, normalize)
            g_j = ToneGroup.from_vectors(TONE_ORDER[j], vec_j, normalize)
            score = rnd(neutral_matrix, g_i, g_j)
            matrix[i, j] = score
            matrix[j, i] = -score
    return matrix


# ---------------------------------------------------------------------------
# WEAT
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PermutationConfig:
    seed: int = 0
    samples: int = 10_000
    exact_limit: int = 20_000
    name: str = ""

    def derived_seed(self) -> int:
        digest = hashlib.sha256(f"{self.seed}|{self.name}".encode()).digest()
        return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class WeatResult:
    statistic: float
    effect_size: float
    p_value: float
    permutations: int
    exact: bool

    def __post_init__(self):
        if not 0.0 < self.p_value <= 1.0:
            raise ValueError("p-value must lie in (0, 1]")


def _as_matrix(vectors, name: str) -> np.ndarray:
    matrix = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if matrix.shape[0] == 0:
        raise DomainError(f"{name} set is empty")
    if np.any(np.linalg.norm(matrix, axis=1) == 0.0):
        raise DomainError(f"{name} set contains a zero vector")
    return matrix


def _associations(targets: np.ndarray, attr_a: np.ndarray, attr_b: np.ndarray) -> np.ndarray:
    """s(w, A, B) = mean cos(w, a) - mean cos(w, b) for each target row."""

    def mean_cos(words: np.ndarray, attrs: np.ndarray) -> np.ndarray:
        wn = words / np.linalg.norm(words, axis=1, keepdims=True)
        an = attrs / np.linalg.norm(attrs, axis=1, keepdims=True)
        return (wn @ an.T).mean(axis=1)

    return mean_cos(targets, attr_a) - mean_cos(targets, attr_b)


def weat(
    x_vectors,
    y_vectors,
    a_vectors,
    b_vectors,
    config: PermutationConfig = PermutationConfig(),
) -> WeatResult:
    """Association test statistic, effect size, and permutation p-value.

    The statistic is sum_x s(x,A,B) - sum_y s(y,A,B); the effect size
    divides the mean difference by the population standard deviation of
    s over X union Y (0 when that deviation is 0). The p-value counts
    equal-size partitions whose statistic is >= the observed one,
    identity partition included, so it is always positive.
    """
    x = _as_matrix(x_vectors, "X")
    y = _as_matrix(y_vectors, "Y")
    a = _as_matrix(a_vectors, "A")
    b = _as_matrix(b_vectors, "B")
    if x.shape[0] != y.shape[0]:
        raise DomainError(f"|X| = {x.shape[0]} but |Y| = {y.shape[0]}; sizes must match")

    n = x.shape[0]
    s_all = _associations(np.vstack([x, y]), a, b)
    s_x, s_y = s_all[:n], s_all[n:]
    statistic = float(s_x.sum() - s_y.sum())
    spread = float(np.std(s_all))
    effect = float((s_x.mean() - s_y.mean()) / spread) if spread > 0.0 else 0.0

    total = s_all.sum()
    observed = statistic

    def partition_statistic(subset_sum: float) -> float:
        return 2.0 * subset_sum - total

    n_partitions = _binomial(2 * n, n)
    if n_partitions <= config.exact_limit:
        hits = 0
        for combo in itertools.combinations(range(2 * n), n):
            stat = partition_statistic(s_all[list(combo)].sum())
            if stat >= observed - _STAT_TIE_TOL:
                hits += 1
        return WeatResult(statistic, effect, hits / n_partitions, n_partitions, True)

    rng = np.random.default_rng(config.derived_seed())
    hits = 0
    indices = np.arange(2 * n)
    for _ in range(config.samples):
        rng.shuffle(indices)
        stat = partition_statistic(s_all[indices[:n]].sum())
        if stat >= observed - _STAT_TIE_TOL:
            hits += 1
    p_value = (1 + hits) / (1 + config.samples)
    return WeatResult(statistic, effect, p_value, config.samples, False)


def _binomial(n: int, k: int) -> int:
    result = 1
    for i in range(1, k + 1):
        result = result * (n - k + i) // i
    return result


@dataclass(frozen=True)
class WeatCell:
    """One test in a suite: a tone pair evaluated in one context."""

    x_tone: SkinTone
    y_tone: SkinTone
    context: str
    result: WeatResult


def ordered_tone_pairs() -> list[tuple[SkinTone, SkinTone]]:
    return [
        (TONE_ORDER[i], TONE_ORDER[j])
        for i in range(len(TONE_ORDER))
        for j in range(i + 1, len(TONE_ORDER))
    ]


def resolve_ids(embedding_set: EmbeddingSet, ids: Sequence[str], set_name: str) -> np.ndarray:
    records = [embedding_set.resolve(item) for item in ids]
    missing = [item for item, record in zip(ids, records) if record is None]
    if missing:
        raise ConfigError(f"set {set_name!r}: unresolvable ids: {', '.join(missing)}")
    return np.vstack([record.aggregated for record in records])


def weat_role_suite(
    families: Sequence[EmojiFamily],
    emoji_set: EmbeddingSet,
    good_ids: Sequence[str],
    bad_ids: Sequence[str],
    config: PermutationConfig = PermutationConfig(),
) -> list[WeatCell]:
    """Per-role, per-tone-pair tests with singleton targets.

    X is one role's variant at the first tone, Y the same role at the
    second; attributes are the good/bad emoji sets.
    """
    attr_a = resolve_ids(emoji_set, good_ids, "good")
    attr_b = resolve_ids(emoji_set, bad_ids, "bad")
    cells: list[WeatCell] = []
    for x_tone, y_tone in ordered_tone_pairs():
        for family in families:
            seq_x = family.variant(x_tone)
            seq_y = family.variant(y_tone)
            if seq_x is None or seq_y is None:
                continue
            rec_x = emoji_set.resolve(seq_x.hex_id)
            rec_y = emoji_set.resolve(seq_y.hex_id)
            if rec_x is None or rec_y is None:
                continue
            role = family.base.name
            cell_config = PermutationConfig(
                seed=config.seed,
                samples=config.samples,
                exact_limit=config.exact_limit,
                name=f"roles|{role}|{x_tone.label}|{y_tone.label}",
            )
            result = weat([rec_x.aggregated], [rec_y.aggregated], attr_a, attr_b, cell_config)
            cells.append(WeatCell(x_tone, y_tone, role, result))
    return cells


def weat_tone_target_suite(
    families: Sequence[EmojiFamily],
    emoji_set: EmbeddingSet,
    word_set: EmbeddingSet,
    benchmarks: Sequence[tuple[str, Sequence[str], Sequence[str]]],
    config: PermutationConfig = PermutationConfig(),
) -> list[WeatCell]:
    """Tone groups as targets against word attribute benchmarks.

    For each tone pair, targets are the variants of every family embedding
    both tones (equal sizes by construction); each benchmark contributes
    one test.
    """
    cells: list[WeatCell] = []
    attr_cache = {
        name: (resolve_ids(word_set, a_ids, f"{name}/A"), resolve_ids(word_set, b_ids, f"{name}/B"))
        for name, a_ids, b_ids in benchmarks
    }
    for x_tone, y_tone in ordered_tone_pairs():
        x_vecs, y_vecs = [], []
        for family in families:
            seq_x = family.variant(x_tone)
            seq_y = family.variant(y_tone)
            if seq_x is None or seq_y is None:
                continue
            rec_x = emoji_set.resolve(seq_x.hex_id)
            rec_y = emoji_set.resolve(seq_y.hex_id)
            if rec_x is None or rec_y is None:
                continue
            x_vecs.append(rec_x.aggregated)
            y_vecs.append(rec_y.aggregated)
        if not x_vecs:
            continue
        for name, _, _ in benchmarks:
            attr_a, attr_b = attr_cache[name]
            cell_config = PermutationConfig(
                seed=config.seed,
                samples=config.samples,
                exact_limit=config.exact_limit,
                name=f"benchmark|{name}|{x_tone.label}|{y_tone.label}",
            )
            result = weat(x_vecs, y_vecs, attr_a, attr_b, cell_config)
            cells.append(WeatCell(x_tone, y_tone, name, result))
    return cells


def mean_effect_sizes(cells: Sequence[WeatCell]) -> dict[tuple[SkinTone, SkinTone], float]:
    sums: dict[tuple[SkinTone, SkinTone], list[float]] = {}
    for cell in cells:
        sums.setdefault((cell.x_tone, cell.y_tone), []).append(cell.result.effect_size)
    return {pair: float(np.mean(values)) for pair, values in sums.items()}


def significance_rates(
    cells: Sequence[WeatCell], alpha: float = 0.05
) -> dict[tuple[SkinTone, SkinTone], float]:
    """Share of tests per tone pair with p < alpha."""
    totals: dict[tuple[SkinTone, SkinTone], list[int]] = {}
    for cell in cells:
        bucket = totals.setdefault((cell.x_tone, cell.y_tone), [0, 0])
        bucket[0] += 1 if cell.result.p_value < alpha else 0
        bucket[1] += 1
    return {pair: hits / count for pair, (hits, count) in totals.items()}


# ---------------------------------------------------------------------------
# RNSB
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OptConfig:
    step: float | None = None  # None: 1 / Lipschitz bound of the gradient
    max_iterations: int = 50_000
    tolerance: float = 1e-8


@dataclass(frozen=True)
class SentimentDirection:
    weights: np.ndarray
    bias: float
    lambda_: float
    training_loss: float


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    exp_z = np.exp(z[~positive])
    out[~positive] = exp_z / (1.0 + exp_z)
    return out


def train_sentiment_direction(
    vectors: Sequence[np.ndarray] | np.ndarray,
    labels: Sequence[str] | Sequence[int],
    lambda_: float = 0.1,
    config: OptConfig = OptConfig(),
) -> SentimentDirection:
    """Fit the negative-sentiment direction by regularized logistic loss.

    Minimizes sum_i l(y_i, theta.x_i + b) + lambda * ||theta||^2 with
    full-batch gradient descent from a zero start; "neg" is the positive
    class. Deterministic for a fixed config.
    """
    if lambda_ < 0:
        raise ValueError("lambda must be nonnegative")
    matrix = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    y = np.array(
        [1.0 if label in ("neg", 1, True) else 0.0 for label in labels], dtype=np.float64
    )
    if matrix.shape[0] != y.shape[0]:
        raise ValueError("vector/label count mismatch")
    if y.min() == y.max():
        raise TrainingError("training needs both positive and negative examples")

    k, d = matrix.shape
    step = config.step
    if step is None:
        augmented = np.hstack([matrix, np.ones((k, 1))])
        lipschitz = 0.25 * np.linalg.norm(augmented, 2) ** 2 + 2.0 * lambda_
        step = 1.0 / lipschitz

    theta = np.zeros(d)
    bias = 0.0
    grad_norm = np.inf
    for _ in range(config.max_iterations):
        z = matrix @ theta + bias
        residual = _sigmoid(z) - y
        grad_theta = matrix.T @ residual + 2.0 * lambda_ * theta
        grad_bias = residual.sum()
        grad_norm = float(np.sqrt(grad_theta @ grad_theta + grad_bias * grad_bias))
        if grad_norm <= config.tolerance:
            break
        theta -= step * grad_theta
        bias -= step * grad_bias
    if grad_norm > config.tolerance:
        raise TrainingError(
            f"no convergence within {config.max_iterations} iterations "
            f"(gradient norm {grad_norm:.3e})"
        )

    z = matrix @ theta + bias
    # log(sigmoid) computed stably via logaddexp.
    loss = float(np.sum(np.logaddexp(0.0, z) - y * z) + lambda_ * (theta @ theta))
    return SentimentDirection(theta, float(bias), lambda_, loss)


def negative_probability(direction: SentimentDirection, vector: np.ndarray) -> float:
    z = float(np.asarray(vector, dtype=np.float64) @ direction.weights + direction.bias)
    return float(_sigmoid(np.array([z]))[0])


@dataclass(frozen=True)
class RnsbResult:
    shares: Mapping[str, float]
    kl_divergence: float


def rnsb(direction: SentimentDirection, targets: Mapping[str, np.ndarray]) -> RnsbResult:
    """Normalized negative-sentiment shares and their KL divergence from uniform."""
    if len(targets) < 2:
        raise ValueError("RNSB needs at least two targets")
    ids = list(targets)
    probs = np.array([negative_probability(direction, targets[item]) for item in ids])
    total = probs.sum()
    if total == 0.0:
        raise NumericError("all negative-sentiment probabilities are zero")
    if np.any(probs == 0.0):
        raise NumericError("a negative-sentiment probability underflowed to zero")
    shares = probs / total
    t = len(ids)
    kl = float(np.sum(shares * np.log(t * shares)))
    if -1e-12 < kl < 0.0:
        kl = 0.0
    return RnsbResult(dict(zip(ids, shares.tolist())), kl)
