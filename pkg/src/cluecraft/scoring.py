"""Candidate-clue scoring: the additive blue/red score, the thresholded
min-blue score, dictionary relatedness, and the DETECT re-weighting term."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .core import ScoreBreakdown
from .corpusfreq import DEFAULT_ALPHA, DocFreqTable, FreqParams, freq_score
from .embeddings import EmbeddingStore, UnknownToken, similarity

# Candidates failing the thresholded scorer's constraints keep this
# sentinel so no passing candidate can ever rank below them.
KIM_FAIL = float("-inf")

OURS = "ours"
KIM = "kim"


@dataclass(frozen=True)
class ScoringParams:
    lambda_b: float = 1.0
    lambda_r: float = 0.5
    lambda_t: float = 0.3  # no published value; tune per representation
    lambda_f: float = 2.0
    lambda_d: float = 2.0  # use 1.0 for the top-10k-filtered representation
    alpha: float = DEFAULT_ALPHA
    weights: tuple[float, float, float, float] = (1.0, 1.1, 1.1, 1.2)
    top_t: int = 500
    m: int = 2
    levels: int = 3

    def __post_init__(self) -> None:
        if min(self.lambda_b, self.lambda_r, self.lambda_f, self.lambda_d) < 0:
            raise ValueError("lambda weights must be >= 0")
        if self.m < 1:
            raise ValueError("m must be >= 1")

    def to_dict(self) -> dict:
        return {
            "lambda_b": self.lambda_b,
            "lambda_r": self.lambda_r,
            "lambda_t": self.lambda_t,
            "lambda_f": self.lambda_f,
            "lambda_d": self.lambda_d,
            "alpha": self.alpha,
            "weights": list(self.weights),
            "top_t": self.top_t,
            "m": self.m,
            "levels": self.levels,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScoringParams":
        kwargs = dict(data)
        if "weights" in kwargs:
            kwargs["weights"] = tuple(kwargs["weights"])
        return cls(**kwargs)


@dataclass(frozen=True)
class SimilarityProfile:
    """s(clue, .) evaluated against the intended pair and the red team."""

    clue: str
    blue_sims: dict[str, float]
    red_sims: dict[str, float]


def score_g(profile: SimilarityProfile, params: ScoringParams) -> float:
    """Additive score: reward closeness to the intended words, penalize the
    closest red word. Blue terms are summed in token order so results are
    bit-identical across runs."""
    blue = math.fsum(profile.blue_sims[b] for b in sorted(profile.blue_sims))
    red = max(profile.red_sims.values()) if profile.red_sims else 0.0
    return params.lambda_b * blue - params.lambda_r * red


def score_gkim(profile: SimilarityProfile, params: ScoringParams) -> tuple[float, bool]:
    """Min-blue similarity, gated on the threshold and on beating every red
    word; failing candidates score 0."""
    min_blue = min(profile.blue_sims.values())
    max_red = max(profile.red_sims.values()) if profile.red_sims else float("-inf")
    passed = min_blue > params.lambda_t and min_blue > max_red
    return (min_blue if passed else 0.0), passed


def dict_relatedness(dict_store: EmbeddingStore | None, w1: str, w2: str) -> float:
    """Cosine distance in the dictionary-embedding space; out-of-vocabulary
    pairs get distance 1 (zero relatedness) so the function is total."""
    if dict_store is None:
        return 1.0
    try:
        return 1.0 - similarity(dict_store, w1, w2)
    except UnknownToken:
        return 1.0


def detect_components(
    clue: str,
    intended: tuple[str, ...],
    red: tuple[str, ...],
    df_table: DocFreqTable | None,
    dict_store: EmbeddingStore | None,
    params: ScoringParams,
    relatedness_cache: dict[tuple[str, str], float] | None = None,
) -> tuple[float, float, float, float]:
    """Returns (freq_term, dict_blue_sum, dict_red_max, detect)."""
    if df_table is not None:
        freq = freq_score(df_table, clue, FreqParams(alpha=params.alpha))
    else:
        freq = -1.0

    def rel(word: str) -> float:
        if relatedness_cache is None:
            return 1.0 - dict_relatedness(dict_store, clue, word)
        key = (clue, word)
        value = relatedness_cache.get(key)
        if value is None:
            value = relatedness_cache[key] = 1.0 - dict_relatedness(dict_store, clue, word)
        return value

    blue_sum = math.fsum(rel(b) for b in sorted(intended))
    red_max = max((rel(r) for r in sorted(red)), default=0.0)
    detect = params.lambda_f * freq + params.lambda_d * (blue_sum - red_max)
    return freq, blue_sum, red_max, detect


def detect_score(
    clue: str,
    intended: tuple[str, ...],
    red: tuple[str, ...],
    df_table: DocFreqTable | None,
    dict_store: EmbeddingStore | None,
    params: ScoringParams,
) -> float:
    return detect_components(clue, intended, red, df_table, dict_store, params)[3]


def total_score(
    base: float,
    passed: bool,
    detect: float,
    scoring_fn: str,
    detect_enabled: bool,
) -> float:
    """DETECT is added on top of the base score; with the thresholded scorer
    it only applies to constraint-passing candidates, failing ones keep the
    sentinel minimum."""
    if scoring_fn == KIM and not passed:
        return KIM_FAIL
    return base + detect if detect_enabled else base


def evaluate_candidate(
    profile: SimilarityProfile,
    red_words: tuple[str, ...],
    params: ScoringParams,
    scoring_fn: str,
    detect_enabled: bool,
    df_table: DocFreqTable | None,
    dict_store: EmbeddingStore | None,
    relatedness_cache: dict[tuple[str, str], float] | None = None,
) -> ScoreBreakdown:
    if scoring_fn == OURS:
        base, passed = score_g(profile, params), True
    elif scoring_fn == KIM:
        base, passed = score_gkim(profile, params)
    else:
        raise ValueError(f"unknown scoring function {scoring_fn!r}")
    intended = tuple(sorted(profile.blue_sims))
    if detect_enabled:
        freq, blue_sum, red_max, detect = detect_components(
            profile.clue, intended, red_words, df_table, dict_store, params,
            relatedness_cache,
        )
    else:
        freq = blue_sum = red_max = detect = 0.0
    total = total_score(base, passed, detect, scoring_fn, detect_enabled)
    return ScoreBreakdown(
        base=base,
        freq_term=freq,
        dict_blue_sum=blue_sum,
        dict_red_max=red_max,
        detect=detect,
        total=total,
        kim_constraint_passed=passed,
    )
