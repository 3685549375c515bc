"""Trials, ranked-guess responses, precision@2 / recall@4 metrics,
significance testing, and a simulated embedding guesser."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .core import Board
from .embeddings import EmbeddingStore, UnknownToken, similarity


class InvalidResponse(ValueError):
    pass


class UnknownClue(KeyError):
    pass


@dataclass(frozen=True)
class TrialConfig:
    representation: str
    scoring_fn: str
    detect: bool

    @property
    def label(self) -> str:
        return f"{self.representation}|{self.scoring_fn}|{'detect' if self.detect else 'plain'}"


@dataclass(frozen=True)
class Trial:
    id: str
    board: Board
    display_order: tuple[str, ...]  # shuffled; colors never exposed
    clue: str
    intended: tuple[str, ...]  # hidden from responders
    config: TrialConfig

    def __post_init__(self) -> None:
        if self.clue in self.board.words:
            raise InvalidResponse(f"clue {self.clue!r} is a board word")
        if set(self.display_order) != set(self.board.words) or len(
            self.display_order
        ) != len(self.board.words):
            raise InvalidResponse("display_order must be a permutation of the board")

    def public_view(self) -> dict:
        """Payload safe to show a responder: no colors, no intended pair."""
        return {
            "trialId": self.id,
            "words": list(self.display_order),
            "clue": self.clue,
        }


@dataclass(frozen=True)
class TrialResponse:
    trial_id: str
    rank1: str
    rank2: str
    rank3: str | None = None
    rank4: str | None = None
    responder_id: str = "anonymous"
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if not self.rank1 or not self.rank2:
            raise InvalidResponse("ranks 1 and 2 are required")
        if self.rank3 is None and self.rank4 is not None:
            raise InvalidResponse("rank 4 requires rank 3")
        ranks = self.ranks()
        if len(set(ranks)) != len(ranks):
            raise InvalidResponse(f"duplicate ranked words: {ranks}")

    def ranks(self) -> tuple[str, ...]:
        return tuple(r for r in (self.rank1, self.rank2, self.rank3, self.rank4) if r)


def validate_response(response: TrialResponse, trial: Trial) -> None:
    for word in response.ranks():
        if word not in trial.board.words:
            raise InvalidResponse(f"{word!r} is not a board word")


def trial_metrics(response: TrialResponse, intended: tuple[str, ...]) -> tuple[float, float]:
    """precision@2 and recall@4 for one response, each in {0, 0.5, 1}."""
    m = len(intended)
    first_two = {response.rank1, response.rank2}
    p2 = len(first_two & set(intended)) / m
    r4 = len(set(response.ranks()) & set(intended)) / m
    return p2, r4


@dataclass(frozen=True)
class ZTestResult:
    z: float
    p_value: float
    degenerate: bool = False


def two_proportion_ztest(p1: float, n1: int, p2: float, n2: int) -> ZTestResult:
    """Pooled two-proportion z statistic with a two-sided normal p-value."""
    if n1 < 1 or n2 < 1:
        raise ValueError("sample sizes must be >= 1")
    pooled = (p1 * n1 + p2 * n2) / (n1 + n2)
    if pooled <= 0.0 or pooled >= 1.0:
        return ZTestResult(z=0.0, p_value=1.0, degenerate=True)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    z = (p1 - p2) / se
    p_value = math.erfc(abs(z) / math.sqrt(2.0))
    return ZTestResult(z=z, p_value=p_value)


@dataclass(frozen=True)
class ConfigMetrics:
    precision_at_2: float
    recall_at_4: float
    n: int


@dataclass(frozen=True)
class MetricsReport:
    per_config: dict[str, ConfigMetrics]
    ztests: dict[str, dict[str, ZTestResult]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_config": {
                label: {
                    "precision_at_2": m.precision_at_2,
                    "recall_at_4": m.recall_at_4,
                    "n": m.n,
                }
                for label, m in sorted(self.per_config.items())
            },
            "ztests": {
                label: {
                    metric: {"z": t.z, "p_value": t.p_value, "degenerate": t.degenerate}
                    for metric, t in sorted(tests.items())
                }
                for label, tests in sorted(self.ztests.items())
            },
        }


def aggregate(pairs: Iterable[tuple[TrialResponse, Trial]]) -> MetricsReport:
    """Per-config mean metrics plus z-tests comparing each configuration
    with and without DETECT.

    The z-test treats each intended word as one Bernoulli outcome, so a
    config with n trials contributes 2n samples.
    """
    buckets: dict[TrialConfig, list[tuple[float, float]]] = {}
    for response, trial in pairs:
        if response.trial_id != trial.id:
            raise InvalidResponse(
                f"response for {response.trial_id!r} paired with trial {trial.id!r}"
            )
        validate_response(response, trial)
        buckets.setdefault(trial.config, []).append(
            trial_metrics(response, trial.intended)
        )
    per_config: dict[str, ConfigMetrics] = {}
    slots_per_trial: dict[TrialConfig, int] = {}
    for config, metrics in buckets.items():
        n = len(metrics)
        per_config[config.label] = ConfigMetrics(
            precision_at_2=math.fsum(m[0] for m in metrics) / n,
            recall_at_4=math.fsum(m[1] for m in metrics) / n,
            n=n,
        )
        slots_per_trial[config] = 2
    ztests: dict[str, dict[str, ZTestResult]] = {}
    for config in sorted(buckets, key=lambda c: c.label):
        if config.detect:
            continue
        partner = TrialConfig(config.representation, config.scoring_fn, True)
        if partner not in buckets:
            continue
        a, b = per_config[config.label], per_config[partner.label]
        ztests[f"{config.representation}|{config.scoring_fn}"] = {
            "precision_at_2": two_proportion_ztest(
                a.precision_at_2, 2 * a.n, b.precision_at_2, 2 * b.n
            ),
            "recall_at_4": two_proportion_ztest(
                a.recall_at_4, 2 * a.n, b.recall_at_4, 2 * b.n
            ),
        }
    return MetricsReport(per_config=per_config, ztests=ztests)


def simulate_guesser(store: EmbeddingStore, trial: Trial) -> TrialResponse:
    """Bot-evaluation guesser: rank board words by similarity to the clue.

    Out-of-vocabulary board words sort last; all ties break alphabetically.
    """
    if trial.clue not in store:
        raise UnknownClue(trial.clue)

    def key(word: str):
        try:
            return (-similarity(store, trial.clue, word), word)
        except UnknownToken:
            return (math.inf, word)

    ranked = sorted(trial.board.words, key=key)[:4]
    ranked += [None] * (4 - len(ranked))
    return TrialResponse(
        trial_id=trial.id,
        rank1=ranked[0],
        rank2=ranked[1],
        rank3=ranked[2],
        rank4=ranked[3],
        responder_id="bot-evaluation",
    )


def shuffled_display_order(board: Board, seed: int) -> tuple[str, ...]:
    words = sorted(board.words)
    random.Random(seed).shuffle(words)
    return tuple(words)


# ---------------------------------------------------------------------------
# Persistence: one response per line

def response_to_dict(response: TrialResponse) -> dict:
    return {
        "trialId": response.trial_id,
        "rank1": response.rank1,
        "rank2": response.rank2,
        "rank3": response.rank3,
        "rank4": response.rank4,
        "responderId": response.responder_id,
        "timestamp": response.timestamp,
    }


def response_from_dict(data: dict) -> TrialResponse:
    return TrialResponse(
        trial_id=data["trialId"],
        rank1=data["rank1"],
        rank2=data["rank2"],
        rank3=data.get("rank3"),
        rank4=data.get("rank4"),
        responder_id=data.get("responderId", "anonymous"),
        timestamp=data.get("timestamp", 0.0),
    )


def append_response(path: str | Path, response: TrialResponse) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(response_to_dict(response), sort_keys=True) + "\n")


def load_responses(path: str | Path) -> list[TrialResponse]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(response_from_dict(json.loads(line)))
    return out


def render_report(report: MetricsReport) -> str:
    """Plain-text table: one row per configuration."""
    lines = [f"{'configuration':<40} {'precision@2':>12} {'recall@4':>10} {'n':>6}"]
    for label, m in sorted(report.per_config.items()):
        lines.append(
            f"{label:<40} {m.precision_at_2:>12.3f} {m.recall_at_4:>10.3f} {m.n:>6d}"
        )
    if report.ztests:
        lines.append("")
        lines.append(f"{'DETECT vs baseline':<40} {'z (p@2)':>10} {'p-value':>10}")
        for label, tests in sorted(report.ztests.items()):
            t = tests["precision_at_2"]
            lines.append(f"{label:<40} {t.z:>10.3f} {t.p_value:>10.4f}")
    return "\n".join(lines)
