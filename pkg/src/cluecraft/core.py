"""Domain types for boards, tokens and clue results, plus board generation."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

# Identifier recorded next to any seeded output so boards can be regenerated.
RNG_ALGORITHM = "python-random-mt19937"


class EmptyToken(ValueError):
    """Raised when a token is empty or whitespace-only."""


class InsufficientWords(ValueError):
    """Word list too small for the requested board size."""


class MalformedBoard(ValueError):
    """Board file does not match the expected format."""


class OverlappingTeams(MalformedBoard):
    """A word appears on both teams."""


class WrongCount(MalformedBoard):
    """Team sizes differ or contain duplicates."""


def normalize_token(raw: str) -> str:
    """Lowercase, trim, and join internal whitespace runs with underscores.

    Idempotent: applying it twice gives the same token.
    """
    if raw is None or not raw.strip():
        raise EmptyToken(f"empty token: {raw!r}")
    return "_".join(raw.strip().lower().split())


@dataclass(frozen=True)
class Board:
    blue: frozenset[str]
    red: frozenset[str]
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.blue & self.red:
            raise OverlappingTeams(f"words on both teams: {sorted(self.blue & self.red)}")
        if len(self.blue) != len(self.red):
            raise WrongCount(f"{len(self.blue)} blue vs {len(self.red)} red")
        if not self.blue:
            raise WrongCount("empty board")
        for w in self.blue | self.red:
            if w != normalize_token(w):
                raise MalformedBoard(f"unnormalized board word: {w!r}")

    @property
    def words(self) -> frozenset[str]:
        return self.blue | self.red


@dataclass(frozen=True)
class ScoreBreakdown:
    """Components of a candidate clue's score.

    total = base + detect when DETECT is enabled, else base;
    detect = lambda_f * freq_term + lambda_d * (dict_blue_sum - dict_red_max).
    """

    base: float
    freq_term: float
    dict_blue_sum: float
    dict_red_max: float
    detect: float
    total: float
    kim_constraint_passed: bool = True


@dataclass(frozen=True)
class ClueResult:
    clue: str
    intended: tuple[str, ...]  # sorted
    score: float
    breakdown: ScoreBreakdown
    representation: str
    scoring_fn: str  # "ours" | "kim"
    detect: bool
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "clue": self.clue,
            "intended": list(self.intended),
            "score": self.score,
            "breakdown": {
                "base": self.breakdown.base,
                "freq_term": self.breakdown.freq_term,
                "dict_blue_sum": self.breakdown.dict_blue_sum,
                "dict_red_max": self.breakdown.dict_red_max,
                "detect": self.breakdown.detect,
                "total": self.breakdown.total,
                "kim_constraint_passed": self.breakdown.kim_constraint_passed,
            },
            "representation": self.representation,
            "scoring_fn": self.scoring_fn,
            "detect": self.detect,
            "notes": list(self.notes),
        }


def generate_board(wordlist: list[str], n_per_team: int, seed: int) -> Board:
    """Sample 2*n_per_team distinct words without replacement; first half blue.

    Pure function of (wordlist, n_per_team, seed).
    """
    words = [normalize_token(w) for w in wordlist]
    if len(set(words)) != len(words):
        raise InsufficientWords("wordlist contains duplicates after normalization")
    if len(words) < 2 * n_per_team:
        raise InsufficientWords(f"need {2 * n_per_team} words, have {len(words)}")
    rng = random.Random(seed)
    picked = rng.sample(words, 2 * n_per_team)
    return Board(
        blue=frozenset(picked[:n_per_team]),
        red=frozenset(picked[n_per_team:]),
        seed=seed,
    )


def parse_board(text: str) -> Board:
    """Parse the two-line board format: `blue: w1, w2, ...` / `red: ...`."""
    teams: dict[str, list[str]] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise MalformedBoard(f"expected 'team: words', got {line!r}")
        team, _, rest = line.partition(":")
        team = team.strip().lower()
        if team not in ("blue", "red"):
            raise MalformedBoard(f"unknown team {team!r}")
        if team in teams:
            raise MalformedBoard(f"duplicate {team} line")
        teams[team] = [normalize_token(w) for w in rest.split(",") if w.strip()]
    if set(teams) != {"blue", "red"}:
        raise MalformedBoard(f"missing team lines, found {sorted(teams)}")
    for team, words in teams.items():
        if len(set(words)) != len(words):
            raise WrongCount(f"duplicate words in {team} team")
    if len(teams["blue"]) != len(teams["red"]):
        raise WrongCount(f"{len(teams['blue'])} blue vs {len(teams['red'])} red")
    return Board(blue=frozenset(teams["blue"]), red=frozenset(teams["red"]))


def format_board(board: Board) -> str:
    return "blue: %s\nred: %s\n" % (
        ", ".join(sorted(board.blue)),
        ", ".join(sorted(board.red)),
    )
