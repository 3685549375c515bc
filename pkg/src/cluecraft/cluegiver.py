"""End-to-end clue selection: candidate generation from nearest neighbors,
scoring over every (pair, candidate) combination, and deterministic
tie-breaking."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .babelnet import CachedSubgraph, GraphNeighbor, graph_neighbors, path_similarity
from .core import Board, ClueResult, ScoreBreakdown
from .corpusfreq import DocFreqTable
from .embeddings import EmbeddingStore, NeighborIndex, similarity as embedding_similarity
from .scoring import (
    KIM,
    KIM_FAIL,
    OURS,
    ScoringParams,
    SimilarityProfile,
    evaluate_candidate,
)

_SUFFIXES = ("ing", "es", "ed", "er", "s")


class UnknownBoardWord(KeyError):
    pass


class NoCandidates(RuntimeError):
    pass


def _stem(token: str) -> str:
    for suffix in _SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


def is_legal_clue(token: str, board_words: frozenset[str], strict_stems: bool = False) -> bool:
    """Single alphabetic word that is not (a form of) a board word."""
    if not token or not token.isalpha():
        return False
    if token in board_words:
        return False
    if strict_stems and any(_stem(token) == _stem(w) for w in board_words):
        return False
    return True


class EmbeddingSource:
    """Relatedness from an embedding store plus its neighbor index."""

    kind = "embedding"

    def __init__(self, store: EmbeddingStore, index: NeighborIndex | None = None,
                 name: str | None = None):
        self.store = store
        self.index = index or NeighborIndex(store, mode="exact")
        self.name = name or store.name

    def covers(self, word: str) -> bool:
        return word in self.store

    def similarity(self, clue: str, word: str) -> float:
        return embedding_similarity(self.store, clue, word)

    def candidate_tokens(self, word: str, params: ScoringParams,
                         candidate_filter) -> list[str]:
        result = self.index.query(word, params.top_t, candidate_filter)
        return [t for t, _ in result.neighbors]


class GraphSource:
    """Relatedness from cached knowledge-graph subgraphs.

    Candidate generation intersects the neighbor token sets of the pair's
    words; unreachable words contribute similarity 0.
    """

    kind = "graph"

    def __init__(self, subgraphs: dict[str, CachedSubgraph],
                 params: ScoringParams | None = None,
                 min_weight_labels: bool = False,
                 name: str = "babelnet-wsf"):
        params = params or ScoringParams()
        self.name = name
        self._neighbors: dict[str, dict[str, GraphNeighbor]] = {}
        for word, sub in subgraphs.items():
            self._neighbors[word] = {
                n.token: n
                for n in graph_neighbors(sub, params.weights, min_weight_labels)
            }

    def covers(self, word: str) -> bool:
        return word in self._neighbors

    def neighbor_tokens(self, word: str) -> dict[str, GraphNeighbor]:
        try:
            return self._neighbors[word]
        except KeyError:
            raise UnknownBoardWord(word) from None

    def similarity(self, clue: str, word: str) -> float:
        neighbor = self.neighbor_tokens(word).get(clue)
        if neighbor is None:
            return 0.0
        return path_similarity(neighbor.path_length, neighbor.label_weight)


RelatednessSource = EmbeddingSource | GraphSource


def candidate_clues(
    board: Board,
    pair: tuple[str, ...],
    source: RelatednessSource,
    params: ScoringParams,
    strict_stems: bool = False,
    word_cache: dict[str, list[str]] | None = None,
) -> set[str]:
    """Candidates for one intended pair, legality-filtered.

    Embedding sources take the union of each pair word's top-T neighbors.
    Graph sources take the intersection of the pair words' neighbor token
    sets, falling back to the union when the intersection is empty (the
    one-word-clue case).
    """
    board_words = board.words

    def legal(token: str) -> bool:
        return is_legal_clue(token, board_words, strict_stems)

    if source.kind == "embedding":
        out: set[str] = set()
        for word in pair:
            if not source.covers(word):
                raise UnknownBoardWord(word)
            if word_cache is not None and word in word_cache:
                tokens = word_cache[word]
            else:
                tokens = source.candidate_tokens(word, params, legal)
                if word_cache is not None:
                    word_cache[word] = tokens
            out.update(tokens)
        return out

    per_word = [
        {t for t in source.neighbor_tokens(word) if legal(t)} for word in pair
    ]
    intersection = set.intersection(*per_word)
    if intersection:
        return intersection
    return set.union(*per_word)


def _evaluate_pair(
    board: Board,
    pair: tuple[str, ...],
    source: RelatednessSource,
    params: ScoringParams,
    scoring_fn: str,
    detect: bool,
    df_table: DocFreqTable | None,
    dict_store: EmbeddingStore | None,
    strict_stems: bool,
    sim_cache: dict[tuple[str, str], float] | None = None,
    word_cache: dict[str, list[str]] | None = None,
    rel_cache: dict[tuple[str, str], float] | None = None,
) -> list[tuple[tuple, str, tuple[str, ...], ScoreBreakdown, SimilarityProfile]]:
    if sim_cache is None:
        sim = source.similarity
    else:
        def sim(clue: str, word: str) -> float:
            key = (clue, word)
            value = sim_cache.get(key)
            if value is None:
                value = sim_cache[key] = source.similarity(clue, word)
            return value

    red = tuple(sorted(board.red))
    rows = []
    candidates = candidate_clues(board, pair, source, params, strict_stems, word_cache)
    for clue in sorted(candidates):
        profile = SimilarityProfile(
            clue=clue,
            blue_sims={b: sim(clue, b) for b in pair},
            red_sims={r: sim(clue, r) for r in red},
        )
        breakdown = evaluate_candidate(
            profile, red, params, scoring_fn, detect, df_table, dict_store,
            rel_cache,
        )
        key = (-breakdown.total, clue, pair)
        rows.append((key, clue, pair, breakdown, profile))
    return rows


def choose_clue(
    board: Board,
    source: RelatednessSource,
    params: ScoringParams | None = None,
    scoring_fn: str = OURS,
    detect: bool = False,
    df_table: DocFreqTable | None = None,
    dict_store: EmbeddingStore | None = None,
    strict_stems: bool = False,
    workers: int = 1,
) -> ClueResult:
    """Pick the highest-scoring (clue, intended pair) over all pair-size-m
    subsets of the blue team.

    Ties break to the lexicographically smaller clue, then the smaller
    sorted pair, so results are identical across runs and thread counts.
    With the thresholded scorer, if no candidate passes the constraints
    anywhere, the constraint is relaxed to plain min-blue-similarity
    ranking.
    """
    params = params or ScoringParams()
    for word in sorted(board.words):
        if not source.covers(word):
            raise UnknownBoardWord(word)
    pairs = [
        tuple(combo)
        for combo in itertools.combinations(sorted(board.blue), params.m)
    ]

    # Shared across pairs: similarities and per-word neighbor lists repeat
    # heavily, and dict reads/writes are atomic so worker threads can share.
    sim_cache: dict[tuple[str, str], float] = {}
    word_cache: dict[str, list[str]] = {}
    rel_cache: dict[tuple[str, str], float] = {}

    def run(fn: str) -> list:
        args = [
            (board, pair, source, params, fn, detect, df_table, dict_store,
             strict_stems, sim_cache, word_cache, rel_cache)
            for pair in pairs
        ]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                chunks = list(pool.map(lambda a: _evaluate_pair(*a), args))
        else:
            chunks = [_evaluate_pair(*a) for a in args]
        return [row for chunk in chunks for row in chunk]

    rows = run(scoring_fn)
    if not rows:
        raise NoCandidates(f"no legal candidates for board {sorted(board.blue)}")

    notes: list[str] = []
    if scoring_fn == KIM and all(r[3].total == KIM_FAIL for r in rows):
        # Constraint relaxation: rank by min blue similarity, no gating.
        relaxed = []
        for key, clue, pair, breakdown, profile in rows:
            base = min(profile.blue_sims.values())
            total = base + breakdown.detect if detect else base
            relaxed_breakdown = ScoreBreakdown(
                base=base,
                freq_term=breakdown.freq_term,
                dict_blue_sum=breakdown.dict_blue_sum,
                dict_red_max=breakdown.dict_red_max,
                detect=breakdown.detect,
                total=total,
                kim_constraint_passed=False,
            )
            relaxed.append(((-total, clue, pair), clue, pair, relaxed_breakdown, profile))
        rows = relaxed
        notes.append("kim-relaxed")

    key, clue, pair, breakdown, profile = min(rows, key=lambda r: r[0])
    if source.kind == "graph" and any(v == 0.0 for v in profile.blue_sims.values()):
        notes.append("covers-single-word")
    return ClueResult(
        clue=clue,
        intended=tuple(sorted(pair)),
        score=breakdown.total,
        breakdown=breakdown,
        representation=source.name,
        scoring_fn=scoring_fn,
        detect=detect,
        notes=tuple(notes),
    )
