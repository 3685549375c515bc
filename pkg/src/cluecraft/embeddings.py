"""Word-vector stores: loading, cosine relatedness, and neighbor indexes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .core import normalize_token


class DimensionMismatch(ValueError):
    pass


class EmptyStore(ValueError):
    pass


class UnknownToken(KeyError):
    pass


class ZeroVector(ValueError):
    pass


@dataclass(frozen=True)
class NeighborList:
    origin: str
    neighbors: tuple[tuple[str, float], ...]  # (token, similarity), sorted


class EmbeddingStore:
    """Immutable token -> dense vector table with unit-norm rows precomputed."""

    def __init__(self, name: str, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise EmptyStore(f"no vectors for store {name!r}")
        dims = {len(v) for v in vectors.values()}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed dimensions in store {name!r}: {sorted(dims)}")
        self.name = name
        self.dim = dims.pop()
        self.tokens = sorted(vectors)
        self._row = {t: i for i, t in enumerate(self.tokens)}
        self._matrix = np.array([vectors[t] for t in self.tokens], dtype=np.float64)
        norms = np.linalg.norm(self._matrix, axis=1)
        zero = np.where(norms == 0.0)[0]
        if zero.size:
            raise ZeroVector(f"zero-norm vector for {self.tokens[zero[0]]!r}")
        self._unit = self._matrix / norms[:, None]

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._row

    def vector(self, token: str) -> np.ndarray:
        try:
            return self._matrix[self._row[token]]
        except KeyError:
            raise UnknownToken(token) from None

    def unit_vector(self, token: str) -> np.ndarray:
        try:
            return self._unit[self._row[token]]
        except KeyError:
            raise UnknownToken(token) from None

    @property
    def unit_matrix(self) -> np.ndarray:
        return self._unit


def load_embeddings(lines: Iterable[str], name: str) -> EmbeddingStore:
    """Parse the `<token> <v1> ... <vd>` text format.

    An optional first line `<count> <dim>` (two integers) is consumed as a
    header. Duplicate tokens keep the first occurrence.
    """
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    for lineno, line in enumerate(lines):
        parts = line.rstrip("\n").split(" ")
        parts = [p for p in parts if p]
        if not parts:
            continue
        if lineno == 0 and len(parts) == 2:
            try:
                int(parts[0]), int(parts[1])
                continue  # count/dim header
            except ValueError:
                pass
        token = normalize_token(parts[0])
        try:
            vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise DimensionMismatch(f"line {lineno + 1}: bad float ({exc})") from None
        if dim is None:
            dim = len(vec)
            if dim == 0:
                raise DimensionMismatch(f"line {lineno + 1}: no vector components")
        elif len(vec) != dim:
            raise DimensionMismatch(
                f"line {lineno + 1}: expected {dim} components, got {len(vec)}"
            )
        if token not in vectors:
            vectors[token] = vec
    if not vectors:
        raise EmptyStore(f"no vectors parsed for {name!r}")
    return EmbeddingStore(name, vectors)


def similarity(store: EmbeddingStore, w1: str, w2: str) -> float:
    """Cosine similarity (1 minus cosine distance), in [-1, 1].

    Uses compensated summation so the value is independent of component order.
    """
    u, v = store.unit_vector(w1), store.unit_vector(w2)
    return min(1.0, max(-1.0, math.fsum(u * v)))


def _ordered_neighbors(
    store: EmbeddingStore,
    origin: str,
    sims: np.ndarray,
    rows: np.ndarray,
    top: int,
    candidate_filter: Callable[[str], bool] | None,
) -> NeighborList:
    order = np.lexsort((np.array([store.tokens[r] for r in rows]), -sims))
    out: list[tuple[str, float]] = []
    for idx in order:
        token = store.tokens[rows[idx]]
        if token == origin:
            continue
        if candidate_filter is not None and not candidate_filter(token):
            continue
        out.append((token, float(sims[idx])))
        if len(out) == top:
            break
    return NeighborList(origin=origin, neighbors=tuple(out))


def top_neighbors(
    store: EmbeddingStore,
    word: str,
    top: int,
    candidate_filter: Callable[[str], bool] | None = None,
) -> NeighborList:
    """Exact top-T neighbors by cosine, ties broken by ascending token."""
    if word not in store:
        raise UnknownToken(word)
    if top < 1:
        raise ValueError("top must be >= 1")
    sims = store.unit_matrix @ store.unit_vector(word)
    rows = np.arange(len(store))
    return _ordered_neighbors(store, word, sims, rows, top, candidate_filter)


class NeighborIndex:
    """Neighbor index over a store; exact or inverted-file approximate.

    The approximate mode partitions vectors into k-means cells and probes
    the closest `n_probe` cells per query.
    """

    def __init__(
        self,
        store: EmbeddingStore,
        mode: str = "exact",
        n_cells: int = 32,
        n_probe: int = 28,
        seed: int = 0,
    ):
        if mode not in ("exact", "approx"):
            raise ValueError(f"unknown index mode {mode!r}")
        self.store = store
        self.mode = mode
        if mode == "approx":
            n_cells = min(n_cells, len(store))
            self._centroids, assign = _kmeans(store.unit_matrix, n_cells, seed)
            self._cells = [np.where(assign == c)[0] for c in range(n_cells)]
            self._n_probe = min(n_probe, n_cells)

    def query(
        self,
        word: str,
        top: int,
        candidate_filter: Callable[[str], bool] | None = None,
    ) -> NeighborList:
        if self.mode == "exact":
            return top_neighbors(self.store, word, top, candidate_filter)
        if word not in self.store:
            raise UnknownToken(word)
        q = self.store.unit_vector(word)
        cell_sims = self._centroids @ q
        probe = np.argsort(-cell_sims)[: self._n_probe]
        rows = np.concatenate([self._cells[c] for c in probe])
        sims = self.store.unit_matrix[rows] @ q
        return _ordered_neighbors(self.store, word, sims, rows, top, candidate_filter)


def build_ann_index(store: EmbeddingStore, mode: str = "exact", **kwargs) -> NeighborIndex:
    return NeighborIndex(store, mode=mode, **kwargs)


def _kmeans(matrix: np.ndarray, k: int, seed: int, iters: int = 15):
    rng = np.random.default_rng(seed)
    centroids = matrix[rng.choice(len(matrix), size=k, replace=False)]
    assign = np.zeros(len(matrix), dtype=np.int64)
    for _ in range(iters):
        assign = np.argmax(matrix @ centroids.T, axis=1)
        for c in range(k):
            members = matrix[assign == c]
            if len(members):
                mean = members.mean(axis=0)
                norm = np.linalg.norm(mean)
                if norm > 0:
                    centroids[c] = mean / norm
    return centroids, assign


def average_contexts(occurrences: Iterable[tuple[str, np.ndarray]]) -> EmbeddingStore:
    """Mean per-token vector over context occurrences.

    Kahan-compensated accumulation keeps the result independent of
    occurrence order to well under 1e-9.
    """
    sums: dict[str, np.ndarray] = {}
    comps: dict[str, np.ndarray] = {}
    counts: dict[str, int] = {}
    dim: int | None = None
    for token, vec in occurrences:
        token = normalize_token(token)
        vec = np.asarray(vec, dtype=np.float64)
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise DimensionMismatch(f"occurrence for {token!r} has dim {len(vec)}, expected {dim}")
        if token not in sums:
            sums[token] = np.zeros(dim)
            comps[token] = np.zeros(dim)
            counts[token] = 0
        # Kahan step
        y = vec - comps[token]
        t = sums[token] + y
        comps[token] = (t - sums[token]) - y
        sums[token] = t
        counts[token] += 1
    if not sums:
        raise EmptyStore("no context occurrences")
    return EmbeddingStore(
        "averaged-contexts", {t: sums[t] / counts[t] for t in sums}
    )


def parse_context_occurrences(lines: Iterable[str]) -> Iterator[tuple[str, np.ndarray]]:
    """Same line shape as the vector format, token repeated per occurrence."""
    for lineno, line in enumerate(lines):
        parts = [p for p in line.split(" ") if p.strip()]
        if not parts:
            continue
        if lineno == 0 and len(parts) == 2 and all(p.strip().isdigit() for p in parts):
            continue
        yield parts[0], np.array([float(x) for x in parts[1:]], dtype=np.float64)


def filter_top_common(store: EmbeddingStore, df_table, k: int) -> EmbeddingStore:
    """Restrict the store to the k highest-df tokens present in both.

    Ties broken by ascending token, mirroring the neighbor ordering rule.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    common = [t for t in store.tokens if t in df_table.counts]
    if not common:
        raise EmptyStore(f"no overlap between store {store.name!r} and df table")
    common.sort(key=lambda t: (-df_table.counts[t], t))
    keep = common[:k]
    return EmbeddingStore(f"{store.name}-top{k}", {t: store.vector(t) for t in keep})
