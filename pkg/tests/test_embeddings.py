import io
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cluecraft.corpusfreq import DocFreqTable
from cluecraft.embeddings import (
    DimensionMismatch,
    EmptyStore,
    UnknownToken,
    ZeroVector,
    average_contexts,
    build_ann_index,
    filter_top_common,
    load_embeddings,
    parse_context_occurrences,
    similarity,
    top_neighbors,
)
from conftest import random_vectors, store_from


class TestLoadEmbeddings:
    def test_minimal(self):
        store = load_embeddings(["a 1 0", "b 0 1"], "t")
        assert store.dim == 2 and len(store) == 2

    def test_header_consumed(self):
        store = load_embeddings(["2 3", "a 1 0 0", "b 0 1 0"], "t")
        assert store.dim == 3 and len(store) == 2
        assert "2" not in store

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            load_embeddings(["a 1 0", "c 1 2 3"], "t")

    def test_duplicate_keeps_first(self):
        store = load_embeddings(["a 1 0", "a 0 1"], "t")
        assert list(store.vector("a")) == [1, 0]

    def test_empty(self):
        with pytest.raises(EmptyStore):
            load_embeddings([], "t")

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            load_embeddings(["a 0 0"], "t")

    def test_tokens_normalized(self):
        store = load_embeddings(["Gold 1 0"], "t")
        assert "gold" in store


class TestSimilarity:
    def test_self(self):
        store = load_embeddings(["a 3 4"], "t")
        assert similarity(store, "a", "a") == pytest.approx(1.0)

    def test_orthogonal(self):
        store = load_embeddings(["a 1 0", "b 0 1"], "t")
        assert similarity(store, "a", "b") == pytest.approx(0.0)

    def test_45_degrees(self):
        store = load_embeddings(["a 1 0", "b 1 1"], "t")
        assert similarity(store, "a", "b") == pytest.approx(1 / math.sqrt(2), abs=1e-5)

    def test_unknown(self):
        store = load_embeddings(["a 1 0"], "t")
        with pytest.raises(UnknownToken):
            similarity(store, "a", "zz")

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_symmetry_and_self_similarity(self, seed):
        tokens = [f"w{i}" for i in range(8)]
        store = store_from(random_vectors(tokens, 6, seed))
        rng = random.Random(seed)
        a, b = rng.choice(tokens), rng.choice(tokens)
        assert similarity(store, a, b) == pytest.approx(similarity(store, b, a), abs=1e-12)
        assert similarity(store, a, a) == pytest.approx(1.0, abs=1e-12)


class TestTopNeighbors:
    def test_brute_force_agreement(self):
        tokens = [f"w{i}" for i in range(30)]
        vectors = random_vectors(tokens, 8, seed=11)
        store = store_from(vectors)
        result = top_neighbors(store, "w0", 5)
        # independent: plain-python cosine, full sort
        def cos(u, v):
            dot = sum(a * b for a, b in zip(u, v))
            return dot / math.sqrt(sum(a * a for a in u)) / math.sqrt(sum(b * b for b in v))
        expect = sorted(
            ((t, cos(vectors["w0"], vectors[t])) for t in tokens if t != "w0"),
            key=lambda x: (-x[1], x[0]),
        )[:5]
        assert [t for t, _ in result.neighbors] == [t for t, _ in expect]

    def test_small_vocabulary(self):
        store = load_embeddings(["a 1 0", "b 0 1"], "t")
        assert len(top_neighbors(store, "a", 500).neighbors) == 1

    def test_fixture_ordering(self):
        store = load_embeddings(["origin 1 0", "a 1 0.1", "b 0 1"], "t")
        result = top_neighbors(store, "origin", 1)
        assert [t for t, _ in result.neighbors] == ["a"]

    def test_repeatable(self):
        store = store_from(random_vectors([f"w{i}" for i in range(20)], 4, 3))
        assert top_neighbors(store, "w1", 7) == top_neighbors(store, "w1", 7)

    def test_candidate_filter(self):
        store = load_embeddings(["origin 1 0", "a 1 0.1", "b 0 1"], "t")
        result = top_neighbors(store, "origin", 5, lambda t: t != "a")
        assert [t for t, _ in result.neighbors] == ["b"]


class TestAnnIndex:
    def test_exact_mode_is_brute_force(self):
        store = store_from(random_vectors([f"w{i}" for i in range(40)], 8, 5))
        index = build_ann_index(store, mode="exact")
        for word in ("w0", "w17"):
            assert index.query(word, 10) == top_neighbors(store, word, 10)

    def test_recall_at_100(self):
        rng = np.random.default_rng(0)
        vectors = {f"w{i}": rng.normal(size=64) for i in range(1000)}
        store = store_from({t: list(v) for t, v in vectors.items()})
        index = build_ann_index(store, mode="approx", seed=0)
        recalls = []
        for i in range(0, 1000, 20):
            word = f"w{i}"
            exact = {t for t, _ in top_neighbors(store, word, 100).neighbors}
            approx = {t for t, _ in index.query(word, 100).neighbors}
            recalls.append(len(exact & approx) / len(exact))
        assert sum(recalls) / len(recalls) >= 0.95

    def test_tiny_vocabulary_exact_regardless(self):
        store = load_embeddings(["a 1 0", "b 0 1", "c 1 1"], "t")
        index = build_ann_index(store, mode="approx", n_cells=8, n_probe=8)
        assert index.query("a", 2) == top_neighbors(store, "a", 2)


class TestAverageContexts:
    def test_identical_vectors(self):
        occ = [("t", np.array([1.0, 2.0]))] * 5
        store = average_contexts(occ)
        assert list(store.vector("t")) == [1.0, 2.0]

    def test_mean(self):
        store = average_contexts([("t", np.array([1.0, 0.0])), ("t", np.array([0.0, 1.0]))])
        assert list(store.vector("t")) == [0.5, 0.5]

    def test_empty(self):
        with pytest.raises(EmptyStore):
            average_contexts([])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            average_contexts([("t", np.array([1.0])), ("t", np.array([1.0, 2.0]))])

    def test_permutation_invariant(self):
        rng = random.Random(9)
        occ = [("t", np.array([rng.uniform(-1, 1) for _ in range(4)])) for _ in range(50)]
        occ += [("u", np.array([rng.uniform(-1, 1) for _ in range(4)])) for _ in range(30)]
        forward = average_contexts(list(occ))
        shuffled = list(occ)
        rng.shuffle(shuffled)
        backward = average_contexts(shuffled)
        for token in ("t", "u"):
            assert np.max(np.abs(forward.vector(token) - backward.vector(token))) < 1e-9

    def test_parse_occurrence_lines(self):
        occ = list(parse_context_occurrences(["t 1 0", "t 0 1"]))
        assert len(occ) == 2 and occ[0][0] == "t"


class TestFilterTopCommon:
    def test_fixture(self):
        store = load_embeddings(["a 1 0", "b 0 1", "c 1 1"], "t")
        table = DocFreqTable(counts={"a": 5, "b": 3, "c": 1}, total_docs=10)
        filtered = filter_top_common(store, table, 2)
        assert set(filtered.tokens) == {"a", "b"}

    def test_superset_k(self):
        store = load_embeddings(["a 1 0", "b 0 1"], "t")
        table = DocFreqTable(counts={"a": 5, "b": 3}, total_docs=10)
        assert set(filter_top_common(store, table, 99).tokens) == {"a", "b"}

    def test_no_overlap(self):
        store = load_embeddings(["a 1 0"], "t")
        table = DocFreqTable(counts={"z": 1}, total_docs=1)
        with pytest.raises(EmptyStore):
            filter_top_common(store, table, 1)

    def test_tie_breaks_by_token(self):
        store = load_embeddings(["b 1 0", "a 0 1", "c 1 1"], "t")
        table = DocFreqTable(counts={"a": 2, "b": 2, "c": 2}, total_docs=5)
        assert set(filter_top_common(store, table, 2).tokens) == {"a", "b"}
