import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from cluecraft.core import Board
from cluecraft.embeddings import load_embeddings
from cluecraft.evaluation import (
    ConfigMetrics,
    InvalidResponse,
    MetricsReport,
    Trial,
    TrialConfig,
    TrialResponse,
    UnknownClue,
    aggregate,
    append_response,
    load_responses,
    render_report,
    response_from_dict,
    response_to_dict,
    shuffled_display_order,
    simulate_guesser,
    trial_metrics,
    two_proportion_ztest,
    validate_response,
)

BOARD = Board(blue=frozenset({"gold", "lemon", "sun"}),
              red=frozenset({"rock", "car", "tree"}))


def make_trial(trial_id="t1", config=None, clue="yellow",
               intended=("gold", "lemon")):
    return Trial(
        id=trial_id,
        board=BOARD,
        display_order=shuffled_display_order(BOARD, seed=5),
        clue=clue,
        intended=intended,
        config=config or TrialConfig("glove", "ours", False),
    )


class TestTrial:
    def test_public_view_hides_everything_but_words_and_clue(self):
        view = make_trial().public_view()
        assert set(view) == {"trialId", "words", "clue"}
        assert sorted(view["words"]) == sorted(BOARD.words)
        serialized = repr(view)
        assert "blue" not in serialized and "red" not in serialized
        assert "intended" not in serialized

    def test_clue_must_not_be_board_word(self):
        with pytest.raises(InvalidResponse):
            make_trial(clue="gold")

    def test_display_order_must_be_permutation(self):
        with pytest.raises(InvalidResponse):
            Trial(id="t", board=BOARD, display_order=("gold",), clue="yellow",
                  intended=("gold", "lemon"),
                  config=TrialConfig("glove", "ours", False))

    def test_config_label(self):
        assert TrialConfig("glove", "kim", True).label == "glove|kim|detect"
        assert TrialConfig("glove", "kim", False).label == "glove|kim|plain"


class TestTrialResponse:
    def test_partial_ranks_allowed(self):
        r = TrialResponse(trial_id="t1", rank1="gold", rank2="sun")
        assert r.ranks() == ("gold", "sun")

    def test_rank4_requires_rank3(self):
        with pytest.raises(InvalidResponse):
            TrialResponse(trial_id="t1", rank1="gold", rank2="sun", rank4="car")

    def test_duplicates_rejected(self):
        with pytest.raises(InvalidResponse):
            TrialResponse(trial_id="t1", rank1="gold", rank2="gold")

    def test_non_board_word_rejected(self):
        r = TrialResponse(trial_id="t1", rank1="gold", rank2="zzz")
        with pytest.raises(InvalidResponse):
            validate_response(r, make_trial())


class TestTrialMetrics:
    INTENDED = ("gold", "lemon")

    def test_both_in_top_two(self):
        r = TrialResponse(trial_id="t", rank1="lemon", rank2="gold")
        assert trial_metrics(r, self.INTENDED) == (1.0, 1.0)

    def test_one_in_top_two_other_later(self):
        r = TrialResponse(trial_id="t", rank1="gold", rank2="sun",
                          rank3="lemon", rank4="car")
        assert trial_metrics(r, self.INTENDED) == (0.5, 1.0)

    def test_none_found(self):
        r = TrialResponse(trial_id="t", rank1="sun", rank2="car",
                          rank3="rock", rank4="tree")
        assert trial_metrics(r, self.INTENDED) == (0.0, 0.0)

    def test_one_found_late(self):
        r = TrialResponse(trial_id="t", rank1="sun", rank2="car", rank3="gold")
        assert trial_metrics(r, self.INTENDED) == (0.0, 0.5)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=200, deadline=None)
    def test_recall_never_below_precision(self, seed):
        rng = random.Random(seed)
        words = sorted(BOARD.words)
        picks = rng.sample(words, rng.randint(2, 4))
        picks += [None] * (4 - len(picks))
        r = TrialResponse(trial_id="t", rank1=picks[0], rank2=picks[1],
                          rank3=picks[2], rank4=picks[3])
        p2, r4 = trial_metrics(r, self.INTENDED)
        assert r4 >= p2
        assert p2 in (0.0, 0.5, 1.0) and r4 in (0.0, 0.5, 1.0)


class TestZTest:
    def test_against_reference_implementation(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        cases = [(0.75, 120, 0.60, 120), (0.5, 40, 0.5, 60),
                 (0.9, 30, 0.1, 30), (0.425, 80, 0.4375, 80)]
        for p1, n1, p2, n2 in cases:
            got = two_proportion_ztest(p1, n1, p2, n2)
            count = [round(p1 * n1), round(p2 * n2)]
            nobs = [n1, n2]
            pooled = sum(count) / sum(nobs)
            se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
            z_ref = (count[0] / n1 - count[1] / n2) / se
            p_ref = 2 * scipy_stats.norm.sf(abs(z_ref))
            assert got.z == pytest.approx(z_ref, abs=1e-6)
            assert got.p_value == pytest.approx(p_ref, abs=1e-6)

    def test_degenerate_all_zero(self):
        result = two_proportion_ztest(0.0, 10, 0.0, 10)
        assert result.degenerate and result.z == 0.0 and result.p_value == 1.0

    def test_degenerate_all_one(self):
        result = two_proportion_ztest(1.0, 10, 1.0, 10)
        assert result.degenerate

    def test_symmetry(self):
        a = two_proportion_ztest(0.7, 50, 0.4, 60)
        b = two_proportion_ztest(0.4, 60, 0.7, 50)
        assert a.z == pytest.approx(-b.z)
        assert a.p_value == pytest.approx(b.p_value)

    def test_bad_sample_size(self):
        with pytest.raises(ValueError):
            two_proportion_ztest(0.5, 0, 0.5, 10)


class TestAggregate:
    def build(self, specs):
        """specs: list of (config, rank1, rank2, rank3, rank4)."""
        pairs = []
        for i, (config, *ranks) in enumerate(specs):
            trial = make_trial(trial_id=f"t{i}", config=config)
            pairs.append((TrialResponse(f"t{i}", *ranks), trial))
        return aggregate(pairs)

    def test_means(self):
        cfg = TrialConfig("glove", "ours", False)
        report = self.build([
            (cfg, "gold", "lemon", None, None),           # p2=1, r4=1
            (cfg, "gold", "sun", "lemon", "car"),          # p2=.5, r4=1
            (cfg, "sun", "car", "rock", "tree"),           # p2=0, r4=0
            (cfg, "sun", "car", "gold", None),             # p2=0, r4=.5
        ])
        m = report.per_config[cfg.label]
        assert m.n == 4
        assert m.precision_at_2 == pytest.approx(0.375)
        assert m.recall_at_4 == pytest.approx(0.625)
        assert report.ztests == {}

    def test_detect_pairing(self):
        plain = TrialConfig("glove", "ours", False)
        detect = TrialConfig("glove", "ours", True)
        report = self.build([
            (plain, "sun", "car", None, None),
            (plain, "gold", "lemon", None, None),
            (detect, "gold", "lemon", None, None),
            (detect, "gold", "lemon", None, None),
        ])
        tests = report.ztests["glove|ours"]
        # plain p2=0.5 over 4 slots, detect p2=1.0 over 4 slots
        ref = two_proportion_ztest(0.5, 4, 1.0, 4)
        assert tests["precision_at_2"] == ref

    def test_unpaired_config_has_no_ztest(self):
        report = self.build([
            (TrialConfig("glove", "kim", False), "gold", "lemon", None, None),
        ])
        assert report.ztests == {}

    def test_mismatched_pairing_rejected(self):
        trial = make_trial(trial_id="t9")
        r = TrialResponse("other", "gold", "lemon")
        with pytest.raises(InvalidResponse):
            aggregate([(r, trial)])

    def test_order_invariant(self):
        cfg_a = TrialConfig("glove", "ours", False)
        cfg_b = TrialConfig("babelnet-wsf", "ours", True)
        specs = [
            (cfg_a, "gold", "lemon", None, None),
            (cfg_b, "sun", "gold", "lemon", None),
            (cfg_a, "sun", "car", None, None),
        ]
        forward = self.build(specs).to_dict()
        backward = self.build(list(reversed(specs))).to_dict()
        assert forward == backward


class TestSimulatedGuesser:
    STORE = load_embeddings([
        "yellow 1 1 0",
        "gold 1 0.9 0",
        "lemon 1 1.1 0",
        "sun 1 2 0",
        "rock 0 0 1",
        "car 0.1 0 1",
        "tree -1 0 0",
    ], "sim")

    def test_ranks_by_similarity(self):
        response = simulate_guesser(self.STORE, make_trial())
        assert response.rank1 == "lemon"
        assert response.rank2 == "gold"
        assert response.rank3 == "sun"
        assert response.responder_id == "bot-evaluation"

    def test_oov_board_word_ranks_last(self):
        store = load_embeddings(["yellow 1 1", "gold 1 0.9", "lemon 1 1.1",
                                 "sun 1 2", "rock 0 1"], "sim")
        response = simulate_guesser(store, make_trial())
        # car and tree are OOV: they can only appear after every known word
        assert set(response.ranks()[:3]) <= {"lemon", "gold", "sun", "rock"}

    def test_unknown_clue(self):
        with pytest.raises(UnknownClue):
            simulate_guesser(self.STORE, make_trial(clue="zzz"))

    def test_deterministic(self):
        a = simulate_guesser(self.STORE, make_trial())
        b = simulate_guesser(self.STORE, make_trial())
        assert a == b


class TestPersistence:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "responses.jsonl"
        responses = [
            TrialResponse("t1", "gold", "lemon", responder_id="p1", timestamp=1.5),
            TrialResponse("t2", "sun", "car", "gold", None),
        ]
        for r in responses:
            append_response(path, r)
        assert load_responses(path) == responses

    def test_dict_round_trip(self):
        r = TrialResponse("t1", "gold", "lemon", "sun", "car",
                          responder_id="p2", timestamp=3.0)
        assert response_from_dict(response_to_dict(r)) == r

    def test_append_only(self, tmp_path):
        path = tmp_path / "responses.jsonl"
        append_response(path, TrialResponse("t1", "a", "b"))
        first = path.read_text()
        append_response(path, TrialResponse("t2", "c", "d"))
        assert path.read_text().startswith(first)


class TestDisplayOrder:
    def test_deterministic_permutation(self):
        order = shuffled_display_order(BOARD, seed=42)
        assert sorted(order) == sorted(BOARD.words)
        assert order == shuffled_display_order(BOARD, seed=42)

    def test_varies_with_seed(self):
        orders = {shuffled_display_order(BOARD, seed=s) for s in range(20)}
        assert len(orders) > 1


class TestRenderReport:
    def test_contains_all_configs(self):
        report = MetricsReport(per_config={
            "glove|ours|plain": ConfigMetrics(0.5, 0.75, 60),
            "glove|ours|detect": ConfigMetrics(0.6, 0.8, 60),
        })
        text = render_report(report)
        assert "glove|ours|plain" in text and "glove|ours|detect" in text
        assert "0.500" in text and "0.750" in text
