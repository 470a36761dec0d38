import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from avsr_gauge import scoring
from avsr_gauge.errors import (
    DuplicateUtteranceError,
    EmptyReferenceError,
    MalformedLineError,
    UtteranceSetMismatchError,
    ZeroBaselineError,
)

from oracles import edit_distance_oracle

DATA = Path(__file__).parent / "data"


class TestNormalize:
    def test_punctuation_and_case(self):
        assert scoring.normalize("The cat, sat.") == ["THE", "CAT", "SAT"]

    def test_empty(self):
        assert scoring.normalize("") == []

    def test_apostrophe_kept(self):
        assert scoring.normalize("don't stop") == ["DON'T", "STOP"]

    def test_curly_apostrophe_folded(self):
        assert scoring.normalize("don’t") == ["DON'T"]

    def test_punctuation_only(self):
        assert scoring.normalize("... !!") == []

    def test_digits_kept(self):
        assert scoring.normalize("room 101") == ["ROOM", "101"]


class TestAlign:
    def test_identity(self):
        a = scoring.align(["A", "B", "C"], ["A", "B", "C"])
        assert (a.S, a.D, a.I) == (0, 0, 0)
        assert all(code == scoring.MATCH for code, _, _ in a.ops)

    def test_sub_plus_insert(self):
        a = scoring.align(["THE", "CAT", "SAT"], ["THE", "BAT", "SAT", "ON"])
        assert (a.S, a.D, a.I) == (1, 0, 1)
        assert a.distance == edit_distance_oracle(["THE", "CAT", "SAT"], ["THE", "BAT", "SAT", "ON"])

    def test_single_deletion(self):
        a = scoring.align(["A", "B", "C", "D"], ["A", "C", "D"])
        assert (a.S, a.D, a.I) == (0, 1, 0)
        assert a.distance == edit_distance_oracle(["A", "B", "C", "D"], ["A", "C", "D"])

    def test_empty_sides(self):
        assert scoring.align([], []).distance == 0
        a = scoring.align(["A", "B"], [])
        assert (a.S, a.D, a.I) == (0, 2, 0)
        a = scoring.align([], ["A", "B"])
        assert (a.S, a.D, a.I) == (0, 0, 2)

    def test_ops_consume_indices_in_order(self):
        a = scoring.align(["A", "B", "C"], ["X", "B", "Y", "Z"])
        ref_seen = [ri for _, ri, _ in a.ops if ri is not None]
        hyp_seen = [hj for _, _, hj in a.ops if hj is not None]
        assert ref_seen == list(range(3))
        assert hyp_seen == list(range(4))
        assert a.S + a.D + a.matches == a.N

    def test_oracle_equivalence_random(self):
        import random

        rng = random.Random(20240817)
        alphabet = ["A", "B", "C", "D"]
        for _ in range(1000):
            ref = [rng.choice(alphabet) for _ in range(rng.randint(0, 8))]
            hyp = [rng.choice(alphabet) for _ in range(rng.randint(0, 8))]
            a = scoring.align(ref, hyp)
            assert a.distance == edit_distance_oracle(ref, hyp)
            assert a.S + a.D + a.matches == len(ref)

    @given(
        st.lists(st.sampled_from("ABCD"), max_size=8),
        st.lists(st.sampled_from("ABCD"), max_size=8),
    )
    @settings(max_examples=200, deadline=None)
    def test_deterministic_ops(self, ref, hyp):
        first = scoring.align(ref, hyp)
        second = scoring.align(ref, hyp)
        assert first.ops == second.ops
        assert first.distance == edit_distance_oracle(ref, hyp)


class TestCorpusWer:
    def test_all_identical(self):
        alignments = [scoring.align(["A", "B"], ["A", "B"]) for _ in range(3)]
        assert scoring.corpus_wer(alignments) == 0.0

    def test_formula(self):
        a = scoring.align(["A", "B", "C"], ["X", "B", "C", "Y"])
        assert (a.S, a.I) == (1, 1)
        assert scoring.corpus_wer([a]) == pytest.approx(100.0 * 2 / 3)

    def test_empty_reference_error(self):
        with pytest.raises(EmptyReferenceError):
            scoring.corpus_wer([scoring.align([], [])])

    def test_fixture_replay(self):
        refs = scoring.read_transcripts(DATA / "fixture_refs.tsv")
        hyps = scoring.read_transcripts(DATA / "fixture_hyps.tsv")
        with open(DATA / "fixture_counts.json", encoding="utf-8") as f:
            frozen = json.load(f)
        alignments = scoring.score_corpus(refs, hyps)
        for utt_id, a in alignments.items():
            expected = frozen["per_utterance"][utt_id]
            assert {"S": a.S, "D": a.D, "I": a.I, "N": a.N} == expected
            assert a.distance == edit_distance_oracle(refs[utt_id], hyps[utt_id])
        assert scoring.corpus_wer(alignments.values()) == frozen["corpus_wer_percent"]


class TestIwerTable:
    def _corpus(self):
        # GO occurs 10 times: 2 substituted, 1 deleted -> iwer 0.30
        alignments = []
        for k in range(10):
            ref = ["GO", "ON"]
            if k < 2:
                hyp = ["NO", "ON"]
            elif k == 2:
                hyp = ["ON"]
            else:
                hyp = ["GO", "ON"]
            alignments.append(scoring.align(ref, hyp))
        return alignments

    def test_direct_definition(self):
        table = scoring.iwer_table(self._corpus(), min_count=7)
        by_word = {row.word: row for row in table}
        assert by_word["GO"].count == 10
        assert by_word["GO"].subs == 2
        assert by_word["GO"].dels == 1
        assert by_word["GO"].iwer == pytest.approx(0.30)
        assert by_word["ON"].iwer == 0.0

    def test_min_count_filter(self):
        alignments = [scoring.align(["RARE"], ["RARE"])] + self._corpus()
        words = {row.word for row in scoring.iwer_table(alignments, min_count=7)}
        assert words == {"GO", "ON"}
        words_all = {row.word for row in scoring.iwer_table(alignments, min_count=1)}
        assert words_all == {"GO", "ON", "RARE"}

    def test_error_free_corpus(self):
        alignments = [scoring.align(["A", "B"], ["A", "B"])] * 8
        assert all(row.iwer == 0.0 for row in scoring.iwer_table(alignments, min_count=1))

    def test_insertions_excluded(self):
        alignments = [scoring.align(["A", "B"], ["A", "X", "B"]) for _ in range(8)]
        table = scoring.iwer_table(alignments, min_count=1)
        assert all(row.iwer == 0.0 for row in table)
        assert sum(a.I for a in alignments) == 8

    def test_conservation_unfiltered(self):
        import random

        rng = random.Random(7)
        alphabet = ["A", "B", "C", "D", "E"]
        alignments = []
        for _ in range(200):
            ref = [rng.choice(alphabet) for _ in range(rng.randint(1, 6))]
            hyp = [rng.choice(alphabet) for _ in range(rng.randint(0, 7))]
            alignments.append(scoring.align(ref, hyp))
        table = scoring.iwer_table(alignments, min_count=1)
        assert sum(r.subs for r in table) == sum(a.S for a in alignments)
        assert sum(r.dels for r in table) == sum(a.D for a in alignments)
        assert sum(r.count for r in table) == sum(a.N for a in alignments)


class TestRelativeIncrease:
    def test_initial_occlusion_arithmetic(self):
        assert scoring.relative_increase(15.6, 24.6) == pytest.approx(57.6923, abs=1e-3)

    def test_consistent_relative_increases(self):
        assert scoring.relative_increase(13.0, 21.5) == pytest.approx(65.3846, abs=1e-3)
        assert scoring.relative_increase(15.6, 27.0) == pytest.approx(73.0769, abs=1e-3)

    def test_no_change(self):
        assert scoring.relative_increase(12.5, 12.5) == 0.0

    def test_zero_baseline(self):
        with pytest.raises(ZeroBaselineError):
            scoring.relative_increase(0.0, 5.0)


class TestTranscriptIO:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "refs.tsv"
        data = {"u1": ["HELLO", "WORLD"], "u2": [], "u3": ["DON'T"]}
        scoring.write_transcripts(path, data)
        assert scoring.read_transcripts(path) == data

    def test_missing_tab(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("u1 no tab here\n", encoding="utf-8")
        with pytest.raises(MalformedLineError):
            scoring.read_transcripts(path)

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "dup.tsv"
        path.write_text("u1\thello\nu1\tagain\n", encoding="utf-8")
        with pytest.raises(DuplicateUtteranceError):
            scoring.read_transcripts(path)

    def test_key_mismatch(self):
        with pytest.raises(UtteranceSetMismatchError):
            scoring.score_corpus({"u1": ["A"]}, {"u2": ["A"]})

    def test_iwer_csv_round_trip(self, tmp_path):
        alignments = [scoring.align(["A", "B"], ["A", "X"]) for _ in range(3)]
        table = scoring.iwer_table(alignments, min_count=1)
        path = tmp_path / "iwer.csv"
        scoring.write_iwer_csv(path, table)
        back = scoring.read_iwer_csv(path)
        assert [(r.word, r.count, r.subs, r.dels, r.iwer) for r in back] == [
            (r.word, r.count, r.subs, r.dels, r.iwer) for r in table
        ]

    def test_merge_word_stats_commutes(self):
        a = [scoring.WordStats("A", 4, 1, 0), scoring.WordStats("B", 2, 0, 1)]
        b = [scoring.WordStats("A", 3, 2, 0)]
        merged_ab = scoring.merge_word_stats([a, b])
        merged_ba = scoring.merge_word_stats([b, a])
        assert merged_ab == merged_ba
        by_word = {r.word: r for r in merged_ab}
        assert by_word["A"].count == 7 and by_word["A"].subs == 3
