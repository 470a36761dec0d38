import numpy as np
import pytest

from avsr_gauge import mafi, scoring
from avsr_gauge.errors import (
    ConstantInputError,
    DegenerateCorrelationWarning,
    DuplicateWordError,
    EmptyIntersectionError,
    EmptyTargetError,
    LengthMismatchError,
    OutOfVocabularyError,
    ScoreOutOfRangeError,
)

from oracles import student_t_two_tailed


@pytest.fixture(scope="module")
def table():
    return mafi.load_feature_table()


@pytest.fixture(scope="module")
def lexicon(table):
    return mafi.load_lexicon(feature_table=table)


class TestFeatureTable:
    def test_vector_length_and_values(self, table):
        for segment in table.values():
            assert len(segment.features) == mafi.N_FEATURES
            assert all(v in (-1, 0, 1) for v in segment.features)

    def test_all_vectors_distinct(self, table):
        vectors = [seg.features for seg in table.values()]
        assert len(set(vectors)) == len(vectors)

    def test_voicing_pairs_differ_only_in_voice(self, table):
        voice_idx = mafi.FEATURE_NAMES.index("voice")
        for unvoiced, voiced in [
            ("P", "B"), ("T", "D"), ("K", "G"), ("CH", "JH"),
            ("F", "V"), ("TH", "DH"), ("S", "Z"), ("SH", "ZH"),
        ]:
            a = table[unvoiced].features
            b = table[voiced].features
            diffs = [i for i in range(mafi.N_FEATURES) if a[i] != b[i]]
            assert diffs == [voice_idx], (unvoiced, voiced, diffs)

    def test_lexicon_phone_coverage(self, table, lexicon):
        missing = lexicon.phones_used() - set(table)
        assert missing == set()
        # the shipped lexicon exercises the entire phone inventory
        assert lexicon.phones_used() == set(table)


class TestG2p:
    def test_lookup(self, lexicon):
        segments = mafi.g2p("BAT", lexicon)
        assert [s.ipa for s in segments] == ["b", "æ", "t"]

    def test_case_insensitive(self, lexicon):
        assert mafi.g2p("bat", lexicon) == mafi.g2p("BAT", lexicon)

    def test_out_of_vocabulary(self, lexicon):
        with pytest.raises(OutOfVocabularyError):
            mafi.g2p("XYLOPHONE", lexicon)

    def test_first_pronunciation_wins(self, table, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("HOUSE HH AW S\nHOUSE(2) HH AW Z\n", encoding="utf-8")
        lex = mafi.load_lexicon(path, feature_table=table)
        assert [s.ipa for s in mafi.g2p("HOUSE", lex)] == ["h", "aʊ", "s"]

    def test_stress_digits_stripped(self, table, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("BAT B AE1 T\n", encoding="utf-8")
        lex = mafi.load_lexicon(path, feature_table=table)
        assert [s.ipa for s in mafi.g2p("BAT", lex)] == ["b", "æ", "t"]


class TestMafiScore:
    def test_identity_is_zero(self, lexicon):
        target = mafi.g2p("BAT", lexicon)
        assert mafi.mafi_score(target, [target]) == 0.0

    def test_identity_for_every_lexicon_word(self, lexicon):
        for word in lexicon.words():
            segments = mafi.g2p(word, lexicon)
            assert mafi.mafi_score(segments, [segments]) == 0.0

    def test_single_voice_feature_substitution(self, lexicon):
        bat = mafi.g2p("BAT", lexicon)
        pat = mafi.g2p("PAT", lexicon)
        expected = -(1.0 / 14.0) / 3.0
        assert mafi.mafi_score(bat, [pat]) == pytest.approx(expected, abs=1e-9)

    def test_empty_guess_costs_all_deletions(self, lexicon):
        bat = mafi.g2p("BAT", lexicon)
        assert mafi.mafi_score(bat, [[]]) == pytest.approx(-1.0)

    def test_mean_over_guesses(self, lexicon):
        bat = mafi.g2p("BAT", lexicon)
        pat = mafi.g2p("PAT", lexicon)
        expected = (0.0 + -(1.0 / 14.0) / 3.0) / 2.0
        assert mafi.mafi_score(bat, [bat, pat]) == pytest.approx(expected, abs=1e-12)

    def test_never_positive(self, lexicon):
        words = lexicon.words()
        rng = np.random.default_rng(0)
        for _ in range(50):
            target = mafi.g2p(str(rng.choice(words)), lexicon)
            guesses = [mafi.g2p(str(rng.choice(words)), lexicon) for _ in range(3)]
            assert mafi.mafi_score(target, guesses) <= 0.0

    def test_monotone_under_added_feature_flips(self, lexicon):
        # Flipping one more feature in a guess segment never raises the score.
        target = mafi.g2p("BAT", lexicon)
        base_features = list(target[0].features)
        score_prev = mafi.mafi_score(target, [target])
        flipped = list(base_features)
        for idx in range(mafi.N_FEATURES):
            flipped[idx] = -flipped[idx] if flipped[idx] != 0 else 1
            guess = [mafi.PhonSegment("x", tuple(flipped)), target[1], target[2]]
            score = mafi.mafi_score(target, [guess])
            assert score <= score_prev + 1e-12
            score_prev = score

    def test_dissimilarity_bound(self, lexicon):
        # per-guess dissimilarity <= max(1, len(guess)/len(target))
        words = lexicon.words()
        rng = np.random.default_rng(1)
        for _ in range(50):
            t = mafi.g2p(str(rng.choice(words)), lexicon)
            g = mafi.g2p(str(rng.choice(words)), lexicon)
            dissim = -mafi.mafi_score(t, [g])
            assert dissim <= max(1.0, len(g) / len(t)) + 1e-12

    def test_empty_target_rejected(self, lexicon):
        with pytest.raises(EmptyTargetError):
            mafi.mafi_score([], [mafi.g2p("BAT", lexicon)])


class TestLoadNorms:
    def test_valid_rows(self, tmp_path):
        path = tmp_path / "norms.csv"
        path.write_text("word,score\ncat,-1.2\nDOG,-0.4\nbird,0.0\n", encoding="utf-8")
        entries = mafi.load_norms(path)
        assert [(e.word, e.score) for e in entries] == [
            ("BIRD", 0.0), ("CAT", -1.2), ("DOG", -0.4),
        ]

    def test_duplicate_word(self, tmp_path):
        path = tmp_path / "norms.csv"
        path.write_text("cat,-1.2\nCat,-0.3\n", encoding="utf-8")
        with pytest.raises(DuplicateWordError):
            mafi.load_norms(path)

    def test_score_out_of_range(self, tmp_path):
        path = tmp_path / "norms.csv"
        path.write_text("cat,-9.5\n", encoding="utf-8")
        with pytest.raises(ScoreOutOfRangeError):
            mafi.load_norms(path)

    def test_small_positive_clamped(self, tmp_path):
        path = tmp_path / "norms.csv"
        path.write_text("cat,0.25\n", encoding="utf-8")
        assert mafi.load_norms(path)[0].score == 0.0

    def test_shipped_demo_norms_within_published_range(self):
        from importlib import resources

        ref = resources.files("avsr_gauge").joinpath("data/mafi_norms_demo.csv")
        with resources.as_file(ref) as path:
            entries = mafi.load_norms(path)
        assert entries
        assert all(-2.5 <= e.score <= 0.0 for e in entries)


class TestPearson:
    def test_perfect_linearity(self):
        x = [1.0, 2.0, 5.0, 7.0]
        y = [2 * v + 1 for v in x]
        assert mafi.pearson(x, y) == pytest.approx(1.0)

    def test_perfect_negative(self):
        x = [0.0, 1.0, 2.0, 3.0]
        assert mafi.pearson(x, [-v for v in x]) == pytest.approx(-1.0)

    def test_hand_value(self):
        assert mafi.pearson([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]) == pytest.approx(0.8)

    def test_affine_invariance(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(40)
        y = rng.standard_normal(40)
        base = mafi.pearson(x, y)
        assert mafi.pearson(3.5 * x + 2.0, y) == pytest.approx(base, abs=1e-12)
        assert mafi.pearson(-2.0 * x + 1.0, y) == pytest.approx(-base, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            mafi.pearson([1, 2, 3], [1, 2])

    def test_constant_input(self):
        with pytest.raises(ConstantInputError):
            mafi.pearson([1, 1, 1], [1, 2, 3])


class TestPValue:
    def test_zero_r_is_one(self):
        for n in (3, 10, 100):
            assert mafi.p_value(0.0, n) == pytest.approx(1.0)

    def test_frozen_fixture(self):
        # independent oracle: t = 1.8257, df = 10 -> p = 0.09785
        t = 0.5 * np.sqrt(10 / 0.75)
        assert student_t_two_tailed(t, 10) == pytest.approx(0.0978546, abs=1e-6)
        assert mafi.p_value(0.5, 12) == pytest.approx(0.0979, abs=0.0005)

    def test_matches_independent_beta_series(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(5, 60))
            r = float(rng.uniform(-0.95, 0.95))
            t = abs(r) * np.sqrt((n - 2) / (1 - r * r))
            assert mafi.p_value(r, n) == pytest.approx(
                student_t_two_tailed(t, n - 2), abs=1e-10
            )

    def test_degenerate_r(self):
        with pytest.warns(DegenerateCorrelationWarning):
            assert mafi.p_value(1.0, 10) == 0.0

    def test_agrees_with_permutation(self):
        rng = np.random.default_rng(4)
        for k in range(5):
            x = rng.standard_normal(30)
            y = 0.4 * x + rng.standard_normal(30)
            r = mafi.pearson(x, y)
            analytic = mafi.p_value(r, 30)
            permuted = mafi.permutation_p(x, y, iterations=20000, seed=100 + k)
            assert abs(analytic - permuted) <= 0.02


class TestPermutationP:
    def test_extreme_case(self):
        x = np.arange(10.0)
        y = 2.0 * x + 1.0
        assert mafi.permutation_p(x, y, iterations=10000, seed=0) <= 0.001

    def test_null_case_near_one(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(25)
        y = rng.permutation(x)
        p = mafi.permutation_p(x, y, iterations=5000, seed=1)
        assert p > 0.2

    def test_minimum_iterations(self):
        with pytest.raises(ValueError):
            mafi.permutation_p([1, 2, 3], [1, 2, 3], iterations=10, seed=0)


class TestStars:
    def test_thresholds_exact(self):
        eps = 1e-12
        assert mafi.stars(0.01 + eps) == ""
        assert mafi.stars(0.01) == ""
        assert mafi.stars(0.01 - eps) == "**"
        assert mafi.stars(0.001) == "**"
        assert mafi.stars(0.001 - eps) == "***"
        assert mafi.stars(0.0) == "***"
        assert mafi.stars(1.0) == ""

    def test_table_rendering_fixture(self):
        assert mafi.format_correlation(-0.097, 0.004) == "-0.097**"
        assert mafi.format_correlation(-0.173, 0.0005) == "-0.173***"


class TestCorrelate:
    def _stats(self, word, count, subs, dels):
        return scoring.WordStats(word, count, subs, dels)

    def test_disjoint_vocabularies(self):
        norms = [mafi.MafiEntry("CAT", -1.0)]
        iwers = [self._stats("DOG", 10, 1, 0)]
        with pytest.raises(EmptyIntersectionError):
            mafi.correlate(norms, iwers)

    def test_constructed_linearity(self):
        # iwer = -0.5 * score exactly -> r = -1 (note: scores <= 0)
        scores = [-0.2, -0.6, -1.0, -1.4, -1.8]
        norms = [mafi.MafiEntry("W%d" % k, s) for k, s in enumerate(scores)]
        iwers = [
            self._stats("W%d" % k, 10, int(round(-5 * s)), 0)
            for k, s in enumerate(scores)
        ]
        res = mafi.correlate(norms, iwers, min_count=7)
        assert res.r == pytest.approx(-1.0)
        assert res.stars == "***"

    def test_min_count_filters(self):
        norms = [mafi.MafiEntry("W%d" % k, -0.1 * (k + 1)) for k in range(6)]
        iwers = [self._stats("W%d" % k, 3, 1, 0) for k in range(3)] + [
            self._stats("W%d" % k, 9, k, 0) for k in range(3, 6)
        ]
        res = mafi.correlate(norms, iwers, min_count=7)
        assert res.n == 3

    def test_result_invariants(self):
        rng = np.random.default_rng(6)
        norms = [mafi.MafiEntry("W%d" % k, float(-rng.uniform(0, 2))) for k in range(20)]
        iwers = [self._stats("W%d" % k, 10, int(rng.integers(0, 5)), 0) for k in range(20)]
        res = mafi.correlate(norms, iwers, min_count=7)
        assert -1.0 <= res.r <= 1.0
        assert res.n == 20
        assert res.stars == mafi.stars(res.p)
        assert res.formatted().startswith("%.3f" % res.r)
