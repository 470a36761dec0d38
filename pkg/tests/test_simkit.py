import math

import numpy as np
import pytest

from avsr_gauge import scoring, simkit
from avsr_gauge.errors import ConfigError
from avsr_gauge.gaincurve import effective_snr_gain
from avsr_gauge.simkit import (
    SyntheticRecognizer,
    simulate,
    sweep,
    sweep_from_config,
    synthetic_refs,
    word_accuracy,
)


class TestSyntheticRecognizer:
    def test_validation(self):
        with pytest.raises(ValueError):
            SyntheticRecognizer(floor_acc=0.0)
        with pytest.raises(ValueError):
            SyntheticRecognizer(slope=-1.0)
        with pytest.raises(ValueError):
            SyntheticRecognizer(error_mix=(0.5, 0.5, 0.5))

    def test_logistic_midpoint(self):
        rec = SyntheticRecognizer(floor_acc=0.9, midpoint_db=-4.0, slope=0.7)
        assert word_accuracy(rec, -4.0) == pytest.approx(0.45)

    def test_asymptote(self):
        rec = SyntheticRecognizer(floor_acc=0.93)
        assert word_accuracy(rec, 1000.0) == pytest.approx(0.93)

    def test_av_shift_translates_curve(self):
        ao = SyntheticRecognizer(av_shift_db=0.0)
        av = SyntheticRecognizer(av_shift_db=4.0)
        for snr in (-10.0, -3.0, 0.0, 5.0):
            assert word_accuracy(av, snr) == pytest.approx(word_accuracy(ao, snr + 4.0))


class TestSimulate:
    def test_perfect_accuracy_is_identity(self):
        refs = synthetic_refs(200, utt_len=5, vocab_size=20, seed=1)
        rec = SyntheticRecognizer(floor_acc=1.0, midpoint_db=-1000.0, slope=1.0)
        hyps = simulate(refs, rec, snr_db=0.0, seed=0)
        assert hyps == refs

    def test_all_deletions_give_wer_100(self):
        refs = synthetic_refs(200, utt_len=5, vocab_size=20, seed=1)
        rec = SyntheticRecognizer(
            floor_acc=1e-12, midpoint_db=1000.0, slope=1.0, error_mix=(0.0, 1.0, 0.0)
        )
        hyps = simulate(refs, rec, snr_db=0.0, seed=0)
        assert all(h == [] for h in hyps.values())
        alignments = [scoring.align(refs[u], hyps[u]) for u in refs]
        assert scoring.corpus_wer(alignments) == pytest.approx(100.0)

    def test_deterministic_per_seed(self):
        refs = synthetic_refs(500, utt_len=5, vocab_size=30, seed=2)
        rec = SyntheticRecognizer()
        a = simulate(refs, rec, snr_db=-3.0, seed=7)
        b = simulate(refs, rec, snr_db=-3.0, seed=7)
        c = simulate(refs, rec, snr_db=-3.0, seed=8)
        assert a == b
        assert a != c

    def test_binomial_concentration(self):
        # 50k words at accuracy 0.8, no insertions: WER = 20% within 3 sigma.
        refs = synthetic_refs(50000, utt_len=6, vocab_size=200, seed=3)
        rec = SyntheticRecognizer(
            floor_acc=0.8, midpoint_db=-1e9, slope=1.0, error_mix=(0.75, 0.25, 0.0)
        )
        hyps = simulate(refs, rec, snr_db=0.0, seed=11)
        alignments = [scoring.align(refs[u], hyps[u]) for u in refs]
        wer = scoring.corpus_wer(alignments)
        assert wer == pytest.approx(20.0, abs=0.6)


class TestSweep:
    def test_zero_shift_curves_close(self):
        refs = synthetic_refs(20000, utt_len=5, vocab_size=100, seed=4)
        rec = SyntheticRecognizer(midpoint_db=0.0)
        ao, av = sweep(rec, rec, refs, [-6.0, -3.0, 0.0, 3.0], seed=5)
        for (_, wa), (_, wb) in zip(ao.points, av.points):
            assert abs(wa - wb) <= 2.5  # independent sampling noise only

    def test_monotone_in_expectation(self):
        refs = synthetic_refs(4000, utt_len=5, vocab_size=50, seed=6)
        rec = SyntheticRecognizer(midpoint_db=0.0)
        grid = [-9.0, -6.0, -3.0, 0.0, 3.0, 6.0]
        acc = np.zeros(len(grid))
        for seed in range(5):
            curve, _ = sweep(rec, rec, refs, grid, seed=seed)
            acc += np.array([w for _, w in curve.points])
        mean_wers = acc / 5
        assert all(a >= b - 1e-9 for a, b in zip(mean_wers, mean_wers[1:]))

    def test_gain_recovery_single_shift(self):
        refs = synthetic_refs(30000, utt_len=6, vocab_size=150, seed=7)
        ao_rec = SyntheticRecognizer(midpoint_db=0.0)
        av_rec = SyntheticRecognizer(midpoint_db=0.0, av_shift_db=3.7)
        grid = [float(s) for s in range(-9, 4)]
        ao, av = sweep(ao_rec, av_rec, refs, grid, seed=8)
        res = effective_snr_gain(ao, av, ref_snr=0.0)
        assert res.gain_db == pytest.approx(3.7, abs=0.3)

    def test_grid_must_ascend(self):
        refs = synthetic_refs(100, utt_len=5, vocab_size=10, seed=9)
        rec = SyntheticRecognizer()
        with pytest.raises(ValueError):
            sweep(rec, rec, refs, [0.0, -5.0], seed=0)


class TestSweepConfig:
    def test_defaults_and_overrides(self):
        ao, av, refs, grid, seed = sweep_from_config(
            {"av_shift_db": "4.5", "n_words": "600", "utt_len": "6", "seed": "3"}
        )
        assert ao.av_shift_db == 0.0
        assert av.av_shift_db == 4.5
        assert sum(len(t) for t in refs.values()) == 600
        assert grid[0] == -15.0 and grid[-1] == 10.0
        assert seed == 3

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            sweep_from_config({"not_a_key": "1"})

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            sweep_from_config({"slope": "fast"})
