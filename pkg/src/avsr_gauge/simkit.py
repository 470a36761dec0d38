"""Synthetic recognizers with known psychometric behaviour.

Word accuracy follows a logistic curve in SNR; an audio-visual variant
is the same curve shifted left by a known amount. Simulating transcripts
from these recognizers and scoring them through the real scoring module
yields WER-vs-SNR curves whose true effective SNR gain is known, which
makes the gain estimator testable end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import scoring
from .errors import ConfigError
from .gaincurve import WerCurve


@dataclass(frozen=True)
class SyntheticRecognizer:
    """Logistic word-accuracy curve plus an error-type profile.

    floor_acc is the high-SNR accuracy asymptote; av_shift_db moves the
    whole curve left (0 for an audio-only system). error_mix gives the
    substitution/deletion/insertion probabilities conditional on a word
    being recognized wrongly.
    """

    floor_acc: float = 0.98
    midpoint_db: float = -6.0
    slope: float = 0.5
    av_shift_db: float = 0.0
    error_mix: tuple[float, float, float] = (0.7, 0.2, 0.1)

    def __post_init__(self):
        if not (0.0 < self.floor_acc <= 1.0):
            raise ValueError("floor_acc must be in (0, 1]")
        if self.slope <= 0:
            raise ValueError("slope must be positive")
        if len(self.error_mix) != 3 or any(p < 0 for p in self.error_mix):
            raise ValueError("error_mix must be three non-negative probabilities")
        if abs(sum(self.error_mix) - 1.0) > 1e-9:
            raise ValueError("error_mix must sum to 1")


def word_accuracy(rec: SyntheticRecognizer, snr_db: float) -> float:
    """Probability of recognizing a word correctly at the given SNR."""
    z = rec.slope * (snr_db + rec.av_shift_db - rec.midpoint_db)
    if z >= 0:
        return rec.floor_acc / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return rec.floor_acc * ez / (1.0 + ez)


def simulate(
    refs: dict[str, list[str]], rec: SyntheticRecognizer, snr_db: float, seed
) -> dict[str, list[str]]:
    """Simulated hypothesis transcripts for the references at one SNR.

    Each reference word is recognized correctly with probability
    a(snr); otherwise one error is drawn from error_mix: substitute
    with a random other vocabulary word, delete the word, or keep it
    and insert a random vocabulary word after it. Deterministic for a
    given (refs order, rec, snr, seed).
    """
    vocab = sorted({w for tokens in refs.values() for w in tokens})
    n_total = sum(len(tokens) for tokens in refs.values())
    acc = word_accuracy(rec, snr_db)
    p_sub, p_del, _ = rec.error_mix

    rng = np.random.default_rng(seed)
    is_error = rng.random(n_total) >= acc
    error_kind = rng.random(n_total)
    sub_draw = rng.integers(0, max(1, len(vocab) - 1), n_total)
    ins_draw = rng.integers(0, max(1, len(vocab)), n_total)

    vocab_index = {w: k for k, w in enumerate(vocab)}
    hyps: dict[str, list[str]] = {}
    pos = 0
    for utt_id, tokens in refs.items():
        out: list[str] = []
        for word in tokens:
            k = pos
            pos += 1
            if not is_error[k]:
                out.append(word)
                continue
            kind = error_kind[k]
            if kind < p_sub:
                if len(vocab) < 2:
                    out.append("<SUB>")
                else:
                    j = int(sub_draw[k])
                    if j >= vocab_index[word]:
                        j += 1
                    out.append(vocab[j])
            elif kind < p_sub + p_del:
                pass
            else:
                out.append(word)
                out.append(vocab[int(ins_draw[k])])
        hyps[utt_id] = out
    return hyps


def sweep(
    ao_rec: SyntheticRecognizer,
    av_rec: SyntheticRecognizer,
    refs: dict[str, list[str]],
    snr_grid: list[float],
    seed: int,
) -> tuple[WerCurve, WerCurve]:
    """Simulate and score both recognizers over an SNR grid.

    Each grid point gets its own derived seed per curve, so the two
    curves carry independent sampling noise. Scoring goes through the
    scoring module's alignment, not the generator's bookkeeping.
    """
    grid = [float(s) for s in snr_grid]
    if grid != sorted(grid) or len(grid) != len(set(grid)):
        raise ValueError("snr_grid must be strictly ascending")

    curves = []
    for curve_idx, rec in enumerate((ao_rec, av_rec)):
        points = []
        for i, snr in enumerate(grid):
            hyps = simulate(refs, rec, snr, seed=[seed, curve_idx, i])
            alignments = [scoring.align(refs[u], hyps[u]) for u in refs]
            points.append((snr, min(100.0, scoring.corpus_wer(alignments))))
        curves.append(points)
    return (
        WerCurve(points=tuple(curves[0]), label="audio-only"),
        WerCurve(points=tuple(curves[1]), label="audio-visual"),
    )


def synthetic_refs(
    n_words: int, utt_len: int = 6, vocab_size: int = 200, seed: int = 0
) -> dict[str, list[str]]:
    """Deterministic synthetic reference transcripts for simulations."""
    if n_words < 1 or utt_len < 1 or vocab_size < 2:
        raise ValueError("need n_words >= 1, utt_len >= 1, vocab_size >= 2")
    vocab = ["W%03d" % k for k in range(vocab_size)]
    rng = np.random.default_rng([seed, 991])
    draws = rng.integers(0, vocab_size, n_words)
    refs: dict[str, list[str]] = {}
    for start in range(0, n_words, utt_len):
        utt_id = "u%06d" % (start // utt_len)
        refs[utt_id] = [vocab[int(k)] for k in draws[start : start + utt_len]]
    return refs


# --- flat key=value sweep configuration ---

_SWEEP_DEFAULTS = {
    "floor_acc": 0.98,
    "midpoint_db": -6.0,
    "slope": 0.5,
    "av_shift_db": 0.0,
    "error_sub": 0.7,
    "error_del": 0.2,
    "error_ins": 0.1,
    "snr_min": -15.0,
    "snr_max": 10.0,
    "snr_step": 1.0,
    "n_words": 50000,
    "utt_len": 6,
    "vocab_size": 200,
    "seed": 0,
}


def sweep_from_config(settings: dict[str, str]):
    """Build (ao_rec, av_rec, refs, grid, seed) from flat key=value settings."""
    merged = dict(_SWEEP_DEFAULTS)
    unknown = set(settings) - set(merged)
    if unknown:
        raise ConfigError("unknown sweep config keys: %s" % sorted(unknown))
    for key, value in settings.items():
        try:
            merged[key] = type(_SWEEP_DEFAULTS[key])(value)
        except ValueError as exc:
            raise ConfigError("bad value for %s: %r" % (key, value)) from exc

    error_mix = (merged["error_sub"], merged["error_del"], merged["error_ins"])
    base = dict(
        floor_acc=merged["floor_acc"],
        midpoint_db=merged["midpoint_db"],
        slope=merged["slope"],
        error_mix=error_mix,
    )
    ao = SyntheticRecognizer(av_shift_db=0.0, **base)
    av = SyntheticRecognizer(av_shift_db=merged["av_shift_db"], **base)

    if merged["snr_step"] <= 0 or merged["snr_max"] <= merged["snr_min"]:
        raise ConfigError("need snr_min < snr_max and snr_step > 0")
    n_steps = int(round((merged["snr_max"] - merged["snr_min"]) / merged["snr_step"]))
    grid = [merged["snr_min"] + k * merged["snr_step"] for k in range(n_steps + 1)]

    refs = synthetic_refs(
        n_words=merged["n_words"],
        utt_len=merged["utt_len"],
        vocab_size=merged["vocab_size"],
        seed=merged["seed"],
    )
    return ao, av, refs, grid, merged["seed"]
