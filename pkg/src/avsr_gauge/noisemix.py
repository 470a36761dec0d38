"""Pink noise synthesis and SNR-calibrated speech/noise mixing.

Builds the noisy test conditions: deterministic 1/f noise from a seed,
whole-utterance SNR measurement, and mixing with the noise rescaled so
the mixture hits the target SNR exactly.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import (
    DataError,
    PeakExceededError,
    RateMismatchError,
    SilentNoiseError,
    SilentSpeechError,
)

PEAK_POLICIES = ("rescale", "clip", "error")

# Synthesized noise is normalized to this peak, leaving headroom for mixing.
_PINK_PEAK = 0.9


@dataclass(frozen=True)
class AudioBuffer:
    """Mono audio: float samples nominally in [-1, 1] plus a sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("samples must be one-dimensional (mono)")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        if int(self.sample_rate) <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def power(self) -> float:
        """Mean squared amplitude over the whole buffer."""
        if self.samples.size == 0:
            return 0.0
        return float(np.mean(self.samples**2))


@dataclass(frozen=True)
class MixSpec:
    """Mixing parameters: target SNR, seed (recorded for provenance), peak policy."""

    target_snr_db: float
    seed: int = 0
    peak_policy: str = "rescale"

    def __post_init__(self):
        if not np.isfinite(self.target_snr_db):
            raise ValueError("target_snr_db must be finite")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.peak_policy not in PEAK_POLICIES:
            raise ValueError("peak_policy must be one of %s" % (PEAK_POLICIES,))


@dataclass(frozen=True)
class MixResult:
    """A mixture plus the gains that produced it (for the manifest)."""

    mixture: AudioBuffer
    noise_scale: float
    mixture_gain: float


def generate_pink_noise(n_samples: int, sample_rate: int, seed: int) -> AudioBuffer:
    """Deterministic pink (1/f) noise via spectral shaping.

    A white Gaussian signal is transformed to the frequency domain, each
    bin is scaled by 1/sqrt(f) (DC zeroed), and the result is inverse
    transformed and normalized to a 0.9 peak. Power spectral density
    then falls at ~3 dB per octave. Bit-identical output for identical
    arguments.

    Parameters
    ----------
    n_samples : int
        Output length; 0 yields an empty buffer.
    sample_rate : int
        Sample rate in Hz (only sets the buffer's rate and the
        frequency grid; the 1/f shape is rate-invariant).
    seed : int
        64-bit seed for the underlying generator.
    """
    if n_samples < 0:
        raise ValueError("n_samples must be >= 0")
    if n_samples == 0:
        return AudioBuffer(np.zeros(0), sample_rate)

    rng = np.random.default_rng(seed)
    white = rng.standard_normal(n_samples)
    spectrum = np.fft.rfft(white)
    freqs = np.fft.rfftfreq(n_samples, d=1.0 / sample_rate)
    shaping = np.zeros_like(freqs)
    shaping[1:] = 1.0 / np.sqrt(freqs[1:])
    pink = np.fft.irfft(spectrum * shaping, n=n_samples)

    peak = np.max(np.abs(pink))
    if peak > 0:
        pink *= _PINK_PEAK / peak
    return AudioBuffer(pink, sample_rate)


def measure_snr(speech: AudioBuffer, noise: AudioBuffer) -> float:
    """Signal-to-noise ratio in dB: 10*log10(P_speech / P_noise).

    Power is the whole-buffer mean squared amplitude (no voice-activity
    gating).
    """
    if speech.sample_rate != noise.sample_rate:
        raise RateMismatchError(
            "speech at %d Hz vs noise at %d Hz" % (speech.sample_rate, noise.sample_rate)
        )
    p_speech = speech.power()
    p_noise = noise.power()
    if p_speech == 0.0:
        raise SilentSpeechError("speech power is zero")
    if p_noise == 0.0:
        raise SilentNoiseError("noise power is zero")
    return 10.0 * np.log10(p_speech / p_noise)


def fit_noise_length(noise: np.ndarray, n: int) -> np.ndarray:
    """Tile (wrap) or truncate noise samples to exactly n samples."""
    if n == 0:
        return noise[:0].copy()
    if noise.size == 0:
        raise SilentNoiseError("cannot fit an empty noise buffer")
    reps = -(-n // noise.size)
    return np.tile(noise, reps)[:n]


def noise_scale_for_target(speech: AudioBuffer, fitted_noise: np.ndarray, target_snr_db: float) -> float:
    """Gain g such that measure_snr(speech, g * fitted_noise) == target."""
    p_speech = speech.power()
    p_noise = float(np.mean(fitted_noise**2)) if fitted_noise.size else 0.0
    if p_speech == 0.0:
        raise SilentSpeechError("speech power is zero")
    if p_noise == 0.0:
        raise SilentNoiseError("noise power is zero")
    return float(np.sqrt(p_speech / (p_noise * 10.0 ** (target_snr_db / 10.0))))


def mix_with_details(speech: AudioBuffer, noise: AudioBuffer, spec: MixSpec) -> MixResult:
    """Mix noise into speech at the target SNR; return mixture and gains.

    The noise is tiled or truncated to the speech length, scaled so the
    speech-to-scaled-noise ratio equals the target exactly, and summed.
    The peak policy then handles |sample| > 1: 'rescale' scales the whole
    mixture down to peak 1 (recording the gain), 'clip' hard-limits, and
    'error' raises PeakExceededError.
    """
    if speech.sample_rate != noise.sample_rate:
        raise RateMismatchError(
            "speech at %d Hz vs noise at %d Hz" % (speech.sample_rate, noise.sample_rate)
        )
    fitted = fit_noise_length(noise.samples, len(speech))
    scale = noise_scale_for_target(speech, fitted, spec.target_snr_db)
    mixture = speech.samples + scale * fitted

    gain = 1.0
    peak = float(np.max(np.abs(mixture))) if mixture.size else 0.0
    if peak > 1.0:
        if spec.peak_policy == "rescale":
            gain = 1.0 / peak
            mixture = mixture * gain
        elif spec.peak_policy == "clip":
            mixture = np.clip(mixture, -1.0, 1.0)
        else:
            raise PeakExceededError("mixture peak %.4f exceeds full scale" % peak)
    return MixResult(AudioBuffer(mixture, speech.sample_rate), scale, gain)


def mix_at_snr(speech: AudioBuffer, noise: AudioBuffer, spec: MixSpec) -> AudioBuffer:
    """Mixture of speech and SNR-calibrated noise (see mix_with_details)."""
    return mix_with_details(speech, noise, spec).mixture


# --- WAV I/O (16-bit PCM mono; resampling out of scope) ---

def read_wav(path) -> AudioBuffer:
    """Read a 16-bit PCM mono WAV file into [-1, 1] floats."""
    rate, data = wavfile.read(path)
    if data.ndim != 1:
        raise DataError("%s: expected mono audio, got %d channels" % (path, data.shape[1]))
    if data.dtype != np.int16:
        raise DataError("%s: expected 16-bit PCM, got %s" % (path, data.dtype))
    return AudioBuffer(data.astype(np.float64) / 32767.0, int(rate))


def write_wav(path, buffer: AudioBuffer) -> None:
    """Write 16-bit PCM mono WAV atomically (temp file + rename)."""
    clipped = np.clip(buffer.samples, -1.0, 1.0)
    pcm = np.round(clipped * 32767.0).astype(np.int16)
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    wavfile.write(tmp, buffer.sample_rate, pcm)
    os.replace(tmp, path)


def batch_mix(
    speech_paths: list,
    noise: AudioBuffer,
    snrs: list[float],
    out_dir,
    seed: int = 0,
    peak_policy: str = "rescale",
    jobs: int = 1,
) -> list[dict]:
    """Mix each speech file with the noise at each SNR and write WAVs.

    Outputs are named `<stem>_snr<DB>.wav` under out_dir and written
    atomically. Returns manifest rows (input_path, snr_db, noise_scale,
    mixture_gain) in deterministic order.
    """
    from concurrent.futures import ThreadPoolExecutor

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(Path(p), float(snr)) for p in sorted(speech_paths) for snr in snrs]

    def one(task):
        speech_path, snr = task
        speech = read_wav(speech_path)
        spec = MixSpec(target_snr_db=snr, seed=seed, peak_policy=peak_policy)
        result = mix_with_details(speech, noise, spec)
        tag = ("%+g" % snr).replace("+", "p").replace("-", "m").replace(".", "_")
        out_path = out_dir / ("%s_snr%s.wav" % (speech_path.stem, tag))
        write_wav(out_path, result.mixture)
        return {
            "input_path": str(speech_path),
            "snr_db": snr,
            "noise_scale": result.noise_scale,
            "mixture_gain": result.mixture_gain,
        }

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, tasks))
    else:
        rows = [one(t) for t in tasks]
    return rows


def write_mix_manifest(path, rows: list[dict]) -> None:
    """Manifest CSV: input_path, snr_db, noise_scale, mixture_gain."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["input_path", "snr_db", "noise_scale", "mixture_gain"])
        for row in rows:
            w.writerow(
                [
                    row["input_path"],
                    repr(row["snr_db"]),
                    repr(row["noise_scale"]),
                    repr(row["mixture_gain"]),
                ]
            )
