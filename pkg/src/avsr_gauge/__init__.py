"""avsr_gauge: measure the visual contribution of AVSR systems.

Submodules:
    noisemix  - seeded pink noise and SNR-calibrated mixing
    scoring   - transcript alignment, WER, IWER, relative increases
    gaincurve - WER-vs-SNR curves and effective SNR gains
    occlusion - word-aligned frame occlusion planning and filling
    mafi      - visual-informativeness scores and correlation stats
    simkit    - synthetic recognizers with known psychometric behaviour
    report    - end-to-end evaluation bundles, tables, SVG plots
"""

from .gaincurve import GainResult, WerCurve, effective_snr_gain, gain_report, interpolate
from .noisemix import AudioBuffer, MixSpec, generate_pink_noise, measure_snr, mix_at_snr
from .occlusion import OcclusionManifest, WordSpan, occlusion_window, plan, word_frames
from .mafi import CorrelationResult, MafiEntry, correlate, mafi_score, pearson, p_value
from .scoring import AlignmentResult, WordStats, align, corpus_wer, iwer_table, normalize, relative_increase
from .simkit import SyntheticRecognizer, simulate, sweep, word_accuracy

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "AudioBuffer",
    "CorrelationResult",
    "GainResult",
    "MafiEntry",
    "MixSpec",
    "OcclusionManifest",
    "SyntheticRecognizer",
    "WerCurve",
    "WordSpan",
    "WordStats",
    "align",
    "correlate",
    "corpus_wer",
    "effective_snr_gain",
    "gain_report",
    "generate_pink_noise",
    "interpolate",
    "iwer_table",
    "mafi_score",
    "measure_snr",
    "mix_at_snr",
    "normalize",
    "occlusion_window",
    "p_value",
    "pearson",
    "plan",
    "relative_increase",
    "simulate",
    "sweep",
    "word_accuracy",
    "word_frames",
]
