"""Exception hierarchy shared by all avsr_gauge modules.

Two branches matter for the CLI: ConfigError (bad invocation or config,
exit code 2) and DataError (malformed or contract-violating data, exit
code 3).
"""


class AvsrGaugeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(AvsrGaugeError):
    """Invalid configuration, arguments, or missing input files."""


class DataError(AvsrGaugeError):
    """Input data violates a documented contract."""


# --- audio mixing ---

class RateMismatchError(DataError):
    """Buffers have different sample rates (resampling is out of scope)."""


class SilentSpeechError(DataError):
    """Speech signal has zero power; SNR is undefined."""


class SilentNoiseError(DataError):
    """Noise signal has zero power; SNR is undefined."""


class PeakExceededError(DataError):
    """Mixture exceeds full scale under peak policy 'error'."""


# --- scoring ---

class EmptyReferenceError(DataError):
    """Corpus WER requested over zero reference words."""


class ZeroBaselineError(DataError):
    """Relative WER increase needs a strictly positive baseline."""


class DuplicateUtteranceError(DataError):
    """Transcript file repeats an utterance id."""


class UtteranceSetMismatchError(DataError):
    """Reference and hypothesis files cover different utterance ids."""


# --- gain curves ---

class OutOfRangeError(DataError):
    """Interpolation requested outside the measured SNR range."""


class RefOutOfRangeError(OutOfRangeError):
    """Reference SNR lies outside the audio-only curve's range."""


class NoCrossingError(DataError):
    """The audio-visual curve never crosses down to the reference WER."""


# --- occlusion ---

class MalformedLineError(DataError):
    """A line of an input file does not match the expected format."""

    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no


class OverlapDetectedError(DataError):
    """Word spans within one utterance overlap in time."""

    def __init__(self, message, utt_id=None, word_index=None):
        super().__init__(message)
        self.utt_id = utt_id
        self.word_index = word_index


class TierNotFoundError(DataError):
    """Requested interval tier is absent from the TextGrid."""


class MalformedFileError(DataError):
    """File cannot be parsed as the expected format."""


class FrameIndexOutOfRangeError(DataError):
    """Occlusion window points past the end of the frame sequence."""


class RegionOutOfBoundsError(DataError):
    """Occlusion region does not fit inside the frame raster."""


# --- mafi statistics ---

class OutOfVocabularyError(DataError):
    """Word has no entry in the pronouncing lexicon."""


class EmptyTargetError(DataError):
    """Similarity scoring needs a non-empty target segment sequence."""


class DuplicateWordError(DataError):
    """Norms file lists the same word twice."""


class ScoreOutOfRangeError(DataError):
    """Norm score falls outside the plausible range; file looks corrupt."""


class LengthMismatchError(DataError):
    """Paired samples have different lengths."""


class ConstantInputError(DataError):
    """Correlation is undefined for a constant input."""


class EmptyIntersectionError(DataError):
    """No words are shared between the norms and the error-rate table."""


# --- reporting ---

class RaggedRowsError(DataError):
    """Table rows do not all have the same number of cells."""


class EmptyInputError(DataError):
    """Rendering requested with no curves."""


class DegenerateCorrelationWarning(UserWarning):
    """|r| = 1 exactly; the p-value is pinned to 0."""
