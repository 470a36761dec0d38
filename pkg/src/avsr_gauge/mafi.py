"""Word-level visual informativeness scores and correlation statistics.

Scores come from a speechreading norm: a word and the guesses people
made for it are rendered as phone segments, each segment carries a
14-dimensional ternary phonological feature vector, and the score is the
negated mean alignment cost between target and guesses (0 = perfectly
recognized, more negative = less visually informative). The module also
loads published norm files and correlates scores with per-word error
rates via Pearson's r with a Student-t p-value, cross-checkable against
a permutation test.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
from scipy import special

from . import scoring
from .errors import (
    ConstantInputError,
    DegenerateCorrelationWarning,
    DuplicateWordError,
    EmptyIntersectionError,
    EmptyTargetError,
    LengthMismatchError,
    MalformedLineError,
    OutOfVocabularyError,
    ScoreOutOfRangeError,
)

FEATURE_NAMES = (
    "consonantal",
    "sonorant",
    "voice",
    "nasal",
    "continuant",
    "labial",
    "round",
    "coronal",
    "anterior",
    "dorsal",
    "high",
    "low",
    "back",
    "tense",
)
N_FEATURES = len(FEATURE_NAMES)

# Norm scores far outside the published range mean a corrupt file; small
# positive values are clamped to the documented ceiling of 0.
_NORM_RANGE = (-4.0, 0.5)


@dataclass(frozen=True)
class PhonSegment:
    """One phone: its IPA rendering and ternary feature vector."""

    ipa: str
    features: tuple[int, ...]

    def __post_init__(self):
        if len(self.features) != N_FEATURES:
            raise ValueError(
                "expected %d features, got %d" % (N_FEATURES, len(self.features))
            )
        if any(v not in (-1, 0, 1) for v in self.features):
            raise ValueError("features must be -1, 0, or +1")


@dataclass(frozen=True)
class MafiEntry:
    """A word and its visual-informativeness score (<= 0, 0 = best)."""

    word: str
    score: float

    def __post_init__(self):
        if self.score > 0:
            raise ValueError("score must be <= 0, got %r" % self.score)


def load_feature_table(path=None) -> dict[str, PhonSegment]:
    """Load the phone -> (ipa, features) table; defaults to the shipped table."""
    if path is None:
        ref = resources.files("avsr_gauge").joinpath("data/phone_features.csv")
        text = ref.read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    table: dict[str, PhonSegment] = {}
    reader = csv.reader(text.splitlines())
    header = next(reader)
    expected = ["phone", "ipa", *FEATURE_NAMES]
    if [h.strip() for h in header] != expected:
        raise MalformedLineError("feature table header must be %s" % ",".join(expected))
    for row in reader:
        if not row:
            continue
        phone = row[0].strip().upper()
        if phone in table:
            raise DuplicateWordError("feature table repeats phone %r" % phone)
        table[phone] = PhonSegment(row[1].strip(), tuple(int(v) for v in row[2:]))
    return table


@dataclass
class Lexicon:
    """Pronouncing dictionary plus the phone feature table behind it."""

    prons: dict[str, list[list[str]]]
    features: dict[str, PhonSegment] = field(repr=False)

    def __contains__(self, word: str) -> bool:
        return word in self.prons

    def words(self) -> list[str]:
        return sorted(self.prons)

    def phones_used(self) -> set[str]:
        return {p for variants in self.prons.values() for pron in variants for p in pron}


def _strip_stress(phone: str) -> str:
    return phone.rstrip("0123456789").upper()


def load_lexicon(path=None, feature_table: dict[str, PhonSegment] | None = None) -> Lexicon:
    """Load a `WORD PH1 PH2 ...` pronouncing dictionary.

    Repeated entries for a word (including CMU-style `WORD(2)`) are kept
    as alternate pronunciations; stress digits on phones are stripped.
    Defaults to the small lexicon shipped with the package.
    """
    if feature_table is None:
        feature_table = load_feature_table()
    if path is None:
        ref = resources.files("avsr_gauge").joinpath("data/lexicon_demo.txt")
        lines = ref.read_text(encoding="utf-8").splitlines()
    else:
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()

    prons: dict[str, list[list[str]]] = {}
    for line_no, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith(";;;"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise MalformedLineError(
                "lexicon line %d: expected WORD PH1 PH2 ..., got %r" % (line_no, line),
                line_no=line_no,
            )
        word = parts[0].upper()
        if word.endswith(")") and "(" in word:
            word = word[: word.index("(")]
        phones = [_strip_stress(p) for p in parts[1:]]
        missing = [p for p in phones if p not in feature_table]
        if missing:
            raise MalformedLineError(
                "lexicon line %d: phones %s not in the feature table" % (line_no, missing),
                line_no=line_no,
            )
        prons.setdefault(word, []).append(phones)
    return Lexicon(prons=prons, features=feature_table)


def g2p(word: str, lexicon: Lexicon) -> list[PhonSegment]:
    """Segments for a word using its first listed pronunciation."""
    key = word.upper()
    if key not in lexicon.prons:
        raise OutOfVocabularyError("word %r not in lexicon" % word)
    return [lexicon.features[p] for p in lexicon.prons[key][0]]


def _substitution_cost(a: PhonSegment, b: PhonSegment) -> float:
    differing = sum(1 for x, y in zip(a.features, b.features) if x != y)
    return differing / N_FEATURES


def _alignment_cost(target: list[PhonSegment], guess: list[PhonSegment]) -> float:
    """Global alignment cost: unit indels, feature-fraction substitutions."""
    n, m = len(target), len(guess)
    prev = [float(j) for j in range(m + 1)]
    for i in range(1, n + 1):
        cur = [float(i)] + [0.0] * m
        ti = target[i - 1]
        for j in range(1, m + 1):
            a = prev[j - 1] + _substitution_cost(ti, guess[j - 1])
            b = prev[j] + 1.0
            c = cur[j - 1] + 1.0
            best = a if a <= b else b
            cur[j] = best if best <= c else c
        prev = cur
    return prev[m]


def mafi_score(target: list[PhonSegment], guesses: list[list[PhonSegment]]) -> float:
    """Visual-informativeness score of a target against speechreading guesses.

    Each guess is globally aligned to the target (indel cost 1,
    substitution cost = fraction of differing features); its
    dissimilarity is the alignment cost divided by the target length.
    The score is the negated mean dissimilarity over guesses, so an
    exactly-recognized word contributes 0 and the score is never
    positive.
    """
    if not target:
        raise EmptyTargetError("target segment sequence is empty")
    if not guesses:
        raise ValueError("need at least one guess")
    total = 0.0
    for guess in guesses:
        total += _alignment_cost(target, guess) / len(target)
    return -total / len(guesses)


def load_norms(path) -> list[MafiEntry]:
    """Load a `word,score` norms CSV.

    Word keys are normalized like transcripts; duplicates are rejected.
    Scores outside [-4, 0.5] mean a corrupt file; values in (0, 0.5]
    are clamped to the documented ceiling of 0.
    """
    entries: dict[str, MafiEntry] = {}
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        for line_no, row in enumerate(reader, 1):
            if not row or (line_no == 1 and row[0].strip().lower() == "word"):
                continue
            if len(row) < 2:
                raise MalformedLineError(
                    "%s:%d: expected word,score" % (path, line_no), line_no=line_no
                )
            tokens = scoring.normalize(row[0])
            if len(tokens) != 1:
                raise MalformedLineError(
                    "%s:%d: %r does not normalize to a single word" % (path, line_no, row[0]),
                    line_no=line_no,
                )
            word = tokens[0]
            try:
                score = float(row[1])
            except ValueError as exc:
                raise MalformedLineError(
                    "%s:%d: non-numeric score %r" % (path, line_no, row[1]),
                    line_no=line_no,
                ) from exc
            if not (_NORM_RANGE[0] <= score <= _NORM_RANGE[1]):
                raise ScoreOutOfRangeError(
                    "%s:%d: score %r outside plausible range %s"
                    % (path, line_no, score, list(_NORM_RANGE))
                )
            if word in entries:
                raise DuplicateWordError("%s:%d: duplicate word %r" % (path, line_no, word))
            entries[word] = MafiEntry(word, min(score, 0.0))
    return [entries[w] for w in sorted(entries)]


# --- correlation statistics ---

def pearson(x, y) -> float:
    """Product-moment correlation coefficient of two equal-length samples."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatchError(
            "need two equal-length 1-d samples, got %s and %s" % (x.shape, y.shape)
        )
    if x.size < 3:
        raise ValueError("need at least 3 samples, got %d" % x.size)
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise ConstantInputError("correlation is undefined for a constant sample")
    r = float((xc @ yc) / np.sqrt(sxx * syy))
    return max(-1.0, min(1.0, r))


def p_value(r: float, n: int) -> float:
    """Two-tailed p-value for a Pearson r under the null of no correlation.

    Uses the exact Student-t relation t = r * sqrt((n-2) / (1-r^2))
    with n-2 degrees of freedom; the tail mass is the regularized
    incomplete beta function I_{df/(df+t^2)}(df/2, 1/2). |r| = 1 is
    degenerate and pinned to p = 0 with a warning.
    """
    if n < 3:
        raise ValueError("need n >= 3, got %d" % n)
    if abs(r) > 1:
        raise ValueError("|r| cannot exceed 1, got %r" % r)
    if abs(r) == 1.0:
        warnings.warn(
            "|r| = 1 exactly; p-value pinned to 0", DegenerateCorrelationWarning
        )
        return 0.0
    df = n - 2
    t2 = r * r * df / (1.0 - r * r)
    return float(special.betainc(df / 2.0, 0.5, df / (df + t2)))


def permutation_p(x, y, iterations: int, seed: int) -> float:
    """Permutation-test p-value for |pearson(x, y)|.

    Shuffles y `iterations` times and reports the add-one-smoothed
    fraction of shuffles with |r| at least as extreme as observed:
    (k + 1) / (iterations + 1).
    """
    if iterations < 1000:
        raise ValueError("need at least 1000 iterations, got %d" % iterations)
    observed = abs(pearson(x, y))
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt(float(xc @ xc) * float(yc @ yc))

    rng = np.random.default_rng(seed)
    shuffled = rng.permuted(np.tile(yc, (iterations, 1)), axis=1)
    rs = np.abs(shuffled @ xc) / denom
    k = int(np.count_nonzero(rs >= observed - 1e-12))
    return (k + 1) / (iterations + 1)


def stars(p: float) -> str:
    """Significance marker: '***' for p < 0.001, '**' for p < 0.01, else ''."""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    return ""


def format_correlation(r: float, p: float) -> str:
    """Render a coefficient with its significance marker, e.g. '-0.097**'."""
    return "%.3f%s" % (r, stars(p))


@dataclass(frozen=True)
class CorrelationResult:
    """Pearson r with sample size, two-tailed p, and significance marker."""

    r: float
    n: int
    p: float
    stars: str

    def __post_init__(self):
        if abs(self.r) > 1:
            raise ValueError("|r| cannot exceed 1")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError("p must be in [0, 1]")
        if self.stars != stars(self.p):
            raise ValueError("stars %r inconsistent with p %r" % (self.stars, self.p))

    def formatted(self) -> str:
        return format_correlation(self.r, self.p)


def correlate(
    norms: list[MafiEntry], iwers: list[scoring.WordStats], min_count: int = 7
) -> CorrelationResult:
    """Pearson correlation between norm scores and per-word error rates.

    Words are matched on their normalized keys after dropping IWER rows
    with fewer than min_count occurrences; x is the norm score, y the
    word's IWER.
    """
    by_word = {e.word: e.score for e in norms}
    pairs = [
        (by_word[w.word], w.iwer)
        for w in iwers
        if w.count >= min_count and w.word in by_word
    ]
    if not pairs:
        raise EmptyIntersectionError(
            "no words shared between norms (%d) and the filtered error table"
            % len(norms)
        )
    pairs.sort()
    x = [a for a, _ in pairs]
    y = [b for _, b in pairs]
    r = pearson(x, y)
    if abs(r) == 1.0:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateCorrelationWarning)
            p = p_value(r, len(pairs))
    else:
        p = p_value(r, len(pairs))
    return CorrelationResult(r=r, n=len(pairs), p=p, stars=stars(p))
