"""Transcript alignment and word error rate scoring.

Aligns hypothesis token sequences against references with a minimal-cost
edit alignment (unit costs, deterministic backtrace), and aggregates the
edit operations into corpus WER, per-word error rates (IWER), and
relative WER increases between conditions.
"""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass, field

from .errors import (
    DuplicateUtteranceError,
    EmptyReferenceError,
    MalformedLineError,
    UtteranceSetMismatchError,
    ZeroBaselineError,
)

# Edit operation codes used in AlignmentResult.ops.
MATCH = "match"
SUB = "sub"
DELETE = "del"
INSERT = "ins"

# Right single quote folded to ASCII apostrophe before tokenizing.
_APOSTROPHES = {"’": "'", "ʼ": "'"}


def normalize(text: str) -> list[str]:
    """Normalize a raw transcript line to scoring tokens.

    Uppercases, deletes every character that is not alphanumeric, an
    apostrophe, or whitespace, and splits on whitespace. The empty
    string normalizes to an empty token list.
    """
    for variant, plain in _APOSTROPHES.items():
        text = text.replace(variant, plain)
    text = text.upper()
    kept = [c if (c.isalnum() or c == "'" or c.isspace()) else "" for c in text]
    return "".join(kept).split()


@dataclass
class AlignmentResult:
    """Edit alignment of one hypothesis against one reference.

    ops is a list of (code, ref_index, hyp_index) triples in reference
    order; the index not consumed by an operation is None. Counts
    satisfy S + D + matches == N and S + D + I == total edit cost.
    """

    ref: list[str]
    hyp: list[str]
    ops: list[tuple[str, int | None, int | None]]
    S: int
    D: int
    I: int

    @property
    def N(self) -> int:
        return len(self.ref)

    @property
    def matches(self) -> int:
        return self.N - self.S - self.D

    @property
    def distance(self) -> int:
        return self.S + self.D + self.I


def _edit_ops(ref: list[str], hyp: list[str]) -> list[tuple[str, int | None, int | None]]:
    """Minimal-cost edit script via full DP table and backtrace.

    Backtrace tie-break is fixed: Match > Substitute > Delete > Insert.
    """
    n, m = len(ref), len(hyp)
    rows = [list(range(m + 1))]
    prev = rows[0]
    for i in range(1, n + 1):
        ri = ref[i - 1]
        cur = [i] + [0] * m
        for j in range(1, m + 1):
            a = prev[j - 1] + (ri != hyp[j - 1])
            b = prev[j] + 1
            c = cur[j - 1] + 1
            best = a if a <= b else b
            cur[j] = best if best <= c else c
        rows.append(cur)
        prev = cur

    ops: list[tuple[str, int | None, int | None]] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = rows[i][j]
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and rows[i - 1][j - 1] == here:
            ops.append((MATCH, i - 1, j - 1))
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and ref[i - 1] != hyp[j - 1] and rows[i - 1][j - 1] + 1 == here:
            ops.append((SUB, i - 1, j - 1))
            i -= 1
            j -= 1
        elif i > 0 and rows[i - 1][j] + 1 == here:
            ops.append((DELETE, i - 1, None))
            i -= 1
        else:
            ops.append((INSERT, None, j - 1))
            j -= 1
    ops.reverse()
    return ops


def align(ref: list[str], hyp: list[str]) -> AlignmentResult:
    """Align hypothesis tokens to reference tokens at minimal edit cost.

    Unit costs for substitution, deletion, and insertion; matches are
    free. The backtrace tie-break (Match > Substitute > Delete >
    Insert) makes the operation sequence deterministic. Common prefix
    and suffix tokens are matched directly before the DP core; matching
    equal boundary tokens is always cost-optimal for unit costs.
    """
    n, m = len(ref), len(hyp)
    if ref == hyp:
        ops = [(MATCH, k, k) for k in range(n)]
        return AlignmentResult(list(ref), list(hyp), ops, 0, 0, 0)

    p = 0
    limit = min(n, m)
    while p < limit and ref[p] == hyp[p]:
        p += 1
    s = 0
    while s < limit - p and ref[n - 1 - s] == hyp[m - 1 - s]:
        s += 1

    core = _edit_ops(ref[p : n - s], hyp[p : m - s])

    ops = [(MATCH, k, k) for k in range(p)]
    for code, ri, hj in core:
        ops.append((code, None if ri is None else ri + p, None if hj is None else hj + p))
    ops.extend((MATCH, n - s + k, m - s + k) for k in range(s))

    counts = Counter(code for code, _, _ in ops)
    return AlignmentResult(
        list(ref), list(hyp), ops, counts[SUB], counts[DELETE], counts[INSERT]
    )


def corpus_wer(alignments) -> float:
    """Corpus word error rate in percent: 100 * (S + D + I) / N.

    Pools counts over all alignments; raises EmptyReferenceError when
    the pooled reference is empty.
    """
    total_n = sum(a.N for a in alignments)
    if total_n == 0:
        raise EmptyReferenceError("corpus has no reference words")
    errors = sum(a.S + a.D + a.I for a in alignments)
    return 100.0 * errors / total_n


@dataclass
class WordStats:
    """Per-word error tally over a corpus of alignments.

    iwer = (subs + dels) / count; insertions are never attributed to
    any word.
    """

    word: str
    count: int
    subs: int
    dels: int
    iwer: float = field(init=False)

    def __post_init__(self):
        if self.count <= 0:
            raise ValueError("word count must be positive")
        if self.subs + self.dels > self.count:
            raise ValueError("more errors than occurrences for %r" % self.word)
        self.iwer = (self.subs + self.dels) / self.count


def iwer_table(alignments, min_count: int = 7) -> list[WordStats]:
    """Per-word error rates for reference words occurring >= min_count times.

    Each reference occurrence contributes at most one error (a
    substitution or a deletion); insertion errors are excluded because
    they cannot be attributed to a reference word. Sorted by word.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    count: Counter[str] = Counter()
    subs: Counter[str] = Counter()
    dels: Counter[str] = Counter()
    for a in alignments:
        count.update(a.ref)
        for code, ri, _ in a.ops:
            if code == SUB:
                subs[a.ref[ri]] += 1
            elif code == DELETE:
                dels[a.ref[ri]] += 1
    return [
        WordStats(w, count[w], subs[w], dels[w])
        for w in sorted(count)
        if count[w] >= min_count
    ]


def relative_increase(baseline_wer: float, degraded_wer: float) -> float:
    """Relative WER increase in percent: 100 * (degraded - baseline) / baseline."""
    if baseline_wer <= 0:
        raise ZeroBaselineError("baseline WER must be > 0, got %r" % baseline_wer)
    return 100.0 * (degraded_wer - baseline_wer) / baseline_wer


# --- transcript and table I/O ---

def read_transcripts(path) -> dict[str, list[str]]:
    """Read a UTF-8 TSV transcript file: one `utt_id<TAB>transcript` per line.

    Transcripts are normalized to token lists; blank lines are skipped.
    """
    out: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if "\t" not in line:
                raise MalformedLineError(
                    "%s:%d: expected utt_id<TAB>transcript" % (path, line_no),
                    line_no=line_no,
                )
            utt_id, text = line.split("\t", 1)
            utt_id = utt_id.strip()
            if not utt_id:
                raise MalformedLineError(
                    "%s:%d: empty utterance id" % (path, line_no), line_no=line_no
                )
            if utt_id in out:
                raise DuplicateUtteranceError(
                    "%s:%d: duplicate utterance id %r" % (path, line_no, utt_id)
                )
            out[utt_id] = normalize(text)
    return out


def write_transcripts(path, transcripts: dict[str, list[str]]) -> None:
    """Write token lists back to utt_id<TAB>transcript TSV."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        for utt_id in transcripts:
            f.write("%s\t%s\n" % (utt_id, " ".join(transcripts[utt_id])))


def score_corpus(
    refs: dict[str, list[str]], hyps: dict[str, list[str]]
) -> dict[str, AlignmentResult]:
    """Align every hypothesis against its reference; keys must match exactly.

    Scoring over mismatched utterance sets silently inflates or hides
    errors, so any difference is an error rather than a warning.
    """
    missing = sorted(set(refs) - set(hyps))
    extra = sorted(set(hyps) - set(refs))
    if missing or extra:
        raise UtteranceSetMismatchError(
            "utterance ids differ: %d missing from hypotheses (e.g. %s), "
            "%d unknown (e.g. %s)"
            % (len(missing), missing[:3], len(extra), extra[:3])
        )
    return {utt_id: align(refs[utt_id], hyps[utt_id]) for utt_id in refs}


def write_alignment_csv(path, alignments: dict[str, AlignmentResult]) -> None:
    """Per-utterance counts CSV: utt_id, S, D, I, N."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["utt_id", "S", "D", "I", "N"])
        for utt_id in sorted(alignments):
            a = alignments[utt_id]
            w.writerow([utt_id, a.S, a.D, a.I, a.N])


def corpus_summary(alignments: dict[str, AlignmentResult]) -> dict:
    """Pooled counts plus corpus WER (percent, full precision and 2 dp)."""
    s = sum(a.S for a in alignments.values())
    d = sum(a.D for a in alignments.values())
    i = sum(a.I for a in alignments.values())
    n = sum(a.N for a in alignments.values())
    wer = corpus_wer(alignments.values())
    return {
        "n_utterances": len(alignments),
        "S": s,
        "D": d,
        "I": i,
        "N": n,
        "wer_percent": wer,
        "wer_percent_2dp": round(wer, 2),
    }


def write_corpus_summary(path, alignments: dict[str, AlignmentResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(corpus_summary(alignments), f, indent=2, sort_keys=True)
        f.write("\n")


def write_iwer_csv(path, table: list[WordStats]) -> None:
    """IWER table CSV: word, count, subs, dels, iwer."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(["word", "count", "subs", "dels", "iwer"])
        for row in table:
            w.writerow([row.word, row.count, row.subs, row.dels, repr(row.iwer)])


def read_iwer_csv(path) -> list[WordStats]:
    """Read a word, count, subs, dels[, iwer] CSV back into WordStats."""
    out = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header[:4]] != [
            "word",
            "count",
            "subs",
            "dels",
        ]:
            raise MalformedLineError("%s: expected word,count,subs,dels[,iwer] header" % path)
        for line_no, row in enumerate(reader, 2):
            if not row:
                continue
            try:
                out.append(WordStats(row[0], int(row[1]), int(row[2]), int(row[3])))
            except (IndexError, ValueError) as exc:
                raise MalformedLineError(
                    "%s:%d: bad IWER row %r (%s)" % (path, line_no, row, exc),
                    line_no=line_no,
                ) from exc
    return out


def merge_word_stats(tables: list[list[WordStats]]) -> list[WordStats]:
    """Merge IWER tables by summing counts; order-independent."""
    count: Counter[str] = Counter()
    subs: Counter[str] = Counter()
    dels: Counter[str] = Counter()
    for table in tables:
        for row in table:
            count[row.word] += row.count
            subs[row.word] += row.subs
            dels[row.word] += row.dels
    return [WordStats(w, count[w], subs[w], dels[w]) for w in sorted(count)]
