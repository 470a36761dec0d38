"""Word-aligned temporal occlusion of video frames.

Turns forced-alignment word timestamps into frame windows covering the
initial or middle third of each word, and applies a deterministic region
fill to the selected frames. Words shorter than three frames are left
untouched.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import scoring
from .errors import (
    FrameIndexOutOfRangeError,
    MalformedFileError,
    MalformedLineError,
    OverlapDetectedError,
    RegionOutOfBoundsError,
    TierNotFoundError,
)

POSITIONS = ("initial", "middle")
FILLS = ("solid-gray", "frame-mean", "blur")

MANIFEST_SCHEMA_VERSION = 1

# Snap tolerance for second->frame products sitting on a frame boundary.
_FRAME_EPS = 1e-6

_SOLID_GRAY = 128


@dataclass(frozen=True)
class WordSpan:
    """One aligned word: utterance id, normalized word, [t_start, t_end) seconds."""

    utt_id: str
    word: str
    t_start: float
    t_end: float

    def __post_init__(self):
        if not (0.0 <= self.t_start < self.t_end):
            raise ValueError(
                "invalid span [%r, %r) for %r" % (self.t_start, self.t_end, self.word)
            )
        if not self.word or any(c.isspace() for c in self.word):
            raise ValueError("word must be non-empty without whitespace")


@dataclass(frozen=True)
class FrameWindow:
    """Half-open frame index range [start_frame, end_frame)."""

    start_frame: int
    end_frame: int

    def __post_init__(self):
        if self.start_frame < 0 or self.end_frame <= self.start_frame:
            raise ValueError(
                "invalid frame window [%r, %r)" % (self.start_frame, self.end_frame)
            )

    def __len__(self) -> int:
        return self.end_frame - self.start_frame


@dataclass(frozen=True)
class PlannedWindow:
    """A frame window scheduled for occlusion, tagged with its source word."""

    start_frame: int
    end_frame: int
    word: str


@dataclass
class OcclusionManifest:
    """Occlusion plan for one utterance."""

    utt_id: str
    fps: float
    position: str
    region: tuple[int, int, int, int] | None  # (x, y, w, h); None = full frame
    fill: str
    windows: list[PlannedWindow]
    skipped: list[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        if self.position not in POSITIONS:
            raise ValueError("position must be one of %s" % (POSITIONS,))
        if self.fill not in FILLS:
            raise ValueError("fill must be one of %s" % (FILLS,))
        for a, b in zip(self.windows, self.windows[1:]):
            if b.start_frame < a.end_frame:
                raise ValueError(
                    "windows overlap or are unsorted: %r then %r" % (a, b)
                )


def _normalize_label(label: str) -> str:
    return "".join(scoring.normalize(label))


def parse_ctm(path) -> list[WordSpan]:
    """Parse a CTM alignment file into word spans.

    Lines are `utt_id channel start_sec duration_sec word` (an optional
    trailing confidence column is tolerated); `;;` comment lines are
    skipped. Spans are grouped per utterance, sorted by start time, and
    validated to be non-overlapping.
    """
    raw: dict[str, list[WordSpan]] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith(";;"):
                continue
            parts = line.split()
            if len(parts) not in (5, 6):
                raise MalformedLineError(
                    "%s:%d: expected `utt_id channel start dur word [conf]`, got %r"
                    % (path, line_no, line),
                    line_no=line_no,
                )
            utt_id, _channel, start_s, dur_s, word = parts[:5]
            try:
                start = float(start_s)
                dur = float(dur_s)
            except ValueError as exc:
                raise MalformedLineError(
                    "%s:%d: non-numeric time field in %r" % (path, line_no, line),
                    line_no=line_no,
                ) from exc
            norm = _normalize_label(word)
            if not norm or start < 0 or dur <= 0:
                raise MalformedLineError(
                    "%s:%d: unusable span %r" % (path, line_no, line), line_no=line_no
                )
            raw.setdefault(utt_id, []).append(WordSpan(utt_id, norm, start, start + dur))
    spans: list[WordSpan] = []
    for utt_id in sorted(raw):
        utt_spans = sorted(raw[utt_id], key=lambda s: s.t_start)
        _check_overlap(utt_id, utt_spans)
        spans.extend(utt_spans)
    return spans


def _check_overlap(utt_id: str, utt_spans: list[WordSpan]) -> None:
    for k in range(1, len(utt_spans)):
        if utt_spans[k].t_start < utt_spans[k - 1].t_end - 1e-9:
            raise OverlapDetectedError(
                "utterance %r: span %d (%r) overlaps previous word"
                % (utt_id, k, utt_spans[k].word),
                utt_id=utt_id,
                word_index=k,
            )


_TG_ATTR = re.compile(r'^\s*(\w+)\s*=\s*(.*?)\s*$')


def parse_textgrid(path, tier_name: str = "words") -> list[WordSpan]:
    """Parse a Praat long-format TextGrid interval tier into word spans.

    Intervals with empty labels (silences) are skipped. The utterance id
    is the file stem; TierNotFoundError is raised when no interval tier
    carries the requested name.
    """
    text = Path(path).read_text(encoding="utf-8")
    if "TextGrid" not in text.split("\n", 3)[0] and '"TextGrid"' not in text:
        raise MalformedFileError("%s: not a TextGrid file" % path)
    utt_id = Path(path).stem

    tiers: list[tuple[str, str, list[tuple[float, float, str]]]] = []
    cur_class = cur_name = None
    intervals: list[tuple[float, float, str]] = []
    xmin = xmax = None
    label = None
    in_intervals = False

    def flush_interval():
        nonlocal xmin, xmax, label
        if xmin is not None and xmax is not None and label is not None:
            intervals.append((xmin, xmax, label))
        xmin = xmax = label = None

    def flush_tier():
        nonlocal cur_class, cur_name, intervals, in_intervals
        flush_interval()
        if cur_class is not None and cur_name is not None:
            tiers.append((cur_class, cur_name, intervals))
        cur_class = cur_name = None
        intervals = []
        in_intervals = False

    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("item") and "[" in stripped and "]" in stripped:
            if "[]" not in stripped:
                flush_tier()
            continue
        if stripped.startswith("intervals") and "[" in stripped:
            flush_interval()
            in_intervals = True
            continue
        m = _TG_ATTR.match(line)
        if not m:
            continue
        key, value = m.group(1), m.group(2).strip()
        unquoted = value[1:-1] if len(value) >= 2 and value[0] == value[-1] == '"' else value
        try:
            if key == "class":
                cur_class = unquoted
            elif key == "name":
                cur_name = unquoted
            elif key == "xmin" and in_intervals:
                xmin = float(value)
            elif key == "xmax" and in_intervals:
                xmax = float(value)
            elif key == "text" and in_intervals:
                label = unquoted.replace('""', '"')
        except ValueError as exc:
            raise MalformedFileError("%s: bad value for %s: %r" % (path, key, value)) from exc
    flush_tier()

    if not tiers:
        raise MalformedFileError("%s: no tiers found" % path)
    for cls, name, ivs in tiers:
        if name == tier_name:
            if cls != "IntervalTier":
                raise TierNotFoundError(
                    "%s: tier %r is a %s, not an IntervalTier" % (path, tier_name, cls)
                )
            spans = []
            for lo, hi, lab in ivs:
                norm = _normalize_label(lab)
                if not norm:
                    continue
                spans.append(WordSpan(utt_id, norm, lo, hi))
            spans.sort(key=lambda s: s.t_start)
            _check_overlap(utt_id, spans)
            return spans
    raise TierNotFoundError(
        "%s: no tier named %r (found: %s)"
        % (path, tier_name, ", ".join(repr(n) for _, n, _ in tiers))
    )


def format_textgrid(spans: list[WordSpan], tier_name: str = "words") -> str:
    """Serialize spans of one utterance as a long-format TextGrid.

    Gaps between words become empty-label intervals, so the tier covers
    [0, t_end of the last word] without holes.
    """
    if not spans:
        raise ValueError("need at least one span")
    if len({s.utt_id for s in spans}) != 1:
        raise ValueError("spans must belong to a single utterance")
    ordered = sorted(spans, key=lambda s: s.t_start)
    total = ordered[-1].t_end

    intervals: list[tuple[float, float, str]] = []
    cursor = 0.0
    for s in ordered:
        if s.t_start > cursor:
            intervals.append((cursor, s.t_start, ""))
        intervals.append((s.t_start, s.t_end, s.word))
        cursor = s.t_end

    lines = [
        'File type = "ooTextFile"',
        'Object class = "TextGrid"',
        "",
        "xmin = 0",
        "xmax = %r" % total,
        "tiers? <exists>",
        "size = 1",
        "item []:",
        "    item [1]:",
        '        class = "IntervalTier"',
        '        name = "%s"' % tier_name,
        "        xmin = 0",
        "        xmax = %r" % total,
        "        intervals: size = %d" % len(intervals),
    ]
    for k, (lo, hi, lab) in enumerate(intervals, 1):
        lines += [
            "        intervals [%d]:" % k,
            "            xmin = %r" % lo,
            "            xmax = %r" % hi,
            '            text = "%s"' % lab.replace('"', '""'),
        ]
    return "\n".join(lines) + "\n"


def word_frames(span: WordSpan, fps: float) -> FrameWindow:
    """Frame envelope of a word: every frame overlapping [t_start, t_end).

    start = floor(t_start * fps), end = ceil(t_end * fps), with a small
    tolerance so products sitting on a frame boundary do not spill into
    the neighbouring frame.
    """
    if fps <= 0:
        raise ValueError("fps must be positive")
    start = int(np.floor(span.t_start * fps + _FRAME_EPS))
    end = int(np.ceil(span.t_end * fps - _FRAME_EPS))
    if end <= start:
        end = start + 1
    return FrameWindow(start, end)


def occlusion_window(n_frames: int, position: str) -> FrameWindow | None:
    """Word-relative occlusion window covering ~1/3 of the word's frames.

    Words of fewer than three frames are exempt (returns None). The
    window length is n/3 rounded half-up (at least 1); 'initial' starts
    at frame 0, 'middle' is centered via a floor((n - m) / 2) offset.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if position not in POSITIONS:
        raise ValueError("position must be one of %s" % (POSITIONS,))
    if n_frames < 3:
        return None
    m = max(1, (2 * n_frames + 3) // 6)  # round-half-up of n/3
    if position == "initial":
        return FrameWindow(0, m)
    offset = (n_frames - m) // 2
    return FrameWindow(offset, offset + m)


def plan(
    spans: list[WordSpan],
    fps: float,
    position: str,
    region: tuple[int, int, int, int] | None = None,
    fill: str = "solid-gray",
) -> OcclusionManifest:
    """Build the occlusion manifest for the spans of one utterance.

    Each word's relative window is translated to absolute frame indices;
    words with fewer than three frames are listed under `skipped` with a
    reason instead.
    """
    if not spans:
        raise ValueError("need at least one span")
    utt_ids = {s.utt_id for s in spans}
    if len(utt_ids) != 1:
        raise ValueError(
            "plan() covers one utterance; got %d (use plan_all)" % len(utt_ids)
        )
    ordered = sorted(spans, key=lambda s: s.t_start)
    _check_overlap(ordered[0].utt_id, ordered)

    windows: list[PlannedWindow] = []
    skipped: list[dict] = []
    for span in ordered:
        envelope = word_frames(span, fps)
        rel = occlusion_window(len(envelope), position)
        if rel is None:
            skipped.append(
                {
                    "word": span.word,
                    "start_frame": envelope.start_frame,
                    "end_frame": envelope.end_frame,
                    "n_frames": len(envelope),
                    "reason": "fewer than 3 frames",
                }
            )
            continue
        windows.append(
            PlannedWindow(
                start_frame=envelope.start_frame + rel.start_frame,
                end_frame=envelope.start_frame + rel.end_frame,
                word=span.word,
            )
        )
    return OcclusionManifest(
        utt_id=ordered[0].utt_id,
        fps=float(fps),
        position=position,
        region=region,
        fill=fill,
        windows=windows,
        skipped=skipped,
    )


def plan_all(spans, fps, position, region=None, fill="solid-gray") -> list[OcclusionManifest]:
    """One manifest per utterance, sorted by utterance id."""
    by_utt: dict[str, list[WordSpan]] = {}
    for s in spans:
        by_utt.setdefault(s.utt_id, []).append(s)
    return [
        plan(by_utt[u], fps, position, region=region, fill=fill) for u in sorted(by_utt)
    ]


def _fill_region(patch: np.ndarray, fill: str) -> np.ndarray:
    if fill == "solid-gray":
        return np.full_like(patch, _SOLID_GRAY)
    if fill == "frame-mean":
        if patch.ndim == 2:
            mean = np.round(patch.mean())
            return np.full_like(patch, np.uint8(np.clip(mean, 0, 255)))
        means = np.round(patch.reshape(-1, patch.shape[-1]).mean(axis=0))
        out = np.empty_like(patch)
        out[...] = np.clip(means, 0, 255).astype(patch.dtype)
        return out
    if fill == "blur":
        from scipy import ndimage

        sigma = max(1.0, min(patch.shape[0], patch.shape[1]) / 6.0)
        if patch.ndim == 2:
            return ndimage.gaussian_filter(patch, sigma=sigma)
        out = np.empty_like(patch)
        for c in range(patch.shape[-1]):
            out[..., c] = ndimage.gaussian_filter(patch[..., c], sigma=sigma)
        return out
    raise ValueError("unknown fill %r" % fill)


def apply(frames: list[np.ndarray], manifest: OcclusionManifest) -> list[np.ndarray]:
    """Apply the manifest's region fill to the listed frames.

    Returns a new frame list; pixels outside the occluded regions (and
    all unlisted frames) are bit-identical to the input.
    """
    n = len(frames)
    for w in manifest.windows:
        if w.end_frame > n:
            raise FrameIndexOutOfRangeError(
                "window [%d, %d) for %r exceeds %d frames"
                % (w.start_frame, w.end_frame, w.word, n)
            )
    out = [f.copy() for f in frames]
    for w in manifest.windows:
        for idx in range(w.start_frame, w.end_frame):
            frame = out[idx]
            if manifest.region is None:
                x, y, rw, rh = 0, 0, frame.shape[1], frame.shape[0]
            else:
                x, y, rw, rh = manifest.region
            if x < 0 or y < 0 or rw <= 0 or rh <= 0 or x + rw > frame.shape[1] or y + rh > frame.shape[0]:
                raise RegionOutOfBoundsError(
                    "region (x=%d, y=%d, w=%d, h=%d) outside %dx%d frame %d"
                    % (x, y, rw, rh, frame.shape[1], frame.shape[0], idx)
                )
            frame[y : y + rh, x : x + rw] = _fill_region(frame[y : y + rh, x : x + rw], manifest.fill)
    return out


# --- manifest JSON ---

def manifest_to_dict(manifest: OcclusionManifest) -> dict:
    return {
        "utt_id": manifest.utt_id,
        "fps": manifest.fps,
        "position": manifest.position,
        "region": "full-frame"
        if manifest.region is None
        else {
            "x": manifest.region[0],
            "y": manifest.region[1],
            "w": manifest.region[2],
            "h": manifest.region[3],
        },
        "fill": manifest.fill,
        "windows": [
            {"start_frame": w.start_frame, "end_frame": w.end_frame, "word": w.word}
            for w in manifest.windows
        ],
        "skipped": manifest.skipped,
    }


def manifest_from_dict(d: dict) -> OcclusionManifest:
    region = d["region"]
    if region == "full-frame":
        region_t = None
    else:
        region_t = (int(region["x"]), int(region["y"]), int(region["w"]), int(region["h"]))
    return OcclusionManifest(
        utt_id=d["utt_id"],
        fps=float(d["fps"]),
        position=d["position"],
        region=region_t,
        fill=d["fill"],
        windows=[
            PlannedWindow(int(w["start_frame"]), int(w["end_frame"]), w["word"])
            for w in d["windows"]
        ],
        skipped=list(d.get("skipped", [])),
    )


def write_manifest_json(path, manifests: list[OcclusionManifest]) -> None:
    doc = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "manifests": [manifest_to_dict(m) for m in manifests],
    }
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def read_manifest_json(path) -> list[OcclusionManifest]:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    version = doc.get("schema_version")
    if version != MANIFEST_SCHEMA_VERSION:
        raise MalformedFileError(
            "%s: unsupported manifest schema_version %r" % (path, version)
        )
    return [manifest_from_dict(d) for d in doc["manifests"]]


# --- frame directory I/O (numbered PNG files) ---

def read_frames(dir_path) -> tuple[list[str], list[np.ndarray]]:
    """Read all PNG frames in a directory, sorted by filename."""
    from PIL import Image

    dir_path = Path(dir_path)
    names = sorted(p.name for p in dir_path.glob("*.png"))
    if not names:
        raise MalformedFileError("%s: no .png frames found" % dir_path)
    frames = [np.asarray(Image.open(dir_path / n)) for n in names]
    return names, frames


def write_frames(dir_path, names: list[str], frames: list[np.ndarray], jobs: int = 1) -> None:
    """Write frames as PNGs, each atomically (temp file + rename)."""
    from concurrent.futures import ThreadPoolExecutor

    from PIL import Image

    dir_path = Path(dir_path)
    dir_path.mkdir(parents=True, exist_ok=True)

    def one(pair):
        name, frame = pair
        tmp = dir_path / (name + ".tmp")
        Image.fromarray(frame).save(tmp, format="PNG")
        os.replace(tmp, dir_path / name)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(one, zip(names, frames)))
    else:
        for pair in zip(names, frames):
            one(pair)
