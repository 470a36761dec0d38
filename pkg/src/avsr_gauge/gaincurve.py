"""WER-vs-SNR curves and effective SNR gain.

The effective SNR gain of an audio-visual system is the difference
between a reference SNR and the SNR at which the audio-visual WER curve
comes down to the audio-only WER at that reference (default 0 dB).
Curves are piecewise linear; extrapolation beyond the measured range is
refused and reported as a bounded result instead.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

from .errors import (
    MalformedLineError,
    NoCrossingError,
    OutOfRangeError,
    RefOutOfRangeError,
)


@dataclass(frozen=True)
class WerCurve:
    """Ordered (snr_db, wer_percent) samples for one system/condition.

    SNRs must be strictly increasing, WERs within [0, 100], and at
    least two points are required so segments can be interpolated.
    """

    points: tuple[tuple[float, float], ...]
    label: str

    def __post_init__(self):
        pts = tuple((float(s), float(w)) for s, w in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise ValueError("curve %r needs at least 2 points" % self.label)
        for k in range(1, len(pts)):
            if pts[k][0] <= pts[k - 1][0]:
                raise ValueError("curve %r: SNRs must be strictly increasing" % self.label)
        for snr, wer in pts:
            if not (0.0 <= wer <= 100.0):
                raise ValueError(
                    "curve %r: WER %r at %r dB outside [0, 100]" % (self.label, wer, snr)
                )

    @property
    def min_snr(self) -> float:
        return self.points[0][0]

    @property
    def max_snr(self) -> float:
        return self.points[-1][0]


@dataclass(frozen=True)
class GainResult:
    """Effective SNR gain of one audio-visual curve against a reference.

    When bounded is set, the audio-visual curve stays at or below the
    reference WER over its whole measured range and gain_db is only a
    lower bound (the true equality point lies left of the data).
    """

    gain_db: float
    ref_snr_db: float
    ref_wer: float
    crossing_snr_db: float
    bounded: bool


def interpolate(curve: WerCurve, snr: float) -> float:
    """Piecewise-linear WER at the given SNR; exact at sample points."""
    pts = curve.points
    if snr < pts[0][0] or snr > pts[-1][0]:
        raise OutOfRangeError(
            "snr %r outside curve %r range [%r, %r]"
            % (snr, curve.label, pts[0][0], pts[-1][0])
        )
    for k in range(1, len(pts)):
        x0, y0 = pts[k - 1]
        x1, y1 = pts[k]
        if snr <= x1:
            if snr == x0:
                return y0
            if snr == x1:
                return y1
            t = (snr - x0) / (x1 - x0)
            return y0 + t * (y1 - y0)
    return pts[-1][1]


def effective_snr_gain(ao: WerCurve, av: WerCurve, ref_snr: float = 0.0) -> GainResult:
    """Effective SNR gain of curve `av` against curve `ao` at `ref_snr`.

    The reference WER is the audio-only WER at ref_snr. The crossing is
    the largest SNR at which the audio-visual curve equals the reference
    WER while sitting at or above it immediately to the left (a downward
    crossing); on non-monotone curves this is the most conservative
    choice. gain_db = ref_snr - crossing_snr.

    Raises RefOutOfRangeError when ref_snr is outside the audio-only
    range and NoCrossingError when the audio-visual curve never comes
    down to the reference WER.
    """
    try:
        ref_wer = interpolate(ao, ref_snr)
    except OutOfRangeError as exc:
        raise RefOutOfRangeError(str(exc)) from exc

    pts = av.points
    if max(w for _, w in pts) <= ref_wer:
        # At or better than the reference everywhere measured: the true
        # equality point lies left of the data, so report a lower bound.
        return GainResult(
            gain_db=ref_snr - av.min_snr,
            ref_snr_db=ref_snr,
            ref_wer=ref_wer,
            crossing_snr_db=av.min_snr,
            bounded=True,
        )

    crossing = None
    for k in range(len(pts) - 1, 0, -1):
        x0, y0 = pts[k - 1]
        x1, y1 = pts[k]
        if y0 == y1 == ref_wer:
            # Plateau at the reference: its right end is the largest SNR
            # with the curve "at" the reference immediately to the left.
            crossing = x1
            break
        if y0 > y1 and y0 >= ref_wer >= y1:
            if ref_wer == y0 and k >= 2 and pts[k - 2][1] < ref_wer:
                # Local maximum touching the reference from below; not a
                # downward crossing. Keep scanning left.
                continue
            t = (y0 - ref_wer) / (y0 - y1)
            crossing = x0 + t * (x1 - x0)
            break
    if crossing is not None:
        return GainResult(
            gain_db=ref_snr - crossing,
            ref_snr_db=ref_snr,
            ref_wer=ref_wer,
            crossing_snr_db=crossing,
            bounded=False,
        )

    if min(w for _, w in pts) > ref_wer:
        raise NoCrossingError(
            "curve %r stays above the reference WER %.4f everywhere"
            % (av.label, ref_wer)
        )
    raise NoCrossingError(
        "curve %r has no downward crossing of the reference WER %.4f"
        % (av.label, ref_wer)
    )


def gain_report(
    systems: list[tuple[WerCurve, WerCurve]], ref_snrs: list[float]
) -> list[dict]:
    """Gains for each (audio-only, audio-visual) pair at each reference SNR.

    Returns one row per pair x ref_snr. Pairs that cannot be evaluated
    at a reference get gain_db None and the error message in `note`.
    """
    rows = []
    for ao, av in systems:
        for ref_snr in ref_snrs:
            row = {
                "ao_label": ao.label,
                "av_label": av.label,
                "ref_snr_db": float(ref_snr),
                "gain_db": None,
                "ref_wer": None,
                "crossing_snr_db": None,
                "bounded": False,
                "note": "",
            }
            try:
                res = effective_snr_gain(ao, av, ref_snr)
            except (RefOutOfRangeError, NoCrossingError) as exc:
                row["note"] = "unavailable: %s" % exc
            else:
                row.update(
                    gain_db=res.gain_db,
                    ref_wer=res.ref_wer,
                    crossing_snr_db=res.crossing_snr_db,
                    bounded=res.bounded,
                    note="lower bound (range-limited)" if res.bounded else "",
                )
            rows.append(row)
    return rows


# --- curve file I/O ---
#
# Curve CSV format: optional `# label: NAME` comment line, then a
# `snr_db,wer_percent` header, then one sample per line.

def read_curve_csv(path, label: str | None = None) -> WerCurve:
    points = []
    file_label = None
    with open(path, encoding="utf-8", newline="") as f:
        for line_no, raw in enumerate(f, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if body.lower().startswith("label:"):
                    file_label = body[len("label:"):].strip()
                continue
            cells = [c.strip() for c in line.split(",")]
            if cells[0].lower() == "snr_db":
                continue
            try:
                points.append((float(cells[0]), float(cells[1])))
            except (IndexError, ValueError) as exc:
                raise MalformedLineError(
                    "%s:%d: expected snr_db,wer_percent, got %r" % (path, line_no, raw),
                    line_no=line_no,
                ) from exc
    if label is None:
        label = file_label if file_label is not None else str(getattr(path, "stem", path))
    return WerCurve(points=tuple(points), label=label)


def write_curve_csv(path, curve: WerCurve) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write("# label: %s\n" % curve.label)
        w = csv.writer(f)
        w.writerow(["snr_db", "wer_percent"])
        for snr, wer in curve.points:
            w.writerow([repr(snr), repr(wer)])
