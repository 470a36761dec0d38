"""End-to-end evaluation runs and report rendering.

Takes a flat key=value config describing reference/hypothesis files per
condition, scores every condition, derives WER-vs-SNR curves, effective
SNR gains, occlusion comparisons, and norm correlations, and writes a
deterministic report bundle (CSV + markdown tables, full-precision JSON,
SVG curve plots, provenance).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import Decimal, ROUND_HALF_UP
from pathlib import Path
from xml.sax.saxutils import escape

from . import mafi, scoring
from .errors import (
    ConfigError,
    DataError,
    EmptyInputError,
    EmptyIntersectionError,
    RaggedRowsError,
)
from .gaincurve import GainResult, WerCurve, gain_report

MODALITIES = ("ao", "av", "vo")
OCCLUSIONS = ("none", "initial", "middle")


def round_half_up(value: float, ndigits: int = 1) -> float:
    """Round with ties away from zero (3.75 -> 3.8), unlike bankers' rounding."""
    q = Decimal(1).scaleb(-ndigits)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_HALF_UP))


def read_kv_config(path) -> dict[str, str]:
    """Read a flat `key = value` config file; '#' starts a comment."""
    settings: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError("%s:%d: expected key = value, got %r" % (path, line_no, raw.strip()))
            key, value = line.split("=", 1)
            key = key.strip()
            if not key:
                raise ConfigError("%s:%d: empty key" % (path, line_no))
            if key in settings:
                raise ConfigError("%s:%d: duplicate key %r" % (path, line_no, key))
            settings[key] = value.strip()
    return settings


# --- table rendering ---

def _format_cell(cell) -> str:
    if cell is None:
        return ""
    if isinstance(cell, mafi.CorrelationResult):
        return cell.formatted()
    if isinstance(cell, bool):
        return "yes" if cell else "no"
    if isinstance(cell, float):
        return repr(cell)
    return str(cell)


def render_table(header: list[str], rows: list[list], style: str = "markdown") -> str:
    """Render rectangular rows as a markdown or CSV table.

    Correlation results render with their significance markers appended.
    Empty rows produce a header-only table; ragged rows are rejected.
    """
    if style not in ("markdown", "csv"):
        raise ValueError("style must be 'markdown' or 'csv'")
    for k, row in enumerate(rows):
        if len(row) != len(header):
            raise RaggedRowsError(
                "row %d has %d cells, header has %d" % (k, len(row), len(header))
            )
    cells = [[_format_cell(c) for c in row] for row in rows]
    if style == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(cells)
        return buf.getvalue()
    widths = [
        max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
        for i, h in enumerate(header)
    ]
    def line(values):
        return "| " + " | ".join(v.ljust(w) for v, w in zip(values, widths)) + " |"
    out = [line(header), "| " + " | ".join("-" * w for w in widths) + " |"]
    out.extend(line(r) for r in cells)
    return "\n".join(out) + "\n"


# --- SVG curve plots ---

SVG_WIDTH = 760
SVG_HEIGHT = 480
PLOT_LEFT = 64.0
PLOT_RIGHT = 570.0
PLOT_TOP = 40.0
PLOT_BOTTOM = 424.0
WER_AXIS = (0.0, 100.0)

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


def data_to_px(snr: float, wer: float, snr_range: tuple[float, float]) -> tuple[float, float]:
    """Linear map from (snr dB, wer %) to SVG pixel coordinates."""
    lo, hi = snr_range
    x = PLOT_LEFT + (snr - lo) / (hi - lo) * (PLOT_RIGHT - PLOT_LEFT)
    y = PLOT_BOTTOM - (wer - WER_AXIS[0]) / (WER_AXIS[1] - WER_AXIS[0]) * (
        PLOT_BOTTOM - PLOT_TOP
    )
    return x, y


def _x_ticks(lo: float, hi: float) -> list[float]:
    span = hi - lo
    step = 5.0 if span > 12 else (2.5 if span > 5 else 1.0)
    first = step * -(-lo // step)  # ceil to the grid
    ticks = []
    t = first
    while t <= hi + 1e-9:
        ticks.append(round(t, 6))
        t += step
    return ticks


def render_curves_svg(curves: list[WerCurve], gains: list[GainResult] | None = None) -> str:
    """WER-vs-SNR plot: one polyline per curve, axes, legend, gain arrows.

    Each gain result adds a dashed horizontal line at its reference WER
    plus an annotated arrow from the crossing SNR to the reference SNR.
    Output is a standalone, deterministic SVG 1.1 document.
    """
    if not curves:
        raise EmptyInputError("need at least one curve")
    gains = gains or []
    lo = min(c.min_snr for c in curves)
    hi = max(c.max_snr for c in curves)
    if hi <= lo:
        hi = lo + 1.0
    rng = (lo, hi)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        'width="%d" height="%d" viewBox="0 0 %d %d">'
        % (SVG_WIDTH, SVG_HEIGHT, SVG_WIDTH, SVG_HEIGHT),
        '<rect x="0" y="0" width="%d" height="%d" fill="white"/>' % (SVG_WIDTH, SVG_HEIGHT),
        '<g font-family="sans-serif" font-size="12">',
    ]

    # Axes
    parts.append(
        '<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="black"/>'
        % (PLOT_LEFT, PLOT_BOTTOM, PLOT_RIGHT, PLOT_BOTTOM)
    )
    parts.append(
        '<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="black"/>'
        % (PLOT_LEFT, PLOT_TOP, PLOT_LEFT, PLOT_BOTTOM)
    )
    for t in _x_ticks(lo, hi):
        x, _ = data_to_px(t, 0.0, rng)
        parts.append(
            '<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="black"/>'
            % (x, PLOT_BOTTOM, x, PLOT_BOTTOM + 5)
        )
        parts.append(
            '<text x="%.2f" y="%.2f" text-anchor="middle">%g</text>'
            % (x, PLOT_BOTTOM + 18, t)
        )
    for wer_tick in range(0, 101, 20):
        _, y = data_to_px(lo, float(wer_tick), rng)
        parts.append(
            '<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="black"/>'
            % (PLOT_LEFT - 5, y, PLOT_LEFT, y)
        )
        parts.append(
            '<text x="%.2f" y="%.2f" text-anchor="end">%d</text>'
            % (PLOT_LEFT - 8, y + 4, wer_tick)
        )
    parts.append(
        '<text x="%.2f" y="%.2f" text-anchor="middle">SNR (dB)</text>'
        % ((PLOT_LEFT + PLOT_RIGHT) / 2, PLOT_BOTTOM + 38)
    )
    parts.append(
        '<text x="%.2f" y="%.2f" text-anchor="middle" '
        'transform="rotate(-90 %.2f %.2f)">WER (%%)</text>'
        % (PLOT_LEFT - 40, (PLOT_TOP + PLOT_BOTTOM) / 2, PLOT_LEFT - 40, (PLOT_TOP + PLOT_BOTTOM) / 2)
    )

    # Curves and legend
    for k, curve in enumerate(curves):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(
            "%.2f,%.2f" % data_to_px(snr, wer, rng) for snr, wer in curve.points
        )
        parts.append(
            '<polyline points="%s" fill="none" stroke="%s" stroke-width="2"/>'
            % (pts, color)
        )
        for snr, wer in curve.points:
            x, y = data_to_px(snr, wer, rng)
            parts.append('<circle cx="%.2f" cy="%.2f" r="2.5" fill="%s"/>' % (x, y, color))
        ly = PLOT_TOP + 18 * k
        parts.append(
            '<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="%s" stroke-width="2"/>'
            % (PLOT_RIGHT + 14, ly, PLOT_RIGHT + 40, ly, color)
        )
        parts.append(
            '<text x="%.2f" y="%.2f">%s</text>'
            % (PLOT_RIGHT + 46, ly + 4, escape(curve.label))
        )

    # Gain annotations
    for g in gains:
        _, y = data_to_px(lo, g.ref_wer, rng)
        x_ref, _ = data_to_px(g.ref_snr_db, g.ref_wer, rng)
        x_cross, _ = data_to_px(g.crossing_snr_db, g.ref_wer, rng)
        parts.append(
            '<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="#555555" '
            'stroke-dasharray="6 4"/>' % (PLOT_LEFT, y, PLOT_RIGHT, y)
        )
        parts.append(
            '<line x1="%.2f" y1="%.2f" x2="%.2f" y2="%.2f" stroke="#111111" '
            'stroke-width="2"/>' % (x_cross, y, x_ref, y)
        )
        for x_end, direction in ((x_cross, 1.0), (x_ref, -1.0)):
            parts.append(
                '<path d="M %.2f %.2f L %.2f %.2f L %.2f %.2f Z" fill="#111111"/>'
                % (x_end, y, x_end + 7 * direction, y - 4, x_end + 7 * direction, y + 4)
            )
        label = "gain %s%.1f dB" % (">=" if g.bounded else "", g.gain_db)
        parts.append(
            '<text x="%.2f" y="%.2f" text-anchor="middle">%s</text>'
            % ((x_cross + x_ref) / 2, y - 8, escape(label))
        )

    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# --- evaluation configuration ---

@dataclass(frozen=True)
class Condition:
    """One scored condition: a hypothesis file plus its grouping tags."""

    label: str
    hyps_path: str
    system: str
    modality: str
    snr_db: float
    dataset: str = "default"
    occlusion: str = "none"


@dataclass
class EvalConfig:
    refs_path: str
    conditions: list[Condition]
    ref_snrs: list[float] = field(default_factory=lambda: [0.0])
    mafi_norms: str | None = None
    mafi_min_count: int = 7
    seed: int = 0
    out_dir: str | None = None


def parse_eval_config(path) -> EvalConfig:
    """Parse and validate an evaluation config file.

    Flat key=value format; conditions use dotted keys
    `condition.<label>.<field>` with fields hyps, system, modality,
    snr_db, and optional dataset and occlusion.
    """
    settings = read_kv_config(path)
    base = Path(path).parent

    def resolve(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else base / q)

    if "refs" not in settings:
        raise ConfigError("%s: missing required key 'refs'" % path)
    refs_path = resolve(settings.pop("refs"))

    ref_snrs = [0.0]
    if "ref_snrs" in settings:
        try:
            ref_snrs = [float(v) for v in settings.pop("ref_snrs").split(",") if v.strip()]
        except ValueError as exc:
            raise ConfigError("%s: bad ref_snrs list" % path) from exc
        if not ref_snrs:
            raise ConfigError("%s: ref_snrs must be non-empty" % path)

    norms = settings.pop("mafi_norms", None)
    norms = resolve(norms) if norms else None
    out_dir = settings.pop("out", None)
    out_dir = resolve(out_dir) if out_dir else None
    try:
        min_count = int(settings.pop("mafi_min_count", "7"))
    except ValueError as exc:
        raise ConfigError("%s: bad mafi_min_count" % path) from exc
    try:
        seed = int(settings.pop("seed", "0"))
    except ValueError as exc:
        raise ConfigError("%s: bad seed" % path) from exc

    per_label: dict[str, dict[str, str]] = {}
    for key in sorted(settings):
        parts = key.split(".")
        if len(parts) != 3 or parts[0] != "condition":
            raise ConfigError("%s: unknown key %r" % (path, key))
        per_label.setdefault(parts[1], {})[parts[2]] = settings[key]
    if not per_label:
        raise ConfigError("%s: no conditions defined" % path)

    conditions = []
    for label in sorted(per_label):
        fields = per_label[label]
        unknown = set(fields) - {"hyps", "system", "modality", "snr_db", "dataset", "occlusion"}
        if unknown:
            raise ConfigError("%s: condition %r has unknown fields %s" % (path, label, sorted(unknown)))
        for required in ("hyps", "system", "modality", "snr_db"):
            if required not in fields:
                raise ConfigError("%s: condition %r missing %r" % (path, label, required))
        if fields["modality"] not in MODALITIES:
            raise ConfigError(
                "%s: condition %r modality must be one of %s" % (path, label, MODALITIES)
            )
        occl = fields.get("occlusion", "none")
        if occl not in OCCLUSIONS:
            raise ConfigError(
                "%s: condition %r occlusion must be one of %s" % (path, label, OCCLUSIONS)
            )
        try:
            snr_db = float(fields["snr_db"])
        except ValueError as exc:
            raise ConfigError("%s: condition %r has bad snr_db" % (path, label)) from exc
        conditions.append(
            Condition(
                label=label,
                hyps_path=resolve(fields["hyps"]),
                system=fields["system"],
                modality=fields["modality"],
                snr_db=snr_db,
                dataset=fields.get("dataset", "default"),
                occlusion=occl,
            )
        )

    config = EvalConfig(
        refs_path=refs_path,
        conditions=conditions,
        ref_snrs=ref_snrs,
        mafi_norms=norms,
        mafi_min_count=min_count,
        seed=seed,
        out_dir=out_dir,
    )
    missing = [p for p in [config.refs_path, *(c.hyps_path for c in config.conditions)] if not Path(p).is_file()]
    if config.mafi_norms and not Path(config.mafi_norms).is_file():
        missing.append(config.mafi_norms)
    if missing:
        raise ConfigError("missing input files: %s" % ", ".join(sorted(missing)))
    return config


# --- the pipeline ---

def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")


def run(config: EvalConfig, out_dir) -> dict:
    """Run the full evaluation and write the report bundle into out_dir.

    Deterministic for a fixed config: file contents depend only on the
    inputs (sorted iteration, no timestamps). Returns the bundle summary
    that is also written to summary.json.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    provenance: list[dict] = []
    errors: list[dict] = []

    refs = scoring.read_transcripts(config.refs_path)

    # 1. Score each condition.
    (out / "scores").mkdir(parents=True, exist_ok=True)
    cond_results: dict[str, dict] = {}
    for cond in config.conditions:
        try:
            hyps = scoring.read_transcripts(cond.hyps_path)
            alignments = scoring.score_corpus(refs, hyps)
        except DataError as exc:
            errors.append({"condition": cond.label, "file": cond.hyps_path, "error": str(exc)})
            continue
        summary = scoring.corpus_summary(alignments)
        iwer_rows = scoring.iwer_table(alignments.values(), min_count=1)
        scoring.write_alignment_csv(out / "scores" / ("%s.alignment.csv" % cond.label), alignments)
        _write_json(out / "scores" / ("%s.summary.json" % cond.label), summary)
        scoring.write_iwer_csv(out / "scores" / ("%s.iwer.csv" % cond.label), iwer_rows)
        cond_results[cond.label] = {
            "condition": cond,
            "summary": summary,
            "iwer": iwer_rows,
        }
        provenance.append(
            {
                "output": "scores/%s.summary.json" % cond.label,
                "operation": "scoring.corpus_wer",
                "inputs": [config.refs_path, cond.hyps_path],
            }
        )

    if errors:
        _write_json(out / "error_report.json", {"errors": errors})
        raise DataError(
            "%d condition(s) failed; see %s" % (len(errors), out / "error_report.json")
        )

    # 2. WER table.
    wer_header = ["dataset", "system", "modality", "occlusion", "snr_db", "wer_percent"]
    wer_rows = []
    for label in sorted(cond_results):
        cond = cond_results[label]["condition"]
        wer = cond_results[label]["summary"]["wer_percent"]
        wer_rows.append(
            [cond.dataset, cond.system, cond.modality, cond.occlusion,
             "%g" % cond.snr_db, "%.1f" % round_half_up(wer, 1)]
        )
    wer_rows.sort()
    _write_text(out / "wer_table.csv", render_table(wer_header, wer_rows, "csv"))
    _write_text(out / "wer_table.md", render_table(wer_header, wer_rows, "markdown"))
    provenance.append(
        {
            "output": "wer_table.csv",
            "operation": "scoring.corpus_wer",
            "inputs": [config.refs_path] + sorted(c.hyps_path for c in config.conditions),
        }
    )

    # 3. Curves per (dataset, system, modality) from unoccluded conditions.
    curve_points: dict[tuple[str, str, str], list[tuple[float, float, str]]] = {}
    for label in sorted(cond_results):
        cond = cond_results[label]["condition"]
        if cond.occlusion != "none":
            continue
        key = (cond.dataset, cond.system, cond.modality)
        curve_points.setdefault(key, []).append(
            (cond.snr_db, cond_results[label]["summary"]["wer_percent"], label)
        )
    curves: dict[tuple[str, str, str], WerCurve] = {}
    for key, pts in curve_points.items():
        pts.sort()
        snrs = [p[0] for p in pts]
        if len(pts) >= 2 and len(set(snrs)) == len(snrs):
            curves[key] = WerCurve(
                points=tuple((snr, min(100.0, wer)) for snr, wer, _ in pts),
                label="%s/%s/%s" % key,
            )

    # 4. Effective SNR gains per (dataset, system) with both ao and av curves.
    pairs = []
    pair_keys = []
    for dataset, system, modality in sorted(curves):
        if modality != "ao":
            continue
        av_key = (dataset, system, "av")
        if av_key in curves:
            pairs.append((curves[(dataset, system, "ao")], curves[av_key]))
            pair_keys.append((dataset, system))
    gain_rows_raw = gain_report(pairs, config.ref_snrs) if pairs else []
    gains_json = []
    gain_header = ["dataset", "system", "ref_snr_db", "gain_db", "bounded", "note"]
    gain_rows = []
    for k, row in enumerate(gain_rows_raw):
        dataset, system = pair_keys[k // len(config.ref_snrs)]
        gains_json.append({"dataset": dataset, "system": system, **row})
        gain_rows.append(
            [
                dataset,
                system,
                "%g" % row["ref_snr_db"],
                "" if row["gain_db"] is None else "%.1f" % round_half_up(row["gain_db"], 1),
                bool(row["bounded"]),
                row["note"],
            ]
        )
        provenance.append(
            {
                "output": "gain_table.csv:%s/%s@%g" % (dataset, system, row["ref_snr_db"]),
                "operation": "gaincurve.effective_snr_gain",
                "inputs": [config.refs_path],
            }
        )
    gain_rows.sort()
    _write_text(out / "gain_table.csv", render_table(gain_header, gain_rows, "csv"))
    _write_text(out / "gain_table.md", render_table(gain_header, gain_rows, "markdown"))
    _write_json(out / "gains.json", gains_json)

    # 5. SVG curve plots per dataset (annotated with the first ref SNR's gains).
    svg_files = []
    for dataset in sorted({k[0] for k in curves}):
        ds_curves = [curves[k] for k in sorted(curves) if k[0] == dataset]
        ds_gains = []
        for (ds, system), row in zip(
            [pair_keys[k // len(config.ref_snrs)] for k in range(len(gain_rows_raw))],
            gain_rows_raw,
        ):
            if ds == dataset and row["gain_db"] is not None and row["ref_snr_db"] == config.ref_snrs[0]:
                ds_gains.append(
                    GainResult(
                        gain_db=row["gain_db"],
                        ref_snr_db=row["ref_snr_db"],
                        ref_wer=row["ref_wer"],
                        crossing_snr_db=row["crossing_snr_db"],
                        bounded=row["bounded"],
                    )
                )
        name = "curves_%s.svg" % dataset
        _write_text(out / name, render_curves_svg(ds_curves, ds_gains))
        svg_files.append(name)
        provenance.append(
            {"output": name, "operation": "report.render_curves_svg", "inputs": [config.refs_path]}
        )

    # 6. Occlusion comparison: relative WER increase against the unoccluded run.
    occl_header = [
        "dataset", "system", "modality", "snr_db",
        "none_wer", "initial_wer", "initial_increase_percent",
        "middle_wer", "middle_increase_percent",
    ]
    occl_groups: dict[tuple, dict[str, float]] = {}
    for label in sorted(cond_results):
        cond = cond_results[label]["condition"]
        key = (cond.dataset, cond.system, cond.modality, cond.snr_db)
        occl_groups.setdefault(key, {})[cond.occlusion] = cond_results[label]["summary"]["wer_percent"]
    occl_rows = []
    occlusion_json = []
    for key in sorted(occl_groups):
        group = occl_groups[key]
        if "none" not in group or not ({"initial", "middle"} & set(group)):
            continue
        baseline = group["none"]
        row = [key[0], key[1], key[2], "%g" % key[3], "%.1f" % round_half_up(baseline, 1)]
        entry = {"dataset": key[0], "system": key[1], "modality": key[2],
                 "snr_db": key[3], "none_wer": baseline}
        for occl in ("initial", "middle"):
            if occl in group:
                inc = scoring.relative_increase(baseline, group[occl])
                row += ["%.1f" % round_half_up(group[occl], 1), "%.1f" % round_half_up(inc, 1)]
                entry["%s_wer" % occl] = group[occl]
                entry["%s_increase_percent" % occl] = inc
            else:
                row += ["", ""]
        occl_rows.append(row)
        occlusion_json.append(entry)
        provenance.append(
            {
                "output": "occlusion_table.csv:%s/%s/%s@%g" % key,
                "operation": "scoring.relative_increase",
                "inputs": [config.refs_path],
            }
        )
    _write_text(out / "occlusion_table.csv", render_table(occl_header, occl_rows, "csv"))
    _write_text(out / "occlusion_table.md", render_table(occl_header, occl_rows, "markdown"))
    _write_json(out / "occlusion.json", occlusion_json)

    # 7. Norm correlations per condition.
    correlations = {}
    if config.mafi_norms:
        norms = mafi.load_norms(config.mafi_norms)
        for label in sorted(cond_results):
            try:
                res = mafi.correlate(
                    norms, cond_results[label]["iwer"], min_count=config.mafi_min_count
                )
            except EmptyIntersectionError as exc:
                correlations[label] = {"error": str(exc)}
            else:
                correlations[label] = {
                    "r": res.r,
                    "n": res.n,
                    "p": res.p,
                    "stars": res.stars,
                    "formatted": res.formatted(),
                }
            provenance.append(
                {
                    "output": "correlations.json:%s" % label,
                    "operation": "mafi.correlate",
                    "inputs": [config.mafi_norms, cond_results[label]["condition"].hyps_path],
                }
            )
        _write_json(out / "correlations.json", correlations)

    summary = {
        "seed": config.seed,
        "refs": config.refs_path,
        "n_conditions": len(config.conditions),
        "conditions": {
            label: {
                "dataset": cond_results[label]["condition"].dataset,
                "system": cond_results[label]["condition"].system,
                "modality": cond_results[label]["condition"].modality,
                "occlusion": cond_results[label]["condition"].occlusion,
                "snr_db": cond_results[label]["condition"].snr_db,
                "wer_percent": cond_results[label]["summary"]["wer_percent"],
                "counts": {
                    k: cond_results[label]["summary"][k] for k in ("S", "D", "I", "N")
                },
            }
            for label in sorted(cond_results)
        },
        "gains": gains_json,
        "occlusion": occlusion_json,
        "correlations": correlations,
        "svg_files": svg_files,
    }
    _write_json(out / "summary.json", summary)
    _write_json(out / "provenance.json", provenance)
    return summary


def render_bundle_report(bundle_dir) -> str:
    """Re-render the human-readable tables of a completed run bundle."""
    bundle = Path(bundle_dir)
    summary_path = bundle / "summary.json"
    if not summary_path.is_file():
        raise ConfigError("%s does not look like a report bundle (no summary.json)" % bundle)
    with open(summary_path, encoding="utf-8") as f:
        summary = json.load(f)

    sections = []
    wer_header = ["dataset", "system", "modality", "occlusion", "snr_db", "wer_percent"]
    wer_rows = [
        [c["dataset"], c["system"], c["modality"], c["occlusion"],
         "%g" % c["snr_db"], "%.1f" % round_half_up(c["wer_percent"], 1)]
        for c in summary["conditions"].values()
    ]
    wer_rows.sort()
    sections.append("## Corpus WER\n\n" + render_table(wer_header, wer_rows))

    gain_header = ["dataset", "system", "ref_snr_db", "gain_db", "bounded", "note"]
    gain_rows = [
        [g["dataset"], g["system"], "%g" % g["ref_snr_db"],
         "" if g["gain_db"] is None else "%.1f" % round_half_up(g["gain_db"], 1),
         bool(g["bounded"]), g["note"]]
        for g in summary["gains"]
    ]
    gain_rows.sort()
    sections.append("## Effective SNR gains\n\n" + render_table(gain_header, gain_rows))

    if summary["occlusion"]:
        occl_header = ["dataset", "system", "modality", "snr_db",
                       "none_wer", "initial_increase_percent", "middle_increase_percent"]
        occl_rows = []
        for e in summary["occlusion"]:
            occl_rows.append(
                [e["dataset"], e["system"], e["modality"], "%g" % e["snr_db"],
                 "%.1f" % round_half_up(e["none_wer"], 1),
                 "%.1f" % round_half_up(e["initial_increase_percent"], 1) if "initial_increase_percent" in e else "",
                 "%.1f" % round_half_up(e["middle_increase_percent"], 1) if "middle_increase_percent" in e else ""]
            )
        occl_rows.sort()
        sections.append("## Occlusion impact\n\n" + render_table(occl_header, occl_rows))

    if summary["correlations"]:
        corr_header = ["condition", "r", "n", "p", "formatted"]
        corr_rows = []
        for label in sorted(summary["correlations"]):
            entry = summary["correlations"][label]
            if "error" in entry:
                corr_rows.append([label, "", "", "", entry["error"]])
            else:
                corr_rows.append(
                    [label, "%.3f" % entry["r"], entry["n"], "%.3g" % entry["p"], entry["formatted"]]
                )
        sections.append("## Norm correlations\n\n" + render_table(corr_header, corr_rows))

    return "\n".join(sections)
