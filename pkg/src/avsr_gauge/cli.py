"""Command-line interface: the `avsr-gauge` tool.

Subcommands mirror the library modules: noise generation and mixing,
transcript scoring, effective SNR gains, occlusion planning/applying,
synthetic sweeps, norm statistics, and full report runs. Exit codes:
0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import gaincurve, mafi, noisemix, occlusion, report, scoring, simkit
from .errors import ConfigError, DataError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


def _add_common(parser, seed=True, jobs=True, out=True):
    # argparse.SUPPRESS keeps top-level --seed/--jobs/--out values when the
    # subcommand flag is not given.
    if seed:
        parser.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    if jobs:
        parser.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    if out:
        parser.add_argument("--out", default=argparse.SUPPRESS)


def _require(ns, attr, flag):
    value = getattr(ns, attr, None)
    if value is None:
        raise ConfigError("missing required option %s" % flag)
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avsr-gauge",
        description="Measure the visual contribution of audio-visual speech recognition.",
    )
    parser.add_argument("--seed", type=int, default=None, help="global random seed")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers for batch work")
    parser.add_argument("--out", default=None, help="output file or directory")
    sub = parser.add_subparsers(dest="command", required=True)

    # noise
    p_noise = sub.add_parser("noise", help="pink noise generation and SNR mixing")
    noise_sub = p_noise.add_subparsers(dest="noise_command", required=True)
    p_gen = noise_sub.add_parser("gen", help="generate seeded pink noise")
    p_gen.add_argument("--samples", type=int, required=True)
    p_gen.add_argument("--rate", type=int, required=True)
    _add_common(p_gen)
    p_mix = noise_sub.add_parser("mix", help="mix speech with noise at target SNRs")
    p_mix.add_argument("--speech", required=True, help="speech WAV file or directory")
    p_mix.add_argument("--noise", required=True, help="noise WAV file")
    p_mix.add_argument("--snr", required=True, help="target SNR dB (comma-separated list)")
    p_mix.add_argument("--peak", choices=noisemix.PEAK_POLICIES, default="rescale")
    _add_common(p_mix)

    # score
    p_score = sub.add_parser("score", help="align hypotheses and compute WER/IWER")
    p_score.add_argument("--refs", required=True)
    p_score.add_argument("--hyps", required=True)
    p_score.add_argument("--min-count", type=int, default=7)
    _add_common(p_score, seed=False, jobs=False)

    # gain
    p_gain = sub.add_parser("gain", help="effective SNR gain from WER curves")
    p_gain.add_argument("mode", nargs="?", choices=["plot"], default=None)
    p_gain.add_argument("--ao", required=True, help="audio-only curve CSV")
    p_gain.add_argument("--av", required=True, help="audio-visual curve CSV")
    p_gain.add_argument(
        "--ref-snr", type=float, action="append", default=None,
        help="reference SNR dB (repeatable; default 0)",
    )
    p_gain.add_argument("--json", default=None, help="also write results as JSON")
    _add_common(p_gain, seed=False, jobs=False)

    # occlude
    p_occl = sub.add_parser("occlude", help="plan and apply word-aligned occlusions")
    occl_sub = p_occl.add_subparsers(dest="occlude_command", required=True)
    p_plan = occl_sub.add_parser("plan", help="turn word alignments into frame windows")
    p_plan.add_argument("--align", required=True, help="CTM or TextGrid alignment file")
    p_plan.add_argument("--fps", type=float, default=25.0)
    p_plan.add_argument("--position", choices=occlusion.POSITIONS, required=True)
    p_plan.add_argument("--region", default="full-frame", help="x,y,w,h or 'full-frame'")
    p_plan.add_argument("--fill", choices=occlusion.FILLS, default="solid-gray")
    p_plan.add_argument("--tier", default="words", help="TextGrid tier name")
    _add_common(p_plan, seed=False, jobs=False)
    p_apply = occl_sub.add_parser("apply", help="apply a manifest to a frame directory")
    p_apply.add_argument("--frames", required=True)
    p_apply.add_argument("--manifest", required=True)
    p_apply.add_argument("--utt", default=None, help="utterance id (if manifest has several)")
    _add_common(p_apply, seed=False)

    # sim
    p_sim = sub.add_parser("sim", help="synthetic recognizer sweeps")
    sim_sub = p_sim.add_subparsers(dest="sim_command", required=True)
    p_sweep = sim_sub.add_parser("sweep", help="simulate WER-vs-SNR curves")
    p_sweep.add_argument("--config", required=True, help="flat key=value sweep config")
    p_sweep.add_argument("--out", nargs=2, metavar=("AO_CSV", "AV_CSV"), required=True)
    p_sweep.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    # mafi
    p_mafi = sub.add_parser("mafi", help="visual informativeness scores and correlations")
    mafi_sub = p_mafi.add_subparsers(dest="mafi_command", required=True)
    p_mscore = mafi_sub.add_parser("score", help="score a target word against guesses")
    p_mscore.add_argument("--lexicon", default=None, help="pronouncing dictionary (default: shipped)")
    p_mscore.add_argument("--features", default=None, help="phone feature table CSV")
    p_mscore.add_argument("--target", required=True)
    p_mscore.add_argument("--guess", action="append", required=True)
    p_mcorr = mafi_sub.add_parser("correlate", help="correlate norm scores with IWERs")
    p_mcorr.add_argument("--norms", required=True)
    p_mcorr.add_argument("--iwer", required=True, help="IWER table CSV from `score`")
    p_mcorr.add_argument("--min-count", type=int, default=7)
    _add_common(p_mcorr, seed=False, jobs=False)

    # run / report
    p_run = sub.add_parser("run", help="run a full evaluation from a config file")
    p_run.add_argument("--config", required=True)
    _add_common(p_run, jobs=False)
    p_report = sub.add_parser("report", help="re-render tables from a run bundle")
    p_report.add_argument("--bundle", required=True)

    return parser


def _seed_of(ns) -> int:
    return ns.seed if ns.seed is not None else 0


def _cmd_noise(ns) -> int:
    if ns.noise_command == "gen":
        out = _require(ns, "out", "--out")
        seed = _seed_of(ns)
        buf = noisemix.generate_pink_noise(ns.samples, ns.rate, seed)
        noisemix.write_wav(out, buf)
        print("wrote %s (%d samples at %d Hz, seed %d)" % (out, len(buf), ns.rate, seed))
        return EXIT_OK
    out = _require(ns, "out", "--out")
    speech = Path(ns.speech)
    paths = sorted(speech.glob("*.wav")) if speech.is_dir() else [speech]
    if not paths:
        raise ConfigError("no .wav files under %s" % speech)
    try:
        snrs = [float(v) for v in ns.snr.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError("bad --snr list %r" % ns.snr) from exc
    if not snrs:
        raise ConfigError("--snr list is empty")
    noise = noisemix.read_wav(ns.noise)
    rows = noisemix.batch_mix(
        paths, noise, snrs, out, seed=_seed_of(ns), peak_policy=ns.peak, jobs=ns.jobs
    )
    manifest = Path(out) / "mix_manifest.csv"
    noisemix.write_mix_manifest(manifest, rows)
    print("mixed %d file(s) x %d SNR(s); manifest at %s" % (len(paths), len(snrs), manifest))
    return EXIT_OK


def _cmd_score(ns) -> int:
    out = Path(_require(ns, "out", "--out"))
    out.mkdir(parents=True, exist_ok=True)
    refs = scoring.read_transcripts(ns.refs)
    hyps = scoring.read_transcripts(ns.hyps)
    alignments = scoring.score_corpus(refs, hyps)
    scoring.write_alignment_csv(out / "alignment.csv", alignments)
    scoring.write_corpus_summary(out / "summary.json", alignments)
    scoring.write_iwer_csv(
        out / "iwer.csv", scoring.iwer_table(alignments.values(), min_count=ns.min_count)
    )
    summary = scoring.corpus_summary(alignments)
    print(
        "WER %.2f%% (S=%d D=%d I=%d N=%d) over %d utterances"
        % (summary["wer_percent_2dp"], summary["S"], summary["D"], summary["I"],
           summary["N"], summary["n_utterances"])
    )
    return EXIT_OK


def _cmd_gain(ns) -> int:
    ao = gaincurve.read_curve_csv(Path(ns.ao))
    av = gaincurve.read_curve_csv(Path(ns.av))
    ref_snrs = ns.ref_snr if ns.ref_snr else [0.0]
    rows = gaincurve.gain_report([(ao, av)], ref_snrs)
    header = ["ao", "av", "ref_snr_db", "ref_wer", "crossing_snr_db", "gain_db", "bounded", "note"]
    table_rows = [
        [r["ao_label"], r["av_label"], "%g" % r["ref_snr_db"],
         "" if r["ref_wer"] is None else "%.2f" % r["ref_wer"],
         "" if r["crossing_snr_db"] is None else "%.2f" % r["crossing_snr_db"],
         "" if r["gain_db"] is None else "%.2f" % r["gain_db"],
         bool(r["bounded"]), r["note"]]
        for r in rows
    ]
    print(report.render_table(header, table_rows, "markdown"), end="")
    if ns.json:
        with open(ns.json, "w", encoding="utf-8", newline="") as f:
            json.dump(rows, f, indent=2, sort_keys=True)
            f.write("\n")
    if ns.mode == "plot":
        out = _require(ns, "out", "--out")
        gains = [
            gaincurve.GainResult(
                gain_db=r["gain_db"], ref_snr_db=r["ref_snr_db"], ref_wer=r["ref_wer"],
                crossing_snr_db=r["crossing_snr_db"], bounded=r["bounded"],
            )
            for r in rows
            if r["gain_db"] is not None and r["ref_snr_db"] == ref_snrs[0]
        ]
        with open(out, "w", encoding="utf-8", newline="") as f:
            f.write(report.render_curves_svg([ao, av], gains))
        print("wrote %s" % out)
    return EXIT_OK


def _parse_region(text: str):
    if text == "full-frame":
        return None
    try:
        x, y, w, h = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise ConfigError("--region must be x,y,w,h or 'full-frame'") from exc
    return (x, y, w, h)


def _cmd_occlude(ns) -> int:
    if ns.occlude_command == "plan":
        out = _require(ns, "out", "--out")
        align_path = Path(ns.align)
        if align_path.suffix.lower() == ".ctm":
            spans = occlusion.parse_ctm(align_path)
        elif align_path.suffix.lower() == ".textgrid":
            spans = occlusion.parse_textgrid(align_path, tier_name=ns.tier)
        else:
            raise ConfigError("--align must be a .ctm or .TextGrid file")
        manifests = occlusion.plan_all(
            spans, ns.fps, ns.position, region=_parse_region(ns.region), fill=ns.fill
        )
        occlusion.write_manifest_json(out, manifests)
        n_windows = sum(len(m.windows) for m in manifests)
        n_skipped = sum(len(m.skipped) for m in manifests)
        print(
            "planned %d window(s) over %d utterance(s), %d word(s) exempt; wrote %s"
            % (n_windows, len(manifests), n_skipped, out)
        )
        return EXIT_OK
    out = _require(ns, "out", "--out")
    manifests = occlusion.read_manifest_json(ns.manifest)
    if ns.utt is not None:
        matching = [m for m in manifests if m.utt_id == ns.utt]
        if not matching:
            raise ConfigError("no manifest for utterance %r" % ns.utt)
        manifest = matching[0]
    elif len(manifests) == 1:
        manifest = manifests[0]
    else:
        raise ConfigError(
            "manifest covers %d utterances; pick one with --utt" % len(manifests)
        )
    names, frames = occlusion.read_frames(ns.frames)
    result = occlusion.apply(frames, manifest)
    occlusion.write_frames(out, names, result, jobs=ns.jobs)
    print("occluded %d window(s) across %d frame(s); wrote %s" % (len(manifest.windows), len(names), out))
    return EXIT_OK


def _cmd_sim(ns) -> int:
    settings = report.read_kv_config(ns.config)
    if getattr(ns, "seed", None) is not None:
        settings["seed"] = str(ns.seed)
    ao_rec, av_rec, refs, grid, seed = simkit.sweep_from_config(settings)
    ao_curve, av_curve = simkit.sweep(ao_rec, av_rec, refs, grid, seed)
    ao_path, av_path = ns.out
    gaincurve.write_curve_csv(ao_path, ao_curve)
    gaincurve.write_curve_csv(av_path, av_curve)
    print("wrote %s and %s (%d grid points)" % (ao_path, av_path, len(grid)))
    return EXIT_OK


def _cmd_mafi(ns) -> int:
    if ns.mafi_command == "score":
        table = mafi.load_feature_table(ns.features)
        lexicon = mafi.load_lexicon(ns.lexicon, feature_table=table)
        target = mafi.g2p(ns.target, lexicon)
        guesses = [mafi.g2p(g, lexicon) for g in ns.guess]
        score = mafi.mafi_score(target, guesses)
        print("%.6f" % score)
        return EXIT_OK
    norms = mafi.load_norms(ns.norms)
    iwers = scoring.read_iwer_csv(ns.iwer)
    result = mafi.correlate(norms, iwers, min_count=ns.min_count)
    payload = {
        "r": result.r,
        "n": result.n,
        "p": result.p,
        "stars": result.stars,
        "formatted": result.formatted(),
    }
    out = getattr(ns, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
    print("r=%s n=%d p=%.4g -> %s" % (repr(result.r), result.n, result.p, result.formatted()))
    return EXIT_OK


def _cmd_run(ns) -> int:
    config = report.parse_eval_config(ns.config)
    if getattr(ns, "seed", None) is not None:
        config.seed = ns.seed
    out = getattr(ns, "out", None) or config.out_dir
    if out is None:
        raise ConfigError("run needs an output directory (--out or `out =` in the config)")
    summary = report.run(config, out)
    print(
        "bundle written to %s (%d conditions, %d gain rows)"
        % (out, summary["n_conditions"], len(summary["gains"]))
    )
    return EXIT_OK


def _cmd_report(ns) -> int:
    print(report.render_bundle_report(ns.bundle))
    return EXIT_OK


_HANDLERS = {
    "noise": _cmd_noise,
    "score": _cmd_score,
    "gain": _cmd_gain,
    "occlude": _cmd_occlude,
    "sim": _cmd_sim,
    "mafi": _cmd_mafi,
    "run": _cmd_run,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return _HANDLERS[ns.command](ns)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
