"""A complete evaluation bundle from one config file.

Builds a small synthetic experiment on disk (references, hypothesis
files for two systems at several SNRs, plus occluded conditions),
writes an eval config, and runs the same pipeline the
`avsr-gauge run` command drives. The bundle contains WER and gain
tables, occlusion comparisons, an SVG curve plot, and provenance.
"""

from pathlib import Path

from avsr_gauge import report, scoring, simkit

out_root = Path(__file__).parent / "output" / "full_report"
data_dir = out_root / "data"
data_dir.mkdir(parents=True, exist_ok=True)

refs = simkit.synthetic_refs(n_words=12000, utt_len=6, vocab_size=120, seed=5)
scoring.write_transcripts(data_dir / "refs.tsv", refs)

ao_rec = simkit.SyntheticRecognizer(midpoint_db=0.0)
av_rec = simkit.SyntheticRecognizer(midpoint_db=0.0, av_shift_db=3.0)

lines = ["refs = data/refs.tsv", "ref_snrs = 0", "seed = 5"]
grid = [-9.0, -6.0, -3.0, 0.0, 3.0]
for i, snr in enumerate(grid):
    for modality, rec in (("ao", ao_rec), ("av", av_rec)):
        label = "%s_%02d" % (modality, i)
        hyps = simkit.simulate(refs, rec, snr, seed=[5, i, modality == "av"])
        scoring.write_transcripts(data_dir / ("%s.tsv" % label), hyps)
        lines += [
            "condition.%s.hyps = data/%s.tsv" % (label, label),
            "condition.%s.system = synth" % label,
            "condition.%s.modality = %s" % (label, modality),
            "condition.%s.snr_db = %g" % (label, snr),
        ]

# Occluded variants of the 0 dB audio-visual condition: the simulator uses
# a weaker recognizer to stand in for the degraded visual stream.
for occl, shift in (("initial", 1.2), ("middle", 1.0)):
    label = "av_occl_%s" % occl
    weaker = simkit.SyntheticRecognizer(midpoint_db=0.0, av_shift_db=3.0 - shift)
    hyps = simkit.simulate(refs, weaker, 0.0, seed=[6, occl == "middle"])
    scoring.write_transcripts(data_dir / ("%s.tsv" % label), hyps)
    lines += [
        "condition.%s.hyps = data/%s.tsv" % (label, label),
        "condition.%s.system = synth" % label,
        "condition.%s.modality = av" % label,
        "condition.%s.snr_db = 0" % label,
        "condition.%s.occlusion = %s" % (label, occl),
    ]

config_path = out_root / "eval.conf"
config_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

config = report.parse_eval_config(config_path)
summary = report.run(config, out_root / "bundle")

print("bundle files:")
for path in sorted((out_root / "bundle").rglob("*")):
    if path.is_file():
        print("  %s" % path.relative_to(out_root))

print("\n" + report.render_bundle_report(out_root / "bundle"))
