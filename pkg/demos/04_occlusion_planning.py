"""Word-aligned occlusion: from timestamps to filled frames.

Takes forced-alignment word timestamps (CTM), maps each word to its
frame envelope at 25 fps, selects the initial or middle third of each
word's frames (words under 3 frames are exempt), and applies a gray
fill to those frames.
"""

from pathlib import Path

import numpy as np

from avsr_gauge import occlusion

out_dir = Path(__file__).parent / "output"
out_dir.mkdir(exist_ok=True)

# A small alignment: three words, one too short to occlude.
ctm_path = out_dir / "demo.ctm"
ctm_path.write_text(
    "u1 1 0.00 0.36 hello\n"
    "u1 1 0.36 0.08 my\n"
    "u1 1 0.44 0.52 friend\n",
    encoding="utf-8",
)
spans = occlusion.parse_ctm(ctm_path)
for span in spans:
    envelope = occlusion.word_frames(span, fps=25)
    print(
        "%-6s [%.2f, %.2f) s -> frames [%d, %d)"
        % (span.word, span.t_start, span.t_end, envelope.start_frame, envelope.end_frame)
    )

for position in ("initial", "middle"):
    manifest = occlusion.plan(spans, fps=25, position=position)
    windows = ", ".join(
        "%s[%d,%d)" % (w.word, w.start_frame, w.end_frame) for w in manifest.windows
    )
    skipped = ", ".join(s["word"] for s in manifest.skipped)
    print("%s: %s (exempt: %s)" % (position, windows, skipped))

# Apply the middle-third plan to synthetic frames and count changed ones.
manifest = occlusion.plan(spans, fps=25, position="middle")
rng = np.random.default_rng(0)
frames = [rng.integers(0, 256, (32, 32), dtype=np.uint8) for _ in range(25)]
filled = occlusion.apply(frames, manifest)
changed = [k for k in range(len(frames)) if not np.array_equal(frames[k], filled[k])]
print("frames changed by the fill: %s" % changed)

occlusion.write_manifest_json(out_dir / "occlusion_manifest.json", [manifest])
occlusion.write_frames(out_dir / "frames_occluded", ["%06d.png" % k for k in range(25)], filled)
print("manifest and occluded frames written under %s" % out_dir)
