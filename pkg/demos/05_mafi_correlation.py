"""Visual informativeness scores and their correlation with word errors.

Shows the three-step scoring pipeline (word -> phone segments ->
feature vectors -> alignment-based similarity), then correlates a norms
file against per-word error rates, with the analytic p-value
cross-checked by a permutation test.
"""

from importlib import resources

import numpy as np

from avsr_gauge import mafi, scoring

lexicon = mafi.load_lexicon()  # shipped demo dictionary + feature table

# 1. A word and a speechreading guess become segment sequences.
target = mafi.g2p("BAT", lexicon)
print("BAT ->", " ".join(s.ipa for s in target))

# 2. Scores: exact recognition scores 0; a voicing confusion (b/p differ in
#    one of 14 features) costs (1/14)/3; missing the word entirely costs -1.
for guess_word in ("BAT", "PAT", "MAT"):
    guess = mafi.g2p(guess_word, lexicon)
    print("  guess %-4s -> score %.4f" % (guess_word, mafi.mafi_score(target, [guess])))
print("  guess (nothing) -> score %.4f" % mafi.mafi_score(target, [[]]))

# 3. Correlate norm scores with per-word error rates. Build a corpus whose
#    errors loosely track the norms, then run the Pearson analysis.
norms = mafi.load_norms(resources.files("avsr_gauge").joinpath("data/mafi_norms_demo.csv"))
rng = np.random.default_rng(7)
iwers = []
for entry in norms:
    count = 12
    # more errors for less visually informative words, plus noise
    p_err = min(0.9, max(0.0, -0.45 * entry.score + rng.normal(0, 0.08)))
    errors = int(round(p_err * count))
    iwers.append(scoring.WordStats(entry.word, count, errors, 0))

result = mafi.correlate(norms, iwers, min_count=7)
print(
    "\nPearson r = %.3f over n = %d words, p = %.2g -> rendered as %r"
    % (result.r, result.n, result.p, result.formatted())
)

x = [e.score for e in norms]
y = [w.iwer for w in iwers]
perm = mafi.permutation_p(x, y, iterations=100000, seed=3)
print("permutation check: p = %.2g (analytic %.2g)" % (perm, result.p))
