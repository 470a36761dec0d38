"""Transcript scoring: alignment, WER, per-word error rates.

Aligns a few hypothesis lines against references and walks through the
numbers: edit operations, corpus WER, the per-word table with
insertions excluded, and relative WER increases between conditions.
"""

from avsr_gauge import scoring

refs = {
    "u1": "The cat sat on the mat",
    "u2": "We are going home now",
    "u3": "She said don't worry about it",
}
hyps = {
    "u1": "the cat sat on a mat",        # 1 substitution
    "u2": "we are going home now",       # perfect
    "u3": "she said worry about it now", # 1 deletion + 1 insertion
}

ref_tokens = {u: scoring.normalize(text) for u, text in refs.items()}
hyp_tokens = {u: scoring.normalize(text) for u, text in hyps.items()}

alignments = scoring.score_corpus(ref_tokens, hyp_tokens)
for utt_id, a in alignments.items():
    print("%s: S=%d D=%d I=%d N=%d" % (utt_id, a.S, a.D, a.I, a.N))
    for code, ri, hj in a.ops:
        ref_w = a.ref[ri] if ri is not None else "*"
        hyp_w = a.hyp[hj] if hj is not None else "*"
        print("   %-5s %-8s -> %s" % (code, ref_w, hyp_w))

wer = scoring.corpus_wer(alignments.values())
print("\ncorpus WER: %.2f%%" % wer)

# The per-word table attributes substitutions and deletions to reference
# words; insertions are excluded because they have no reference word.
table = scoring.iwer_table(alignments.values(), min_count=1)
print("\nword        count  subs  dels  iwer")
for row in table:
    if row.iwer > 0:
        print("%-10s %5d %5d %5d  %.2f" % (row.word, row.count, row.subs, row.dels, row.iwer))

# Relative WER increase between a clean and a degraded condition.
print("\nrelative increase 15.6%% -> 24.6%%: %.1f%%" % scoring.relative_increase(15.6, 24.6))
