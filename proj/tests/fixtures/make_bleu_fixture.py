"""Regenerates the BLEU fixtures (bleu_50.tsv, bleu_sparse.tsv, bleu_expected.json) with sacrebleu.

Run from this directory: python3 make_bleu_fixture.py
"""
import json
import random

import sacrebleu

WORDS = ("the cat dog sat on mat a red blue house river city is was born in "
         "located near club plays for team with of and to by at").split()

rng = random.Random(7)
pairs = []
for i in range(50):
    ref = [rng.choice(WORDS) for _ in range(rng.randint(5, 16))]
    hyp = list(ref)
    for _ in range(rng.randint(0, 6)):
        op = rng.random()
        if op < 0.35 and hyp:
            hyp[rng.randrange(len(hyp))] = rng.choice(WORDS)
        elif op < 0.8 and len(hyp) > 4:
            del hyp[rng.randrange(len(hyp))]
        else:
            hyp.insert(rng.randrange(len(hyp) + 1), rng.choice(WORDS))
    if i % 17 == 5:
        rng.shuffle(hyp)
    pairs.append((" ".join(hyp), " ".join(ref)))

# no shared 4-gram anywhere, so unsmoothed BLEU is 0 and smoothing matters
sparse = [
    ("the cat sat on the mat", "the cat sat near a mat"),
    ("a dog plays for the team", "a dog was for a team"),
    ("river city is near", "the river city is located near"),
    ("born in the house", "he was born in a red house"),
    ("blue club", "the blue club"),
]


def write(name, rows):
    with open(name, "w") as f:
        for hyp, ref in rows:
            f.write(f"{hyp}\t{ref}\n")


def report(rows, smooth_method, **kw):
    hyps = [h for h, _ in rows]
    refs = [[r for _, r in rows]]
    b = sacrebleu.corpus_bleu(hyps, refs, tokenize="none", smooth_method=smooth_method, **kw)
    return {
        "bleu": b.score / 100.0,
        "precisions": [p / 100.0 for p in b.precisions],
        "brevity_penalty": b.bp,
        "hyp_length": b.sys_len,
        "ref_length": b.ref_len,
    }


write("bleu_50.tsv", pairs)
write("bleu_sparse.tsv", sparse)
expected = {
    "tool": f"sacrebleu {sacrebleu.__version__}, tokenize=none",
    "bleu_50": {"unsmoothed": report(pairs, "none"), "floor_0.1": report(pairs, "floor", smooth_value=0.1)},
    "bleu_sparse": {"unsmoothed": report(sparse, "none"), "floor_0.1": report(sparse, "floor", smooth_value=0.1)},
}
with open("bleu_expected.json", "w") as f:
    json.dump(expected, f, indent=2)
    f.write("\n")
