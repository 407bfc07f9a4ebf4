#!/usr/bin/env python3
"""Build the tagged IMDB desk-scale fixtures under data/.

Source: the IMDB reviews bundled in the `movie-reviews` wheel (MIT) from PyPI.
Tagging: textblob's PatternTagger (Brill-style lexicon tagger, no downloads).

    pip download movie-reviews --no-deps -d /tmp && pip install textblob
    python3 scripts/prepare_imdb.py /tmp/movie_reviews-0.0.2-py3-none-any.whl data/

Outputs
  imdb_train.tsv     2,000 balanced reviews, "id<TAB>label<TAB>tok_TAG tok_TAG ..."
  imdb_test.tsv      500 balanced held-out reviews, same format
  imdb_100.tok       the first 100 training reviews, one "token<TAB>TAG" per line
  imdb_lexicon.tsv   expected polarity per word (2*P(pos|word)-1) from a
                     disjoint balanced pool of 10,000 reviews
"""
import csv
import io
import random
import re
import sys
import zipfile
from collections import Counter

from textblob.en.taggers import PatternTagger

SEED = 20160101
N_TRAIN = 1000  # per class
N_TEST = 250  # per class
N_POOL = 5000  # per class
MIN_LEX_COUNT = 20

TAGGER = PatternTagger()
BR = re.compile(r"<br\s*/?>", re.I)
TAG_OK = re.compile(r"^\S+$")
# Penn-Treebank-style split: "don't" -> do n't, "it's" -> it 's
TOKEN = re.compile(
    r"[a-z]+(?=n't\b)|n't\b|'(?:s|re|ve|ll|d|m)\b|[a-z0-9]+(?:[-.][a-z0-9]+)*|[^\sa-z0-9]",
    re.I,
)


def tag(text):
    out = []
    toks = TOKEN.findall(BR.sub(" ", text))
    for tok, t in TAGGER.tag(" ".join(toks), tokenize=False):
        tok = tok.strip()
        if not tok or not TAG_OK.match(tok) or not t or not TAG_OK.match(t):
            continue
        out.append((tok.lower(), t))
    return out


def main(wheel, outdir):
    z = zipfile.ZipFile(wheel)
    rows = list(csv.DictReader(io.StringIO(z.read("movie_reviews/data/combined_movie_reviews.csv").decode())))
    imdb = [(i, r["text"], "POS" if r["label"] == "1" else "NEG") for i, r in enumerate(rows) if r["source"] == "imdb"]
    rng = random.Random(SEED)
    rng.shuffle(imdb)
    pos = [r for r in imdb if r[2] == "POS"]
    neg = [r for r in imdb if r[2] == "NEG"]

    def take(a, b):
        return a[:N_TRAIN], a[N_TRAIN:N_TRAIN + N_TEST], a[N_TRAIN + N_TEST:N_TRAIN + N_TEST + N_POOL]

    ptr, pte, ppo = take(pos, None)
    ntr, nte, npo = take(neg, None)

    def interleave(a, b):
        out = []
        for x, y in zip(a, b):
            out += [x, y]
        return out

    train = interleave(ptr, ntr)
    test = interleave(pte, nte)

    def write_reviews(path, revs, prefix):
        tagged = []
        with open(path, "w", encoding="utf-8") as f:
            for k, (src, text, label) in enumerate(revs):
                toks = tag(text)
                tagged.append(toks)
                f.write(f"{prefix}{k:04d}-imdb{src}\t{label}\t" + " ".join(f"{w}_{t}" for w, t in toks) + "\n")
        return tagged

    tr = write_reviews(f"{outdir}/imdb_train.tsv", train, "train")
    write_reviews(f"{outdir}/imdb_test.tsv", test, "test")

    with open(f"{outdir}/imdb_100.tok", "w", encoding="utf-8") as f:
        for k, toks in enumerate(tr[:100]):
            if k:
                f.write("\n")
            for w, t in toks:
                f.write(f"{w}\t{t}\n")

    cpos, cneg = Counter(), Counter()
    for src, text, label in ppo + npo:
        (cpos if label == "POS" else cneg).update(w for w, _ in tag(text))
    npos, nneg = sum(cpos.values()), sum(cneg.values())
    with open(f"{outdir}/imdb_lexicon.tsv", "w", encoding="utf-8") as f:
        f.write(f"# expected polarity 2*P(POS|word)-1, class-rate normalized, {2 * N_POOL} held-aside IMDB reviews\n")
        f.write(f"# words with at least {MIN_LEX_COUNT} occurrences\n")
        for w in sorted(set(cpos) | set(cneg)):
            n = cpos[w] + cneg[w]
            if n < MIN_LEX_COUNT:
                continue
            rp, rn = cpos[w] / npos, cneg[w] / nneg
            f.write(f"{w}\t{2 * rp / (rp + rn) - 1:.4f}\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
