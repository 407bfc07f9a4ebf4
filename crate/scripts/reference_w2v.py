#!/usr/bin/env python3
"""Reference skip-gram embedding for the embedding sanity test.

Trains gensim's Word2Vec (skip-gram, negative sampling) on an inline-tagged
corpus with the trainer's default settings and prints the cosine similarities
frozen in crates/core/tests/embedding_sanity.rs.

    pip install gensim
    python3 scripts/reference_w2v.py data/imdb_train.tsv
"""
import sys

from gensim.models import Word2Vec


def main(path):
    docs = []
    for line in open(path, encoding="utf-8"):
        body = line.rstrip("\n").split("\t")[-1]
        docs.append([t.rsplit("_", 1)[0].lower() for t in body.split(" ") if t])
    model = Word2Vec(
        docs, vector_size=100, window=5, negative=5, epochs=5, alpha=0.025,
        min_count=5, sample=1e-3, sg=1, hs=0, workers=1, seed=1,
    )
    for a, b in [("good", "great"), ("good", "the")]:
        print(f"{a}\t{b}\t{model.wv.similarity(a, b):.4f}")


if __name__ == "__main__":
    main(sys.argv[1])
