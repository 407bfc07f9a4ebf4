"""Builds the test fixtures under crates/core/tests/fixtures and prints the
oracle values frozen into the tests. Independent of the Rust code."""
import math
import random
import statistics
import sys
from pathlib import Path

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures")
HERE = Path(__file__).parent


def phrases_fixture():
    sents = [l.split() for l in (HERE / "fixture_sentences.txt").read_text().splitlines() if l.strip()]
    assert len(sents) == 50
    docs = [sum(sents[i:i + 5], []) for i in range(0, 50, 5)]
    lines = []
    for d, toks in enumerate(docs):
        lines.append(f"#doc\tfx{d + 1:02d}\t-")
        for t in toks:
            w, tag = t.rsplit("_", 1)
            lines.append(f"{w}\t{tag}")
        lines.append("")
    (OUT / "phrases50.tok").write_text("\n".join(lines))

    adv = {"RB", "RBR", "RBS"}
    noun = {"NN", "NNS"}
    rules = [
        ({"JJ"}, noun, False),
        (adv, {"JJ"}, True),
        ({"JJ"}, {"JJ"}, True),
        (noun, {"VB", "VBD"}, True),
        (adv, {"VBN", "VBG"}, False),
    ]
    expected = []
    for d, toks in enumerate(docs):
        pairs = [t.rsplit("_", 1) for t in toks]
        for i in range(len(pairs) - 1):
            (w1, t1), (w2, t2) = pairs[i], pairs[i + 1]
            t3 = pairs[i + 2][1] if i + 2 < len(pairs) else None
            for r, (a, b, not_noun) in enumerate(rules, 1):
                if t1 in a and t2 in b and not (not_noun and t3 in noun):
                    expected.append(f"{w1}\t{w2}\t{r}\tfx{d + 1:02d}\t{i}")
                    break
    expected.sort()
    (OUT / "phrases50.expected").write_text("\n".join(expected) + "\n")
    print("phrases:", len(expected))


def variance_fixture():
    rng = random.Random(7)
    tags = ["JJ", "JJ", "JJ", "RB", "RB", "NN", "NN", "DT", "VB", "JJS"]
    items = []
    for i in range(30):
        tag = tags[i % len(tags)]
        v = round(rng.uniform(-1, 1), 4)
        if tag == "DT":
            v = 0.05
        items.append((f"w{i}", tag, v))
    (OUT / "variance30.tsv").write_text("".join(f"{w}\t{t}\t{v}\n" for w, t, v in items))
    groups = {}
    for _, t, v in items:
        groups.setdefault(t, []).append(v)
    total = sum(statistics.pvariance(vs) * len(vs) for vs in groups.values())
    for t in sorted(groups):
        vs = groups[t]
        var = statistics.pvariance(vs)
        print(f"variance {t} count={len(vs)} var={var!r} share={var * len(vs) / total!r}")
    print("variance total", repr(total))


def pearson_fixture():
    rng = random.Random(11)
    xs = [round(rng.gauss(0, 1), 6) for _ in range(20)]
    ys = [round(0.6 * x + rng.gauss(0, 0.8), 6) for x in xs]
    (OUT / "pearson20.tsv").write_text("".join(f"w{i}\t{x}\t{y}\n" for i, (x, y) in enumerate(zip(xs, ys))))
    print("pearson", repr(statistics.correlation(xs, ys)))


def partition_fixture():
    rng = random.Random(13)
    words = [f"p{i:02d}" for i in range(40)]
    scores = {}
    for i, w in enumerate(words):
        s = round(rng.uniform(-2, 2), 3)
        if i % 10 == 3:
            s = 0.0
        scores[w] = s
    lines = [f"{w}\t{s}" for w, s in scores.items() if w != "p39"]
    (OUT / "lexicon40.tsv").write_text("# fixture lexicon\n" + "\n".join(lines) + "\n")
    pos = sorted(w for w, s in scores.items() if s > 0 and w != "p39")
    neg = sorted(w for w, s in scores.items() if s < 0 and w != "p39")
    drop = sorted(w for w, s in scores.items() if s == 0 or w == "p39")
    print("partition pos", " ".join(pos))
    print("partition neg", " ".join(neg))
    print("partition drop", " ".join(drop))


def vectors_fixture():
    rng = random.Random(17)
    rows = {f"v{i}": [round(rng.uniform(-1, 1), 5) for _ in range(4)] for i in range(10)}
    (OUT / "vectors10.txt").write_text(
        "10 4\n" + "".join(f"{w} {' '.join(str(x) for x in v)}\n" for w, v in rows.items()))
    mean = [math.fsum(v[k] for v in rows.values()) / 10 for k in range(4)]
    print("mean10", [repr(m) for m in mean])

    def cos(a, b):
        return math.fsum(x * y for x, y in zip(a, b)) / (
            math.sqrt(math.fsum(x * x for x in a)) * math.sqrt(math.fsum(y * y for y in b)))

    pos = [math.fsum(rows[w][k] for w in ("v0", "v1", "v2")) / 3 for k in range(4)]
    neg = [math.fsum(rows[w][k] for w in ("v3", "v4")) / 2 for k in range(4)]
    for w in ("v5", "v6", "v7", "v8", "v9"):
        print("so5", w, repr(cos(pos, rows[w]) - cos(neg, rows[w])))
    for a, b in (("v0", "v1"), ("v0", "v2"), ("v1", "v2")):
        print("dist3", a, b, repr(1 - cos(rows[a], rows[b])))


def near_fixture():
    docs = [
        "excellent acting and a great story made this excellent",
        "poor script poor acting great music",
        "the great story was " + "x " * 9 + "poor",
        "great story great story excellent",
        "nothing here at all",
        "poor " + "y " * 10 + "great story " + "z " * 10 + "excellent",
    ]
    lines = []
    for i, d in enumerate(docs):
        lines.append(f"n{i}\t-\t" + " ".join(f"{w}_NN" for w in d.split()))
    (OUT / "near6.tsv").write_text("\n".join(lines) + "\n")
    toks = [d.split() for d in docs]

    def occ(doc, q):
        q = q.split()
        return [i for i in range(len(doc) - len(q) + 1) if doc[i:i + len(q)] == q]

    def near(a, b, w=10):
        out = []
        for n, doc in enumerate(toks):
            la, lb = len(a.split()), len(b.split())
            if any(abs(p - q) <= w and (p + la <= q or q + lb <= p) for p in occ(doc, a) for q in occ(doc, b)):
                out.append(f"n{n}")
        return out

    for a, b in (("great story", "excellent"), ("great story", "poor"), ("great", "excellent"),
                 ("great", "poor"), ("acting", "poor"), ("story", "great")):
        print("near", repr(a), repr(b), near(a, b))
    for q in ("excellent", "poor", "great story", "great", "missing"):
        print("hits", repr(q), sum(1 for d in toks if occ(d, q)))


def pmi_fixture():
    # each line: doc text; phrases are JJ NN pairs, fillers are DT
    docs = []
    for i in range(10):
        body = ["excellent"]
        if i < 2:
            body = ["clever", "plot"] + ["f"] * 3 + body
        if i == 2:
            body = body + ["f"] * 4 + ["dull", "script"]
        if i < 4:
            body = body + ["f"] * 12 + ["fine", "cast"]
        if i >= 8:
            body = ["fine", "cast"] + ["f"] * 8 + body
        docs.append(body)
    for i in range(5):
        body = ["poor"]
        if i < 4:
            body = ["dull", "script"] + ["f"] * 2 + body
        if i == 0:
            body = body + ["f", "fine", "cast"]
        docs.append(body)
    for i in range(4):
        docs.append(["f", "fine", "cast", "f"])
    docs.append(["nice", "score", "f", "f"])
    tags = {"clever": "JJ", "dull": "JJ", "fine": "JJ", "nice": "JJ", "plot": "NN", "script": "NN",
            "cast": "NN", "score": "NN", "excellent": "JJ", "poor": "JJ", "f": "DT"}
    lines = [f"t{i:02d}\t-\t" + " ".join(f"{w}_{tags[w]}" for w in d) for i, d in enumerate(docs)]
    (OUT / "pmi_toy.tsv").write_text("\n".join(lines) + "\n")

    def occ(doc, q):
        return [i for i in range(len(doc) - len(q) + 1) if doc[i:i + len(q)] == q]

    def near(a, b):
        n = 0
        for doc in docs:
            if any(abs(p - q) <= 10 and (p + len(a) <= q or q + len(b) <= p)
                   for p in occ(doc, a) for q in occ(doc, b)):
                n += 1
        return n

    hp = sum(1 for d in docs if "excellent" in d)
    hn = sum(1 for d in docs if "poor" in d)
    so = {}
    for ph in (("clever", "plot"), ("dull", "script"), ("fine", "cast"), ("nice", "score")):
        np_, nn_ = near(list(ph), ["excellent"]), near(list(ph), ["poor"])
        v = math.log2(((np_ or 0.01) * hn) / ((nn_ or 0.01) * hp))
        so[ph] = v
        print("pmi_so", " ".join(ph), np_, nn_, hp, hn, repr(v))

    reviews = [
        ("r01", "POS", "a clever plot"), ("r02", "NEG", "a dull script"),
        ("r03", "POS", "clever plot but dull script"), ("r04", "NEG", "fine cast and dull script"),
        ("r05", "POS", "fine cast"), ("r06", "NEG", "nothing to see"),
        ("r07", "POS", "nice score and fine cast"), ("r08", "NEG", "dull script dull script clever plot"),
        ("r09", "POS", "clever plot clever plot dull script"), ("r10", "NEG", "nice score"),
    ]
    rtags = dict(tags, a="DT", but="CC", **{"and": "CC"}, nothing="NN", to="TO", see="VB")
    out = []
    for rid, lab, text in reviews:
        ws = text.split()
        out.append(f"{rid}\t{lab}\t" + " ".join(f"{w}_{rtags[w]}" for w in ws))
        found = []
        for i in range(len(ws) - 1):
            t1, t2 = rtags[ws[i]], rtags[ws[i + 1]]
            t3 = rtags[ws[i + 2]] if i + 2 < len(ws) else None
            if t1 == "JJ" and t2 in ("NN", "NNS"):
                found.append(so[(ws[i], ws[i + 1])])
            elif t1 == "NN" and t2 in ("VB", "VBD") and t3 not in ("NN", "NNS"):
                raise SystemExit("unexpected rule-4 phrase in " + rid)
        mean = sum(found) / len(found) if found else 0.0
        print("pmi_review", rid, "NEG" if mean < 0 else "POS", len(found), repr(mean))
    (OUT / "pmi_reviews10.tsv").write_text("\n".join(out) + "\n")


def eval_fixture():
    lex = {"good": 0.6, "great": 0.9, "fine": 0.1, "bad": -0.7, "awful": -1.1, "dull": -0.3, "the": 0.02,
           "plot": -0.05}
    (OUT / "eval_lexicon.tsv").write_text("# embedding=fixture mode=unsup seed=excellent\n"
                                         + "".join(f"{w}\t{s}\n" for w, s in lex.items()))
    rng = random.Random(23)
    vocab = list(lex) + ["movie", "film", "zzz"]
    out, tally = [], {"correct": 0, "undecided": 0, "conf": [[0, 0], [0, 0]]}
    for i in range(20):
        n = rng.randint(1, 6)
        ws = [rng.choice(vocab) for _ in range(n)]
        if i == 7:
            ws = ["movie", "zzz"]
        gold = rng.choice(["POS", "NEG"])
        out.append(f"e{i:02d}\t{gold}\t" + " ".join(f"{w}_NN" for w in ws))
        scores = [lex[w] for w in ws if w in lex]
        mean = sum(scores) / len(scores) if scores else 0.0
        pred = "NEG" if mean < 0 else "POS"
        tally["correct"] += pred == gold
        tally["undecided"] += not scores
        tally["conf"][gold == "NEG"][pred == "NEG"] += 1
    (OUT / "eval_reviews20.tsv").write_text("\n".join(out) + "\n")
    print("eval", tally, repr(tally["correct"] / 20))


def duplicate_lexicon():
    rng = random.Random(29)
    words = [f"lw{i:03d}" for i in range(450)]
    lines = ["# word\tscore"]
    for i in range(500):
        w = words[i] if i < 450 else rng.choice(words[:450])
        lines.append(f"{w}\t{round(rng.uniform(-1, 1), 4)}")
    (OUT / "lexicon500.tsv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    phrases_fixture()
    variance_fixture()
    pearson_fixture()
    partition_fixture()
    vectors_fixture()
    near_fixture()
    pmi_fixture()
    eval_fixture()
    duplicate_lexicon()
