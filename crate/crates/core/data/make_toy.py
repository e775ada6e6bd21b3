#!/usr/bin/env python3
"""Regenerates the toy corpora from a fixed template grammar.

    python3 make_toy.py   # writes toy{6,20,110}.{tsv,gold} and toy_test.*
"""
import random
from pathlib import Path

DT = ["the", "a", "this"]
JJ = ["old", "small", "red", "quiet", "local"]
NN = ["guard", "camp", "dog", "river", "report", "city", "court", "judge"]
NNP = ["Mary", "Smith", "Boston", "Ivan", "Acme"]
PRP = ["he", "she", "they"]
CD = ["two", "91", "three"]
VBD = ["died", "slept", "ran", "said", "left", "won"]
IN = ["at", "in", "near", "after"]
RB = ["here", "today", "again"]


def noun_phrase(r):
    kind = r.choices(["dt", "nnp", "prp", "cd"], [6, 3, 1, 1])[0]
    if kind == "prp":
        return [(r.choice(PRP), "PRP")]
    if kind == "cd":
        return [(r.choice(CD), "CD"), (r.choice(NN), "NN")]
    if kind == "nnp":
        return [(r.choice(NNP), "NNP") for _ in range(r.choice([1, 1, 2]))]
    np = [(r.choice(DT), "DT")]
    if r.random() < 0.4:
        np.append((r.choice(JJ), "JJ"))
    np += [(r.choice(NN), "NN") for _ in range(r.choice([1, 1, 2]))]
    return np


def sentence(r):
    subject = noun_phrase(r)
    if len(subject) == 2 and subject[0][1] == "NNP" and r.random() < 0.3:
        # two names in a row are sometimes two phrases
        chunks = [("NP", subject[:1]), ("NP", subject[1:])]
    else:
        chunks = [("NP", subject)]
    chunks.append(("VP", [(r.choice(VBD), "VBD")]))
    if r.random() < 0.2:
        chunks.append(("ADVP", [(r.choice(RB), "RB")]))
    if r.random() < 0.6:
        chunks.append(("PP", [(r.choice(IN), "IN")] + noun_phrase(r)))
    if r.random() < 0.15:
        chunks.append(("ADVP", [(r.choice(RB), "RB")]))
    return chunks


def heads(chunks):
    """Shallow dependency tree: chunk heads attach to the verb."""
    rows, verb = [], None
    idx = 0
    spans = []
    for label, toks in chunks:
        spans.append((label, idx + 1, idx + len(toks)))
        idx += len(toks)
    for label, lo, hi in spans:
        if label == "VP":
            verb = lo
    for label, lo, hi in spans:
        for i in range(lo, hi + 1):
            if label == "VP":
                rows.append((0, "ROOT"))
            elif label == "PP" and i == lo:
                rows.append((verb, "ADV"))
            elif label == "PP":
                rows.append((lo, "PMOD") if i == hi else (hi, "NMOD"))
            elif label == "ADVP":
                rows.append((verb, "ADV"))
            elif i == hi:
                rows.append((verb, "SBJ"))
            else:
                rows.append((hi, "NMOD"))
    return rows


def write(name, seed, n):
    r = random.Random(seed)
    tsv, gold = [], []
    for k in range(n):
        chunks = sentence(r)
        toks = [t for _, c in chunks for t in c]
        for i, ((w, tag), (h, rel)) in enumerate(zip(toks, heads(chunks)), 1):
            tsv.append(f"{name}-{k + 1}\t{i}\t{w}\t{tag}\t{h}:{rel}")
        tsv.append("")
        gold.append(" ".join("[ " + " ".join(w for w, _ in c) + " ]" for _, c in chunks))
    here = Path(__file__).parent
    (here / f"{name}.tsv").write_text("\n".join(tsv))
    (here / f"{name}.gold").write_text("\n".join(gold) + "\n")


if __name__ == "__main__":
    write("toy6", 6, 6)
    write("toy20", 20, 20)
    write("toy110", 110, 110)
    write("toy_test", 7, 30)
