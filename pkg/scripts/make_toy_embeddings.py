"""Regenerate data/toy_embeddings.txt from the toy corpus.

Vectors are seeded uniform draws in (0, 1), so cosine similarities stay
strictly positive and both similarity transforms are well defined. One
token ("addendum") is intentionally left out of vocabulary to exercise
OOV handling downstream.
"""
from pathlib import Path

import numpy as np

from cliquedist import load_concept_lexicon, load_corpus

ROOT = Path(__file__).resolve().parents[1]
DIM = 8
OOV = {"addendum"}

lexicon = load_concept_lexicon(ROOT / "data" / "toy_lexicon.tsv")
corpus = load_corpus(ROOT / "data" / "toy_corpus", lexicon)
vocab = sorted({t for doc in corpus.documents for t in doc.tokens()} - OOV)

rng = np.random.Generator(np.random.PCG64(20240915))
lines = [f"{len(vocab)} {DIM}"]
for word in vocab:
    vec = rng.uniform(0.05, 1.0, DIM)
    lines.append(word + " " + " ".join(f"{x:.6f}" for x in vec))

out = ROOT / "data" / "toy_embeddings.txt"
out.write_text("\n".join(lines) + "\n", encoding="utf-8")
print(f"wrote {out} ({len(vocab)} words, dim {DIM})")
