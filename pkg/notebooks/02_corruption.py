# ---
# jupyter:
#   jupytext:
#     formats: ipynb,py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
#       format_version: '1.3'
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Rule-based corruption
#
# Every token of a clean sentence is corrupted independently with probability
# `e`. A corrupted token is deleted (M), gets a random token inserted to its
# left (U), or is replaced (R), chosen by the configured weights. Punctuation
# is only ever replaced by other punctuation.
#
# Randomness comes from a counter-based generator keyed on
# (seed, line, position), so the output does not depend on batching or the
# number of worker processes.

# %%
import numpy as np

from gecsynth import CorruptionConfig, Corruptor, build_vocab, corpus_error_rate

rng = np.random.default_rng(0)
words = [f"w{i}" for i in range(2000)]
zipf = rng.zipf(1.2, size=200_000) % len(words)
sentences = [[words[j] for j in zipf[i:i + 20]] + ["."] for i in range(0, len(zipf), 20)]
vocab = build_vocab(sentences)
len(sentences), len(vocab)

# %%
corruptor = Corruptor(vocab, CorruptionConfig(0.3, seed=7))
records = list(corruptor.corrupt_corpus(sentences))
rec = records[0]
print(" ".join(rec.source))
print(" ".join(rec.target))
rec.applied_ops[:3]

# %% [markdown]
# The number of applied operations per token tracks `e` closely. The measured
# error rate sits a little lower, because neighbouring operations can combine
# into a shorter edit (a deletion next to an insertion is one replacement).

# %%
for e in (0.1, 0.3, 0.5):
    c = Corruptor(vocab, CorruptionConfig(e, seed=1))
    recs = list(c.corrupt_corpus(sentences))
    ops = sum(len(r.applied_ops) for r in recs)
    toks = sum(len(r.target) for r in recs)
    print(f"e={e}: ops/token {ops / toks:.4f}, corpus rate {corpus_error_rate(r.pair for r in recs):.4f}")

# %% [markdown]
# Operation weights control the M:U:R mix of applied operations.

# %%
c = Corruptor(vocab, CorruptionConfig(0.3, p_m=4, p_u=6, p_r=1, seed=2))
kinds = [op.coarse.value for r in c.corrupt_corpus(sentences) for op in r.applied_ops]
{k: round(kinds.count(k) / len(kinds), 3) for k in "MUR"}
