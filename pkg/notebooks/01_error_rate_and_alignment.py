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
# # Error rate and edit alignment
#
# The error rate of a parallel corpus is the token-level Levenshtein distance
# summed over all pairs, divided by the summed length of the corrected side.
# Each unit of distance is one edit: M (a token is missing from the source),
# U (an unnecessary source token) or R (a replaced token).

# %%
from gecsynth import align, corpus_error_rate, levenshtein, pair_metrics, replay

src = "I follows his advices".split()
tgt = "I followed his advice".split()
levenshtein(src, tgt)

# %%
ops = align(src, tgt)
for op in ops:
    print(op)

# %% [markdown]
# Replaying the script on the source gives back the target, and the number of
# ops always equals the distance.

# %%
assert replay(src, ops) == tgt
pair_metrics((src, tgt))

# %%
pairs = [
    (src, tgt),
    ("the cat sat".split(), "the cat sat on the mat .".split()),
]
corpus_error_rate(pairs)

# %% [markdown]
# Note that the corpus rate is a ratio of sums, not a mean of per-pair rates.
# Two edits over four tokens plus four over seven gives 6 / 11.
