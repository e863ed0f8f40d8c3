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
# # M2 files and pair cleaning
#
# M2 blocks hold a tokenized source line and span edits per annotator. The
# reader keeps everything needed for a byte-identical rewrite.

# %%
import tempfile
from pathlib import Path

from gecsynth import read_m2, write_m2
from gecsynth.text_core import SentencePair, clean_pair

m2 = (
    "S I follows his advices\n"
    "A 1 2|||R:VERB:SVA|||followed|||REQUIRED|||-NONE-|||0\n"
    "A 3 4|||R:NOUN:NUM|||advice|||REQUIRED|||-NONE-|||0\n"
    "A 3 4|||R:NOUN:NUM|||counsel|||REQUIRED|||-NONE-|||1\n"
    "\n"
)
tmp = Path(tempfile.mkdtemp())
(tmp / "a.m2").write_text(m2)
(entry,) = read_m2(tmp / "a.m2")
entry.target(0), entry.target(1)

# %%
write_m2([entry], tmp / "b.m2")
(tmp / "b.m2").read_text() == m2

# %% [markdown]
# Cleaning drops pairs that are unusable for training: nothing was corrected,
# either side contains a URL or an emoji, or there are control, private-use or
# replacement characters.

# %%
examples = [
    ("a b c", "a b c"),
    ("see http://x.org", "see http://x.org ."),
    ("nice ❤", "nice ."),
    ("I has cat", "I have a cat"),
]
for s, t in examples:
    d = clean_pair(SentencePair(tuple(s.split()), tuple(t.split())))
    print(f"{s!r:24} keep={d.keep} {d.reason or ''}")
