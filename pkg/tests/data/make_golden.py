"""Regenerate the 1k-block M2 and TSV golden files.

Writes the raw text directly (no gecsynth writer involved) in canonical form:
single spaces, ``\\n`` endings, a blank line after every M2 block.

    python tests/data/make_golden.py
"""

import random
from pathlib import Path

HERE = Path(__file__).parent
WORDS = ("the a an of to in for on with at by from cat dog house run runs ran walk walked "
         "good better best he she they it is are was were be been advice advices follow "
         "follows followed student students travel here there miles hundreds get got "
         "é naïve Zürich 東京 , . ! ? ' \"").split()
TYPES = ["R:DET", "M:DET", "U:DET", "R:VERB:SVA", "R:NOUN:NUM", "M:PREP", "U:PREP", "R:PREP",
         "R:SPELL", "R:ORTH", "R:WO", "M:PUNCT", "U:PUNCT", "R:ADJ", "R:ADV", "R:OTHER", "UNK"]


def m2_block(rng: random.Random) -> str:
    n = rng.randint(1, 14)
    src = [rng.choice(WORDS) for _ in range(n)]
    lines = ["S " + " ".join(src)]
    for ann in range(rng.choice([1, 1, 1, 2, 3])):
        cuts = sorted(rng.sample(range(n + 1), k=min(n + 1, 2 * rng.randint(0, 3))))
        spans = list(zip(cuts[::2], cuts[1::2]))
        if rng.random() < 0.3:
            spans.append((rng.randint(0, n), None))  # zero-width insertion
        edits = []
        for a, b in spans:
            if b is None:
                b = a
                if any(x < a < y for x, y in edits):
                    continue
            kind = rng.random()
            if a == b:
                corr, typ = rng.choice(WORDS), rng.choice(["M:DET", "M:PREP", "M:PUNCT"])
            elif kind < 0.25:
                corr, typ = "", rng.choice(["U:DET", "U:PREP", "U:PUNCT"])
            else:
                corr = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 2)))
                typ = rng.choice(TYPES)
            edits.append((a, b))
            lines.append(f"A {a} {b}|||{typ}|||{corr}|||REQUIRED|||-NONE-|||{ann}")
        if not edits:
            lines.append(f"A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||{ann}")
    return "\n".join(lines) + "\n\n"


def tsv_line(rng: random.Random) -> str:
    src = " ".join(rng.choice(WORDS) for _ in range(rng.randint(0, 14)))
    tgt = " ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 14)))
    return f"{src}\t{tgt}\n"


def main() -> None:
    rng = random.Random(20201)
    (HERE / "golden_1k.m2").write_text("".join(m2_block(rng) for _ in range(1000)),
                                       encoding="utf-8", newline="\n")
    (HERE / "golden_1k.tsv").write_text("".join(tsv_line(rng) for _ in range(1000)),
                                        encoding="utf-8", newline="\n")


if __name__ == "__main__":
    main()
