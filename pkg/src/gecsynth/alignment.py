"""Token-level edit distance, edit scripts and error-rate metrics.

Token equality is exact, case-sensitive comparison. Any hashable tokens work
(plain strings or :class:`~gecsynth.text_core.Token`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence


class Coarse(str, enum.Enum):
    MISSING = "M"
    UNNECESSARY = "U"
    REPLACEMENT = "R"

    def __str__(self):
        return self.value


COARSE_CODES = ("M", "U", "R")


class EditOp(NamedTuple):
    """One unit edit turning the errorful source into the correction.

    For ``M`` the source position is the insertion point; for ``U`` and ``R``
    it indexes the offending source token. ``tgt_pos`` is the matching
    position in the target (for ``U``, the target index the deletion sits
    before). Use :meth:`make` to build one from untrusted values.
    """

    coarse: Coarse
    src_pos: int
    tgt_pos: int
    src_text: str | None = None
    tgt_text: str | None = None
    fine_type: str | None = None

    @classmethod
    def make(cls, coarse, src_pos, tgt_pos, src_text=None, tgt_text=None, fine_type=None) -> "EditOp":
        op = cls(Coarse(coarse), int(src_pos), int(tgt_pos), src_text, tgt_text, fine_type)
        op.validate()
        return op

    def validate(self) -> None:
        c = self.coarse
        if c is Coarse.MISSING and (self.src_text is not None or self.tgt_text is None):
            raise ValueError("Missing edit needs tgt_text only")
        if c is Coarse.UNNECESSARY and (self.src_text is None or self.tgt_text is not None):
            raise ValueError("Unnecessary edit needs src_text only")
        if c is Coarse.REPLACEMENT and (
            self.src_text is None or self.tgt_text is None or self.src_text == self.tgt_text
        ):
            raise ValueError("Replacement edit needs two different texts")
        if self.src_pos < 0 or self.tgt_pos < 0:
            raise ValueError("negative edit position")

    def to_dict(self) -> dict:
        d = {"type": self.coarse.value, "src_pos": self.src_pos, "tgt_pos": self.tgt_pos}
        if self.src_text is not None:
            d["src"] = self.src_text
        if self.tgt_text is not None:
            d["tgt"] = self.tgt_text
        if self.fine_type is not None:
            d["fine_type"] = self.fine_type
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EditOp":
        return cls.make(d["type"], d["src_pos"], d["tgt_pos"], d.get("src"), d.get("tgt"),
                        d.get("fine_type"))


@dataclass(frozen=True, slots=True)
class PairMetrics:
    distance: int
    target_len: int

    @property
    def error_rate(self) -> float:
        return self.distance / self.target_len

    @property
    def exact_rate(self) -> Fraction:
        return Fraction(self.distance, self.target_len)


def levenshtein(source: Sequence, target: Sequence) -> int:
    """Unit-cost token edit distance.

    Bit-parallel (Myers/Hyyrö) over Python integers, so there is no length
    limit; one column update per target token.
    """
    m = len(source)
    if m == 0:
        return len(target)
    if len(target) == 0:
        return m
    peq: dict = {}
    for i, tok in enumerate(source):
        peq[tok] = peq.get(tok, 0) | (1 << i)
    full = (1 << m) - 1
    top = 1 << (m - 1)
    pv, mv, score = full, 0, m
    for tok in target:
        eq = peq.get(tok, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | (~(xh | pv) & full)
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        ph = ((ph << 1) | 1) & full
        mh = (mh << 1) & full
        pv = mh | (~(xv | ph) & full)
        mv = ph & xv
    return score


def distance_matrix(source: Sequence, target: Sequence) -> list[list[int]]:
    """Full ``(len(source)+1) x (len(target)+1)`` Levenshtein table."""
    n = len(target)
    rows = [list(range(n + 1))]
    for i, s in enumerate(source, 1):
        prev = rows[-1]
        row = [i] + [0] * n
        for j in range(1, n + 1):
            cost = prev[j - 1] + (s != target[j - 1])
            if prev[j] + 1 < cost:
                cost = prev[j] + 1
            if row[j - 1] + 1 < cost:
                cost = row[j - 1] + 1
            row[j] = cost
        rows.append(row)
    return rows


def align(source: Sequence, target: Sequence) -> list[EditOp]:
    """Minimal edit script from ``source`` to ``target``.

    Backtraces from the bottom-right corner preferring
    match > replacement > missing > unnecessary, then returns the ops in
    left-to-right order.
    """
    d = distance_matrix(source, target)
    i, j = len(source), len(target)
    ops: list[EditOp] = []
    while i or j:
        here = d[i][j]
        if i and j:
            s, t = source[i - 1], target[j - 1]
            diag = d[i - 1][j - 1]
            if s == t and here == diag:
                i, j = i - 1, j - 1
                continue
            if here == diag + 1:
                ops.append(EditOp(Coarse.REPLACEMENT, i - 1, j - 1, str(s), str(t)))
                i, j = i - 1, j - 1
                continue
        if j and here == d[i][j - 1] + 1:
            ops.append(EditOp(Coarse.MISSING, i, j - 1, None, str(target[j - 1])))
            j -= 1
        else:
            ops.append(EditOp(Coarse.UNNECESSARY, i - 1, j, str(source[i - 1]), None))
            i -= 1
    ops.reverse()
    return ops


def replay(source: Sequence, ops: Iterable[EditOp]) -> list[str]:
    """Apply an ordered edit script to ``source`` and return the result."""
    out = [str(t) for t in source]
    for op in reversed(list(ops)):
        if op.coarse is Coarse.UNNECESSARY:
            if out[op.src_pos] != op.src_text:
                raise ValueError(f"edit {op} does not match source")
            del out[op.src_pos]
        elif op.coarse is Coarse.MISSING:
            out.insert(op.src_pos, op.tgt_text)
        else:
            if out[op.src_pos] != op.src_text:
                raise ValueError(f"edit {op} does not match source")
            out[op.src_pos] = op.tgt_text
    return out


def pair_metrics(pair) -> PairMetrics:
    """Distance and correction length for one (source, target) pair."""
    source, target = pair[0], pair[1]
    if len(target) == 0:
        raise ValueError("zero-length correction")
    return PairMetrics(levenshtein(source, target), len(target))


class RateAccumulator:
    """Running integer sums for the corpus error rate; merge is associative."""

    __slots__ = ("distance", "length", "pairs")

    def __init__(self, distance: int = 0, length: int = 0, pairs: int = 0):
        self.distance = distance
        self.length = length
        self.pairs = pairs

    def add(self, metrics: PairMetrics) -> None:
        self.distance += metrics.distance
        self.length += metrics.target_len
        self.pairs += 1

    def merge(self, other: "RateAccumulator") -> "RateAccumulator":
        return RateAccumulator(self.distance + other.distance, self.length + other.length,
                               self.pairs + other.pairs)

    @property
    def exact_rate(self) -> Fraction:
        if self.pairs == 0:
            raise ValueError("error rate of an empty corpus")
        return Fraction(self.distance, self.length)

    @property
    def rate(self) -> float:
        return float(self.exact_rate)


def corpus_error_rate(pairs: Iterable) -> float:
    """Sum of token distances over sum of correction lengths."""
    acc = RateAccumulator()
    for pair in pairs:
        acc.add(pair_metrics(pair))
    return acc.rate


def coarse_counts(ops: Iterable[EditOp]) -> dict[str, int]:
    counts = dict.fromkeys(COARSE_CODES, 0)
    for op in ops:
        counts[op.coarse.value] += 1
    return counts


def coarse_type_counts(pairs: Iterable) -> dict[str, int]:
    """Tally of M/U/R edits over aligned pairs."""
    total = dict.fromkeys(COARSE_CODES, 0)
    for pair in pairs:
        for k, v in coarse_counts(align(pair[0], pair[1])).items():
            total[k] += v
    return total
