"""Tokens, punctuation, vocabularies and pair-level cleaning."""

from __future__ import annotations

import enum
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

DEFAULT_PUNCTUATION: tuple[str, ...] = ("'", '"', ",", ".", "!", "?")


class TokenKind(enum.Enum):
    WORD = "Word"
    PUNCT = "Punct"


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    kind: TokenKind = TokenKind.WORD

    def __post_init__(self):
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"invalid token {self.text!r}")

    def __str__(self):
        return self.text


class PunctuationSet:
    """Ordered set of punctuation tokens that may only be replaced by each other."""

    def __init__(self, members: Iterable[str] = DEFAULT_PUNCTUATION):
        seen: dict[str, None] = {}
        for m in members:
            if not m or any(ch.isspace() for ch in m):
                raise ValueError(f"punctuation member {m!r} is not a single token")
            seen[m] = None
        if not seen:
            raise ValueError("punctuation set must be non-empty")
        self.members: tuple[str, ...] = tuple(seen)
        self._set = frozenset(self.members)

    @classmethod
    def parse(cls, spec: str) -> "PunctuationSet":
        """Build from a whitespace-separated list, e.g. ``"' \\" , . ! ?"``."""
        return cls(spec.split())

    def __contains__(self, text) -> bool:
        return str(text) in self._set

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        return isinstance(other, PunctuationSet) and self.members == other.members

    def __hash__(self):
        return hash(self.members)

    def __repr__(self):
        return f"PunctuationSet({list(self.members)!r})"

    def others(self, text: str) -> tuple[str, ...]:
        return tuple(m for m in self.members if m != text)


DEFAULT_PUNCT_SET = PunctuationSet()


class SentencePair(NamedTuple):
    """Errorful ``source`` and corrected ``target`` token sequences.

    ``edits`` carries M2 annotations when the pair was read from an M2 file,
    otherwise it is ``None``.
    """

    source: tuple[str, ...]
    target: tuple[str, ...]
    edits: tuple | None = None


def split_tokens(line: str) -> list[str]:
    return line.split()


def tokenize(line: str, punctuation: PunctuationSet = DEFAULT_PUNCT_SET) -> list[Token]:
    """Split on whitespace runs and tag each unit as word or punctuation."""
    return [
        Token(t, TokenKind.PUNCT if t in punctuation else TokenKind.WORD)
        for t in line.split()
    ]


def detokenize(tokens: Iterable) -> str:
    return " ".join(str(t) for t in tokens)


@dataclass(frozen=True)
class Vocabulary:
    """Distinct tokens in lexicographic order with their corpus counts."""

    entries: tuple[str, ...]
    counts: tuple[int, ...]
    _index: dict = field(init=False, repr=False, compare=False)
    _cumulative: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.entries) != len(self.counts):
            raise ValueError("entries and counts differ in length")
        if not self.entries:
            raise ValueError("empty vocabulary")
        if any(c < 1 for c in self.counts):
            raise ValueError("vocabulary counts must be >= 1")
        if any(a >= b for a, b in zip(self.entries, self.entries[1:])):
            raise ValueError("vocabulary entries must be distinct and sorted")
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(self.entries)})
        object.__setattr__(self, "_cumulative", np.cumsum(np.asarray(self.counts, dtype=np.int64)))

    @classmethod
    def from_counts(cls, counts: dict[str, int]) -> "Vocabulary":
        items = sorted((k, v) for k, v in counts.items() if v > 0)
        return cls(tuple(k for k, _ in items), tuple(v for _, v in items))

    def __len__(self):
        return len(self.entries)

    def __contains__(self, token) -> bool:
        return str(token) in self._index

    def index(self, token: str) -> int | None:
        return self._index.get(token)

    def count(self, token: str) -> int:
        i = self._index.get(token)
        return 0 if i is None else self.counts[i]

    @property
    def total(self) -> int:
        return int(self._cumulative[-1])

    @property
    def cumulative(self) -> np.ndarray:
        return self._cumulative

    def as_counter(self) -> Counter:
        return Counter(dict(zip(self.entries, self.counts)))

    def merge(self, other: "Vocabulary") -> "Vocabulary":
        return Vocabulary.from_counts(self.as_counter() + other.as_counter())


def count_tokens(stream: Iterable) -> Counter:
    counts: Counter = Counter()
    counts.update(str(t) for t in stream)
    return counts


def build_vocab(corpora: Sequence[Iterable]) -> Vocabulary:
    """Union of distinct tokens over all streams, with summed counts."""
    if len(corpora) == 0:
        raise ValueError("build_vocab needs at least one stream")
    total: Counter = Counter()
    for stream in corpora:
        total.update(count_tokens(stream))
    if not total:
        raise ValueError("empty vocabulary")
    return Vocabulary.from_counts(total)


# -- pair cleaning ----------------------------------------------------------

URL_RE = re.compile(r"(?:https?://|www\.)", re.IGNORECASE)
EMOJI_RANGES: tuple[tuple[int, int], ...] = ((0x1F300, 0x1FAFF), (0x2600, 0x27BF))
# U+FFFD is what broken decodes leave behind.
ILLEGAL_CHARS = frozenset("\ufffd")


class CleanDecision(NamedTuple):
    keep: bool
    reason: str | None = None


@dataclass(frozen=True)
class Cleaner:
    """Drop rules for labeled pairs: uncorrected, URL, emoji, illegal chars."""

    url_pattern: re.Pattern = URL_RE
    emoji_ranges: tuple[tuple[int, int], ...] = EMOJI_RANGES
    illegal_categories: frozenset = frozenset({"Cc", "Cf", "Cs", "Co", "Cn"})
    illegal_chars: frozenset = ILLEGAL_CHARS

    def is_emoji(self, ch: str) -> bool:
        cp = ord(ch)
        return any(lo <= cp <= hi for lo, hi in self.emoji_ranges)

    def is_illegal(self, ch: str) -> bool:
        return ch in self.illegal_chars or unicodedata.category(ch) in self.illegal_categories

    def token_reason(self, token: str) -> str | None:
        if self.url_pattern.search(token):
            return "url"
        if any(self.is_emoji(ch) for ch in token):
            return "emoji"
        if any(self.is_illegal(ch) for ch in token):
            return "illegal"
        return None

    def __call__(self, pair: SentencePair) -> CleanDecision:
        source = tuple(str(t) for t in pair.source)
        target = tuple(str(t) for t in pair.target)
        if source == target:
            return CleanDecision(False, "identical")
        for tok in source + target:
            reason = self.token_reason(tok)
            if reason:
                return CleanDecision(False, reason)
        return CleanDecision(True)


DEFAULT_CLEANER = Cleaner()


def clean_pair(pair: SentencePair, cleaner: Cleaner = DEFAULT_CLEANER) -> CleanDecision:
    """Keep/drop decision for one labeled pair."""
    return cleaner(pair)
