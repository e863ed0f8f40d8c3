"""Streaming readers and writers: plain text, parallel TSV, vocabulary files and M2.

All readers decode UTF-8 strictly, accept ``\\r\\n`` line endings, and report
the 1-based line number of any malformed input. Writers always emit ``\\n``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple

from .text_core import SentencePair, Vocabulary


class CorpusFormatError(ValueError):
    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


def _lines(path) -> Iterator[tuple[int, str]]:
    """Yield ``(line_number, text)`` with the line terminator removed."""
    with open(path, "rb") as fh:
        for no, raw in enumerate(fh, 1):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CorpusFormatError(f"invalid UTF-8 ({exc.reason})", path, no) from None
            if text.endswith("\n"):
                text = text[:-1]
                if text.endswith("\r"):
                    text = text[:-1]
            yield no, text


def _open_write(path) -> IO[str]:
    return open(path, "w", encoding="utf-8", newline="\n")


# -- plain text -------------------------------------------------------------

def read_plain(path) -> Iterator[tuple[str, ...]]:
    """One tokenized sentence per line; blank lines yield empty tuples."""
    for _, text in _lines(path):
        yield tuple(text.split())


def write_plain(sentences: Iterable, path) -> int:
    n = 0
    with _open_write(path) as fh:
        for toks in sentences:
            fh.write(_join(toks, path) + "\n")
            n += 1
    return n


# -- parallel TSV -----------------------------------------------------------

def _join(tokens, path=None) -> str:
    for t in tokens:
        t = str(t)
        if "\t" in t:
            raise CorpusFormatError("tab in token", path)
        if not t or "\n" in t or any(ch.isspace() for ch in t):
            raise CorpusFormatError(f"token {t!r} is empty or contains whitespace", path)
    return " ".join(str(t) for t in tokens)


def read_parallel_tsv(path) -> Iterator[SentencePair]:
    """``source<TAB>target`` per line, split on the first tab."""
    for no, text in _lines(path):
        src, tab, tgt = text.partition("\t")
        if not tab:
            raise CorpusFormatError("line has no tab separator", path, no)
        yield SentencePair(tuple(src.split()), tuple(tgt.split()))


def format_tsv_line(pair, path=None) -> str:
    return f"{_join(pair[0], path)}\t{_join(pair[1], path)}\n"


def write_parallel_tsv(pairs: Iterable, path) -> int:
    n = 0
    with _open_write(path) as fh:
        for pair in pairs:
            fh.write(format_tsv_line(pair, path))
            n += 1
    return n


# -- vocabulary -------------------------------------------------------------

def read_vocab(path) -> Vocabulary:
    counts: dict[str, int] = {}
    for no, text in _lines(path):
        if not text:
            continue
        tok, tab, cnt = text.partition("\t")
        if not tab or not tok or not cnt.isdigit():
            raise CorpusFormatError("expected 'token<TAB>count'", path, no)
        if tok in counts:
            raise CorpusFormatError(f"duplicate vocabulary entry {tok!r}", path, no)
        counts[tok] = int(cnt)
    try:
        return Vocabulary.from_counts(counts)
    except ValueError as exc:
        raise CorpusFormatError(str(exc), path) from None


def write_vocab(vocab: Vocabulary, path) -> int:
    with _open_write(path) as fh:
        for tok, cnt in zip(vocab.entries, vocab.counts):
            fh.write(f"{tok}\t{cnt}\n")
    return len(vocab)


# -- M2 ---------------------------------------------------------------------

NONE_CORRECTION = "-NONE-"


class M2Edit(NamedTuple):
    start: int
    end: int
    type: str
    correction: str
    required: str = "REQUIRED"
    comment: str = "-NONE-"
    annotator: int = 0

    @property
    def is_noop(self) -> bool:
        return self.type == "noop" or (self.start == -1 and self.end == -1)

    @property
    def tokens(self) -> list[str]:
        if self.correction in ("", NONE_CORRECTION):
            return []
        return self.correction.split()

    def to_line(self) -> str:
        return (f"A {self.start} {self.end}|||{self.type}|||{self.correction}|||"
                f"{self.required}|||{self.comment}|||{self.annotator}")


@dataclass(frozen=True)
class M2Entry:
    """One M2 block: a source sentence and every annotator's edits."""

    source: tuple[str, ...]
    edits: tuple[M2Edit, ...] = ()

    def annotator_edits(self, annotator: int = 0) -> tuple[M2Edit, ...]:
        return tuple(e for e in self.edits if e.annotator == annotator and not e.is_noop)

    def annotators(self) -> list[int]:
        return sorted({e.annotator for e in self.edits})

    def target(self, annotator: int = 0) -> tuple[str, ...]:
        return apply_edits(self.source, self.annotator_edits(annotator))

    def to_pair(self, annotator: int = 0) -> SentencePair:
        return SentencePair(self.source, self.target(annotator), self.annotator_edits(annotator))

    def to_block(self) -> str:
        lines = ["S " + " ".join(self.source) if self.source else "S"]
        lines.extend(e.to_line() for e in self.edits)
        return "\n".join(lines) + "\n"


def _ordered_checked(source, edits) -> list[M2Edit]:
    n = len(source)
    ordered = sorted(edits, key=lambda e: (e.start, e.end))
    for e in ordered:
        if not 0 <= e.start <= e.end <= n:
            raise ValueError(f"edit span ({e.start},{e.end}) out of range for {n} tokens")
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end:
            raise ValueError(f"overlapping edits ({a.start},{a.end}) and ({b.start},{b.end})")
    return ordered


def apply_edits(source, edits) -> tuple[str, ...]:
    """Reconstruct the corrected sentence, applying edits right to left."""
    out = list(source)
    for e in reversed(_ordered_checked(source, edits)):
        out[e.start:e.end] = e.tokens
    return tuple(out)


def apply_edits_forward(source, edits) -> tuple[str, ...]:
    """Left-to-right reconstruction with a running offset; agrees with :func:`apply_edits`."""
    out = list(source)
    offset = 0
    for e in _ordered_checked(source, edits):
        new = e.tokens
        out[e.start + offset:e.end + offset] = new
        offset += len(new) - (e.end - e.start)
    return tuple(out)


def _parse_edit(line: str, path, no: int) -> M2Edit:
    fields = line[2:].split("|||")
    if len(fields) != 6:
        raise CorpusFormatError("edit line needs 6 '|||' separated fields", path, no)
    span = fields[0].split()
    try:
        start, end = int(span[0]), int(span[1])
        annotator = int(fields[5])
    except (ValueError, IndexError):
        raise CorpusFormatError("malformed edit span or annotator id", path, no) from None
    if len(span) != 2:
        raise CorpusFormatError("malformed edit span", path, no)
    return M2Edit(start, end, fields[1], fields[2], fields[3], fields[4], annotator)


def read_m2(path) -> Iterator[M2Entry]:
    """Stream M2 blocks; spans are validated against the source length."""
    source = None
    edits: list[M2Edit] = []
    first_line = 0

    def finish():
        entry = M2Entry(source, tuple(edits))
        for ann in entry.annotators():
            try:
                entry.target(ann)
            except ValueError as exc:
                raise CorpusFormatError(str(exc), path, first_line) from None
        return entry

    for no, text in _lines(path):
        if not text.strip():
            if source is not None:
                yield finish()
                source, edits = None, []
            continue
        if text == "S" or text.startswith("S "):
            if source is not None:
                raise CorpusFormatError("new 'S' line before blank separator", path, no)
            source = tuple(text[2:].split())
            edits = []
            first_line = no
        elif text.startswith("A "):
            if source is None:
                raise CorpusFormatError("edit line outside a block", path, no)
            e = _parse_edit(text, path, no)
            if not e.is_noop and not 0 <= e.start <= e.end <= len(source):
                raise CorpusFormatError(
                    f"edit span ({e.start},{e.end}) out of range for {len(source)} tokens", path, no)
            edits.append(e)
        else:
            raise CorpusFormatError("expected 'S ' or 'A ' line", path, no)
    if source is not None:
        yield finish()


def read_m2_pairs(path, annotator: int = 0) -> Iterator[SentencePair]:
    for entry in read_m2(path):
        yield entry.to_pair(annotator)


def write_m2(entries: Iterable[M2Entry], path) -> int:
    n = 0
    with _open_write(path) as fh:
        for entry in entries:
            fh.write(entry.to_block() + "\n")
            n += 1
    return n


# -- JSON lines sidecar -----------------------------------------------------

def write_ops_jsonl(records: Iterable, fh: IO[str]) -> None:
    for rec in records:
        fh.write(json.dumps({"line": rec.line_index,
                             "ops": [op.to_dict() for op in rec.applied_ops]},
                            ensure_ascii=False) + "\n")


def detect_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".m2":
        return "m2"
    return "tsv"
