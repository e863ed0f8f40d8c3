"""Rule-based corruption of grammatical text with a controlled error rate and M/U/R mix.

Each token of the original sentence is corrupted independently with
probability ``e_rate``. A corrupted token is deleted (Missing error),
gets a random vocabulary token inserted on its left (Unnecessary error), or is
replaced (Replacement error), with probabilities proportional to
``(p_m, p_u, p_r)``. Punctuation from the configured set is only ever replaced
by other punctuation from that set.

Randomness for token ``k`` of input line ``L`` is the Philox4x32-10 block at
counter ``(k, 0, L_lo, L_hi)`` under key ``(seed_lo, seed_hi)``:

* word 0 / 2**32 < e_rate decides whether the token is corrupted,
* word 1 / 2**32 picks the operation against the cumulative weights,
* words 2-3 form a 53-bit uniform used to sample the new token.
"""

from __future__ import annotations

import enum
from collections import Counter
from itertools import chain
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .alignment import Coarse, EditOp
from .parallel import chunked, ordered_map
from .rng import CounterRNG, seed_key, token_blocks, u32_to_unit, u64_to_unit
from .text_core import DEFAULT_PUNCT_SET, PunctuationSet, SentencePair, Vocabulary

BATCH_SIZE = 4096


class CorruptionError(ValueError):
    pass


class Sampling(str, enum.Enum):
    UNIFORM = "uniform"
    FREQUENCY = "frequency"


@dataclass(frozen=True)
class CorruptionConfig:
    e_rate: float
    p_m: float = 1.0
    p_u: float = 1.0
    p_r: float = 1.0
    seed: int = 0
    punctuation: PunctuationSet = DEFAULT_PUNCT_SET
    insertion_sampling: Sampling = Sampling.UNIFORM

    def __post_init__(self):
        if not 0.0 <= self.e_rate <= 1.0:
            raise CorruptionError("error rate must be in [0,1]")
        weights = (self.p_m, self.p_u, self.p_r)
        if any(w < 0 for w in weights) or sum(weights) <= 0:
            raise CorruptionError("ratio weights must be non-negative with a positive sum")
        seed_key(self.seed)
        object.__setattr__(self, "insertion_sampling", Sampling(self.insertion_sampling))

    @property
    def probabilities(self) -> tuple[float, float, float]:
        total = self.p_m + self.p_u + self.p_r
        return self.p_m / total, self.p_u / total, self.p_r / total

    @property
    def thresholds(self) -> tuple[float, float]:
        """Cumulative cut points: below the first deletes, below the second inserts."""
        total = self.p_m + self.p_u + self.p_r
        c_mu = 1.0 if self.p_r == 0 else (self.p_m + self.p_u) / total
        return self.p_m / total, c_mu

    def to_dict(self) -> dict:
        return {
            "e_rate": self.e_rate,
            "ratio": [self.p_m, self.p_u, self.p_r],
            "seed": self.seed,
            "punctuation": list(self.punctuation.members),
            "insertion_sampling": self.insertion_sampling.value,
        }


class CorruptionRecord(NamedTuple):
    pair: SentencePair
    applied_ops: tuple[EditOp, ...]
    line_index: int = 0

    @property
    def source(self):
        return self.pair.source

    @property
    def target(self):
        return self.pair.target


def pick_token(
    vocab: Vocabulary,
    u: float,
    exclude: str | None = None,
    punctuation: PunctuationSet | None = None,
    sampling: Sampling = Sampling.UNIFORM,
) -> str:
    """Map a uniform ``u`` in [0, 1) to a token.

    With ``punctuation`` the draw is uniform over that set minus ``exclude``.
    Otherwise it is over the vocabulary minus ``exclude``, uniform or by
    count. Exclusion is done by skipping the excluded slot, which gives the
    same distribution as redrawing until different without any retries.
    """
    if punctuation is not None:
        cands = punctuation.others(exclude) if exclude is not None else punctuation.members
        if not cands:
            raise CorruptionError(f"no punctuation other than {exclude!r} to replace it with")
        return cands[min(int(u * len(cands)), len(cands) - 1)]

    j = vocab.index(exclude) if exclude is not None else None
    if sampling is Sampling.UNIFORM:
        n = len(vocab) - (j is not None)
        if n <= 0:
            raise CorruptionError(f"vocabulary has no token other than {exclude!r}")
        idx = min(int(u * n), n - 1)
        if j is not None and idx >= j:
            idx += 1
        return vocab.entries[idx]

    cum = vocab.cumulative
    skip = vocab.counts[j] if j is not None else 0
    mass = vocab.total - skip
    if mass <= 0:
        raise CorruptionError(f"vocabulary has no token other than {exclude!r}")
    r = min(int(u * mass), mass - 1)
    if j is not None and r >= cum[j] - skip:
        r += skip
    return vocab.entries[int(np.searchsorted(cum, r, side="right"))]


def sample_token(
    vocab: Vocabulary,
    rng: CounterRNG,
    exclude: str | None = None,
    punctuation: PunctuationSet | None = None,
    sampling: Sampling = Sampling.UNIFORM,
) -> str:
    """Draw one token satisfying the constraint; advances ``rng``."""
    return pick_token(vocab, rng.uniform(), exclude, punctuation, Sampling(sampling))


@dataclass
class CorruptionStats:
    sentences: int = 0
    tokens: int = 0
    events: Counter = field(default_factory=Counter)
    empty_sources: int = 0

    def add(self, rec: CorruptionRecord) -> None:
        self.sentences += 1
        self.tokens += len(rec.pair.target)
        for op in rec.applied_ops:
            self.events[op.coarse.value] += 1
        if not rec.pair.source:
            self.empty_sources += 1

    @property
    def total_events(self) -> int:
        return sum(self.events.values())

    def to_dict(self) -> dict:
        n = self.total_events
        return {
            "sentences": self.sentences,
            "tokens": self.tokens,
            "events": n,
            "events_per_token": n / self.tokens if self.tokens else 0.0,
            "ops": {k: self.events.get(k, 0) for k in "MUR"},
            "empty_sources": self.empty_sources,
        }


class Corruptor:
    """Corrupts sentences against a fixed vocabulary and config."""

    def __init__(self, vocab: Vocabulary, config: CorruptionConfig):
        if vocab is None or len(vocab) == 0:
            raise CorruptionError("empty vocabulary")
        self.vocab = vocab
        self.config = config

    def corrupt_batch(self, batch: Sequence[tuple[int, Sequence]]) -> list[CorruptionRecord]:
        """Corrupt ``(line_index, tokens)`` items in one vectorised RNG call."""
        if not batch:
            return []
        cfg = self.config
        sents = [toks if type(toks) is tuple else tuple(map(str, toks)) for _, toks in batch]
        nsent = len(sents)
        lines = np.fromiter((i for i, _ in batch), dtype=np.uint64, count=nsent)
        lens = np.fromiter(map(len, sents), dtype=np.int64, count=nsent)
        if (lens == 0).any():
            bad = batch[int(np.flatnonzero(lens == 0)[0])][0]
            raise CorruptionError(f"line {bad + 1}: empty sentence")
        offsets = np.zeros(nsent + 1, dtype=np.int64)
        np.cumsum(lens, out=offsets[1:])
        sent_of = np.repeat(np.arange(nsent), lens)
        positions = np.arange(offsets[-1], dtype=np.int64) - offsets[sent_of]
        blocks = token_blocks(cfg.seed, lines[sent_of], positions)

        hit = np.flatnonzero(u32_to_unit(blocks[:, 0]) < cfg.e_rate)
        c_m, c_mu = cfg.thresholds
        u_op = u32_to_unit(blocks[hit, 1])
        kinds = np.where(u_op < c_m, 0, np.where(u_op < c_mu, 1, 2))
        u_pick = u64_to_unit(blocks[hit, 2], blocks[hit, 3])
        flat = np.empty(offsets[-1], dtype=object)
        flat[:] = list(chain.from_iterable(sents))
        hit_tokens = flat[hit].tolist()
        picks = self._vector_picks(hit_tokens, kinds, u_pick)

        # Output layout: each original token yields 0 (delete), 1 or 2 (insert) tokens.
        width = np.ones(offsets[-1], dtype=np.int64)
        width[hit] = np.choose(kinds, [0, 2, 1])
        start = np.cumsum(width) - width
        out_offsets = np.zeros(nsent + 1, dtype=np.int64)
        np.cumsum(np.add.reduceat(width, offsets[:-1]), out=out_offsets[1:])
        out = np.empty(int(out_offsets[-1]), dtype=object)
        kept = width > 0
        last = start + width - 1
        out[last[kept]] = flat[kept]
        picked = np.asarray(picks, dtype=object)
        grow = kinds > 0
        out[start[hit[grow]]] = picked[grow]
        out_list = out.tolist()

        src_pos = (start[hit] - out_offsets[sent_of[hit]]).tolist()
        tgt_pos = positions[hit].tolist()
        ops = [
            EditOp(Coarse.MISSING, sp, tp, None, t) if kd == 0
            else EditOp(Coarse.UNNECESSARY, sp, tp, x, None) if kd == 1
            else EditOp(Coarse.REPLACEMENT, sp, tp, x, t)
            for kd, sp, tp, x, t in zip(kinds.tolist(), src_pos, tgt_pos, picks, hit_tokens)
        ]
        bounds = np.searchsorted(hit, offsets).tolist()
        ob = out_offsets.tolist()
        records = []
        for i, toks in enumerate(sents):
            lo, hi = bounds[i], bounds[i + 1]
            if lo == hi:
                records.append(CorruptionRecord(SentencePair(toks, toks), (), batch[i][0]))
            else:
                src = tuple(out_list[ob[i]:ob[i + 1]])
                records.append(CorruptionRecord(SentencePair(src, toks), tuple(ops[lo:hi]), batch[i][0]))
        return records

    def _vector_picks(self, tokens: list[str], kinds: np.ndarray, u: np.ndarray) -> list:
        """Vectorised :func:`pick_token` for every corruption event.

        Deletions get ``None``. Produces exactly what the scalar function would
        for the same uniforms.
        """
        vocab, cfg = self.vocab, self.config
        n = len(tokens)
        picks: list = [None] * n
        if n == 0:
            return picks
        punct = cfg.punctuation
        index = vocab._index
        excl = np.full(n, -1, dtype=np.int64)
        vocab_rows = []
        for e, (t, kind) in enumerate(zip(tokens, kinds.tolist())):
            if kind == 0:
                continue
            if kind == 2:
                if t in punct:
                    picks[e] = pick_token(vocab, float(u[e]), t, punct)
                    continue
                excl[e] = index.get(t, -1)
            vocab_rows.append(e)
        if not vocab_rows:
            return picks
        rows = np.asarray(vocab_rows, dtype=np.int64)
        j = excl[rows]
        has = j >= 0
        ur = u[rows]
        if cfg.insertion_sampling is Sampling.UNIFORM:
            size = len(vocab) - has.astype(np.int64)
            if (size <= 0).any():
                t = tokens[int(rows[np.flatnonzero(size <= 0)[0]])]
                raise CorruptionError(f"vocabulary has no token other than {t!r}")
            idx = np.minimum(np.floor(ur * size).astype(np.int64), size - 1)
            idx += has & (idx >= j)
        else:
            cum = vocab.cumulative
            counts = np.asarray(vocab.counts, dtype=np.int64)
            skip = np.where(has, counts[np.maximum(j, 0)], 0)
            mass = vocab.total - skip
            if (mass <= 0).any():
                t = tokens[int(rows[np.flatnonzero(mass <= 0)[0]])]
                raise CorruptionError(f"vocabulary has no token other than {t!r}")
            r = np.minimum(np.floor(ur * mass).astype(np.int64), mass - 1)
            r += np.where(has & (r >= cum[np.maximum(j, 0)] - skip), skip, 0)
            idx = np.searchsorted(cum, r, side="right")
        entries = vocab.entries
        for e, i in zip(vocab_rows, idx.tolist()):
            picks[e] = entries[i]
        return picks

    def corrupt_sentence(self, tokens: Sequence, line_index: int = 0) -> CorruptionRecord:
        if len(tokens) == 0:
            raise CorruptionError(f"line {line_index + 1}: empty sentence")
        return self.corrupt_batch([(line_index, tokens)])[0]

    def corrupt_corpus(
        self,
        sentences: Iterable,
        threads: int = 1,
        skip_empty: bool = False,
        batch_size: int = BATCH_SIZE,
    ) -> Iterator[CorruptionRecord]:
        """Corrupt a stream of sentences (strings or token sequences) in input order.

        ``line_index`` is the 0-based position in ``sentences``; with
        ``skip_empty`` blank lines are dropped but still consume an index.
        """
        chunks = chunked(_indexed(sentences, skip_empty), batch_size)
        if threads <= 1:
            results = map(self.corrupt_batch, chunks)
        else:
            results = ordered_map(_corrupt_chunk, chunks, threads,
                                  initializer=_init_worker, initargs=(self,))
        for records in results:
            yield from records


def _indexed(sentences: Iterable, skip_empty: bool) -> Iterator[tuple[int, Sequence]]:
    for i, s in enumerate(sentences):
        toks = tuple(s.split()) if isinstance(s, str) else s
        if skip_empty and len(toks) == 0:
            continue
        yield i, toks


_WORKER: Corruptor | None = None


def _init_worker(corruptor: Corruptor) -> None:
    global _WORKER
    _WORKER = corruptor


def _corrupt_chunk(chunk):
    return _WORKER.corrupt_batch(chunk)


def corrupt_sentence(tokens: Sequence, config: CorruptionConfig, line_index: int,
                     vocab: Vocabulary) -> CorruptionRecord:
    return Corruptor(vocab, config).corrupt_sentence(tokens, line_index)


def corrupt_corpus(sentences: Iterable, config: CorruptionConfig, vocab: Vocabulary,
                   threads: int = 1, skip_empty: bool = False) -> Iterator[CorruptionRecord]:
    return Corruptor(vocab, config).corrupt_corpus(sentences, threads, skip_empty)
