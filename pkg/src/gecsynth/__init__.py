"""Synthetic error-correction corpora with controlled error rate and error-type mix."""

__version__ = "0.1.0"

from .alignment import (
    Coarse,
    EditOp,
    PairMetrics,
    align,
    coarse_type_counts,
    corpus_error_rate,
    levenshtein,
    pair_metrics,
    replay,
)
from .corpus_io import (
    CorpusFormatError,
    M2Edit,
    M2Entry,
    read_m2,
    read_m2_pairs,
    read_parallel_tsv,
    read_plain,
    read_vocab,
    write_m2,
    write_parallel_tsv,
    write_vocab,
)
from .corruptor import (
    CorruptionConfig,
    CorruptionError,
    CorruptionRecord,
    Corruptor,
    Sampling,
    corrupt_corpus,
    corrupt_sentence,
    sample_token,
)
from .filtering import (
    AnnotatedPair,
    FilterConfig,
    FilterError,
    TypeSource,
    annotate,
    balance_type_ratios,
    compute_benchmark,
    filter_by_error_rate,
    filter_corpus,
)
from .rng import CounterRNG
from .text_core import (
    PunctuationSet,
    SentencePair,
    Token,
    TokenKind,
    Vocabulary,
    build_vocab,
    clean_pair,
    tokenize,
)
