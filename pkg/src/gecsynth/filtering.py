"""Raise a parallel corpus to a target error rate, then balance its error-type mix.

Two greedy passes over pre-annotated pairs:

1. :func:`filter_by_error_rate` drops the lowest-rate pairs until the
   aggregate error rate reaches ``target * (1 - theta)``.
2. :func:`balance_type_ratios` walks the corpus once and drops pairs carrying
   over-quota error types, never pushing any type below its lower bound.

Quotas are relative to the benchmark type (the one with the smallest target
weight): ``quota[k] = ratio[k] / ratio[bench] * B`` where ``B`` is the
benchmark type's count when balancing starts.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .alignment import COARSE_CODES, PairMetrics, align, coarse_counts, pair_metrics
from .corpus_io import CorpusFormatError
from .parallel import chunked, ordered_map


class FilterError(ValueError):
    pass


class TypeSource(str, enum.Enum):
    ALIGN = "align"
    M2 = "m2"


def _exact(x) -> Fraction:
    # Decimal-string route: 0.3 means 3/10, not the nearest double.
    return x if isinstance(x, Fraction) else Fraction(str(x))


def parse_type_ratio(text: str) -> dict[str, float]:
    """Parse ``"M:1,U:1,R:1"``; codes may themselves contain colons (``R:DET:2``)."""
    ratio: dict[str, float] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        code, sep, weight = item.rpartition(":")
        if not sep or not code:
            raise FilterError(f"bad type ratio item {item!r}; expected CODE:WEIGHT")
        try:
            w = float(weight)
        except ValueError:
            raise FilterError(f"bad weight in {item!r}") from None
        if code in ratio:
            raise FilterError(f"type {code!r} listed twice")
        ratio[code] = w
    if not ratio:
        raise FilterError("type ratio is empty")
    return ratio


@dataclass(frozen=True)
class FilterConfig:
    target_e_rate: float | None = None
    theta: float = 0.05
    type_ratio: Mapping[str, float] | None = None
    type_source: TypeSource = TypeSource.ALIGN
    literal_balance: bool = False
    drop_empty_source: bool = True

    def __post_init__(self):
        if self.target_e_rate is not None and not 0 <= self.target_e_rate <= 1:
            raise FilterError("target error rate must be in [0,1]")
        if not 0 <= self.theta < 1:
            raise FilterError("theta must be in [0,1)")
        if self.type_ratio is not None:
            if not self.type_ratio:
                raise FilterError("type ratio is empty")
            if any(w <= 0 for w in self.type_ratio.values()):
                raise FilterError("type ratio weights must be positive")
            object.__setattr__(self, "type_ratio", dict(self.type_ratio))
        object.__setattr__(self, "type_source", TypeSource(self.type_source))

    def to_dict(self) -> dict:
        return {
            "target_e_rate": self.target_e_rate,
            "theta": self.theta,
            "type_ratio": self.type_ratio,
            "type_source": self.type_source.value,
            "literal_balance": self.literal_balance,
            "drop_empty_source": self.drop_empty_source,
        }


class AnnotatedPair(NamedTuple):
    pair: object
    metrics: PairMetrics
    type_counts: dict[str, int]
    index: int = 0


# -- annotation -------------------------------------------------------------

def _annotate_one(item, type_source: TypeSource) -> AnnotatedPair:
    index, pair = item
    source, target = pair[0], pair[1]
    if len(target) == 0:
        raise CorpusFormatError("zero-length correction", line=index + 1)
    if type_source is TypeSource.ALIGN:
        ops = align(source, target)
        counts = coarse_counts(ops)
        metrics = PairMetrics(len(ops), len(target))
    else:
        edits = pair[2] if len(pair) > 2 else None
        if edits is None:
            raise FilterError(f"pair {index + 1}: no M2 annotations")
        counts = dict(Counter(e.type for e in edits if not e.is_noop))
        metrics = pair_metrics(pair)
    return AnnotatedPair(pair, metrics, counts, index)


def _annotate_chunk(args):
    chunk, type_source = args
    return [_annotate_one(item, type_source) for item in chunk]


def annotate(pairs: Iterable, type_source=TypeSource.ALIGN, threads: int = 1,
             chunk_size: int = 2048) -> Iterator[AnnotatedPair]:
    """Attach metrics and per-type counts to each pair, in input order."""
    ts = TypeSource(type_source)
    chunks = ((c, ts) for c in chunked(enumerate(pairs), chunk_size))
    for chunk in ordered_map(_annotate_chunk, chunks, threads):
        yield from chunk


# -- step 2-3: error-rate filter ---------------------------------------------

def rate_order(pairs: Sequence[AnnotatedPair]) -> list[int]:
    """Positions sorted by ascending per-pair error rate, ties by position."""
    # Float keys are exact enough: distinct d/l with l < 2**24 differ by > 1 ulp.
    return sorted(range(len(pairs)),
                  key=lambda i: (pairs[i].metrics.distance / pairs[i].metrics.target_len, i))


def rate_removal_count(pairs: Sequence[AnnotatedPair], target_e_rate, theta) -> int:
    """How many lowest-rate pairs must go to reach ``target * (1 - theta)``."""
    if not pairs:
        raise FilterError("empty corpus")
    threshold = _exact(target_e_rate) * (1 - _exact(theta))
    num, den = threshold.numerator, threshold.denominator
    dist = sum(p.metrics.distance for p in pairs)
    length = sum(p.metrics.target_len for p in pairs)
    order = rate_order(pairs)
    k = 0
    while dist * den < num * length:
        if k == len(pairs) - 1:
            raise FilterError("target error rate unreachable")
        m = pairs[order[k]].metrics
        # Removing a pair at or below the aggregate rate never lowers it.
        assert m.distance * length <= dist * m.target_len
        dist -= m.distance
        length -= m.target_len
        k += 1
    return k


def filter_by_error_rate(pairs: Sequence[AnnotatedPair], target_e_rate, theta) -> list[AnnotatedPair]:
    """Drop the lowest-rate pairs; survivors keep their corpus order."""
    k = rate_removal_count(pairs, target_e_rate, theta)
    removed = set(rate_order(pairs)[:k])
    return [p for i, p in enumerate(pairs) if i not in removed]


# -- step 5-7: type-ratio balancing --------------------------------------------

def type_sums(pairs: Iterable[AnnotatedPair], keys: Iterable[str]) -> dict[str, int]:
    keys = list(keys)
    sums = dict.fromkeys(keys, 0)
    for p in pairs:
        for k in keys:
            sums[k] += p.type_counts.get(k, 0)
    return sums


def compute_benchmark(et_sum: Mapping[str, int], type_ratio: Mapping[str, float]) -> tuple[str, int]:
    """Type with the smallest target weight (ties: smallest code) and its count."""
    bench = min(type_ratio, key=lambda k: (type_ratio[k], k))
    b = et_sum.get(bench, 0)
    if b == 0:
        raise FilterError(f"benchmark type absent from corpus: {bench}")
    return bench, b


def quota_bounds(type_ratio: Mapping[str, float], bench: str, b: int, theta
                 ) -> tuple[dict[str, Fraction], dict[str, Fraction]]:
    """Exact (lower, upper) count bounds per type."""
    th = _exact(theta)
    base = _exact(type_ratio[bench])
    lower, upper = {}, {}
    for k, w in type_ratio.items():
        quota = _exact(w) / base * b
        lower[k] = quota * (1 - th)
        upper[k] = quota * (1 + th)
    return lower, upper


@dataclass
class BalanceReport:
    benchmark_type: str
    benchmark: int
    theta: float
    quotas: dict[str, float]
    before: dict[str, int]
    after: dict[str, int]
    removed: int
    over_quota: list[str] = field(default_factory=list)
    under_quota: list[str] = field(default_factory=list)

    @property
    def balanced(self) -> bool:
        return not self.over_quota

    def to_dict(self) -> dict:
        return {
            "benchmark_type": self.benchmark_type,
            "benchmark": self.benchmark,
            "theta": self.theta,
            "quotas": self.quotas,
            "before": self.before,
            "after": self.after,
            "removed": self.removed,
            "balanced": self.balanced,
            "residual_over_quota": self.over_quota,
            "under_quota": self.under_quota,
        }


def balance_type_ratios(pairs: Sequence[AnnotatedPair], type_ratio: Mapping[str, float],
                        theta=0.05, literal: bool = False, trace: list | None = None
                        ) -> tuple[list[AnnotatedPair], BalanceReport]:
    """One pass in corpus order removing pairs that carry over-quota error types.

    A pair goes when it has an error of some type above its ``(1 + theta)``
    bound and dropping it keeps every type it carries at or above the
    ``(1 - theta)`` bound. The pass stops once all types are within their upper
    bounds. Types outside ``type_ratio`` are ignored.

    ``literal=True`` instead reads the inequalities literally (drop
    when every type would fall *below* its lower bound; stop when every type
    is *above* its upper bound), kept for comparison only.

    If ``trace`` is a list, the running sums after each removal are appended.
    """
    keys = sorted(type_ratio)
    et_sum = type_sums(pairs, keys)
    before = dict(et_sum)
    bench, b = compute_benchmark(et_sum, type_ratio)
    lower, upper = quota_bounds(type_ratio, bench, b, theta)

    removed: set[int] = set()
    for pos, ap in enumerate(pairs):
        c = ap.type_counts
        if literal:
            if all(et_sum[k] - c.get(k, 0) < lower[k] for k in keys):
                removed.add(pos)
                for k in keys:
                    et_sum[k] -= c.get(k, 0)
                if trace is not None:
                    trace.append(dict(et_sum))
            if all(et_sum[k] > upper[k] for k in keys):
                break
            continue

        if all(et_sum[k] <= upper[k] for k in keys):
            break
        carried = [k for k in keys if c.get(k, 0) > 0]
        if not any(et_sum[k] > upper[k] for k in carried):
            continue
        if all(et_sum[k] - c[k] >= lower[k] for k in carried):
            removed.add(pos)
            for k in carried:
                et_sum[k] -= c[k]
            if trace is not None:
                trace.append(dict(et_sum))

    retained = [p for i, p in enumerate(pairs) if i not in removed]
    report = BalanceReport(
        benchmark_type=bench,
        benchmark=b,
        theta=float(theta),
        quotas={k: float(_exact(type_ratio[k]) / _exact(type_ratio[bench]) * b) for k in keys},
        before=before,
        after=dict(et_sum),
        removed=len(removed),
        over_quota=[k for k in keys if et_sum[k] > upper[k]],
        under_quota=[k for k in keys if et_sum[k] < lower[k]],
    )
    return retained, report


# -- whole pipeline ---------------------------------------------------------

@dataclass
class FilterOutcome:
    retained: list[int]
    report: dict


def _rate_summary(pairs: Sequence[AnnotatedPair]) -> dict:
    d = sum(p.metrics.distance for p in pairs)
    n = sum(p.metrics.target_len for p in pairs)
    return {"pairs": len(pairs), "distance": d, "target_tokens": n,
            "error_rate": d / n if n else None}


def filter_corpus(pairs: Sequence, config: FilterConfig, threads: int = 1) -> FilterOutcome:
    """Empty-source drop, rate filter, then ratio balancing.

    Returns positions (into ``pairs``) of the survivors and a JSON-ready report.
    """
    report: dict = {"config": config.to_dict(), "input_pairs": len(pairs)}
    keep = list(range(len(pairs)))
    if config.drop_empty_source:
        keep = [i for i in keep if len(pairs[i][0]) > 0]
    report["dropped_empty_source"] = len(pairs) - len(keep)

    annotated = list(annotate([pairs[i] for i in keep], config.type_source, threads))
    annotated = [ap._replace(index=keep[ap.index]) for ap in annotated]
    report["before"] = _rate_summary(annotated)
    if config.type_source is TypeSource.ALIGN:
        report["before"]["types"] = type_sums(annotated, COARSE_CODES)

    if config.target_e_rate is not None and annotated:
        n0 = len(annotated)
        annotated = filter_by_error_rate(annotated, config.target_e_rate, config.theta)
        report["rate_filter_removed"] = n0 - len(annotated)

    if config.type_ratio:
        annotated, balance = balance_type_ratios(annotated, config.type_ratio, config.theta,
                                                 literal=config.literal_balance)
        report["balance"] = balance.to_dict()

    report["after"] = _rate_summary(annotated)
    if config.type_source is TypeSource.ALIGN:
        report["after"]["types"] = type_sums(annotated, COARSE_CODES)
    report["output_pairs"] = len(annotated)
    if config.target_e_rate is not None and annotated:
        # Balancing removes error-heavy pairs, so it can pull the rate back down.
        floor = _exact(config.target_e_rate) * (1 - _exact(config.theta))
        a = report["after"]
        report["rate_floor_met"] = Fraction(a["distance"], a["target_tokens"]) >= floor
    return FilterOutcome([ap.index for ap in annotated], report)
