"""Blocking quality measures: recall, precision, F-measure, reduction ratio and H3R."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

from ..engine import Engine, PartitionedDataset
from ..model import CLEAN_CLEAN, Block, BlockingCollection, EntityCollection, GroundTruth, Pair

AGGREGATE = "aggregate"
DISTINCT = "distinct"
RR_BASES = (AGGREGATE, DISTINCT)


def _block_pairs(block: Block, universe: EntityCollection) -> Iterable[Pair]:
    members = sorted(block.members)
    if universe.mode == CLEAN_CLEAN:
        src = universe.source_of
        for i, a in enumerate(members):
            sa = src(a)
            for b in members[i + 1:]:
                if src(b) != sa:
                    yield a, b
    else:
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                yield a, b


def block_comparisons(block: Block, universe: EntityCollection) -> int:
    """Comparisons a single block suggests under the universe's mode."""
    if universe.mode == CLEAN_CLEAN:
        first = universe.sources[0]
        left = sum(1 for m in block.members if universe.source_of(m) == first)
        return left * (len(block.members) - left)
    k = len(block.members)
    return k * (k - 1) // 2


def candidate_pairs(blocks: BlockingCollection, engine: Engine | None = None,
                    partitions: int = 4) -> set[Pair]:
    """Distinct comparable pairs that share at least one block."""
    engine = engine or Engine()
    universe = blocks.universe
    if not blocks.blocks:
        return set()
    data = PartitionedDataset.from_records(blocks.blocks, min(partitions, len(blocks.blocks)))

    def local(part):
        out = set()
        for block in part:
            out.update(_block_pairs(block, universe))
        return out

    result: set[Pair] = set()
    for part in engine.map_partitions(data, local):
        result |= part
    return result


def comparison_counts(blocks: BlockingCollection, engine: Engine | None = None) -> tuple[int, int]:
    """(aggregate, distinct): the first counts a pair once per shared block."""
    aggregate = sum(block_comparisons(b, blocks.universe) for b in blocks.blocks)
    return aggregate, len(candidate_pairs(blocks, engine))


def comparisons_without_blocking(collection: EntityCollection) -> int:
    if collection.mode == CLEAN_CLEAN:
        a, b = collection.sources
        return len(collection.by_source(a)) * len(collection.by_source(b))
    n = len(collection)
    return n * (n - 1) // 2


def harmonic(x: float, y: float) -> float:
    return 2 * x * y / (x + y) if x + y else 0.0


def fmeasure(precision: float, recall: float) -> float:
    return harmonic(precision, recall)


def h3r(rr: float | None, recall: float) -> float | None:
    """Harmonic mean of reduction ratio and recall; None (not applicable) unless RR > 0."""
    if rr is None or rr <= 0:
        return None
    return harmonic(rr, recall)


def reduction_ratio(with_blocking: int, without_blocking: int) -> float | None:
    if without_blocking == 0:
        return None
    return 1.0 - with_blocking / without_blocking


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError(f"negative confusion count in {self}")


@dataclass
class MetricsReport:
    mode: str
    rr_basis: str
    counts: ConfusionCounts
    recall: float
    precision: float
    fmeasure: float
    rr: float | None
    h3r: float | None
    comparisons_aggregate: int
    comparisons_distinct: int
    comparisons_without_blocking: int
    block_count: int
    unblocked_count: int = 0
    per_entity_common_token_median: float | None = None
    cluster_count: int | None = None
    median_cluster_size: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rr_applicable"] = self.rr is not None
        d["h3r_applicable"] = self.h3r is not None
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_table(self) -> str:
        def pct(x):
            return "N/A" if x is None else f"{100 * x:.2f}%"

        rows = [
            ("mode", self.mode),
            ("blocks", f"{self.block_count:,}"),
            ("comparisons (aggregate)", f"{self.comparisons_aggregate:,}"),
            ("comparisons (distinct)", f"{self.comparisons_distinct:,}"),
            ("comparisons (w/o blocking)", f"{self.comparisons_without_blocking:,}"),
            ("TP / FP / FN / TN", f"{self.counts.tp:,} / {self.counts.fp:,} / {self.counts.fn:,} / {self.counts.tn:,}"),
            ("recall", pct(self.recall)),
            ("precision", f"{self.precision:.3e}"),
            ("F-measure", f"{self.fmeasure:.3e}"),
            (f"RR ({self.rr_basis})", pct(self.rr) if self.rr is None or self.rr >= 0 else f"{100 * self.rr:.2f}%"),
            ("H3R", pct(self.h3r) if self.rr is None or self.rr > 0
             else "N/A (RR = 0)" if self.rr == 0 else "N/A (RR < 0)"),
        ]
        if self.per_entity_common_token_median is not None:
            rows.append(("common tokens per entity (median)", f"{self.per_entity_common_token_median:g}"))
        if self.cluster_count is not None:
            rows.append(("attribute clusters", f"{self.cluster_count:,}"))
            rows.append(("attributes per cluster (median)", f"{self.median_cluster_size:g}"))
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


def score(blocks: BlockingCollection, gt: GroundTruth, *, rr_basis: str = AGGREGATE,
          engine: Engine | None = None) -> MetricsReport:
    """Evaluate a blocking collection against a ground truth.

    Ground-truth pairs outside the collection, or same-source pairs in
    clean-clean mode, are ignored. Precision and recall use distinct
    candidate pairs; RR uses ``rr_basis``.
    """
    if rr_basis not in RR_BASES:
        raise ValueError(f"rr_basis must be one of {RR_BASES}")
    universe = blocks.universe
    candidates = candidate_pairs(blocks, engine)
    matches = gt.relevant_pairs(universe)
    tp = len(matches & candidates)
    fp = len(candidates) - tp
    fn = len(matches) - tp
    total = comparisons_without_blocking(universe)
    tn = total - tp - fp - fn
    aggregate = sum(block_comparisons(b, universe) for b in blocks.blocks)

    recall = tp / (tp + fn) if tp + fn else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    rr = reduction_ratio(aggregate if rr_basis == AGGREGATE else len(candidates), total)
    return MetricsReport(
        mode=universe.mode,
        rr_basis=rr_basis,
        counts=ConfusionCounts(tp, fp, fn, tn),
        recall=recall,
        precision=precision,
        fmeasure=fmeasure(precision, recall),
        rr=rr,
        h3r=h3r(rr, recall),
        comparisons_aggregate=aggregate,
        comparisons_distinct=len(candidates),
        comparisons_without_blocking=total,
        block_count=len(blocks.blocks),
        unblocked_count=len(blocks.unblocked),
    )
