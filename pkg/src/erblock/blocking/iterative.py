"""Iterative blocking: block-by-block matching with merge propagation.

Sequential by nature: every merge rewrites the members of all other blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from sklearn.base import BaseEstimator

from ..model import CLEAN_CLEAN, Block, BlockingCollection, EntityCollection, GroundTruth, Value
from .base import check_blocks
from .tokenize import jaccard, trigrams

GROUND_TRUTH = "ground-truth"
VALUE_SIMILARITY = "value-similarity"


@dataclass(frozen=True)
class MergedEntity:
    member_ids: frozenset[str]
    pairs: tuple[tuple[str, Value], ...] = ()

    def __post_init__(self):
        if not self.member_ids:
            raise ValueError("a merged entity needs at least one member")
        object.__setattr__(self, "member_ids", frozenset(self.member_ids))

    @property
    def id(self) -> str:
        if len(self.member_ids) == 1:
            return next(iter(self.member_ids))
        return "m:" + "+".join(sorted(self.member_ids))


@dataclass(frozen=True)
class MatchOracle:
    """Decides whether two (possibly merged) entities match.

    ``ground-truth`` matches when any cross pair of members is a known match;
    ``value-similarity`` compares trigram sets of all values against ``threshold``.
    """

    kind: str = GROUND_TRUTH
    threshold: float = 0.5
    gt: GroundTruth | None = None

    def __post_init__(self):
        if self.kind not in (GROUND_TRUTH, VALUE_SIMILARITY):
            raise ValueError(f"unknown oracle kind {self.kind!r}")
        if self.kind == GROUND_TRUTH and self.gt is None:
            raise ValueError("a ground-truth oracle needs a GroundTruth")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")

    @classmethod
    def from_ground_truth(cls, gt: GroundTruth) -> "MatchOracle":
        return cls(GROUND_TRUTH, gt=gt)

    def matches(self, a: MergedEntity, b: MergedEntity) -> bool:
        if self.kind == GROUND_TRUTH:
            return any((x, y) in self.gt for x in a.member_ids for y in b.member_ids)
        ta = trigrams(" ".join(v.text for _, v in a.pairs))
        tb = trigrams(" ".join(v.text for _, v in b.pairs))
        return jaccard(ta, tb) >= self.threshold


@dataclass
class IterativeResult:
    entities: list[MergedEntity]
    comparisons: int = 0
    passes: int = 0
    merges: list[tuple[str, frozenset, frozenset]] = field(default_factory=list)

    def partition(self) -> set[frozenset[str]]:
        return {e.member_ids for e in self.entities}

    def matched_pairs(self) -> set[tuple[str, str]]:
        out = set()
        for e in self.entities:
            ids = sorted(e.member_ids)
            out.update((a, b) for i, a in enumerate(ids) for b in ids[i + 1:])
        return out


def size_order(blocks: Iterable[Block]) -> list[Block]:
    """Largest blocks first, ties broken by key bytes."""
    return sorted(blocks, key=lambda b: (-len(b), b.key.to_bytes()))


def iterative_blocking(blocks: BlockingCollection, oracle: MatchOracle,
                       order: Callable[[Iterable[Block]], list[Block]] = size_order,
                       initial: Iterable[Iterable[str]] | None = None) -> IterativeResult:
    """Resolve entities block by block, propagating merges until a full pass merges nothing.

    ``initial`` optionally seeds the process with an existing partition.
    """
    check_blocks(blocks)
    universe: EntityCollection = blocks.universe
    clean = universe.mode == CLEAN_CLEAN

    owner: dict[str, frozenset[str]] = {i: frozenset((i,)) for i in universe.ids}
    entities: dict[frozenset[str], MergedEntity] = {
        k: MergedEntity(k, universe[next(iter(k))].pairs) for k in owner.values()
    }
    if initial is not None:
        for group in initial:
            group = frozenset(group)
            if len(group) < 2:
                continue
            for i in group:
                entities.pop(owner[i], None)
            merged = _merge([MergedEntity(frozenset((i,)), universe[i].pairs) for i in sorted(group)])
            entities[merged.member_ids] = merged
            for i in group:
                owner[i] = merged.member_ids

    def sources(key: frozenset[str]) -> set[str]:
        return {universe.source_of(i) for i in key}

    schedule = [b for b in order(blocks.blocks) if len(b) > 1]
    compared: set[frozenset] = set()
    result = IterativeResult([])

    def self_merge(block: Block) -> bool:
        """Compare pending pairs in ``block``; stop at the first merge."""
        members = sorted({owner[m] for m in block.members}, key=sorted)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                pair = frozenset((a, b))
                if pair in compared or (clean and len(sources(a) | sources(b)) < 2):
                    continue
                compared.add(pair)
                result.comparisons += 1
                if oracle.matches(entities[a], entities[b]):
                    merged = _merge([entities.pop(a), entities.pop(b)])
                    entities[merged.member_ids] = merged
                    for x in merged.member_ids:
                        owner[x] = merged.member_ids
                    result.merges.append((str(block.key), a, b))
                    return True
        return False

    while True:
        result.passes += 1
        merged_this_pass = False
        for block in schedule:
            while self_merge(block):
                merged_this_pass = True
        if not merged_this_pass:
            break

    result.entities = sorted(entities.values(), key=lambda e: sorted(e.member_ids))
    return result


def _merge(parts: list[MergedEntity]) -> MergedEntity:
    ids = frozenset().union(*(p.member_ids for p in parts))
    pairs = tuple(sorted(set().union(*(p.pairs for p in parts))))
    return MergedEntity(ids, pairs)


class IterativeResolver(BaseEstimator):
    """Estimator wrapper: ``fit_predict(blocks)`` returns the final ER partition."""

    def __init__(self, oracle: MatchOracle | None = None, order=size_order):
        self.oracle = oracle
        self.order = order

    def fit(self, X, y=None):
        oracle = self.oracle
        if oracle is None:
            if y is None:
                raise ValueError("pass an oracle or a GroundTruth as y")
            oracle = MatchOracle.from_ground_truth(y)
        self.result_ = iterative_blocking(check_blocks(X), oracle, self.order)
        self.entities_ = self.result_.entities
        return self

    def fit_predict(self, X, y=None) -> list[MergedEntity]:
        return self.fit(X, y).entities_
