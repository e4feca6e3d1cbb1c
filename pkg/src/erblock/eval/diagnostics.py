"""Diagnostics: common-token distributions, false-negative neighborhoods and a
sampled comparison of matches against non-matches."""
from __future__ import annotations

import logging
import random
import statistics
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass
from itertools import combinations, product

from ..blocking.attribute import AttributeClustering
from ..blocking.tokenize import TokenizerConfig, tokenize
from ..model import CLEAN_CLEAN, BlockingCollection, EntityCollection, GroundTruth, Pair, canonical_pair
from .metrics import candidate_pairs, comparisons_without_blocking

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CommonTokenDistribution:
    per_entity: dict[str, int]
    clustered: bool = False

    @property
    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.per_entity.values()).items()))

    @property
    def median(self) -> float | None:
        values = list(self.per_entity.values())
        return float(statistics.median(values)) if values else None

    def to_csv(self) -> str:
        return "bucket,count\n" + "".join(f"{k},{v}\n" for k, v in self.histogram.items())


def _keys(description, config, clustering):
    out = set()
    for attribute, value in description.pairs:
        for token in tokenize(value, config):
            if clustering is None:
                out.add(token)
            else:
                out.add((clustering.cluster_of(description.source, attribute), token))
    return out


def common_token_distribution(collection: EntityCollection, config: TokenizerConfig = TokenizerConfig(),
                              clustering: AttributeClustering | None = None) -> CommonTokenDistribution:
    """Per description, how many of its distinct tokens also occur in the other source.

    With ``clustering`` a token only counts as common within the same
    attribute cluster, i.e. the unit is the (cluster, token) pair.
    """
    if collection.mode != CLEAN_CLEAN:
        raise ValueError("common-token distributions need a clean-clean collection")
    keys = {d.id: _keys(d, config, clustering) for d in collection}
    vocab = {s: set() for s in collection.sources}
    for d in collection:
        vocab[d.source] |= keys[d.id]
    a, b = collection.sources
    common = vocab[a] & vocab[b]
    return CommonTokenDistribution({i: len(k & common) for i, k in sorted(keys.items())},
                                   clustering is not None)


def _neighbors(collection: EntityCollection) -> dict[str, set[str]]:
    return {d.id: d.neighbors() for d in collection}


def _fraction(num: int, den: int) -> float | None:
    return num / den if den else None


@dataclass(frozen=True)
class FnReport:
    fn_pairs: int
    fn_descriptions: int
    with_neighbors: int
    with_neighbor_in_gt: int
    with_neighbor_identified: int
    pairs_with_matching_neighbors: int
    pairs_with_common_identified_match: int

    @property
    def rows(self) -> dict[str, float | None]:
        d, p = self.fn_descriptions, self.fn_pairs
        return {
            "FN pairs": p,
            "descriptions in FNs with neighbor(s)": _fraction(self.with_neighbors, d),
            "descriptions in FNs with neighbor(s) in ground truth": _fraction(self.with_neighbor_in_gt, d),
            "descriptions in FNs with identified neighbor(s)": _fraction(self.with_neighbor_identified, d),
            "FNs with matching neighbors": _fraction(self.pairs_with_matching_neighbors, p),
            "FNs with common, identified matches": _fraction(self.pairs_with_common_identified_match, p),
        }

    def to_dict(self) -> dict:
        return {**asdict(self), "rows": self.rows}


def fn_analysis(blocks: BlockingCollection, gt: GroundTruth,
                identified: set[Pair] | None = None) -> FnReport:
    """Neighborhood statistics of the matches that blocking missed.

    ``identified`` is the set of matches found so far; by default the true
    positives of ``blocks``. A neighbor of a description is any resource it
    names in its values.
    """
    collection = blocks.universe
    matches = gt.relevant_pairs(collection)
    candidates = candidate_pairs(blocks)
    fns = sorted(matches - candidates)
    if identified is None:
        identified = matches & candidates
    identified = {canonical_pair(a, b) for a, b in identified}
    partners: dict[str, set[str]] = defaultdict(set)
    for a, b in identified:
        partners[a].add(b)
        partners[b].add(a)

    neighbors = _neighbors(collection)
    gt_ids = gt.ids
    fn_ids = sorted({x for p in fns for x in p})
    with_n = sum(1 for i in fn_ids if neighbors[i])
    with_gt = sum(1 for i in fn_ids if neighbors[i] & gt_ids)
    with_ident = sum(1 for i in fn_ids if any(partners.get(n) for n in neighbors[i]))

    def matching_neighbors(a, b):
        return any(x != y and (x, y) in gt for x, y in product(neighbors[a], neighbors[b]))

    return FnReport(
        fn_pairs=len(fns),
        fn_descriptions=len(fn_ids),
        with_neighbors=with_n,
        with_neighbor_in_gt=with_gt,
        with_neighbor_identified=with_ident,
        pairs_with_matching_neighbors=sum(1 for a, b in fns if matching_neighbors(a, b)),
        pairs_with_common_identified_match=sum(1 for a, b in fns if partners[a] & partners[b]),
    )


@dataclass(frozen=True)
class GroupStats:
    sampled: int
    with_neighbors: int
    median_neighbor_pairs: float
    with_matching_neighbors: int


@dataclass(frozen=True)
class StructuralReport:
    seed: int
    requested: int
    matches: GroupStats
    non_matches: GroupStats

    def to_dict(self) -> dict:
        return asdict(self)


def _sample_non_matches(collection, matches, k, rng) -> list[Pair]:
    population = comparisons_without_blocking(collection) - len(matches)
    if collection.mode == CLEAN_CLEAN:
        left, right = (sorted(d.id for d in collection.by_source(s)) for s in collection.sources)
        draw = lambda: canonical_pair(rng.choice(left), rng.choice(right))  # noqa: E731
        every = (canonical_pair(a, b) for a, b in product(left, right))
    else:
        ids = sorted(collection.ids)
        draw = lambda: canonical_pair(*rng.sample(ids, 2))  # noqa: E731
        every = combinations(ids, 2)
    if k >= population:
        return sorted(p for p in every if p not in matches)
    chosen: set[Pair] = set()
    while len(chosen) < k:
        p = draw()
        if p not in matches:
            chosen.add(p)
    return sorted(chosen)


def _group(pairs, neighbors, gt) -> GroupStats:
    both = [(a, b) for a, b in pairs if neighbors[a] and neighbors[b]]
    sizes = [len(neighbors[a]) * len(neighbors[b]) for a, b in both]
    hits = sum(1 for a, b in both
               if any(x != y and (x, y) in gt for x, y in product(neighbors[a], neighbors[b])))
    return GroupStats(len(pairs), len(both), float(statistics.median(sizes)) if sizes else 0.0, hits)


def sample_structural_analysis(gt: GroundTruth, collection: EntityCollection, sample_size: int,
                               seed: int = 0) -> StructuralReport:
    """Compare neighborhoods of sampled matches and sampled non-matches.

    Per group: pairs sampled, pairs where both sides have neighbors, the
    median of |N(a)|*|N(b)| over those pairs, and the pairs with at least
    one neighbor pair that is itself a match. A request larger than the
    population is clipped with a warning; clipping to the whole population
    makes the result independent of ``seed``.
    """
    if sample_size < 0:
        raise ValueError("sample_size must be non-negative")
    rng = random.Random(seed)
    matches = gt.relevant_pairs(collection)
    ordered = sorted(matches)
    if sample_size > len(ordered):
        logger.warning("sample size %d exceeds %d matches; clipped", sample_size, len(ordered))
        match_sample = ordered
    else:
        match_sample = sorted(rng.sample(ordered, sample_size))
    population = comparisons_without_blocking(collection) - len(matches)
    if sample_size > population:
        logger.warning("sample size %d exceeds %d non-matches; clipped", sample_size, population)
    non_match_sample = _sample_non_matches(collection, matches, min(sample_size, population), rng)
    neighbors = _neighbors(collection)
    return StructuralReport(seed, sample_size, _group(match_sample, neighbors, gt),
                            _group(non_match_sample, neighbors, gt))
