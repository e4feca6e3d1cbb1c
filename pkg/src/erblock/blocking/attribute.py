"""Attribute clustering blocking for clean-clean collections.

Runs as four jobs: attribute profiles, pairwise trigram similarities over
partition-pair tasks, best cross-source match per attribute, and clustered
token blocking.
"""
from __future__ import annotations

import csv
import io
import statistics
from collections import defaultdict
from dataclasses import dataclass

from ..engine import Engine, PartitionedDataset, pack_key, task_keys_for, unpack_key
from ..model import (CLEAN_CLEAN, Block, BlockingCollection, BlockKey, EntityCollection,
                     EntityDescription, Namespace)
from .base import BaseBlocker, check_collection, check_is_fitted
from .tokenize import TokenizerConfig, jaccard, tokenize, trigrams

GLUE_CLUSTER = 0

Attr = tuple[str, str]  # (source, attribute name)


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeClustering:
    """Assignment of every (source, attribute) to exactly one cluster.

    Cluster 0 is the glue cluster for attributes with no similar counterpart.
    """

    assignment: dict[Attr, int]
    glue_cluster_id: int = GLUE_CLUSTER

    def cluster_of(self, source: str, attribute: str) -> int:
        return self.assignment.get((source, attribute), self.glue_cluster_id)

    def clusters(self) -> dict[int, list[Attr]]:
        out: dict[int, list[Attr]] = defaultdict(list)
        for attr, cid in sorted(self.assignment.items()):
            out[cid].append(attr)
        return dict(sorted(out.items()))

    @property
    def cluster_count(self) -> int:
        return len(self.clusters())

    @property
    def median_cluster_size(self) -> float:
        sizes = [len(v) for v in self.clusters().values()]
        return float(statistics.median(sizes)) if sizes else 0.0

    def to_tsv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(["source", "attribute", "cluster"])
        for (source, attribute), cid in sorted(self.assignment.items()):
            w.writerow([source, attribute, cid])
        return buf.getvalue()

    @classmethod
    def from_tsv(cls, text: str) -> "AttributeClustering":
        rows = csv.reader(io.StringIO(text), delimiter="\t")
        next(rows, None)
        return cls({(s, a): int(c) for s, a, c in rows})


def attribute_profile(collection: EntityCollection, engine: Engine | None = None,
                      partitions: int = 4) -> dict[Attr, str]:
    """Per source and attribute, the sorted values joined by single spaces."""
    engine = engine or Engine()
    data = PartitionedDataset.from_records(collection.descriptions, partitions)

    def map_fn(d: EntityDescription):
        for attribute, value in d.pairs:
            yield pack_key(d.source, attribute), value.text

    def reduce_fn(key, values):
        source, attribute = unpack_key(key)
        yield (source, attribute), " ".join(sorted(values))

    return dict(engine.map_group_reduce(data, map_fn, reduce_fn))


def attribute_similarities(profiles: dict[Attr, str], engine: Engine | None = None,
                           partitions: int = 4) -> list[tuple[Attr, Attr, float]]:
    """Trigram Jaccard for every cross-source attribute pair, computed once each.

    Attributes are spread over ``partitions``; a record in partition p is sent
    to every task (min(p, q), max(p, q)), and each task compares its two
    partitions (or one partition against itself).
    """
    engine = engine or Engine()
    records = [(attr, trigrams(text)) for attr, text in sorted(profiles.items())]
    partitions = max(1, min(partitions, len(records)))
    data = PartitionedDataset.from_records(records, partitions)

    def map_fn(record, p, m):
        for task in task_keys_for(p, m):
            yield task.key.encode(), (p, record)

    def reduce_fn(key, values):
        left, right = (int(x) for x in key.decode().split("_"))
        lhs = [r for p, r in values if p == left]
        rhs = [r for p, r in values if p == right]
        lhs.sort()
        rhs.sort()
        if left == right:
            pairs = ((lhs[i], lhs[j]) for i in range(len(lhs)) for j in range(i + 1, len(lhs)))
        else:
            pairs = ((a, b) for a in lhs for b in rhs)
        for (a, ta), (b, tb) in pairs:
            if a[0] != b[0]:
                yield a, b, jaccard(ta, tb)

    return engine.map_group_reduce(data, map_fn, reduce_fn, with_partition=True)


def best_matches(similarities, engine: Engine | None = None) -> dict[Attr, tuple[Attr, float]]:
    """For each attribute, its most similar attribute of the other source.

    Ties go to the lexicographically smallest attribute name.
    """
    engine = engine or Engine()
    data = PartitionedDataset.from_records(similarities, 1)

    def map_fn(sim):
        a, b, s = sim
        yield pack_key(*a), (b, s)
        yield pack_key(*b), (a, s)

    def reduce_fn(key, candidates):
        best, score = min(candidates, key=lambda c: (-c[1], c[0][1], c[0][0]))
        yield tuple(unpack_key(key)), (best, score)

    return dict(engine.map_group_reduce(data, map_fn, reduce_fn))


def attribute_clustering(collection: EntityCollection, engine: Engine | None = None,
                         partitions: int = 4) -> AttributeClustering:
    """Cluster attributes of the two sources by linking each to its best match.

    Linked attributes are grouped by connected components; attributes whose
    best similarity is 0 go to the glue cluster.
    """
    check_collection(collection, mode=CLEAN_CLEAN)
    engine = engine or Engine()
    profiles = attribute_profile(collection, engine, partitions)
    for source in collection.sources:
        if not any(s == source for s, _ in profiles):
            raise ClusteringError(f"source {source!r} has no attributes; clustering is undefined")
    best = best_matches(attribute_similarities(profiles, engine, partitions), engine)

    parent = {attr: attr for attr in profiles}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    glue = set()
    for attr in sorted(profiles):
        match, score = best[attr]
        if score <= 0.0:
            glue.add(attr)
            continue
        ra, rb = find(attr), find(match)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    order = {s: i for i, s in enumerate(collection.sources)}
    components: dict[Attr, list[Attr]] = defaultdict(list)
    for attr in profiles:
        if attr not in glue:
            components[find(attr)].append(attr)
    ranked = sorted(components.values(), key=lambda ms: min((order[s], a) for s, a in ms))
    assignment = {attr: GLUE_CLUSTER for attr in glue}
    for cid, members in enumerate(ranked, start=1):
        for attr in members:
            assignment[attr] = cid
    return AttributeClustering(assignment)


def clustered_token_blocking(collection: EntityCollection, clustering: AttributeClustering,
                             config: TokenizerConfig = TokenizerConfig(),
                             engine: Engine | None = None, partitions: int = 4) -> BlockingCollection:
    """Token blocking whose keys carry the cluster of the token's attribute."""
    engine = engine or Engine()
    data = PartitionedDataset.from_records(collection.descriptions, partitions)

    def map_fn(d: EntityDescription):
        keys = set()
        for attribute, value in d.pairs:
            cid = clustering.cluster_of(d.source, attribute)
            for t in tokenize(value, config):
                keys.add((cid, t))
        for cid, t in sorted(keys):
            yield pack_key(str(cid), t), d.id

    def reduce_fn(key, ids):
        cid, term = unpack_key(key)
        yield Block(BlockKey(Namespace.CLUSTERED_TOKEN, term, int(cid)), frozenset(ids))

    return BlockingCollection.build(engine.map_group_reduce(data, map_fn, reduce_fn), collection)


def attribute_clustering_blocking(collection: EntityCollection, config: TokenizerConfig = TokenizerConfig(),
                                  engine: Engine | None = None, partitions: int = 4) -> BlockingCollection:
    clustering = attribute_clustering(collection, engine, partitions)
    return clustered_token_blocking(collection, clustering, config, engine, partitions)


class AttributeClusteringBlocker(BaseBlocker):
    """Token blocking refined by clusters of globally similar attributes.

    ``fit`` learns ``clustering_`` from a clean-clean collection; ``transform``
    emits blocks keyed by (cluster, token).
    """

    _required_mode = CLEAN_CLEAN

    def fit(self, X, y=None):
        super().fit(X)
        self.clustering_ = attribute_clustering(X, self._engine(), self.n_partitions)
        return self

    def transform(self, X) -> BlockingCollection:
        check_is_fitted(self, "clustering_")
        X = self._validate(X)
        return clustered_token_blocking(X, self.clustering_, self.tokenizer_, self._engine(), self.n_partitions)
