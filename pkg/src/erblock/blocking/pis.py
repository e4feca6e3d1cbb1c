"""Prefix-infix(-suffix) blocking: literal-token blocks plus subject-URI infix blocks."""
from __future__ import annotations

import logging

from ..engine import Engine, PartitionedDataset, pack_key, unpack_key
from ..model import Block, BlockingCollection, BlockKey, EntityCollection, EntityDescription, Namespace
from .base import BaseBlocker, check_is_fitted
from .token import description_tokens
from .tokenize import TokenizerConfig
from .uri import PrefixTable, UriDecomposition, decompose_uri

logger = logging.getLogger(__name__)

_TOKEN, _INFIX = "t", "i"


def decompose_subjects(collection: EntityCollection, table: PrefixTable,
                       engine: Engine | None = None, partitions: int = 4) -> dict[str, UriDecomposition]:
    """Decomposition of every description's subject URI, keyed by id."""
    engine = engine or Engine()
    data = PartitionedDataset.from_records(collection.descriptions, partitions)
    parts = engine.map_partitions(data, lambda part: [(d.id, decompose_uri(d.id, table)) for d in part])
    return {k: v for part in parts for k, v in part}


def pis_blocking(collection: EntityCollection, config: TokenizerConfig = TokenizerConfig(),
                 engine: Engine | None = None, partitions: int = 4,
                 table: PrefixTable | None = None) -> BlockingCollection:
    """Blocks from literal-value tokens and from subject-URI infixes.

    Ids that cannot be decomposed (opaque handles, URNs) join no infix block.
    """
    engine = engine or Engine()
    table = table or PrefixTable.learn(d.id for d in collection)
    infixes = decompose_subjects(collection, table, engine, partitions)
    opaque = sum(1 for dec in infixes.values() if not dec.decomposed)
    if opaque:
        logger.warning("%d of %d subject ids have no URI structure; they get no infix block",
                       opaque, len(collection))
    data = PartitionedDataset.from_records(collection.descriptions, partitions)

    def map_fn(d: EntityDescription):
        for t in sorted(description_tokens(d, config, literals_only=True)):
            yield pack_key(_TOKEN, t), d.id
        dec = infixes[d.id]
        if dec.decomposed:
            yield pack_key(_INFIX, dec.infix), d.id

    def reduce_fn(key, ids):
        kind, term = unpack_key(key)
        ns = Namespace.TOKEN if kind == _TOKEN else Namespace.INFIX
        yield Block(BlockKey(ns, term), frozenset(ids))

    return BlockingCollection.build(engine.map_group_reduce(data, map_fn, reduce_fn), collection)


def infix_blocks(blocks: BlockingCollection) -> list[Block]:
    return [b for b in blocks.all_blocks() if b.key.namespace is Namespace.INFIX]


class PrefixInfixSuffixBlocker(BaseBlocker):
    """Blocking on literal tokens and URI infixes.

    ``fit`` learns ``prefix_table_`` from the subject URIs of a collection.
    """

    def fit(self, X, y=None):
        super().fit(X)
        self.prefix_table_ = PrefixTable.learn(d.id for d in X)
        return self

    def transform(self, X) -> BlockingCollection:
        check_is_fitted(self, "prefix_table_")
        X = self._validate(X)
        return pis_blocking(X, self.tokenizer_, self._engine(), self.n_partitions, self.prefix_table_)
