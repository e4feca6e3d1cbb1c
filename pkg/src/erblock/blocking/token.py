"""Token blocking: an inverted index from value tokens to descriptions."""
from __future__ import annotations

from ..engine import Engine, PartitionedDataset, pack_key, unpack_key
from ..model import Block, BlockingCollection, BlockKey, EntityCollection, EntityDescription, Namespace
from .base import BaseBlocker
from .tokenize import TokenizerConfig, tokenize


def description_tokens(description: EntityDescription, config: TokenizerConfig,
                       literals_only: bool = False) -> set[str]:
    tokens: set[str] = set()
    for value in description.values():
        if literals_only and value.is_resource:
            continue
        tokens.update(tokenize(value, config))
    return tokens


def token_blocking(collection: EntityCollection, config: TokenizerConfig = TokenizerConfig(),
                   engine: Engine | None = None, partitions: int = 4,
                   literals_only: bool = False) -> BlockingCollection:
    """One block per distinct token, holding every description that contains it."""
    engine = engine or Engine()
    data = PartitionedDataset.from_records(collection.descriptions, partitions)

    def map_fn(d: EntityDescription):
        for t in sorted(description_tokens(d, config, literals_only)):
            yield pack_key(t), d.id

    def reduce_fn(key: bytes, ids: list):
        (term,) = unpack_key(key)
        yield Block(BlockKey(Namespace.TOKEN, term), frozenset(ids))

    blocks = engine.map_group_reduce(data, map_fn, reduce_fn)
    return BlockingCollection.build(blocks, collection)


class TokenBlocker(BaseBlocker):
    """Schema-agnostic token blocking.

    Works on dirty and clean-clean collections; in clean-clean mode blocks
    drawn from a single source are set aside as inert.

    >>> from erblock.datasets import figure1
    >>> blocks = TokenBlocker().fit_transform(figure1())
    >>> sorted(next(b for b in blocks if b.key.term == "eiffel").members)
    ['e1', 'e2', 'e6']
    """

    def transform(self, X) -> BlockingCollection:
        X = self._validate(X)
        return token_blocking(X, self.tokenizer_, self._engine(), self.n_partitions)
