"""Core domain types: entity descriptions, blocks, blocking collections and ground truths.

All types are frozen; they can be shared between worker threads without copying.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

DIRTY = "dirty"
CLEAN_CLEAN = "clean-clean"
MODES = (DIRTY, CLEAN_CLEAN)

LITERAL = "literal"
RESOURCE = "resource"

_URI_REF = re.compile(r"^[^\s<>\"{}|\\^`]+$")


class ModelError(ValueError):
    """Raised when a domain type is constructed in violation of its invariants."""


Pair = tuple[str, str]


def canonical_pair(a: str, b: str) -> Pair:
    """Order an unordered id pair so the lexicographically smaller id comes first."""
    if a == b:
        raise ModelError(f"reflexive pair ({a!r}, {a!r})")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, order=True)
class Value:
    kind: str
    text: str

    def __post_init__(self):
        if self.kind not in (LITERAL, RESOURCE):
            raise ModelError(f"unknown value kind {self.kind!r}")
        if self.kind == RESOURCE and not _URI_REF.match(self.text):
            raise ModelError(f"resource value is not a URI reference: {self.text!r}")

    @classmethod
    def literal(cls, text: str) -> "Value":
        return cls(LITERAL, text)

    @classmethod
    def resource(cls, uri: str) -> "Value":
        return cls(RESOURCE, uri)

    @property
    def is_resource(self) -> bool:
        return self.kind == RESOURCE


@dataclass(frozen=True)
class EntityDescription:
    """One entity: an identifier plus its attribute-value pairs.

    ``pairs`` is kept as a sorted tuple of ``(attribute, Value)``; duplicates
    collapse, which matches the set semantics used at ingest.
    """

    id: str
    pairs: tuple[tuple[str, Value], ...] = ()
    source: str = ""

    def __post_init__(self):
        if not self.id:
            raise ModelError("entity id must be non-empty")
        pairs = tuple(sorted(set(self.pairs)))
        for attribute, value in pairs:
            if not attribute:
                raise ModelError(f"empty attribute name in description {self.id!r}")
            if not isinstance(value, Value):
                raise ModelError(f"value of {attribute!r} in {self.id!r} is not a Value")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_literals(cls, id: str, items: Iterable[tuple[str, str]], source: str = "") -> "EntityDescription":
        return cls(id, tuple((a, Value.literal(v)) for a, v in items), source)

    def values(self) -> Iterator[Value]:
        for _, value in self.pairs:
            yield value

    def attributes(self) -> set[str]:
        return {a for a, _ in self.pairs}

    def neighbors(self) -> set[str]:
        """Identifiers named by resource-valued pairs, excluding self references."""
        return {v.text for _, v in self.pairs if v.is_resource and v.text != self.id}


@dataclass(frozen=True)
class EntityCollection:
    descriptions: tuple[EntityDescription, ...]
    mode: str = DIRTY
    sources: tuple[str, ...] = ()
    _index: Mapping[str, EntityDescription] = field(default=None, repr=False, compare=False)
    _ids: frozenset = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ModelError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        descriptions = tuple(sorted(self.descriptions, key=lambda d: (d.source, d.id)))
        index: dict[str, EntityDescription] = {}
        for d in descriptions:
            if d.id in index:
                raise ModelError(f"duplicate entity id {d.id!r}")
            index[d.id] = d
        sources = tuple(self.sources)
        if not sources:
            sources = tuple(dict.fromkeys(d.source for d in descriptions))
        if self.mode == CLEAN_CLEAN:
            if len(sources) != 2:
                raise ModelError(f"clean-clean collections need exactly 2 sources, got {sources}")
            stray = {d.source for d in descriptions} - set(sources)
            if stray:
                raise ModelError(f"descriptions tagged with undeclared sources {sorted(stray)}")
        object.__setattr__(self, "descriptions", descriptions)
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_ids", frozenset(index))

    def __len__(self) -> int:
        return len(self.descriptions)

    def __iter__(self) -> Iterator[EntityDescription]:
        return iter(self.descriptions)

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._index

    def __getitem__(self, entity_id: str) -> EntityDescription:
        return self._index[entity_id]

    @property
    def ids(self) -> frozenset[str]:
        return self._ids

    def source_of(self, entity_id: str) -> str:
        return self._index[entity_id].source

    def by_source(self, source: str) -> tuple[EntityDescription, ...]:
        return tuple(d for d in self.descriptions if d.source == source)

    def is_cross(self, a: str, b: str) -> bool:
        return self._index[a].source != self._index[b].source

    def is_comparable(self, a: str, b: str) -> bool:
        """Whether the pair counts as a comparison under this collection's mode."""
        return self.mode == DIRTY or self.is_cross(a, b)

    def with_mode(self, mode: str) -> "EntityCollection":
        return EntityCollection(self.descriptions, mode, self.sources if mode == CLEAN_CLEAN else ())


class Namespace(str, Enum):
    TOKEN = "token"
    CLUSTERED_TOKEN = "clustered-token"
    INFIX = "infix"


@dataclass(frozen=True)
class BlockKey:
    namespace: Namespace
    term: str
    cluster_id: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "namespace", Namespace(self.namespace))
        if not self.term:
            raise ModelError("block key term must be non-empty")
        if (self.cluster_id is not None) != (self.namespace is Namespace.CLUSTERED_TOKEN):
            raise ModelError("cluster id is required for, and only for, clustered-token keys")

    def sort_key(self) -> tuple:
        return (self.namespace.value, -1 if self.cluster_id is None else self.cluster_id, self.term)

    def to_bytes(self) -> bytes:
        cluster = "" if self.cluster_id is None else str(self.cluster_id)
        return "\x1f".join((self.namespace.value, cluster, self.term)).encode("utf-8")

    def __str__(self) -> str:
        if self.cluster_id is None:
            return self.term if self.namespace is Namespace.TOKEN else f"{self.namespace.value}:{self.term}"
        return f"C{self.cluster_id}.{self.term}"


@dataclass(frozen=True)
class Block:
    key: BlockKey
    members: frozenset[str]

    def __post_init__(self):
        members = frozenset(self.members)
        if not members:
            raise ModelError(f"block {self.key} is empty")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class BlockingCollection:
    """Blocks over an entity collection.

    ``blocks`` are the comparison-bearing blocks. In clean-clean mode, blocks
    whose members all come from one source carry no comparisons and are kept
    apart in ``inert``. Descriptions that landed in no block at all are listed
    in ``unblocked``, so ``blocks | inert | unblocked`` always covers the
    universe.
    """

    blocks: tuple[Block, ...]
    unblocked: frozenset[str]
    universe: EntityCollection
    inert: tuple[Block, ...] = ()

    @classmethod
    def build(cls, blocks: Iterable[Block], universe: EntityCollection) -> "BlockingCollection":
        bearing, inert, seen, covered = [], [], set(), set()
        ids = universe.ids
        for block in blocks:
            if block.key in seen:
                raise ModelError(f"duplicate block key {block.key}")
            seen.add(block.key)
            if not block.members <= ids:
                unknown = block.members - ids
                raise ModelError(f"block {block.key} names ids outside the universe: {sorted(unknown)[:5]}")
            covered |= block.members
            if universe.mode == CLEAN_CLEAN and len({universe.source_of(m) for m in block.members}) < 2:
                inert.append(block)
            else:
                bearing.append(block)
        bearing.sort(key=lambda b: b.key.sort_key())
        inert.sort(key=lambda b: b.key.sort_key())
        return cls(tuple(bearing), frozenset(universe.ids - covered), universe, tuple(inert))

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self) -> Iterator[Block]:
        return iter(self.blocks)

    @property
    def mode(self) -> str:
        return self.universe.mode

    def all_blocks(self) -> tuple[Block, ...]:
        return tuple(sorted(self.blocks + self.inert, key=lambda b: b.key.sort_key()))

    def covered_ids(self) -> frozenset[str]:
        ids = set(self.unblocked)
        for block in self.blocks + self.inert:
            ids |= block.members
        return frozenset(ids)

    def check_coverage(self) -> bool:
        return self.covered_ids() == self.universe.ids

    def entity_index(self) -> dict[str, list[BlockKey]]:
        index: dict[str, list[BlockKey]] = defaultdict(list)
        for block in self.blocks:
            for m in block.members:
                index[m].append(block.key)
        return dict(index)


def transitive_closure(pairs: Iterable[Pair]) -> frozenset[Pair]:
    """Close a set of unordered id pairs under transitivity.

    Every connected component of k ids yields all k(k-1)/2 canonical pairs.
    """
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in pairs:
        if a == b:
            raise ModelError(f"reflexive pair ({a!r}, {b!r})")
        parent.setdefault(a, a)
        parent.setdefault(b, b)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    components: dict[str, list[str]] = defaultdict(list)
    for x in parent:
        components[find(x)].append(x)
    closed = set()
    for members in components.values():
        members.sort()
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                closed.add((a, b))
    return frozenset(closed)


@dataclass(frozen=True)
class GroundTruth:
    predicate: str
    pairs: frozenset[Pair] = frozenset()

    def __post_init__(self):
        canonical = frozenset(canonical_pair(a, b) for a, b in self.pairs)
        closed = transitive_closure(canonical)
        if closed != canonical:
            raise ModelError("ground-truth pairs must be transitively closed; use GroundTruth.from_links")
        object.__setattr__(self, "pairs", canonical)

    @classmethod
    def from_links(cls, predicate: str, links: Iterable[Pair]) -> "GroundTruth":
        return cls(predicate, transitive_closure(links))

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair: Pair) -> bool:
        a, b = pair
        return a != b and canonical_pair(a, b) in self.pairs

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(x for p in self.pairs for x in p)

    def restrict(self, ids: Iterable[str]) -> "GroundTruth":
        keep = set(ids)
        return GroundTruth(self.predicate, frozenset(p for p in self.pairs if p[0] in keep and p[1] in keep))

    def relevant_pairs(self, collection: EntityCollection) -> frozenset[Pair]:
        """Pairs that count as matches for ``collection``: both ends present and comparable."""
        return frozenset(
            (a, b) for a, b in self.pairs
            if a in collection and b in collection and collection.is_comparable(a, b)
        )
