"""Synthetic clean-clean source pairs with controlled token overlap.

Each source has the same five value fields. Field values carry a
field-specific stem and alphabet (``alpha`` + letters a..e, ``bravo`` +
letters f..j, ...) so attribute profiles of the
same field look alike across sources. Entity ``i`` of source A matches
entity ``i`` of source B.

Two knobs shape a fixture:

* ``keep`` is the chance that one of A's field tokens reappears in B's
  matching description. Low values mimic sparsely interlinked sources.
* ``misplace`` is the chance that a reappearing token lands in B's
  catch-all ``note`` attribute instead of its own field, as happens when
  schemas are heterogeneous.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .model import CLEAN_CLEAN, EntityCollection, EntityDescription, GroundTruth, Value

STEMS = ("alpha", "bravo", "charlie", "delta", "echo")
# Disjoint per-field alphabets keep trigram profiles of different fields apart.
ALPHABETS = ("abcde", "fghij", "klmno", "pqrst", "uvwxy")
CODE_LENGTH = 12
SOURCE_A, SOURCE_B = "A", "B"


@dataclass(frozen=True)
class SyntheticPair:
    collection: EntityCollection
    ground_truth: GroundTruth
    keep: float
    misplace: float


def _code(rng: random.Random, field: int) -> str:
    return "".join(rng.choices(ALPHABETS[field], k=CODE_LENGTH))


def generate_pair(n_per_source: int, *, keep: float, misplace: float, tokens_per_field: int = 2,
                  years: int = 3000, seed: int = 0) -> SyntheticPair:
    """Build a clean-clean fixture of ``2 * n_per_source`` descriptions.

    Besides the five fields every description has a ``year`` drawn from
    ``years`` values shared by both sources, which creates non-matching
    candidate pairs without making any block large.
    """
    if not (0 <= keep <= 1 and 0 <= misplace <= 1):
        raise ValueError("keep and misplace must lie in [0, 1]")
    rng = random.Random(seed)
    fields = [f"f{k}" for k in range(len(STEMS))]
    a_side, b_side, links = [], [], []
    for i in range(n_per_source):
        a_pairs, b_pairs = [], []
        for k, stem in enumerate(STEMS):
            for _ in range(tokens_per_field):
                token = stem + _code(rng, k)
                a_pairs.append((fields[k], token))
                if rng.random() < keep:
                    b_pairs.append(("note" if rng.random() < misplace else fields[k], token))
                else:
                    b_pairs.append((fields[k], stem + _code(rng, k)))
        a_pairs.append(("year", str(rng.randrange(years))))
        b_pairs.append(("year", str(rng.randrange(years))))
        a_id, b_id = f"a{i}", f"b{i}"
        a_side.append(EntityDescription(a_id, tuple((x, Value.literal(v)) for x, v in a_pairs), SOURCE_A))
        b_side.append(EntityDescription(b_id, tuple((x, Value.literal(v)) for x, v in b_pairs), SOURCE_B))
        links.append((a_id, b_id))
    collection = EntityCollection(tuple(a_side + b_side), CLEAN_CLEAN, (SOURCE_A, SOURCE_B))
    return SyntheticPair(collection, GroundTruth.from_links("sameAs", links), keep, misplace)


def central(n_per_source: int = 25_000, seed: int = 0) -> SyntheticPair:
    """Heavily overlapping sources with aligned schemas."""
    return generate_pair(n_per_source, keep=0.6, misplace=0.0, seed=seed)


def peripheral(n_per_source: int = 25_000, seed: int = 0) -> SyntheticPair:
    """Sparsely overlapping sources whose shared tokens often sit under other fields."""
    return generate_pair(n_per_source, keep=0.12, misplace=0.6, seed=seed)
