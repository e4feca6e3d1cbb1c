"""Newline-delimited block files: one JSON record per block, sorted by key."""
from __future__ import annotations

import json
from typing import IO, Iterable

from .model import Block, BlockingCollection, BlockKey, EntityCollection


def block_record(block: Block) -> str:
    record = {"namespace": block.key.namespace.value}
    if block.key.cluster_id is not None:
        record["clusterId"] = block.key.cluster_id
    record["term"] = block.key.term
    record["memberIds"] = sorted(block.members)
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def dumps_blocks(blocks: BlockingCollection) -> str:
    """All blocks, including single-source ones, in key order."""
    return "".join(block_record(b) + "\n" for b in blocks.all_blocks())


def write_blocks(blocks: BlockingCollection, fh: IO[str]) -> int:
    text = dumps_blocks(blocks)
    fh.write(text)
    return text.count("\n")


def parse_blocks(lines: Iterable[str]) -> list[Block]:
    out = []
    for line in lines:
        if not line.strip():
            continue
        rec = json.loads(line)
        key = BlockKey(rec["namespace"], rec["term"], rec.get("clusterId"))
        out.append(Block(key, frozenset(rec["memberIds"])))
    return out


def read_blocks(lines: Iterable[str], universe: EntityCollection) -> BlockingCollection:
    return BlockingCollection.build(parse_blocks(lines), universe)
