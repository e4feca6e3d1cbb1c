"""Local map / shuffle / reduce execution.

Jobs run over logical partitions. Map tasks run one per partition, the shuffle
routes every emitted key to a reducer by 64-bit FNV-1a hash, and each reducer
processes its keys in byte order. Results depend only on the partitioning and
the reducer count, never on how many worker threads execute the tasks.
"""
from __future__ import annotations

import logging
import os
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

logger = logging.getLogger(__name__)

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
KEY_SEP = b"\x1f"


class JobError(RuntimeError):
    """A user map or reduce function failed; the message names the record or key."""


class MemoryCeilingExceeded(RuntimeError):
    """A job emitted more intermediate records than its configured ceiling."""


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & _MASK64
    return h


def pack_key(*parts: str) -> bytes:
    """Join string parts into one shuffle key."""
    return KEY_SEP.join(p.encode("utf-8") for p in parts)


def unpack_key(key: bytes) -> list[str]:
    return [p.decode("utf-8") for p in key.split(KEY_SEP)]


def default_workers() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class PartitionedDataset:
    partitions: tuple[tuple[Any, ...], ...]

    def __post_init__(self):
        if not self.partitions:
            raise ValueError("a partitioned dataset needs at least one partition")
        object.__setattr__(self, "partitions", tuple(tuple(p) for p in self.partitions))

    @classmethod
    def from_records(cls, records: Iterable[Any], partition_count: int = 1) -> "PartitionedDataset":
        """Split records into contiguous, nearly equal chunks (order preserved)."""
        if partition_count < 1:
            raise ValueError("partition_count must be >= 1")
        records = list(records)
        size, extra = divmod(len(records), partition_count)
        parts, start = [], 0
        for i in range(partition_count):
            end = start + size + (1 if i < extra else 0)
            parts.append(tuple(records[start:end]))
            start = end
        return cls(tuple(parts))

    @property
    def partition_count(self) -> int:
        return len(self.partitions)

    def records(self) -> Iterable[Any]:
        for part in self.partitions:
            yield from part

    def __len__(self) -> int:
        return sum(len(p) for p in self.partitions)


@dataclass(frozen=True, order=True)
class PairTask:
    left: int
    right: int

    def __post_init__(self):
        if not 1 <= self.left <= self.right:
            raise ValueError(f"invalid pair task ({self.left}, {self.right})")

    @property
    def key(self) -> str:
        return f"{self.left}_{self.right}"


def pairwise_tasks(partition_count: int) -> list[PairTask]:
    """All (i, j) with 1 <= i <= j <= m, each exactly once."""
    if partition_count < 1:
        raise ValueError("pairwise_tasks needs at least one partition")
    m = partition_count
    return [PairTask(i, j) for i in range(1, m + 1) for j in range(i, m + 1)]


def task_keys_for(partition: int, partition_count: int) -> list[PairTask]:
    """Tasks a record from ``partition`` (1-based) takes part in.

    With 3 partitions, partition 2 yields 1_2, 2_2 and 2_3.
    """
    return [PairTask(min(partition, q), max(partition, q)) for q in range(1, partition_count + 1)]


@dataclass
class Engine:
    """Executes map/shuffle/reduce jobs on a thread pool.

    ``max_shuffle_records`` bounds the number of intermediate (key, value)
    pairs a single job may hold; there is no spill to disk.
    """

    workers: int | None = None
    reducers: int = 8
    max_shuffle_records: int | None = None

    def __post_init__(self):
        if self.workers is None:
            self.workers = default_workers()
        if self.workers < 1 or self.reducers < 1:
            raise ValueError("workers and reducers must be >= 1")

    def _run(self, fn: Callable, items: Sequence) -> list:
        if self.workers == 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def map_group_reduce(
        self,
        dataset: PartitionedDataset,
        map_fn: Callable[[Any], Iterable[tuple[bytes, Any]]],
        reduce_fn: Callable[[bytes, list], Iterable[Any]],
        *,
        with_partition: bool = False,
    ) -> list:
        """Map every record, group emitted values by key, reduce each group.

        When ``with_partition`` is set, ``map_fn`` is called as
        ``map_fn(record, partition_index, partition_count)`` with a 1-based index.
        """
        m = dataset.partition_count

        def map_partition(indexed):
            idx, records = indexed
            buckets: list[dict[bytes, list]] = [defaultdict(list) for _ in range(self.reducers)]
            for record in records:
                try:
                    emitted = map_fn(record, idx + 1, m) if with_partition else map_fn(record)
                    for key, value in emitted:
                        if not isinstance(key, bytes):
                            raise TypeError(f"shuffle keys must be bytes, got {type(key).__name__}")
                        buckets[fnv1a_64(key) % self.reducers][key].append(value)
                except Exception as exc:
                    raise JobError(f"map failed on record {_describe(record)}: {exc}") from exc
            return buckets

        mapped = self._run(map_partition, list(enumerate(dataset.partitions)))

        if self.max_shuffle_records is not None:
            total = sum(len(v) for buckets in mapped for b in buckets for v in b.values())
            if total > self.max_shuffle_records:
                raise MemoryCeilingExceeded(
                    f"job emitted {total} intermediate records; ceiling is {self.max_shuffle_records}"
                )

        def reduce_bucket(r):
            grouped: dict[bytes, list] = defaultdict(list)
            for buckets in mapped:
                for key, values in buckets[r].items():
                    grouped[key].extend(values)
            out = []
            for key in sorted(grouped):
                try:
                    out.extend(reduce_fn(key, grouped[key]))
                except Exception as exc:
                    raise JobError(f"reduce failed on key {key!r}: {exc}") from exc
            return out

        reduced = self._run(reduce_bucket, list(range(self.reducers)))
        return [x for part in reduced for x in part]

    def map_partitions(self, dataset: PartitionedDataset, fn: Callable[[tuple], Any]) -> list:
        """Apply ``fn`` to each partition; results come back in partition order."""
        return self._run(fn, list(dataset.partitions))


def map_group_reduce(dataset, map_fn, reduce_fn, *, workers: int | None = None, reducers: int = 8, **kw) -> list:
    return Engine(workers=workers, reducers=reducers).map_group_reduce(dataset, map_fn, reduce_fn, **kw)


def sequential_map_group_reduce(records: Iterable[Any], map_fn, reduce_fn) -> list:
    """Single-threaded reference: same contract, no partitioning or hashing."""
    grouped: dict[bytes, list] = defaultdict(list)
    for record in records:
        for key, value in map_fn(record):
            grouped[key].append(value)
    out = []
    for key in sorted(grouped):
        out.extend(reduce_fn(key, grouped[key]))
    return out


def _describe(record: Any) -> str:
    text = str(getattr(record, "id", None) or repr(record))
    return text if len(text) < 200 else text[:197] + "..."

