import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from erblock.engine import (Engine, JobError, MemoryCeilingExceeded, PartitionedDataset, fnv1a_64, pack_key,
                            pairwise_tasks, sequential_map_group_reduce, task_keys_for, unpack_key)


def word_map(line):
    for w in line.split():
        yield w.encode(), 1


def word_reduce(key, values):
    yield key.decode(), sum(values)


def test_word_count():
    data = PartitionedDataset.from_records(["a b", "b"], 2)
    assert sorted(Engine(workers=2).map_group_reduce(data, word_map, word_reduce)) == [("a", 1), ("b", 2)]


def test_empty_input():
    assert Engine().map_group_reduce(PartitionedDataset.from_records([], 3), word_map, word_reduce) == []


def test_fnv_known_vectors():
    assert fnv1a_64(b"") == 0xCBF29CE484222325
    assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C


def test_pack_roundtrip():
    assert unpack_key(pack_key("t", "x y")) == ["t", "x y"]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(alphabet="abcde ", max_size=12), max_size=30), st.integers(1, 6),
       st.sampled_from([1, 2, 8]), st.integers(1, 5))
def test_engine_equals_sequential_oracle(lines, parts, workers, reducers):
    data = PartitionedDataset.from_records(lines, parts)
    got = Engine(workers=workers, reducers=reducers).map_group_reduce(data, word_map, word_reduce)
    expected = Counter(w for line in lines for w in line.split())
    assert dict(got) == dict(expected)
    assert sorted(got) == sorted(sequential_map_group_reduce(lines, word_map, word_reduce))


def test_output_independent_of_workers():
    rng = random.Random(7)
    lines = [" ".join(rng.choice("abcdefgh") for _ in range(6)) for _ in range(200)]
    data = PartitionedDataset.from_records(lines, 5)
    outs = {tuple(Engine(workers=w).map_group_reduce(data, word_map, word_reduce)) for w in (1, 2, 8)}
    assert len(outs) == 1


@pytest.mark.parametrize("m", range(1, 33))
def test_pairwise_tasks_cover_each_unordered_pair_once(m):
    tasks = pairwise_tasks(m)
    assert len(tasks) == m * (m + 1) // 2
    assert sorted((t.left, t.right) for t in tasks) == sorted((i, j) for i in range(1, m + 1) for j in range(i, m + 1))
    for p in range(1, m + 1):
        assert all(p in (t.left, t.right) for t in task_keys_for(p, m))


def test_pairwise_tasks_examples():
    assert {t.key for t in pairwise_tasks(3)} == {"1_1", "1_2", "1_3", "2_2", "2_3", "3_3"}
    assert [t.key for t in pairwise_tasks(1)] == ["1_1"]
    assert {t.key for t in task_keys_for(2, 3)} >= {"1_2", "2_2", "2_3"}
    with pytest.raises(ValueError):
        pairwise_tasks(0)


def test_map_failure_names_record():
    def bad(record):
        raise RuntimeError("boom")
        yield  # pragma: no cover
    with pytest.raises(JobError, match="boom"):
        Engine().map_group_reduce(PartitionedDataset.from_records(["x"], 1), bad, word_reduce)


def test_non_bytes_key_rejected():
    with pytest.raises(JobError):
        Engine().map_group_reduce(PartitionedDataset.from_records(["x"], 1), lambda r: [(r, 1)], word_reduce)


def test_memory_ceiling():
    data = PartitionedDataset.from_records(["a b c d"], 1)
    with pytest.raises(MemoryCeilingExceeded):
        Engine(max_shuffle_records=3).map_group_reduce(data, word_map, word_reduce)
    assert len(Engine(max_shuffle_records=4).map_group_reduce(data, word_map, word_reduce)) == 4
