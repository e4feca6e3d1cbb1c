import random

import pytest

from conftest import random_collection
from erblock import datasets
from erblock.blocking import IterativeResolver, MatchOracle, iterative_blocking, token_blocking
from erblock.blocking.iterative import VALUE_SIMILARITY, MergedEntity
from erblock.eval import candidate_pairs
from erblock.model import CLEAN_CLEAN, DIRTY, GroundTruth, transitive_closure


def figure5_result():
    blocks = token_blocking(datasets.figure5())
    return blocks, iterative_blocking(blocks, MatchOracle.from_ground_truth(datasets.figure5_ground_truth()))


def test_figure5_partition():
    _, result = figure5_result()
    assert result.partition() == {frozenset({"e1", "e6"}), frozenset({"e2", "e5", "e8"}),
                                  frozenset({"e3"}), frozenset({"e4"}), frozenset({"e7"})}


def test_figure5_e5_e8_found_without_shared_block():
    blocks, result = figure5_result()
    assert ("e5", "e8") not in candidate_pairs(blocks)
    assert ("e5", "e8") in result.matched_pairs()


def test_no_matches_gives_singletons():
    blocks = token_blocking(datasets.figure1())
    result = iterative_blocking(blocks, MatchOracle.from_ground_truth(GroundTruth("p")))
    assert result.partition() == {frozenset({i}) for i in blocks.universe.ids}
    assert result.passes == 1


def test_merged_id():
    assert MergedEntity(frozenset({"e5", "e2", "e8"})).id == "m:e2+e5+e8"
    assert MergedEntity(frozenset({"e3"})).id == "e3"
    with pytest.raises(ValueError):
        MergedEntity(frozenset())


def test_oracle_validation():
    with pytest.raises(ValueError):
        MatchOracle()
    with pytest.raises(ValueError):
        MatchOracle(VALUE_SIMILARITY, threshold=2)
    with pytest.raises(ValueError):
        MatchOracle("coin-flip")


def test_value_similarity_oracle_merges_identical_descriptions():
    blocks = token_blocking(datasets.figure1())
    result = iterative_blocking(blocks, MatchOracle(VALUE_SIMILARITY, threshold=0.35))
    assert frozenset({"e1", "e6"}) in result.partition()


def test_comparisons_never_repeat():
    blocks, result = figure5_result()
    n = len(blocks.universe)
    assert result.comparisons <= n * (n - 1) // 2


@pytest.mark.parametrize("seed", range(40))
def test_partition_fixpoint_and_recall(seed):
    rng = random.Random(seed)
    mode = CLEAN_CLEAN if seed % 2 else DIRTY
    c = random_collection(rng, n=rng.randint(1, 30), mode=mode, max_tokens=4)
    ids = sorted(c.ids)
    links = [tuple(rng.sample(ids, 2)) for _ in range(rng.randint(0, len(ids) // 2))] if len(ids) > 1 else []
    gt = GroundTruth.from_links("p", links)
    blocks = token_blocking(c)
    oracle = MatchOracle.from_ground_truth(gt)
    result = iterative_blocking(blocks, oracle)
    parts = result.partition()
    members = [x for p in parts for x in p]
    assert len(members) == len(set(members)) and set(members) == c.ids
    again = iterative_blocking(blocks, oracle, initial=parts)
    assert again.partition() == parts
    relevant = gt.relevant_pairs(c)
    found = transitive_closure(result.matched_pairs()) & relevant
    assert len(found) >= len(relevant & candidate_pairs(blocks))


def test_resolver_estimator():
    est = IterativeResolver()
    entities = est.fit_predict(token_blocking(datasets.figure5()), datasets.figure5_ground_truth())
    assert {e.id for e in entities} == {"m:e1+e6", "m:e2+e5+e8", "e3", "e4", "e7"}
    with pytest.raises(ValueError):
        IterativeResolver().fit(token_blocking(datasets.figure5()))
