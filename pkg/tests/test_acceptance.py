"""Acceptance checks. Each sub-check is its own test and prints a PASS/FAIL line
in the session summary; tolerances are fixed in the constants below."""
import json
import random
import time

import pytest

from conftest import random_collection, record
from erblock import datasets, synth
from erblock.blockfile import dumps_blocks
from erblock.blocking import (PrefixTable, attribute_clustering, attribute_clustering_blocking, decompose_uri,
                              iterative_blocking, pis_blocking, token_blocking)
from erblock.blocking.iterative import MatchOracle
from erblock.engine import Engine, pairwise_tasks
from erblock.eval import AGGREGATE, DISTINCT, candidate_pairs, fn_analysis, h3r, sample_structural_analysis, score
from erblock.model import CLEAN_CLEAN, DIRTY, GroundTruth
from test_diagnostics import crafted
from test_metrics import close, oracle, random_case
from test_uri import random_uri

H3R_DECIMALS = 4                 # reference percentages carry 2 decimals
FIGURE_BUDGET_S = 1.0
ORACLE_SEEDS = 200
ORACLE_BUDGET_S = 60.0
SCALED_BUDGET_S = 300.0
SCALED_PER_SOURCE = 25_000

SAVED = {("e1", "e5"), ("e1", "e7"), ("e2", "e4"), ("e3", "e4"), ("e4", "e5"), ("e5", "e6"), ("e6", "e7")}


# ---- criterion 1: figure-exact micro examples ----------------------------------

def naive_index(collection):
    import re
    index = {}
    for d in collection:
        for _, v in d.pairs:
            for t in re.split(r"[^0-9a-z]+", v.text.lower()):
                if t:
                    index.setdefault(t, set()).add(d.id)
    return index


def test_c1_token_blocks():
    t0 = time.perf_counter()
    blocks = token_blocking(datasets.figure1())
    got = {b.key.term: set(b.members) for b in blocks.all_blocks()}
    ok = got == naive_index(datasets.figure1()) and got["eiffel"] == {"e1", "e2", "e6"} \
        and got["paris"] == {"e1", "e3", "e6"}
    elapsed = time.perf_counter() - t0
    assert record("C1.token-blocks", ok and elapsed < FIGURE_BUDGET_S, f"{len(got)} blocks, {elapsed:.3f}s")


def test_c1_e1_e6_four_blocks():
    shared = sorted(b.key.term for b in token_blocking(datasets.figure1()) if {"e1", "e6"} <= b.members)
    assert record("C1.e1-e6-in-4-blocks", len(shared) == 4, f"blocks {shared}")


@pytest.mark.xfail(strict=True, reason="the example data leaves 13 pairs, (e4, e7) shares no token either")
def test_c1_exactly_seven_excluded():
    cands = candidate_pairs(token_blocking(datasets.figure1()))
    all_pairs = {(f"e{i}", f"e{j}") for i in range(1, 8) for j in range(i + 1, 8)}
    excluded = all_pairs - cands
    extra = sorted(excluded - SAVED)
    assert record("C1.exactly-7-excluded", excluded == SAVED,
                  f"{len(cands)} of 21 remain; also excluded {extra}")


def atc_fig1():
    c = datasets.figure1(CLEAN_CLEAN)
    return c, attribute_clustering(c), attribute_clustering_blocking(c)


def test_c1_atc_about_work():
    _, clustering, _ = atc_fig1()
    ok = clustering.cluster_of("D1", "about") == clustering.cluster_of("D2", "work")
    assert record("C1.atc-about-work", ok, f"cluster {clustering.cluster_of('D1', 'about')}")


def test_c1_atc_discards_e1_e3():
    _, _, blocks = atc_fig1()
    assert record("C1.atc-discards-e1-e3", ("e1", "e3") not in candidate_pairs(blocks))


@pytest.mark.xfail(strict=True, reason="'work' clusters with 'location', so paris is shared inside one cluster")
def test_c1_atc_discards_e3_e6():
    _, _, blocks = atc_fig1()
    holding = [str(b.key) for b in blocks if {"e3", "e6"} <= b.members]
    assert record("C1.atc-discards-e3-e6", ("e3", "e6") not in candidate_pairs(blocks),
                  f"still co-occur in {holding}")


def test_c1_atc_keeps_e4_e6_in_c1_tower():
    _, _, blocks = atc_fig1()
    ok = any(str(b.key) == "C1.tower" and {"e4", "e6"} <= b.members for b in blocks)
    assert record("C1.atc-C1.tower-e4-e6", ok)


def test_c1_liris():
    uri = "http://liris.cnrs.fr/olivier.aubert/foaf.rdf#me"
    table = PrefixTable.learn([uri, "http://liris.cnrs.fr/pierre.antoine/foaf.rdf#me",
                               "http://liris.cnrs.fr/amelie.cordier/foaf.rdf#me"])
    d = decompose_uri(uri, table)
    ok = (d.prefix, d.infix, d.suffix) == ("http://liris.cnrs.fr", "/olivier.aubert", "/foaf.rdf#me")
    assert record("C1.liris-split", ok, f"{d.prefix} | {d.infix} | {d.suffix}")


def test_c1_iterative_figure5():
    blocks = token_blocking(datasets.figure5())
    result = iterative_blocking(blocks, MatchOracle.from_ground_truth(datasets.figure5_ground_truth()))
    want = {frozenset({"e1", "e6"}), frozenset({"e2", "e5", "e8"}), frozenset({"e3"}), frozenset({"e4"}),
            frozenset({"e7"})}
    ok = result.partition() == want and ("e5", "e8") not in candidate_pairs(blocks) \
        and ("e5", "e8") in result.matched_pairs()
    assert record("C1.iterative-fig5", ok, f"{len(result.entities)} entities, {result.passes} passes")


# ---- criterion 2: H3R on reference (RR, recall) pairs ------------------------------

RR = {"token-clean": [88.51, 86.81, 96.03, 89.48, 92.09, 54.50, 94.04],
      "token-dirty": [90.08, 90.87, 92.67, 90.01, 97.48, -58.85, 82.93],
      "atc": [97.80, 98.52, 98.89, 99.37, 93.54, 66.80, 96.55],
      "pis-clean": [92.48, 93.72, 98.34, 98.99, 96.30, None, 94.72],
      "pis-dirty": [92.16, 91.44, 90.84, 91.76, 95.59, None, 83.78]}
RECALL = {"token-clean": [98.38, 92.46, 95.52, 87.76, 72.13, 99.92, 99.54],
          "token-dirty": [98.38, 89.99, 94.85, 87.95, 77.34, 99.92, 99.54],
          "atc": [97.31, 68.42, 92.10, 76.84, 71.11, 99.55, 99.54],
          "pis-clean": [100, 91.71, 87.68, 95.44, 68.17, None, 99.54],
          "pis-dirty": [100, 89.25, 87.06, 95.50, 74.12, None, 99.54]}
H3R = {"token-clean": [93.18, 89.55, 95.77, 88.61, 80.90, 70.53, 97.04],
       "token-dirty": [94.05, 90.43, 93.75, 88.97, 86.25, "N/A", 90.48],
       "atc": [97.55, 80.76, 95.37, 86.66, 80.80, 79.95, 98.16],
       "pis-clean": [96.09, 92.70, 92.70, 97.18, 79.83, None, 97.07],
       "pis-dirty": [95.92, 90.33, 88.91, 93.59, 83.50, None, 90.98]}
CELLS = [(m, i) for m in RR for i in range(7) if RR[m][i] is not None]
# Reference harmonic means that do not follow from their own inputs.
INCONSISTENT = {("token-clean", 6), ("atc", 6)}
PARAMS = [pytest.param(m, i, id=f"{m}-D{i + 1}",
                       marks=[pytest.mark.xfail(strict=True, reason="reference value inconsistent with its inputs")]
                       if (m, i) in INCONSISTENT else [])
          for m, i in CELLS]


@pytest.mark.parametrize("method,i", PARAMS)
def test_c2_h3r_cell(method, i):
    value = h3r(RR[method][i] / 100, RECALL[method][i] / 100)
    expected = H3R[method][i]
    if expected == "N/A":
        ok, shown = value is None, "N/A (RR < 0)"
    else:
        ok = value is not None and abs(round(value, H3R_DECIMALS) - expected / 100) < 1e-9
        shown = f"{value:.6f}"
    assert record(f"C2.h3r-{method}-D{i + 1}", ok, f"computed {shown}, expected {expected}")


# ---- criterion 3: brute-force oracle equivalence -------------------------------------

def test_c3_oracle_equivalence():
    t0 = time.perf_counter()
    mismatches = []
    for seed in range(ORACLE_SEEDS):
        blocks, gt = random_case(seed)
        want = oracle(blocks, gt)
        for basis in (AGGREGATE, DISTINCT):
            r = score(blocks, gt, rr_basis=basis)
            counts = (r.counts.tp, r.counts.fp, r.counts.fn, r.counts.tn)
            ok = counts == (want["tp"], want["fp"], want["fn"], want["tn"]) \
                and close(r.recall, want["recall"]) and close(r.precision, want["precision"]) \
                and close(r.fmeasure, want["f"]) and close(r.rr, want["rr"][basis])
            if not ok:
                mismatches.append((seed, basis))
    elapsed = time.perf_counter() - t0
    assert record("C3.oracle-equivalence", not mismatches and elapsed < ORACLE_BUDGET_S,
                  f"{ORACLE_SEEDS} seeds x 2 bases, {len(mismatches)} mismatches, {elapsed:.1f}s, rel tol 1e-12")


# ---- criterion 4: structural invariants ----------------------------------------------

def test_c4_coverage_and_refinement():
    failures = []
    for seed in range(100):
        rng = random.Random(10_000 + seed)
        c = random_collection(rng, n=rng.randint(2, 40), mode=CLEAN_CLEAN)
        tok = token_blocking(c)
        generated = [tok, pis_blocking(c), token_blocking(c.with_mode(DIRTY))]
        if all(any(d.pairs for d in c.by_source(s)) for s in c.sources):
            atc = attribute_clustering_blocking(c)
            generated.append(atc)
            if not candidate_pairs(atc) <= candidate_pairs(tok):
                failures.append((seed, "refinement"))
        if not all(b.check_coverage() for b in generated):
            failures.append((seed, "coverage"))
    assert record("C4.coverage+atc-subset", not failures, f"100 clean-clean fixtures, failures {failures[:3]}")


def test_c4_uri_reassembly():
    rng = random.Random(99)
    uris = [random_uri(rng) for _ in range(10_000)]
    table = PrefixTable.learn(uris)
    bad = [u for u in uris if table.decompose(u).reassemble() != u]
    assert record("C4.uri-reassembly", not bad, f"10000 URIs, {len(bad)} failures")


def test_c4_iterative_partition_fixpoint():
    failures = 0
    for seed in range(50):
        rng = random.Random(seed)
        c = random_collection(rng, n=rng.randint(2, 30), mode=DIRTY, max_tokens=4)
        ids = sorted(c.ids)
        gt = GroundTruth.from_links("p", [tuple(rng.sample(ids, 2)) for _ in range(len(ids) // 2)])
        blocks = token_blocking(c)
        oracle_ = MatchOracle.from_ground_truth(gt)
        parts = iterative_blocking(blocks, oracle_).partition()
        members = [x for p in parts for x in p]
        ok = len(members) == len(set(members)) and set(members) == c.ids \
            and iterative_blocking(blocks, oracle_, initial=parts).partition() == parts
        failures += not ok
    assert record("C4.iterative-partition-fixpoint", failures == 0, f"50 fixtures, {failures} failures")


# ---- criterion 5: determinism across worker counts --------------------------------------

def run_all(c, gt, workers):
    engine = Engine(workers=workers)
    parts = []
    for blocks in (token_blocking(c, engine=engine), pis_blocking(c, engine=engine),
                   attribute_clustering_blocking(c, engine=engine)):
        parts.append(dumps_blocks(blocks))
        parts.append(json.dumps(score(blocks, gt, engine=engine).to_dict(), sort_keys=True))
    return "\n".join(parts).encode()


def test_c5_worker_determinism():
    differing = []
    for seed in range(20):
        rng = random.Random(500 + seed)
        c = random_collection(rng, n=rng.randint(4, 50), mode=CLEAN_CLEAN)
        if not all(any(d.pairs for d in c.by_source(s)) for s in c.sources):
            c = random_collection(random.Random(seed), n=10, mode=CLEAN_CLEAN, max_tokens=20)
        ids = sorted(c.ids)
        gt = GroundTruth.from_links("p", [tuple(rng.sample(ids, 2)) for _ in range(3)])
        outputs = {run_all(c, gt, w) for w in (1, 2, 8)}
        if len(outputs) != 1:
            differing.append(seed)
    assert record("C5.byte-identical-workers-1-2-8", not differing, f"20 fixtures, differing {differing}")


def test_c5_pairwise_tasks():
    ok = all(
        len(pairwise_tasks(m)) == m * (m + 1) // 2
        and sorted((t.left, t.right) for t in pairwise_tasks(m))
        == [(i, j) for i in range(1, m + 1) for j in range(i, m + 1)]
        for m in range(1, 33)
    )
    assert record("C5.pairwise-tasks", ok, "m in 1..32")


# ---- criterion 6: scaled central vs peripheral trend ------------------------------------

@pytest.mark.slow
def test_c6_scaled_trend():
    t0 = time.perf_counter()
    recalls = {}
    for name in ("central", "peripheral"):
        fixture = getattr(synth, name)(SCALED_PER_SOURCE, seed=0)
        tok = score(token_blocking(fixture.collection), fixture.ground_truth).recall
        atc = score(attribute_clustering_blocking(fixture.collection), fixture.ground_truth).recall
        recalls[name] = (tok, atc)
    elapsed = time.perf_counter() - t0
    (ct, ca), (pt, pa) = recalls["central"], recalls["peripheral"]
    ok = ct > pt and (pt - pa) > (ct - ca) and elapsed < SCALED_BUDGET_S
    record("C6.disclaimer", True, "absolute values at 1e8-triple scale are not reproduced")
    assert record("C6.central-vs-peripheral", ok,
                  f"token recall {ct:.4f} vs {pt:.4f}; AtC drop {ct - ca:.4f} vs {pt - pa:.4f}; "
                  f"{2 * 2 * SCALED_PER_SOURCE} descriptions, {elapsed:.0f}s")


# ---- criterion 7: diagnostics on the crafted fixture --------------------------------------

def test_c7_diagnostics():
    c, blocks, gt = crafted()
    fn = fn_analysis(blocks, gt)
    st = sample_structural_analysis(gt, c, 1000, seed=3)
    got = (fn.fn_pairs, fn.fn_descriptions, fn.with_neighbors, fn.with_neighbor_in_gt, fn.with_neighbor_identified,
           fn.pairs_with_matching_neighbors, fn.pairs_with_common_identified_match,
           tuple(vars(st.matches).values()), tuple(vars(st.non_matches).values()))
    want = (3, 6, 4, 3, 3, 1, 1, (6, 1, 1.0, 1), (60, 5, 2.0, 1))
    assert record("C7.diagnostics-crafted", got == want, "12 descriptions, exact match")
