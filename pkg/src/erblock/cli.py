"""Command-line benchmark runner: ingest, block, eval, analyze and all."""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import blockfile
from .blocking import (TokenizerConfig, attribute_clustering, clustered_token_blocking, iterative_blocking,
                       pis_blocking, token_blocking)
from .blocking.attribute import AttributeClustering, ClusteringError
from .blocking.iterative import MatchOracle
from .blocking.pis import infix_blocks
from .engine import Engine, JobError, MemoryCeilingExceeded
from .eval import (AGGREGATE, DISTINCT, common_token_distribution, comparison_counts, fn_analysis,
                   sample_structural_analysis, score)
from .ingest import (IngestStats, ParseError, build_descriptions, description_stats, filter_to_ground_truth,
                     load_ground_truth, load_ground_truth_tsv, parse_ntriples, read_descriptions,
                     write_descriptions)
from .model import CLEAN_CLEAN, DIRTY, MODES, EntityCollection, GroundTruth, ModelError

logger = logging.getLogger("erblock")

ALGORITHMS = ("token", "attr-cluster", "pis", "iterative")
EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_RESOURCE = 0, 1, 2, 3

DESCRIPTIONS = "descriptions.jsonl"
BLOCKS = "blocks.jsonl"
CLUSTERS = "clusters.tsv"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    inputs: list[tuple[str, str]] = field(default_factory=list)
    mode: str = DIRTY
    gt_path: str | None = None
    gt_predicate: str = "http://www.w3.org/2002/07/owl#sameAs"
    algorithm: str = "token"
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    workers: int = 1
    partitions: int = 4
    max_shuffle_records: int | None = None
    out: str = "erblock-out"
    seed: int = 0
    rr_basis: str = AGGREGATE
    strict: bool = False
    filter_to_gt: bool = False
    sample_size: int = 1000

    def validate(self) -> "RunConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}")
        if self.rr_basis not in (AGGREGATE, DISTINCT):
            raise ConfigError("rr-basis must be aggregate or distinct")
        if self.mode == CLEAN_CLEAN and len(self.inputs) != 2:
            raise ConfigError(f"clean-clean mode needs exactly 2 inputs, got {len(self.inputs)}")
        if self.algorithm == "attr-cluster" and self.mode != CLEAN_CLEAN:
            raise ConfigError("attr-cluster requires clean-clean mode")
        if self.workers < 1 or self.partitions < 1:
            raise ConfigError("workers and partitions must be >= 1")
        if self.sample_size < 0:
            raise ConfigError("sample size must be non-negative")
        tags = [t for _, t in self.inputs]
        if len(set(tags)) != len(tags):
            raise ConfigError(f"input source tags must be distinct, got {tags}")
        return self

    def to_dict(self) -> dict:
        """Settings that can change results; worker count and output location cannot."""
        d = asdict(self)
        del d["workers"], d["out"]
        d["tokenizer"] = self.tokenizer.to_dict()
        d["inputs"] = [{"path": p, "source": s} for p, s in self.inputs]
        return d

    def engine(self) -> Engine:
        return Engine(workers=self.workers, max_shuffle_records=self.max_shuffle_records)

    @property
    def sources(self) -> tuple[str, ...]:
        return tuple(s for _, s in self.inputs)


def _parse_input(spec: str) -> tuple[str, str]:
    """``TAG=PATH`` or a bare path, whose file stem becomes the tag."""
    tag, sep, path = spec.partition("=")
    if sep and tag and "/" not in tag:
        return path, tag
    return spec, Path(spec).name.split(".")[0]


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    flat = {k: v for k, v in raw.items() if not isinstance(v, dict) and k != "inputs"}
    if "inputs" in raw:
        items = []
        for item in raw["inputs"]:
            if isinstance(item, str):
                items.append(_parse_input(item))
            else:
                items.append((item["path"], item.get("source") or _parse_input(item["path"])[1]))
        flat["inputs"] = items
    gt = raw.get("ground_truth", {})
    if "path" in gt:
        flat["gt_path"] = gt["path"]
    if "predicate" in gt:
        flat["gt_predicate"] = gt["predicate"]
    engine = raw.get("engine", {})
    for key in ("workers", "partitions", "max_shuffle_records"):
        if key in engine:
            flat[key] = engine[key]
    if "tokenizer" in raw:
        flat["tokenizer"] = raw["tokenizer"]
    known = set(RunConfig.__dataclass_fields__)
    flat = {k.replace("-", "_"): v for k, v in flat.items()}
    unknown = set(flat) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return flat


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file values first, then explicit command-line flags on top."""
    values = load_config(args.config)
    overrides = {
        "mode": args.mode, "algorithm": args.algorithm, "gt_path": args.gt,
        "gt_predicate": args.gt_predicate, "workers": args.workers, "seed": args.seed,
        "out": args.out, "rr_basis": args.rr_basis, "sample_size": args.sample_size,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    if args.strict:
        values["strict"] = True
    if args.filter_to_gt:
        values["filter_to_gt"] = True
    if args.input:
        values["inputs"] = [_parse_input(s) for s in args.input]
    tok = values.pop("tokenizer", {}) or {}
    try:
        config = RunConfig(**values, tokenizer=TokenizerConfig(**tok))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return config.validate()


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _inputs_digest(config: RunConfig) -> dict:
    paths = [p for p, _ in config.inputs] + ([config.gt_path] if config.gt_path else [])
    return {p: _sha256(p) for p in paths}


def _report(config: RunConfig, body: dict) -> dict:
    return {"config": config.to_dict(), "inputs": _inputs_digest(config), **body}


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, indent=2, ensure_ascii=False, sort_keys=False) + "\n", encoding="utf-8")


def _out(config: RunConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _collection(config: RunConfig) -> EntityCollection:
    path = Path(config.out) / DESCRIPTIONS
    if not path.exists():
        raise ConfigError(f"{path} not found; run `erblock ingest` first")
    descriptions = read_descriptions(path)
    sources = config.sources if config.mode == CLEAN_CLEAN else ()
    return EntityCollection(tuple(descriptions), config.mode, sources)


def _ground_truth(config: RunConfig, collection: EntityCollection | None = None) -> GroundTruth:
    if not config.gt_path:
        raise ConfigError("a ground truth is required (--gt)")
    if config.gt_predicate == "tsv" or config.gt_path.endswith((".tsv", ".tsv.gz")):
        gt = load_ground_truth_tsv(config.gt_path)
    else:
        stats = IngestStats()
        gt = load_ground_truth(parse_ntriples(config.gt_path, strict=config.strict), config.gt_predicate,
                               stats=stats)
    if collection is not None:
        gt = gt.restrict(collection.ids)
        if not gt.pairs:
            logger.warning("ground truth has no pairs within the collection; all scores will be zero")
    return gt


def cmd_ingest(config: RunConfig) -> dict:
    engine = config.engine()
    descriptions, per_source = [], {}
    if not config.inputs:
        raise ConfigError("no inputs given (--input)")
    for path, tag in config.inputs:
        stats = IngestStats()
        triples = list(parse_ntriples(path, strict=config.strict, stats=stats))
        ds = build_descriptions(triples, tag, engine=engine, partitions=config.partitions, stats=stats)
        if not ds:
            logger.warning("%s yielded no entity descriptions", path)
        if stats.malformed:
            logger.warning("%s: skipped %d malformed lines", path, stats.malformed)
        per_source[tag] = {**description_stats(ds, stats.triples), "malformed_lines": stats.malformed,
                           "blank_node_triples_dropped": stats.blank_dropped}
        descriptions.extend(ds)
    sources = config.sources if config.mode == CLEAN_CLEAN else ()
    collection = EntityCollection(tuple(descriptions), config.mode, sources)
    if config.filter_to_gt:
        collection = filter_to_ground_truth(collection, _ground_truth(config))
    out = _out(config)
    with open(out / DESCRIPTIONS, "w", encoding="utf-8", newline="\n") as fh:
        write_descriptions(collection, fh)
    total = description_stats(collection, sum(s["rdf_triples"] for s in per_source.values()))
    summary = _report(config, {"ingest": {"total": total, "sources": per_source}})
    _write_json(out / "ingest_summary.json", summary)
    return summary


def _blocks(config: RunConfig, collection: EntityCollection):
    engine, tok, parts = config.engine(), config.tokenizer, config.partitions
    extra = {}
    if config.algorithm == "attr-cluster":
        clustering = attribute_clustering(collection, engine, parts)
        (Path(config.out) / CLUSTERS).write_text(clustering.to_tsv(), encoding="utf-8")
        extra = {"cluster_count": clustering.cluster_count, "median_cluster_size": clustering.median_cluster_size}
        return clustered_token_blocking(collection, clustering, tok, engine, parts), extra
    if config.algorithm == "pis":
        blocks = pis_blocking(collection, tok, engine, parts)
        n = len(infix_blocks(blocks))
        if n == 0:
            logger.warning("infix blocks empty: no subject id has URI structure")
        extra = {"infix_blocks": n}
        return blocks, extra
    return token_blocking(collection, tok, engine, parts), extra


def cmd_block(config: RunConfig) -> dict:
    collection = _collection(config)
    blocks, extra = _blocks(config, collection)
    out = _out(config)
    with open(out / BLOCKS, "w", encoding="utf-8", newline="\n") as fh:
        blockfile.write_blocks(blocks, fh)
    aggregate, distinct = comparison_counts(blocks, config.engine())
    body = {"blocks": len(blocks.blocks), "single_source_blocks": len(blocks.inert),
            "unblocked": len(blocks.unblocked), "comparisons_aggregate": aggregate,
            "comparisons_distinct": distinct, **extra}
    if config.algorithm == "iterative":
        result = iterative_blocking(blocks, MatchOracle.from_ground_truth(_ground_truth(config, collection)))
        with open(out / "entities.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            for e in result.entities:
                fh.write(json.dumps({"id": e.id, "memberIds": sorted(e.member_ids)}, ensure_ascii=False) + "\n")
        body["iterative"] = {"entities": len(result.entities), "comparisons": result.comparisons,
                             "passes": result.passes, "merges": len(result.merges)}
    summary = _report(config, {"block": body})
    _write_json(out / "block_summary.json", summary)
    return summary


def _load_blocks(config: RunConfig, collection: EntityCollection):
    path = Path(config.out) / BLOCKS
    if not path.exists():
        raise ConfigError(f"{path} not found; run `erblock block` first")
    with open(path, encoding="utf-8") as fh:
        return blockfile.read_blocks(fh, collection)


def cmd_eval(config: RunConfig) -> dict:
    collection = _collection(config)
    blocks = _load_blocks(config, collection)
    gt = _ground_truth(config, collection)
    report = score(blocks, gt, rr_basis=config.rr_basis, engine=config.engine())
    out = _out(config)
    if collection.mode == CLEAN_CLEAN and len(collection):
        dist = common_token_distribution(collection, config.tokenizer)
        report.per_entity_common_token_median = dist.median
        (out / "common_tokens.csv").write_text(dist.to_csv(), encoding="utf-8")
        clusters = out / CLUSTERS
        if config.algorithm == "attr-cluster" and clusters.exists():
            clustering = AttributeClustering.from_tsv(clusters.read_text(encoding="utf-8"))
            report.cluster_count = clustering.cluster_count
            report.median_cluster_size = clustering.median_cluster_size
            clustered = common_token_distribution(collection, config.tokenizer, clustering)
            (out / "common_tokens_clustered.csv").write_text(clustered.to_csv(), encoding="utf-8")
    summary = _report(config, {"metrics": report.to_dict()})
    _write_json(out / "metrics.json", summary)
    (out / "metrics.txt").write_text(report.to_table(), encoding="utf-8")
    print(report.to_table(), end="")
    return summary


def cmd_analyze(config: RunConfig) -> dict:
    collection = _collection(config)
    blocks = _load_blocks(config, collection)
    gt = _ground_truth(config, collection)
    fn = fn_analysis(blocks, gt)
    structural = sample_structural_analysis(gt, collection, config.sample_size, config.seed)
    summary = _report(config, {"fn_analysis": fn.to_dict(), "structural": structural.to_dict()})
    _write_json(_out(config) / "analysis.json", summary)
    return summary


def cmd_all(config: RunConfig) -> dict:
    cmd_ingest(config)
    result = cmd_block(config)
    if not config.gt_path:
        logger.warning("no ground truth given; skipping eval and analyze")
        return result
    result = cmd_eval(config)
    cmd_analyze(config)
    return result


COMMANDS = {"ingest": cmd_ingest, "block": cmd_block, "eval": cmd_eval, "analyze": cmd_analyze, "all": cmd_all}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run manifest; flags override its values")
    common.add_argument("--input", action="append", metavar="[TAG=]PATH",
                        help="N-Triples input (repeat once per source)")
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--algorithm", choices=ALGORITHMS)
    common.add_argument("--gt", help="ground truth: N-Triples links or a two-column TSV")
    common.add_argument("--gt-predicate", help="link predicate, e.g. owl:sameAs, or 'tsv'")
    common.add_argument("--workers", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("--rr-basis", choices=(AGGREGATE, DISTINCT))
    common.add_argument("--sample-size", type=int)
    common.add_argument("--strict", action="store_true", help="fail on the first malformed line")
    common.add_argument("--filter-to-gt", action="store_true",
                        help="keep only descriptions that appear in the ground truth")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="erblock", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        config = resolve_config(args)
        COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MemoryCeilingExceeded as exc:
        print(f"resource ceiling exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ParseError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ModelError, JobError, ClusteringError, OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
