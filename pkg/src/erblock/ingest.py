"""N-Triples parsing, entity-description assembly and ground-truth loading."""
from __future__ import annotations

import gzip
import io
import json
import logging
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .engine import Engine, PartitionedDataset
from .model import (EntityCollection, EntityDescription, GroundTruth, LITERAL, RESOURCE, Value,
                    canonical_pair, transitive_closure)

logger = logging.getLogger(__name__)

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

PREFIXES = {
    "owl": "http://www.w3.org/2002/07/owl#",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "umbel": "http://umbel.org/umbel#",
    "dct": "http://purl.org/dc/terms/",
    "foaf": "http://xmlns.com/foaf/0.1/",
    "skos": "http://www.w3.org/2004/02/skos/core#",
}


def expand(name: str) -> str:
    """Expand a known CURIE such as ``owl:sameAs``; anything else is returned unchanged."""
    prefix, sep, local = name.partition(":")
    if sep and prefix in PREFIXES and not local.startswith("//"):
        return PREFIXES[prefix] + local
    return name


class ParseError(ValueError):
    def __init__(self, line_no: int, line: str, reason: str):
        super().__init__(f"line {line_no}: {reason}: {line.strip()[:120]!r}")
        self.line_no = line_no


@dataclass(frozen=True)
class BlankNode:
    label: str


@dataclass(frozen=True)
class Triple:
    subject: str | BlankNode
    predicate: str
    object: Value | BlankNode

    @property
    def has_blank(self) -> bool:
        return isinstance(self.subject, BlankNode) or isinstance(self.object, BlankNode)


@dataclass
class IngestStats:
    lines: int = 0
    triples: int = 0
    malformed: int = 0
    blank_dropped: int = 0
    warnings: list[str] = field(default_factory=list)

    def warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)


_IRI = r"<([^<>\"{}|^`\\\x00-\x20]*(?:\\[uU][0-9A-Fa-f]{4,8}[^<>\"{}|^`\\\x00-\x20]*)*)>"
_BNODE = r"_:([A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)"
_LITERAL = r'"((?:[^"\\\n\r]|\\.)*)"(?:@[A-Za-z]+(?:-[A-Za-z0-9]+)*|\^\^' + _IRI + r")?"
_LINE = re.compile(
    rf"^\s*(?:{_IRI}|{_BNODE})\s*{_IRI}\s*(?:{_IRI}|{_BNODE}|{_LITERAL})\s*\.\s*(?:#.*)?$"
)
_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")


def _unescape(text: str) -> str:
    def sub(m):
        code = m.group(1)
        if code[0] in "uU" and len(code) > 1:
            return chr(int(code[1:], 16))
        if code in _ESCAPES:
            return _ESCAPES[code]
        raise ValueError(f"bad escape \\{code}")
    return _ESCAPE.sub(sub, text) if "\\" in text else text


def parse_line(line: str) -> Triple | None:
    """Parse one N-Triples line; None for blank/comment lines, ValueError if malformed."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    m = _LINE.match(stripped)
    if not m:
        raise ValueError("not a valid N-Triples statement")
    s_iri, s_blank, p_iri, o_iri, o_blank, o_lit, _dt = m.groups()
    subject = BlankNode(s_blank) if s_blank is not None else _unescape(s_iri)
    if not subject:
        raise ValueError("empty subject IRI")
    if o_iri is not None:
        obj = Value(RESOURCE, _unescape(o_iri))
    elif o_blank is not None:
        obj = BlankNode(o_blank)
    else:
        obj = Value(LITERAL, _unescape(o_lit))
    return Triple(subject, _unescape(p_iri), obj)


def _lines(source) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open_text(source) as fh:
            yield from fh
    elif isinstance(source, bytes):
        yield from io.StringIO(source.decode("utf-8"))
    elif hasattr(source, "read"):
        for line in source:
            yield line.decode("utf-8") if isinstance(line, bytes) else line
    else:
        for line in source:
            yield line.decode("utf-8") if isinstance(line, bytes) else line


def open_text(path) -> IO[str]:
    """Open a UTF-8 text file, transparently gunzipping ``.gz`` or gzip-magic files."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x1f\x8b":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return open(path, encoding="utf-8")


def parse_ntriples(source, *, strict: bool = False, stats: IngestStats | None = None,
                   first_line: int = 1) -> Iterator[Triple]:
    """Yield triples from N-Triples text (path, bytes, file object or line iterable).

    Malformed lines are counted and skipped, or raise ParseError when ``strict``.
    """
    stats = stats if stats is not None else IngestStats()
    for line_no, line in enumerate(_lines(source), start=first_line):
        stats.lines += 1
        try:
            triple = parse_line(line)
        except ValueError as exc:
            if strict:
                raise ParseError(line_no, line, str(exc)) from None
            stats.malformed += 1
            continue
        if triple is not None:
            stats.triples += 1
            yield triple


def split_at_lines(data: bytes, parts: int) -> list[tuple[int, bytes]]:
    """Cut ``data`` into about ``parts`` chunks on line boundaries.

    Returns (first line number, chunk) so errors can still name the line.
    """
    parts = max(1, parts)
    step = max(1, len(data) // parts)
    chunks, start, line_no = [], 0, 1
    while start < len(data):
        end = data.find(b"\n", min(start + step, len(data)) - 1)
        end = len(data) if end < 0 else end + 1
        chunk = data[start:end]
        chunks.append((line_no, chunk))
        line_no += chunk.count(b"\n")
        start = end
    return chunks


def parse_ntriples_parallel(data: bytes, *, partitions: int = 4, strict: bool = False,
                            engine: Engine | None = None, stats: IngestStats | None = None) -> list[Triple]:
    """Parse byte-range partitions concurrently; output keeps file order."""
    engine = engine or Engine()
    stats = stats if stats is not None else IngestStats()

    def parse_chunk(item):
        first, chunk = item
        local = IngestStats()
        return list(parse_ntriples(chunk, strict=strict, stats=local, first_line=first)), local

    results = engine._run(parse_chunk, split_at_lines(data, partitions))
    triples = []
    for part, local in results:
        triples.extend(part)
        stats.lines += local.lines
        stats.triples += local.triples
        stats.malformed += local.malformed
    return triples


def build_descriptions(triples: Iterable[Triple], source: str = "", *, engine: Engine | None = None,
                       partitions: int = 4, stats: IngestStats | None = None) -> list[EntityDescription]:
    """Group triples by subject into descriptions, dropping any triple with a blank node."""
    engine = engine or Engine()
    kept = []
    for t in triples:
        if t.has_blank:
            if stats is not None:
                stats.blank_dropped += 1
            continue
        kept.append(t)
    data = PartitionedDataset.from_records(kept, partitions)

    def map_fn(t: Triple):
        yield t.subject.encode("utf-8"), (t.predicate, t.object)

    def reduce_fn(key, pairs):
        yield EntityDescription(key.decode("utf-8"), tuple(pairs), source)

    return sorted(engine.map_group_reduce(data, map_fn, reduce_fn), key=lambda d: d.id)


def load_ground_truth(triples: Iterable[Triple], predicate: str,
                      restrict_to: tuple[Iterable[str], ...] | None = None,
                      stats: IngestStats | None = None) -> GroundTruth:
    """Collect links with ``predicate`` and close them transitively.

    With ``restrict_to``, only pairs whose two ends lie in the union of the
    given id sets are kept (after closure).
    """
    if not predicate:
        raise ValueError("ground-truth predicate must be non-empty")
    full = expand(predicate)
    links = []
    for t in triples:
        if t.predicate != full or t.has_blank or not t.object.is_resource:
            continue
        if t.subject != t.object.text:
            links.append((t.subject, t.object.text))
    if not links and stats is not None:
        stats.warn(f"no triples with predicate {full}; ground truth is empty")
    gt = GroundTruth(full, transitive_closure(links))
    if restrict_to is not None:
        gt = gt.restrict(set().union(*map(set, restrict_to)))
    return gt


def load_ground_truth_tsv(source, predicate: str = "tsv") -> GroundTruth:
    """Two tab-separated ids per line; '#' comments and blank lines are ignored."""
    links = []
    for line in _lines(source):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        a, b = line.split("\t")[:2]
        if a != b:
            links.append((a, b))
    return GroundTruth(predicate, transitive_closure(links))


def filter_to_ground_truth(collection: EntityCollection, gt: GroundTruth) -> EntityCollection:
    """Keep only descriptions that take part in a ground-truth pair, minus the link triples themselves."""
    linked = gt.ids
    predicate = expand(gt.predicate)
    kept = []
    for d in collection:
        if d.id not in linked:
            continue
        pairs = tuple(
            (a, v) for a, v in d.pairs
            if not (a == predicate and v.is_resource and v.text != d.id and canonical_pair(d.id, v.text) in gt.pairs)
        )
        kept.append(EntityDescription(d.id, pairs, d.source))
    return EntityCollection(tuple(kept), collection.mode, collection.sources)


def description_stats(descriptions: Iterable[EntityDescription], triples: int | None = None) -> dict:
    """Dataset summary: triples, descriptions, avg pairs, attributes and entity types."""
    descriptions = list(descriptions)
    attributes, types, n_pairs = set(), set(), 0
    for d in descriptions:
        n_pairs += len(d.pairs)
        for a, v in d.pairs:
            attributes.add(a)
            if a == RDF_TYPE:
                types.add(v.text)
    return {
        "rdf_triples": triples if triples is not None else n_pairs,
        "entity_descriptions": len(descriptions),
        "avg_pairs_per_description": round(n_pairs / len(descriptions), 2) if descriptions else 0.0,
        "attributes": len(attributes),
        "entity_types": len(types),
    }


def dump_description(d: EntityDescription) -> str:
    record = {"id": d.id, "source": d.source, "pairs": [[a, v.text, v.kind] for a, v in d.pairs]}
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def write_descriptions(descriptions: Iterable[EntityDescription], fh: IO[str]) -> int:
    n = 0
    for d in sorted(descriptions, key=lambda d: (d.source, d.id)):
        fh.write(dump_description(d) + "\n")
        n += 1
    return n


def read_descriptions(source) -> list[EntityDescription]:
    out = []
    for line in _lines(source):
        if not line.strip():
            continue
        rec = json.loads(line)
        pairs = tuple((a, Value(kind, text)) for a, text, kind in rec["pairs"])
        out.append(EntityDescription(rec["id"], pairs, rec.get("source", "")))
    return out


def group_by_source(descriptions: Iterable[EntityDescription]) -> dict[str, list[EntityDescription]]:
    groups: dict[str, list[EntityDescription]] = defaultdict(list)
    for d in descriptions:
        groups[d.source].append(d)
    return dict(groups)
