"""Prefix / infix / suffix decomposition of URIs.

Prefixes are learned per domain group: URIs are grouped by the first token
after the scheme, and for each URI the chosen prefix is the '/'-aligned
leading substring with the most distinct next path segments across its
group. Suffixes are learned the same way on the reversed remainders, but
are kept only when at least ``MIN_SUFFIX_SUPPORT`` distinct infixes precede
them; a suffix seen after a single infix is indistinguishable from the infix.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

_AUTHORITY = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*://[^/]+")
_GROUP_DELIMS = re.compile(r"[/:.#]+")
MIN_SUFFIX_SUPPORT = 2


@dataclass(frozen=True)
class UriDecomposition:
    prefix: str
    infix: str
    suffix: str | None = None

    def __post_init__(self):
        if not self.infix:
            raise ValueError("infix must be non-empty")

    def reassemble(self) -> str:
        return self.prefix + self.infix + (self.suffix or "")

    @property
    def decomposed(self) -> bool:
        """False when the URI had no usable structure and was kept whole."""
        return bool(self.prefix)


def group_key(uri: str) -> str | None:
    """First token after the scheme, e.g. 'dbpedia' for http://dbpedia.org/..."""
    if not _AUTHORITY.match(uri):
        return None
    tokens = [t for t in _GROUP_DELIMS.split(uri) if t]
    return tokens[1] if len(tokens) > 1 else None


def _prefix_candidates(uri: str) -> list[int]:
    """End offsets of '/'-aligned prefixes after the authority (whole URI excluded)."""
    m = _AUTHORITY.match(uri)
    if not m:
        return []
    start = m.end()
    return [i for i in range(start, len(uri)) if uri[i] == "/"]


def _next_segment(text: str, at: int) -> str:
    """Segment following the '/' at ``at``."""
    end = text.find("/", at + 1)
    return text[at + 1:] if end < 0 else text[at + 1:end]


def _suffix_candidates(rest: str) -> list[int]:
    """Start offsets of '/'-aligned suffixes that leave a non-empty infix."""
    return [i for i in range(1, len(rest)) if rest[i] == "/"]


def _previous_segment(text: str, at: int) -> str:
    start = text.rfind("/", 0, at)
    return text[start + 1:at]


def _choose(counts: dict[str, set], candidates: list[str]) -> str | None:
    """Candidate with the most distinct neighbouring tokens; ties go to the shortest."""
    best, best_n = None, -1
    for cand in candidates:
        n = len(counts.get(cand, ()))
        if n > best_n or (n == best_n and len(cand) < len(best)):
            best, best_n = cand, n
    return best


@dataclass
class PrefixTable:
    """Learned prefix and suffix statistics for a URI population."""

    prefix_next: dict[str, dict[str, set]] = field(default_factory=lambda: defaultdict(lambda: defaultdict(set)))
    suffix_prev: dict[str, dict[str, set]] = field(default_factory=lambda: defaultdict(lambda: defaultdict(set)))

    @classmethod
    def learn(cls, uris: Iterable[str]) -> "PrefixTable":
        table = cls()
        uris = sorted(set(uris))
        for uri in uris:
            g = group_key(uri)
            if g is None:
                continue
            for end in _prefix_candidates(uri):
                table.prefix_next[g][uri[:end]].add(_next_segment(uri, end))
        for uri in uris:
            g = group_key(uri)
            if g is None:
                continue
            rest = uri[len(table.prefix_of(uri)):]
            for start in _suffix_candidates(rest):
                table.suffix_prev[g][rest[start:]].add(_previous_segment(rest, start))
        return table

    def prefix_of(self, uri: str) -> str:
        g = group_key(uri)
        ends = _prefix_candidates(uri)
        if g is None or not ends:
            return ""
        return _choose(self.prefix_next.get(g, {}), [uri[:e] for e in ends])

    def decompose(self, uri: str) -> UriDecomposition:
        return decompose_uri(uri, self)


def decompose_uri(uri: str, table: PrefixTable | None = None) -> UriDecomposition:
    """Split ``uri`` into prefix, infix and optional suffix.

    URIs without an authority or path are returned whole as the infix.
    """
    if table is None:
        table = PrefixTable.learn([uri])
    prefix = table.prefix_of(uri)
    if not prefix:
        return UriDecomposition("", uri)
    rest = uri[len(prefix):]
    starts = _suffix_candidates(rest)
    if not starts:
        return UriDecomposition(prefix, rest)
    counts = table.suffix_prev.get(group_key(uri), {})
    suffix = _choose(counts, [rest[s:] for s in starts])
    if len(counts.get(suffix, ())) < MIN_SUFFIX_SUPPORT:
        return UriDecomposition(prefix, rest)
    return UriDecomposition(prefix, rest[: len(rest) - len(suffix)], suffix)
