"""Small built-in collections: the running museum/landmark example and variants."""
from __future__ import annotations

from .model import CLEAN_CLEAN, DIRTY, EntityCollection, EntityDescription, GroundTruth, Value

_FIGURE1 = {
    "e1": [("about", "Eiffel Tower"), ("architect", "Sauvestre"), ("year", "1889"), ("located", "Paris")],
    "e2": [("about", "Statue of Liberty"), ("architect", "Bartholdi Eiffel"), ("year", "1886"), ("located", "NY")],
    "e3": [("about", "Auguste Bartholdi"), ("born", "1834"), ("work", "Paris")],
    "e4": [("about", "Joan Tower"), ("born", "1938")],
    "e5": [("work", "Lady Liberty"), ("artist", "Bartholdi"), ("location", "NY")],
    "e6": [("work", "Eiffel Tower"), ("year-constructed", "1889"), ("location", "Paris")],
    "e7": [("work", "Bartholdi Fountain"), ("year-constructed", "1876"), ("location", "Washington")],
}
_E8 = [("work", "Statue of Lib."), ("architect", "Eiffel"), ("year-constructed", "1886")]

SOURCE_A, SOURCE_B = "D1", "D2"


def _source(eid: str) -> str:
    return SOURCE_A if eid in ("e1", "e2", "e3", "e4") else SOURCE_B


def _descriptions(table):
    return tuple(EntityDescription.from_literals(eid, pairs, _source(eid)) for eid, pairs in table.items())


def figure1(mode: str = DIRTY) -> EntityCollection:
    """Seven descriptions e1..e7; D1 = e1..e4 and D2 = e5..e7 in clean-clean mode."""
    sources = (SOURCE_A, SOURCE_B) if mode == CLEAN_CLEAN else ()
    return EntityCollection(_descriptions(_FIGURE1), mode, sources)


def figure1_ground_truth() -> GroundTruth:
    return GroundTruth.from_links("owl:sameAs", [("e1", "e6"), ("e2", "e5")])


def figure5() -> EntityCollection:
    """The dirty example extended with e8, a second description of the statue."""
    return EntityCollection(_descriptions({**_FIGURE1, "e8": _E8}), DIRTY)


def figure5_ground_truth() -> GroundTruth:
    return GroundTruth.from_links("owl:sameAs", [("e1", "e6"), ("e2", "e8"), ("e2", "e5")])


# Same descriptions with URI identifiers; e1/e6 share a local name across hosts,
# e2/e5 do not, and e8 shares only the local name Joan_Tower with e4.
_URIS = {
    "e1": "http://dbpedia.org/resource/Eiffel_Tower",
    "e2": "http://dbpedia.org/resource/Statue_of_Liberty",
    "e3": "http://dbpedia.org/resource/Auguste_Bartholdi",
    "e4": "http://dbpedia.org/resource/Joan_Tower",
    "e5": "http://example.org/landmarks/Lady_Liberty/about.rdf",
    "e6": "http://example.org/landmarks/Eiffel_Tower/about.rdf",
    "e7": "http://example.org/landmarks/Bartholdi_Fountain/about.rdf",
    "e8": "http://example.org/landmarks/Joan_Tower/about.rdf",
}
_E8_URI = [("composed", "Sequoia")]


def uri_example(mode: str = DIRTY) -> EntityCollection:
    """Landmark descriptions keyed by URIs that follow two naming schemes."""
    table = {**_FIGURE1, "e8": _E8_URI}
    descriptions = []
    for eid, pairs in table.items():
        descriptions.append(EntityDescription(
            _URIS[eid], tuple((a, Value.literal(v)) for a, v in pairs), _source(eid)))
    sources = (SOURCE_A, SOURCE_B) if mode == CLEAN_CLEAN else ()
    return EntityCollection(tuple(descriptions), mode, sources)
