"""Blocking for entity resolution over heterogeneous RDF data.

Token blocking, attribute-clustering blocking, prefix-infix(-suffix)
blocking and iterative blocking, a small deterministic map/reduce engine
that runs them, and the measures used to judge a blocking collection.
"""
from .model import (CLEAN_CLEAN, DIRTY, Block, BlockingCollection, BlockKey, EntityCollection,
                    EntityDescription, GroundTruth, ModelError, Namespace, Value)
from .engine import Engine
from .blocking import (AttributeClusteringBlocker, IterativeResolver, MatchOracle, PrefixInfixSuffixBlocker,
                       TokenBlocker, TokenizerConfig)
from .eval import MetricsReport, score

__version__ = "0.1.0"

__all__ = [
    "AttributeClusteringBlocker", "Block", "BlockKey", "BlockingCollection", "CLEAN_CLEAN", "DIRTY",
    "Engine", "EntityCollection", "EntityDescription", "GroundTruth", "IterativeResolver", "MatchOracle",
    "MetricsReport", "ModelError", "Namespace", "PrefixInfixSuffixBlocker", "TokenBlocker",
    "TokenizerConfig", "Value", "score",
]
