"""Blocking algorithms: token, attribute clustering, prefix-infix(-suffix) and iterative."""
from .tokenize import TokenizerConfig, jaccard, tokenize, trigrams
from .base import BaseBlocker, check_blocks, check_collection
from .token import TokenBlocker, token_blocking
from .attribute import (AttributeClustering, AttributeClusteringBlocker, ClusteringError,
                        attribute_clustering, attribute_clustering_blocking, attribute_profile,
                        clustered_token_blocking)
from .uri import PrefixTable, UriDecomposition, decompose_uri
from .pis import PrefixInfixSuffixBlocker, pis_blocking
from .iterative import IterativeResolver, IterativeResult, MatchOracle, MergedEntity, iterative_blocking

__all__ = [
    "AttributeClustering", "AttributeClusteringBlocker", "BaseBlocker", "ClusteringError",
    "IterativeResolver", "IterativeResult", "MatchOracle", "MergedEntity", "PrefixInfixSuffixBlocker",
    "PrefixTable", "TokenBlocker", "TokenizerConfig", "UriDecomposition", "attribute_clustering",
    "attribute_clustering_blocking", "attribute_profile", "check_blocks", "check_collection",
    "clustered_token_blocking", "decompose_uri", "iterative_blocking", "jaccard", "pis_blocking",
    "token_blocking", "tokenize", "trigrams",
]
