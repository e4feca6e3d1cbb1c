from .metrics import (AGGREGATE, DISTINCT, ConfusionCounts, MetricsReport, block_comparisons,
                      candidate_pairs, comparison_counts, comparisons_without_blocking, fmeasure, h3r,
                      reduction_ratio, score)
from .diagnostics import (CommonTokenDistribution, FnReport, GroupStats, StructuralReport,
                          common_token_distribution, fn_analysis, sample_structural_analysis)

__all__ = [
    "AGGREGATE", "DISTINCT", "CommonTokenDistribution", "ConfusionCounts", "FnReport", "GroupStats",
    "MetricsReport", "StructuralReport", "block_comparisons", "candidate_pairs", "common_token_distribution",
    "comparison_counts", "comparisons_without_blocking", "fmeasure", "fn_analysis", "h3r",
    "reduction_ratio", "sample_structural_analysis", "score",
]
