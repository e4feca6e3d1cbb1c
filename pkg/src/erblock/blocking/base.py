"""Estimator base class and input validation helpers."""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted  # noqa: F401  (re-exported)

from .tokenize import TokenizerConfig
from ..engine import Engine
from ..model import CLEAN_CLEAN, BlockingCollection, EntityCollection


def check_collection(X, *, mode: str | None = None, allow_empty: bool = True) -> EntityCollection:
    """Validate that ``X`` is an EntityCollection, optionally of a given mode."""
    if not isinstance(X, EntityCollection):
        raise TypeError(f"expected an EntityCollection, got {type(X).__name__}")
    if mode is not None and X.mode != mode:
        raise ValueError(f"this estimator requires a {mode} collection, got {X.mode}")
    if not allow_empty and len(X) == 0:
        raise ValueError("collection is empty")
    return X


def check_blocks(X) -> BlockingCollection:
    if not isinstance(X, BlockingCollection):
        raise TypeError(f"expected a BlockingCollection, got {type(X).__name__}")
    return X


class BaseBlocker(BaseEstimator):
    """Common surface of the blocking estimators.

    ``fit`` learns whatever the method needs from a collection, ``transform``
    returns a BlockingCollection for a collection. Tokenizer knobs and engine
    settings are plain constructor parameters so ``get_params``/``set_params``
    and cloning work as usual.
    """

    _required_mode: str | None = None

    def __init__(self, delimiters=r"[\W_]+", case_fold=True, min_token_length=1,
                 tokenize_resource_values=True, n_workers=None, n_partitions=4):
        self.delimiters = delimiters
        self.case_fold = case_fold
        self.min_token_length = min_token_length
        self.tokenize_resource_values = tokenize_resource_values
        self.n_workers = n_workers
        self.n_partitions = n_partitions

    @property
    def tokenizer_(self) -> TokenizerConfig:
        return TokenizerConfig(self.delimiters, self.case_fold, self.min_token_length,
                               self.tokenize_resource_values)

    def _engine(self) -> Engine:
        return Engine(workers=self.n_workers)

    def _validate(self, X) -> EntityCollection:
        return check_collection(X, mode=self._required_mode)

    def fit(self, X, y=None):
        X = self._validate(X)
        self.n_descriptions_ = len(X)
        self.mode_ = X.mode
        return self

    def transform(self, X) -> BlockingCollection:
        raise NotImplementedError

    def fit_transform(self, X, y=None) -> BlockingCollection:
        return self.fit(X, y).transform(X)


__all__ = ["BaseBlocker", "check_blocks", "check_collection", "check_is_fitted", "CLEAN_CLEAN"]
