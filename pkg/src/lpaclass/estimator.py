"""Estimator-style wrapper around K0 classification.

Graphs play the role of samples.  ``fit`` partitions them by pointed K0 and
``predict`` assigns new graphs to the learned classes.
"""

from __future__ import annotations

from typing import Iterable

from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .errors import GraphFormatError
from .explorer import ClassificationTable, classify, canonical_form
from .invariants import k0_data, pointed_iso
from .multigraph import MultiGraph, parse_graph

__all__ = ["check_graphs", "PointedK0Classifier"]


def check_graphs(X: Iterable) -> list[MultiGraph]:
    """Coerce samples to :class:`MultiGraph`.

    Accepts graphs, graph dicts or JSON strings.  A lone graph is rejected so
    that it is not silently iterated.
    """
    if isinstance(X, (MultiGraph, str, bytes, dict)):
        raise GraphFormatError("expected a sequence of graphs, got a single graph")
    out = []
    for i, x in enumerate(X):
        if isinstance(x, MultiGraph):
            out.append(x)
        else:
            try:
                out.append(parse_graph(x))
            except GraphFormatError as exc:
                raise GraphFormatError(f"sample {i}: {exc}") from None
    return out


class PointedK0Classifier(ClusterMixin, BaseEstimator):
    """Group graphs by the pointed isomorphism class of their K0 data.

    Parameters
    ----------
    dedupe : bool, default=False
        Drop isomorphic duplicates before building ``table_``.  Labels are
        still reported for every input sample.

    Attributes
    ----------
    table_ : ClassificationTable
        Classes in deterministic order.
    labels_ : list of int
        Class index of each training sample.
    n_classes_ : int
    """

    def __init__(self, dedupe: bool = False):
        self.dedupe = dedupe

    def fit(self, X, y=None):
        graphs = check_graphs(X)
        pool = graphs
        if self.dedupe:
            seen, pool = set(), []
            for g in graphs:
                c = canonical_form(g)
                if c not in seen:
                    seen.add(c)
                    pool.append(g)
        self.table_: ClassificationTable = classify(pool)
        self.n_classes_ = len(self.table_)
        self.labels_ = self._assign(graphs)
        return self

    def _assign(self, graphs):
        reps = [k0 for k0, _ in self.table_.classes]
        labels = []
        for g in graphs:
            k0 = k0_data(g)
            labels.append(next((i for i, r in enumerate(reps) if pointed_iso(r, k0)), -1))
        return labels

    def predict(self, X):
        """Class index for each graph, ``-1`` for K0 data not seen during ``fit``."""
        check_is_fitted(self, "table_")
        return self._assign(check_graphs(X))
