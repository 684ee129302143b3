"""Datasets, column standardization, and the mirrored two-sided design.

Solvers work in a space of 2p coordinates where column p + j is the
negation of column j; a signed original-space coefficient vector is the
difference of its two halves. The negated columns are virtual: they are
produced on access, so the mirror identity is exact and no extra memory
is spent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ZeroVarianceError


@dataclass
class Dataset:
    """Raw predictors X (n rows, p columns) and response y."""

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] | None = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.X.shape[0] != self.y.shape[0]:
            raise DataError(
                f"X has {self.X.shape[0]} rows but y has {self.y.shape[0]} entries"
            )
        if self.X.size == 0:
            raise DataError("empty design")
        if not np.all(np.isfinite(self.X)) or not np.all(np.isfinite(self.y)):
            raise DataError("non-finite values in data")
        if self.feature_names is not None and len(self.feature_names) != self.X.shape[1]:
            raise DataError("feature_names length does not match number of columns")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass
class StandardizedDesign:
    """Column-standardized predictors with the statistics to undo it.

    Columns of ``Xs`` have mean zero and variance one, with variance
    taken over n (not n - 1) so that the squared norm of every column is
    exactly n. The response is centered unless the design was built for
    a loss that needs it raw, in which case ``y_mean`` is zero.
    """

    Xs: np.ndarray
    centers: np.ndarray
    scales: np.ndarray
    y_centered: np.ndarray
    y_mean: float
    feature_names: list[str] | None = None

    @property
    def n(self) -> int:
        return self.Xs.shape[0]

    @property
    def p(self) -> int:
        return self.Xs.shape[1]

    def correlations(self, r: np.ndarray) -> np.ndarray:
        """Inner products of every standardized column with r."""
        return self.Xs.T @ r

    def expanded(self) -> "ExpandedDesign":
        return ExpandedDesign(self)

    def name_of(self, j: int) -> str:
        if self.feature_names is not None:
            return self.feature_names[j]
        return f"x{j}"

    def to_original_scale(self, collapsed: np.ndarray) -> tuple[np.ndarray, float]:
        """Map standardized-scale coefficients to the raw-data scale.

        Returns the rescaled coefficients and the implied intercept.
        """
        collapsed = np.asarray(collapsed, dtype=float)
        b = collapsed / self.scales
        intercept = self.y_mean - float(self.centers @ b)
        return b, intercept


def standardize(data: Dataset, center_response: bool = True) -> StandardizedDesign:
    """Standardize the columns of a dataset to mean zero, variance one.

    Raises ZeroVarianceError naming the first constant column. With
    ``center_response=False`` the response is kept raw (for 0/1
    responses used with a classification loss).
    """
    centers = data.X.mean(axis=0)
    Xc = data.X - centers
    scales = np.sqrt((Xc**2).mean(axis=0))
    bad = scales <= 1e-12 * np.maximum(1.0, np.abs(centers))
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        name = data.feature_names[j] if data.feature_names is not None else None
        raise ZeroVarianceError(j, name)
    if center_response:
        y_mean = float(data.y.mean())
    else:
        y_mean = 0.0
    return StandardizedDesign(
        Xs=Xc / scales,
        centers=centers,
        scales=scales,
        y_centered=data.y - y_mean,
        y_mean=y_mean,
        feature_names=list(data.feature_names) if data.feature_names else None,
    )


class ExpandedDesign:
    """Virtual [X : -X] view of a standardized design.

    Column a for a < p is the standardized column a; column p + a is its
    exact negation, applied on access.
    """

    def __init__(self, base: StandardizedDesign):
        self.base = base
        self._gram0: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def p2(self) -> int:
        return 2 * self.base.p

    def column(self, a: int) -> np.ndarray:
        p = self.p
        if a < p:
            return self.base.Xs[:, a]
        return -self.base.Xs[:, a - p]

    def columns(self, indices) -> np.ndarray:
        """Materialize the signed columns at the given expanded indices."""
        idx = np.asarray(indices, dtype=int)
        p = self.p
        cols = self.base.Xs[:, idx % p].copy()
        cols[:, idx >= p] *= -1.0
        return cols

    def correlations(self, r: np.ndarray) -> np.ndarray:
        """Inner products of all 2p signed columns with r (exact mirror)."""
        c = self.base.Xs.T @ r
        return np.concatenate([c, -c])

    def predict(self, beta: np.ndarray) -> np.ndarray:
        """Fitted values for an expanded coefficient vector."""
        p = self.p
        return self.base.Xs @ (beta[:p] - beta[p:])

    def base_gram(self) -> np.ndarray:
        """Cached Gram matrix of the standardized columns."""
        if self._gram0 is None:
            self._gram0 = self.base.Xs.T @ self.base.Xs
        return self._gram0

    def gram_entries(self, a: int, others) -> np.ndarray:
        """Inner products of expanded column a with other expanded columns."""
        p = self.p
        others = np.asarray(others, dtype=int)
        g = self.base_gram()[a % p, others % p].copy()
        signs = np.where(others >= p, -1.0, 1.0)
        if a >= p:
            signs = -signs
        return g * signs
