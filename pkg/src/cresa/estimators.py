"""Nonparametric estimators of CRE and conditional CRE from samples.

All estimators work on order statistics only. The conditional estimators
group samples by the rank of the conditioning variable(s) and average the
empirical CRE of the output inside each group, weighted by group size.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CREError, TooFewSamplesError


@dataclass(frozen=True)
class GridParams:
    """Grid hyper-parameters of the conditional estimators.

    ``m`` is the number of samples per grid when conditioning on one
    variable; ``I`` and ``J`` are the grid counts along each variable when
    conditioning on two.
    """

    m: int = 500
    I: int = 20  # noqa: E741
    J: int = 20

    def __post_init__(self) -> None:
        if self.m < 2 or self.I < 2 or self.J < 2:
            raise CREError(f"grid parameters must all be >= 2, got {self}")


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """Given-data sample: an ``N x n`` input matrix and the N model outputs."""

    inputs: np.ndarray
    output: np.ndarray
    labels: tuple[str, ...]
    seed: int | None = None

    def __post_init__(self) -> None:
        x = np.asarray(self.inputs, dtype=float)
        y = np.asarray(self.output, dtype=float).ravel()
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise CREError(f"inputs must be 2-D, got shape {x.shape}")
        if x.shape[0] != y.size:
            raise CREError(f"{x.shape[0]} input rows but {y.size} outputs")
        if y.size < 2:
            raise TooFewSamplesError("a sample matrix needs at least 2 rows")
        if len(self.labels) != x.shape[1]:
            raise CREError(f"{len(self.labels)} labels for {x.shape[1]} input columns")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise CREError("sample matrix contains NaN or infinite entries")
        object.__setattr__(self, "inputs", x)
        object.__setattr__(self, "output", y)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def size(self) -> int:
        return self.output.size

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    def column(self, key: int | str) -> np.ndarray:
        return self.inputs[:, self.index(key)]

    def index(self, key: int | str) -> int:
        if isinstance(key, str):
            try:
                return self.labels.index(key)
            except ValueError:
                raise CREError(f"unknown input {key!r}; have {self.labels}") from None
        if not -self.n_inputs <= key < self.n_inputs:
            raise CREError(f"input index {key} out of range for {self.n_inputs} inputs")
        return key % self.n_inputs


def _as_vector(x: Sequence[float] | np.ndarray, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if not np.isfinite(arr).all():
        raise CREError(f"{name} contains NaN or infinite entries")
    return arr


def _survival_weights(n: int) -> np.ndarray:
    # -(1 - i/n) ln(1 - i/n) for i = 1..n-1; i = n is excluded by the sum bound
    s = 1.0 - np.arange(1, n) / n
    return -s * np.log(s)


def empirical_cre(samples: Sequence[float] | np.ndarray) -> float:
    """Empirical cumulative residual entropy from sample spacings.

    Integrates ``-S ln S`` for the empirical survival function ``S``, which
    reduces to a weighted sum of the spacings between consecutive order
    statistics.
    """
    x = _as_vector(samples, "samples")
    if x.size < 2:
        raise TooFewSamplesError(f"empirical CRE needs at least 2 samples, got {x.size}")
    spacings = np.diff(np.sort(x))
    return float(np.dot(spacings, _survival_weights(x.size)))


def _rank(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size, dtype=np.intp)
    ranks[order] = np.arange(x.size)
    return ranks


def equal_count_bins(x: np.ndarray, n_bins: int) -> np.ndarray:
    """Bin index of each sample when the order statistic is cut into
    ``n_bins`` consecutive groups of ``len(x) // n_bins`` samples.

    Ties are broken by original position and the remainder is merged into
    the last bin.
    """
    n = x.size
    if n_bins < 1 or n_bins > n:
        raise CREError(f"cannot cut {n} samples into {n_bins} bins")
    return np.minimum(_rank(x) // (n // n_bins), n_bins - 1)


def grouped_cre_sum(groups: np.ndarray, y: np.ndarray) -> float:
    """``sum_g n_g * empirical_cre(y[groups == g])`` over all groups.

    Groups with fewer than two members contribute zero. Vectorised: one
    lexsort, then the per-group survival weights are built from each
    sample's position inside its group.
    """
    order = np.lexsort((y, groups))
    g = groups[order]
    ys = y[order]
    n = ys.size
    starts = np.flatnonzero(np.r_[True, g[1:] != g[:-1]])
    sizes = np.diff(np.r_[starts, n])
    size_of = np.repeat(sizes, sizes)
    pos = np.arange(n) - np.repeat(starts, sizes)  # 0-based position within group
    # spacing k sits between positions k and k+1 of the same group
    same = g[1:] == g[:-1]
    i = (pos[:-1] + 1)[same]
    s = size_of[:-1][same]
    surv = 1.0 - i / s
    terms = -np.diff(ys)[same] * surv * np.log(surv) * s
    return float(terms.sum())


def _check_pair(x: np.ndarray, y: np.ndarray) -> None:
    if x.size != y.size:
        raise CREError(f"length mismatch: {x.size} conditioning samples vs {y.size} outputs")


def conditional_cre_1(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray, m: int = 500) -> float:
    """Conditional CRE of ``y`` given one variable ``x``.

    The pairs are sorted by ``x`` and cut into ``len(x) // m`` grids of
    ``m`` samples each (any remainder joins the last grid). The result is
    the size-weighted mean of the empirical CRE of ``y`` within each grid.
    """
    x = _as_vector(x, "x")
    y = _as_vector(y, "y")
    _check_pair(x, y)
    if m < 2:
        raise CREError(f"m must be >= 2, got {m}")
    if m > x.size:
        raise TooFewSamplesError(f"m = {m} exceeds sample size {x.size}")
    groups = np.minimum(_rank(x) // m, x.size // m - 1)
    return max(grouped_cre_sum(groups, y) / y.size, 0.0)


def conditional_cre_2(
    x1: Sequence[float] | np.ndarray,
    x2: Sequence[float] | np.ndarray,
    y: Sequence[float] | np.ndarray,
    I: int = 20,  # noqa: E741
    J: int = 20,
) -> float:
    """Conditional CRE of ``y`` given two variables.

    ``x1`` is cut into ``I`` equal-count grids and ``x2`` into ``J``; each
    sample falls in one of the ``I*J`` cells formed by intersecting them.
    Returns ``sum(n_ij / N * CRE(y in cell ij))``; cells with fewer than
    two samples contribute zero but keep their weight.
    """
    x1 = _as_vector(x1, "x1")
    x2 = _as_vector(x2, "x2")
    y = _as_vector(y, "y")
    _check_pair(x1, y)
    _check_pair(x2, y)
    if I < 2 or J < 2:
        raise CREError(f"I and J must be >= 2, got I={I}, J={J}")
    if I * J > y.size:
        raise TooFewSamplesError(f"I*J = {I * J} exceeds sample size {y.size}")
    cells = equal_count_bins(x1, I) * J + equal_count_bins(x2, J)
    return max(grouped_cre_sum(cells, y) / y.size, 0.0)
