"""CRE-based importance measures.

``kappa_i`` is the fraction of output CRE removed by learning ``X_i``;
``kappa_ij`` is the extra fraction removed by learning both ``X_i`` and
``X_j`` beyond what each removes alone. Everything of order three and up is
reported as one lump, the complement that makes all contributions sum to 1.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import CREError, DegenerateOutputError
from .estimators import GridParams, SampleMatrix, conditional_cre_1, conditional_cre_2, empirical_cre

# largest value strictly below 1, used for the half-open pair range
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


def _output_cre(samples: SampleMatrix) -> float:
    total = empirical_cre(samples.output)
    if total <= 0:
        raise DegenerateOutputError("model output is constant: its CRE is zero")
    return total


def cr_mutual_information(samples: SampleMatrix, i: int | str, grid: GridParams = GridParams()) -> float:
    """Cumulative residual mutual information ``CRE(Y) - CRE(Y | X_i)``, floored at 0."""
    total = _output_cre(samples)
    return max(total - conditional_cre_1(samples.column(i), samples.output, grid.m), 0.0)


def kappa_single(
    samples: SampleMatrix, i: int | str, grid: GridParams = GridParams(), clip: bool = True
) -> float:
    total = _output_cre(samples)
    raw = 1.0 - conditional_cre_1(samples.column(i), samples.output, grid.m) / total
    return float(np.clip(raw, 0.0, 1.0)) if clip else raw


def _pair_raw(cond_i: float, cond_j: float, cond_ij: float, total: float) -> float:
    return (cond_i + cond_j - cond_ij - total) / total


def kappa_pair(
    samples: SampleMatrix,
    i: int | str,
    j: int | str,
    grid: GridParams = GridParams(),
    clip: bool = True,
) -> float:
    """Interaction contribution of the pair ``(X_i, X_j)``.

    Needs the two single-variable conditional CREs and the joint one; the
    inputs must be independent for the result to mean anything.
    """
    a, b = samples.index(i), samples.index(j)
    if a == b:
        raise CREError(f"kappa_pair needs two distinct inputs, got {i!r} twice")
    total = _output_cre(samples)
    y = samples.output
    xa, xb = samples.inputs[:, a], samples.inputs[:, b]
    raw = _pair_raw(
        conditional_cre_1(xa, y, grid.m),
        conditional_cre_1(xb, y, grid.m),
        conditional_cre_2(xa, xb, y, grid.I, grid.J),
        total,
    )
    return float(np.clip(raw, 0.0, _BELOW_ONE)) if clip else raw


@dataclass(frozen=True)
class DecompositionResult:
    total_cre: float
    kappa_single: dict[str, float]
    kappa_pair: dict[tuple[str, str], float]
    higher_order_residual: float
    sample_size: int
    grid: GridParams
    seed: int | None = None
    raw_kappa_single: dict[str, float] = field(default_factory=dict)
    raw_kappa_pair: dict[tuple[str, str], float] = field(default_factory=dict)
    conditional_cre: dict[str, float] = field(default_factory=dict)

    @property
    def raw_residual(self) -> float:
        return 1.0 - sum(self.raw_kappa_single.values()) - sum(self.raw_kappa_pair.values())

    def ranking(self) -> list[str]:
        """Input labels by decreasing ``kappa_i``; ties keep input order."""
        labels = list(self.kappa_single)
        return sorted(labels, key=lambda k: -self.kappa_single[k])

    def to_dict(self) -> dict[str, Any]:
        def pair_key(p: tuple[str, str]) -> str:
            return f"{p[0]},{p[1]}"

        return {
            "total_cre": self.total_cre,
            "kappa_single": dict(self.kappa_single),
            "kappa_pair": {pair_key(p): v for p, v in self.kappa_pair.items()},
            "higher_order_residual": self.higher_order_residual,
            "raw": {
                "kappa_single": dict(self.raw_kappa_single),
                "kappa_pair": {pair_key(p): v for p, v in self.raw_kappa_pair.items()},
                "higher_order_residual": self.raw_residual,
            },
            "conditional_cre": dict(self.conditional_cre),
            "sample_size": self.sample_size,
            "seed": self.seed,
            "grid": {"m": self.grid.m, "I": self.grid.I, "J": self.grid.J},
        }


def decompose(
    samples: SampleMatrix,
    grid: GridParams = GridParams(),
    pairs: bool = True,
    workers: int = 1,
) -> DecompositionResult:
    """Split the output CRE into single, pairwise and higher-order shares.

    All terms are estimated from the one shared sample. With ``workers > 1``
    the conditional estimates run on a thread pool; each writes its own slot
    so the result does not depend on scheduling.
    """
    if samples.n_inputs < 1:
        raise CREError("decompose needs at least one input")
    total = _output_cre(samples)
    y = samples.output
    labels = samples.labels
    n = samples.n_inputs
    index_pairs = list(itertools.combinations(range(n), 2)) if pairs else []

    def one(i: int) -> float:
        return conditional_cre_1(samples.inputs[:, i], y, grid.m)

    def two(p: tuple[int, int]) -> float:
        return conditional_cre_2(samples.inputs[:, p[0]], samples.inputs[:, p[1]], y, grid.I, grid.J)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cond1 = list(pool.map(one, range(n)))
            cond2 = list(pool.map(two, index_pairs))
    else:
        cond1 = [one(i) for i in range(n)]
        cond2 = [two(p) for p in index_pairs]

    raw_single = {labels[i]: 1.0 - cond1[i] / total for i in range(n)}
    raw_pair = {
        (labels[a], labels[b]): _pair_raw(cond1[a], cond1[b], c, total)
        for (a, b), c in zip(index_pairs, cond2)
    }
    single = {k: float(np.clip(v, 0.0, 1.0)) for k, v in raw_single.items()}
    pair = {k: float(np.clip(v, 0.0, _BELOW_ONE)) for k, v in raw_pair.items()}
    residual = 1.0 - sum(single.values()) - sum(pair.values())

    cond = {labels[i]: cond1[i] for i in range(n)}
    cond.update({f"{labels[a]},{labels[b]}": c for (a, b), c in zip(index_pairs, cond2)})
    return DecompositionResult(
        total_cre=total,
        kappa_single=single,
        kappa_pair=pair,
        higher_order_residual=residual,
        sample_size=samples.size,
        grid=grid,
        seed=samples.seed,
        raw_kappa_single=raw_single,
        raw_kappa_pair=raw_pair,
        conditional_cre=cond,
    )
