"""Reference sensitivity indices used for comparison.

* Sobol main and total effects from a pick-freeze design (Saltelli 2010
  main-effect estimator, Jansen total-effect estimator).
* Borgonovo's delta from equal-count input bins and a common output
  histogram.
* Binned Shannon mutual information in nats.
* Differential entropy of a uniform law, which goes negative for narrow
  supports where CRE does not.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .distributions import DistributionSpec, SeedLike, sample_matrix
from .errors import CREError, DegenerateOutputError, DistributionError, TooFewSamplesError
from .estimators import SampleMatrix, equal_count_bins

# keeps inverse-CDF transforms of QMC points finite
_U_EPS = 1e-12


@dataclass(frozen=True)
class SobolResult:
    first: np.ndarray
    total: np.ndarray
    n_base: int
    n_evaluations: int
    design: str
    raw_first: np.ndarray = field(repr=False)
    raw_total: np.ndarray = field(repr=False)


def _pick_freeze_matrices(
    specs: Sequence[DistributionSpec], n: int, seed: SeedLike, design: str
) -> tuple[np.ndarray, np.ndarray]:
    d = len(specs)
    if design == "mc":
        ss = np.random.SeedSequence(seed) if not isinstance(seed, np.random.SeedSequence) else seed
        a_seq, b_seq = ss.spawn(2)
        return sample_matrix(specs, n, a_seq), sample_matrix(specs, n, b_seq)
    if design != "qmc":
        raise CREError(f"unknown Sobol design {design!r}; use 'qmc' or 'mc'")
    engine = qmc.Sobol(2 * d, scramble=True, seed=np.random.default_rng(seed))
    with warnings.catch_warnings():
        # balance warning for non power-of-two n
        warnings.simplefilter("ignore", UserWarning)
        u = np.clip(engine.random(n), _U_EPS, 1.0 - _U_EPS)
    cols = [spec.ppf(u[:, k]) for k, spec in enumerate(list(specs) * 2)]
    x = np.column_stack(cols)
    return x[:, :d], x[:, d:]


def sobol_indices(
    model: Callable[[np.ndarray], np.ndarray],
    specs: Sequence[DistributionSpec],
    n: int,
    seed: SeedLike = None,
    design: str = "qmc",
) -> SobolResult:
    """First-order and total Sobol indices by pick-freeze.

    Builds base matrices ``A`` and ``B`` of ``n`` rows and, for each input
    ``i``, the hybrid ``AB_i`` equal to ``A`` with column ``i`` taken from
    ``B``; costs ``n * (d + 2)`` model runs. ``design='qmc'`` fills ``A|B``
    from one scrambled Sobol' sequence, ``design='mc'`` draws them
    independently. Indices are clipped to [0, 1]; raw values are kept.

    Parameters
    ----------
    model : callable
        Maps an ``(n, d)`` array to ``n`` outputs.
    specs : sequence of DistributionSpec
        Independent input marginals.
    n : int
        Base sample size, at least 1000.
    """
    if n < 1000:
        raise TooFewSamplesError(f"Sobol estimation needs n >= 1000, got {n}")
    d = len(specs)
    a, b = _pick_freeze_matrices(specs, n, seed, design)
    f_a = np.asarray(model(a), dtype=float)
    f_b = np.asarray(model(b), dtype=float)
    var = np.var(np.concatenate([f_a, f_b]))
    if not var > 0:
        raise DegenerateOutputError("model output has zero variance")
    first = np.empty(d)
    total = np.empty(d)
    for i in range(d):
        ab = a.copy()
        ab[:, i] = b[:, i]
        f_ab = np.asarray(model(ab), dtype=float)
        first[i] = np.mean(f_b * (f_ab - f_a)) / var
        total[i] = 0.5 * np.mean((f_a - f_ab) ** 2) / var
    return SobolResult(
        first=np.clip(first, 0.0, 1.0),
        total=np.clip(total, 0.0, 1.0),
        n_base=n,
        n_evaluations=n * (d + 2),
        design=design,
        raw_first=first,
        raw_total=total,
    )


def _check_given_data(samples: SampleMatrix, what: str) -> None:
    if samples.size < 1000:
        raise TooFewSamplesError(f"{what} needs N >= 1000, got {samples.size}")
    if np.ptp(samples.output) == 0:
        raise DegenerateOutputError("model output is constant")


def delta_index(samples: SampleMatrix, i: int | str, partition: int = 20, y_bins: int = 100) -> float:
    """Borgonovo's moment-independent delta for input ``i``.

    ``X_i`` is cut into ``partition`` equal-count bins; within each, the
    histogram of ``Y`` on a common ``y_bins``-bin grid is compared with the
    unconditional histogram. Returns half the bin-weighted mean L1 distance.
    """
    _check_given_data(samples, "delta index")
    y = samples.output
    edges = np.linspace(y.min(), y.max(), y_bins + 1)
    y_bin = np.clip(np.searchsorted(edges, y, side="right") - 1, 0, y_bins - 1)
    x_bin = equal_count_bins(samples.column(i), partition)
    joint = np.bincount(x_bin * y_bins + y_bin, minlength=partition * y_bins).reshape(partition, y_bins)
    n_x = joint.sum(axis=1)
    p_y = joint.sum(axis=0) / y.size
    p_y_given_x = joint / n_x[:, None]
    shift = np.abs(p_y_given_x - p_y).sum(axis=1)
    return float(np.clip(0.5 * np.dot(n_x / y.size, shift), 0.0, 1.0))


def shannon_mi(samples: SampleMatrix, i: int | str, bins: int = 20) -> float:
    """Histogram mutual information ``I(X_i; Y)`` in nats.

    Both variables are cut into ``bins`` equal-count bins, so the estimate
    saturates at ``ln(bins)`` for a monotone dependence.
    """
    _check_given_data(samples, "Shannon mutual information")
    bx = equal_count_bins(samples.column(i), bins)
    by = equal_count_bins(samples.output, bins)
    joint = np.bincount(bx * bins + by, minlength=bins * bins).reshape(bins, bins) / samples.size
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float(max(np.sum(joint[nz] * np.log(joint[nz] / (px @ py)[nz])), 0.0))


def differential_entropy_uniform(a: float, b: float) -> float:
    """Differential entropy ``ln(b - a)`` of ``U(a, b)``."""
    if not a < b:
        raise DistributionError(f"uniform needs a < b, got a={a}, b={b}")
    return math.log(b - a)


@dataclass
class BaselineIndices:
    sobol_main: dict[str, float] = field(default_factory=dict)
    sobol_total: dict[str, float] = field(default_factory=dict)
    delta: dict[str, float] = field(default_factory=dict)
    shannon_mi: dict[str, float] = field(default_factory=dict)
    settings: dict[str, Any] = field(default_factory=dict)


def given_data_baselines(
    samples: SampleMatrix, partition: int = 20, y_bins: int = 100, mi_bins: int = 20
) -> BaselineIndices:
    """Delta and Shannon MI for every input of one shared sample."""
    return BaselineIndices(
        delta={lab: delta_index(samples, lab, partition, y_bins) for lab in samples.labels},
        shannon_mi={lab: shannon_mi(samples, lab, mi_bins) for lab in samples.labels},
        settings={
            "delta": {"partition": partition, "y_bins": y_bins, "n": samples.size},
            "shannon_mi": {"bins": mi_bins, "n": samples.size},
        },
    )
