"""Benchmark models.

Every model is exposed twice: as a plain function taking one array per
input (works on scalars and on broadcastable arrays), and as a
:class:`ModelFn` registry entry that maps an ``N x arity`` matrix to ``N``
outputs for the samplers and the CLI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .distributions import DistributionSpec, lognormal_from_mean_ef
from .errors import CREError, ModelDomainError


@dataclass(frozen=True)
class ModelFn:
    name: str
    labels: tuple[str, ...]
    fn: Callable[..., np.ndarray] = field(repr=False)
    description: str = ""

    @property
    def arity(self) -> int:
        return len(self.labels)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.arity:
            raise CREError(f"{self.name} takes {self.arity} inputs, got {x.shape[1]}")
        return np.asarray(self.fn(*x.T), dtype=float)


def ishigami(x1, x2, x3, a: float = 5.0, b: float = 1.0):
    """Ishigami function ``sin x1 + a sin^2 x2 + b x3^4 sin x1``."""
    s1 = np.sin(x1)
    return s1 + a * np.sin(x2) ** 2 + b * np.power(x3, 4) * s1


# the ten triple products of the top-event expression, 1-based
RISK_CUT_SETS: tuple[tuple[int, int, int], ...] = (
    (1, 3, 5), (1, 3, 6), (1, 4, 5), (1, 4, 6), (2, 3, 4),
    (2, 3, 5), (2, 4, 5), (2, 5, 6), (2, 4, 7), (2, 6, 7),
)


def risk_top_event(x1, x2, x3, x4, x5, x6, x7):
    """Top-event frequency of the fault tree as an arithmetic sum of its
    minimal cut-set products (rare-event approximation)."""
    x = (None, x1, x2, x3, x4, x5, x6, x7)
    return sum(x[i] * x[j] * x[k] for i, j, k in RISK_CUT_SETS)


class BearingInputs(NamedTuple):
    k0: float  # viscosity ratio
    ec: float  # contamination factor
    cu: float  # fatigue load limit, kN
    p: float  # dynamic equivalent load, kN


# (lower k0 bound, numerator, k0 exponent) for each ISO 281 branch
_ISO_BRANCHES = ((0.1, 2.2649, 0.054381), (0.4, 1.9987, 0.19087), (1.0, 1.9987, 0.071739))


def bearing_a_iso(k0, ec, cu, p):
    """ISO 281 life-modification factor ``a_ISO``.

    Branches on ``k0`` over ``[0.1, 0.4)``, ``[0.4, 1)`` and ``[1, 4)``
    exactly as tabulated; no smoothing at the seams.
    """
    k0, ec, cu, p = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (k0, ec, cu, p)))
    bad = ~((k0 >= 0.1) & (k0 < 4.0))
    if bad.any():
        raise ModelDomainError(
            f"a_ISO needs 0.1 <= k0 < 4; {int(bad.sum())} point(s) outside, e.g. k0={k0[bad].flat[0]:g}"
        )
    if not ((ec > 0) & (cu > 0) & (p > 0)).all():
        raise ModelDomainError("a_ISO needs positive ec, Cu and P")
    numer = np.where(k0 < 0.4, _ISO_BRANCHES[0][1], _ISO_BRANCHES[1][1])
    expo = np.select([k0 < 0.4, k0 < 1.0], [_ISO_BRANCHES[0][2], _ISO_BRANCHES[1][2]], _ISO_BRANCHES[2][2])
    lube = 2.5671 - numer / k0**expo
    ratio = ec * cu / p
    with np.errstate(invalid="ignore", divide="ignore"):
        base = 1.0 - np.power(lube, 0.83) * np.cbrt(ratio)
        out = 0.1 * np.power(base, -9.3)
    bad = ~(base > 0) | ~np.isfinite(out)
    if bad.any():
        raise ModelDomainError(f"a_ISO bracket is non-positive or non-finite at {int(bad.sum())} point(s)")
    return out[()] if out.ndim == 0 else out


def sum2_model(x1, x2):
    return x1 + x2


def sum3_model(x1, x2, x3):
    return x1 + x2 + x3


MODELS: dict[str, ModelFn] = {
    m.name: m
    for m in (
        ModelFn("ishigami", ("x1", "x2", "x3"), ishigami, "sin x1 + 5 sin^2 x2 + x3^4 sin x1"),
        ModelFn("risk_fault_tree", tuple(f"X{i}" for i in range(1, 8)), risk_top_event,
                "fault-tree top event, sum of ten triple products"),
        ModelFn("bearing_a_iso", ("k0", "ec", "Cu", "P"), bearing_a_iso,
                "ISO 281 bearing life-modification factor"),
        ModelFn("sum2", ("x1", "x2"), sum2_model, "x1 + x2"),
        ModelFn("sum3", ("x1", "x2", "x3"), sum3_model, "x1 + x2 + x3"),
    )
}


def get_model(name: str) -> ModelFn:
    try:
        return MODELS[name]
    except KeyError:
        raise CREError(f"unknown model {name!r}; available: {', '.join(MODELS)}") from None


def default_inputs(name: str) -> list[DistributionSpec]:
    """Input distributions of the published benchmark setups."""
    model = get_model(name)
    if name == "ishigami":
        specs = [DistributionSpec.uniform(-math.pi, math.pi) for _ in range(3)]
    elif name == "risk_fault_tree":
        means = (2, 3, 0.001, 0.002, 0.004, 0.005, 0.003)
        specs = [lognormal_from_mean_ef(mu, 2.0) for mu in means]
    elif name == "bearing_a_iso":
        specs = [
            DistributionSpec.normal(0.39, 0.015),
            DistributionSpec.normal(0.75, 0.08),
            DistributionSpec.normal(0.28, 0.01),
            DistributionSpec.normal(11.5, 0.6),
        ]
    elif name == "sum2":
        specs = [DistributionSpec.exponential(0.5), DistributionSpec.normal(40.0, 2.0)]
    else:
        specs = [
            DistributionSpec.exponential(0.5),
            DistributionSpec.exponential(0.1),
            DistributionSpec.normal(40.0, 2.0),
        ]
    return [s.with_label(label) for s, label in zip(specs, model.labels)]
