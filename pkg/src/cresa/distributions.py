"""Parametric input marginals.

Each :class:`DistributionSpec` is an immutable description of one input
variable. Sampling goes through an explicitly seeded numpy ``Generator`` so
that a fixed seed always replays the same stream.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import DistributionError, UnsupportedFamilyError

#: CRE of a standard normal, rounded as printed in the reference tables.
GAUSSIAN_CRE = 0.9032

#: z-score of the 95th percentile, used by the error-factor convention.
Z95 = 1.645

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


class Family(str, enum.Enum):
    UNIFORM = "uniform"
    NORMAL = "normal"
    EXPONENTIAL = "exponential"
    LOGNORMAL = "lognormal"


_PARAM_NAMES: dict[Family, tuple[str, ...]] = {
    Family.UNIFORM: ("a", "b"),
    Family.NORMAL: ("mean", "sd"),
    Family.EXPONENTIAL: ("rate",),
    Family.LOGNORMAL: ("mu_ln", "sigma_ln"),
}


@dataclass(frozen=True)
class DistributionSpec:
    """Marginal distribution of a single input.

    Use the constructors :meth:`uniform`, :meth:`normal`,
    :meth:`exponential` and :meth:`lognormal` rather than building the
    parameter tuple by hand.
    """

    family: Family
    params: tuple[float, ...]
    label: str = field(default="", compare=True)

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        names = _PARAM_NAMES[self.family]
        if len(self.params) != len(names):
            raise DistributionError(
                f"{self.family.value} takes parameters {names}, got {self.params}"
            )
        if not all(math.isfinite(p) for p in self.params):
            raise DistributionError(f"non-finite parameter in {self.params}")
        p = self.params
        if self.family is Family.UNIFORM and not p[0] < p[1]:
            raise DistributionError(f"uniform needs a < b, got a={p[0]}, b={p[1]}")
        if self.family is Family.NORMAL and not p[1] >= 0:
            raise DistributionError(f"normal needs sd >= 0, got {p[1]}")
        if self.family is Family.EXPONENTIAL and not p[0] > 0:
            raise DistributionError(f"exponential needs rate > 0, got {p[0]}")
        if self.family is Family.LOGNORMAL and not p[1] > 0:
            raise DistributionError(f"lognormal needs sigma_ln > 0, got {p[1]}")

    @classmethod
    def uniform(cls, a: float, b: float, label: str = "") -> DistributionSpec:
        return cls(Family.UNIFORM, (a, b), label)

    @classmethod
    def normal(cls, mean: float, sd: float, label: str = "") -> DistributionSpec:
        return cls(Family.NORMAL, (mean, sd), label)

    @classmethod
    def exponential(cls, rate: float, label: str = "") -> DistributionSpec:
        return cls(Family.EXPONENTIAL, (rate,), label)

    @classmethod
    def lognormal(cls, mu_ln: float, sigma_ln: float, label: str = "") -> DistributionSpec:
        return cls(Family.LOGNORMAL, (mu_ln, sigma_ln), label)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], label: str = "") -> DistributionSpec:
        """Build a spec from a ``{family, params...}`` record.

        Lognormals may be given either as ``mu_ln``/``sigma_ln`` or as
        ``mean``/``error_factor``.
        """
        data = dict(data)
        try:
            family = Family(str(data.pop("family")).strip().lower())
        except (KeyError, ValueError) as exc:
            raise DistributionError(f"missing or unknown family in {data!r}") from exc
        label = str(data.pop("label", label))
        if family is Family.LOGNORMAL and "error_factor" in data:
            extra = set(data) - {"mean", "error_factor"}
            if extra:
                raise DistributionError(f"unexpected lognormal keys {sorted(extra)}")
            return lognormal_from_mean_ef(float(data["mean"]), float(data["error_factor"]), label)
        names = _PARAM_NAMES[family]
        if set(data) != set(names):
            raise DistributionError(
                f"{family.value} needs exactly {names}, got {sorted(data)}"
            )
        return cls(family, tuple(float(data[k]) for k in names), label)

    def to_mapping(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family.value}
        out.update(zip(_PARAM_NAMES[self.family], self.params))
        return out

    def with_label(self, label: str) -> DistributionSpec:
        return DistributionSpec(self.family, self.params, label)

    @property
    def is_point_mass(self) -> bool:
        """A normal with ``sd == 0``: a fixed, known input."""
        return self.family is Family.NORMAL and self.params[1] == 0

    def frozen(self) -> Any:
        """Equivalent frozen ``scipy.stats`` distribution."""
        p = self.params
        if self.is_point_mass:
            raise DistributionError(f"{self} is a point mass; scipy has no zero-scale normal")
        if self.family is Family.UNIFORM:
            return stats.uniform(loc=p[0], scale=p[1] - p[0])
        if self.family is Family.NORMAL:
            return stats.norm(loc=p[0], scale=p[1])
        if self.family is Family.EXPONENTIAL:
            return stats.expon(scale=1.0 / p[0])
        return stats.lognorm(s=p[1], scale=math.exp(p[0]))

    def cdf(self, x: Any) -> Any:
        if self.is_point_mass:
            return np.where(np.asarray(x) >= self.params[0], 1.0, 0.0)
        return self.frozen().cdf(x)

    def survival(self, x: Any) -> Any:
        return 1.0 - self.cdf(x) if self.is_point_mass else self.frozen().sf(x)

    def ppf(self, q: Any) -> Any:
        if self.is_point_mass:
            return np.full(np.shape(q), self.params[0])
        return self.frozen().ppf(q)

    @property
    def mean(self) -> float:
        p = self.params
        if self.family is Family.UNIFORM:
            return 0.5 * (p[0] + p[1])
        if self.family is Family.NORMAL:
            return p[0]
        if self.family is Family.EXPONENTIAL:
            return 1.0 / p[0]
        return math.exp(p[0] + 0.5 * p[1] ** 2)

    @property
    def std(self) -> float:
        p = self.params
        if self.family is Family.UNIFORM:
            return (p[1] - p[0]) / math.sqrt(12.0)
        if self.family is Family.NORMAL:
            return p[1]
        if self.family is Family.EXPONENTIAL:
            return 1.0 / p[0]
        s2 = p[1] ** 2
        return math.sqrt(math.expm1(s2)) * math.exp(p[0] + 0.5 * s2)

    @property
    def variance(self) -> float:
        return self.std**2

    def __str__(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in zip(_PARAM_NAMES[self.family], self.params))
        name = f"{self.label}~" if self.label else ""
        return f"{name}{self.family.value.capitalize()}({args})"


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample(spec: DistributionSpec, n: int, seed: SeedLike = None) -> np.ndarray:
    """Draw ``n`` i.i.d. values from ``spec``."""
    if int(n) != n or n < 1:
        raise DistributionError(f"sample size must be a positive integer, got {n}")
    rng = make_rng(seed)
    p = spec.params
    if spec.family is Family.UNIFORM:
        return rng.uniform(p[0], p[1], int(n))
    if spec.family is Family.NORMAL:
        return rng.normal(p[0], p[1], int(n))
    if spec.family is Family.EXPONENTIAL:
        return rng.exponential(1.0 / p[0], int(n))
    return rng.lognormal(p[0], p[1], int(n))


def sample_matrix(specs: Sequence[DistributionSpec], n: int, seed: SeedLike = None) -> np.ndarray:
    """Draw an ``n x len(specs)`` matrix of independent columns.

    Each column gets its own child stream spawned from ``seed``, so column
    ``j`` does not depend on how many columns come after it.
    """
    if isinstance(seed, np.random.Generator):
        children = [np.random.SeedSequence(int(s)) for s in seed.integers(2**63, size=len(specs))]
    elif isinstance(seed, np.random.SeedSequence):
        children = seed.spawn(len(specs))
    else:
        children = np.random.SeedSequence(seed).spawn(len(specs))
    cols = [sample(spec, n, np.random.default_rng(child)) for spec, child in zip(specs, children)]
    return np.column_stack(cols) if cols else np.empty((int(n), 0))


def analytic_cre(spec: DistributionSpec) -> float:
    """Closed-form cumulative residual entropy.

    Exponential: ``1/rate``; uniform: ``(b - a)/4``; normal: ``0.9032 * sd``.
    """
    p = spec.params
    if spec.family is Family.EXPONENTIAL:
        return 1.0 / p[0]
    if spec.family is Family.UNIFORM:
        return (p[1] - p[0]) / 4.0
    if spec.family is Family.NORMAL:
        return GAUSSIAN_CRE * p[1]
    raise UnsupportedFamilyError(f"no closed-form CRE for the {spec.family.value} family")


def lognormal_from_mean_ef(mean: float, error_factor: float, label: str = "") -> DistributionSpec:
    """Lognormal with a given arithmetic mean and error factor.

    The error factor is the 95th percentile over the median, so
    ``sigma_ln = ln(EF) / 1.645`` and ``mu_ln = ln(mean) - sigma_ln**2 / 2``.
    """
    if not mean > 0:
        raise DistributionError(f"lognormal mean must be positive, got {mean}")
    if not error_factor > 1:
        raise DistributionError(f"error factor must exceed 1, got {error_factor}")
    sigma_ln = math.log(error_factor) / Z95
    mu_ln = math.log(mean) - 0.5 * sigma_ln**2
    return DistributionSpec.lognormal(mu_ln, sigma_ln, label)
