"""Cost of uncertainty reduction and the resulting strategy table.

The cost of shrinking an input's relative uncertainty ``u`` relative to a
reference level is ``K0 * ((u_ref / u) ** alpha - 1)``: zero at the
reference, growing without bound as ``u`` approaches 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .distributions import DistributionSpec, analytic_cre
from .errors import CREError
from .importance import DecompositionResult


class Framework(str, enum.Enum):
    CRE = "cre"
    VARIANCE = "variance"


@dataclass(frozen=True)
class CostSpec:
    u_reference: float
    K0: float = 100.0
    alpha: float = 0.2
    framework: Framework = Framework.CRE
    budget: float = math.inf

    def __post_init__(self) -> None:
        object.__setattr__(self, "framework", Framework(self.framework))
        for name in ("u_reference", "K0", "alpha", "budget"):
            if not getattr(self, name) > 0:
                raise CREError(f"cost parameter {name} must be positive, got {getattr(self, name)}")


def uncertainty_magnitude(spec: DistributionSpec, framework: Framework | str) -> float:
    """Absolute uncertainty: analytic CRE, or the variance."""
    if Framework(framework) is Framework.CRE:
        return analytic_cre(spec)
    return spec.variance


def relative_uncertainty(spec: DistributionSpec, framework: Framework | str = Framework.CRE) -> float:
    """Mean-adjusted uncertainty: ``CRE/mean`` or ``sd/mean``.

    The CRE form works for every family with a closed-form CRE; lognormals
    raise :class:`~cresa.errors.UnsupportedFamilyError`.
    """
    mean = spec.mean
    if mean == 0:
        raise CREError(f"relative uncertainty undefined for zero-mean input {spec}")
    spread = analytic_cre(spec) if Framework(framework) is Framework.CRE else spec.std
    return spread / abs(mean)


def reduction_cost(u: float, cost: CostSpec) -> float:
    if not 0 < u <= cost.u_reference:
        raise CREError(f"relative uncertainty must lie in (0, {cost.u_reference}], got {u}")
    return cost.K0 * ((cost.u_reference / u) ** cost.alpha - 1.0)


@dataclass(frozen=True)
class CostRow:
    label: str
    magnitude: float
    relative_uncertainty: float
    cost: float
    kappa: float


@dataclass(frozen=True)
class CostResult:
    rows: dict[str, CostRow]
    recommendation: str
    cost_spec: CostSpec
    within_budget: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict[str, Any]:
        return {
            "framework": self.cost_spec.framework.value,
            "u_reference": self.cost_spec.u_reference,
            "K0": self.cost_spec.K0,
            "alpha": self.cost_spec.alpha,
            "budget": None if math.isinf(self.cost_spec.budget) else self.cost_spec.budget,
            "rows": {
                k: {
                    "magnitude": r.magnitude,
                    "relative_uncertainty": r.relative_uncertainty,
                    "cost": r.cost,
                    "kappa": r.kappa,
                }
                for k, r in self.rows.items()
            },
            "recommendation": self.recommendation,
        }


def strategy_table(
    specs: Sequence[DistributionSpec],
    importance: DecompositionResult | Mapping[str, float],
    cost: CostSpec,
) -> CostResult:
    """Tabulate magnitude, relative uncertainty, cost and importance per input.

    The recommended target is the most important input whose cost fits the
    budget; when nothing fits, the cheapest one. Ties go to the label that
    sorts first, so the answer does not depend on input order.
    """
    kappa = importance.kappa_single if isinstance(importance, DecompositionResult) else dict(importance)
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels) or set(labels) != set(kappa):
        raise CREError(f"need one labelled spec per decomposed input; specs {labels}, inputs {sorted(kappa)}")
    rows = {}
    for spec in specs:
        u = relative_uncertainty(spec, cost.framework)
        rows[spec.label] = CostRow(
            label=spec.label,
            magnitude=uncertainty_magnitude(spec, cost.framework),
            relative_uncertainty=u,
            cost=reduction_cost(u, cost),
            kappa=float(kappa[spec.label]),
        )
    affordable = tuple(sorted(k for k, r in rows.items() if r.cost <= cost.budget))
    if affordable:
        best = min(affordable, key=lambda k: (-rows[k].kappa, k))
    else:
        best = min(rows, key=lambda k: (rows[k].cost, k))
    return CostResult(rows=rows, recommendation=best, cost_spec=cost, within_budget=affordable)
