"""Batch experiments: one config in, one reproducible report out."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .baselines import SobolResult, delta_index, shannon_mi, sobol_indices
from .config import ExperimentConfig
from .costs import CostResult, strategy_table
from .distributions import sample_matrix
from .errors import ConfigError, CREError
from .estimators import GridParams, SampleMatrix, conditional_cre_1, conditional_cre_2, empirical_cre
from .importance import DecompositionResult, decompose
from .models import get_model

#: report column for each method, in table order
COLUMNS = {"sobol_main": "S", "sobol_total": "ST", "delta": "delta", "shannon_mi": "eta", "kappa": "kappa"}


def ranks(values: dict[str, float]) -> dict[str, int]:
    """1 for the largest value; ties keep dictionary order."""
    order = sorted(values, key=lambda k: -values[k])
    return {k: order.index(k) + 1 for k in values}


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


@dataclass
class SensitivityReport:
    config: ExperimentConfig
    indices: dict[str, dict[str, float]]
    decomposition: DecompositionResult | None = None
    sobol: SobolResult | None = None
    cost: CostResult | None = None
    output_uncertainty: dict[str, float] = field(default_factory=dict)
    model_evaluations: dict[str, int] = field(default_factory=dict)
    wall_time: dict[str, float] = field(default_factory=dict)

    @property
    def ranks(self) -> dict[str, dict[str, int]]:
        out = {}
        for method in COLUMNS.values():
            values = {lab: row[method] for lab, row in self.indices.items() if method in row}
            if values:
                out[method] = ranks(values)
        return out

    def to_dict(self) -> dict[str, Any]:
        """Everything except wall times, which would break byte-identical reruns."""
        return {
            "experiment": self.config.to_dict(),
            "indices": self.indices,
            "ranks": self.ranks,
            "decomposition": self.decomposition.to_dict() if self.decomposition else None,
            "sobol_raw": (
                {
                    "first": dict(zip(self.config.labels, self.sobol.raw_first.tolist())),
                    "total": dict(zip(self.config.labels, self.sobol.raw_total.tolist())),
                }
                if self.sobol
                else None
            ),
            "cost": self.cost.to_dict() if self.cost else None,
            "output_uncertainty": self.output_uncertainty,
            "model_evaluations": self.model_evaluations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def indices_csv(self) -> str:
        cols = [c for c in COLUMNS.values() if c in self.ranks]
        header = ["variable"] + [h for c in cols for h in (c, f"{c}_rank")]
        rk = self.ranks
        rows = [[lab] + [v for c in cols for v in (self.indices[lab][c], rk[c][lab])] for lab in self.indices]
        return _csv(header, rows)

    def decomposition_csv(self) -> str:
        d = self.decomposition
        assert d is not None
        rows: list[list[Any]] = [["total_cre", d.total_cre, d.total_cre]]
        rows += [[f"kappa[{k}]", v, d.raw_kappa_single[k]] for k, v in d.kappa_single.items()]
        rows += [[f"kappa[{a},{b}]", v, d.raw_kappa_pair[(a, b)]] for (a, b), v in d.kappa_pair.items()]
        rows.append(["higher_order", d.higher_order_residual, d.raw_residual])
        return _csv(["term", "value", "raw"], rows)

    def cost_csv(self) -> str:
        c = self.cost
        assert c is not None
        rows = [[r.label, r.magnitude, r.relative_uncertainty, r.cost, r.kappa] for r in c.rows.values()]
        return _csv(["variable", "magnitude", "relative_uncertainty", "cost", "kappa"], rows)

    def write(self, out_dir: str | Path) -> list[Path]:
        """Write ``report.json`` and the CSV tables; returns the written paths.

        Wall times go to a separate ``timing.json`` so that the report files
        stay byte-identical across reruns.
        """
        out = Path(out_dir)
        files = {"report.json": self.to_json(), "indices.csv": self.indices_csv()}
        if self.decomposition is not None:
            files["decomposition.csv"] = self.decomposition_csv()
        if self.cost is not None:
            files["cost.csv"] = self.cost_csv()
        written = []
        for name, text in files.items():
            _atomic_write(out / name, text)
            written.append(out / name)
        _atomic_write(out / "timing.json", json.dumps(self.wall_time, indent=2, sort_keys=True) + "\n")
        return written

    def summary(self) -> str:
        cols = [c for c in COLUMNS.values() if c in self.ranks]
        rk = self.ranks
        lines = [f"{'variable':<10}" + "".join(f"{c:>16}" for c in cols)]
        for lab, row in self.indices.items():
            cells = "".join(f"{row[c]:>11.4f} ({rk[c][lab]})" for c in cols)
            lines.append(f"{lab:<10}{cells}")
        if self.decomposition is not None:
            d = self.decomposition
            lines.append(f"output CRE = {d.total_cre:.6g}; higher-order share = {d.higher_order_residual:.4f}")
        if self.cost is not None:
            lines.append(f"recommended uncertainty-reduction target: {self.cost.recommendation}")
        return "\n".join(lines)


def _run_method(method: str, fn: Any, *args: Any, **kwargs: Any) -> Any:
    try:
        return fn(*args, **kwargs)
    except CREError as exc:
        raise CREError(f"method {method} failed: {exc}") from exc


def run_experiment(config: ExperimentConfig) -> SensitivityReport:
    """Sample, evaluate and estimate every requested index.

    Given-data methods (kappa, delta, eta) share one sample; Sobol uses its
    own pick-freeze design. Both streams derive from ``config.seed``.
    """
    model = get_model(config.model)
    specs = list(config.inputs)
    labels = config.labels
    given_seq, sobol_seq = np.random.SeedSequence(config.seed).spawn(2)
    methods = set(config.methods)
    indices: dict[str, dict[str, float]] = {lab: {} for lab in labels}
    report = SensitivityReport(config=config, indices=indices)
    timing = report.wall_time
    t_start = time.perf_counter()

    if methods & {"kappa", "kappa_pairs", "delta", "shannon_mi"}:
        t0 = time.perf_counter()
        x = sample_matrix(specs, config.n, given_seq)
        y = _run_method("sampling", model, x)
        samples = _run_method("sampling", SampleMatrix, x, y, labels, config.seed)
        report.model_evaluations["given_data"] = config.n
        report.output_uncertainty = {"cre": empirical_cre(y), "variance": float(np.var(y))}
        timing["sampling"] = time.perf_counter() - t0

        if "kappa" in methods:
            t0 = time.perf_counter()
            report.decomposition = _run_method(
                "kappa", decompose, samples, config.grid, pairs="kappa_pairs" in methods, workers=config.workers
            )
            for lab, v in report.decomposition.kappa_single.items():
                indices[lab]["kappa"] = v
            timing["kappa"] = time.perf_counter() - t0
        if "delta" in methods:
            t0 = time.perf_counter()
            for lab in labels:
                indices[lab]["delta"] = _run_method(
                    "delta", delta_index, samples, lab, config.delta_partition, config.delta_y_bins
                )
            timing["delta"] = time.perf_counter() - t0
        if "shannon_mi" in methods:
            t0 = time.perf_counter()
            for lab in labels:
                indices[lab]["eta"] = _run_method("shannon_mi", shannon_mi, samples, lab, config.mi_bins)
            timing["shannon_mi"] = time.perf_counter() - t0

    if "sobol" in methods:
        t0 = time.perf_counter()
        report.sobol = _run_method(
            "sobol", sobol_indices, model, specs, config.sobol_size, sobol_seq, config.sobol_design
        )
        for k, lab in enumerate(labels):
            indices[lab]["S"] = float(report.sobol.first[k])
            indices[lab]["ST"] = float(report.sobol.total[k])
        report.model_evaluations["sobol"] = report.sobol.n_evaluations
        timing["sobol"] = time.perf_counter() - t0

    if config.cost is not None:
        assert report.decomposition is not None
        report.cost = _run_method("cost", strategy_table, specs, report.decomposition, config.cost)

    # fixed column order regardless of which method ran first
    for lab in labels:
        indices[lab] = {c: indices[lab][c] for c in COLUMNS.values() if c in indices[lab]}
    timing["total"] = time.perf_counter() - t_start
    return report


@dataclass(frozen=True)
class ConvergenceRow:
    quantity: str
    target: str
    m: int
    I: int  # noqa: E741
    J: int
    size: int
    repeats: int
    mean: float
    std: float
    min: float
    max: float
    mean_time_s: float


CONVERGENCE_HEADER = [f for f in ConvergenceRow.__dataclass_fields__]


def convergence_study(
    config: ExperimentConfig,
    sizes: Sequence[int] | None = None,
    repeats: int | None = None,
    quantity: str | None = None,
    target: str | None = None,
    grids: Sequence[GridParams] | None = None,
) -> list[ConvergenceRow]:
    """Repeat an estimator over growing sample sizes.

    ``quantity`` is one of ``cre`` (target ``output`` or an input label),
    ``conditional_cre_1`` (target: the conditioning input),
    ``conditional_cre_2`` (target: two inputs, ``"a,b"``) or ``kappa``
    (target ``all`` or one input label). Repeat ``r`` at size ``N`` uses
    the seed ``(config.seed, N, r)``, shared by every entry of ``grids`` so
    hyper-parameter settings are compared on the same samples. Timings
    cover the estimator only, not sampling or model runs.
    """
    spec = config.converge
    sizes = list(sizes if sizes is not None else spec.sizes)
    repeats = repeats if repeats is not None else spec.repeats
    quantity = quantity or spec.quantity
    target = target or spec.target
    grids = list(grids) if grids else [config.grid]
    if not sizes:
        raise ConfigError("convergence study needs at least one sample size")
    if sorted(sizes) != sizes or sizes[0] < 2:
        raise ConfigError(f"sizes must be ascending and >= 2, got {sizes}")
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")

    model = get_model(config.model)
    labels = list(config.labels)

    def col(name: str) -> int:
        if name not in labels:
            raise ConfigError(f"unknown input {name!r}; have {labels}")
        return labels.index(name)

    if quantity == "cre":
        targets = [target]
        if target != "output":
            col(target)
    elif quantity == "conditional_cre_1":
        targets = [labels[col(target)]]
    elif quantity == "conditional_cre_2":
        pair = [t.strip() for t in target.split(",")]
        if len(pair) != 2:
            raise ConfigError(f"conditional_cre_2 needs two inputs 'a,b', got {target!r}")
        for p in pair:
            col(p)
        targets = [",".join(pair)]
    elif quantity == "kappa":
        targets = labels if target in ("all", "output") else [labels[col(target)]]
    else:
        raise ConfigError(f"unknown quantity {quantity!r}")

    rows: list[ConvergenceRow] = []
    # values[(grid index, target)][size index] -> list over repeats
    values: dict[tuple[int, str], list[list[float]]] = {
        (g, t): [[] for _ in sizes] for g in range(len(grids)) for t in targets
    }
    times: dict[tuple[int, str], list[list[float]]] = {
        (g, t): [[] for _ in sizes] for g in range(len(grids)) for t in targets
    }
    for si, size in enumerate(sizes):
        for r in range(repeats):
            x = sample_matrix(config.inputs, size, np.random.SeedSequence([config.seed, size, r]))
            y = model(x)
            for gi, grid in enumerate(grids):
                for t in targets:
                    t0 = time.perf_counter()
                    if quantity == "cre":
                        v = empirical_cre(y if t == "output" else x[:, col(t)])
                    elif quantity == "conditional_cre_1":
                        v = conditional_cre_1(x[:, col(t)], y, grid.m)
                    elif quantity == "conditional_cre_2":
                        a, b = (col(p) for p in t.split(","))
                        v = conditional_cre_2(x[:, a], x[:, b], y, grid.I, grid.J)
                    else:
                        total = empirical_cre(y)
                        if total <= 0:
                            raise CREError("model output is constant: its CRE is zero")
                        v = 1.0 - conditional_cre_1(x[:, col(t)], y, grid.m) / total
                    times[(gi, t)][si].append(time.perf_counter() - t0)
                    values[(gi, t)][si].append(v)

    for gi, grid in enumerate(grids):
        for t in targets:
            for si, size in enumerate(sizes):
                v = np.asarray(values[(gi, t)][si])
                rows.append(
                    ConvergenceRow(
                        quantity=quantity, target=t, m=grid.m, I=grid.I, J=grid.J, size=size,
                        repeats=repeats, mean=float(v.mean()), std=float(v.std(ddof=1)) if v.size > 1 else 0.0,
                        min=float(v.min()), max=float(v.max()),
                        mean_time_s=float(np.mean(times[(gi, t)][si])),
                    )
                )
    return rows


def convergence_csv(rows: Sequence[ConvergenceRow]) -> str:
    return _csv(CONVERGENCE_HEADER, ([getattr(r, f) for f in CONVERGENCE_HEADER] for r in rows))


def write_convergence(rows: Sequence[ConvergenceRow], path: str | Path) -> Path:
    path = Path(path)
    _atomic_write(path, convergence_csv(rows))
    return path

