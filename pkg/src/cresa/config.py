"""Experiment configuration files.

Configs are INI files read with :mod:`configparser`. Keys are case
sensitive. Numeric values accept ``pi``, ``e`` and ``inf`` with an optional
sign. A minimal file::

    [experiment]
    model = ishigami
    n = 20000
    seed = 1
    methods = kappa, kappa_pairs, sobol, delta, shannon_mi

    [grid]
    m = 500
    I = 20
    J = 20

    [input.x1]
    family = uniform
    a = -pi
    b = pi

    [cost]
    u_reference = 0.1
    K0 = 100
    alpha = 0.2

Input sections are taken in file order; when none are given the model's
published input distributions are used.
"""
from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .costs import CostSpec
from .distributions import DistributionSpec
from .errors import ConfigError, CREError
from .estimators import GridParams
from .models import default_inputs, get_model

METHODS = ("kappa", "kappa_pairs", "sobol", "delta", "shannon_mi")
QUANTITIES = ("cre", "conditional_cre_1", "conditional_cre_2", "kappa")

_CONSTANTS = {"pi": math.pi, "e": math.e, "inf": math.inf}


def parse_number(text: str) -> float:
    s = str(text).strip().lower()
    sign = 1.0
    if s[:1] in "+-" and s[1:] in _CONSTANTS:
        sign, s = (-1.0 if s[0] == "-" else 1.0), s[1:]
    if s in _CONSTANTS:
        return sign * _CONSTANTS[s]
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def parse_int(text: str) -> int:
    value = parse_number(text)
    if not float(value).is_integer():
        raise ConfigError(f"not an integer: {text!r}")
    return int(value)


def parse_list(text: str) -> list[str]:
    return [t.strip() for t in str(text).replace(";", ",").split(",") if t.strip()]


@dataclass(frozen=True)
class ConvergeSpec:
    quantity: str = "cre"
    target: str = "output"
    sizes: tuple[int, ...] = ()
    repeats: int = 10


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    inputs: tuple[DistributionSpec, ...]
    n: int = 20000
    seed: int = 0
    methods: tuple[str, ...] = METHODS
    grid: GridParams = GridParams()
    sobol_n: int | None = None
    sobol_design: str = "qmc"
    delta_partition: int = 20
    delta_y_bins: int = 100
    mi_bins: int = 20
    workers: int = 1
    cost: CostSpec | None = None
    output_dir: str | None = None
    converge: ConvergeSpec = field(default_factory=ConvergeSpec)
    name: str = ""

    def __post_init__(self) -> None:
        model = get_model(self.model)
        if len(self.inputs) != model.arity:
            raise ConfigError(f"model {self.model} takes {model.arity} inputs, config has {len(self.inputs)}")
        labels = [s.label for s in self.inputs]
        if len(set(labels)) != len(labels) or "" in labels:
            raise ConfigError(f"input labels must be unique and non-empty, got {labels}")
        if not self.methods:
            raise ConfigError("no methods requested")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        if "kappa_pairs" in self.methods and "kappa" not in self.methods:
            object.__setattr__(self, "methods", ("kappa",) + tuple(self.methods))
        minimum = {
            "kappa": self.grid.m,
            "kappa_pairs": self.grid.I * self.grid.J,
            "delta": max(1000, self.delta_partition),
            "shannon_mi": max(1000, self.mi_bins),
        }
        for method in self.methods:
            if method in minimum and self.n < minimum[method]:
                raise ConfigError(f"method {method} needs n >= {minimum[method]}, got n={self.n}")
        if "sobol" in self.methods and self.sobol_size < 1000:
            raise ConfigError(f"method sobol needs a base size >= 1000, got {self.sobol_size}")
        if self.sobol_design not in ("qmc", "mc"):
            raise ConfigError(f"sobol_design must be 'qmc' or 'mc', got {self.sobol_design!r}")
        if self.cost is not None and "kappa" not in self.methods:
            raise ConfigError("the cost section needs the kappa method")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.inputs)

    @property
    def sobol_size(self) -> int:
        return self.sobol_n if self.sobol_n is not None else self.n

    def replace(self, **changes: Any) -> ExperimentConfig:
        try:
            return dataclasses.replace(self, **changes)
        except CREError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "model": self.model,
            "inputs": {s.label: s.to_mapping() for s in self.inputs},
            "n": self.n,
            "seed": self.seed,
            "methods": list(self.methods),
            "grid": {"m": self.grid.m, "I": self.grid.I, "J": self.grid.J},
            "sobol": {"n_base": self.sobol_size, "design": self.sobol_design},
            "delta": {"partition": self.delta_partition, "y_bins": self.delta_y_bins},
            "shannon_mi": {"bins": self.mi_bins},
        }


def _section(parser: configparser.ConfigParser, name: str) -> dict[str, str]:
    return dict(parser[name]) if parser.has_section(name) else {}


def _grid(raw: dict[str, str]) -> GridParams:
    try:
        return GridParams(
            m=parse_int(raw.pop("m", "500")),
            I=parse_int(raw.pop("I", "20")),
            J=parse_int(raw.pop("J", "20")),
        )
    except CREError as exc:
        raise ConfigError(str(exc)) from exc


def _no_leftovers(section: str, raw: dict[str, str]) -> None:
    if raw:
        raise ConfigError(f"unknown keys in [{section}]: {sorted(raw)}")


def loads_config(text: str, name: str = "") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc

    known = {"experiment", "grid", "baselines", "cost", "output", "converge"}
    for section in parser.sections():
        if section not in known and not section.startswith("input."):
            raise ConfigError(f"unknown section [{section}]")

    exp = _section(parser, "experiment")
    if "model" not in exp:
        raise ConfigError("[experiment] needs a model")
    model = exp.pop("model").strip()
    try:
        get_model(model)
    except CREError as exc:
        raise ConfigError(str(exc)) from exc

    inputs = []
    for section in parser.sections():
        if section.startswith("input."):
            label = section[len("input."):].strip()
            raw: dict[str, Any] = dict(parser[section])
            for key in raw:
                if key != "family":
                    raw[key] = parse_number(raw[key])
            try:
                inputs.append(DistributionSpec.from_mapping(raw, label))
            except CREError as exc:
                raise ConfigError(f"[{section}]: {exc}") from exc
    if not inputs:
        inputs = default_inputs(model)

    kwargs: dict[str, Any] = {"model": model, "inputs": tuple(inputs), "name": name}
    if "n" in exp:
        kwargs["n"] = parse_int(exp.pop("n"))
    if "seed" in exp:
        kwargs["seed"] = parse_int(exp.pop("seed"))
    if "methods" in exp:
        kwargs["methods"] = tuple(parse_list(exp.pop("methods")))
    if "sobol_n" in exp:
        kwargs["sobol_n"] = parse_int(exp.pop("sobol_n"))
    if "sobol_design" in exp:
        kwargs["sobol_design"] = exp.pop("sobol_design").strip()
    if "workers" in exp:
        kwargs["workers"] = parse_int(exp.pop("workers"))
    _no_leftovers("experiment", exp)

    grid_raw = _section(parser, "grid")
    kwargs["grid"] = _grid(grid_raw)
    _no_leftovers("grid", grid_raw)

    base = _section(parser, "baselines")
    for key in ("delta_partition", "delta_y_bins", "mi_bins"):
        if key in base:
            kwargs[key] = parse_int(base.pop(key))
    _no_leftovers("baselines", base)

    if parser.has_section("cost"):
        raw_cost = _section(parser, "cost")
        try:
            kwargs["cost"] = CostSpec(
                u_reference=parse_number(raw_cost.pop("u_reference")),
                K0=parse_number(raw_cost.pop("K0", "100")),
                alpha=parse_number(raw_cost.pop("alpha", "0.2")),
                framework=raw_cost.pop("framework", "cre").strip().lower(),
                budget=parse_number(raw_cost.pop("budget", "inf")),
            )
        except KeyError:
            raise ConfigError("[cost] needs u_reference") from None
        except CREError as exc:
            raise ConfigError(f"[cost]: {exc}") from exc
        _no_leftovers("cost", raw_cost)

    out = _section(parser, "output")
    if "dir" in out:
        kwargs["output_dir"] = out.pop("dir").strip()
    _no_leftovers("output", out)

    conv = _section(parser, "converge")
    if conv:
        quantity = conv.pop("quantity", "cre").strip()
        if quantity not in QUANTITIES:
            raise ConfigError(f"unknown converge quantity {quantity!r}; choose from {QUANTITIES}")
        kwargs["converge"] = ConvergeSpec(
            quantity=quantity,
            target=conv.pop("target", "output").strip(),
            sizes=tuple(parse_int(s) for s in parse_list(conv.pop("sizes", ""))),
            repeats=parse_int(conv.pop("repeats", "10")),
        )
        _no_leftovers("converge", conv)

    try:
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except CREError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads_config(text, name=path.stem)
