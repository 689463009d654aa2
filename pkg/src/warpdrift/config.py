"""Strict JSON configuration documents for the command-line tool.

A document has up to four sections, each optional::

    {
      "sde":        {"model": "langevin", "x0": 2.0, "T": 5.0, "n": 50, "N": 100,
                     "master_seed": 20240601},
      "estimator":  {"kernel": "bump", "t0": 0.0, "h": 0.04, "input": null,
                     "grid": {"kind": "quantile", "lo": 0.1, "hi": 0.9, "points": 100}},
      "pco":        {"delta": "bump", "delta_scale": 1.0, "n_quad": 201, "kappa": 0.9,
                     "bandwidths": [0.02, 0.04, ...]},
      "experiment": {"replications": 100}
    }

Unknown keys are rejected and values are validated on load.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path as FsPath
from typing import Optional

from .errors import InvalidConfigError
from .experiments import EvalGrid, ExperimentConfig
from .kernels import get_kernel
from .pco import BandwidthGrid
from .sde import get_model

SHIPPED = ("model1_table1", "model2_table1")


def _strict(cls, data, section):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise InvalidConfigError(f"section {section!r} must be an object", section)
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InvalidConfigError(f"unknown key(s) in {section!r}: {', '.join(unknown)}",
                                 f"{section}.{unknown[0]}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise InvalidConfigError(f"bad value in {section!r}: {exc}", section) from None


def _number(section, name, value, positive=False, integer=False, nonneg=False):
    ok_type = isinstance(value, int) if integer else isinstance(value, (int, float))
    if isinstance(value, bool) or not ok_type:
        kind = "an integer" if integer else "a number"
        raise InvalidConfigError(f"{section}.{name} must be {kind}, got {value!r}", f"{section}.{name}")
    if positive and not value > 0:
        raise InvalidConfigError(f"{section}.{name} must be positive, got {value!r}", f"{section}.{name}")
    if nonneg and value < 0:
        raise InvalidConfigError(f"{section}.{name} must be >= 0, got {value!r}", f"{section}.{name}")


@dataclass
class SdeSection:
    model: str = "langevin"
    x0: float = 2.0
    T: float = 5.0
    n: int = 50
    N: int = 100
    master_seed: int = 20240601

    def __post_init__(self):
        try:
            get_model(self.model)
        except InvalidConfigError:
            raise InvalidConfigError(f"sde.model: unknown model {self.model!r}", "sde.model") from None
        _number("sde", "x0", self.x0)
        _number("sde", "T", self.T, positive=True)
        _number("sde", "n", self.n, positive=True, integer=True)
        _number("sde", "N", self.N, positive=True, integer=True)
        _number("sde", "master_seed", self.master_seed, integer=True, nonneg=True)


@dataclass
class EstimatorSection:
    kernel: str = "bump"
    t0: float = 0.0
    h: float = 0.04
    input: Optional[str] = None
    grid: dict = field(default_factory=lambda: asdict(EvalGrid()))

    def __post_init__(self):
        try:
            get_kernel(self.kernel)
        except ValueError as exc:
            raise InvalidConfigError(f"estimator.kernel: {exc}", "estimator.kernel") from None
        _number("estimator", "t0", self.t0, nonneg=True)
        _number("estimator", "h", self.h, positive=True)
        self.grid = asdict(_strict(EvalGrid, self.grid, "estimator.grid"))

    def eval_grid(self) -> EvalGrid:
        return EvalGrid(**self.grid)


@dataclass
class PcoSection:
    delta: str = "bump"
    delta_scale: float = 1.0
    n_quad: int = 201
    kappa: float = 0.9
    bandwidths: list = field(default_factory=lambda: [round(0.02 * k, 12) for k in range(1, 11)])

    def __post_init__(self):
        try:
            get_kernel(self.delta)
        except ValueError as exc:
            raise InvalidConfigError(f"pco.delta: {exc}", "pco.delta") from None
        _number("pco", "delta_scale", self.delta_scale, positive=True)
        _number("pco", "n_quad", self.n_quad, positive=True, integer=True)
        _number("pco", "kappa", self.kappa, positive=True)
        if not isinstance(self.bandwidths, list):
            raise InvalidConfigError("pco.bandwidths must be a list", "pco.bandwidths")
        try:
            BandwidthGrid(tuple(self.bandwidths), self.kappa)
        except (InvalidConfigError, ValueError) as exc:
            raise InvalidConfigError(f"pco: {exc}", "pco.bandwidths") from None
        self.bandwidths = [float(h) for h in self.bandwidths]


@dataclass
class ExperimentSection:
    replications: int = 100

    def __post_init__(self):
        _number("experiment", "replications", self.replications, positive=True, integer=True)


@dataclass
class Config:
    sde: SdeSection = field(default_factory=SdeSection)
    estimator: EstimatorSection = field(default_factory=EstimatorSection)
    pco: PcoSection = field(default_factory=PcoSection)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        if not isinstance(data, dict):
            raise InvalidConfigError("configuration must be a JSON object")
        sections = {"sde": SdeSection, "estimator": EstimatorSection,
                    "pco": PcoSection, "experiment": ExperimentSection}
        unknown = sorted(set(data) - set(sections))
        if unknown:
            raise InvalidConfigError(f"unknown section(s): {', '.join(unknown)}", unknown[0])
        cfg = cls(**{name: _strict(kind, data.get(name), name) for name, kind in sections.items()})
        if not cfg.estimator.t0 < cfg.sde.T:
            raise InvalidConfigError("estimator.t0 must be smaller than sde.T", "estimator.t0")
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def experiment_config(self, output_dir=None) -> ExperimentConfig:
        return ExperimentConfig(
            model=self.sde.model, N=self.sde.N, n=self.sde.n, T=float(self.sde.T),
            t0=float(self.estimator.t0), x0=float(self.sde.x0),
            bandwidths=tuple(self.pco.bandwidths), kernel=self.estimator.kernel,
            delta=self.pco.delta, delta_scale=float(self.pco.delta_scale), n_quad=self.pco.n_quad,
            kappa=float(self.pco.kappa), replications=self.experiment.replications,
            master_seed=self.sde.master_seed, grid=self.estimator.eval_grid(),
            output_dir=None if output_dir is None else str(output_dir),
        )


def loads(text: str) -> Config:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidConfigError(f"invalid JSON: {exc}") from None
    return Config.from_dict(data)


def load(path) -> Config:
    """Load a config file; a bare shipped name such as ``model1_table1`` also works."""
    p = FsPath(path)
    if not p.exists() and str(path) in SHIPPED:
        text = resources.files("warpdrift.configs").joinpath(f"{path}.json").read_text()
        return loads(text)
    return loads(p.read_text())
