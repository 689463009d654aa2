"""Replication harness comparing PCO-selected and oracle bandwidths.

Each replication simulates one ensemble, runs PCO selection and the oracle
selection on it, and records both MSEs on the same evaluation grid. The
default grid is 100 uniform points between the 10% and 90% occupation
quantiles of the replication's pooled sample, i.e. away from the boundary
layers of the warped design where the truncated kernel is biased whatever
the bandwidth.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path as FsPath
from typing import Optional

import numpy as np

from .errors import InvalidConfigError, SimulationBlowupError
from .kernels import get_kernel
from .pco import BandwidthGrid, WeightedNorm, oracle_select, pco_select
from .sde import RNG_DESCRIPTION, get_model, simulate_ensemble, split_seed
from .warp import EmpiricalWarp, empirical_cdf

__all__ = [
    "EvalGrid",
    "ExperimentConfig",
    "ReplicationRow",
    "ExperimentReport",
    "run_replication",
    "run_experiment",
    "write_report",
    "model1_table1",
    "model2_table1",
]

log = logging.getLogger(__name__)

REPORT_COLUMNS = ("rep", "seed", "h_hat", "h_oracle", "mse_pco", "mse_oracle")


@dataclass(frozen=True)
class EvalGrid:
    """Evaluation grid for MSEs.

    ``kind="quantile"``: ``points`` uniform points between the empirical
    occupation quantiles ``lo`` and ``hi`` of the ensemble.
    ``kind="interval"``: ``points`` uniform points on ``[lo, hi]``.
    """

    kind: str = "quantile"
    lo: float = 0.1
    hi: float = 0.9
    points: int = 100

    def __post_init__(self):
        if self.kind not in ("quantile", "interval"):
            raise InvalidConfigError(f"grid kind must be 'quantile' or 'interval', got {self.kind!r}", "grid.kind")
        if not self.lo < self.hi:
            raise InvalidConfigError("grid needs lo < hi", "grid.lo")
        if self.kind == "quantile" and not (0 <= self.lo and self.hi <= 1):
            raise InvalidConfigError("quantile levels must lie in [0, 1]", "grid.lo")
        if int(self.points) < 2:
            raise InvalidConfigError("grid needs at least 2 points", "grid.points")

    def build(self, warp: Optional[EmpiricalWarp] = None) -> np.ndarray:
        if self.kind == "interval":
            return np.linspace(self.lo, self.hi, self.points)
        if warp is None:
            raise InvalidConfigError("a quantile grid needs an empirical warp", "grid.kind")
        s = warp.samples
        k_lo = max(int(np.ceil(self.lo * s.size)) - 1, 0)
        k_hi = max(int(np.ceil(self.hi * s.size)) - 1, 0)
        return np.linspace(s[k_lo], s[k_hi], self.points)


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "langevin"
    N: int = 100
    n: int = 50
    T: float = 5.0
    t0: float = 0.0
    x0: float = 2.0
    bandwidths: tuple = tuple(round(0.02 * k, 12) for k in range(1, 11))
    kernel: str = "bump"
    delta: str = "bump"
    delta_scale: float = 1.0
    n_quad: int = 201
    kappa: float = 0.9
    replications: int = 100
    master_seed: int = 20240601
    grid: EvalGrid = field(default_factory=EvalGrid)
    output_dir: Optional[str] = None

    def __post_init__(self):
        get_model(self.model)
        get_kernel(self.kernel)
        get_kernel(self.delta)
        if int(self.N) < 1:
            raise InvalidConfigError("N must be >= 1", "N")
        if int(self.n) < 1:
            raise InvalidConfigError("n must be >= 1", "n")
        if not self.T > 0:
            raise InvalidConfigError("T must be positive", "T")
        if not 0 <= self.t0 < self.T:
            raise InvalidConfigError("need 0 <= t0 < T", "t0")
        if int(self.replications) < 1:
            raise InvalidConfigError("replications must be >= 1", "replications")
        object.__setattr__(self, "bandwidths", BandwidthGrid(tuple(self.bandwidths), self.kappa).values)
        WeightedNorm(get_kernel(self.delta), self.n_quad, self.delta_scale)

    def bandwidth_grid(self) -> BandwidthGrid:
        return BandwidthGrid(self.bandwidths, self.kappa)

    def weighted_norm(self) -> WeightedNorm:
        return WeightedNorm(get_kernel(self.delta), self.n_quad, self.delta_scale)


def model1_table1(**overrides) -> ExperimentConfig:
    """Langevin model, N=100, n=50, T=5, x0=2, H = {0.02k}."""
    return ExperimentConfig(**{"model": "langevin", **overrides})


def model2_table1(**overrides) -> ExperimentConfig:
    """Nonlinear model, same design, H = {0.01k}."""
    base = {"model": "nonlinear", "bandwidths": tuple(round(0.01 * k, 12) for k in range(1, 11))}
    return ExperimentConfig(**{**base, **overrides})


@dataclass(frozen=True)
class ReplicationRow:
    rep: int
    seed: int
    h_hat: float
    h_oracle: float
    mse_pco: float
    mse_oracle: float
    error: Optional[str] = None


def run_replication(cfg: ExperimentConfig, index: int) -> ReplicationRow:
    seed = split_seed(cfg.master_seed, index)
    model = get_model(cfg.model)
    K = get_kernel(cfg.kernel)
    try:
        ens = simulate_ensemble(model, cfg.x0, cfg.T, cfg.n, cfg.N, seed, cfg.t0)
    except SimulationBlowupError as exc:
        log.warning("replication %d aborted: %s", index, exc)
        nan = float("nan")
        return ReplicationRow(index, seed, nan, nan, nan, nan, str(exc))
    warp = empirical_cdf(ens, cfg.t0)
    H = cfg.bandwidth_grid()
    res = pco_select(ens, K, cfg.weighted_norm(), H, cfg.t0, warp)
    grid = cfg.grid.build(warp)
    h_oracle, mse = oracle_select(ens, K, H, model.drift, grid, cfg.t0, warp)
    return ReplicationRow(index, seed, res.selected_h, h_oracle, mse[res.selected_h], mse[h_oracle])


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list
    runtime_s: float = 0.0

    @property
    def ok_rows(self) -> list:
        return [r for r in self.rows if r.error is None]

    @property
    def n_errors(self) -> int:
        return len(self.rows) - len(self.ok_rows)

    @property
    def mean_mse_pco(self) -> float:
        return float(np.mean([r.mse_pco for r in self.ok_rows])) if self.ok_rows else float("nan")

    @property
    def mean_mse_oracle(self) -> float:
        return float(np.mean([r.mse_oracle for r in self.ok_rows])) if self.ok_rows else float("nan")

    @property
    def ratio(self) -> float:
        return self.mean_mse_pco / self.mean_mse_oracle

    def histogram(self, column: str = "h_hat") -> dict:
        counts = {h: 0 for h in self.config.bandwidths}
        for r in self.ok_rows:
            counts[getattr(r, column)] += 1
        return counts

    def summary(self) -> dict:
        return {
            "model": self.config.model,
            "replications": len(self.rows),
            "errors": self.n_errors,
            "partial": self.n_errors > 0,
            "mean_mse_pco": self.mean_mse_pco,
            "mean_mse_oracle": self.mean_mse_oracle,
            "ratio": self.ratio,
            "h_hat_histogram": {f"{h:.17g}": c for h, c in self.histogram("h_hat").items()},
            "h_oracle_histogram": {f"{h:.17g}": c for h, c in self.histogram("h_oracle").items()},
            "config": _config_dict(self.config),
            "rng": RNG_DESCRIPTION,
            "runtime_s": self.runtime_s,
        }


def _config_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["bandwidths"] = list(cfg.bandwidths)
    return d


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentReport:
    start = time.perf_counter()
    idx = range(int(cfg.replications))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run_replication, [cfg] * len(idx), idx))
    else:
        rows = [run_replication(cfg, i) for i in idx]
    rows.sort(key=lambda r: r.rep)
    report = ExperimentReport(cfg, rows, time.perf_counter() - start)
    if cfg.output_dir:
        write_report(report, cfg.output_dir)
    return report


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{v:.17g}"


def write_report(report: ExperimentReport, out_dir) -> tuple:
    """Write ``report.csv`` (one row per replication) and ``summary.json``."""
    out = FsPath(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "report.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(",".join(REPORT_COLUMNS) + "\n")
        for r in report.rows:
            fh.write(",".join(_fmt(getattr(r, c)) for c in REPORT_COLUMNS) + "\n")
    json_path = out / "summary.json"
    json_path.write_text(json.dumps(report.summary(), indent=2) + "\n")
    return csv_path, json_path
