"""One-dimensional diffusions and their Euler-Maruyama simulation.

Randomness
----------
Every path owns a 64-bit seed. Standard normals for a path are drawn from
``numpy.random.Generator(numpy.random.Philox(key=seed))`` with
``standard_normal`` (numpy's ziggurat). Path ``i`` of an ensemble uses
``split_seed(master_seed, i)``, a SplitMix64 finalizer applied to
``master_seed + (i + 1) * 0x9E3779B97F4A7C15``; the result therefore does not
depend on how many paths are simulated or in which order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Callable, Optional

import numpy as np

from .errors import InvalidConfigError, InvalidInputError, SimulationBlowupError

__all__ = [
    "DiffusionModel",
    "Path",
    "Ensemble",
    "model_langevin",
    "model_nonlinear",
    "get_model",
    "split_seed",
    "normal_increments",
    "euler_maruyama",
    "simulate_path",
    "simulate_ensemble",
    "write_ensemble",
    "read_ensemble",
]

RNG_DESCRIPTION = "numpy.random.Philox(key=seed) + Generator.standard_normal; seeds split by SplitMix64"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def split_seed(master_seed: int, index: int) -> int:
    """Derive the 64-bit seed of stream ``index`` from ``master_seed``."""
    z = (int(master_seed) + (int(index) + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class DiffusionModel:
    """dX = drift(X) dt + diffusion(X) dW, with vectorized coefficients."""

    name: str
    drift: Callable[[np.ndarray], np.ndarray]
    diffusion: Callable[[np.ndarray], np.ndarray]
    lipschitz_hint: Optional[float] = None


def model_langevin() -> DiffusionModel:
    """Model 1: dX = -X dt + 0.1 dW (Ornstein-Uhlenbeck)."""
    return DiffusionModel(
        "langevin",
        drift=lambda x: -np.asarray(x, dtype=float),
        diffusion=lambda x: np.full(np.shape(x), 0.1) if np.ndim(x) else 0.1,
        lipschitz_hint=1.0,
    )


def model_nonlinear() -> DiffusionModel:
    """Model 2: dX = -(X + sin 4X) dt + 0.1 (2 + cos X) dW."""
    return DiffusionModel(
        "nonlinear",
        drift=lambda x: -(x + np.sin(4.0 * x)),
        diffusion=lambda x: 0.1 * (2.0 + np.cos(x)),
        lipschitz_hint=5.0,
    )


_MODELS = {"langevin": model_langevin, "model1": model_langevin,
           "nonlinear": model_nonlinear, "model2": model_nonlinear}


def get_model(name: str) -> DiffusionModel:
    try:
        return _MODELS[name]()
    except KeyError:
        raise InvalidConfigError(f"unknown model {name!r}; choose from {sorted(_MODELS)}", "model") from None


@dataclass(frozen=True)
class Path:
    times: np.ndarray
    values: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise InvalidInputError("times and values must have the same length")


@dataclass(frozen=True)
class Ensemble:
    """N paths on a shared uniform grid; ``values`` has shape (N, n + 1)."""

    values: np.ndarray
    T: float
    x0: float
    t0: float = 0.0
    model: Optional[DiffusionModel] = None
    seeds: tuple = ()
    master_seed: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 2:
            raise InvalidInputError("ensemble needs at least one path with two grid points")
        if not 0.0 <= self.t0 < self.T:
            raise InvalidConfigError(f"need 0 <= t0 < T, got t0={self.t0}, T={self.T}", "t0")
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1] - 1

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n + 1)

    @property
    def paths(self) -> list:
        seeds = self.seeds or (None,) * self.N
        return [Path(self.times, row, s) for row, s in zip(self.values, seeds)]

    def window(self):
        """Left-point values and increments on ``[t0, T)``, each shaped (N, m)."""
        j0 = int(np.ceil(self.t0 / self.dt - 1e-9))
        left = self.values[:, j0:-1]
        incr = self.values[:, j0 + 1:] - left
        return left, incr

    @classmethod
    def from_paths(cls, paths, T, x0, t0=0.0, model=None):
        values = np.vstack([np.asarray(p.values, dtype=float) for p in paths])
        seeds = tuple(p.seed for p in paths)
        if any(s is None for s in seeds):
            seeds = ()
        return cls(values, T, x0, t0, model, seeds)

    def concat(self, other: "Ensemble") -> "Ensemble":
        if other.values.shape[1] != self.values.shape[1] or other.T != self.T:
            raise InvalidInputError("ensembles must share the time grid")
        seeds = self.seeds + other.seeds if self.seeds and other.seeds else ()
        return Ensemble(np.vstack([self.values, other.values]), self.T, self.x0,
                        self.t0, self.model, seeds)

    def take(self, index) -> "Ensemble":
        index = np.asarray(index)
        seeds = tuple(self.seeds[i] for i in index) if self.seeds else ()
        return Ensemble(self.values[index], self.T, self.x0, self.t0, self.model, seeds)


def _check_grid(T, n):
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise InvalidConfigError(f"n must be a positive integer, got {n!r}", "n")
    if not (np.isfinite(T) and T > 0):
        raise InvalidConfigError(f"T must be positive, got {T!r}", "T")


def normal_increments(seed: int, n: int) -> np.ndarray:
    """The ``n`` standard normals driving the path with this seed."""
    return np.random.Generator(np.random.Philox(key=int(seed))).standard_normal(n)


def euler_maruyama(model: DiffusionModel, x0: float, T: float, dW: np.ndarray) -> np.ndarray:
    """Run the Euler-Maruyama recursion on given Brownian increments.

    ``dW`` has shape (N, n) and already includes the sqrt(dt) factor. Returns
    an (N, n + 1) array starting at ``x0``.
    """
    dW = np.atleast_2d(np.asarray(dW, dtype=float))
    N, n = dW.shape
    dt = T / n
    x = np.empty((N, n + 1))
    x[:, 0] = x0
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(n):
            xj = x[:, j]
            x[:, j + 1] = xj + model.drift(xj) * dt + model.diffusion(xj) * dW[:, j]
    bad = ~np.isfinite(x)
    if bad.any():
        step = int(np.argmax(bad.any(axis=0)))
        raise SimulationBlowupError(step, f"simulation of {model.name!r} blew up at step {step}")
    return x


def simulate_path(model: DiffusionModel, x0: float, T: float, n: int, seed: int) -> Path:
    _check_grid(T, n)
    dW = np.sqrt(T / n) * normal_increments(seed, n)
    x = euler_maruyama(model, x0, T, dW[None, :])[0]
    return Path(np.linspace(0.0, T, n + 1), x, int(seed))


def simulate_ensemble(model: DiffusionModel, x0: float, T: float, n: int, N: int,
                      master_seed: int, t0: float = 0.0) -> Ensemble:
    """Simulate ``N`` independent paths; path ``i`` uses ``split_seed(master_seed, i)``."""
    _check_grid(T, n)
    if not (isinstance(N, (int, np.integer)) and N >= 1):
        raise InvalidConfigError(f"N must be a positive integer, got {N!r}", "N")
    seeds = tuple(split_seed(master_seed, i) for i in range(N))
    z = np.vstack([normal_increments(s, n) for s in seeds])
    x = euler_maruyama(model, x0, T, np.sqrt(T / n) * z)
    return Ensemble(x, float(T), float(x0), float(t0), model, seeds, int(master_seed),
                    {"rng": RNG_DESCRIPTION})


def write_ensemble(ens: Ensemble, csv_path) -> FsPath:
    """Write ``path_id,t,x`` rows plus a ``.json`` sidecar; floats use 17 significant digits."""
    csv_path = FsPath(csv_path)
    N, m = ens.values.shape
    times = ens.times
    with open(csv_path, "w", newline="") as fh:
        fh.write("path_id,t,x\n")
        for i in range(N):
            row = ens.values[i]
            fh.writelines(f"{i},{times[j]:.17g},{row[j]:.17g}\n" for j in range(m))
    sidecar = {
        "model": ens.model.name if ens.model is not None else None,
        "x0": ens.x0, "T": ens.T, "t0": ens.t0, "n": ens.n, "N": N,
        "master_seed": ens.master_seed,
        "seeds": [int(s) for s in ens.seeds],
        "rng": RNG_DESCRIPTION,
    }
    csv_path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2) + "\n")
    return csv_path


def read_ensemble(csv_path) -> Ensemble:
    csv_path = FsPath(csv_path)
    meta = json.loads(csv_path.with_suffix(".json").read_text())
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    N, n = int(meta["N"]), int(meta["n"])
    if data.shape[0] != N * (n + 1):
        raise InvalidInputError(f"{csv_path}: expected {N * (n + 1)} rows, found {data.shape[0]}")
    order = np.lexsort((data[:, 1], data[:, 0]))
    values = data[order, 2].reshape(N, n + 1)
    model = get_model(meta["model"]) if meta.get("model") else None
    return Ensemble(values, float(meta["T"]), float(meta["x0"]), float(meta.get("t0", 0.0)),
                    model, tuple(meta.get("seeds") or ()), meta.get("master_seed"),
                    {"rng": meta.get("rng")})
