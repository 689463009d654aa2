"""Warping maps x -> F(x) in [0, 1].

Two kinds are provided:

* :class:`EmpiricalWarp`, the occupation-time CDF of an ensemble, built from a
  left-point Riemann sum of the indicator over the grid points in [t0, T);
* :class:`AnalyticOuWarp`, the exact time-averaged marginal CDF of an
  Ornstein-Uhlenbeck process started at x0, with its density, the density
  derivative and the inverse. It is the oracle used by theory-facing tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path as FsPath

import numpy as np
from scipy import special

from .errors import DomainError, InvalidConfigError, InvalidInputError
from .sde import Ensemble

__all__ = [
    "WarpFunction",
    "EmpiricalWarp",
    "AnalyticOuLaw",
    "AnalyticOuWarp",
    "empirical_cdf",
    "analytic_ou_warp",
    "write_warp_csv",
]


class WarpFunction:
    """Nondecreasing map of the real line into [0, 1]."""

    kind = "abstract"
    support_hint = (-np.inf, np.inf)
    has_inverse = False

    def eval(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.eval(x)


class EmpiricalWarp(WarpFunction):
    """Occupation-time CDF of an ensemble.

    ``eval(x)`` is ``k * dt / (N (T - t0))`` with ``k`` the number of pooled
    left-point samples ``<= x``. When the left grid points tile ``[t0, T)``
    exactly this is ``k / (N m)`` and is computed that way, so ``eval`` reaches
    exactly 1 at the largest sample.
    """

    kind = "empirical"

    def __init__(self, ens: Ensemble, t0: float | None = None):
        t0 = ens.t0 if t0 is None else float(t0)
        if not t0 < ens.T:
            raise InvalidConfigError(f"need t0 < T, got t0={t0}, T={ens.T}", "t0")
        left, _ = _left_samples(ens, t0)
        if left.size == 0:
            raise InvalidInputError("no grid point in [t0, T)")
        self.samples = np.sort(left, axis=None)
        self.t0 = t0
        m = left.shape[1]
        total = ens.N * m
        if abs(m * ens.dt - (ens.T - t0)) <= 1e-12 * ens.T:
            self._denom = float(total)
        else:
            self._denom = ens.N * (ens.T - t0) / ens.dt
        self.support_hint = (float(self.samples[0]), float(self.samples[-1]))

    def counts(self, x):
        return np.searchsorted(self.samples, x, side="right")

    def eval(self, x):
        out = self.counts(np.asarray(x, dtype=float)) / self._denom
        return float(out) if np.ndim(x) == 0 else out


def _left_samples(ens: Ensemble, t0: float):
    j0 = int(np.ceil(t0 / ens.dt - 1e-9))
    left = ens.values[:, j0:-1]
    return left, ens.values[:, j0 + 1:] - left


def empirical_cdf(ens: Ensemble, t0: float | None = None) -> EmpiricalWarp:
    return EmpiricalWarp(ens, t0)


@dataclass(frozen=True)
class AnalyticOuLaw:
    """Marginal law of dX = -theta X dt + sigma dW, X_0 = x0, time-averaged over [t0, T]."""

    x0: float
    T: float
    t0: float = 0.0
    sigma: float = 0.1
    theta: float = 1.0
    n_nodes: int = 200
    eps_t: float = 1e-6

    def __post_init__(self):
        if not self.t0 < self.T:
            raise InvalidConfigError("need t0 < T", "t0")
        if not self.sigma > 0:
            raise InvalidConfigError("sigma must be positive", "sigma")


def _graded_nodes(a, b, n_nodes, panels=10):
    """Gauss-Legendre nodes on geometrically graded panels of [a, b]."""
    if b / a > 50.0:
        edges = np.geomspace(a, b, panels + 1)
    else:
        edges = np.linspace(a, b, panels + 1)
    per = max(2, n_nodes // panels)
    g, w = np.polynomial.legendre.leggauss(per)
    lo, hi = edges[:-1, None], edges[1:, None]
    t = (0.5 * (hi - lo) * g + 0.5 * (hi + lo)).ravel()
    wt = (0.5 * (hi - lo) * w).ravel()
    return t, wt


class AnalyticOuWarp(WarpFunction):
    """Exact F, f, f' and F^{-1} for :class:`AnalyticOuLaw`.

    The time average runs over ``[max(t0, eps_t), T]`` and is normalized by the
    length of that interval, so F is an exact CDF even when t0 = 0.
    """

    kind = "analytic"
    has_inverse = True

    def __init__(self, law: AnalyticOuLaw):
        self.law = law
        a = max(law.t0, law.eps_t)
        t, w = _graded_nodes(a, law.T, law.n_nodes)
        self._w = w / w.sum()
        decay = np.exp(-law.theta * t)
        self._mean = law.x0 * decay
        self._std = np.sqrt(law.sigma ** 2 * (1.0 - decay ** 2) / (2.0 * law.theta))
        spread = 12.0 * self._std.max()
        self.support_hint = (float(self._mean.min() - spread), float(self._mean.max() + spread))

    def _apply(self, x, fn, chunk=4096):
        x_arr = np.asarray(x, dtype=float)
        flat = x_arr.ravel()
        out = np.empty(flat.shape)
        for s in range(0, flat.size, chunk):
            z = (flat[s:s + chunk, None] - self._mean) / self._std
            out[s:s + chunk] = fn(z) @ self._w
        out = out.reshape(x_arr.shape)
        return float(out) if x_arr.ndim == 0 else out

    def eval(self, x):
        return self._apply(x, special.ndtr)

    def density(self, x):
        return self._apply(x, lambda z: np.exp(-0.5 * z * z) / (np.sqrt(2 * np.pi) * self._std))

    def density_deriv(self, x):
        return self._apply(
            x, lambda z: -z * np.exp(-0.5 * z * z) / (np.sqrt(2 * np.pi) * self._std ** 2))

    def inverse(self, u, xtol=1e-12):
        """F^{-1}(u) for u in (0, 1), by vectorized bisection."""
        u_arr = np.asarray(u, dtype=float)
        if np.any((u_arr <= 0) | (u_arr >= 1)) or np.any(~np.isfinite(u_arr)):
            raise DomainError("inverse warp is defined on (0, 1) only")
        flat = u_arr.ravel()
        lo = np.full(flat.shape, self.support_hint[0])
        hi = np.full(flat.shape, self.support_hint[1])
        while np.max(hi - lo) > xtol:
            mid = 0.5 * (lo + hi)
            if np.all((mid == lo) | (mid == hi)):
                break
            below = self.eval(mid) < flat
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        out = (0.5 * (lo + hi)).reshape(u_arr.shape)
        return float(out) if u_arr.ndim == 0 else out


def analytic_ou_warp(law: AnalyticOuLaw) -> AnalyticOuWarp:
    return AnalyticOuWarp(law)


def write_warp_csv(warp: WarpFunction, grid, csv_path) -> FsPath:
    csv_path = FsPath(csv_path)
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(warp.eval(grid))
    with open(csv_path, "w") as fh:
        fh.write("x,F\n")
        fh.writelines(f"{x:.17g},{v:.17g}\n" for x, v in zip(grid, values))
    return csv_path
