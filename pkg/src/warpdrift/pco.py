"""Bandwidth selection by penalized comparison to overfitting (PCO).

For a bandwidth grid H with smallest element h0, the selected bandwidth
minimizes

    crit(h) = ||b_h - b_h0||_delta^2 + pen(h),

    pen(h) = 2 / ((T - t0)^2 N^2) * sum_i < S_h^i, S_h0^i >_delta,

where S_h^i(x) = sum_j K_h(F(x) - F(X^i_j)) (X^i_{j+1} - X^i_j) is the
unnormalized statistic of path i. The delta-weighted inner product is a
trapezoid rule on a uniform grid over supp(delta) = [-Delta, Delta].
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import IncompatibleGridError, InvalidConfigError
from .estimator import DriftCurve, WarpedSample, _left_window
from .kernels import Kernel, _check_bandwidth, bump_kernel
from .sde import Ensemble, Path
from .warp import WarpFunction, empirical_cdf

__all__ = [
    "WeightedNorm",
    "BandwidthGrid",
    "PcoResult",
    "weighted_inner",
    "per_path_statistic_curve",
    "penalty",
    "pco_select",
    "oracle_select",
]


@dataclass(frozen=True)
class WeightedNorm:
    """Trapezoid rule for int g(x) delta(x) dx on ``n_nodes`` uniform nodes.

    ``scale`` multiplies the weight function; selection is invariant to it.
    """

    delta: Kernel = field(default_factory=bump_kernel)
    n_nodes: int = 201
    scale: float = 1.0

    def __post_init__(self):
        if self.n_nodes < 2:
            raise InvalidConfigError("need at least two quadrature nodes", "n_nodes")
        if not self.scale > 0:
            raise InvalidConfigError("delta scale must be positive", "scale")

    @property
    def Delta(self) -> float:
        return self.delta.support_radius

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.Delta, self.Delta, self.n_nodes)

    @property
    def trapezoid(self) -> np.ndarray:
        w = np.full(self.n_nodes, 2.0 * self.Delta / (self.n_nodes - 1))
        w[[0, -1]] *= 0.5
        return w

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights times scale * delta(node)."""
        return self.trapezoid * self.scale * self.delta.eval(self.nodes)


def weighted_inner(c1: DriftCurve, c2: DriftCurve, w: WeightedNorm) -> float:
    nodes = w.nodes
    for c in (c1, c2):
        if c.grid.shape != nodes.shape or not np.array_equal(c.grid, nodes):
            raise IncompatibleGridError("curves must be sampled on the quadrature nodes")
    return float(np.dot(w.weights, c1.values * c2.values))


@dataclass(frozen=True)
class BandwidthGrid:
    """Finite bandwidth set; ``h0`` is its smallest element."""

    values: tuple
    kappa: float = 0.9

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise InvalidConfigError("bandwidth grid is empty", "bandwidths")
        for v in vals:
            _check_bandwidth(v)
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise InvalidConfigError("bandwidths must be strictly increasing", "bandwidths")
        if not 0 < self.kappa < 1:
            raise InvalidConfigError("kappa must lie in (0, 1)", "kappa")
        object.__setattr__(self, "values", vals)

    @classmethod
    def arithmetic(cls, step: float, count: int, kappa: float = 0.9) -> "BandwidthGrid":
        """{step * k : k = 1..count}, rounded to 12 decimals."""
        return cls(tuple(round(step * k, 12) for k in range(1, count + 1)), kappa)

    @property
    def h0(self) -> float:
        return self.values[0]

    def delta0(self, warp: WarpFunction, Delta: float) -> float:
        """kappa * min(F(-Delta), 1 - F(Delta))."""
        return self.kappa * min(warp.eval(-Delta), 1.0 - warp.eval(Delta))

    def check(self, warp: WarpFunction, Delta: float, N: int) -> list:
        """Return (and emit as warnings) violated admissibility conditions."""
        d0 = self.delta0(warp, Delta)
        issues = []
        if self.values[-1] > d0:
            issues.append(f"largest bandwidth {self.values[-1]:g} exceeds Delta0 = {d0:.4g}")
        if d0 ** 3 / (N * self.h0 ** 3) > 1:
            issues.append(f"Delta0^3 / (N h0^3) = {d0 ** 3 / (N * self.h0 ** 3):.4g} > 1")
        for msg in issues:
            warnings.warn(msg, stacklevel=3)
        return issues


@dataclass
class PcoResult:
    h: np.ndarray
    comparison: np.ndarray
    penalty: np.ndarray
    criterion: np.ndarray
    selected_h: float
    h0: float
    tie: bool
    curves: Optional[dict] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "records": [
                {"h": float(h), "comparison": float(c), "penalty": float(p), "criterion": float(k)}
                for h, c, p, k in zip(self.h, self.comparison, self.penalty, self.criterion)
            ],
            "selected_h": float(self.selected_h),
            "h0": float(self.h0),
            "tie": bool(self.tie),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _argmin_largest(values, hs):
    """Index of the minimum; ties go to the largest bandwidth."""
    values = np.asarray(values)
    best = values.min()
    idx = np.flatnonzero(values == best)
    return int(idx[np.argmax(np.asarray(hs)[idx])]), idx.size > 1


def per_path_statistic_curve(path: Path, warp: WarpFunction, K: Kernel, h: float, grid,
                             t0: float = 0.0) -> DriftCurve:
    """x -> sum_j K_h(F(x) - F(X_j)) (X_{j+1} - X_j) for a single path."""
    _check_bandwidth(h)
    vals = np.asarray(path.values, dtype=float)
    T = float(path.times[-1])
    ens = Ensemble(vals[None, :], T, float(vals[0]), t0)
    grid = np.asarray(grid, dtype=float)
    ws = WarpedSample(ens, warp, t0)
    values = ws.per_path(warp.eval(grid), K, h)[:, 0]
    return DriftCurve(grid, values, h, warp.kind, {"statistic": "per_path"})


def _penalty_from_curves(S_h, S_h0, weights, N, T, t0):
    per_path = (weights[:, None] * S_h * S_h0).sum(axis=0)
    return 2.0 / ((T - t0) ** 2 * N ** 2) * math.fsum(per_path)


def penalty(ens: Ensemble, warp: WarpFunction, K: Kernel, h: float, h0: float,
            w: WeightedNorm, t0=None) -> float:
    t0 = ens.t0 if t0 is None else float(t0)
    ws = WarpedSample(ens, warp, t0)
    z = warp.eval(w.nodes)
    return _penalty_from_curves(ws.per_path(z, K, h), ws.per_path(z, K, h0),
                                w.weights, ens.N, ens.T, t0)


def pco_select(ens: Ensemble, K: Kernel, delta, H: BandwidthGrid | Sequence[float], t0=None,
               warp: Optional[WarpFunction] = None, check: bool = False) -> PcoResult:
    """Select a bandwidth by PCO.

    Parameters
    ----------
    delta : Kernel or WeightedNorm
        Weight function of the comparison norm (a bare kernel gets the default
        201-node trapezoid rule).
    warp : WarpFunction, optional
        Defaults to the empirical occupation-time CDF of ``ens``.
    check : bool
        Warn when ``H`` violates the Delta0 admissibility conditions.
    """
    if not isinstance(H, BandwidthGrid):
        H = BandwidthGrid(tuple(H))
    w = delta if isinstance(delta, WeightedNorm) else WeightedNorm(delta)
    t0 = ens.t0 if t0 is None else float(t0)
    _left_window(ens, t0)
    warp = empirical_cdf(ens, t0) if warp is None else warp
    if check:
        H.check(warp, w.Delta, ens.N)

    ws = WarpedSample(ens, warp, t0)
    z = warp.eval(w.nodes)
    weights = w.weights
    norm = 1.0 / (ens.N * (ens.T - t0))

    S0 = ws.per_path(z, K, H.h0)
    b0 = norm * S0.sum(axis=1)
    hs = np.array(H.values)
    comparison, pen, curves = [], [], {}
    for h in H.values:
        S = S0 if h == H.h0 else ws.per_path(z, K, h)
        b = norm * S.sum(axis=1)
        curves[h] = b
        comparison.append(float(np.dot(weights, (b - b0) ** 2)))
        pen.append(_penalty_from_curves(S, S0, weights, ens.N, ens.T, t0))
    comparison, pen = np.array(comparison), np.array(pen)
    crit = comparison + pen
    k, tie = _argmin_largest(crit, hs)
    return PcoResult(hs, comparison, pen, crit, float(hs[k]), H.h0, tie, curves)


def oracle_select(ens: Ensemble, K: Kernel, H: BandwidthGrid | Sequence[float], true_b: Callable,
                  grid, t0=None, warp: Optional[WarpFunction] = None):
    """Bandwidth minimizing the grid MSE against the known drift.

    Returns ``(h_oracle, mse)`` where ``mse`` maps each bandwidth to its MSE.
    """
    hs = tuple(H.values) if isinstance(H, BandwidthGrid) else tuple(float(h) for h in H)
    t0 = ens.t0 if t0 is None else float(t0)
    warp = empirical_cdf(ens, t0) if warp is None else warp
    grid = np.asarray(grid, dtype=float)
    ws = WarpedSample(ens, warp, t0)
    z = warp.eval(grid)
    truth = np.asarray(true_b(grid), dtype=float)
    mse = {h: float(np.mean((ws.beta(z, K, h) - truth) ** 2)) for h in hs}
    k, _ = _argmin_largest([mse[h] for h in hs], hs)
    return hs[k], mse
