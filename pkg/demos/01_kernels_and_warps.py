"""The two building blocks: the bump kernel and the warping maps.

Run:  python demos/01_kernels_and_warps.py
"""

import numpy as np

from warpdrift import (AnalyticOuLaw, analytic_ou_warp, bump_kernel, empirical_cdf,
                       model_langevin, simulate_ensemble)
from warpdrift.kernels import bump_normalizer

rho = bump_kernel()
print(f"bump kernel: c_rho = {bump_normalizer():.15f}, mass {rho.l1_norm:.12f}, "
      f"||rho||_2^2 = {rho.l2_norm_sq:.6f}")
for x in (0.0, 0.5, 0.9, 1.0):
    print(f"  rho({x:.1f}) = {rho.eval(x):.6f}   rho'({x:.1f}) = {rho.deriv(x):+.6f}")

# An Ornstein-Uhlenbeck ensemble started at 2 spends most of its time near 0.
ens = simulate_ensemble(model_langevin(), x0=2.0, T=5.0, n=500, N=1000, master_seed=1)
F_hat = empirical_cdf(ens)
F = analytic_ou_warp(AnalyticOuLaw(x0=2.0, T=5.0))

print("\noccupation-time CDF: empirical vs exact time-averaged OU law")
for x in (-0.1, 0.0, 0.25, 0.5, 1.0, 1.5, 1.9):
    print(f"  x = {x:5.2f}   F_hat = {F_hat.eval(x):.4f}   F = {F.eval(x):.4f}   f = {F.density(x):.4f}")

grid = np.linspace(-0.5, 2.5, 400)
print(f"\nsup |F_hat - F| on [-0.5, 2.5]: {np.max(np.abs(F_hat.eval(grid) - F.eval(grid))):.4f}")
print(f"median of the occupation law: F^-1(0.5) = {F.inverse(0.5):.4f}")
