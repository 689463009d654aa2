"""Select the bandwidth by penalized comparison to overfitting.

Run:  python demos/03_pco_selection.py
"""

import numpy as np

from warpdrift import (BandwidthGrid, EvalGrid, bump_kernel, empirical_cdf, model_nonlinear,
                       oracle_select, pco_select, simulate_ensemble)

K = bump_kernel()
model = model_nonlinear()
ens = simulate_ensemble(model, x0=2.0, T=5.0, n=50, N=100, master_seed=7)
H = BandwidthGrid.arithmetic(0.01, 10)

res = pco_select(ens, K, K, H)
print("   h      comparison   penalty      criterion")
for h, c, p, k in zip(res.h, res.comparison, res.penalty, res.criterion):
    mark = "  <- selected" if h == res.selected_h else ""
    print(f"  {h:.2f}   {c:.4e}   {p:.4e}   {k:.4e}{mark}")

grid = EvalGrid().build(empirical_cdf(ens))
h_or, mse = oracle_select(ens, K, H, model.drift, grid)
print(f"\nPCO picks h = {res.selected_h:.2f} (MSE {mse[res.selected_h]:.3e}); "
      f"the oracle picks h = {h_or:.2f} (MSE {mse[h_or]:.3e})")
