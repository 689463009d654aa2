"""Replicate the Monte Carlo comparison of PCO and oracle bandwidths.

Run:  python demos/04_table1.py [replications]
"""

import sys
from dataclasses import replace

from warpdrift import model1_table1, model2_table1, run_experiment

R = int(sys.argv[1]) if len(sys.argv) > 1 else 20
print(f"{R} replications per model, N = 100 paths of 50 steps on [0, 5]\n")
print("model       mean MSE (PCO)   mean MSE (oracle)   ratio   runtime")
for name, cfg in (("langevin", model1_table1()), ("nonlinear", model2_table1())):
    rep = run_experiment(replace(cfg, replications=R))
    print(f"{name:10s}  {rep.mean_mse_pco:.3e}        {rep.mean_mse_oracle:.3e}           "
          f"{rep.ratio:.2f}    {rep.runtime_s:.1f} s")
    hist = {f"{h:g}": c for h, c in rep.histogram().items() if c}
    print(f"            selected h: {hist}")
