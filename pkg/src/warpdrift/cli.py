"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 runtime error, 3 I/O error.
Diagnostics go to stderr; stdout only carries the summary JSON under --json.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path as FsPath

from . import config as config_mod
from .errors import InvalidConfigError, WarpDriftError
from .estimator import drift_estimate, write_drift_curve
from .experiments import run_experiment, write_report
from .kernels import get_kernel
from .pco import pco_select
from .sde import get_model, read_ensemble, simulate_ensemble, write_ensemble
from .warp import empirical_cdf

EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 1, 2, 3

log = logging.getLogger("warpdrift")


def _ensemble(cfg):
    if cfg.estimator.input:
        return read_ensemble(cfg.estimator.input)
    s = cfg.sde
    return simulate_ensemble(get_model(s.model), float(s.x0), float(s.T), s.n, s.N,
                             s.master_seed, float(cfg.estimator.t0))


def cmd_simulate(cfg, out: FsPath) -> dict:
    s = cfg.sde
    ens = simulate_ensemble(get_model(s.model), float(s.x0), float(s.T), s.n, s.N,
                            s.master_seed, float(cfg.estimator.t0))
    path = write_ensemble(ens, out / "ensemble.csv")
    return {"ensemble": str(path), "N": ens.N, "n": ens.n, "rows": ens.N * (ens.n + 1)}


def cmd_estimate(cfg, out: FsPath) -> dict:
    ens = _ensemble(cfg)
    t0 = float(cfg.estimator.t0)
    h = float(cfg.estimator.h)
    warp = empirical_cdf(ens, t0)
    delta = get_kernel(cfg.pco.delta)
    d0 = cfg.pco.kappa * min(warp.eval(-delta.support_radius), 1.0 - warp.eval(delta.support_radius))
    if h > d0:
        warnings.warn(f"h = {h:g} lies outside (0, Delta0] with Delta0 = {d0:.4g}")
    grid = cfg.estimator.eval_grid().build(warp)
    curve = drift_estimate(ens, get_kernel(cfg.estimator.kernel), h, grid, t0)
    path = write_drift_curve(curve, out / "drift_curve.csv")
    return {"curve": str(path), "h": h, "delta0": d0}


def cmd_select(cfg, out: FsPath) -> dict:
    ens = _ensemble(cfg)
    ecfg = cfg.experiment_config()
    t0 = float(cfg.estimator.t0)
    warp = empirical_cdf(ens, t0)
    K = get_kernel(cfg.estimator.kernel)
    res = pco_select(ens, K, ecfg.weighted_norm(), ecfg.bandwidth_grid(), t0, warp, check=True)
    (out / "pco.json").write_text(res.to_json() + "\n")
    grid = cfg.estimator.eval_grid().build(warp)
    curve = drift_estimate(ens, K, res.selected_h, grid, t0)
    write_drift_curve(curve, out / "drift_curve.csv")
    return {"selected_h": res.selected_h, "h0": res.h0, "tie": res.tie}


def cmd_experiment(cfg, out: FsPath, threads: int = 1) -> dict:
    report = run_experiment(cfg.experiment_config(), threads=threads)
    write_report(report, out)
    summary = report.summary()
    summary.pop("config")
    return summary


COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate,
            "select": cmd_select, "experiment": cmd_experiment}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="warpdrift", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True,
                   help="JSON config file, or a shipped name (model1_table1, model2_table1)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override sde.master_seed")
    p.add_argument("--json", action="store_true", help="print a summary JSON on stdout")
    p.add_argument("--threads", type=int, default=1, help="maximum worker processes")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)
    try:
        cfg = config_mod.load(args.config)
        if args.seed is not None:
            if args.seed < 0 or args.seed >= 2 ** 64:
                raise InvalidConfigError("--seed must be an unsigned 64-bit integer", "seed")
            cfg.sde.master_seed = args.seed
        if args.threads < 1:
            raise InvalidConfigError("--threads must be >= 1", "threads")
    except InvalidConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    out = FsPath(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        kwargs = {"threads": args.threads} if args.command == "experiment" else {}
        summary = COMMANDS[args.command](cfg, out, **kwargs)
    except InvalidConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (WarpDriftError, ArithmeticError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.json:
        print(json.dumps(summary, indent=2, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
