import json

import numpy as np
import pytest

from warpdrift import (
    EvalGrid,
    ExperimentConfig,
    InvalidConfigError,
    empirical_cdf,
    model1_table1,
    model2_table1,
    run_experiment,
    run_replication,
    write_report,
)
from warpdrift.experiments import ReplicationRow, ExperimentReport


def small(**kw):
    return model1_table1(**{"replications": 4, **kw})


def test_table_configs():
    c1, c2 = model1_table1(), model2_table1()
    assert (c1.N, c1.n, c1.T, c1.x0, c1.t0) == (100, 50, 5.0, 2.0, 0.0)
    assert np.allclose(c1.bandwidths, [0.02 * k for k in range(1, 11)])
    assert np.allclose(c2.bandwidths, [0.01 * k for k in range(1, 11)])
    assert c2.model == "nonlinear"


@pytest.mark.parametrize("bad", [dict(N=0), dict(n=0), dict(T=0.0), dict(t0=5.0), dict(replications=0),
                                 dict(model="nope"), dict(bandwidths=())])
def test_config_validation(bad):
    with pytest.raises((InvalidConfigError, ValueError)):
        model1_table1(**bad)


def test_eval_grid(model1_ensemble):
    F = empirical_cdf(model1_ensemble)
    g = EvalGrid().build(F)
    assert g.size == 100
    assert F.eval(g[0]) == pytest.approx(0.1, abs=1e-3)
    assert F.eval(g[-1]) == pytest.approx(0.9, abs=1e-3)
    assert np.array_equal(EvalGrid("interval", -1, 1, 5).build(), np.linspace(-1, 1, 5))
    with pytest.raises(InvalidConfigError):
        EvalGrid("quantile", 0.5, 1.5)


def test_replication_is_deterministic_and_dominated():
    cfg = small()
    a, b = run_replication(cfg, 2), run_replication(cfg, 2)
    assert a == b
    assert a.mse_oracle <= a.mse_pco
    assert a.h_hat in cfg.bandwidths and a.h_oracle in cfg.bandwidths
    assert a.error is None


def test_single_replication_report():
    rep = run_experiment(small(replications=1))
    row = rep.rows[0]
    assert len(rep.rows) == 1
    assert rep.mean_mse_pco == row.mse_pco
    assert rep.mean_mse_oracle == row.mse_oracle
    assert sum(rep.histogram().values()) == 1


def test_report_outputs_byte_identical(tmp_path):
    cfg = small()
    a = run_experiment(cfg)
    write_report(a, tmp_path / "a")
    write_report(run_experiment(cfg), tmp_path / "b")
    assert (tmp_path / "a" / "report.csv").read_bytes() == (tmp_path / "b" / "report.csv").read_bytes()
    lines = (tmp_path / "a" / "report.csv").read_text().splitlines()
    assert lines[0] == "rep,seed,h_hat,h_oracle,mse_pco,mse_oracle"
    assert len(lines) == 5
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["mean_mse_oracle"] <= summary["mean_mse_pco"]
    assert summary["replications"] == 4 and summary["errors"] == 0
    assert sum(summary["h_hat_histogram"].values()) == 4
    assert "rng" in summary


def test_process_pool_matches_serial():
    cfg = small()
    assert run_experiment(cfg, threads=2).rows == run_experiment(cfg).rows


def test_error_rows_excluded_from_means():
    cfg = small()
    ok = ReplicationRow(0, 1, 0.04, 0.02, 2e-3, 1e-3)
    bad = ReplicationRow(1, 2, *[float("nan")] * 4, error="blow-up at step 3")
    rep = ExperimentReport(cfg, [ok, bad])
    assert rep.n_errors == 1
    assert rep.mean_mse_pco == 2e-3
    assert rep.summary()["partial"] is True


def test_model1_single_replication_scale():
    row = run_replication(model1_table1(), 0)
    assert row.mse_pco < 5e-3
