import json

import numpy as np
import pytest

from melasso.covariance import CovarianceSpec
from melasso.errors import ConfigError, ValidationError
from melasso.experiment import (
    ExperimentConfig, FitRequest, fit_arrays, fit_file, load_config, read_matrix_csv, run_experiment, run_roc,
)
from melasso.report import read_csv_rows
from melasso.simulate import draw_model, export_dataset, simulate_linear


def _dataset(seed=0, n=60, p=20, s2=0.2):
    m = draw_model(p, 3, seed=seed, sigma_uu=CovarianceSpec.identity(p, s2))
    return simulate_linear(m, n, seed=seed + 1)


def _small(**kw):
    base = dict(scenario="table1", n=40, p=30, s0=3, replicates=2, seed=4, folds=4, n_lambda=15, n_kappa=15)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(scenario="table9")
    with pytest.raises(ConfigError):
        ExperimentConfig(scenario="table1", replicates=0)


def test_config_hash_ignores_output_location():
    a = _small(output_dir="x")
    b = _small(output_dir="y", threads=3)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != _small(seed=5).config_hash()


def test_config_file_round_trip(tmp_path):
    cfg = _small(sigma_u_sq=0.4)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert load_config(path).config_hash() == cfg.config_hash()


def test_experiment_writes_tables_with_provenance(tmp_path):
    cfg = _small(output_dir=str(tmp_path))
    res = run_experiment(cfg)
    rows = read_csv_rows(res.paths["table"])
    assert {r["method"] for r in rows} == {"naive", "corrected"}
    assert all(r["config_hash"] == cfg.config_hash() and r["seed"] == "4" for r in rows)
    reps = read_csv_rows(res.paths["replicates"])
    assert len(reps) == 4
    meta = json.loads(res.paths["json"].read_text())
    assert meta["config_hash"] == cfg.config_hash()


def test_se_column_is_sd_over_root_m(tmp_path):
    res = run_experiment(_small(replicates=3, output_dir=str(tmp_path)))
    reps = read_csv_rows(res.paths["replicates"])
    for row in res.table:
        v = np.array([float(r["l2_err"]) for r in reps if r["method"] == row["method"]])
        assert abs(row["l2_err_se"] - v.std(ddof=1) / np.sqrt(3)) <= 1e-12


def test_single_replicate_rerun_is_bit_identical(tmp_path):
    a = run_experiment(_small(replicates=1, output_dir=str(tmp_path / "a")))
    b = run_experiment(_small(replicates=1, output_dir=str(tmp_path / "b")))
    assert a.paths["table"].read_bytes() == b.paths["table"].read_bytes()


def test_thread_count_does_not_change_output(tmp_path):
    a = run_experiment(_small(threads=1, output_dir=str(tmp_path / "a")))
    b = run_experiment(_small(threads=2, output_dir=str(tmp_path / "b")))
    for k in ("table", "replicates"):
        assert a.paths[k].read_bytes() == b.paths[k].read_bytes()


def test_roc_endpoints_and_single_kappa(tmp_path):
    cfg = ExperimentConfig(scenario="roc-logistic", n=60, p=30, s0=3, replicates=2, seed=1,
                           kappa_values=[0.0, 2.0], output_dir=str(tmp_path))
    res = run_roc(cfg)
    zero = [r for r in res.table if r["kappa"] == 0.0]
    assert all(r["tpr_mean"] == 0.0 and r["fpr_mean"] == 0.0 for r in zero)
    one = ExperimentConfig(scenario="roc-logistic", n=60, p=30, s0=3, replicates=1, seed=1,
                           kappa_values=[1.0], output_dir=str(tmp_path / "one"))
    t = run_roc(one).table
    assert len({r["kappa"] for r in t}) == 1


def test_fit_file_round_trip_is_bit_exact(tmp_path):
    ds = _dataset(1)
    export_dataset(ds, tmp_path)
    for req in (FitRequest(method="naive", cv=True, folds=5), FitRequest(method="corrected", kappa=3.0)):
        mem = fit_arrays(ds.W, ds.y, 0.2, req)
        disk = fit_file(tmp_path / "W.csv", tmp_path / "y.csv", 0.2, req)
        np.testing.assert_array_equal(mem.fit.beta, disk.fit.beta)
        assert mem.fit.tuning == disk.fit.tuning


def test_no_error_naive_and_corrected_agree_on_support():
    ds = _dataset(2)
    a = fit_arrays(ds.W, ds.y, 0.0, FitRequest(method="naive", cv=True, folds=5))
    b = fit_arrays(ds.W, ds.y, 0.0, FitRequest(method="corrected", cv=True, folds=5))
    np.testing.assert_array_equal(a.fit.active_set, b.fit.active_set)


def test_noise_filter_can_empty_the_model():
    ds = _dataset(3)
    var = 0.6 * ds.W.var(axis=0)
    with pytest.raises(ValidationError, match="empty model"):
        fit_arrays(ds.W, ds.y, var, FitRequest(method="corrected", kappa=1.0, filter_noise=True))


def test_noise_filter_keeps_reliable_columns():
    ds = _dataset(4)
    var = 0.2 * ds.W.var(axis=0)
    var[:5] = 0.7 * ds.W[:, :5].var(axis=0)
    res = fit_arrays(ds.W, ds.y, var, FitRequest(method="corrected", kappa=1.0, filter_noise=True))
    assert list(res.kept) == list(range(5, 20))
    assert np.all(res.fit.beta[:5] == 0)


def test_sigma_sources(tmp_path):
    ds = _dataset(5, p=4)
    export_dataset(ds, tmp_path, include_truth=False)
    (tmp_path / "diag.csv").write_text("var\n" + "\n".join(["0.2"] * 4) + "\n")
    dense = "a,b,c,d\n" + "\n".join(",".join("0.2" if i == j else "0.0" for j in range(4)) for i in range(4))
    (tmp_path / "dense.csv").write_text(dense + "\n")
    req = FitRequest(method="corrected", kappa=2.0)
    fits = [fit_file(tmp_path / "W.csv", tmp_path / "y.csv", s, req).fit.beta
            for s in (0.2, tmp_path / "diag.csv", tmp_path / "dense.csv")]
    np.testing.assert_array_equal(fits[0], fits[1])
    np.testing.assert_array_equal(fits[0], fits[2])
    (tmp_path / "neg.csv").write_text("var\n0.2\n-0.1\n0.2\n0.2\n")
    with pytest.raises(ValidationError, match="negative"):
        fit_file(tmp_path / "W.csv", tmp_path / "y.csv", tmp_path / "neg.csv", req)


def test_csv_errors_name_coordinates(tmp_path):
    p = tmp_path / "W.csv"
    p.write_text("a,b\n1,2\n3,oops\n")
    with pytest.raises(ValidationError, match="row 2, column 2"):
        read_matrix_csv(p)
    p.write_text("a,b\n1,2\n3\n")
    with pytest.raises(ValidationError, match="row 2"):
        read_matrix_csv(p)


def test_dimension_mismatch(tmp_path):
    ds = _dataset(6, p=4)
    export_dataset(ds, tmp_path, include_truth=False)
    (tmp_path / "y2.csv").write_text("y\n1\n2\n")
    with pytest.raises(ValidationError):
        fit_file(tmp_path / "W.csv", tmp_path / "y2.csv", 0.2, FitRequest(cv=True))


def test_request_validation():
    with pytest.raises(ConfigError):
        FitRequest(method="naive")
    with pytest.raises(ConfigError):
        FitRequest(method="naive", lam=0.1, cv=True)
    with pytest.raises(ConfigError):
        FitRequest(method="cs-glm", family="linear", kappa=1.0)
    with pytest.raises(ConfigError):
        FitRequest(method="corrected", elbow=True)


def test_glm_elbow_fit_reports_trace():
    r = np.random.default_rng(7)
    n, p = 120, 15
    X = r.standard_normal((n, p))
    y = (r.uniform(size=n) < 1 / (1 + np.exp(-(X[:, 0] * 2 - X[:, 1] * 2)))).astype(float)
    W = X + np.sqrt(0.2) * r.standard_normal((n, p))
    res = fit_arrays(W, y, 0.2, FitRequest(method="cs-glm", family="logistic", elbow=True, elbow_scale=2.0))
    assert len(res.trace) == 30 and {"kappa", "nnz"} <= set(res.trace[0])
    assert res.fit.tuning in [t["kappa"] for t in res.trace]
