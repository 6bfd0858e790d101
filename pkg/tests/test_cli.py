import numpy as np
import pytest

from proxtone.cli import main
from proxtone.datasets import synth_logistic, write_libsvm
from proxtone.harness import (
    ConfigError,
    ExperimentConfig,
    CSV_HEADER,
    epochs_to_gap,
    estimate_lipschitz,
    parse_hessian,
    run_experiment,
    sweep_eta,
)
from proxtone.optimizers import TraceRow


# --- harness units ---


def test_parse_hessian():
    assert parse_hessian("lbfgs") == "lbfgs"
    assert parse_hessian("diagonal:0.5") == ("diagonal", 0.5)
    with pytest.raises(ConfigError):
        parse_hessian("diagonal:zero")
    with pytest.raises(ConfigError):
        parse_hessian("diagonal:-1")
    with pytest.raises(ConfigError):
        parse_hessian("newton")


def test_estimate_lipschitz_matches_eigenvalue():
    ds = synth_logistic(6, 40, sparsity=0.5, seed=0)
    A = ds.features
    lam_max = float(np.linalg.eigvalsh(A.T @ A / len(A)).max())
    est = estimate_lipschitz(ds, lambda1=1e-3)
    assert est == pytest.approx(0.25 * lam_max + 2e-3, rel=1e-6)


def test_epochs_to_gap():
    rows = [TraceRow(e, 0.0, obj, 0, 0.0, 0)
            for e, obj in enumerate([1.0, 0.5, 0.1, 0.01])]

    class T:
        pass

    t = T()
    t.rows = rows
    assert epochs_to_gap(t, f_star=0.0, gap_target=0.2) == 2
    assert epochs_to_gap(t, f_star=0.0, gap_target=1e-6) is None


def _small_config(**kw):
    base = dict(synthetic=(8, 80, 0.3), n_batches=4, epochs=3, seed=0)
    base.update(kw)
    return ExperimentConfig(**base)


def test_sweep_eta_picks_finite_best():
    best, trace, results = sweep_eta(_small_config(optimizer="proxsgd"))
    assert best in results
    assert not trace.aborted
    finite = [s["final_objective"] for _, s in results.values()
              if not s["aborted"] and np.isfinite(s["final_objective"])]
    assert trace.final.objective == min(finite)


def test_run_experiment_flushes_rows(tmp_path):
    path = tmp_path / "trace.csv"
    with open(path, "w") as fh:
        trace, summary = run_experiment(_small_config(), csv_file=fh)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + len(trace.rows)
    assert summary["final_objective"] == trace.final.objective


# --- CLI ---


def _cli(tmp_path, *extra, trace="trace.csv"):
    path = tmp_path / trace
    argv = ["--synthetic", "8,80,0.3", "--batches", "4", "--epochs", "3",
            "--trace", str(path), *extra]
    rc = main(argv)
    return rc, path


def test_cli_happy_path(tmp_path, capsys):
    rc, path = _cli(tmp_path)
    assert rc == 0
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "epoch,wall_seconds,objective,nnz,sparsity_pct,grad_evals"
    assert len(lines) == 1 + 4  # header + initial row + 3 epochs
    out = capsys.readouterr().out
    assert "final objective:" in out


def _strip_wall(lines):
    out = []
    for line in lines:
        cols = line.split(",")
        out.append(",".join(cols[:1] + cols[2:]))
    return out


def test_cli_deterministic_modulo_wall_seconds(tmp_path):
    rc1, p1 = _cli(tmp_path, "--seed", "3", trace="a.csv")
    rc2, p2 = _cli(tmp_path, "--seed", "3", trace="b.csv")
    assert rc1 == rc2 == 0
    a = _strip_wall(p1.read_text().strip().split("\n"))
    b = _strip_wall(p2.read_text().strip().split("\n"))
    assert a == b


def test_cli_seed_changes_trace(tmp_path):
    _, p1 = _cli(tmp_path, "--optimizer", "proxsgd", "--eta", "0.1",
                 "--seed", "1", trace="a.csv")
    _, p2 = _cli(tmp_path, "--optimizer", "proxsgd", "--eta", "0.1",
                 "--seed", "2", trace="b.csv")
    assert _strip_wall(p1.read_text().split("\n")) != _strip_wall(p2.read_text().split("\n"))


def test_cli_bad_hessian_exit_1(tmp_path, capsys):
    rc, _ = _cli(tmp_path, "--hessian", "newton")
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_cli_bad_synthetic_exit_1(capsys):
    assert main(["--synthetic", "8,80"]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_missing_dataset_exit_1(tmp_path, capsys):
    rc, _ = _cli(tmp_path, "--dataset", str(tmp_path / "nope.libsvm"))
    assert rc == 1


def test_cli_diverged_exit_2(tmp_path, capsys):
    rc, path = _cli(tmp_path, "--optimizer", "proxsgd", "--eta", "1e8",
                    "--lambda1", "1e-2", "--epochs", "50")
    assert rc == 2
    assert "ABORTED" in capsys.readouterr().out
    # partial trace still on disk
    assert len(path.read_text().strip().split("\n")) >= 2


def test_cli_libsvm_dataset(tmp_path):
    ds = synth_logistic(6, 50, sparsity=0.5, seed=1)
    data = tmp_path / "data.libsvm"
    write_libsvm(ds, data)
    rc, path = _cli(tmp_path, "--dataset", str(data))
    assert rc == 0
    assert len(path.read_text().strip().split("\n")) == 5


def test_cli_proxsgd_grid_sweep_without_eta(tmp_path, capsys):
    rc, path = _cli(tmp_path, "--optimizer", "proxsgd", "--epochs", "2")
    assert rc == 0
    assert "best eta over grid:" in capsys.readouterr().out
    assert len(path.read_text().strip().split("\n")) == 4


def test_cli_sweep_parallel(tmp_path, capsys):
    rc, path = _cli(tmp_path, "--optimizer", "proxsgd",
                    "--sweep", "eta=0.01,0.1")
    assert rc == 0
    out = capsys.readouterr().out
    assert "--- eta = 0.01 ---" in out
    assert "--- eta = 0.1 ---" in out
    assert (tmp_path / "trace.csv.eta=0.01").exists()
    assert (tmp_path / "trace.csv.eta=0.1").exists()


def test_cli_bad_sweep_field_exit_1(tmp_path, capsys):
    rc, _ = _cli(tmp_path, "--sweep", "epochs=1,2")
    assert rc == 1


def test_cli_l1_yields_sparse_final_row(tmp_path):
    rc, path = _cli(tmp_path, "--lambda2", "1e-3", "--epochs", "30",
                    "--synthetic", "50,400,0.2")
    assert rc == 0
    last = path.read_text().strip().split("\n")[-1].split(",")
    sparsity_pct = float(last[4])
    assert sparsity_pct < 100.0
