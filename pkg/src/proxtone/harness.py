"""Experiment assembly and comparison logic behind the benchmark CLI."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .datasets import load_libsvm, partition, synth_logistic, synth_multiclass
from .objectives import make_components
from .optimizers import Proxtone, ProxSAG, ProxSGD, ProxtonePlus, run
from .prox import RegularizerConfig
from .subproblem import SubproblemConfig

ETA_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1)

CSV_HEADER = "epoch,wall_seconds,objective,nnz,sparsity_pct,grad_evals"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    optimizer: str = "proxtone"
    dataset_path: str = None
    label_map: dict = None
    synthetic: tuple = (50, 1000, 0.2)  # (p, m, sparsity)
    objective: str = "logistic"
    mlp_hidden: int = 32
    mlp_arch: tuple = (64, 10)  # (input dim, classes) for the synthetic MLP data
    mlp_samples: int = 500
    n_batches: int = 10
    lambda1: float = 1e-4
    lambda2: float = 1e-4
    epochs: int = 50
    seed: int = 0
    hessian: str = "lbfgs"  # "lbfgs" or "diagonal:SCALE"
    max_history: int = 20
    sub_max_iter: int = 100
    sub_abstol: float = 1e-5
    eta: float = None  # None -> grid sweep for proxsgd
    lipschitz: float = None  # None -> power-iteration estimate (logistic only)
    switch_epoch: int = 5
    subspace_qmax: int = 0
    nnz_tau: float = 0.0
    trace_path: str = None


def parse_hessian(spec):
    if spec == "lbfgs":
        return "lbfgs"
    if spec.startswith("diagonal:"):
        try:
            scale = float(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad hessian spec {spec!r}")
        if scale <= 0:
            raise ConfigError("diagonal Hessian scale must be positive")
        return ("diagonal", scale)
    raise ConfigError(f"unknown hessian mode {spec!r}")


def estimate_lipschitz(dataset, lambda1, iters=100, seed=0):
    """Power-iteration bound for the mean logistic smooth part:
    0.25 * lambda_max(A^T A / m) + 2 * lambda1."""
    A = dataset.features
    m = A.shape[0]
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = A.T @ (A @ v) / m
        lam = float(np.linalg.norm(w))
        if lam == 0.0:
            break
        v = w / lam
    return 0.25 * lam + 2.0 * lambda1


def build_problem(config):
    """dataset -> partition -> components; returns (components, reg, x0)."""
    reg = RegularizerConfig(config.lambda1, config.lambda2)
    if config.objective == "logistic":
        if config.dataset_path is not None:
            dataset = load_libsvm(config.dataset_path, label_map=config.label_map)
        else:
            p, m, sparsity = config.synthetic
            dataset = synth_logistic(p, m, sparsity, config.seed)
        part = partition(dataset, config.n_batches, config.seed)
        components = make_components(dataset, part, config.lambda1)
    elif config.objective == "mlp":
        d, c = config.mlp_arch
        dataset = synth_multiclass(d, config.mlp_samples, c, config.seed)
        part = partition(dataset, config.n_batches, config.seed)
        components = make_components(dataset, part, config.lambda1, hidden=config.mlp_hidden)
    else:
        raise ConfigError(f"unknown objective {config.objective!r}")
    if config.objective == "mlp":
        # zero is a saddle of the sigmoid MLP; scaled random weights, zero biases
        x0 = init_mlp_params(components[0], config.seed)
    else:
        x0 = np.zeros(components[0].p)
    return components, reg, x0, dataset


def init_mlp_params(component, seed):
    rng = np.random.default_rng(seed)
    x0 = np.zeros(component.p)
    w1, _, w2, _ = component._slices()
    x0[w1] = rng.standard_normal(w1.stop - w1.start) / np.sqrt(component.d)
    x0[w2] = rng.standard_normal(w2.stop - w2.start) / np.sqrt(component.h)
    return x0


def build_optimizer(config, components, reg, x0, dataset):
    kind = config.optimizer
    sub_config = SubproblemConfig(
        max_iter=config.sub_max_iter, abstol=config.sub_abstol,
        penalty_mask=components[0].penalty_mask,
    )
    if kind in ("proxsag", "proxtone-plus"):
        L = config.lipschitz
        if L is None:
            if config.objective != "logistic":
                raise ConfigError("--lipschitz is required for the MLP objective")
            L = estimate_lipschitz(dataset, config.lambda1)
    if kind == "proxsgd":
        if config.eta is None:
            raise ConfigError("proxsgd needs --eta (or use sweep_eta)")
        return ProxSGD(components, reg, x0, config.eta, seed=config.seed)
    if kind == "proxsag":
        return ProxSAG(components, reg, x0, L, seed=config.seed)
    if kind == "proxtone":
        return Proxtone(
            components, reg, x0, hessian=parse_hessian(config.hessian),
            max_history=config.max_history, sub_config=sub_config,
            inexact=config.sub_max_iter == 1, subspace_qmax=config.subspace_qmax,
            seed=config.seed,
        )
    if kind == "proxtone-plus":
        return ProxtonePlus(
            components, reg, x0, config.switch_epoch, L, seed=config.seed,
            hessian=parse_hessian(config.hessian), max_history=config.max_history,
            sub_config=sub_config, subspace_qmax=config.subspace_qmax,
        )
    raise ConfigError(f"unknown optimizer {kind!r}")


def format_row(row):
    return (
        f"{row.epoch},{row.wall_seconds!r},{row.objective!r},"
        f"{row.nnz},{row.sparsity_pct!r},{row.grad_evals}"
    )


def run_experiment(config, csv_file=None):
    """Build and execute one run; returns (trace, summary). Each CSV row is
    flushed as soon as the epoch completes."""
    components, reg, x0, dataset = build_problem(config)
    optimizer = build_optimizer(config, components, reg, x0, dataset)

    sink = None
    if csv_file is not None:
        csv_file.write(CSV_HEADER + "\n")
        csv_file.flush()

        def sink(row):
            csv_file.write(format_row(row) + "\n")
            csv_file.flush()

    metadata = {"optimizer": config.optimizer, "seed": config.seed}
    trace = run(
        optimizer, components, reg, config.epochs, nnz_tau=config.nnz_tau,
        trace_sink=sink, metadata=metadata,
    )
    final = trace.final
    summary = {
        "optimizer": config.optimizer,
        "final_objective": final.objective,
        "final_nnz": final.nnz,
        "final_sparsity_pct": final.sparsity_pct,
        "epochs": final.epoch,
        "aborted": trace.aborted,
    }
    return trace, summary


def run_experiment_to_path(config):
    """Run with the trace written to config.trace_path (or no file if None)."""
    if config.trace_path is None:
        return run_experiment(config)
    with open(config.trace_path, "w") as fh:
        return run_experiment(config, csv_file=fh)


def sweep_eta(config, grid=ETA_GRID):
    """Run proxsgd once per step size; returns (best_eta, best_trace, all traces)
    ranked by lowest final objective (non-finite and aborted runs rank last)."""
    results = {}
    for eta in grid:
        trace, summary = run_experiment(replace(config, optimizer="proxsgd", eta=eta))
        results[eta] = (trace, summary)

    def score(eta):
        trace, summary = results[eta]
        bad = summary["aborted"] or not math.isfinite(summary["final_objective"])
        return (bad, summary["final_objective"] if not bad else math.inf)

    best = min(grid, key=score)
    return best, results[best][0], results


def epochs_to_gap(trace, f_star, gap_target):
    """First epoch whose objective is within gap_target of f_star, or None."""
    for row in trace.rows:
        if row.objective - f_star <= gap_target:
            return row.epoch
    return None


def compare(configs, gap_target):
    """Run each config on the shared problem and tabulate epochs-to-gap against
    the best final objective seen across runs (minus a small safety margin)."""
    runs = [run_experiment(c) for c in configs]
    best_final = min(summary["final_objective"] for _, summary in runs)
    f_star = best_final - 1e-12 * max(1.0, abs(best_final))
    table = []
    for config, (trace, summary) in zip(configs, runs):
        e = epochs_to_gap(trace, f_star, gap_target)
        table.append({
            "optimizer": config.optimizer,
            "final_objective": summary["final_objective"],
            "epochs_to_gap": e,
            "reached": e is not None,
        })
    return table
