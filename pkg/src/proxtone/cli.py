"""Benchmark CLI: assemble a problem, run an optimizer, emit a CSV trace.

Exit codes: 0 success, 1 configuration error, 2 run diverged/aborted.
"""

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .harness import (
    ConfigError,
    ExperimentConfig,
    parse_hessian,
    run_experiment_to_path,
    sweep_eta,
)


def _parse_synthetic(spec):
    try:
        p_s, m_s, s_s = spec.split(",")
        return int(p_s), int(m_s), float(s_s)
    except ValueError:
        raise ConfigError(f"bad --synthetic spec {spec!r}, expected p,m,sparsity")


def _parse_label_map(spec):
    # e.g. "2:-1,1:1"
    out = {}
    try:
        for pair in spec.split(","):
            raw, mapped = pair.split(":")
            out[float(raw)] = int(mapped)
    except ValueError:
        raise ConfigError(f"bad --label-map spec {spec!r}")
    return out


def build_parser():
    ap = argparse.ArgumentParser(
        prog="proxtone-bench",
        description="Benchmark PROXTONE-family optimizers on L1-regularized objectives.",
    )
    ap.add_argument("--optimizer", default="proxtone",
                    choices=["proxtone", "proxtone-plus", "proxsgd", "proxsag"])
    ap.add_argument("--dataset", help="LIBSVM-format data file")
    ap.add_argument("--label-map", help="raw:mapped pairs, e.g. '2:-1,1:1'")
    ap.add_argument("--synthetic", default="50,1000,0.2",
                    help="synthetic logistic problem as p,m,sparsity")
    ap.add_argument("--objective", default="logistic", choices=["logistic", "mlp"])
    ap.add_argument("--mlp-hidden", type=int, default=32)
    ap.add_argument("--mlp-arch", default="64,10", help="input_dim,classes for MLP data")
    ap.add_argument("--mlp-samples", type=int, default=500)
    ap.add_argument("--batches", type=int, default=10)
    ap.add_argument("--lambda1", type=float, default=1e-4)
    ap.add_argument("--lambda2", type=float, default=1e-4)
    ap.add_argument("--epochs", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--hessian", default="lbfgs", help="lbfgs or diagonal:SCALE")
    ap.add_argument("--max-history", type=int, default=20)
    ap.add_argument("--sub-max-iter", type=int, default=100)
    ap.add_argument("--sub-abstol", type=float, default=1e-5)
    ap.add_argument("--eta", type=float, help="proxsgd step size (omit to sweep powers of 10)")
    ap.add_argument("--lipschitz", type=float, help="proxsag/proxtone-plus Lipschitz constant")
    ap.add_argument("--switch-epoch", type=int, default=5)
    ap.add_argument("--subspace", type=int, default=0, metavar="QMAX",
                    help="shared-subspace capacity (0 = full space)")
    ap.add_argument("--nnz-tau", type=float, default=0.0)
    ap.add_argument("--trace", help="CSV trace output path")
    ap.add_argument("--sweep", metavar="FIELD=V1,V2,...",
                    help="run one config per value in parallel, e.g. eta=0.01,0.1")
    return ap


def config_from_args(args):
    d, c = args.mlp_arch.split(",")
    return ExperimentConfig(
        optimizer=args.optimizer,
        dataset_path=args.dataset,
        label_map=_parse_label_map(args.label_map) if args.label_map else None,
        synthetic=_parse_synthetic(args.synthetic),
        objective=args.objective,
        mlp_hidden=args.mlp_hidden,
        mlp_arch=(int(d), int(c)),
        mlp_samples=args.mlp_samples,
        n_batches=args.batches,
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        epochs=args.epochs,
        seed=args.seed,
        hessian=args.hessian,
        max_history=args.max_history,
        sub_max_iter=args.sub_max_iter,
        sub_abstol=args.sub_abstol,
        eta=args.eta,
        lipschitz=args.lipschitz,
        switch_epoch=args.switch_epoch,
        subspace_qmax=args.subspace,
        nnz_tau=args.nnz_tau,
        trace_path=args.trace,
    )


def _print_summary(summary):
    print(f"optimizer:        {summary['optimizer']}")
    print(f"final objective:  {summary['final_objective']:.10g}")
    print(f"final nnz:        {summary['final_nnz']}")
    print(f"final sparsity %: {summary['final_sparsity_pct']:.4g}")
    if summary["aborted"]:
        print("run ABORTED (diverged); partial trace written")


_SWEEP_FIELDS = {
    "eta": float, "lipschitz": float, "lambda1": float, "lambda2": float,
    "seed": int, "switch_epoch": int, "n_batches": int,
}


def _run_one(config):
    # module-level so ProcessPoolExecutor can pickle it
    return run_experiment_to_path(config)


def _run_sweep(config, sweep_spec):
    try:
        name, values_s = sweep_spec.split("=", 1)
    except ValueError:
        raise ConfigError(f"bad --sweep spec {sweep_spec!r}")
    if name not in _SWEEP_FIELDS:
        raise ConfigError(f"cannot sweep field {name!r}; one of {sorted(_SWEEP_FIELDS)}")
    cast = _SWEEP_FIELDS[name]
    values = [cast(v) for v in values_s.split(",")]
    configs = []
    for v in values:
        trace_path = config.trace_path
        if trace_path is not None:
            trace_path = f"{trace_path}.{name}={v}"
        configs.append(replace(config, trace_path=trace_path, **{name: v}))
    with ProcessPoolExecutor() as pool:
        results = list(pool.map(_run_one, configs))
    rc = 0
    for v, (trace, summary) in zip(values, results):
        print(f"--- {name} = {v} ---")
        _print_summary(summary)
        if summary["aborted"]:
            rc = 2
    return rc


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        parse_hessian(config.hessian)  # validate before any compute
        if args.sweep:
            return _run_sweep(config, args.sweep)
        if config.optimizer == "proxsgd" and config.eta is None:
            best, trace, _ = sweep_eta(config)
            print(f"best eta over grid: {best}")
            if config.trace_path is not None:
                from .harness import CSV_HEADER, format_row
                with open(config.trace_path, "w") as fh:
                    fh.write(CSV_HEADER + "\n")
                    for row in trace.rows:
                        fh.write(format_row(row) + "\n")
            summary = {
                "optimizer": "proxsgd",
                "final_objective": trace.final.objective,
                "final_nnz": trace.final.nnz,
                "final_sparsity_pct": trace.final.sparsity_pct,
                "aborted": trace.aborted,
            }
        else:
            trace, summary = run_experiment_to_path(config)
        _print_summary(summary)
        return 2 if summary["aborted"] else 0
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
