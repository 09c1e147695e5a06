"""Command-line front end: train, predict, benchmark, compare."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .benchmarks import PROBLEMS, run_benchmark
from .data import ADAPTIVE, GRID, Dataset, Normalization, RunConfig, load_dataset
from .errors import GPTemperError
from .inference import PriorSpec
from .mcmc import run_mcmc
from .predict import PosteriorEnsemble, predict
from .smc import run_asmc
from .trace import read_trace_csv


def _default_workers() -> int:
    return int(os.environ.get("GPTEMPER_WORKERS", "1"))


def _config_hash(config: RunConfig) -> str:
    blob = json.dumps(config.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _add_sampler_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--engine", choices=["mcmc", "asmc"], default="asmc")
    p.add_argument("--particles", type=int, default=60)
    p.add_argument("--grid", type=int, default=10, help="uniform gamma grid size")
    p.add_argument(
        "--gamma-grid", type=str, default=None,
        help="explicit comma-separated ascending gamma list ending at 1",
    )
    p.add_argument(
        "--adaptive", type=float, default=None, metavar="ESS_REDUCTION",
        help="use the adaptive ESS-reduction schedule instead of a grid",
    )
    p.add_argument("--steps-per-gamma", type=int, default=1)
    p.add_argument("--gamma0", type=float, default=0.001)
    p.add_argument("--steps", type=int, default=5800, help="MCMC total sweeps")
    p.add_argument("--init-steps", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument(
        "--kernel-form",
        choices=["exponentiated-sum", "additive-sum"],
        default="exponentiated-sum",
    )
    p.add_argument("--jitter", type=float, default=1e-8)
    p.add_argument("--trace-every", type=int, default=25)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    gamma_grid = None
    if args.gamma_grid:
        gamma_grid = [float(v) for v in args.gamma_grid.split(",")]
    return RunConfig(
        engine=args.engine,
        particles=args.particles,
        steps_per_gamma=args.steps_per_gamma,
        schedule_mode=ADAPTIVE if args.adaptive is not None else GRID,
        grid_count=args.grid,
        gamma_grid=gamma_grid,
        ess_reduction=args.adaptive if args.adaptive is not None else 0.9,
        gamma0=args.gamma0,
        mcmc_total_steps=args.steps,
        mcmc_init_steps=args.init_steps,
        seed=args.seed,
        workers=args.workers if args.workers is not None else _default_workers(),
        kernel_form=args.kernel_form,
        jitter=args.jitter,
        trace_every=args.trace_every,
    )


def save_model(
    path: str,
    ensemble: PosteriorEnsemble,
    dataset: Dataset,
    config: RunConfig,
    priors: PriorSpec,
) -> None:
    from .data import HyperParams

    doc = {
        "provenance": {
            "version": __version__,
            "engine": ensemble.provenance.get("engine"),
            "seed": config.seed,
            "config_hash": _config_hash(config),
            "config": config.to_dict(),
            "schedule": ensemble.provenance.get("schedule"),
        },
        "kernel_form": config.kernel_form,
        "jitter": config.jitter,
        "d": dataset.d,
        "m": dataset.m,
        "input_names": dataset.input_names,
        "output_names": dataset.output_names,
        "normalization": dataset.normalization.to_dict(),
        "train_inputs": dataset.inputs.tolist(),
        "train_outputs": dataset.outputs.tolist(),
        "priors": priors.to_dict(),
        "scalar_names": HyperParams.scalar_names(dataset.d, dataset.m),
        "weights": ensemble.weights.tolist(),
        "thetas": ensemble.thetas.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def cmd_train(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    outputs = [c.strip() for c in args.outputs.split(",")]
    train, test = load_dataset(args.data, outputs, args.test_fraction, args.seed)
    priors = PriorSpec.default(train.d, train.m)
    if config.engine == "mcmc":
        ensemble, trace = run_mcmc(train, config, priors, test=test)
    else:
        ensemble, trace = run_asmc(train, config, priors, test=test)
    save_model(args.model_out, ensemble, train, config, priors)
    trace.write_csv(args.trace_out)
    print(f"wrote {args.model_out} ({ensemble.thetas.shape[0]} samples) and {args.trace_out}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    from .data import _read_csv

    header, table = _read_csv(args.data)
    d = model["d"]
    if table.shape[1] != d:
        raise GPTemperError(
            f"model expects {d} input columns, file has {table.shape[1]}"
        )
    norm = Normalization.from_dict(model["normalization"])
    ensemble = PosteriorEnsemble(
        thetas=np.asarray(model["thetas"]),
        weights=np.asarray(model["weights"]),
        d=d,
        m=model["m"],
    )
    # train rebuilt in normalized space; transform record travels with the model
    train = Dataset(
        inputs=np.asarray(model["train_inputs"]),
        outputs=np.asarray(model["train_outputs"]),
        input_names=model["input_names"],
        output_names=model["output_names"],
        normalization=norm,
    )
    x = norm.normalize_inputs(table)
    pred = predict(train, ensemble, x, model["kernel_form"], model["jitter"])
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        names = model["output_names"]
        w.writerow([f"mean_{n}" for n in names] + [f"var_{n}" for n in names])
        for i in range(x.shape[0]):
            w.writerow(
                [repr(float(v)) for v in pred.mean[i]]
                + [repr(float(v)) for v in pred.variance[i]]
            )
    print(f"wrote {args.out} ({x.shape[0]} rows)")
    return 0


def cmd_benchmark(args: argparse.Namespace) -> int:
    if args.problem not in PROBLEMS:
        raise GPTemperError(
            f"unknown problem {args.problem!r}; choose from {sorted(PROBLEMS)}"
        )
    problem = PROBLEMS[args.problem]
    config = _config_from_args(args)
    engines = [e.strip() for e in args.engines.split(",")]
    report = run_benchmark(
        problem, args.train_n, args.test_n, engines, config, args.seed
    )
    os.makedirs(args.out_dir, exist_ok=True)
    traces = report.pop("traces")
    trace_paths = {}
    for engine, trace in traces.items():
        path = os.path.join(args.out_dir, f"{args.problem}_{engine}_trace.csv")
        trace.write_csv(path)
        trace_paths[engine] = path
    report["trace_files"] = trace_paths
    summary_path = os.path.join(args.out_dir, f"{args.problem}_summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(f"wrote {summary_path}")
    return 0


def compare_traces(trace_a, trace_b) -> dict:
    """Verdict comparing trace A against baseline trace B."""
    fa = trace_a.final_rmse()
    fb = trace_b.final_rmse()
    rmse_ratio = None
    time_to_target = None
    if fa is not None and fb is not None:
        rmse_ratio = fa[0] / fb[0]
        target = max(fa[0], fb[0])

        def first_time(trace):
            for row in trace.rows:
                if row.rmse is not None and row.rmse[0] <= target:
                    return row.wall_time_s
            return None

        time_to_target = {
            "target_rmse": target,
            "a": first_time(trace_a),
            "b": first_time(trace_b),
        }
    return {
        "rmse_ratio": rmse_ratio,
        "factorization_ratio": trace_a.total_factorizations
        / trace_b.total_factorizations,
        "time_to_target_rmse": time_to_target,
    }


def cmd_compare(args: argparse.Namespace) -> int:
    trace_a = read_trace_csv(args.trace_a)
    trace_b = read_trace_csv(args.trace_b)
    verdict = compare_traces(trace_a, trace_b)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(verdict, fh, sort_keys=True, indent=1)
        fh.write("\n")
    if args.merged:
        with open(args.merged, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            cols = trace_a.columns()
            w.writerow(["trace"] + cols)
            tagged = [("a", r) for r in trace_a.rows] + [("b", r) for r in trace_b.rows]
            tagged.sort(key=lambda t: t[1].wall_time_s)
            for tag, r in tagged:
                rmse = r.rmse if r.rmse is not None else [""] * trace_a.n_outputs
                w.writerow(
                    [tag, r.wall_time_s, r.step_or_gamma,
                     "" if r.ess is None else r.ess,
                     r.log_target_mean, r.factorizations, *rmse]
                )
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gptemper",
        description="Fully Bayesian GP surrogate training: MCMC and tempered SMC engines",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit GP hyperparameters on a CSV dataset")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--outputs", required=True, help="comma-separated output columns")
    p_train.add_argument("--test-fraction", type=float, default=0.0)
    p_train.add_argument("--model-out", default="model.json")
    p_train.add_argument("--trace-out", default="trace.csv")
    _add_sampler_flags(p_train)
    p_train.set_defaults(func=cmd_train)

    p_pred = sub.add_parser("predict", help="predict with a trained model")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True, help="CSV of input columns only")
    p_pred.add_argument("--out", default="predictions.csv")
    p_pred.set_defaults(func=cmd_predict)

    p_bench = sub.add_parser("benchmark", help="run a synthetic two-engine comparison")
    p_bench.add_argument("--problem", required=True)
    p_bench.add_argument("--train-n", type=int, default=200)
    p_bench.add_argument("--test-n", type=int, default=500)
    p_bench.add_argument("--engines", default="mcmc,asmc")
    p_bench.add_argument("--out-dir", default="benchmark_out")
    _add_sampler_flags(p_bench)
    p_bench.set_defaults(func=cmd_benchmark)

    p_cmp = sub.add_parser("compare", help="compare two trace files")
    p_cmp.add_argument("--trace-a", required=True)
    p_cmp.add_argument("--trace-b", required=True)
    p_cmp.add_argument("--out", default="verdict.json")
    p_cmp.add_argument("--merged", default=None, help="optional merged CSV path")
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GPTemperError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
