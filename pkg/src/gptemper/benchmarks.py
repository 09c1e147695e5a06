"""Synthetic objective functions and the two-engine comparison harness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .data import Dataset, RunConfig
from .mcmc import run_mcmc
from .smc import run_asmc

GRAVITY_IN_S2 = 386.09  # inch-pound-second unit system


def scalability_fn(x) -> float:
    """10-D nonlinear test function used for the large-training-set studies."""
    x = np.asarray(x, dtype=float)
    if x.shape != (10,):
        raise ValueError("expected a length-10 vector")
    return float(
        3.0 * math.sin(x[0]) * x[1]
        + math.cos(x[2]) * math.sin(x[3])
        + math.sin(x[4]) * math.sin(x[5])
        + math.sin(x[6])
        + math.sin(x[7])
        + 7.0 * x[8]
        + 6.0 * x[9]
    )


def torsion_fn(x) -> float:
    """High natural frequency of a three-shaft, two-disk torsion system.

    18 inputs: shaft diameters d1..d3, lengths L1..L3, rigidities G1..G3,
    shaft weight densities (3, nuisance inputs unused by the formulas),
    disk diameters D1..D2, thicknesses t1..t2, disk weight densities
    rho1..rho2. Stiffness and mass terms are linear in d and D as published,
    not the d^4/D^2 of standard dimensional analysis.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (18,):
        raise ValueError("expected a length-18 vector")
    if (x <= 0).any():
        raise ValueError("all torsion inputs must be positive")
    d = x[0:3]
    length = x[3:6]
    rigidity = x[6:9]
    # x[9:12] shaft densities: nuisance dimensions, not in the formulas
    disk_d = x[12:14]
    thick = x[14:16]
    rho = x[16:18]
    k = math.pi * rigidity * d / (32.0 * length)
    mass = math.pi * thick * rho * disk_d / (4.0 * GRAVITY_IN_S2)
    j = 0.5 * mass * (disk_d / 2.0) ** 2
    b = -((k[0] + k[1]) / j[0] + (k[1] + k[2]) / j[1])
    c = (k[0] * k[1] + k[1] * k[2] + k[2] * k[0]) / (j[0] * j[1])
    disc = b * b - 4.0 * c
    if disc < 0:
        raise ValueError("complex natural frequency; inputs must be positive")
    return math.sqrt((-b + math.sqrt(disc)) / 2.0) / (2.0 * math.pi)


_QUAD4_A = np.diag([1.0, 2.0, 3.0, 4.0]) + 0.5 * (np.ones((4, 4)) - np.eye(4))
_QUAD4_B = np.array([1.0, -1.0, 1.0, -1.0])
_QUAD4_C = 0.5


def quadratic4_fn(x) -> float:
    """Fixed 4-D quadratic stand-in for the withheld low-dimensional problem."""
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise ValueError("expected a length-4 vector")
    return float(x @ _QUAD4_A @ x + _QUAD4_B @ x + _QUAD4_C)


def highdim100_fn(x) -> float:
    """Fixed 100-D stand-in for the withheld high-dimensional problem."""
    x = np.asarray(x, dtype=float)
    if x.shape != (100,):
        raise ValueError("expected a length-100 vector")
    pairs = float(np.sum(np.sin(x[0::2]) * x[1::2]))
    linear = float(np.sum(np.arange(1, 101) * x) / 100.0)
    return pairs + linear


@dataclass(frozen=True)
class SyntheticProblem:
    name: str
    d: int
    m: int
    evaluator: Callable[[np.ndarray], float]
    input_box: list[tuple[float, float]]
    noise_sd: float = 0.0


_TORSION_BOX = (
    [(1.0, 3.0)] * 3          # shaft diameters [in]
    + [(10.0, 30.0)] * 3      # shaft lengths [in]
    + [(1.1e7, 1.3e7)] * 3    # rigidity [psi]
    + [(0.27, 0.29)] * 3      # shaft densities [lb/in^3]
    + [(10.0, 14.0)] * 2      # disk diameters [in]
    + [(2.0, 4.0)] * 2        # disk thickness [in]
    + [(0.27, 0.29)] * 2      # disk densities [lb/in^3]
)

PROBLEMS = {
    "scalability": SyntheticProblem(
        "scalability", 10, 1, scalability_fn, [(0.0, 1.0)] * 10
    ),
    "torsion": SyntheticProblem("torsion", 18, 1, torsion_fn, _TORSION_BOX),
    "quadratic4": SyntheticProblem(
        "quadratic4", 4, 1, quadratic4_fn, [(-1.0, 1.0)] * 4
    ),
    "highdim100": SyntheticProblem(
        "highdim100", 100, 1, highdim100_fn, [(-1.0, 1.0)] * 100
    ),
}


def lhs_sample(problem: SyntheticProblem, n: int, seed: int) -> np.ndarray:
    """Seeded Latin-hypercube design over the problem's input box."""
    sampler = qmc.LatinHypercube(d=problem.d, seed=seed)
    unit = sampler.random(n)
    lo = np.array([b[0] for b in problem.input_box])
    hi = np.array([b[1] for b in problem.input_box])
    return qmc.scale(unit, lo, hi)


def evaluate_problem(
    problem: SyntheticProblem, x: np.ndarray, rng: np.random.Generator | None = None
) -> np.ndarray:
    y = np.array([problem.evaluator(row) for row in np.atleast_2d(x)])
    if problem.noise_sd > 0 and rng is not None:
        y = y + rng.normal(0.0, problem.noise_sd, size=y.shape)
    return y[:, None]


def make_problem_data(
    problem: SyntheticProblem, train_n: int, test_n: int, seed: int
) -> tuple[Dataset, Dataset | None]:
    """LHS training design plus an independent LHS test design."""
    x_train = lhs_sample(problem, train_n, seed)
    noise_rng = np.random.default_rng(np.random.SeedSequence([seed, 0xB0]))
    y_train = evaluate_problem(problem, x_train, noise_rng)
    train = Dataset.from_raw(
        x_train, y_train, output_names=[problem.name]
    )
    test = None
    if test_n > 0:
        x_test = lhs_sample(problem, test_n, seed + 1)
        y_test = evaluate_problem(problem, x_test, noise_rng)
        test = train.held_out(x_test, y_test)
    return train, test


def run_benchmark(
    problem: SyntheticProblem,
    train_n: int,
    test_n: int,
    engines: list[str],
    config: RunConfig,
    seed: int,
) -> dict:
    """Train each engine on the same LHS data; return traces and a summary."""
    train, test = make_problem_data(problem, train_n, test_n, seed)
    report = {
        "problem": problem.name,
        "train_n": train_n,
        "test_n": test_n,
        "seed": seed,
        "engines": {},
        "traces": {},
    }
    for engine in engines:
        cfg = RunConfig(**{**config.to_dict(), "engine": engine, "seed": seed})
        if engine == "mcmc":
            ensemble, trace = run_mcmc(train, cfg, test=test)
            workers_effective = 1
        elif engine == "asmc":
            ensemble, trace = run_asmc(train, cfg, test=test)
            workers_effective = min(cfg.workers, cfg.particles)
        else:
            raise ValueError(f"unknown engine {engine!r}")
        total = trace.total_factorizations
        summary = {
            "wall_time_s": trace.rows[-1].wall_time_s,
            "factorizations_total": total,
            "workers": workers_effective,
            "factorizations_per_worker": total / workers_effective,
            "final_rmse": trace.final_rmse(),
            "n_samples": ensemble.thetas.shape[0],
        }
        report["engines"][engine] = summary
        report["traces"][engine] = trace
    return report
