"""Tempered adaptive SMC: a particle population walking gamma from gamma0 to 1.

Each particle is an independent Metropolis chain with its own RNG substream
(derived from the particle index, never from scheduling order, so results are
identical for any worker count). Reweighting uses cached log-likelihoods and
costs no factorizations; only Metropolis proposals factorize.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .data import ADAPTIVE, GRID, Dataset, RunConfig
from .errors import DegeneratePopulationError
from .inference import PosteriorTarget, PriorSpec
from .mcmc import ChainState, _trace_rmse, init_chain, metropolis_step, tune_widths
from .predict import PosteriorEnsemble
from .trace import Trace, TraceRow

BISECT_ITERS = 60


@dataclass
class Particle:
    """One weighted chain in the population."""

    chain: ChainState
    log_weight: float


@dataclass
class TemperSchedule:
    """Either a fixed ascending gamma grid ending at 1, or an adaptive
    ESS-reduction policy."""

    mode: str
    grid: list[float] | None = None
    ess_reduction: float | None = None

    def __post_init__(self):
        if self.mode == GRID:
            g = self.grid
            if g is None or len(g) < 2:
                raise ValueError("grid needs at least 2 gamma values")
            if g[0] <= 0 or g[-1] != 1.0 or any(a >= b for a, b in zip(g, g[1:])):
                raise ValueError("grid must be strictly ascending in (0, 1] ending at 1")
        elif self.mode == ADAPTIVE:
            if self.ess_reduction is None or not 0.0 < self.ess_reduction < 1.0:
                raise ValueError("ess_reduction must be in (0, 1)")
        else:
            raise ValueError(f"unknown schedule mode {self.mode!r}")

    @classmethod
    def from_config(cls, config: RunConfig) -> tuple["TemperSchedule", float]:
        """Build the schedule and its starting gamma."""
        if config.schedule_mode == ADAPTIVE:
            return cls(ADAPTIVE, ess_reduction=config.ess_reduction), config.gamma0
        if config.gamma_grid is not None:
            grid = [float(g) for g in config.gamma_grid]
        else:
            grid = np.linspace(config.gamma0, 1.0, config.grid_count).tolist()
            grid[-1] = 1.0
        return cls(GRID, grid=grid), grid[0]


def normalized_weights(log_weights: np.ndarray) -> np.ndarray:
    log_weights = np.asarray(log_weights, dtype=float)
    finite = np.isfinite(log_weights)
    if not finite.any():
        raise DegeneratePopulationError("all particle weights are zero")
    return np.exp(log_weights - logsumexp(log_weights))


def ess(log_weights: np.ndarray) -> float:
    """Effective sample size 1 / sum(w^2) of the normalized weights.

    Computed as (sum u)^2 / sum(u^2) with u = exp(lw - max lw), which is the
    same quantity but exact in floating point for the equal-weight case
    (giving the population size) and the one-hot case (giving 1).
    """
    log_weights = np.asarray(log_weights, dtype=float)
    finite = np.isfinite(log_weights)
    if not finite.any():
        raise DegeneratePopulationError("all particle weights are zero")
    u = np.exp(log_weights - log_weights[finite].max())
    return float(np.sum(u) ** 2 / np.sum(u**2))


def reweight(population: list[Particle], gamma_from: float, gamma_to: float) -> list[Particle]:
    """Importance update for the gamma step: log w += dgamma * log-likelihood,
    then normalize. Uses cached likelihoods; zero factorizations."""
    if gamma_to < gamma_from:
        raise ValueError("gamma_to must be >= gamma_from")
    dg = gamma_to - gamma_from
    logw = np.array([p.log_weight + dg * p.chain.log_lik for p in population])
    w = normalized_weights(logw)
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    for p, lw in zip(population, logw):
        p.log_weight = float(lw)
    return population


def next_gamma_adaptive(
    population: list[Particle], gamma_i: float, ess_reduction: float
) -> float:
    """Smallest gamma in (gamma_i, 1] where the reweighted ESS falls to
    ess_reduction times the current ESS; 1 if the drop never happens.

    The ESS is monotone non-increasing in gamma, so plain bisection suffices.
    """
    logw = np.array([p.log_weight for p in population])
    lls = np.array([p.chain.log_lik for p in population])
    ess_now = ess(logw)
    target = ess_reduction * ess_now

    def g(gamma: float) -> float:
        return ess(logw + (gamma - gamma_i) * lls) - target

    if g(1.0) >= 0.0:
        return 1.0
    lo, hi = gamma_i, 1.0
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return hi


def resample(
    population: list[Particle],
    rng: np.random.Generator,
    make_rng=None,
) -> list[Particle]:
    """Systematic resampling from one uniform draw; offspring get equal
    weights and fresh per-index RNG substreams via make_rng(index)."""
    n = len(population)
    w = normalized_weights(np.array([p.log_weight for p in population]))
    positions = (rng.random() + np.arange(n)) / n
    cum = np.cumsum(w)
    cum[-1] = 1.0
    parents = np.searchsorted(cum, positions, side="right")
    if make_rng is None:
        streams = rng.spawn(n)
        make_rng = lambda i: streams[i]  # noqa: E731
    logw = float(-np.log(n))
    out = []
    for i, parent in enumerate(parents):
        chain = population[parent].chain.copy_for_offspring(make_rng(i))
        out.append(Particle(chain=chain, log_weight=logw))
    return out


def _particle_rng(seed: int, generation: int, index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(generation, index))
    )


def _advance_all(
    population: list[Particle],
    gamma: float,
    sweeps: int,
    target: PosteriorTarget,
    workers: int,
) -> None:
    def work(p: Particle) -> None:
        for _ in range(sweeps):
            metropolis_step(p.chain, gamma, target)
        tune_widths(p.chain)

    if workers <= 1 or len(population) == 1:
        for p in population:
            work(p)
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(population))) as ex:
            list(ex.map(work, population))


def run_asmc(
    dataset: Dataset,
    config: RunConfig,
    priors: PriorSpec | None = None,
    test: Dataset | None = None,
    theta0: np.ndarray | None = None,
    free_mask: np.ndarray | None = None,
) -> tuple[PosteriorEnsemble, Trace]:
    """Run the tempered SMC engine and return the final equal-weight ensemble.

    Particles start from prior draws (pinned scalars taken from theta0), do a
    width-tuning sweep at gamma0, then per gamma stage: reweight, resample,
    advance steps_per_gamma sweeps each, tune widths. Trace rows carry the
    pre-resample ESS and cumulative factorization counts per stage.
    """
    if priors is None:
        priors = PriorSpec.default(dataset.d, dataset.m)
    target = PosteriorTarget(dataset, priors, config.kernel_form, config.jitter)
    schedule, gamma = TemperSchedule.from_config(config)
    n = config.particles
    t0 = time.perf_counter()

    population = []
    for i in range(n):
        rng = _particle_rng(config.seed, 0, i)
        draw = target.sample_prior(rng)
        if theta0 is not None and free_mask is not None:
            pinned = ~np.asarray(free_mask, dtype=bool)
            draw[pinned] = np.asarray(theta0, dtype=float)[pinned]
        chain = init_chain(target, rng, draw, free_mask)
        population.append(Particle(chain=chain, log_weight=-np.log(n)))

    trace = Trace(n_outputs=dataset.m)
    base_factorizations = 0

    def total_factorizations() -> int:
        return base_factorizations + sum(p.chain.factorizations for p in population)

    def emit(gamma_val: float, ess_val: float) -> None:
        thetas = np.array([p.chain.theta for p in population])
        logt = np.mean(
            [p.chain.log_target(gamma_val).tempered_log_target for p in population]
        )
        trace.add(
            TraceRow(
                wall_time_s=time.perf_counter() - t0,
                step_or_gamma=gamma_val,
                ess=ess_val,
                log_target_mean=float(logt),
                factorizations=total_factorizations(),
                rmse=_trace_rmse(dataset, thetas, test, config.kernel_form, config.jitter),
            )
        )

    _advance_all(population, gamma, 1, target, config.workers)
    gammas_visited = [gamma]
    emit(gamma, float(n))

    generation = 0
    resample_rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(0xA5, 0))
    )
    while gamma < 1.0:
        if schedule.mode == GRID:
            gamma_next = schedule.grid[len(gammas_visited)]
        else:
            gamma_next = next_gamma_adaptive(population, gamma, schedule.ess_reduction)
        reweight(population, gamma, gamma_next)
        ess_before_resample = ess(np.array([p.log_weight for p in population]))
        generation += 1
        base_factorizations += sum(p.chain.factorizations for p in population)
        population = resample(
            population,
            resample_rng,
            make_rng=lambda i, g=generation: _particle_rng(config.seed, g, i),
        )
        _advance_all(population, gamma_next, config.steps_per_gamma, target, config.workers)
        gammas_visited.append(gamma_next)
        emit(gamma_next, ess_before_resample)
        gamma = gamma_next

    ensemble = PosteriorEnsemble.equal_weights(
        np.array([p.chain.theta for p in population]),
        dataset.d,
        dataset.m,
        provenance={
            "engine": "asmc",
            "seed": config.seed,
            "schedule": f"mode={schedule.mode},gammas={len(gammas_visited)},"
            f"steps_per_gamma={config.steps_per_gamma}",
        },
    )
    return ensemble, trace
