"""Single-chain random-walk Metropolis baseline with width-tuning initialization.

Proposals walk in log space, one hyperparameter at a time, with per-scalar
widths tuned during a dedicated (single-worker) initialization phase and then
frozen for the main chain.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, RunConfig
from .inference import LogDensity, PosteriorTarget, PriorSpec
from .predict import PosteriorEnsemble, predict, rmse
from .trace import Trace, TraceRow

TUNE_EVERY = 50
TUNE_LOW = 0.2
TUNE_HIGH = 0.5
INITIAL_WIDTH = 0.5


@dataclass
class ChainState:
    """One Metropolis chain: positive theta, cached target pieces, tuning stats."""

    theta: np.ndarray
    log_lik: float
    log_prior: float
    widths: np.ndarray
    accept_counts: np.ndarray
    propose_counts: np.ndarray
    rng: np.random.Generator
    free: np.ndarray  # indices of scalars that get proposed
    step_index: int = 0
    factorizations: int = 0

    def log_target(self, gamma: float) -> LogDensity:
        return LogDensity(self.log_lik, self.log_prior, gamma)

    def copy_for_offspring(self, rng: np.random.Generator) -> "ChainState":
        return ChainState(
            theta=self.theta.copy(),
            log_lik=self.log_lik,
            log_prior=self.log_prior,
            widths=self.widths.copy(),
            accept_counts=np.zeros_like(self.accept_counts),
            propose_counts=np.zeros_like(self.propose_counts),
            rng=rng,
            free=self.free,
            step_index=self.step_index,
            factorizations=0,
        )


def init_chain(
    target: PosteriorTarget,
    rng: np.random.Generator,
    theta0: np.ndarray | None = None,
    free_mask: np.ndarray | None = None,
) -> ChainState:
    """Fresh chain at theta0 (or a prior draw) with uniform initial widths."""
    n = target.n_scalars
    if theta0 is None:
        theta0 = target.sample_prior(rng)
    theta0 = np.asarray(theta0, dtype=float).copy()
    if free_mask is None:
        free = np.arange(n)
    else:
        free = np.nonzero(np.asarray(free_mask, dtype=bool))[0]
    state = ChainState(
        theta=theta0,
        log_lik=target.log_likelihood(theta0),
        log_prior=target.log_prior(theta0),
        widths=np.full(n, INITIAL_WIDTH),
        accept_counts=np.zeros(n, dtype=int),
        propose_counts=np.zeros(n, dtype=int),
        rng=rng,
        free=free,
    )
    # factorizations counts sampling-loop cost only; this setup evaluation
    # stays outside so the counter equals sweeps * scalars * blocks exactly.
    return state


def metropolis_step(state: ChainState, gamma: float, target: PosteriorTarget) -> ChainState:
    """One component-wise sweep over the free scalars; mutates and returns state.

    Log-space random walk per scalar with the log theta' - log theta Jacobian
    term in the acceptance ratio. Each proposal costs one likelihood
    evaluation (m covariance factorizations).
    """
    theta = state.theta
    ll, lp = state.log_lik, state.log_prior
    rng = state.rng
    for i in state.free:
        state.propose_counts[i] += 1
        old = theta[i]
        new = old * np.exp(state.widths[i] * rng.standard_normal())
        theta[i] = new
        lp_new = target.log_prior(theta)
        ll_new = target.log_likelihood(theta)
        state.factorizations += target.factorizations_per_eval
        log_alpha = (
            gamma * (ll_new - ll) + (lp_new - lp) + (np.log(new) - np.log(old))
        )
        if np.log(rng.random()) < log_alpha:
            ll, lp = ll_new, lp_new
            state.accept_counts[i] += 1
        else:
            theta[i] = old
    state.log_lik, state.log_prior = ll, lp
    state.step_index += 1
    return state


def tune_widths(
    state: ChainState, target_low: float = TUNE_LOW, target_high: float = TUNE_HIGH
) -> ChainState:
    """Double/halve each scalar's width outside the acceptance band; reset counters."""
    for i in state.free:
        if state.propose_counts[i] == 0:
            continue
        ratio = state.accept_counts[i] / state.propose_counts[i]
        if ratio > target_high:
            state.widths[i] *= 2.0
        elif ratio < target_low:
            state.widths[i] *= 0.5
    state.accept_counts[:] = 0
    state.propose_counts[:] = 0
    return state


def _trace_rmse(
    dataset: Dataset,
    thetas: np.ndarray,
    test: Dataset | None,
    form: str,
    jitter: float,
) -> list[float] | None:
    if test is None or test.n == 0:
        return None
    ens = PosteriorEnsemble.equal_weights(thetas, dataset.d, dataset.m)
    pred = predict(dataset, ens, test.inputs, form, jitter)
    return rmse(pred, test.raw_outputs()).tolist()


def run_mcmc(
    dataset: Dataset,
    config: RunConfig,
    priors: PriorSpec | None = None,
    test: Dataset | None = None,
    theta0: np.ndarray | None = None,
    free_mask: np.ndarray | None = None,
) -> tuple[PosteriorEnsemble, Trace]:
    """Two-phase chain: width-tuning initialization, then a frozen-width main
    chain at gamma=1 retaining every sweep's theta as an equal-weight sample."""
    if priors is None:
        priors = PriorSpec.default(dataset.d, dataset.m)
    target = PosteriorTarget(dataset, priors, config.kernel_form, config.jitter)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x4D43]))
    state = init_chain(target, rng, theta0, free_mask)
    trace = Trace(n_outputs=dataset.m)
    t0 = time.perf_counter()

    for step in range(config.mcmc_init_steps):
        metropolis_step(state, 1.0, target)
        if (step + 1) % TUNE_EVERY == 0:
            tune_widths(state)

    retained = []
    main_steps = config.mcmc_total_steps - config.mcmc_init_steps
    for step in range(main_steps):
        metropolis_step(state, 1.0, target)
        retained.append(state.theta.copy())
        if (step + 1) % config.trace_every == 0 or step == main_steps - 1:
            trace.add(
                TraceRow(
                    wall_time_s=time.perf_counter() - t0,
                    step_or_gamma=config.mcmc_init_steps + step + 1,
                    ess=None,
                    log_target_mean=state.log_target(1.0).tempered_log_target,
                    factorizations=state.factorizations,
                    rmse=_trace_rmse(
                        dataset, state.theta[None, :], test,
                        config.kernel_form, config.jitter,
                    ),
                )
            )

    ensemble = PosteriorEnsemble.equal_weights(
        np.asarray(retained),
        dataset.d,
        dataset.m,
        provenance={
            "engine": "mcmc",
            "seed": config.seed,
            "schedule": f"steps={config.mcmc_total_steps},init={config.mcmc_init_steps}",
        },
    )
    return ensemble, trace
