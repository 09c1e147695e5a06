"""Fully Bayesian GP surrogate training with MCMC and tempered SMC engines."""

__version__ = "0.1.0"

from .data import Dataset, HyperParams, RunConfig, hyperparam_count, load_dataset
from .inference import PriorSpec, log_likelihood, log_prior, tempered_log_target
from .kernel import BACKEND, CovarianceBlock, build_block, cov_entry
from .mcmc import ChainState, metropolis_step, run_mcmc, tune_widths
from .predict import PosteriorEnsemble, Prediction, predict, rmse
from .smc import Particle, TemperSchedule, ess, next_gamma_adaptive, resample, reweight, run_asmc

__all__ = [
    "BACKEND",
    "ChainState",
    "CovarianceBlock",
    "Dataset",
    "HyperParams",
    "Particle",
    "PosteriorEnsemble",
    "Prediction",
    "PriorSpec",
    "RunConfig",
    "TemperSchedule",
    "build_block",
    "cov_entry",
    "ess",
    "hyperparam_count",
    "load_dataset",
    "log_likelihood",
    "log_prior",
    "metropolis_step",
    "next_gamma_adaptive",
    "predict",
    "resample",
    "reweight",
    "rmse",
    "run_asmc",
    "run_mcmc",
    "tempered_log_target",
    "tune_widths",
    "__version__",
]
