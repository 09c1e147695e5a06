"""Ensemble-averaged GP prediction and RMSE evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, HyperParams
from .kernel import build_block, cross_cov


@dataclass
class PosteriorEnsemble:
    """Weighted hyperparameter samples plus run provenance."""

    thetas: np.ndarray  # (n_samples, n_scalars)
    weights: np.ndarray  # (n_samples,), sums to 1
    d: int
    m: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.thetas = np.atleast_2d(np.asarray(self.thetas, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        if self.thetas.shape[0] == 0:
            raise ValueError("ensemble must be non-empty")
        if not np.isclose(self.weights.sum(), 1.0):
            raise ValueError("weights must sum to 1")

    @classmethod
    def equal_weights(cls, thetas, d, m, provenance=None) -> "PosteriorEnsemble":
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        n = thetas.shape[0]
        return cls(thetas, np.full(n, 1.0 / n), d, m, provenance or {})

    def mean_params(self) -> HyperParams:
        return HyperParams.from_vector(self.weights @ self.thetas, self.d, self.m)


@dataclass
class Prediction:
    """Predictive mean and variance per test point and output, original units."""

    mean: np.ndarray
    variance: np.ndarray


def predict(
    train: Dataset,
    ensemble: PosteriorEnsemble,
    test_inputs: np.ndarray,
    form: str,
    jitter: float,
) -> Prediction:
    """Bayesian-model-averaged GP predictive at normalized test inputs.

    Per theta and output: mean = k*' Sigma^{-1} y, var = k** - k*' Sigma^{-1} k*
    plus the observation noise 1/lambda_s + 1/lambda_o; the ensemble mixture
    combines them by the law of total variance. Outputs are mapped back to
    original units.
    """
    test_inputs = np.atleast_2d(np.asarray(test_inputs, dtype=float))
    nt = test_inputs.shape[0]
    m = train.m
    mix_mean = np.zeros((nt, m))
    mix_sq = np.zeros((nt, m))  # E[var + mean^2]
    for theta, w in zip(ensemble.thetas, ensemble.weights):
        params = HyperParams.from_vector(theta, train.d, train.m)
        for k in range(m):
            block = build_block(train, k, params, form, jitter)
            y = train.outputs[:, k]
            ks = cross_cov(test_inputs, train.inputs, params.beta[k], params.lambda_z[k], form)
            alpha = block.solve(y)
            mean_k = ks @ alpha
            v = block.solve(ks.T)
            prior_var = 1.0 / params.lambda_z[k]
            if form == "additive-sum":
                prior_var *= train.d
            var_k = (
                prior_var
                - np.einsum("ij,ji->i", ks, v)
                + 1.0 / params.lambda_s[k]
                + 1.0 / params.lambda_o
            )
            var_k = np.maximum(var_k, 1e-300)
            mix_mean[:, k] += w * mean_k
            mix_sq[:, k] += w * (var_k + mean_k**2)
    mix_var = np.maximum(mix_sq - mix_mean**2, 1e-300)
    norm = train.normalization
    return Prediction(
        mean=norm.denormalize_outputs(mix_mean),
        variance=mix_var * norm.output_scale**2,
    )


def rmse(prediction: Prediction, test_outputs: np.ndarray) -> np.ndarray:
    """Per-output root mean squared error in original units."""
    test_outputs = np.asarray(test_outputs, dtype=float)
    if test_outputs.ndim == 1:
        test_outputs = test_outputs[:, None]
    if test_outputs.shape != prediction.mean.shape:
        raise ValueError(
            f"shape mismatch: predictions {prediction.mean.shape}, "
            f"outputs {test_outputs.shape}"
        )
    return np.sqrt(np.mean((prediction.mean - test_outputs) ** 2, axis=0))
