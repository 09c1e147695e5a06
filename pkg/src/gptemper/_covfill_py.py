"""Pure-numpy covariance fills, used when the compiled extension is unavailable."""

import numpy as np


def cov_cross(a, b, beta, lambda_z, additive):
    """Noise-free cross covariance between two input sets."""
    diff2 = (a[:, None, :] - b[None, :, :]) ** 2
    if additive:
        return np.exp(-diff2 * beta).sum(axis=-1) / lambda_z
    return np.exp(-(diff2 * beta).sum(axis=-1)) / lambda_z


def cov_train(x, beta, lambda_z, lambda_s, lambda_o, additive):
    """Symmetric train covariance with noise precisions on the diagonal."""
    k = cov_cross(x, x, beta, lambda_z, additive)
    n = x.shape[0]
    k[np.diag_indices(n)] += 1.0 / lambda_s + 1.0 / lambda_o
    return k
