"""Per-output covariance blocks and their Cholesky factorizations.

The N x N fill is the hot path inside every Metropolis proposal, so it is
backed by a compiled extension when available; set GPTEMPER_PURE_PYTHON=1
to force the numpy fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _covfill_py
from .data import FORM_ADDITIVE, Dataset, HyperParams
from .errors import NotPositiveDefiniteError

if os.environ.get("GPTEMPER_PURE_PYTHON"):
    _backend = _covfill_py
else:
    try:
        from . import _covfill as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _covfill_py

BACKEND = "compiled" if _backend.__name__.endswith("._covfill") else "pure-python"


def _as_c(x: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(x, dtype=float)


def cov_entry(
    xi: np.ndarray,
    xj: np.ndarray,
    beta: np.ndarray,
    lambda_z: float,
    lambda_s: float,
    lambda_o: float,
    same_point: bool,
    form: str,
) -> float:
    """Single covariance entry; noise precisions apply only when same_point."""
    beta = np.asarray(beta, dtype=float)
    if lambda_z <= 0 or lambda_s <= 0 or lambda_o <= 0 or (beta <= 0).any():
        raise ValueError("hyperparameters must be strictly positive")
    diff2 = (np.asarray(xi, dtype=float) - np.asarray(xj, dtype=float)) ** 2
    if form == FORM_ADDITIVE:
        val = np.exp(-beta * diff2).sum() / lambda_z
    else:
        val = np.exp(-(beta * diff2).sum()) / lambda_z
    if same_point:
        val += 1.0 / lambda_s + 1.0 / lambda_o
    return float(val)


def cov_matrix(
    x: np.ndarray,
    beta: np.ndarray,
    lambda_z: float,
    lambda_s: float,
    lambda_o: float,
    form: str,
) -> np.ndarray:
    """Full train covariance for one output, via the active backend."""
    return _backend.cov_train(
        _as_c(x), _as_c(beta), float(lambda_z), float(lambda_s), float(lambda_o),
        form == FORM_ADDITIVE,
    )


def cross_cov(
    a: np.ndarray, b: np.ndarray, beta: np.ndarray, lambda_z: float, form: str
) -> np.ndarray:
    """Noise-free kernel matrix between two input sets (prediction path)."""
    return _backend.cov_cross(
        _as_c(a), _as_c(b), _as_c(beta), float(lambda_z), form == FORM_ADDITIVE
    )


@dataclass
class CovarianceBlock:
    """One output's covariance with its lower Cholesky factor."""

    matrix: np.ndarray
    cholesky: np.ndarray
    log_det: float
    jitter_used: float

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return scipy.linalg.cho_solve((self.cholesky, True), rhs)


def factorize(matrix: np.ndarray, jitter: float, what: str = "covariance") -> CovarianceBlock:
    """Cholesky with geometric jitter escalation (x10 up to 1e-4 * mean diag)."""
    mean_diag = float(np.mean(np.diag(matrix)))
    max_jitter = 1e-4 * mean_diag
    added = 0.0
    trial = jitter
    while True:
        try:
            chol = scipy.linalg.cholesky(
                matrix + added * np.eye(matrix.shape[0]) if added else matrix,
                lower=True,
            )
            break
        except scipy.linalg.LinAlgError:
            if added >= max_jitter:
                raise NotPositiveDefiniteError(
                    f"{what}: factorization failed at jitter {added:g}"
                ) from None
            added = min(trial, max_jitter)
            trial *= 10.0
    log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return CovarianceBlock(matrix=matrix, cholesky=chol, log_det=log_det, jitter_used=added)


def build_block(
    dataset: Dataset,
    output_index: int,
    params: HyperParams,
    form: str,
    jitter: float,
) -> CovarianceBlock:
    """Build and factorize output `output_index`'s covariance block."""
    k = output_index
    mat = cov_matrix(
        dataset.inputs,
        params.beta[k],
        params.lambda_z[k],
        params.lambda_s[k],
        params.lambda_o,
        form,
    )
    theta_note = f"theta for output {k}: beta={params.beta[k]}, " \
                 f"lambda_z={params.lambda_z[k]:g}, lambda_s={params.lambda_s[k]:g}, " \
                 f"lambda_o={params.lambda_o:g}"
    return factorize(mat, jitter, what=theta_note)
