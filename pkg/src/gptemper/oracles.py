"""Brute-force reference implementations for the test suite only.

These deliberately share no code with the production modules: covariance
matrices are assembled entry by entry with explicit loops, determinants and
inverses come from dense elimination, and posterior moments from tensor-grid
trapezoidal quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, HyperParams


class WidenGridError(Exception):
    """The quadrature grid does not cover enough posterior mass."""


def _dense_entry(xi, xj, beta, lz, ls, lo, same, additive):
    s = 0.0
    if additive:
        for b, a, c in zip(beta, xi, xj):
            s += math.exp(-b * (a - c) ** 2)
        s /= lz
    else:
        e = 0.0
        for b, a, c in zip(beta, xi, xj):
            e += b * (a - c) ** 2
        s = math.exp(-e) / lz
    if same:
        s += 1.0 / ls + 1.0 / lo
    return s


def dense_cov(dataset: Dataset, params: HyperParams, form: str) -> np.ndarray:
    """Explicit full block-diagonal covariance (N*m square)."""
    n, m = dataset.n, dataset.m
    additive = form == "additive-sum"
    sigma = np.zeros((n * m, n * m))
    x = dataset.inputs
    for k in range(m):
        for i in range(n):
            for j in range(n):
                sigma[k * n + i, k * n + j] = _dense_entry(
                    x[i],
                    x[j],
                    params.beta[k],
                    params.lambda_z[k],
                    params.lambda_s[k],
                    params.lambda_o,
                    i == j,
                    additive,
                )
    return sigma


def dense_loglik(dataset: Dataset, params: HyperParams, form: str) -> float:
    """Log-likelihood from the explicit dense covariance: slogdet plus solve."""
    if dataset.n * dataset.m > 200:
        raise ValueError("dense oracle limited to N*m <= 200")
    sigma = dense_cov(dataset, params, form)
    y = dataset.outputs.T.reshape(-1)  # column-stacked outputs
    sign, logdet = np.linalg.slogdet(sigma)
    if sign <= 0:
        raise np.linalg.LinAlgError("singular covariance in dense oracle")
    return float(-0.5 * logdet - 0.5 * y @ np.linalg.solve(sigma, y))


@dataclass
class QuadratureResult:
    means: dict[str, float]
    variances: dict[str, float]
    bounds: dict[str, tuple[float, float]]
    resolution: int
    log_norm_const: float


def quadrature_grid(
    log_post,
    bounds: list[tuple[float, float]],
    resolution: int,
    check_coverage: bool = True,
):
    """Trapezoidal posterior moments over log-space grids of 1 or 2 scalars.

    log_post takes the positive scalar values; integration runs in u = log
    theta with the Jacobian folded in. Returns (means, variances, log-mass)
    per free scalar plus the raw integrand for the coverage check.
    """
    if not 1 <= len(bounds) <= 2:
        raise ValueError("quadrature supports 1 or 2 free scalars")
    grids = [np.linspace(math.log(lo), math.log(hi), resolution) for lo, hi in bounds]
    if len(bounds) == 1:
        u = grids[0]
        logf = np.array([log_post([math.exp(v)]) for v in u]) + u
    else:
        u0, u1 = np.meshgrid(grids[0], grids[1], indexing="ij")
        logf = np.empty_like(u0)
        for i in range(resolution):
            for j in range(resolution):
                logf[i, j] = log_post([math.exp(u0[i, j]), math.exp(u1[i, j])])
        logf += u0 + u1
    peak = logf.max()
    f = np.exp(logf - peak)
    if check_coverage:
        if len(bounds) == 1:
            boundary = max(f[0], f[-1])
        else:
            boundary = max(f[0, :].max(), f[-1, :].max(), f[:, 0].max(), f[:, -1].max())
        if boundary >= 1e-4:
            raise WidenGridError(
                f"boundary density ratio {boundary:.2e} >= 1e-4 of peak; widen bounds"
            )

    def integrate(vals):
        out = vals
        for g in reversed(grids):
            out = np.trapezoid(out, g, axis=-1)
        return float(out)

    mass = integrate(f)
    means, variances = [], []
    for axis, g in enumerate(grids):
        theta_axis = np.exp(g)
        if len(bounds) == 1:
            t = theta_axis
        else:
            t = theta_axis[:, None] if axis == 0 else theta_axis[None, :]
        mu = integrate(f * t) / mass
        var = integrate(f * (t - mu) ** 2) / mass
        means.append(mu)
        variances.append(var)
    return means, variances, peak + math.log(mass)


def quadrature_posterior(
    dataset: Dataset,
    priors,
    free_names: list[str],
    pinned: HyperParams,
    grid_resolution: int,
    bounds: list[tuple[float, float]],
    form: str,
) -> QuadratureResult:
    """Ground-truth posterior moments for 1-2 free scalars, the rest pinned.

    The log posterior is rebuilt here from the dense-covariance likelihood and
    the Gamma prior densities; no production inference code is involved.
    """
    if dataset.n > 10:
        raise ValueError("quadrature oracle limited to N <= 10")
    names = HyperParams.scalar_names(dataset.d, dataset.m)
    idx = [names.index(nm) for nm in free_names]
    base = pinned.to_vector()
    shapes = np.asarray(priors.shapes)
    rates = np.asarray(priors.rates)

    def log_post(free_vals):
        vec = base.copy()
        for i, v in zip(idx, free_vals):
            vec[i] = v
        params = HyperParams.from_vector(vec, dataset.d, dataset.m)
        lp = 0.0
        for a, r, t in zip(shapes, rates, vec):
            lp += a * math.log(r) - math.lgamma(a) + (a - 1) * math.log(t) - r * t
        return dense_loglik(dataset, params, form) + lp

    means, variances, log_mass = quadrature_grid(log_post, bounds, grid_resolution)
    return QuadratureResult(
        means=dict(zip(free_names, means)),
        variances=dict(zip(free_names, variances)),
        bounds=dict(zip(free_names, bounds)),
        resolution=grid_resolution,
        log_norm_const=log_mass,
    )
