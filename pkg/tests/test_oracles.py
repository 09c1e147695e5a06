import math

import numpy as np
import pytest

from gptemper.data import Dataset, HyperParams, Normalization
from gptemper.errors import NotPositiveDefiniteError
from gptemper.inference import log_likelihood
from gptemper.oracles import (
    WidenGridError,
    dense_cov,
    dense_loglik,
    quadrature_grid,
)


def identity_norm(d, m):
    return Normalization(
        input_shift=np.zeros(d), input_scale=np.ones(d),
        output_shift=np.zeros(m), output_scale=np.ones(m),
    )


def make_dataset(inputs, outputs):
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
    outputs = np.atleast_2d(np.asarray(outputs, dtype=float))
    d, m = inputs.shape[1], outputs.shape[1]
    return Dataset(
        inputs=inputs,
        outputs=outputs,
        input_names=[f"x{i}" for i in range(d)],
        output_names=[f"y{k}" for k in range(m)],
        normalization=identity_norm(d, m),
    )


def test_quadrature_flat_density_mean():
    # density proportional to 1 on theta in [1, e]: mean = (e^2-1)/(2(e-1))
    means, variances, _ = quadrature_grid(
        lambda v: 0.0,
        [(1.0, math.e)],
        4001,
        check_coverage=False,
    )
    expect_mean = (math.e**2 - 1.0) / (2.0 * (math.e - 1.0))
    assert means[0] == pytest.approx(expect_mean, rel=1e-6)
    expect_var = (math.e**3 - 1.0) / (3.0 * (math.e - 1.0)) - expect_mean**2
    assert variances[0] == pytest.approx(expect_var, rel=1e-5)


def test_quadrature_flat_in_log_space_mean():
    # density uniform in u = log theta over [0, 1]: mean of theta = e - 1
    means, _, _ = quadrature_grid(
        lambda v: -math.log(v[0]),  # cancels the built-in log-space Jacobian
        [(1.0, math.e)],
        4001,
        check_coverage=False,
    )
    assert means[0] == pytest.approx(math.e - 1.0, rel=1e-6)


def test_quadrature_symmetric_density_centered():
    mu = 3.0
    means, _, _ = quadrature_grid(
        lambda v: -0.5 * (v[0] - mu) ** 2 / 0.04,
        [(1.0, 5.0)],
        2001,
    )
    assert means[0] == pytest.approx(mu, abs=1e-6)


def test_quadrature_2d_product_density():
    mu0, mu1 = 2.0, 0.5

    def log_post(v):
        return (
            -0.5 * (v[0] - mu0) ** 2 / 0.01
            - 0.5 * (v[1] - mu1) ** 2 / 0.0025
        )

    means, variances, _ = quadrature_grid(log_post, [(1.0, 4.0), (0.1, 1.5)], 601)
    assert means[0] == pytest.approx(mu0, abs=1e-4)
    assert means[1] == pytest.approx(mu1, abs=1e-4)
    assert variances[0] == pytest.approx(0.01, rel=1e-3)
    assert variances[1] == pytest.approx(0.0025, rel=1e-3)


def test_quadrature_coverage_check_fires():
    with pytest.raises(WidenGridError):
        quadrature_grid(lambda v: 0.0, [(1.0, 2.0)], 101)


def test_quadrature_log_norm_const():
    # integral of 1/theta over [1, e^2] is 2
    _, _, log_mass = quadrature_grid(
        lambda v: -2.0 * math.log(v[0]), [(1.0, math.e**2)], 4001,
        check_coverage=False,
    )
    assert log_mass == pytest.approx(math.log(1.0 - math.exp(-2.0)), abs=1e-6)


def test_dense_loglik_near_identity_covariance():
    # beta huge kills correlations, 1/lz + 1/ls + 1/lo = 1e-12 + 0.25 + 0.25 on
    # the diagonal and ~0 off it, so the covariance is ~0.5*I
    rng = np.random.default_rng(0)
    y = rng.standard_normal((6, 1))
    ds = make_dataset(rng.random((6, 1)), y)
    params = HyperParams(
        beta=np.array([[1e12]]), lambda_z=np.array([1e12]),
        lambda_s=np.array([4.0]), lambda_o=4.0,
    )
    expect = -0.5 * 6 * math.log(0.5) - 0.5 * float(np.sum(y**2)) / 0.5
    assert dense_loglik(ds, params, "exponentiated-sum") == pytest.approx(expect, rel=1e-9)


def test_dense_cov_block_diagonal():
    rng = np.random.default_rng(1)
    ds = make_dataset(rng.random((4, 2)), rng.standard_normal((4, 2)))
    params = HyperParams(
        beta=np.array([[1.0, 2.0], [0.5, 0.3]]),
        lambda_z=np.array([1.0, 2.0]),
        lambda_s=np.array([3.0, 4.0]),
        lambda_o=5.0,
    )
    sigma = dense_cov(ds, params, "exponentiated-sum")
    assert sigma.shape == (8, 8)
    assert np.all(sigma[:4, 4:] == 0.0)
    assert np.all(sigma[4:, :4] == 0.0)
    assert np.allclose(sigma, sigma.T)


@pytest.mark.parametrize("form", ["exponentiated-sum", "additive-sum"])
def test_dense_loglik_agrees_with_production(form):
    rng = np.random.default_rng(2)
    for _ in range(5):
        n, d, m = 7, 3, 2
        ds = make_dataset(rng.random((n, d)), rng.standard_normal((n, m)))
        params = HyperParams(
            beta=rng.gamma(1.1, 1.0, (m, d)),
            lambda_z=rng.gamma(1.1, 1.0, m),
            lambda_s=rng.gamma(1.1, 1.0, m),
            lambda_o=float(rng.gamma(1.1, 1.0)),
        )
        oracle = dense_loglik(ds, params, form)
        prod = log_likelihood(ds, params, form, jitter=0.0)
        assert prod == pytest.approx(oracle, rel=1e-10)


def test_dense_oracle_size_cap():
    rng = np.random.default_rng(3)
    ds = make_dataset(rng.random((201, 1)), rng.standard_normal((201, 1)))
    params = HyperParams(
        beta=np.array([[1.0]]), lambda_z=np.array([1.0]),
        lambda_s=np.array([1.0]), lambda_o=1.0,
    )
    with pytest.raises(ValueError):
        dense_loglik(ds, params, "exponentiated-sum")
