from types import SimpleNamespace

import numpy as np
import pytest

from gptemper.data import Dataset, HyperParams
from gptemper.inference import PriorSpec

# Verdict lines collected by the acceptance tests; echoed after the run so
# they survive pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def pinned_problem():
    """1-D, N=5 problem with lambda_z and lambda_o pinned; beta and lambda_s free.

    Small enough for grid quadrature, informative enough that both samplers
    must actually move to match it.
    """
    x = np.linspace(0.0, 1.0, 5)
    y = np.sin(2 * np.pi * x * 0.9) + 0.05 * np.cos(9 * x)
    dataset = Dataset.from_raw(x[:, None], y)
    pinned = HyperParams(beta=[[1.0]], lambda_z=[1.0], lambda_s=[1.0], lambda_o=1e4)
    return SimpleNamespace(
        dataset=dataset,
        priors=PriorSpec.default(1, 1),
        pinned=pinned,
        free_mask=np.array([True, False, True, False]),
        free_names=["beta_1_1", "lambda_s_1"],
        free_idx=[0, 2],
        bounds=[(1e-5, 1e5), (1e-5, 1e5)],
        form="exponentiated-sum",
    )


def random_params(rng: np.random.Generator, d: int, m: int) -> HyperParams:
    n = m * (d + 2) + 1
    return HyperParams.from_vector(rng.gamma(1.1, 1.0, n), d, m)


def make_dataset(rng: np.random.Generator, n: int, d: int, m: int) -> Dataset:
    x = rng.random((n, d))
    y = rng.standard_normal((n, m))
    return Dataset.from_raw(x, y)
