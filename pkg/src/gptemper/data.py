"""Core domain types: datasets with normalization, hyperparameter vectors, run configuration."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ColumnError,
    DegenerateColumnError,
    InsufficientDataError,
    ParseError,
)


def hyperparam_count(d: int, m: int) -> int:
    """Number of scalars in the full hyperparameter vector: m*(d+2)+1."""
    if d < 1 or m < 1:
        raise ValueError("d and m must be positive")
    return m * (d + 2) + 1


@dataclass(frozen=True)
class Normalization:
    """Per-column affine transforms fitted on training data.

    Inputs map to [0, 1] via (x - input_shift) / input_scale; outputs are
    standardized via (y - output_shift) / output_scale.
    """

    input_shift: np.ndarray
    input_scale: np.ndarray
    output_shift: np.ndarray
    output_scale: np.ndarray

    def normalize_inputs(self, x: np.ndarray) -> np.ndarray:
        return (x - self.input_shift) / self.input_scale

    def denormalize_inputs(self, x: np.ndarray) -> np.ndarray:
        return x * self.input_scale + self.input_shift

    def normalize_outputs(self, y: np.ndarray) -> np.ndarray:
        return (y - self.output_shift) / self.output_scale

    def denormalize_outputs(self, y: np.ndarray) -> np.ndarray:
        return y * self.output_scale + self.output_shift

    def to_dict(self) -> dict:
        return {
            "input_shift": self.input_shift.tolist(),
            "input_scale": self.input_scale.tolist(),
            "output_shift": self.output_shift.tolist(),
            "output_scale": self.output_scale.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Normalization":
        return cls(
            input_shift=np.asarray(d["input_shift"], dtype=float),
            input_scale=np.asarray(d["input_scale"], dtype=float),
            output_shift=np.asarray(d["output_shift"], dtype=float),
            output_scale=np.asarray(d["output_scale"], dtype=float),
        )


@dataclass(frozen=True)
class Dataset:
    """Immutable training (or held-out) data in normalized space.

    `inputs` is N x d with training inputs scaled to [0, 1] per column;
    `outputs` is N x m standardized per column. The transform record inverts
    both exactly. Held-out splits reuse the training transform, so their
    inputs may fall slightly outside [0, 1].
    """

    inputs: np.ndarray
    outputs: np.ndarray
    input_names: list[str]
    output_names: list[str]
    normalization: Normalization

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]

    @property
    def m(self) -> int:
        return self.outputs.shape[1]

    def raw_inputs(self) -> np.ndarray:
        return self.normalization.denormalize_inputs(self.inputs)

    def raw_outputs(self) -> np.ndarray:
        return self.normalization.denormalize_outputs(self.outputs)

    @classmethod
    def from_raw(
        cls,
        inputs: np.ndarray,
        outputs: np.ndarray,
        input_names: list[str] | None = None,
        output_names: list[str] | None = None,
    ) -> "Dataset":
        """Fit the normalization on `inputs`/`outputs` and build a training set."""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))
        outputs = np.asarray(outputs, dtype=float)
        if outputs.ndim == 1:
            outputs = outputs[:, None]
        if inputs.shape[0] < 2:
            raise InsufficientDataError(
                f"need at least 2 training points, got {inputs.shape[0]}"
            )
        if not (np.isfinite(inputs).all() and np.isfinite(outputs).all()):
            raise ParseError("non-finite entries in data")
        lo = inputs.min(axis=0)
        hi = inputs.max(axis=0)
        scale = hi - lo
        dead = np.nonzero(scale == 0.0)[0]
        if dead.size:
            names = input_names or [f"x{i+1}" for i in range(inputs.shape[1])]
            raise DegenerateColumnError(
                f"input column '{names[dead[0]]}' has zero variance"
            )
        out_mean = outputs.mean(axis=0)
        out_sd = outputs.std(axis=0)
        bad = np.nonzero(out_sd == 0.0)[0]
        if bad.size:
            names = output_names or [f"y{i+1}" for i in range(outputs.shape[1])]
            raise DegenerateColumnError(
                f"output column '{names[bad[0]]}' has zero variance"
            )
        norm = Normalization(lo, scale, out_mean, out_sd)
        return cls(
            inputs=norm.normalize_inputs(inputs),
            outputs=norm.normalize_outputs(outputs),
            input_names=list(
                input_names or [f"x{i+1}" for i in range(inputs.shape[1])]
            ),
            output_names=list(
                output_names or [f"y{i+1}" for i in range(outputs.shape[1])]
            ),
            normalization=norm,
        )

    def held_out(self, raw_inputs: np.ndarray, raw_outputs: np.ndarray) -> "Dataset":
        """Build a test split carrying this training set's transform."""
        raw_inputs = np.atleast_2d(np.asarray(raw_inputs, dtype=float))
        raw_outputs = np.asarray(raw_outputs, dtype=float)
        if raw_outputs.ndim == 1:
            raw_outputs = raw_outputs[:, None]
        return Dataset(
            inputs=self.normalization.normalize_inputs(raw_inputs),
            outputs=self.normalization.normalize_outputs(raw_outputs),
            input_names=self.input_names,
            output_names=self.output_names,
            normalization=self.normalization,
        )


def _read_csv(path: str) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = []
        for irow, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{irow}: expected {len(header)} cells")
            vals = []
            for col, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}:{irow}: column '{col}' value {cell!r} is not numeric"
                    ) from None
                if not np.isfinite(v):
                    raise ParseError(
                        f"{path}:{irow}: column '{col}' value is not finite"
                    )
                vals.append(v)
            rows.append(vals)
    return header, np.asarray(rows, dtype=float).reshape(len(rows), len(header))


def load_dataset(
    path: str,
    output_columns: list[str],
    test_fraction: float = 0.0,
    seed: int = 0,
) -> tuple[Dataset, Dataset | None]:
    """Load a header-row CSV and split into (train, test).

    The split is a seeded uniform draw without replacement; normalization is
    fitted on the training rows only and applied to both splits. Returns
    test=None when test_fraction is 0.
    """
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError("test_fraction must be in [0, 1)")
    header, table = _read_csv(path)
    missing = [c for c in output_columns if c not in header]
    if missing:
        raise ColumnError(f"{path}: missing output column(s) {missing}")
    out_idx = [header.index(c) for c in output_columns]
    in_idx = [i for i in range(len(header)) if i not in out_idx]
    if not in_idx:
        raise ColumnError(f"{path}: no input columns remain")
    x = table[:, in_idx]
    y = table[:, out_idx]
    n = x.shape[0]
    n_test = int(round(n * test_fraction))
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
    perm = rng.permutation(n)
    test_rows = np.sort(perm[:n_test])
    train_rows = np.sort(perm[n_test:])
    if train_rows.size < 2:
        raise InsufficientDataError(
            f"{path}: {train_rows.size} training rows after split"
        )
    input_names = [header[i] for i in in_idx]
    train = Dataset.from_raw(
        x[train_rows], y[train_rows], input_names, list(output_columns)
    )
    test = None
    if n_test:
        test = train.held_out(x[test_rows], y[test_rows])
    return train, test


@dataclass
class HyperParams:
    """The full GP hyperparameter set theta.

    beta is (m, d) inverse squared length-scales; lambda_z and lambda_s are
    per-output signal and noise precisions; lambda_o is the shared
    cross-output noise precision. Flattened order is, per output k:
    beta_k1..beta_kd, lambda_z_k, lambda_s_k; lambda_o last.
    """

    beta: np.ndarray
    lambda_z: np.ndarray
    lambda_s: np.ndarray
    lambda_o: float

    def __post_init__(self):
        self.beta = np.atleast_2d(np.asarray(self.beta, dtype=float))
        self.lambda_z = np.atleast_1d(np.asarray(self.lambda_z, dtype=float))
        self.lambda_s = np.atleast_1d(np.asarray(self.lambda_s, dtype=float))
        vec = self.to_vector()
        if not np.isfinite(vec).all() or (vec <= 0).any():
            raise ValueError("hyperparameters must be positive and finite")

    @property
    def d(self) -> int:
        return self.beta.shape[1]

    @property
    def m(self) -> int:
        return self.beta.shape[0]

    def to_vector(self) -> np.ndarray:
        parts = []
        for k in range(self.beta.shape[0]):
            parts.append(self.beta[k])
            parts.append([self.lambda_z[k], self.lambda_s[k]])
        parts.append([self.lambda_o])
        return np.concatenate(parts)

    @classmethod
    def from_vector(cls, vec: np.ndarray, d: int, m: int) -> "HyperParams":
        vec = np.asarray(vec, dtype=float)
        if vec.size != hyperparam_count(d, m):
            raise ValueError(
                f"expected {hyperparam_count(d, m)} scalars, got {vec.size}"
            )
        beta = np.empty((m, d))
        lz = np.empty(m)
        ls = np.empty(m)
        for k in range(m):
            off = k * (d + 2)
            beta[k] = vec[off : off + d]
            lz[k] = vec[off + d]
            ls[k] = vec[off + d + 1]
        return cls(beta=beta, lambda_z=lz, lambda_s=ls, lambda_o=float(vec[-1]))

    @staticmethod
    def scalar_names(d: int, m: int) -> list[str]:
        names = []
        for k in range(1, m + 1):
            names.extend(f"beta_{k}_{l}" for l in range(1, d + 1))
            names.append(f"lambda_z_{k}")
            names.append(f"lambda_s_{k}")
        names.append("lambda_o")
        return names


GRID = "grid"
ADAPTIVE = "adaptive"

FORM_EXPONENTIATED = "exponentiated-sum"
FORM_ADDITIVE = "additive-sum"


@dataclass
class RunConfig:
    """Sampler settings; defaults mirror the workstation configuration tier."""

    engine: str = "asmc"
    particles: int = 60
    steps_per_gamma: int = 1
    schedule_mode: str = GRID
    grid_count: int = 10
    gamma_grid: list[float] | None = None
    ess_reduction: float = 0.9
    gamma0: float = 0.001
    mcmc_total_steps: int = 5800
    mcmc_init_steps: int = 1000
    seed: int = 0
    workers: int = 1
    kernel_form: str = FORM_EXPONENTIATED
    jitter: float = 1e-8
    trace_every: int = 25

    def __post_init__(self):
        if self.engine not in ("mcmc", "asmc"):
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.particles < 1 or self.steps_per_gamma < 1 or self.workers < 1:
            raise ValueError("particles, steps_per_gamma, workers must be positive")
        if self.schedule_mode not in (GRID, ADAPTIVE):
            raise ValueError(f"unknown schedule mode {self.schedule_mode!r}")
        if self.schedule_mode == GRID and self.gamma_grid is None and self.grid_count < 2:
            raise ValueError("grid count must be >= 2")
        if self.schedule_mode == ADAPTIVE and not 0.0 < self.ess_reduction < 1.0:
            raise ValueError("ess_reduction must be in (0, 1)")
        if not 0.0 < self.gamma0 < 1.0:
            raise ValueError("gamma0 must be in (0, 1)")
        if self.mcmc_init_steps >= self.mcmc_total_steps:
            raise ValueError("mcmc_init_steps must be < mcmc_total_steps")
        if self.kernel_form not in (FORM_EXPONENTIATED, FORM_ADDITIVE):
            raise ValueError(f"unknown kernel form {self.kernel_form!r}")
        if self.jitter <= 0:
            raise ValueError("jitter must be positive")

    def to_dict(self) -> dict:
        return {
            "engine": self.engine,
            "particles": self.particles,
            "steps_per_gamma": self.steps_per_gamma,
            "schedule_mode": self.schedule_mode,
            "grid_count": self.grid_count,
            "gamma_grid": self.gamma_grid,
            "ess_reduction": self.ess_reduction,
            "gamma0": self.gamma0,
            "mcmc_total_steps": self.mcmc_total_steps,
            "mcmc_init_steps": self.mcmc_init_steps,
            "seed": self.seed,
            "workers": self.workers,
            "kernel_form": self.kernel_form,
            "jitter": self.jitter,
            "trace_every": self.trace_every,
        }
