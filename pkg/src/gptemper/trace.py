"""Run traces: one row per recorded step/temperature, CSV round-trip."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field


@dataclass
class TraceRow:
    wall_time_s: float
    step_or_gamma: float
    ess: float | None
    log_target_mean: float
    factorizations: int
    rmse: list[float] | None = None


@dataclass
class Trace:
    n_outputs: int
    rows: list[TraceRow] = field(default_factory=list)

    def add(self, row: TraceRow) -> None:
        if self.rows:
            prev = self.rows[-1]
            if row.wall_time_s < prev.wall_time_s or row.factorizations < prev.factorizations:
                raise ValueError("trace rows must be non-decreasing in time and cost")
        self.rows.append(row)

    @property
    def total_factorizations(self) -> int:
        return self.rows[-1].factorizations if self.rows else 0

    def final_rmse(self) -> list[float] | None:
        for row in reversed(self.rows):
            if row.rmse is not None:
                return row.rmse
        return None

    def columns(self) -> list[str]:
        return (
            ["wall_time_s", "step_or_gamma", "ess", "log_target_mean", "factorizations"]
            + [f"rmse_{k+1}" for k in range(self.n_outputs)]
        )

    def write_csv(self, path: str) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns())
            for r in self.rows:
                rmse = r.rmse if r.rmse is not None else [""] * self.n_outputs
                w.writerow(
                    [
                        f"{r.wall_time_s:.6f}",
                        repr(float(r.step_or_gamma)),
                        "" if r.ess is None else repr(float(r.ess)),
                        repr(float(r.log_target_mean)),
                        r.factorizations,
                        *[v if v == "" else repr(float(v)) for v in rmse],
                    ]
                )


def read_trace_csv(path: str) -> Trace:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rmse_cols = [i for i, c in enumerate(header) if c.startswith("rmse_")]
        trace = Trace(n_outputs=len(rmse_cols))
        for row in reader:
            rmse = [row[i] for i in rmse_cols]
            trace.add(
                TraceRow(
                    wall_time_s=float(row[0]),
                    step_or_gamma=float(row[1]),
                    ess=float(row[2]) if row[2] != "" else None,
                    log_target_mean=float(row[3]),
                    factorizations=int(row[4]),
                    rmse=None if any(v == "" for v in rmse) else [float(v) for v in rmse],
                )
            )
    return trace
