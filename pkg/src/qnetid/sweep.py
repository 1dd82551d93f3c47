"""Benchmark sweeps over random quantum-walk networks.

For every cell (d, tau, n~) the harness draws ``trials`` independent
Erdos-Renyi graphs with a uniformly chosen single-node excitation, runs
the full-information identification pipeline, and aggregates the mean
solvability label and the quartiles of the relative reconstruction
error over solvable trials.  Per-trial seeds are derived from the master
seed and the cell key, so any cell (and any single trial) is
reproducible in isolation and cells can run in any order or in
parallel without changing a single record.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .identify import identify_topology
from .netmodel import basis_density, derive_seed, erdos_renyi, is_connected
from .dynamics import sample_trajectory

CSV_HEADER = "d,tau,n_tilde,trials,solvability_mean,eps_median,eps_q1,eps_q3,wall_ms,seed"

#: resampling cap when conditioning on connected graphs
MAX_CONNECTED_DRAWS = 100_000


class ConfigError(ValueError):
    """Invalid sweep configuration; message lists every violation."""


@dataclass(frozen=True)
class SweepConfig:
    """Sweep parameters.  ``validate`` reports all violations at once."""

    seed: int = 0
    d_min: int = 2
    d_max: int = 12
    p_link: float = 0.5
    taus: tuple[float, ...] = (3.0,)
    dt: float = 0.01
    subsamples: tuple[int, ...] = (20, 10, 5, 1)
    trials: int = 100
    hbar: float = 1.0
    rtol: float = 1e-9
    label_rtol: float | None = None
    connected_only: bool = True
    real_coupling: bool = True
    jobs: int = 1
    timing: bool = False

    def n_samples(self, tau: float) -> int:
        return int(round(tau / self.dt))

    @property
    def d_values(self) -> list[int]:
        return list(range(self.d_min, self.d_max + 1))

    def validate(self) -> list[str]:
        errors = []
        if self.d_min < 2:
            errors.append(f"d_min must be >= 2, got {self.d_min}")
        if self.d_max < self.d_min:
            errors.append(f"d_max {self.d_max} is below d_min {self.d_min}")
        if not 0.0 <= self.p_link <= 1.0:
            errors.append(f"p_link must be in [0, 1], got {self.p_link}")
        if self.connected_only and self.p_link == 0.0:
            errors.append("connected_only is impossible with p_link = 0")
        if not self.taus:
            errors.append("at least one tau is required")
        if self.dt <= 0:
            errors.append(f"dt must be positive, got {self.dt}")
        for tau in self.taus:
            if tau <= 0:
                errors.append(f"tau must be positive, got {tau}")
                continue
            if self.dt > 0:
                n = tau / self.dt
                if abs(n - round(n)) > 1e-9 * max(1.0, n) or round(n) < 1:
                    errors.append(f"dt {self.dt} does not divide tau {tau}")
                else:
                    for sub in self.subsamples:
                        if int(round(n)) % sub != 0:
                            errors.append(
                                f"subsample {sub} does not divide n_s = {int(round(n))} "
                                f"(tau = {tau})"
                            )
        if not self.subsamples:
            errors.append("at least one subsample divisor is required")
        if any(s < 1 for s in self.subsamples):
            errors.append("subsample divisors must be positive")
        if self.trials < 1:
            errors.append(f"trials must be >= 1, got {self.trials}")
        if self.hbar <= 0:
            errors.append(f"hbar must be positive, got {self.hbar}")
        if self.rtol <= 0:
            errors.append(f"rtol must be positive, got {self.rtol}")
        if self.label_rtol is not None and self.label_rtol <= 0:
            errors.append(f"label_rtol must be positive when given, got {self.label_rtol}")
        if self.jobs < 1:
            errors.append(f"jobs must be >= 1, got {self.jobs}")
        return errors

    def validated(self) -> "SweepConfig":
        errors = self.validate()
        if errors:
            raise ConfigError("invalid sweep configuration:\n  " + "\n  ".join(errors))
        return self

    def to_json(self) -> dict:
        obj = asdict(self)
        obj["taus"] = list(self.taus)
        obj["subsamples"] = list(self.subsamples)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "SweepConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(obj)
        if "taus" in kwargs:
            kwargs["taus"] = tuple(float(t) for t in kwargs["taus"])
        if "subsamples" in kwargs:
            kwargs["subsamples"] = tuple(int(s) for s in kwargs["subsamples"])
        return cls(**kwargs)

    def override(self, **kwargs) -> "SweepConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        if "taus" in kwargs:
            kwargs["taus"] = tuple(kwargs["taus"])
        if "subsamples" in kwargs:
            kwargs["subsamples"] = tuple(kwargs["subsamples"])
        return replace(self, **kwargs)


@dataclass(frozen=True)
class CellRecord:
    d: int
    tau: float
    n_tilde: int
    trials: int
    solvability_mean: float
    eps_median: float | None
    eps_q1: float | None
    eps_q3: float | None
    wall_ms: int
    seed: int


@dataclass
class SweepResult:
    kind: str
    config: SweepConfig
    records: list[CellRecord] = field(default_factory=list)

    def critical_sizes(self) -> dict[str, dict]:
        """Per-(tau, n~) estimates of where solvability breaks down.

        ``last_full_d`` is the largest d with mean solvability exactly 1;
        ``first_zero_d`` the smallest d where it hits 0 (None if never).
        Both are reported because the transition itself is the only
        well-defined object.
        """
        out: dict[str, dict] = {}
        curves: dict[tuple[float, int], list[CellRecord]] = {}
        for rec in self.records:
            curves.setdefault((rec.tau, rec.n_tilde), []).append(rec)
        for (tau, n_tilde), recs in sorted(curves.items()):
            recs = sorted(recs, key=lambda r: r.d)
            full = [r.d for r in recs if r.solvability_mean == 1.0]
            zero = [r.d for r in recs if r.solvability_mean == 0.0]
            out[f"tau={tau:g},n_tilde={n_tilde}"] = {
                "last_full_d": max(full) if full else None,
                "first_zero_d": min(zero) if zero else None,
            }
        return out


def run_benchmark_trial(
    d: int,
    tau: float,
    subsample: int,
    trial_seed: int,
    cfg: SweepConfig,
) -> tuple[int, float | None]:
    """One seeded network draw, simulation, and identification.

    Returns (solvability label, relative error or None).  The error is
    reported only for solvable trials with a nonzero ground truth.
    """
    rng = np.random.default_rng(trial_seed)
    adjacency = erdos_renyi(d, cfg.p_link, rng)
    if cfg.connected_only:
        draws = 1
        while not is_connected(adjacency):
            draws += 1
            if draws > MAX_CONNECTED_DRAWS:
                raise RuntimeError(
                    f"no connected graph after {MAX_CONNECTED_DRAWS} draws "
                    f"(d={d}, p_link={cfg.p_link})"
                )
            adjacency = erdos_renyi(d, cfg.p_link, rng)
    node = int(rng.integers(1, d + 1))
    rho0 = basis_density(d, node)
    traj = sample_trajectory(adjacency.astype(complex), rho0, tau, cfg.dt, cfg.hbar)
    report = identify_topology(
        traj,
        subsample=subsample,
        hbar=cfg.hbar,
        truth=adjacency,
        rtol=cfg.rtol,
        real_coupling=cfg.real_coupling,
        label_rtol=cfg.label_rtol,
    )
    label = report.solvability
    eps = report.epsilon if label == 1 else None
    return label, eps


def _quartiles(values: list[float]) -> tuple[float | None, float | None, float | None]:
    if not values:
        return None, None, None
    q1, med, q3 = np.percentile(np.asarray(values), [25.0, 50.0, 75.0])
    return float(med), float(q1), float(q3)


def _run_cell(cfg: SweepConfig, d: int, tau: float, subsample: int) -> CellRecord:
    n_tilde = cfg.n_samples(tau) // subsample
    t0 = time.perf_counter()
    # the trial seed is independent of the quadrature resolution, so cells
    # that differ only in n~ see the same networks (paired comparisons)
    seeds = [derive_seed(cfg.seed, d, tau, trial) for trial in range(cfg.trials)]

    def work(seed):
        return run_benchmark_trial(d, tau, subsample, seed, cfg)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(work, seeds))
    else:
        results = [work(s) for s in seeds]

    labels = [r[0] for r in results]
    epses = [r[1] for r in results if r[0] == 1 and r[1] is not None]
    med, q1, q3 = _quartiles(epses)
    wall_ms = int(round(1000.0 * (time.perf_counter() - t0))) if cfg.timing else 0
    return CellRecord(
        d=d,
        tau=tau,
        n_tilde=n_tilde,
        trials=cfg.trials,
        solvability_mean=float(np.mean(labels)),
        eps_median=med,
        eps_q1=q1,
        eps_q3=q3,
        wall_ms=wall_ms,
        seed=cfg.seed,
    )


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _record_row(rec: CellRecord) -> str:
    return ",".join(
        _fmt(v)
        for v in (
            rec.d,
            rec.tau,
            rec.n_tilde,
            rec.trials,
            rec.solvability_mean,
            rec.eps_median,
            rec.eps_q1,
            rec.eps_q3,
            rec.wall_ms,
            rec.seed,
        )
    )


def _config_preamble(kind: str, cfg: SweepConfig) -> str:
    payload = json.dumps({"kind": kind, "config": cfg.to_json()}, sort_keys=True)
    return f"# {payload}\n"


def run_sweep(cfg: SweepConfig, kind: str = "solvability", out_csv=None) -> SweepResult:
    """Run every (d, tau, subsample) cell; optionally stream rows to CSV.

    Rows are flushed per cell, so a failing later cell leaves a valid
    partial CSV behind.
    """
    cfg = cfg.validated()
    result = SweepResult(kind=kind, config=cfg)
    fh = None
    if out_csv is not None:
        fh = open(out_csv, "w", newline="")
        fh.write(_config_preamble(kind, cfg))
        fh.write(CSV_HEADER + "\n")
        fh.flush()
    try:
        for d in cfg.d_values:
            for tau in cfg.taus:
                for sub in sorted(cfg.subsamples, reverse=True):
                    rec = _run_cell(cfg, d, tau, sub)
                    result.records.append(rec)
                    if fh is not None:
                        fh.write(_record_row(rec) + "\n")
                        fh.flush()
    finally:
        if fh is not None:
            fh.close()
    return result


def run_solvability_sweep(cfg: SweepConfig, out_csv=None) -> SweepResult:
    """Mean-solvability benchmark over the configured grid."""
    return run_sweep(cfg, kind="solvability", out_csv=out_csv)


def run_error_sweep(cfg: SweepConfig, out_csv=None) -> SweepResult:
    """Reconstruction-error benchmark; errors are taken on solvable trials."""
    return run_sweep(cfg, kind="error", out_csv=out_csv)


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_config_preamble(result.kind, result.config))
        fh.write(CSV_HEADER + "\n")
        for rec in result.records:
            fh.write(_record_row(rec) + "\n")


def read_sweep_csv(path) -> list[dict]:
    """Parse a sweep CSV back into row dictionaries (floats or None)."""
    path = Path(path)
    rows = []
    with open(path) as fh:
        header = None
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if header != CSV_HEADER.split(","):
                    raise ValueError(f"unexpected sweep CSV header: {line!r}")
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise ValueError(f"malformed sweep CSV row: {line!r}")
            row: dict = {}
            for key, val in zip(header, parts):
                if val == "":
                    row[key] = None
                elif key in ("d", "n_tilde", "trials", "wall_ms", "seed"):
                    row[key] = int(val)
                else:
                    row[key] = float(val)
            rows.append(row)
    if header is None:
        raise ValueError(f"{path} contains no CSV header")
    return rows
