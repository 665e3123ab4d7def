"""Experiment drivers behind the CLI: convergence traces, SNR sweeps, and
one-shot MI evaluation of a stored precoder.

The SNR convention is snr_db = 10*log10(ps) with unit noise variance and
ps = pr.  Every sweep point derives its seed from (root seed, point index,
method index), so results do not depend on scheduling or worker count, and
repeated runs with the same config are byte-identical on disk.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import RelayNetworkParams, effective_channel, select_relay
from .constellation import SymbolSpace, build_symbol_space, parse_constellation_name
from .fileio import read_precoder_matrix, write_csv, write_json
from .infotheory import derive_seed, mutual_information_oracle
from .optimizer import (
    BarrierConfig,
    OptimizerConfig,
    OptimizerReport,
    direct_gradient_baseline,
    gaussian_waterfilling_baseline,
    optimize_two_step,
)

__all__ = [
    "ExperimentConfig",
    "SweepRow",
    "build_config",
    "run_convergence",
    "run_sweep",
    "mi_eval",
    "snr_at_level",
]

METHOD_TWO_STEP = "two-step"
METHOD_GRADIENT = "gradient"
METHOD_NO_PRECODING = "no-precoding"
METHOD_WATERFILLING = "waterfilling"

BASELINE_CHOICES = (METHOD_NO_PRECODING, METHOD_WATERFILLING, METHOD_GRADIENT)

# Fixed per-method substream indices; part of the determinism contract.
_METHOD_STREAM = {
    METHOD_TWO_STEP: 0,
    METHOD_NO_PRECODING: 1,
    METHOD_WATERFILLING: 2,
    METHOD_GRADIENT: 3,
}

CONVERGENCE_COLUMNS = ["iter", "method", "bits_per_use", "std_err", "phase"]
SWEEP_COLUMNS = ["snr_db", "method", "bits_per_use", "std_err", "iterations"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment description; defaults reproduce the reference
    single-relay network (h0 = 0.4, relay (1.2, -0.9j), BPSK, L = 1, 3 dB)."""

    h_direct: complex = 0.4 + 0.0j
    relays: tuple[tuple[complex, complex], ...] = ((1.2 + 0.0j, -0.9j),)
    relay: int | None = None  # None = pick by the capacity proxy
    constellation: str = "bpsk"
    block_length: int = 1
    snr_grid_db: tuple[float, ...] = (3.0,)
    seed: int = 1234
    n_opt_samples: int = 2000
    n_report_samples: int = 100_000
    baselines: tuple[str, ...] = (METHOD_NO_PRECODING, METHOD_WATERFILLING)
    barrier: BarrierConfig = BarrierConfig()
    max_outer_rounds: int = 20
    outer_tol_std_errs: float = 1.0
    max_gradient_iters: int = 100
    rotation_start: str = "haar"
    workers: int = 1

    def __post_init__(self):
        if len(self.snr_grid_db) == 0:
            raise ValueError("snr_grid_db must not be empty")
        if not np.all(np.isfinite(self.snr_grid_db)):
            raise ValueError("snr_grid_db entries must be finite")
        for name in self.baselines:
            if name not in BASELINE_CHOICES:
                raise ValueError(f"unknown baseline {name!r}; choose from {BASELINE_CHOICES}")
        if self.relay is not None and not 0 <= self.relay < len(self.relays):
            raise ValueError(f"relay index {self.relay} out of range")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        parse_constellation_name(self.constellation)  # fail fast on bad names

    def space(self) -> SymbolSpace:
        return build_symbol_space(
            parse_constellation_name(self.constellation), self.block_length
        )

    def network(self, snr_db: float) -> RelayNetworkParams:
        power = float(10.0 ** (snr_db / 10.0))
        return RelayNetworkParams(
            h_direct=self.h_direct,
            relays=self.relays,
            ps=power,
            pr=power,
            block_length=self.block_length,
        )

    def channel(self, snr_db: float):
        params = self.network(snr_db)
        relay = self.relay if self.relay is not None else select_relay(params)
        return effective_channel(params, relay)

    def opt_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            barrier=self.barrier,
            max_outer_rounds=self.max_outer_rounds,
            outer_tol_std_errs=self.outer_tol_std_errs,
            n_opt_samples=self.n_opt_samples,
            n_report_samples=self.n_report_samples,
            max_gradient_iters=self.max_gradient_iters,
            rotation_start=self.rotation_start,
        )

    def as_dict(self) -> dict:
        return {
            "h_direct": _complex_str(self.h_direct),
            "relays": [[_complex_str(h), _complex_str(g)] for h, g in self.relays],
            "relay": self.relay,
            "constellation": self.constellation,
            "block_length": self.block_length,
            "snr_grid_db": list(self.snr_grid_db),
            "seed": self.seed,
            "n_opt_samples": self.n_opt_samples,
            "n_report_samples": self.n_report_samples,
            "baselines": list(self.baselines),
            "barrier": {
                "t0": self.barrier.t0,
                "alpha": self.barrier.alpha,
                "epsilon": self.barrier.epsilon,
                "grad_tol": self.barrier.grad_tol,
                "max_inner_iters": self.barrier.max_inner_iters,
            },
            "max_outer_rounds": self.max_outer_rounds,
            "outer_tol_std_errs": self.outer_tol_std_errs,
            "max_gradient_iters": self.max_gradient_iters,
            "rotation_start": self.rotation_start,
            "workers": self.workers,
        }

    def config_hash(self) -> str:
        canonical = json.dumps(self.as_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class SweepRow:
    """One (SNR, method) result; wall_time_s goes to the JSON report only."""

    snr_db: float
    method: str
    bits_per_use: float
    std_err: float
    iterations: int
    wall_time_s: float

    def as_dict(self) -> dict:
        return {
            "snr_db": self.snr_db,
            "method": self.method,
            "bits_per_use": self.bits_per_use,
            "std_err": self.std_err,
            "iterations": self.iterations,
            "wall_time_s": self.wall_time_s,
        }


def _complex_str(z: complex) -> str:
    z = complex(z)
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}j"


def _parse_bool(text: str) -> bool:
    token = text.strip().lower()
    if token in ("true", "yes", "1", "on"):
        return True
    if token in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"cannot parse boolean from {text!r}")


def _parse_relays(file_values: dict[str, str]) -> tuple[tuple[complex, complex], ...]:
    from .fileio import parse_complex

    indexed: dict[int, tuple[complex, complex]] = {}
    for key, value in file_values.items():
        if not key.startswith("relay") or not key[5:].isdigit():
            continue
        index = int(key[5:])
        parts = value.split(",")
        if len(parts) != 2:
            raise ValueError(
                f"config key {key!r} must hold 'h, g' (two complex numbers), got {value!r}"
            )
        indexed[index] = (parse_complex(parts[0]), parse_complex(parts[1]))
    if not indexed:
        return ()
    expected = list(range(1, len(indexed) + 1))
    if sorted(indexed) != expected:
        raise ValueError(f"relay keys must be relay1..relay{len(indexed)}, got {sorted(indexed)}")
    return tuple(indexed[i] for i in expected)


def build_config(file_values: dict[str, str] | None = None, **overrides) -> ExperimentConfig:
    """Assemble an ExperimentConfig from raw file values plus typed overrides.

    File keys mirror the dataclass fields (h0, relay1.., relay, constellation,
    block_length, snr_db, seed, opt_samples, report_samples, baselines,
    t0, alpha, epsilon, grad_tol, max_inner, max_rounds, outer_tol_std_errs,
    max_gradient_iters, rotation_start, workers).  Overrides with value
    None are ignored, so CLI flags can be passed through unconditionally.
    """
    from .fileio import parse_complex

    kwargs: dict = {}
    barrier_kwargs: dict = {}
    if file_values:
        known_scalar = {
            "h0": ("h_direct", parse_complex),
            "relay": ("relay", lambda v: None if v.strip().lower() == "auto" else int(v)),
            "constellation": ("constellation", str),
            "block_length": ("block_length", int),
            "l": ("block_length", int),
            "snr_db": (
                "snr_grid_db",
                lambda v: tuple(float(x) for x in v.split(",") if x.strip()),
            ),
            "seed": ("seed", int),
            "opt_samples": ("n_opt_samples", int),
            "report_samples": ("n_report_samples", int),
            "baselines": (
                "baselines",
                lambda v: tuple(x.strip() for x in v.split(",") if x.strip()),
            ),
            "max_rounds": ("max_outer_rounds", int),
            "outer_tol_std_errs": ("outer_tol_std_errs", float),
            "max_gradient_iters": ("max_gradient_iters", int),
            "rotation_start": ("rotation_start", str),
            "workers": ("workers", int),
        }
        known_barrier = {
            "t0": ("t0", float),
            "alpha": ("alpha", float),
            "epsilon": ("epsilon", float),
            "grad_tol": ("grad_tol", float),
            "max_inner": ("max_inner_iters", int),
        }
        relays = _parse_relays(file_values)
        if relays:
            kwargs["relays"] = relays
        for key, value in file_values.items():
            if key.startswith("relay") and key[5:].isdigit():
                continue
            if key in known_scalar:
                name, cast = known_scalar[key]
                kwargs[name] = cast(value)
            elif key in known_barrier:
                name, cast = known_barrier[key]
                barrier_kwargs[name] = cast(value)
            else:
                raise ValueError(f"unknown config key {key!r}")
    if barrier_kwargs:
        kwargs["barrier"] = BarrierConfig(**barrier_kwargs)

    for key, value in overrides.items():
        if value is not None:
            kwargs[key] = value
    return ExperimentConfig(**kwargs)


# ---------------------------------------------------------------------------
# drivers


def run_convergence(
    config: ExperimentConfig, out_csv: str | Path | None = None
) -> tuple[list[tuple], list[OptimizerReport]]:
    """Run the two-step method and the direct-gradient baseline at one SNR,
    recording per-iteration MI traces plus a reporting-grade final row each.

    Returns (csv rows, reports); writes CSV and a JSON report when out_csv
    is given.
    """
    space = config.space()
    chan = config.channel(config.snr_grid_db[0])
    opt_cfg = config.opt_config()

    reports: list[OptimizerReport] = []
    timings: dict[str, float] = {}
    for method in (METHOD_TWO_STEP, METHOD_GRADIENT):
        seed = derive_seed(config.seed, _METHOD_STREAM[method])
        start = time.perf_counter()
        if method == METHOD_TWO_STEP:
            report = optimize_two_step(chan, space, opt_cfg, seed)
        else:
            report = direct_gradient_baseline(chan, space, opt_cfg, seed)
        timings[method] = time.perf_counter() - start
        reports.append(report)

    rows: list[tuple] = []
    for report in reports:
        for point in report.trace:
            rows.append(
                (point.index, report.method, point.bits_per_use, point.std_err, point.phase)
            )
        rows.append(
            (
                len(report.trace),
                report.method,
                report.final_mi.bits_per_use,
                report.final_mi.std_err,
                "final",
            )
        )

    if out_csv is not None:
        out_csv = Path(out_csv)
        write_csv(out_csv, CONVERGENCE_COLUMNS, rows, _metadata_comments(config))
        payload = {
            "command": "convergence",
            "config": config.as_dict(),
            "config_hash": config.config_hash(),
            "wall_time_s": timings,
            "reports": [report.to_dict() for report in reports],
        }
        write_json(out_csv.with_suffix(".json"), payload)
    return rows, reports


def _metadata_comments(config: ExperimentConfig) -> list[str]:
    return [
        f"config_hash={config.config_hash()}",
        f"seed={config.seed}",
        f"n_opt_samples={config.n_opt_samples}",
        f"n_report_samples={config.n_report_samples}",
        f"constellation={config.constellation}",
        f"snr_grid_db={','.join(repr(float(s)) for s in config.snr_grid_db)}",
    ]


def _sweep_point(config: ExperimentConfig, snr_index: int, method: str) -> SweepRow:
    snr_db = float(config.snr_grid_db[snr_index])
    space = config.space()
    chan = config.channel(snr_db)
    seed = derive_seed(config.seed, snr_index, _METHOD_STREAM[method])
    start = time.perf_counter()

    if method == METHOD_TWO_STEP:
        report = optimize_two_step(chan, space, config.opt_config(), seed)
        bits, err = report.final_mi.bits_per_use, report.final_mi.std_err
        iterations = len(report.trace)
    elif method == METHOD_GRADIENT:
        report = direct_gradient_baseline(chan, space, config.opt_config(), seed)
        bits, err = report.final_mi.bits_per_use, report.final_mi.std_err
        iterations = report.rounds
    elif method == METHOD_NO_PRECODING:
        eye = np.eye(space.dim, dtype=np.complex128)
        est = mutual_information_oracle(chan.H, eye, space, config.n_report_samples, seed)
        bits, err = est.bits_per_use, est.std_err
        iterations = 0
    elif method == METHOD_WATERFILLING:
        precoder = gaussian_waterfilling_baseline(chan)
        est = mutual_information_oracle(
            chan.H, precoder.matrix(), space, config.n_report_samples, seed
        )
        bits, err = est.bits_per_use, est.std_err
        iterations = 0
    else:
        raise ValueError(f"unknown method {method!r}")

    return SweepRow(
        snr_db=snr_db,
        method=method,
        bits_per_use=bits,
        std_err=err,
        iterations=iterations,
        wall_time_s=time.perf_counter() - start,
    )


def run_sweep(config: ExperimentConfig, out_csv: str | Path | None = None) -> list[SweepRow]:
    """Sweep (SNR grid) x (two-step + configured baselines).

    Points may run in a process pool (config.workers); results are sorted by
    (snr_db, method) before writing, so output never depends on scheduling.
    """
    methods = (METHOD_TWO_STEP,) + tuple(config.baselines)
    tasks = [(i, m) for i in range(len(config.snr_grid_db)) for m in methods]

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_sweep_point_star, [(config, i, m) for i, m in tasks]))
    else:
        rows = [_sweep_point(config, i, m) for i, m in tasks]

    rows.sort(key=lambda r: (r.snr_db, r.method))
    if out_csv is not None:
        out_csv = Path(out_csv)
        csv_rows = [
            (r.snr_db, r.method, r.bits_per_use, r.std_err, r.iterations) for r in rows
        ]
        write_csv(out_csv, SWEEP_COLUMNS, csv_rows, _metadata_comments(config))
        payload = {
            "command": "sweep",
            "config": config.as_dict(),
            "config_hash": config.config_hash(),
            "rows": [r.as_dict() for r in rows],
        }
        write_json(out_csv.with_suffix(".json"), payload)
    return rows


def _sweep_point_star(args) -> SweepRow:
    return _sweep_point(*args)


def mi_eval(config: ExperimentConfig, precoder_path: str | Path) -> dict:
    """Evaluate reporting-grade MI for a precoder stored in the text format.

    Validates dimensions against the configured symbol space and the power
    budget Tr(P P^H) <= 2L before spending any samples.
    """
    space = config.space()
    matrix = read_precoder_matrix(precoder_path)
    d = space.dim
    if matrix.shape != (d, d):
        raise ValueError(
            f"precoder is {matrix.shape[0]}x{matrix.shape[1]} but the configured "
            f"symbol space needs {d}x{d}"
        )
    power = float(np.real(np.vdot(matrix, matrix)))
    if power > d + 1e-9:
        raise ValueError(f"precoder power Tr(PP^H) = {power:.12f} exceeds the budget {d}")

    snr_db = float(config.snr_grid_db[0])
    chan = config.channel(snr_db)
    est = mutual_information_oracle(chan.H, matrix, space, config.n_report_samples, config.seed)
    return {
        "bits_per_use": est.bits_per_use,
        "std_err": est.std_err,
        "n_samples": est.n_samples,
        "seed": est.seed,
        "snr_db": snr_db,
        "power": power,
        "budget": d,
        "config_hash": config.config_hash(),
    }


def snr_at_level(
    snr_grid_db: np.ndarray, bits_per_use: np.ndarray, level: float
) -> float:
    """SNR (dB) where a monotone MI-vs-SNR curve crosses `level`, by linear
    interpolation between grid points.  Raises ValueError when unbracketed."""
    snr = np.asarray(snr_grid_db, dtype=np.float64)
    mi = np.asarray(bits_per_use, dtype=np.float64)
    if snr.shape != mi.shape or snr.ndim != 1 or snr.size < 2:
        raise ValueError("need matching 1-D grids with at least two points")
    for i in range(snr.size - 1):
        lo, hi = mi[i], mi[i + 1]
        if lo == level:
            return float(snr[i])
        if (lo - level) * (hi - level) < 0 or hi == level:
            return float(snr[i] + (level - lo) * (snr[i + 1] - snr[i]) / (hi - lo))
    raise ValueError(f"MI curve never crosses {level} on the given grid")
