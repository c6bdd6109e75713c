"""
Monte-Carlo SNR sweep comparing the filter against its baselines.

Every (SNR, trial) cell draws one noise realization, seeded with
``seed + trial`` so all SNR points share the same underlying draws, and
runs each method on it.  Errors are measured against the clean signal over
the samples that keep an embedding row under the configured ``m``; the
envelope is measured on that same prefix.  Cells are independent and may
run on a thread pool; results are stored by position, so output does not
depend on scheduling.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import adaptive_filter, boxcar
from .embed import SampleSeries
from .errors import DegenerateEnvelopeError, InvalidParameterError
from .filter import PhaseOracle, oracle_phase_average, qplpf_series, series_flags
from .metrics import envelope_variability, rms_error
from .synth import (
    NoiseSpec,
    awgn,
    lfm_chirp,
    lfm_phase,
    periodic_sine,
    periodic_sine_phase,
    signal_power,
    snr_to_sigma,
)

METHODS = ("qplpf", "boxcar", "adaptive", "oracle")


@dataclass(frozen=True)
class SweepConfig:
    m: int = 49
    S: int = 10
    boxcar_k: int = 11
    est_window: int = 50
    signal: str = "chirp"
    fs: float = 50.0
    t_end: float = 10.0
    period: int = 50
    n_periods: int = 12


@dataclass
class SweepResult:
    snr_db: list
    methods: list
    rms: np.ndarray        # (n_snr, n_methods, trials)
    envelope: np.ndarray   # (n_snr, n_methods, trials)
    sigma: list = field(default_factory=list)

    def summary(self, metric: str) -> list:
        """Rows ``(snr_db, method, median, q25, q75)`` in sweep order."""
        data = self.rms if metric == "rms" else self.envelope
        rows = []
        for i, snr in enumerate(self.snr_db):
            for j, method in enumerate(self.methods):
                vals = data[i, j]
                if np.all(np.isnan(vals)):
                    q25 = med = q75 = math.nan
                else:
                    q25, med, q75 = np.nanquantile(vals, [0.25, 0.5, 0.75])
                rows.append((snr, method, float(med), float(q25), float(q75)))
        return rows

    def median(self, metric: str, method: str) -> np.ndarray:
        data = self.rms if metric == "rms" else self.envelope
        return np.nanmedian(data[:, self.methods.index(method)], axis=1)


def thread_count(requested: int | None = None) -> int:
    """Worker count: ``requested`` or all cores, capped by ``QPLPF_THREADS``."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("QPLPF_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def clean_signal(config: SweepConfig) -> tuple:
    """Noiseless test signal and its true phase."""
    if config.signal == "chirp":
        s = lfm_chirp(config.fs, config.t_end)
        return s, lfm_phase(s.times)
    if config.signal == "sine":
        s = periodic_sine(config.period, config.n_periods)
        return s, periodic_sine_phase(config.period, config.n_periods)
    raise InvalidParameterError(f"unknown signal {config.signal!r}")


def apply_method(method: str, noisy: SampleSeries, phase, config: SweepConfig) -> SampleSeries:
    if method == "qplpf":
        return qplpf_series(noisy, config.m, config.S)
    if method == "boxcar":
        return boxcar(noisy, config.boxcar_k)
    if method == "adaptive":
        return adaptive_filter(noisy, config.est_window)
    if method == "oracle":
        return noisy.with_values(oracle_phase_average(noisy.values, PhaseOracle(phase), config.S))
    raise InvalidParameterError(f"unknown method {method!r}")


def _safe_envelope(series: SampleSeries) -> float:
    try:
        return envelope_variability(series)
    except DegenerateEnvelopeError:
        return math.nan


def run_sweep(snr_db, trials: int, seed: int = 0, methods=METHODS,
              config: SweepConfig = SweepConfig(), threads: int | None = None) -> SweepResult:
    methods = list(methods)
    if not methods:
        raise InvalidParameterError("at least one method is required")
    for method in methods:
        if method not in METHODS:
            raise InvalidParameterError(f"unknown method {method!r}")
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    snr_db = [float(s) for s in snr_db]
    clean, phase = clean_signal(config)
    n = len(clean)
    power = signal_power(clean.values)
    sigmas = [snr_to_sigma(s, power) for s in snr_db]
    flagged = series_flags(n, config.m)
    keep = n - flagged.size

    def cell(i: int, t: int):
        noise = awgn(n, NoiseSpec(sigmas[i], seed + t))
        noisy = clean.with_values(clean.values + noise)
        rms, env = [], []
        for method in methods:
            out = apply_method(method, noisy, phase, config)
            rms.append(rms_error(out.values, clean.values, flagged))
            env.append(_safe_envelope(SampleSeries(out.start_time, out.dt, out.values[:keep])))
        return i, t, rms, env

    shape = (len(snr_db), len(methods), trials)
    rms_arr, env_arr = np.empty(shape), np.empty(shape)
    jobs = [(i, t) for i in range(len(snr_db)) for t in range(trials)]
    workers = thread_count(threads)
    if workers == 1:
        results = [cell(i, t) for i, t in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: cell(*job), jobs))
    for i, t, rms, env in results:
        rms_arr[i, :, t] = rms
        env_arr[i, :, t] = env
    return SweepResult(snr_db, methods, rms_arr, env_arr, sigmas)
