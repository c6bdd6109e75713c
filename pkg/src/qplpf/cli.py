"""Command-line entry point: ``qplpf synth|filter|sweep|pca|spectrum``."""

from __future__ import annotations

import json
import math
import time
from pathlib import Path

import click
import numpy as np

from . import io as qio
from .analysis import pca
from .baselines import adaptive_filter, boxcar
from .embed import GridImage, consecutive_delays, embed_series
from .errors import QPLPFError
from .filter import (
    PhaseOracle,
    oracle_phase_average,
    run_qplpf_image,
    run_qplpf_series,
)
from .metrics import spectrum2d
from .svg import line_plot
from .sweep import METHODS, SweepConfig, run_sweep
from .synth import (
    NoiseSpec,
    awgn,
    lfm_chirp,
    periodic_sine,
    signal_power,
    snr_to_sigma,
    warped_sine_image,
)

SNR_AXIS = "SNR (dB, mean signal power / noise variance)"


def _fail(exc: Exception):
    raise click.ClickException(str(exc))


def _load_config(ctx, _param, value):
    if value is None:
        return None
    try:
        with open(value) as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as exc:
        raise click.BadParameter(f"cannot load config: {exc}")
    if not isinstance(cfg, dict):
        raise click.BadParameter("config must be a JSON object")
    commands = ("synth", "filter", "sweep", "pca", "spectrum")
    flat = {k: v for k, v in cfg.items() if k not in commands}
    ctx.default_map = {c: {**flat, **cfg.get(c, {})} for c in commands}
    return value


@click.group()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), callback=_load_config,
              is_eager=True, expose_value=False,
              help="JSON file of option defaults (flat, or keyed by command name).")
def main():
    """Quasiperiodic low pass filter toolkit."""


@main.command()
@click.argument("kind", type=click.Choice(["chirp", "sine", "image"]))
@click.option("--fs", type=float, default=50.0, show_default=True, help="Chirp sample rate [Hz].")
@click.option("--t-end", type=float, default=10.0, show_default=True, help="Chirp end time [s].")
@click.option("--period", type=int, default=50, show_default=True, help="Sine period [samples].")
@click.option("--n-periods", type=int, default=10, show_default=True)
@click.option("--width", type=int, default=100, show_default=True)
@click.option("--height", type=int, default=100, show_default=True)
@click.option("--a", type=float, default=0.05, show_default=True)
@click.option("--b", type=float, default=0.03, show_default=True)
@click.option("--c", type=float, default=0.0005, show_default=True)
@click.option("--snr-db", type=float, default=None, help="Add white Gaussian noise at this SNR.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def synth(kind, fs, t_end, period, n_periods, width, height, a, b, c, snr_db, seed, out):
    """Write a synthetic chirp, sine (CSV) or warped-sine image (PGM)."""
    params = {"kind": kind, "snr_db": snr_db, "seed": seed}
    try:
        if kind == "chirp":
            clean = lfm_chirp(fs, t_end)
            params.update(fs=fs, t_end=t_end)
        elif kind == "sine":
            clean = periodic_sine(period, n_periods)
            params.update(period=period, n_periods=n_periods)
        else:
            clean = warped_sine_image(width, height, a, b, c)
            params.update(width=width, height=height, a=a, b=b, c=c)
        values = clean.values
        if snr_db is not None:
            sigma = snr_to_sigma(snr_db, signal_power(values))
            params["sigma"] = sigma
            values = values + awgn(values.size, NoiseSpec(sigma, seed)).reshape(values.shape)
        if kind == "image":
            qio.write_pgm(out, GridImage(values), extra={"generator": params})
        else:
            qio.write_series_csv(out, clean.with_values(values), extra={"generator": params})
    except QPLPFError as exc:
        _fail(exc)


def _is_pgm(path) -> bool:
    with open(path, "rb") as fh:
        return fh.read(2) in (b"P2", b"P5")


@main.command("filter")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--method", type=click.Choice(list(METHODS)), default="qplpf", show_default=True)
@click.option("--m", "m", type=int, default=49, show_default=True, help="Delay count for series.")
@click.option("--m-window", type=int, default=10, show_default=True,
              help="Square patch width for images.")
@click.option("--s", "S", type=int, default=10, show_default=True, help="Neighborhood size S.")
@click.option("--window", type=int, default=11, show_default=True, help="Boxcar width (odd).")
@click.option("--est-window", type=int, default=50, show_default=True,
              help="Adaptive filter frequency-estimation window.")
@click.option("--phase", "phase_path", type=click.Path(exists=True, dir_okay=False),
              help="CSV (t,value) of known phases, for --method oracle.")
@click.option("--graph-out", type=click.Path(dir_okay=False),
              help="Also dump the neighbor graph as 'vertex: n1 n2 ...' lines.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def filter_cmd(in_path, method, m, m_window, S, window, est_window, phase_path, graph_out, out):
    """Filter a series (CSV) or image (PGM) and write a run report."""
    start = time.perf_counter()
    report = {"input": str(in_path), "output": str(out), "method": method}
    graph = None
    try:
        if _is_pgm(in_path):
            image = qio.read_pgm(in_path)
            if method != "qplpf":
                raise click.ClickException(f"method {method!r} is not available for images")
            run = run_qplpf_image(image, m_window, S)
            graph = run.graph
            qio.write_pgm(out, run.output)
            flagged = np.flatnonzero(run.flagged.ravel())
            report.update(kind="image", m_window=m_window, S=S)
        else:
            series = qio.read_series_csv(in_path)
            flagged = np.array([], dtype=np.int64)
            if method == "qplpf":
                run = run_qplpf_series(series, m, S)
                result, flagged, graph = run.output, run.flagged, run.graph
                report.update(m=m, S=S)
            elif method == "boxcar":
                result = boxcar(series, window)
                report.update(window=window)
            elif method == "adaptive":
                result = adaptive_filter(series, est_window)
                report.update(est_window=est_window)
            else:
                if phase_path is None:
                    raise click.ClickException("--method oracle needs --phase")
                phase = qio.read_series_csv(phase_path).values
                result = series.with_values(
                    oracle_phase_average(series.values, PhaseOracle(phase), S))
                report.update(S=S, phase=str(phase_path))
            qio.write_series_csv(out, result)
            report["kind"] = "series"
        if graph is not None:
            report.update(effective_S=graph.S, S_clipped=graph.clipped)
            if graph_out:
                qio.atomic_write(graph_out, "\n".join(graph.to_lines()) + "\n")
    except QPLPFError as exc:
        _fail(exc)
    report["flagged_indices"] = [int(i) for i in flagged]
    report["wall_time_s"] = time.perf_counter() - start
    qio.write_json(str(out) + ".report.json", report)


def _snr_grid(lo: float, hi: float, step: float) -> list:
    if step <= 0 or hi < lo:
        raise click.BadParameter("need snr-step > 0 and snr-max >= snr-min")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(count)]


@main.command()
@click.option("--snr-min", type=float, default=-5.0, show_default=True)
@click.option("--snr-max", type=float, default=20.0, show_default=True)
@click.option("--snr-step", type=float, default=5.0, show_default=True)
@click.option("--noiseless", is_flag=True, help="Run a single zero-noise point instead.")
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Trial k uses seed + k.")
@click.option("--methods", default=",".join(METHODS), show_default=True)
@click.option("--signal", type=click.Choice(["chirp", "sine"]), default="chirp", show_default=True)
@click.option("--m", "m", type=int, default=49, show_default=True)
@click.option("--s", "S", type=int, default=10, show_default=True)
@click.option("--boxcar-k", type=int, default=11, show_default=True)
@click.option("--est-window", type=int, default=50, show_default=True)
@click.option("--period", type=int, default=50, show_default=True)
@click.option("--n-periods", type=int, default=12, show_default=True)
@click.option("--threads", type=int, default=None,
              help="Worker threads (default: all cores, capped by QPLPF_THREADS).")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
def sweep(snr_min, snr_max, snr_step, noiseless, trials, seed, methods, signal, m, S,
          boxcar_k, est_window, period, n_periods, threads, out_dir):
    """Monte-Carlo RMS error and envelope variability versus SNR."""
    method_list = [s.strip() for s in methods.split(",") if s.strip()]
    if not method_list:
        raise click.BadParameter("empty method list", param_hint="--methods")
    snrs = [math.inf] if noiseless else _snr_grid(snr_min, snr_max, snr_step)
    config = SweepConfig(m=m, S=S, boxcar_k=boxcar_k, est_window=est_window,
                         signal=signal, period=period, n_periods=n_periods)
    try:
        result = run_sweep(snrs, trials, seed, method_list, config, threads=threads)
    except QPLPFError as exc:
        _fail(exc)
    out_dir = Path(out_dir)
    for metric, name, label in (("rms", "rms_vs_snr", "RMS error vs clean signal"),
                                ("env", "envelope_vs_snr", "RMS envelope variability")):
        rows = result.summary(metric)
        qio.write_summary_csv(out_dir / f"{name}.csv", rows)
        if all(math.isfinite(s) for s in snrs):
            curves = {meth: (snrs, [r[2] for r in rows if r[1] == meth]) for meth in method_list}
            svg = line_plot(curves, title=f"{label} (median of {trials} trials)",
                            xlabel=SNR_AXIS, ylabel=label)
            qio.atomic_write(out_dir / f"{name}.svg", svg)


@main.command("pca")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--m", "m", type=int, default=49, show_default=True)
@click.option("--k", "k", type=int, default=4, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def pca_cmd(in_path, m, k, out):
    """Project the delay embedding of a series onto its top principal components."""
    try:
        cloud = embed_series(qio.read_series_csv(in_path), consecutive_delays(m))
        res = pca(cloud, k)
    except QPLPFError as exc:
        _fail(exc)
    qio.write_pcs_csv(out, res.projections)
    qio.write_json(qio.sidecar_path(out), {
        "m": m, "k": k,
        "explained_variance": res.explained_variance.tolist(),
        "components": res.components.tolist(),
        "degenerate": res.degenerate,
        "domain_index_start": int(cloud.domain_index[0]),
        "color_mapping": "pc4 is intended as the color channel of a 3-D scatter",
    })


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def spectrum(in_path, out):
    """Write the log-scaled, centered 2-D magnitude spectrum of a PGM image."""
    try:
        image = qio.read_pgm(in_path)
        mag = spectrum2d(image).values
    except QPLPFError as exc:
        _fail(exc)
    s = np.log1p(mag)
    top = float(s.max())
    # Rounding residue left by mean removal on a flat image is not content.
    if top > 1e-9 * max(1.0, float(np.abs(image.values).max())):
        codes = np.floor(s / top * qio.PGM_MAXVAL + 0.5).astype(np.uint16)
    else:
        codes = np.zeros(s.shape, dtype=np.uint16)
    qio.write_pgm(out, GridImage(s), codes=codes, lo=0.0, hi=top,
                  extra={"scale": "log1p(|DFT|), DC at (width//2, height//2)"})


if __name__ == "__main__":
    main()
