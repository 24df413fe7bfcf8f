"""Experiment drivers: single reconstruction pipelines and the sweep studies
(miss counts over noise/measurements, timing over mask radius).

Configs are flat ``key=value`` files with ``#`` comments; every field is
echoed into the report for provenance.  Reports are JSON + CSV with figures
rendered alongside unless plots=false.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from .fourier import (
    FilterSpectrum,
    blur_signal,
    gaussian_filter,
    make_mask,
    measure,
    parse_mask_spec,
)
from .generators import add_noise, gen_barcode, gen_disk, gen_random_intervals
from .grids import BinarySignal, GridGeometry, hamming_distance, threshold_binary
from .sigio import (
    read_signal_any,
    write_report_json,
    write_signal_any,
)
from .solver import SolverConfig, reconstruct, reconstruct_filtered

__all__ = ["ScenarioError", "ExperimentConfig", "parse_config_file", "run_scenario"]


class ScenarioError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage


@dataclass
class ExperimentConfig:
    scenario: str = "single"  # single | fig5-sweep | timing-sweep
    n: int = 100
    dim: int = 1
    signal: str = "intervals:5"  # intervals:d | disk:cx:cy:r | barcode:bits | file:path
    mask: str = "none"
    blur_sigma: float = 0.0
    blur_hsize: int = 0  # 0: 2*ceil(3 sigma) + 1
    noise_std: float = 0.0
    noise_domain: str = "spatial"  # spatial | measurement
    seed: int = 0
    lam: float = 10.0
    tol: float = -1.0  # < 0: solver default
    max_iters: int = 10000
    constraint: str = "box"
    trials: int = 100
    noise_grid: str = "0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09"
    radius_grid: str = "6,8,10,12,14,16,18,20,22,24"
    seeds: int = 20
    extra_radius_max: int = 12
    precond: str = "auto"  # auto: M = |K|^2 when blurring (noise damping) | none
    out_dir: str = "."
    plots: bool = True

    def as_dict(self) -> dict:
        return asdict(self)


_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def parse_config_file(path) -> ExperimentConfig:
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value
    cfg = ExperimentConfig()
    for key, value in raw.items():
        name = "lam" if key == "lambda" else key.replace("-", "_")
        if not hasattr(cfg, name):
            raise ValueError(f"unknown config key {key!r}")
        current = getattr(cfg, name)
        if isinstance(current, bool):
            setattr(cfg, name, _BOOL[value.lower()])
        elif isinstance(current, int):
            setattr(cfg, name, int(value))
        elif isinstance(current, float):
            setattr(cfg, name, float(value))
        else:
            setattr(cfg, name, value)
    return cfg


def _solver_config(cfg: ExperimentConfig, tol=None, max_iters=None, filt=None) -> SolverConfig:
    precond = None
    if filt is not None and cfg.precond == "auto":
        # Damp frequencies where the blur gain (hence the SNR) is tiny, so
        # extra noise-dominated measurements cannot degrade the fit.
        precond = FilterSpectrum(filt.geometry, np.abs(filt.gains) ** 2)
    return SolverConfig(
        lam=cfg.lam,
        tol=tol if tol is not None else (None if cfg.tol < 0 else cfg.tol),
        max_iters=max_iters if max_iters is not None else cfg.max_iters,
        constraint=cfg.constraint,
        preconditioner=precond,
    )


def _generate_signal(cfg: ExperimentConfig, seed) -> BinarySignal:
    kind, _, rest = cfg.signal.partition(":")
    if kind == "intervals":
        return gen_random_intervals(cfg.n, int(rest), seed)
    if kind == "disk":
        cx, cy, radius = (float(p) for p in rest.split(":"))
        return gen_disk(cfg.n, (cx, cy), radius)
    if kind == "barcode":
        return gen_barcode(rest, cfg.n)
    if kind == "file":
        sig = read_signal_any(rest)
        if isinstance(sig, BinarySignal):
            return sig
        return threshold_binary(sig)
    raise ValueError(f"unknown signal spec {cfg.signal!r}")


def _grid(values: str) -> list[float]:
    return [float(v) for v in values.split(",") if v.strip()]


def _out(cfg, out_dir) -> Path:
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_scenario(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Execute a configured experiment; returns the report dict (also written
    to report.json in the output directory together with CSV/figures)."""
    if cfg.scenario == "single":
        return _run_single(cfg, _out(cfg, out_dir))
    if cfg.scenario == "fig5-sweep":
        return _run_miss_sweep(cfg, _out(cfg, out_dir))
    if cfg.scenario == "timing-sweep":
        return _run_timing_sweep(cfg, _out(cfg, out_dir))
    raise ValueError(f"unknown scenario {cfg.scenario!r}")


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:  # noqa: BLE001 - stage tag is the contract
        raise ScenarioError(name, exc) from exc


def _run_single(cfg: ExperimentConfig, out: Path) -> dict:
    seed_root = np.random.SeedSequence((cfg.seed, 0))
    u0 = _stage("generate", _generate_signal, cfg, seed_root)
    g = u0.geometry
    ext = ".csv" if g.ndim == 1 else ".pgm"
    write_signal_any(out / f"original{ext}", u0)

    filt = None
    degraded = None
    if cfg.blur_sigma > 0:
        hsize = cfg.blur_hsize or 2 * int(np.ceil(3 * cfg.blur_sigma)) + 1
        filt = _stage("blur", gaussian_filter, cfg.blur_sigma, hsize, g)
        degraded = _stage("blur", blur_signal, u0, filt)

    mask = None
    if cfg.mask != "none":
        mask = _stage("mask", parse_mask_spec, cfg.mask, g)

    solver_cfg = _solver_config(cfg, filt=filt)
    if filt is not None:
        if cfg.noise_std > 0:
            degraded = _stage("noise", add_noise, degraded, cfg.noise_std, int(seed_root.generate_state(1)[0]))
        blurred_path = out / ("input.csv" if g.ndim == 1 else "input.txt")
        write_signal_any(blurred_path, degraded)
        recon, raw, report = _stage(
            "reconstruct", reconstruct_filtered, degraded, filt, solver_cfg, mask
        )
    else:
        if mask is None:
            raise ScenarioError("mask", ValueError("need a mask or blur_sigma > 0"))
        meas = _stage("measure", measure, u0, mask)
        if cfg.noise_std > 0 and cfg.noise_domain == "measurement":
            meas = _stage("noise", add_noise, meas, cfg.noise_std, int(seed_root.generate_state(1)[0]))
        recon, raw, report = _stage("reconstruct", reconstruct, meas, solver_cfg)

    write_signal_any(out / f"reconstruction{ext}", recon)
    misses = hamming_distance(recon, u0)
    result = {
        "config": cfg.as_dict(),
        "misidentified": misses,
        "iterations": report.iterations,
        "residual": report.residual,
        "seconds": report.seconds,
        "converged": report.converged,
        "outputs": {"original": f"original{ext}", "reconstruction": f"reconstruction{ext}"},
    }
    write_report_json(out / "report.json", result)
    if cfg.plots:
        from . import plots

        if g.ndim == 1:
            plots.save_signal_comparison(
                out / "comparison.png", original=u0, degraded=degraded, reconstruction=recon
            )
        else:
            panel = {"original": u0, "reconstruction": recon}
            if degraded is not None:
                panel = {"original": u0, "input": degraded, "reconstruction": recon}
            plots.save_image_panel(out / "comparison.png", panel)
        result["outputs"]["figure"] = "comparison.png"
    return result


def _run_miss_sweep(cfg: ExperimentConfig, out: Path) -> dict:
    """Average miss counts over a (noise std) x (mask radius) grid.

    Pipeline per trial: random interval signal, Gaussian blur, spatial
    noise, reconstruction from the masked coefficients of the noisy blurred
    signal.  Reduced-trial reproduction of the trade-off study.
    """
    kind, _, rest = cfg.signal.partition(":")
    if kind != "intervals":
        raise ScenarioError("generate", ValueError("fig5-sweep expects signal=intervals:d"))
    d = int(rest)
    stds = _grid(cfg.noise_grid)
    radii = [int(r) for r in _grid(cfg.radius_grid)]
    g = GridGeometry(1, cfg.n)
    hsize = cfg.blur_hsize or 2 * int(np.ceil(3 * cfg.blur_sigma)) + 1
    filt = gaussian_filter(cfg.blur_sigma, hsize, g) if cfg.blur_sigma > 0 else None

    grid = np.zeros((len(stds), len(radii)))
    for i, std in enumerate(stds):
        for j, radius in enumerate(radii):
            mask = make_mask("low", radius, g)
            total = 0
            for trial in range(cfg.trials):
                ss = np.random.SeedSequence((cfg.seed, i, j, trial))
                child = ss.spawn(2)
                u0 = gen_random_intervals(cfg.n, d, child[0])
                if filt is not None:
                    degraded = blur_signal(u0, filt)
                else:
                    degraded = u0.to_real()
                noisy = add_noise(degraded, std, child[1])
                # Noise floor in the measurement norm: |S| * n * std^2.
                tol = mask.real_rank * cfg.n * std**2
                solver_cfg = _solver_config(cfg, tol=tol, max_iters=cfg.max_iters, filt=filt)
                if filt is not None:
                    recon, _, _ = reconstruct_filtered(noisy, filt, solver_cfg, mask)
                else:
                    recon, _, _ = reconstruct(measure(noisy, mask), solver_cfg)
                total += hamming_distance(recon, u0)
            grid[i, j] = total / cfg.trials

    rho_noise = float(stats.spearmanr(stds, grid.mean(axis=1)).statistic)
    rho_meas = float(stats.spearmanr(radii, grid.mean(axis=0)).statistic)
    header = "noise_std," + ",".join(f"low_{r}" for r in radii)
    rows = [header] + [
        f"{std:g}," + ",".join(f"{grid[i, j]:.4f}" for j in range(len(radii)))
        for i, std in enumerate(stds)
    ]
    (out / "misses.csv").write_text("\n".join(rows) + "\n")
    result = {
        "config": cfg.as_dict(),
        "noise_stds": stds,
        "radii": radii,
        "avg_misses": grid.tolist(),
        "spearman_noise": rho_noise,
        "spearman_measurements": rho_meas,
        "outputs": {"misses": "misses.csv"},
    }
    write_report_json(out / "report.json", result)
    if cfg.plots:
        from . import plots

        plots.save_heatmap(
            out / "misses.png", radii, stds, grid, "lowpass radius", "noise std",
            title="average miss count",
        )
        result["outputs"]["figure"] = "misses.png"
    return result


def _run_timing_sweep(cfg: ExperimentConfig, out: Path) -> dict:
    """Reconstruction time versus mask radius beyond the certified minimum."""
    kind, _, rest = cfg.signal.partition(":")
    if kind != "intervals":
        raise ScenarioError("generate", ValueError("timing-sweep expects signal=intervals:d"))
    d = int(rest)
    g = GridGeometry(1, cfg.n)
    radii = list(range(d, min(d + cfg.extra_radius_max + 1, cfg.n // 2)))
    rows = ["radius,seed,seconds,iterations"]
    seconds = np.zeros((len(radii), cfg.seeds))
    for i, radius in enumerate(radii):
        mask = make_mask("low", radius, g)
        for s in range(cfg.seeds):
            u0 = gen_random_intervals(cfg.n, d, np.random.SeedSequence((cfg.seed, s)))
            meas = measure(u0, mask)
            t0 = time.perf_counter()
            _, _, report = reconstruct(meas, _solver_config(cfg))
            dt = time.perf_counter() - t0
            seconds[i, s] = dt
            rows.append(f"{radius},{s},{dt:.6f},{report.iterations}")
    (out / "timing.csv").write_text("\n".join(rows) + "\n")
    med = np.median(seconds, axis=1)
    rho = float(stats.spearmanr(radii, med).statistic)
    result = {
        "config": cfg.as_dict(),
        "radii": radii,
        "median_seconds": med.tolist(),
        "spearman_radius_time": rho,
        "outputs": {"timing": "timing.csv"},
    }
    write_report_json(out / "report.json", result)
    if cfg.plots:
        from . import plots

        plots.save_curve(out / "timing.png", radii, med, "mask radius", "median seconds", logy=True)
        result["outputs"]["figure"] = "timing.png"
    return result
