"""Test-signal generators and the noise stage of the experiment pipeline."""

from __future__ import annotations

import numpy as np

from .fourier import MeasurementSet
from .grids import BinarySignal, GridGeometry, RealSignal, hermitianize

__all__ = ["gen_random_intervals", "gen_disk", "gen_barcode", "add_noise"]


def _proportional_lengths(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer lengths >= 1 proportional to weights, summing to total."""
    m = len(weights)
    if total < m:
        raise ValueError(f"cannot fit {m} runs into {total} cells")
    extra = total - m
    share = extra * weights / weights.sum() if extra else np.zeros(m)
    lengths = np.ones(m, dtype=int) + np.floor(share).astype(int)
    remainder = total - int(lengths.sum())
    if remainder:
        order = np.argsort(-(share - np.floor(share)), kind="stable")
        lengths[order[:remainder]] += 1
    return lengths


def gen_random_intervals(n: int, d: int, seed: int) -> BinarySignal:
    """Random periodic 1D binary signal with exactly 2d alternating runs.

    Run lengths are drawn uniformly and rescaled to sum n with every run at
    least one cell long; the starting value and a cyclic rotation are also
    randomized.  Deterministic per seed.
    """
    if d < 0 or 2 * d > n:
        raise ValueError(f"need 0 <= 2d <= n, got d={d}, n={n}")
    g = GridGeometry(1, n)
    rng = np.random.default_rng(seed)
    if d == 0:
        return BinarySignal(g, np.full(n, float(rng.integers(0, 2))))
    lengths = _proportional_lengths(rng.random(2 * d), n)
    first = int(rng.integers(0, 2))
    v = np.empty(n)
    pos = 0
    for i, length in enumerate(lengths):
        v[pos : pos + length] = (first + i) % 2
        pos += length
    v = np.roll(v, int(rng.integers(0, n)))
    return BinarySignal(g, v)


def gen_disk(n: int, center: tuple[float, float] = (0.5, 0.5), radius: float = 0.2) -> BinarySignal:
    """Indicator of a closed torus disk sampled on the n x n grid.

    Grid point (i, j) sits at ((i+1)/n, (j+1)/n); a pixel is set when its
    torus distance to the center is <= radius (so radius 0 marks a single
    pixel only if the center lies exactly on a grid point).
    """
    if not 0 <= radius < 0.5:
        raise ValueError("radius must be in [0, 0.5)")
    g = GridGeometry(2, n)
    t = np.arange(1, n + 1) / n
    d1 = np.abs(t - center[0] % 1.0)
    d2 = np.abs(t - center[1] % 1.0)
    d1 = np.minimum(d1, 1.0 - d1)
    d2 = np.minimum(d2, 1.0 - d2)
    dist = np.hypot(d1[:, None], d2[None, :])
    return BinarySignal(g, (dist <= radius).astype(float))


def _run_length_encode(pattern: str) -> list[tuple[int, int]]:
    runs = []
    for ch in pattern:
        if ch not in "01":
            raise ValueError("pattern must be a string of 0s and 1s")
        bit = int(ch)
        if runs and runs[-1][0] == bit:
            runs[-1] = (bit, runs[-1][1] + 1)
        else:
            runs.append((bit, 1))
    return runs


def gen_barcode(pattern: str, n_width: int, n_height: int | None = None) -> BinarySignal:
    """Barcode image: vertical bars, constant along the vertical axis, with
    widths proportional to the run lengths of the bit pattern.

    The grid is square, so n_height (when given) must equal n_width.
    """
    if not pattern:
        raise ValueError("pattern must be nonempty")
    if n_height is not None and n_height != n_width:
        raise ValueError("grids are square: n_height must equal n_width")
    runs = _run_length_encode(pattern)
    widths = _proportional_lengths(np.array([c for _, c in runs], float), n_width)
    row = np.empty(n_width)
    pos = 0
    for (bit, _), width in zip(runs, widths):
        row[pos : pos + width] = bit
        pos += width
    g = GridGeometry(2, n_width)
    return BinarySignal(g, np.tile(row, (n_width, 1)))


def add_noise(obj, std: float, seed: int):
    """Add iid zero-mean Gaussian noise; deterministic per seed.

    Real (or binary) signals get spatial noise and come back as RealSignal.
    Measurement sets get complex noise on the masked coefficients (std per
    real/imag part before Hermitian symmetrization).
    """
    if std < 0:
        raise ValueError("std must be >= 0")
    rng = np.random.default_rng(seed)
    if isinstance(obj, (RealSignal, BinarySignal)):
        values = np.asarray(obj.values, float)
        if std == 0:
            return RealSignal(obj.geometry, values)
        return RealSignal(obj.geometry, values + rng.normal(0.0, std, obj.geometry.shape))
    if isinstance(obj, MeasurementSet):
        if std == 0:
            return obj
        shape = obj.geometry.shape
        z = rng.normal(0.0, std, shape) + 1j * rng.normal(0.0, std, shape)
        eps = np.where(obj.mask.selector, hermitianize(z), 0.0)
        return MeasurementSet(obj.mask, obj.values + eps)
    raise TypeError("expected a signal or a MeasurementSet")
