"""Core grid types: binary/real signals on a periodic square lattice, their
Fourier coefficient containers, and run-length (interval) structure.

All types are immutable after construction; the operations here are pure
functions, safe to share across parallel experiment trials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "GeometryMismatch",
    "NonHermitianSpectrum",
    "GridGeometry",
    "BinarySignal",
    "RealSignal",
    "Spectrum",
    "Interval",
    "IntervalDecomposition",
    "interval_decomposition",
    "rebuild_from_intervals",
    "threshold_binary",
    "hamming_distance",
    "conjugate_flip",
    "hermitianize",
]

#: Relative tolerance for the Hermitian-symmetry invariant of a Spectrum.
HERMITIAN_RTOL = 1e-12


class GeometryMismatch(ValueError):
    """Two grid objects with incompatible geometries were combined."""


class NonHermitianSpectrum(ValueError):
    """Complex coefficients violate a_{-k} = conj(a_k) beyond tolerance."""


@dataclass(frozen=True)
class GridGeometry:
    """Periodic square lattice {1..n}^ndim with even side length n.

    Spatial indices run 1..n per axis; frequencies live on the symmetric
    range [-n/2, n/2 - 1] per axis (n/2 identified with -n/2).  Arrays are
    stored 0-based: position j holds the value at spatial index x = j + 1,
    and frequency arrays use natural FFT order.
    """

    ndim: int
    n: int

    def __post_init__(self):
        if self.ndim not in (1, 2):
            raise ValueError(f"ndim must be 1 or 2, got {self.ndim}")
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"side length must be even and >= 2, got {self.n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.ndim

    @property
    def cell_count(self) -> int:
        return self.n**self.ndim

    def freq_axis(self) -> np.ndarray:
        """Symmetric frequency value of each natural-order index (one axis)."""
        k = np.arange(self.n)
        k[k >= self.n // 2] -= self.n
        return k

    def freq_grids(self) -> tuple[np.ndarray, ...]:
        """Per-axis frequency values broadcast over the full grid."""
        k = self.freq_axis()
        if self.ndim == 1:
            return (k,)
        return np.meshgrid(k, k, indexing="ij")

    def spatial_grids(self) -> tuple[np.ndarray, ...]:
        """Per-axis 1-based spatial coordinates broadcast over the grid."""
        x = np.arange(1, self.n + 1)
        if self.ndim == 1:
            return (x,)
        return np.meshgrid(x, x, indexing="ij")

    def nat_index(self, k) -> tuple[int, ...]:
        """Natural-order array index of symmetric frequency k."""
        k = (int(k),) if np.isscalar(k) else tuple(int(c) for c in k)
        if len(k) != self.ndim:
            raise GeometryMismatch(f"frequency {k} has wrong arity for ndim={self.ndim}")
        for c in k:
            if not -self.n // 2 <= c <= self.n // 2 - 1:
                raise ValueError(f"frequency component {c} outside [-n/2, n/2-1]")
        return tuple(c % self.n for c in k)


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def conjugate_flip(coeffs: np.ndarray) -> np.ndarray:
    """Map array a[m] to a[(-m) mod n] along every axis (the index of -k)."""
    out = coeffs
    for ax in range(coeffs.ndim):
        out = np.roll(np.flip(out, axis=ax), 1, axis=ax)
    return out


def hermitianize(coeffs: np.ndarray) -> np.ndarray:
    """Project complex coefficients onto the Hermitian-symmetric subspace."""
    return 0.5 * (coeffs + np.conj(conjugate_flip(coeffs)))


@dataclass(frozen=True)
class BinarySignal:
    """h-dimensional {0,1}-valued grid function (the unknown to recover)."""

    geometry: GridGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise GeometryMismatch(f"values shape {v.shape} != {self.geometry.shape}")
        if not np.all((v == 0.0) | (v == 1.0)):
            raise ValueError("binary signal values must be exactly 0.0 or 1.0")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def to_real(self) -> "RealSignal":
        return RealSignal(self.geometry, self.values)


@dataclass(frozen=True)
class RealSignal:
    """Real-valued grid function; solver iterates and certificates live here."""

    geometry: GridGeometry
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.geometry.shape:
            raise GeometryMismatch(f"values shape {v.shape} != {self.geometry.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("real signal values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class Spectrum:
    """Complex Fourier coefficients, natural FFT order, Hermitian-symmetric."""

    geometry: GridGeometry
    coeffs: np.ndarray

    def __post_init__(self):
        a = np.array(self.coeffs, dtype=complex)
        if a.shape != self.geometry.shape:
            raise GeometryMismatch(f"coeffs shape {a.shape} != {self.geometry.shape}")
        scale = np.max(np.abs(a)) if a.size else 0.0
        if scale > 0:
            err = np.max(np.abs(a - np.conj(conjugate_flip(a))))
            if err > HERMITIAN_RTOL * scale:
                raise NonHermitianSpectrum(
                    f"Hermitian symmetry violated: err={err:.3e}, scale={scale:.3e}"
                )
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    def coeff(self, k) -> complex:
        """Coefficient at symmetric frequency k (int for 1D, pair for 2D)."""
        return complex(self.coeffs[self.geometry.nat_index(k)])

    def symmetric_items(self):
        """(k, a_k) pairs sorted by symmetric frequency."""
        g = self.geometry
        ks = g.freq_axis()
        if g.ndim == 1:
            order = np.argsort(ks)
            return [(int(ks[m]), complex(self.coeffs[m])) for m in order]
        items = []
        for m1 in range(g.n):
            for m2 in range(g.n):
                items.append(((int(ks[m1]), int(ks[m2])), complex(self.coeffs[m1, m2])))
        items.sort(key=lambda kv: kv[0])
        return items


@dataclass(frozen=True)
class Interval:
    """One constant run: 1-based start index, cyclic length, value in {0,1}."""

    start: int
    length: int
    value: int


@dataclass(frozen=True)
class IntervalDecomposition:
    """Alternating constant runs of a periodic 1D binary signal.

    The first interval is the run containing spatial index 1 after the
    periodic wrap-merge; a constant signal is a single interval with d = 0.
    """

    geometry: GridGeometry
    intervals: tuple[Interval, ...]

    @property
    def d(self) -> int:
        """Half the number of runs (0 for a constant signal)."""
        return len(self.intervals) // 2

    def start_points(self) -> list[int]:
        return [iv.start for iv in self.intervals]


def interval_decomposition(u: BinarySignal) -> IntervalDecomposition:
    """Decompose a 1D binary signal into cyclically alternating runs.

    Runs that touch across the periodic boundary with equal value are merged,
    so the run count is even (or 1 for a constant signal).
    """
    if u.geometry.ndim != 1:
        raise GeometryMismatch("interval decomposition is defined for 1D signals")
    v = u.values
    n = u.geometry.n
    jumps = np.nonzero(v != np.roll(v, 1))[0]  # 0-based positions where a run begins
    if jumps.size == 0:
        return IntervalDecomposition(
            u.geometry, (Interval(start=1, length=n, value=int(v[0])),)
        )
    # Rotate so the first listed run is the one containing index 1 (0-based 0).
    if jumps[0] != 0:
        jumps = np.roll(jumps, 1)
    intervals = []
    m = jumps.size
    for i in range(m):
        j = int(jumps[i])
        nxt = int(jumps[(i + 1) % m])
        length = (nxt - j) % n or n
        intervals.append(Interval(start=j + 1, length=length, value=int(v[j])))
    return IntervalDecomposition(u.geometry, tuple(intervals))


def rebuild_from_intervals(dec: IntervalDecomposition) -> BinarySignal:
    """Inverse of interval_decomposition (exact round trip)."""
    n = dec.geometry.n
    v = np.empty(n)
    for iv in dec.intervals:
        idx = (iv.start - 1 + np.arange(iv.length)) % n
        v[idx] = iv.value
    return BinarySignal(dec.geometry, v)


def threshold_binary(u: RealSignal) -> BinarySignal:
    """Round to the closest binary signal: 1 where u >= 1/2, else 0."""
    return BinarySignal(u.geometry, (u.values >= 0.5).astype(float))


def hamming_distance(u: BinarySignal, w: BinarySignal) -> int:
    """Number of grid points where the two binary signals differ."""
    if u.geometry != w.geometry:
        raise GeometryMismatch("hamming distance requires equal geometries")
    return int(np.count_nonzero(u.values != w.values))
