"""DFT conventions, frequency masks, the measurement operator A = S*F and its
adjoint, frequency-domain filters, and the DCT variant.

Convention: spatial indices are 1-based, so

    a_k = sum_{x in {1..n}^h} u(x) exp(-2*pi*i <k, x/n>),
    u(x) = n^-h sum_{k in [-n/2, n/2-1]^h} a_k exp(+2*pi*i <k, x/n>).

Relative to an FFT over 0-based positions this is a per-axis phase factor
exp(-2*pi*i*k/n), applied in :func:`fft_forward_raw`.  The transpose of the
forward map satisfies F^T = n^h F^{-1} on Hermitian vectors, which is what
:func:`adjoint_measure` implements.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grids import (
    GeometryMismatch,
    GridGeometry,
    NonHermitianSpectrum,
    RealSignal,
    Spectrum,
    conjugate_flip,
)

__all__ = [
    "MaskError",
    "FrequencyMask",
    "MeasurementSet",
    "FilterSpectrum",
    "fft_forward_raw",
    "fft_inverse_raw",
    "dft_forward",
    "dft_inverse",
    "measure",
    "adjoint_measure",
    "make_mask",
    "parse_mask_spec",
    "gaussian_filter",
    "filter_apply",
    "blur_signal",
    "dct_measure",
    "meas_norm_sq",
    "meas_inner",
]


class MaskError(ValueError):
    """A frequency mask request could not be satisfied."""


def _phase(geometry: GridGeometry, sign: int) -> np.ndarray:
    """Per-axis phase exp(sign * 2*pi*i * k / n) broadcast over the grid."""
    k = geometry.freq_axis()
    p = np.exp(sign * 2j * np.pi * k / geometry.n)
    if geometry.ndim == 1:
        return p
    return np.multiply.outer(p, p)


def fft_forward_raw(values: np.ndarray, geometry: GridGeometry) -> np.ndarray:
    """Forward transform of a spatial array, natural frequency order."""
    return np.fft.fftn(values) * _phase(geometry, -1)


def fft_inverse_raw(coeffs: np.ndarray, geometry: GridGeometry) -> np.ndarray:
    """Inverse transform to a complex spatial array (caller takes .real)."""
    return np.fft.ifftn(coeffs * _phase(geometry, +1))


def dft_forward(u: RealSignal | "BinarySignal") -> Spectrum:
    """Fourier coefficients of a real signal under the 1-based convention."""
    return Spectrum(u.geometry, fft_forward_raw(np.asarray(u.values, float), u.geometry))


#: Largest tolerated imaginary residue (relative) when inverting a spectrum.
IMAG_RTOL = 1e-10


def dft_inverse(a: Spectrum) -> RealSignal:
    """Inverse transform of a Hermitian spectrum back to a real signal."""
    z = fft_inverse_raw(a.coeffs, a.geometry)
    scale = max(1.0, float(np.max(np.abs(z.real))) if z.size else 0.0)
    resid = float(np.max(np.abs(z.imag))) if z.size else 0.0
    if resid > IMAG_RTOL * scale:
        raise NonHermitianSpectrum(f"imaginary residue {resid:.3e} beyond tolerance")
    return RealSignal(a.geometry, z.real)


def _self_conjugate_grid(geometry: GridGeometry) -> np.ndarray:
    """Boolean grid of indices with k = -k (components in {0, -n/2})."""
    m = np.arange(geometry.n)
    axis = (m == 0) | (m == geometry.n // 2)
    if geometry.ndim == 1:
        return axis
    return np.logical_and.outer(axis, axis)


@dataclass(frozen=True)
class FrequencyMask:
    """Conjugate-closed set of observed frequencies (the selector S).

    ``real_rank`` is the number of real dimensions the selection spans: one
    per self-conjugate index (DC and Nyquist rows), two per +/-k pair, which
    equals the number of selected entries.
    """

    geometry: GridGeometry
    selector: np.ndarray  # boolean, natural order
    kind: str = "explicit"

    def __post_init__(self):
        sel = np.array(self.selector, dtype=bool)
        if sel.shape != self.geometry.shape:
            raise GeometryMismatch(f"selector shape {sel.shape} != {self.geometry.shape}")
        if not np.array_equal(sel, conjugate_flip(sel)):
            raise MaskError("mask is not symmetric under k -> -k")
        sel.setflags(write=False)
        object.__setattr__(self, "selector", sel)

    @property
    def real_rank(self) -> int:
        return int(np.count_nonzero(self.selector))

    def indices(self) -> list:
        """Selected symmetric frequencies, sorted."""
        g = self.geometry
        ks = g.freq_axis()
        if g.ndim == 1:
            out = [int(ks[m]) for m in np.nonzero(self.selector)[0]]
        else:
            out = [
                (int(ks[m1]), int(ks[m2]))
                for m1, m2 in zip(*np.nonzero(self.selector))
            ]
        return sorted(out)

    def pair_representatives(self):
        """One natural-order index per +/-k pair plus all self-conjugate ones.

        Returns (self_conj, pairs): lists of natural-order index tuples; each
        pair entry is the lexicographically smaller member.
        """
        g = self.geometry
        selfc = _self_conjugate_grid(g)
        self_idx, pair_idx = [], []
        seen = set()
        it = np.ndindex(*g.shape)
        for m in it:
            if not self.selector[m]:
                continue
            if selfc[m]:
                self_idx.append(m)
                continue
            neg = tuple((-c) % g.n for c in m)
            key = min(m, neg)
            if key in seen:
                continue
            seen.add(key)
            pair_idx.append(key)
        return self_idx, pair_idx


@dataclass(frozen=True)
class MeasurementSet:
    """Observed coefficients b_k on a mask (b = S F u), Hermitian."""

    mask: FrequencyMask
    values: np.ndarray  # complex, natural order, zero off the mask

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != self.mask.geometry.shape:
            raise GeometryMismatch("measurement values shape mismatch")
        if np.any(v[~self.mask.selector] != 0):
            raise ValueError("measurement values present outside the mask")
        scale = float(np.max(np.abs(v))) if v.size else 0.0
        if scale > 0:
            err = float(np.max(np.abs(v - np.conj(conjugate_flip(v)))))
            if err > 1e-12 * scale:
                raise NonHermitianSpectrum(
                    f"measurements violate Hermitian symmetry: err={err:.3e}"
                )
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def geometry(self) -> GridGeometry:
        return self.mask.geometry


@dataclass(frozen=True)
class FilterSpectrum:
    """Diagonal frequency-domain gains K_k (Hermitian); preconditioners reuse
    this type with nonnegative real gains."""

    geometry: GridGeometry
    gains: np.ndarray

    def __post_init__(self):
        g = np.array(self.gains, dtype=complex)
        if g.shape != self.geometry.shape:
            raise GeometryMismatch("filter gains shape mismatch")
        scale = float(np.max(np.abs(g))) if g.size else 0.0
        if scale > 0:
            err = float(np.max(np.abs(g - np.conj(conjugate_flip(g)))))
            if err > 1e-12 * scale:
                raise NonHermitianSpectrum("filter gains violate Hermitian symmetry")
        g.setflags(write=False)
        object.__setattr__(self, "gains", g)


def measure(u: RealSignal | "BinarySignal", mask: FrequencyMask) -> MeasurementSet:
    """Observed coefficients b_k = (F u)_k for k in the mask."""
    if u.geometry != mask.geometry:
        raise GeometryMismatch("signal and mask geometries differ")
    coeffs = fft_forward_raw(np.asarray(u.values, float), u.geometry)
    return MeasurementSet(mask, np.where(mask.selector, coeffs, 0.0))


def adjoint_measure(b: MeasurementSet) -> RealSignal:
    """A^T applied to measurements: n^h * F^{-1} of the zero-padded values."""
    g = b.geometry
    z = fft_inverse_raw(b.values, g) * g.cell_count
    scale = max(1.0, float(np.max(np.abs(z.real))) if z.size else 0.0)
    if float(np.max(np.abs(z.imag))) > IMAG_RTOL * scale:
        raise NonHermitianSpectrum("adjoint of non-Hermitian measurements")
    return RealSignal(g, z.real)


def _random_rank_mask(geometry: GridGeometry, rank: int, seed, include_dc: bool) -> np.ndarray:
    """Conjugate-closed random selector with exactly ``rank`` real dimensions.

    Greedy unit sampling (self-conjugate entries weigh 1, +/-k pairs weigh 2)
    with reshuffle-on-miss; DC is forced first unless include_dc is False.
    """
    if not 1 <= rank <= geometry.cell_count:
        raise MaskError(f"requested rank {rank} outside 1..{geometry.cell_count}")
    rng = np.random.default_rng(seed)
    selfc = _self_conjugate_grid(geometry)
    dc = (0,) * geometry.ndim
    units = []  # (weight, [natural indices])
    for m in np.ndindex(*geometry.shape):
        if selfc[m]:
            if m != dc or not include_dc:
                units.append((1, [m]))
        else:
            neg = tuple((-c) % geometry.n for c in m)
            if m < neg:
                units.append((2, [m, neg]))
    base = [dc] if include_dc else []
    base_weight = len(base)
    if rank < base_weight:
        raise MaskError("rank too small for a DC-inclusive mask")
    for _ in range(1000):
        order = rng.permutation(len(units))
        chosen = list(base)
        total = base_weight
        for ui in order:
            w, idxs = units[ui]
            if total + w <= rank:
                chosen.extend(idxs)
                total += w
            if total == rank:
                break
        if total == rank:
            sel = np.zeros(geometry.shape, dtype=bool)
            for m in chosen:
                sel[m] = True
            return sel
    raise MaskError(f"could not realize rank {rank} (parity/geometry constraint)")


def make_mask(kind: str, param, geometry: GridGeometry, *, include_dc: bool = True) -> FrequencyMask:
    """Build a frequency mask.

    Kinds: ``low`` (1D, |k| <= d), ``disk`` (2D, ||k|| <= d), ``explicit``
    (symmetrized closure of an index list), ``random`` (conjugate-closed set
    of real rank exactly r, param = (r, seed)).
    """
    g = geometry
    if kind == "low":
        if g.ndim != 1:
            raise MaskError("lowpass masks are 1D; use disk for 2D")
        d = int(param)
        if d < 0:
            raise MaskError("lowpass radius must be >= 0")
        if d >= g.n // 2:
            warnings.warn(f"lowpass d={d} >= n/2: clipped to the full mask")
            return FrequencyMask(g, np.ones(g.shape, bool), kind=f"low:{d}")
        k = g.freq_axis()
        return FrequencyMask(g, np.abs(k) <= d, kind=f"low:{d}")
    if kind == "disk":
        if g.ndim != 2:
            raise MaskError("disk masks are 2D; use low for 1D")
        d = float(param)
        if d < 0:
            raise MaskError("disk radius must be >= 0")
        k1, k2 = g.freq_grids()
        return FrequencyMask(g, np.hypot(k1, k2) <= d, kind=f"disk:{param}")
    if kind == "explicit":
        sel = np.zeros(g.shape, dtype=bool)
        for k in param:
            m = g.nat_index(k)
            sel[m] = True
            sel[tuple((-c) % g.n for c in m)] = True
        return FrequencyMask(g, sel, kind="explicit")
    if kind == "random":
        r, seed = param
        sel = _random_rank_mask(g, int(r), seed, include_dc)
        return FrequencyMask(g, sel, kind=f"rand:{r}:{seed}")
    raise MaskError(f"unknown mask kind {kind!r}")


def parse_mask_spec(spec: str, geometry: GridGeometry) -> FrequencyMask:
    """CLI mask strings: ``low:d``, ``disk:d``, ``list:<path>``, ``rand:r:seed``."""
    parts = spec.split(":")
    try:
        if parts[0] == "low" and len(parts) == 2:
            return make_mask("low", int(parts[1]), geometry)
        if parts[0] == "disk" and len(parts) == 2:
            return make_mask("disk", float(parts[1]), geometry)
        if parts[0] == "list" and len(parts) >= 2:
            from .sigio import read_mask_indices

            path = ":".join(parts[1:])
            return make_mask("explicit", read_mask_indices(path), geometry)
        if parts[0] == "rand" and len(parts) in (3, 4):
            include_dc = not (len(parts) == 4 and parts[3] == "nodc")
            return make_mask(
                "random", (int(parts[1]), int(parts[2])), geometry, include_dc=include_dc
            )
    except (TypeError, ValueError) as exc:
        raise MaskError(f"bad mask spec {spec!r}: {exc}") from exc
    raise MaskError(f"bad mask spec {spec!r}")


def gaussian_filter(sigma: float, hsize: int, geometry: GridGeometry) -> FilterSpectrum:
    """Truncated, normalized Gaussian kernel as frequency-domain gains.

    The spatial kernel exp(-|o|^2 / (2 sigma^2)) on the centered hsize window
    is normalized to total mass 1 and embedded periodically, so the DC gain
    is exactly 1.  Default window choice lives in the CLI (2*ceil(3 sigma)+1).
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if hsize < 1 or hsize % 2 == 0 or hsize > geometry.n:
        raise ValueError("hsize must be odd, >= 1 and <= n")
    half = (hsize - 1) // 2
    offs = np.arange(-half, half + 1)
    g1 = np.exp(-(offs.astype(float) ** 2) / (2.0 * sigma**2))
    g1 /= g1.sum()
    k = geometry.freq_axis()
    # K1[m] = sum_o g(o) exp(-2 pi i k(m) o / n): offsets carry no index shift.
    k1 = np.exp(-2j * np.pi * np.outer(k, offs) / geometry.n) @ g1
    if geometry.ndim == 1:
        gains = k1
        gains[0] = 1.0
    else:
        gains = np.multiply.outer(k1, k1)
        gains[0, 0] = 1.0
    return FilterSpectrum(geometry, gains)


def filter_apply(u: RealSignal, filt: FilterSpectrum) -> RealSignal:
    """Literal F^T K F u (note the n^h factor from F^T = n^h F^{-1}).

    The solver never uses this outer F^T: it works with K*F directly, so the
    n^h factor cannot leak into residuals.  For the natural image-domain blur
    use :func:`blur_signal`.
    """
    if u.geometry != filt.geometry:
        raise GeometryMismatch("signal and filter geometries differ")
    g = u.geometry
    z = fft_inverse_raw(filt.gains * fft_forward_raw(u.values, g), g) * g.cell_count
    return RealSignal(g, z.real)


def blur_signal(u: RealSignal | "BinarySignal", filt: FilterSpectrum) -> RealSignal:
    """Natural periodic convolution F^{-1}(K F u) (unit-gain at DC)."""
    if u.geometry != filt.geometry:
        raise GeometryMismatch("signal and filter geometries differ")
    g = u.geometry
    z = fft_inverse_raw(filt.gains * fft_forward_raw(np.asarray(u.values, float), g), g)
    return RealSignal(g, z.real)


def dct_measure(u: RealSignal | "BinarySignal", d: int) -> MeasurementSet:
    """Cosine-transform measurements: DFT of the even extension, |k| <= 2d.

    The returned set lives on the length-2n geometry; by Hermitian symmetry
    the 2d+1 coefficients with 0 <= k <= 2d carry all the information.
    """
    if u.geometry.ndim != 1:
        raise GeometryMismatch("DCT measurements are defined for 1D signals")
    n = u.geometry.n
    if 2 * d >= n:
        raise MaskError(f"2d={2 * d} must be < n={n}")
    ext_geom = GridGeometry(1, 2 * n)
    vals = np.asarray(u.values, float)
    ext = np.concatenate([vals, vals[::-1]])
    coeffs = fft_forward_raw(ext, ext_geom)
    mask = make_mask("low", 2 * d, ext_geom)
    return MeasurementSet(mask, np.where(mask.selector, coeffs, 0.0))


def meas_norm_sq(values: np.ndarray) -> float:
    """Squared measurement-space norm: sum over the symmetric set of |b_k|^2."""
    return float(np.sum(np.abs(values) ** 2))


def meas_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Real measurement-space inner product sum_k Re(a_k conj(b_k))."""
    return float(np.sum(a * np.conj(b)).real)
