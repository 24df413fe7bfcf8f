"""Directional complexity of 2D binary images and band-limited functions.

A grating is a family of parallel torus line segments at a rational slope;
averaging the number of value changes (or strict sign changes) along its
lines, weighted by the line spacing, gives the average directional crossing
count for that angle.  Integrating over angles yields twice the perimeter
(Cauchy-Crofton), and for the zero set of a function band-limited to a disk
of radius d the average is bounded by 2d, which turns the measured maximum
into a necessary lower bound on the usable mask radius.

Values computed from pixel images are estimates: the jump set of a discrete
image only approximates an analytic curve, and line sampling is refined by
doubling until the counts stabilize.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import FrequencyMask, MaskError
from .grids import BinarySignal, Spectrum

__all__ = [
    "GratingSpec",
    "ComplexityReport",
    "NecessaryCondition",
    "rational_angles",
    "line_crossings",
    "avg_crossings",
    "crofton_perimeter",
    "check_necessary_d",
    "zero_free_ball_bound",
]


@dataclass(frozen=True)
class GratingSpec:
    """Family of parallel lines at rational slope p/q.

    family 1 covers angles in (-pi/4, pi/4] with tan(theta) = p/q and lines
    (t, s + t p/q); family 2 covers (pi/4, 3pi/4] with cot(theta) = p/q and
    lines (s + t p/q, t).  Coordinates are (horizontal, vertical) on the unit
    torus; |p| <= q, gcd(|p|, q) = 1.
    """

    p: int
    q: int
    family: int = 1
    s_samples: int | None = None  # None: resolution-based default
    t_step: float | None = None  # None: 1/(4n) for images

    def __post_init__(self):
        if self.q < 1 or abs(self.p) > self.q:
            raise ValueError("need |p| <= q and q >= 1")
        if math.gcd(abs(self.p), self.q) != 1:
            raise ValueError("slope p/q must be in lowest terms")
        if self.family not in (1, 2):
            raise ValueError("family is 1 or 2")

    @property
    def theta(self) -> float:
        a = math.atan2(self.p, self.q)
        return a if self.family == 1 else math.pi / 2 - a

    @property
    def weight(self) -> float:
        """cos(theta) (family 1) or sin(theta) (family 2) = q/sqrt(p^2+q^2)."""
        return self.q / math.hypot(self.p, self.q)


def rational_angles(count: int = 32, q_max: int = 8) -> list[GratingSpec]:
    """Pick ``count`` rational-slope gratings covering (-pi/4, 3pi/4].

    Candidates are all coprime slopes with q <= q_max; for each of a uniform
    set of target angles the nearest unused candidate is selected.
    """
    cands1, cands2 = [], []
    for q in range(1, q_max + 1):
        for p in range(-q, q + 1):
            if math.gcd(abs(p), q) != 1:
                continue
            if p > -q:
                cands1.append(GratingSpec(p, q, family=1))
            if p < q:
                cands2.append(GratingSpec(p, q, family=2))
    picked = []
    for cands, lo, hi, share in (
        (cands1, -math.pi / 4, math.pi / 4, count - count // 2),
        (cands2, math.pi / 4, 3 * math.pi / 4, count // 2),
    ):
        take = min(share, len(cands))
        remaining = sorted(cands, key=lambda g: g.theta)
        for i in range(take):
            target = lo + (i + 0.5) * (hi - lo) / take
            best = min(remaining, key=lambda g: abs(g.theta - target))
            remaining.remove(best)
            picked.append(best)
    return sorted(picked, key=lambda g: g.theta)


#: Fractional offset of the s-sampling grids: keeps lines away from exact
#: half-pixel symmetry rows where the interpolated field sits at 1/2.
_S_OFFSET = 0.381966

def _line_points(grating: GratingSpec, s, t):
    """Torus (horizontal, vertical) coordinates along the grating lines."""
    slope = grating.p / grating.q
    s = np.asarray(s, float)[:, None]
    t = np.asarray(t, float)[None, :]
    if grating.family == 1:
        h, v = np.broadcast_arrays(t, s + t * slope)
    else:
        h, v = np.broadcast_arrays(s + t * slope, t)
    return h % 1.0, v % 1.0


#: Sub-pixel Gaussian applied before crossing counts; flattens the staircase
#: ripple of pixelized boundaries without moving symmetric 1/2-contours.
_SMOOTH_SIGMA = 0.7


def _smoothed_field(u: BinarySignal) -> np.ndarray:
    from .fourier import gaussian_filter, fft_forward_raw, fft_inverse_raw

    n = u.geometry.n
    hsize = 5 if n >= 5 else 3
    gains = gaussian_filter(_SMOOTH_SIGMA, hsize, u.geometry).gains
    return fft_inverse_raw(gains * fft_forward_raw(u.values, u.geometry), u.geometry).real


def _interp_on_lines(vals: np.ndarray, n: int, h: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Periodic bilinear interpolation of a field at torus points (h, v).

    Grid point x sits at torus coordinate x/n; interpolating the smoothed
    field gives a continuous function whose 1/2-levelset tracks the
    underlying jump curve with subpixel accuracy, so oblique lines count one
    crossing per boundary passage instead of every pixel staircase notch.
    """
    zv = v * n - 1.0  # rows index the vertical coordinate
    zh = h * n - 1.0
    i0 = np.floor(zv).astype(int)
    j0 = np.floor(zh).astype(int)
    fv = zv - i0
    fh = zh - j0
    i0 %= n
    j0 %= n
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    return (
        vals[i0, j0] * (1 - fv) * (1 - fh)
        + vals[i1, j0] * fv * (1 - fh)
        + vals[i0, j1] * (1 - fv) * fh
        + vals[i1, j1] * fv * fh
    )


def _threshold_crossings(samples: np.ndarray, closed: bool) -> np.ndarray:
    """Strict sign changes of (samples - 1/2) along axis 1, zeros skipped."""
    sign = np.sign(samples - 0.5).astype(np.int8)
    counts = np.empty(samples.shape[0], dtype=int)
    for i, row in enumerate(sign):
        nz = row[row != 0]
        if nz.size < 2:
            counts[i] = 0
            continue
        c = int(np.count_nonzero(nz[1:] != nz[:-1]))
        if closed and nz[0] != nz[-1]:
            c += 1
        counts[i] = c
    return counts


def _image_counts(u: BinarySignal, grating: GratingSpec, s_arr, closed: bool, t_samples: int):
    """Boundary-crossing counts per offset, refined by doubling until stable."""
    span = float(grating.q) if closed else 1.0
    field = _smoothed_field(u)
    n = u.geometry.n

    def counts_at(m: int) -> np.ndarray:
        if closed:
            t = np.arange(m) * (span / m)
        else:
            t = np.linspace(0.0, span, m + 1)
        h, v = _line_points(grating, s_arr, t)
        return _threshold_crossings(_interp_on_lines(field, n, h, v), closed)

    m = t_samples
    counts = counts_at(m)
    for _ in range(6):
        finer = counts_at(2 * m)
        if np.array_equal(finer, counts):
            return counts, True
        counts, m = finer, 2 * m
    return counts, False  # flagged: never stabilized at the refinement cap


def _spectrum_terms(v: Spectrum):
    """Nonzero (k_vertical, k_horizontal, a) coefficients."""
    kv, kh = v.geometry.freq_grids()
    nz = v.coeffs != 0
    return kv[nz].astype(int), kh[nz].astype(int), v.coeffs[nz]


def _spectrum_flow_counts(v: Spectrum, grating: GratingSpec, s_arr) -> np.ndarray:
    """Strict sign changes of v along the closed period-q flow, per offset.

    Along the flow the restriction is a 1D trig polynomial with integer
    frequencies k*q + k'*p (bounded by d sqrt(p^2+q^2)), so it is evaluated
    exactly from the coefficients on an alias-free grid.
    """
    kv, kh, coeff = _spectrum_terms(v)
    p, q = grating.p, grating.q
    if grating.family == 1:
        f = kh * q + kv * p
        ks = kv
    else:
        f = kv * q + kh * p
        ks = kh
    fmax = int(np.max(np.abs(f))) if f.size else 0
    m = 1 << max(8, (8 * max(fmax, 1) - 1).bit_length())
    s_arr = np.asarray(s_arr, float)
    phases = np.exp(2j * np.pi * np.outer(s_arr, ks)) * coeff[None, :]
    folded = np.zeros((len(s_arr), m), dtype=complex)
    np.add.at(folded, (slice(None), f % m), phases)
    samples = (m * np.fft.ifft(folded, axis=1)).real
    return np.count_nonzero(samples * np.roll(samples, 1, axis=1) < 0, axis=1)


def _spectrum_line_counts(v: Spectrum, grating: GratingSpec, s_arr, t_samples: int) -> np.ndarray:
    """Strict sign changes along open unit-length segments (cross-check path)."""
    kv, kh, coeff = _spectrum_terms(v)
    t = np.linspace(0.0, 1.0, t_samples + 1)
    counts = np.empty(len(s_arr), dtype=int)
    for i, s in enumerate(s_arr):
        h, vv = _line_points(grating, [s], t)
        phase = np.exp(2j * np.pi * (np.outer(h.ravel(), kh) + np.outer(vv.ravel(), kv)))
        samples = (phase @ coeff).real
        counts[i] = int(np.count_nonzero(samples[:-1] * samples[1:] < 0))
    return counts


def line_crossings(obj, grating: GratingSpec, s: float) -> int:
    """Crossing count along the single line with offset s.

    Binary images count value changes of the pixel function; spectra count
    strict sign changes of the band-limited function, evaluated exactly.
    """
    if isinstance(obj, BinarySignal):
        n = obj.geometry.n
        t_samples = int(round(1.0 / (grating.t_step or (1.0 / (4 * n)))))
        counts, _ = _image_counts(obj, grating, np.array([s]), closed=False, t_samples=t_samples)
        return int(counts[0])
    if isinstance(obj, Spectrum):
        return int(_spectrum_line_counts(obj, grating, [s], t_samples=4096)[0])
    raise TypeError("expected a 2D BinarySignal or Spectrum")


def avg_crossings(obj, grating: GratingSpec, variant: str = "line"):
    """Average directional crossing count for the grating's angle.

    variant "line" averages open unit segments over offsets in [0, 1);
    variant "flow" uses the closed period-q orbit over offsets in [0, 1/q),
    which is the alias-free choice for rational slopes.
    """
    if variant not in ("line", "flow"):
        raise ValueError("variant is 'line' or 'flow'")
    w = grating.weight
    if isinstance(obj, BinarySignal):
        if obj.geometry.ndim != 2:
            raise ValueError("crossing averages are for 2D inputs")
        n = obj.geometry.n
        t_samples = int(round(1.0 / (grating.t_step or (1.0 / (4 * n)))))
        if variant == "line":
            ns = grating.s_samples or 4 * n
            s_arr = (np.arange(ns) + _S_OFFSET) / ns
            counts, _ = _image_counts(obj, grating, s_arr, closed=False, t_samples=t_samples)
            return w * float(np.mean(counts))
        # Aligned flow grid: ns*q is a multiple of n, so translating the
        # image by whole pixels maps the offset set onto itself; the density
        # matches the 4n-offset line default.
        ns = grating.s_samples or max(n, 4 * n // grating.q)
        s_arr = (np.arange(ns) + _S_OFFSET) / (ns * grating.q)
        counts, _ = _image_counts(
            obj, grating, s_arr, closed=True, t_samples=t_samples * grating.q
        )
        return w * float(np.mean(counts)) / grating.q
    if isinstance(obj, Spectrum):
        ns = grating.s_samples or 64
        if variant == "flow":
            s_arr = (np.arange(ns) + _S_OFFSET) / (ns * grating.q)
            counts = _spectrum_flow_counts(obj, grating, s_arr)
            return w * float(np.mean(counts)) / grating.q
        s_arr = (np.arange(ns) + _S_OFFSET) / ns
        counts = _spectrum_line_counts(obj, grating, s_arr, t_samples=2048)
        return w * float(np.mean(counts))
    raise TypeError("expected a 2D BinarySignal or Spectrum")


@dataclass(frozen=True)
class ComplexityReport:
    """Per-angle crossing averages plus the derived diagnostics (estimates)."""

    gratings: tuple[GratingSpec, ...]
    k_values: tuple[float, ...]
    perimeter: float

    @property
    def max_k(self) -> float:
        return max(self.k_values)

    @property
    def d_lower_bound(self) -> float:
        return 0.5 * self.max_k

    def as_json_dict(self) -> dict:
        return {
            "k_theta": [
                {"theta": g.theta, "slope": f"{g.p}/{g.q}", "family": g.family, "value": k}
                for g, k in zip(self.gratings, self.k_values)
            ],
            "max": self.max_k,
            "perimeter": self.perimeter,
            "d_lower_bound": self.d_lower_bound,
        }


def _integrate_over_angles(gratings, values) -> float:
    """Cyclic trapezoid of K over one angle period of length pi."""
    order = np.argsort([g.theta for g in gratings])
    th = np.array([gratings[i].theta for i in order])
    kv = np.array([values[i] for i in order])
    gaps = np.diff(th, append=th[0] + math.pi)
    weights = 0.5 * (gaps + np.roll(gaps, 1))
    return float(np.sum(kv * weights))


def crofton_perimeter(
    u: BinarySignal, theta_samples: int = 32, q_max: int = 8, variant: str = "line"
) -> float:
    """Perimeter estimate: half the angle integral of the crossing average."""
    gratings = rational_angles(theta_samples, q_max)
    values = [avg_crossings(u, g, variant=variant) for g in gratings]
    return 0.5 * _integrate_over_angles(gratings, values)


def complexity_report(
    u: BinarySignal, theta_samples: int = 32, q_max: int = 8, variant: str = "line"
) -> ComplexityReport:
    gratings = tuple(rational_angles(theta_samples, q_max))
    values = tuple(avg_crossings(u, g, variant=variant) for g in gratings)
    return ComplexityReport(
        gratings=gratings,
        k_values=values,
        perimeter=0.5 * _integrate_over_angles(gratings, values),
    )


@dataclass(frozen=True)
class NecessaryCondition:
    holds: bool
    max_k_theta: float
    d: float


def check_necessary_d(
    u: BinarySignal, d: float, theta_samples: int = 32, q_max: int = 8
) -> NecessaryCondition:
    """Necessary condition for exact disk-d recovery: d >= max_theta K / 2."""
    report = complexity_report(u, theta_samples, q_max)
    return NecessaryCondition(holds=d >= report.d_lower_bound, max_k_theta=report.max_k, d=d)


def zero_free_ball_bound(mask: FrequencyMask) -> float:
    """Diameter sum_{k in S, k != 0} 1/(4 ||k||) of the guaranteed-zero ball.

    Any real function with spectrum on S \\ {0} has a zero in every closed
    ball of this diameter; DC is excluded from the sum (the bound is stated
    for masks without it).
    """
    indices = mask.indices()
    total = 0.0
    seen_nonzero = False
    for k in indices:
        norm = abs(k) if np.isscalar(k) else math.hypot(*k)
        if norm == 0:
            continue
        seen_nonzero = True
        total += 1.0 / (4.0 * norm)
    if not seen_nonzero:
        raise MaskError("mask has no nonzero frequencies")
    return total
