"""File formats: 1D CSV signals, PGM binary images, plain-text real grids,
measurement CSV, and mask index lists.

Conventions: 1D signals are one value per line.  2D binary images are PGM
(P2 or P5) with 0 <-> 0 and 255 <-> 1 at maxval 255 (grayscale inputs are
thresholded at half the maxval).  2D real grids are space-separated decimal
rows.  Measurement files are CSV rows ``k1[,k2],re,im`` under a header line
``# geometry h N``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fourier import MeasurementSet, make_mask
from .grids import BinarySignal, GridGeometry, RealSignal

__all__ = [
    "read_signal_csv",
    "write_signal_csv",
    "as_binary_signal",
    "read_pgm",
    "write_pgm",
    "read_real_grid",
    "write_real_grid",
    "read_measurements",
    "write_measurements",
    "read_mask_indices",
    "write_report_json",
    "read_signal_any",
    "write_signal_any",
]


def write_signal_csv(path, sig) -> None:
    values = np.asarray(sig.values, float)
    if values.ndim != 1:
        raise ValueError("CSV signals are 1D; use PGM or a real grid for 2D")
    with open(path, "w") as fh:
        if isinstance(sig, BinarySignal):
            fh.writelines(f"{int(v)}\n" for v in values)
        else:
            fh.writelines(f"{v:.17g}\n" for v in values)


def read_signal_csv(path) -> RealSignal:
    values = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                values.append(float(line))
    return RealSignal(GridGeometry(1, len(values)), np.array(values))


def as_binary_signal(sig: RealSignal) -> BinarySignal:
    """Reinterpret exactly-binary values; raises if any value is not 0/1."""
    return BinarySignal(sig.geometry, sig.values)


def write_pgm(path, u: BinarySignal, ascii_format: bool = False) -> None:
    if u.geometry.ndim != 2:
        raise ValueError("PGM output is for 2D binary signals")
    n = u.geometry.n
    pixels = (u.values * 255).astype(np.uint8)
    if ascii_format:
        with open(path, "w") as fh:
            fh.write(f"P2\n{n} {n}\n255\n")
            for row in pixels:
                fh.write(" ".join(str(int(p)) for p in row) + "\n")
        return
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n255\n".encode())
        fh.write(pixels.tobytes())


def _pgm_tokens(data: bytes):
    """Header tokens of a PNM file, skipping # comments."""
    pos = 0
    while True:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        yield data[start:pos].decode(), pos


def read_pgm(path) -> BinarySignal:
    data = Path(path).read_bytes()
    tokens = _pgm_tokens(data)
    magic, _ = next(tokens)
    if magic not in ("P2", "P5"):
        raise ValueError(f"unsupported PNM magic {magic!r}")
    width, _ = next(tokens)
    height, _ = next(tokens)
    maxval, pos = next(tokens)
    width, height, maxval = int(width), int(height), int(maxval)
    if width != height:
        raise ValueError("grids are square: PGM width must equal height")
    if maxval <= 0 or maxval > 255:
        raise ValueError("only 8-bit PGM is supported")
    if magic == "P5":
        raster = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos + 1)
        pixels = raster.reshape(height, width).astype(int)
    else:
        values = [int(tok) for tok, _ in _iter_remaining(tokens)]
        if len(values) != width * height:
            raise ValueError("P2 raster has the wrong number of samples")
        pixels = np.array(values).reshape(height, width)
    return BinarySignal(GridGeometry(2, width), (pixels > maxval / 2).astype(float))


def _iter_remaining(tokens):
    for item in tokens:
        if not item[0]:
            return
        yield item


def write_real_grid(path, sig: RealSignal) -> None:
    if sig.geometry.ndim != 2:
        raise ValueError("real grid output is for 2D signals")
    np.savetxt(path, sig.values, fmt="%.17g")


def read_real_grid(path) -> RealSignal:
    values = np.loadtxt(path)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("real grid must be square")
    return RealSignal(GridGeometry(2, values.shape[0]), values)


def write_measurements(path, meas: MeasurementSet) -> None:
    g = meas.geometry
    with open(path, "w") as fh:
        fh.write(f"# geometry {g.ndim} {g.n}\n")
        for k in meas.mask.indices():
            val = meas.values[g.nat_index(k)]
            coords = (k,) if np.isscalar(k) else k
            cols = ",".join(str(c) for c in coords)
            fh.write(f"{cols},{val.real:.17g},{val.imag:.17g}\n")


def read_measurements(path) -> MeasurementSet:
    geometry = None
    entries = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts[:1] == ["geometry"]:
                    geometry = GridGeometry(int(parts[1]), int(parts[2]))
                continue
            cols = line.split(",")
            *kparts, re_s, im_s = cols
            k = tuple(int(c) for c in kparts)
            entries.append((k, complex(float(re_s), float(im_s))))
    if geometry is None:
        raise ValueError("measurement file is missing the '# geometry h N' header")
    if any(len(k) != geometry.ndim for k, _ in entries):
        raise ValueError("frequency arity does not match the header geometry")
    values = np.zeros(geometry.shape, dtype=complex)
    seen = {}
    for k, val in entries:
        idx = geometry.nat_index(k if geometry.ndim > 1 else k[0])
        seen[idx] = val
        values[idx] = val
    # Fill missing conjugate partners so half-spectrum files round-trip.
    for idx, val in seen.items():
        neg = tuple((-c) % geometry.n for c in idx)
        if neg not in seen:
            values[neg] = np.conj(val)
    mask_indices = [
        k if geometry.ndim > 1 else k[0] for k, _ in entries
    ]
    mask = make_mask("explicit", mask_indices, geometry)
    return MeasurementSet(mask, np.where(mask.selector, values, 0.0))


def read_mask_indices(path) -> list:
    """Frequency index list: lines ``k1[,k2]``, # comments allowed."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coords = tuple(int(c) for c in line.split(","))
            out.append(coords[0] if len(coords) == 1 else coords)
    return out


def write_report_json(path, report: dict) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_signal_any(path):
    """Dispatch on extension: .csv -> 1D, .pgm -> 2D binary, .txt -> 2D real."""
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return read_signal_csv(path)
    if suffix == ".pgm":
        return read_pgm(path)
    if suffix in (".txt", ".grid"):
        return read_real_grid(path)
    raise ValueError(f"cannot infer signal format from {path!r}")


def write_signal_any(path, sig) -> None:
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        write_signal_csv(path, sig)
    elif suffix == ".pgm":
        if not isinstance(sig, BinarySignal):
            raise ValueError("PGM output requires a binary signal")
        write_pgm(path, sig)
    elif suffix in (".txt", ".grid"):
        if isinstance(sig, BinarySignal):
            sig = sig.to_real()
        write_real_grid(path, sig)
    else:
        raise ValueError(f"cannot infer signal format from {path!r}")
