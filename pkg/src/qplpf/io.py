"""
File formats.

Series CSV
    Header ``t,value`` then one row per sample, both columns written with
    17 significant digits so float64 values survive a round trip exactly.

Image PGM
    Binary ``P5``, maxval 65535, big-endian 16-bit codes, row-major from the
    top row.  Codes map to floats affinely:
    ``value = lo + code * (hi - lo) / 65535``.  ``lo`` and ``hi`` live in the
    JSON sidecar ``<file>.json``; without a sidecar codes are read as
    ``code / maxval``.  Plain ``P2`` and 8-bit files are accepted on input.

Sidecars
    Every data file written here gets ``<file>.json`` holding its layout
    metadata plus whatever extra fields the caller passes (generation
    parameters, for instance).

All writes go to a temporary file in the target directory, then are
renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .embed import GridImage, SampleSeries
from .errors import QPLPFError

PGM_MAXVAL = 65535


class FormatError(QPLPFError, ValueError):
    """Input file is malformed."""


def atomic_write(path, data) -> None:
    path = Path(path)
    if isinstance(data, str):
        data = data.encode()
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_json(path, obj) -> None:
    atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_sidecar(path) -> dict:
    side = sidecar_path(path)
    if not side.exists():
        return {}
    with open(side) as fh:
        return json.load(fh)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_series_csv(path, series: SampleSeries, extra: dict | None = None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "value"])
    for t, v in zip(series.times, series.values):
        writer.writerow([fmt(t), fmt(v)])
    atomic_write(path, buf.getvalue())
    meta = {"format": "series-csv", "start_time": series.start_time, "dt": series.dt,
            "length": len(series)}
    meta.update(extra or {})
    write_json(sidecar_path(path), meta)


def read_series_csv(path) -> SampleSeries:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]][:2] != ["t", "value"]:
        raise FormatError(f"{path}: expected header 't,value'")
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows[1:] if r], dtype=float)
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed row ({exc})") from exc
    if data.size == 0:
        raise FormatError(f"{path}: no samples")
    meta = read_sidecar(path)
    if "dt" in meta and "start_time" in meta:
        start, dt = meta["start_time"], meta["dt"]
    else:
        t = data[:, 0]
        start = t[0]
        dt = (t[-1] - t[0]) / (t.size - 1) if t.size > 1 else 1.0
    return SampleSeries(start, dt, data[:, 1])


def image_codes(image: GridImage) -> tuple:
    """16-bit codes and the ``(lo, hi)`` range they span."""
    v = image.values
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        return np.zeros(v.shape, dtype=np.uint16), lo, hi
    codes = np.floor((v - lo) / (hi - lo) * PGM_MAXVAL + 0.5)
    return np.clip(codes, 0, PGM_MAXVAL).astype(np.uint16), lo, hi


def write_pgm(path, image: GridImage, extra: dict | None = None,
              codes: np.ndarray | None = None, lo: float | None = None,
              hi: float | None = None) -> None:
    if codes is None:
        codes, lo, hi = image_codes(image)
    h, w = codes.shape
    header = f"P5\n{w} {h}\n{PGM_MAXVAL}\n".encode("ascii")
    atomic_write(path, header + codes.astype(">u2").tobytes())
    meta = {"format": "pgm", "width": w, "height": h, "maxval": PGM_MAXVAL,
            "lo": lo, "hi": hi, "mapping": "value = lo + code * (hi - lo) / maxval"}
    meta.update(extra or {})
    write_json(sidecar_path(path), meta)


def _pgm_tokens(data: bytes, count: int, pos: int) -> tuple:
    tokens = []
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise FormatError("truncated PGM header")
        tokens.append(data[start:pos])
    return tokens, pos


def read_pgm(path) -> GridImage:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise FormatError(f"{path}: not a PGM file")
    try:
        (w, h, maxval), pos = _pgm_tokens(data, 3, 2)
        w, h, maxval = int(w), int(h), int(maxval)
        if magic == b"P5":
            dtype = ">u2" if maxval > 255 else "u1"
            start = pos + 1
            nbytes = w * h * np.dtype(dtype).itemsize
            if len(data) < start + nbytes:
                raise FormatError(f"{path}: truncated pixel data")
            codes = np.frombuffer(data, dtype=dtype, count=w * h, offset=start)
        else:
            tokens, _ = _pgm_tokens(data, w * h, pos)
            codes = np.array([int(t) for t in tokens])
    except (ValueError, IndexError) as exc:
        raise FormatError(f"{path}: malformed PGM ({exc})") from exc
    codes = codes.astype(float).reshape(h, w)
    meta = read_sidecar(path)
    if "lo" in meta and "hi" in meta:
        lo, hi = float(meta["lo"]), float(meta["hi"])
        values = lo + codes * (hi - lo) / maxval
    else:
        values = codes / maxval
    return GridImage(values)


def write_pcs_csv(path, projections: np.ndarray) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"pc{i + 1}" for i in range(projections.shape[1])])
    for row in projections:
        writer.writerow([fmt(v) for v in row])
    atomic_write(path, buf.getvalue())


def write_summary_csv(path, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["snr_db", "method", "median", "q25", "q75"])
    for snr, method, med, q25, q75 in rows:
        writer.writerow([fmt(snr), method, fmt(med), fmt(q25), fmt(q75)])
    atomic_write(path, buf.getvalue())
