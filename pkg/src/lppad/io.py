"""Raster file formats: binary PGM/PPM for eyeballing, raw float64 for tests.

The raw format exists because padding experiments need lossless round trips
of signed data; 8-bit PNM formats are kept only to inspect padded imagery in
ordinary viewers.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

#: Leading bytes identifying the raw float64 raster container.
RAW_MAGIC = b"LPRASTR1"

#: Total bytes before the sample payload: magic, H, W, C, and 4 reserved.
RAW_HEADER_SIZE = 24


def _read_pnm_tokens(data: bytes, count: int) -> tuple[list[int], int]:
    """Parse ``count`` whitespace-separated header integers, honoring ``#``
    comments, returning them plus the payload offset (one byte past the
    single whitespace character that terminates the header)."""
    tokens: list[int] = []
    i = 2  # past the magic
    while len(tokens) < count:
        if i >= len(data):
            raise ValueError("truncated header")
        ch = data[i : i + 1]
        if ch == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
        elif ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(data) and data[j : j + 1].isdigit():
                j += 1
            tokens.append(int(data[i:j]))
            i = j
        else:
            raise ValueError(f"unexpected header byte {ch!r}")
    if i >= len(data) or not data[i : i + 1].isspace():
        raise ValueError("header not terminated by whitespace")
    return tokens, i + 1


def _read_pnm(data: bytes, channels: int) -> np.ndarray:
    (width, height, maxval), offset = _read_pnm_tokens(data, 3)
    if maxval != 255:
        raise ValueError(f"only maxval 255 is supported, got {maxval}")
    need = width * height * channels
    payload = data[offset : offset + need]
    if len(payload) != need:
        raise ValueError(
            f"payload holds {len(payload)} bytes, header promises {need}"
        )
    samples = np.frombuffer(payload, dtype=np.uint8).astype(np.float64) / 255.0
    return samples.reshape(height, width, channels)


def _read_raw(data: bytes) -> np.ndarray:
    if len(data) < RAW_HEADER_SIZE:
        raise ValueError("truncated header")
    h, w, c = struct.unpack_from("<III", data, len(RAW_MAGIC))
    if min(h, w, c) < 1:
        raise ValueError(f"bad dimensions ({h}, {w}, {c})")
    need = h * w * c * 8
    payload = data[RAW_HEADER_SIZE:]
    if len(payload) != need:
        raise ValueError(
            f"payload holds {len(payload)} bytes, header promises {need}"
        )
    samples = np.frombuffer(payload, dtype="<f8")
    return samples.reshape(h, w, c).astype(np.float64)


def read_raster(path) -> np.ndarray:
    """Load a raster as float64 with shape (H, W, C), sniffing the format.

    PGM and PPM samples are mapped linearly onto [0, 1]; the raw container
    is passed through bit for bit.
    """
    data = Path(path).read_bytes()
    if data.startswith(RAW_MAGIC):
        return _read_raw(data)
    if data.startswith(b"P5"):
        return _read_pnm(data, 1)
    if data.startswith(b"P6"):
        return _read_pnm(data, 3)
    raise ValueError(f"{path}: unrecognized raster format")


def _quantize(arr: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and round half away from zero onto 0..255."""
    if not np.all(np.isfinite(arr)):
        raise ValueError("cannot quantize non-finite samples")
    clamped = np.clip(arr, 0.0, 1.0)
    return np.floor(clamped * 255.0 + 0.5).astype(np.uint8)


def _format_for(path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("pgm", "ppm", "raw-f64"):
            raise ValueError(f"unknown format {fmt!r}")
        return fmt
    suffix = Path(path).suffix.lower()
    return {".pgm": "pgm", ".ppm": "ppm"}.get(suffix, "raw-f64")


def write_raster(raster: np.ndarray, path, fmt: str | None = None) -> None:
    """Write a raster, inferring the format from the suffix unless given.

    Unknown suffixes get the raw float64 container, whose read-back is
    bit-exact.  PGM requires one channel and PPM three.
    """
    arr = np.asarray(raster, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or min(arr.shape) < 1:
        raise ValueError(f"raster must be (H, W) or (H, W, C) and non-empty, got {arr.shape}")
    fmt = _format_for(path, fmt)
    h, w, c = arr.shape
    if fmt == "raw-f64":
        header = RAW_MAGIC + struct.pack("<III", h, w, c) + b"\x00" * 4
        payload = np.ascontiguousarray(arr, dtype="<f8").tobytes()
        Path(path).write_bytes(header + payload)
        return
    if fmt == "pgm":
        if c != 1:
            raise ValueError(f"PGM is single-channel; raster has {c} (use PPM)")
        magic = b"P5"
    else:
        if c != 3:
            raise ValueError(f"PPM needs exactly 3 channels; raster has {c}")
        magic = b"P6"
    body = _quantize(arr).tobytes()
    Path(path).write_bytes(magic + b"\n%d %d\n255\n" % (w, h) + body)
