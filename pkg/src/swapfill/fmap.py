"""FMAP binary interchange format for feature maps.

Layout: magic b"FMAP", then five little-endian u32 fields (version=1,
channels, height, width, stride), then channels*height*width little-endian
float32 values in (c, y, x) order. The header is exactly 24 bytes, so a
full file is 24 + 4*C*H*W bytes.
"""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from .errors import (
    DataError,
    FormatError,
    TruncatedPayloadError,
    UnsupportedVersionError,
)
from .types import FeatureMap

MAGIC = b"FMAP"
VERSION = 1
_HEADER = struct.Struct("<4s5I")
HEADER_SIZE = _HEADER.size  # 24 bytes


def write_fmap(fmap: FeatureMap, sink: BinaryIO) -> int:
    """Serialize `fmap` to `sink`; returns the number of bytes written."""
    header = _HEADER.pack(MAGIC, VERSION, fmap.channels, fmap.height,
                          fmap.width, fmap.stride)
    payload = np.ascontiguousarray(fmap.data, dtype="<f4").tobytes()
    written = 0
    for chunk in (header, payload):
        try:
            sink.write(chunk)
        except OSError as exc:
            raise OSError(f"fmap write failed at byte offset {written}: {exc}") from exc
        written += len(chunk)
    return written


def read_fmap(source: BinaryIO) -> FeatureMap:
    """Parse a FeatureMap from `source`, validating header and payload."""
    header = source.read(HEADER_SIZE)
    if len(header) < HEADER_SIZE:
        raise TruncatedPayloadError(
            f"fmap header truncated: got {len(header)} of {HEADER_SIZE} bytes")
    magic, version, channels, height, width, stride = _HEADER.unpack(header)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported fmap version {version}")
    if channels < 1 or height < 1 or width < 1 or stride < 1:
        raise FormatError(
            f"invalid fmap header dims C={channels} H={height} W={width} stride={stride}")

    expected = 4 * channels * height * width
    payload = source.read(expected)
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"fmap payload truncated: got {len(payload)} of {expected} bytes")

    flat = np.frombuffer(payload, dtype="<f4")
    finite = np.isfinite(flat)
    if not finite.all():
        first_bad = int(np.argmin(finite))
        raise DataError(f"non-finite value at flat index {first_bad}")
    data = flat.reshape(channels, height, width)
    return FeatureMap(data=data, stride=stride)
