"""File I/O: PNG images, PNG/PGM masks, atomic writes.

Images are stored as 8-bit RGB PNG; quantization to 255 levels happens
here and nowhere else. Mask files treat any value > 127 as hole.
"""

from __future__ import annotations

import io
import os
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from .errors import FormatError
from .types import Image, Mask


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write `data` to `path` via a temp file and rename; never leaves a
    partial file behind on failure."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _pil_format_for(path: Path) -> str:
    if path.suffix.lower() == ".pgm":
        return "PPM"
    return "PNG"


def load_image(path: str | Path) -> Image:
    try:
        with PILImage.open(path) as pil:
            rgb = pil.convert("RGB")
            data = np.asarray(rgb, dtype=np.float64) / 255.0
    except FileNotFoundError as exc:
        raise FormatError(f"cannot read image: {exc}") from exc
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise FormatError(f"cannot decode image {path}: {exc}") from exc
    return Image(data=data)


def save_image(image: Image, path: str | Path) -> None:
    path = Path(path)
    quantized = np.clip(np.round(image.data * 255.0), 0, 255).astype(np.uint8)
    pil = PILImage.fromarray(quantized, mode="RGB")
    buffer = io.BytesIO()
    pil.save(buffer, format=_pil_format_for(path))
    atomic_write_bytes(path, buffer.getvalue())


def load_mask(path: str | Path) -> Mask:
    try:
        with PILImage.open(path) as pil:
            gray = pil.convert("L")
            data = np.asarray(gray, dtype=np.uint8)
    except FileNotFoundError as exc:
        raise FormatError(f"cannot read mask: {exc}") from exc
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise FormatError(f"cannot decode mask {path}: {exc}") from exc
    return Mask(data=data > 127)


def save_mask(mask: Mask, path: str | Path) -> None:
    path = Path(path)
    data = np.where(mask.data, 255, 0).astype(np.uint8)
    pil = PILImage.fromarray(data, mode="L")
    buffer = io.BytesIO()
    pil.save(buffer, format=_pil_format_for(path))
    atomic_write_bytes(path, buffer.getvalue())
