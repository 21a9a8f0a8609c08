#!/usr/bin/env python3
"""Export VGG19 activations to the FMAP interchange format.

Writes the relu2_1 / relu3_1 / relu4_1 activation of an image as a binary
FMAP file (magic "FMAP", u32 version=1, C, H, W, stride, then C*H*W
little-endian float32 in channel-major order), so a feature-space matching
engine can consume real CNN features in place of its built-in extractor.

The input is resized (bilinear) to the nearest multiple of the layer's
stride first, which keeps stride * grid exactly equal to the resized image
size. Preprocessing is per-channel mean subtraction on [0, 1] RGB; the
activations themselves are exported raw.

Usage:
    python export_features.py --image photo.png --layer relu3_1 --out feat.fmap
    python export_features.py ... --weights vgg19_features.pth   # local weights
"""

from __future__ import annotations

import argparse
import os
import struct
import sys
import tempfile
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torchvision.models import VGG19_Weights, vgg19

# features-module index of each activation and its cumulative pool stride
LAYERS = {
    "relu2_1": (6, 2),
    "relu3_1": (11, 4),
    "relu4_1": (20, 8),
}
RGB_MEAN = (0.485, 0.456, 0.406)
FMAP_MAGIC = b"FMAP"
FMAP_VERSION = 1
_WEIGHTS_FILE = "vgg19-dcbb9e9d.pth"


class ExportError(Exception):
    """Export failed in a way the caller can act on."""


def _expected_weights_path() -> Path:
    return Path(torch.hub.get_dir()) / "checkpoints" / _WEIGHTS_FILE


def load_backbone(weights_path: str | Path | None = None) -> torch.nn.Module:
    """VGG19 feature stack, pretrained weights from `weights_path` or the
    standard torchvision download/cache."""
    if weights_path is not None:
        weights_path = Path(weights_path)
        if not weights_path.exists():
            raise ExportError(
                f"weights file not found: {weights_path} (pass --weights with a "
                f"VGG19 state dict, or place the pretrained file at "
                f"{_expected_weights_path()})")
        state = torch.load(weights_path, map_location="cpu", weights_only=True)
        model = vgg19(weights=None)
        if any(key.startswith("features.") for key in state):
            model.load_state_dict(state)
        else:
            model.features.load_state_dict(state)
    else:
        try:
            model = vgg19(weights=VGG19_Weights.IMAGENET1K_V1)
        except Exception as exc:
            raise ExportError(
                f"pretrained VGG19 weights unavailable ({exc}); download "
                f"{_WEIGHTS_FILE} to {_expected_weights_path()} or pass --weights "
                f"with a local state dict") from exc
    model.eval()
    return model.features


def _load_image(image_path: str | Path, stride: int) -> np.ndarray:
    try:
        with Image.open(image_path) as pil:
            rgb = pil.convert("RGB")
    except (FileNotFoundError, OSError) as exc:
        raise ExportError(f"cannot read image {image_path}: {exc}") from exc
    width, height = rgb.size
    new_w = max(stride, int(round(width / stride)) * stride)
    new_h = max(stride, int(round(height / stride)) * stride)
    if (new_w, new_h) != (width, height):
        rgb = rgb.resize((new_w, new_h), Image.BILINEAR)
    return np.asarray(rgb, dtype=np.float32) / 255.0


def _fmap_bytes(activation: np.ndarray, stride: int) -> bytes:
    channels, height, width = activation.shape
    header = struct.pack("<4s5I", FMAP_MAGIC, FMAP_VERSION,
                         channels, height, width, stride)
    return header + np.ascontiguousarray(activation, dtype="<f4").tobytes()


def export_features(image_path: str | Path, layer: str, out_path: str | Path,
                    weights_path: str | Path | None = None) -> Path:
    """Run the image through VGG19 up to `layer` and write the activation
    as an FMAP file. Returns the output path."""
    if layer not in LAYERS:
        raise ExportError(f"layer must be one of {sorted(LAYERS)}, got {layer!r}")
    index, stride = LAYERS[layer]
    backbone = load_backbone(weights_path)

    pixels = _load_image(image_path, stride)
    mean = np.asarray(RGB_MEAN, dtype=np.float32)
    batch = torch.from_numpy((pixels - mean).transpose(2, 0, 1)[None])

    torch.set_num_threads(1)  # bit-reproducible inference
    with torch.no_grad():
        out = batch
        for module in backbone[:index + 1]:
            out = module(out)
    activation = out[0].numpy()

    out_path = Path(out_path)
    payload = _fmap_bytes(activation, stride)
    fd, tmp_name = tempfile.mkstemp(dir=out_path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(payload)
        os.replace(tmp_name, out_path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return out_path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[1])
    parser.add_argument("--image", required=True)
    parser.add_argument("--layer", choices=sorted(LAYERS), default="relu3_1")
    parser.add_argument("--out", required=True)
    parser.add_argument("--weights", default=None,
                        help="local VGG19 state dict (full model or features-only)")
    args = parser.parse_args(argv)
    try:
        path = export_features(args.image, args.layer, args.out, args.weights)
    except ExportError as exc:
        print(f"export_features: error: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
