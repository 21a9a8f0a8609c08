"""Exporter geometry, format compliance, determinism, and the end-to-end
handoff into the matching engine through its CLI and FMAP interfaces."""

import struct
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import torch
from PIL import Image
from torchvision.models import vgg19

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))
from export_features import ExportError, export_features, main  # noqa: E402

HEADER = struct.Struct("<4s5I")


@pytest.fixture(scope="session")
def weights_file(tmp_path_factory):
    # random-weight feature stack: geometry and format do not depend on the
    # trained values, and nothing downloads in this environment
    torch.manual_seed(0)
    model = vgg19(weights=None)
    path = tmp_path_factory.mktemp("weights") / "vgg19_features.pth"
    torch.save(model.features.state_dict(), path)
    return path


def make_png(tmp_path, size, name="input.png", seed=0):
    rng = np.random.default_rng(seed)
    data = (rng.random((size, size, 3)) * 255).astype(np.uint8)
    path = tmp_path / name
    Image.fromarray(data, "RGB").save(path)
    return path


def parse_header(path):
    raw = Path(path).read_bytes()
    magic, version, c, h, w, stride = HEADER.unpack(raw[:HEADER.size])
    return magic, version, c, h, w, stride, len(raw) - HEADER.size


def test_relu3_1_geometry_on_256(tmp_path, weights_file):
    image = make_png(tmp_path, 256)
    out = export_features(image, "relu3_1", tmp_path / "f.fmap", weights_file)
    magic, version, c, h, w, stride, payload = parse_header(out)
    assert magic == b"FMAP" and version == 1
    assert (c, h, w, stride) == (256, 64, 64, 4)
    assert payload == 4 * 256 * 64 * 64


def test_relu3_1_geometry_on_512(tmp_path, weights_file):
    image = make_png(tmp_path, 512)
    out = export_features(image, "relu3_1", tmp_path / "f.fmap", weights_file)
    _, _, c, h, w, stride, _ = parse_header(out)
    assert (c, h, w, stride) == (256, 128, 128, 4)


@pytest.mark.parametrize("layer,channels,stride", [
    ("relu2_1", 128, 2),
    ("relu4_1", 512, 8),
])
def test_other_layers(tmp_path, weights_file, layer, channels, stride):
    image = make_png(tmp_path, 128)
    out = export_features(image, layer, tmp_path / "f.fmap", weights_file)
    _, _, c, h, w, got_stride, _ = parse_header(out)
    assert (c, got_stride) == (channels, stride)
    assert h * stride == 128 and w * stride == 128


def test_non_multiple_input_is_resized_to_stride_grid(tmp_path, weights_file):
    image = make_png(tmp_path, 250)
    out = export_features(image, "relu3_1", tmp_path / "f.fmap", weights_file)
    _, _, _, h, w, stride, _ = parse_header(out)
    assert h * stride == w * stride  # square stays square
    assert abs(h * stride - 250) <= stride  # nearest multiple of the stride


def test_reexport_is_bit_identical(tmp_path, weights_file):
    image = make_png(tmp_path, 128)
    a = export_features(image, "relu3_1", tmp_path / "a.fmap", weights_file)
    b = export_features(image, "relu3_1", tmp_path / "b.fmap", weights_file)
    assert Path(a).read_bytes() == Path(b).read_bytes()


def test_missing_weights_error_names_expected_file(tmp_path, weights_file):
    image = make_png(tmp_path, 64)
    with pytest.raises(ExportError, match="vgg19"):
        export_features(image, "relu3_1", tmp_path / "f.fmap",
                        tmp_path / "nowhere.pth")


def test_unreadable_image_is_io_error(tmp_path, weights_file):
    bad = tmp_path / "not_an_image.png"
    bad.write_bytes(b"this is not a png")
    with pytest.raises(ExportError, match="cannot read image"):
        export_features(bad, "relu3_1", tmp_path / "f.fmap", weights_file)


def test_cli_entry(tmp_path, weights_file, capsys):
    image = make_png(tmp_path, 64)
    out = tmp_path / "f.fmap"
    assert main(["--image", str(image), "--layer", "relu2_1",
                 "--out", str(out), "--weights", str(weights_file)]) == 0
    assert out.exists()
    assert main(["--image", str(image), "--layer", "relu2_1",
                 "--out", str(tmp_path / "g.fmap"),
                 "--weights", str(tmp_path / "gone.pth")]) == 1


def test_exported_file_loads_in_engine_and_drives_inpaint(tmp_path, weights_file):
    # acceptance: the FMAP must load with zero validation errors and carry a
    # full inpaint run through the engine's public CLI
    from swapfill.features import load_external_features
    from swapfill.image_io import load_image

    image = make_png(tmp_path, 256, seed=3)
    fmap_path = export_features(image, "relu3_1", tmp_path / "f.fmap", weights_file)
    loaded = load_external_features(fmap_path, load_image(image))
    assert (loaded.channels, loaded.height, loaded.width) == (256, 64, 64)

    mask_path = tmp_path / "mask.pgm"
    run = subprocess.run(
        [sys.executable, "-m", "swapfill", "make-mask", "--width", "256",
         "--height", "256", "--spec", "center:96", "--seed", "0",
         "--out", str(mask_path)],
        capture_output=True, text=True)
    assert run.returncode == 0, run.stderr

    out_png = tmp_path / "filled.png"
    run = subprocess.run(
        [sys.executable, "-m", "swapfill", "inpaint",
         "--input", str(image), "--mask", str(mask_path),
         "--output", str(out_png), "--scales", "1", "--blend", "0",
         "--features", f"fmap:{fmap_path}"],
        capture_output=True, text=True)
    assert run.returncode == 0, run.stderr
    assert out_png.exists()
    result = load_image(out_png)
    assert (result.height, result.width) == (256, 256)
