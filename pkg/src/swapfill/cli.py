"""Command line entry point.

Subcommands: inpaint, match, metrics, make-mask, style. Machine-readable
outputs are JSON; images are PNG, masks PNG or PGM. All file writes are
atomic (temp file plus rename), so failed runs never leave partial output.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 geometry or
no-candidates error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .diffusion import DiffusionSettings
from .errors import FormatError, GeometryError, HoleSpecError
from .features import FeatureSpec
from .fmap import read_fmap
from .image_io import atomic_write_bytes, load_image, load_mask, save_image, save_mask
from .masks import parse_hole_spec, rasterize_hole
from .matching import match_brute_force, match_convolutional, resolve_threads
from .metrics import mean_l1, ssim
from .pipeline import InpaintConfig, inpaint_multiscale, style_transfer
from .types import FeatureMask

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_GEOMETRY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_features(text: str) -> FeatureSpec:
    if text == "builtin":
        return FeatureSpec(kind="builtin")
    if text.startswith("fmap:"):
        return FeatureSpec(kind="external", path=text[len("fmap:"):])
    raise HoleSpecError(f"features must be 'builtin' or 'fmap:PATH', got {text!r}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="swapfill",
                     description="Feature-space patch matching and image completion.")
    sub = parser.add_subparsers(dest="command", required=True)

    inpaint = sub.add_parser("inpaint", help="fill the hole of an image")
    inpaint.add_argument("--input", required=True)
    hole = inpaint.add_mutually_exclusive_group(required=True)
    hole.add_argument("--mask", help="mask file (PNG or PGM, >127 means hole)")
    hole.add_argument("--center-hole", type=int, metavar="N")
    hole.add_argument("--random-holes", metavar="MIN,MAX,COUNT")
    inpaint.add_argument("--output", required=True)
    inpaint.add_argument("--scales", type=int, default=2)
    inpaint.add_argument("--matcher", choices=["brute", "conv"], default="conv")
    inpaint.add_argument("--features", default="builtin")
    inpaint.add_argument("--patch-size", type=int, default=3)
    inpaint.add_argument("--iterations", type=int, default=1)
    inpaint.add_argument("--blend", type=int, default=4)
    inpaint.add_argument("--seed", type=int, default=0)
    inpaint.add_argument("--threads", type=int, default=None)
    inpaint.add_argument("--dump-coarse", metavar="PATH")
    inpaint.add_argument("--dump-assignment", metavar="PATH")

    match = sub.add_parser("match", help="run the patch matcher on a feature map")
    match.add_argument("--fmap", required=True)
    match.add_argument("--fmask", required=True,
                       help="hole raster at feature-grid resolution")
    match.add_argument("--out", required=True)
    match.add_argument("--matcher", choices=["brute", "conv"], required=True)
    match.add_argument("--patch-size", type=int, default=3)
    match.add_argument("--threads", type=int, default=None)

    metrics = sub.add_parser("metrics", help="compare two images")
    metrics.add_argument("--a", required=True)
    metrics.add_argument("--b", required=True)
    metrics.add_argument("--mask", default=None)

    make_mask = sub.add_parser("make-mask", help="rasterize a hole specification")
    make_mask.add_argument("--width", type=int, required=True)
    make_mask.add_argument("--height", type=int, required=True)
    make_mask.add_argument("--spec", required=True,
                           help="center:N | rect:Y,X,H,W | random:MIN,MAX,COUNT")
    make_mask.add_argument("--seed", type=int, default=0)
    make_mask.add_argument("--out", required=True)

    style = sub.add_parser("style", help="rebuild a content image from style patches")
    style.add_argument("--content", required=True)
    style.add_argument("--style", required=True)
    style.add_argument("--output", required=True)
    style.add_argument("--patch-size", type=int, default=3)
    style.add_argument("--features", default="builtin",
                       help="builtin | fmap:CONTENT_PATH,STYLE_PATH")
    style.add_argument("--threads", type=int, default=None)

    return parser


def _cmd_inpaint(args) -> int:
    image = load_image(args.input)
    if args.mask:
        mask = load_mask(args.mask)
    elif args.center_hole is not None:
        mask = rasterize_hole(parse_hole_spec(f"center:{args.center_hole}"),
                              image.height, image.width, seed=args.seed)
    else:
        mask = rasterize_hole(parse_hole_spec(f"random:{args.random_holes}"),
                              image.height, image.width, seed=args.seed)
    if not mask.matches(image):
        raise GeometryError(
            f"mask {mask.height}x{mask.width} does not match image "
            f"{image.height}x{image.width}")

    cfg = InpaintConfig(
        patch_size=args.patch_size,
        scales=args.scales,
        matcher=args.matcher,
        features=_parse_features(args.features),
        diffusion=DiffusionSettings(),
        blend_width=args.blend,
        iterations=args.iterations,
        seed=args.seed,
    )
    trace: dict | None = {} if (args.dump_coarse or args.dump_assignment) else None
    result = inpaint_multiscale(image, mask, cfg,
                                threads=resolve_threads(args.threads), trace=trace)
    save_image(result, args.output)
    if args.dump_coarse:
        save_image(trace["coarse"], args.dump_coarse)
    if args.dump_assignment:
        doc = trace["assignment"].to_json_dict()
        atomic_write_bytes(args.dump_assignment,
                           (json.dumps(doc, indent=1) + "\n").encode())
    return EXIT_OK


def _cmd_match(args) -> int:
    with open(args.fmap, "rb") as handle:
        fmap = read_fmap(handle)
    fmask_raster = load_mask(args.fmask)
    fmask = FeatureMask(data=fmask_raster.data)
    if not fmask.matches(fmap):
        raise GeometryError(
            f"fmask {fmask.height}x{fmask.width} does not match feature map "
            f"{fmap.height}x{fmap.width}")
    if args.matcher == "brute":
        assignment = match_brute_force(fmap, fmask, args.patch_size)
    else:
        assignment = match_convolutional(fmap, fmask, args.patch_size,
                                         threads=resolve_threads(args.threads))
    doc = assignment.to_json_dict()
    atomic_write_bytes(args.out, (json.dumps(doc, indent=1) + "\n").encode())
    return EXIT_OK


def _cmd_metrics(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    report = {"mean_l1_pct": mean_l1(a, b), "ssim": ssim(a, b)}
    if args.mask:
        mask = load_mask(args.mask)
        report["ssim_hole"] = ssim(a, b, mask)
    print(json.dumps(report))
    return EXIT_OK


def _cmd_make_mask(args) -> int:
    spec = parse_hole_spec(args.spec)
    mask = rasterize_hole(spec, args.height, args.width, seed=args.seed)
    save_mask(mask, args.out)
    return EXIT_OK


def _cmd_style(args) -> int:
    content = load_image(args.content)
    style_img = load_image(args.style)
    if args.features.startswith("fmap:"):
        paths = args.features[len("fmap:"):].split(",")
        if len(paths) != 2:
            raise HoleSpecError(
                "style with external features needs fmap:CONTENT_PATH,STYLE_PATH")
        content_spec = FeatureSpec(kind="external", path=paths[0])
        style_spec = FeatureSpec(kind="external", path=paths[1])
    elif args.features == "builtin":
        content_spec = FeatureSpec(kind="builtin")
        style_spec = None
    else:
        raise HoleSpecError(f"unrecognized features {args.features!r}")
    cfg = InpaintConfig(patch_size=args.patch_size, features=content_spec)
    result = style_transfer(content, style_img, cfg, style_features=style_spec,
                            threads=resolve_threads(args.threads))
    save_image(result, args.output)
    return EXIT_OK


_HANDLERS = {
    "inpaint": _cmd_inpaint,
    "match": _cmd_match,
    "metrics": _cmd_metrics,
    "make-mask": _cmd_make_mask,
    "style": _cmd_style,
}


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (HoleSpecError, ValueError) as exc:
        print(f"swapfill: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OSError) as exc:
        print(f"swapfill: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except GeometryError as exc:
        print(f"swapfill: error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
