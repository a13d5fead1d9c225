"""Command-line surface tying the pipelines together.

Subcommands: deblur, blur-map, estimate-kernels, build-lut, fuse-stack,
synth, metrics. Exit codes: 0 success, 1 runtime/I-O error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .blur import blur_map, patch_scores
from .config import Config, load_config_file
from .errors import ConfigError, FocusExtendError
from .estimate import estimate_kernel_map, kernel_montage, save_kernel_map
from .forward import add_noise, constant_profile, ramp_profile, synth_depth_blur
from .image_io import load_image, save_image
from .psf import load_lut, lut_build, save_lut
from .restore import deblur_image, mse, psnr
from .stack import fuse_stack, register_translation, shift_image


def _common_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH",
                        help="key=value config file; flags override its values")
    parser.add_argument("--patch", type=int, default=None,
                        help="patch size in pixels (default 64)")
    parser.add_argument("--stride", type=int, default=None,
                        help="patch stride in pixels (default 32)")
    parser.add_argument("--threads", type=int, default=None,
                        help="patch worker pool size, 0 = all cores (default 1)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for anything stochastic (default 0)")


def _resolve_config(args: argparse.Namespace) -> Config:
    """Defaults <- config file <- explicit flags, validated."""
    cfg = Config()
    if getattr(args, "config", None):
        cfg = replace(cfg, **load_config_file(args.config))
    overrides = {
        "patch_size": getattr(args, "patch", None),
        "stride": getattr(args, "stride", None),
        "threads": getattr(args, "threads", None),
        "seed": getattr(args, "seed", None),
        "lambda_w": getattr(args, "lambda_w", None),
        "lambda_k": getattr(args, "lambda_k", None),
        "sigma_scale": getattr(args, "sigma_scale", None),
        "kernel_size": getattr(args, "kernel_size", None),
        "lut_bins": getattr(args, "bins", None),
        "max_blur": getattr(args, "max_blur", None),
    }
    cfg = replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
    return cfg.validate()


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def _cmd_deblur(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    lut = None
    if args.method == "lut":
        if not args.lut:
            raise ConfigError("--method lut requires --lut PATH")
        lut = load_lut(args.lut)
    img = load_image(args.input)
    if args.emit_blurmaps:
        os.makedirs(args.emit_blurmaps, exist_ok=True)
        save_image(os.path.join(args.emit_blurmaps, "before.png"),
                   blur_map(img, cfg.patch_size, cfg.stride), bit_depth=16)
    restored = deblur_image(
        img, method=args.method, patch=cfg.patch_size, stride=cfg.stride,
        lambda_w=cfg.lambda_w, sigma_scale=cfg.sigma_scale,
        max_blur=cfg.max_blur, lut=lut, threads=cfg.threads,
    )
    save_image(args.output, restored)
    if args.emit_blurmaps:
        save_image(os.path.join(args.emit_blurmaps, "after.png"),
                   blur_map(restored, cfg.patch_size, cfg.stride), bit_depth=16)
    return 0


def _cmd_blur_map(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    img = load_image(args.input)
    bm = blur_map(img, cfg.patch_size, cfg.stride)
    save_image(args.output, bm, bit_depth=16)
    if args.csv:
        grid, scores = patch_scores(img, cfg.patch_size, cfg.stride)
        _write_csv(args.csv, "x,y,blur",
                   ((x, y, f"{s:.8f}") for (x, y), s in zip(grid.origins, scores)))
    return 0


def _cmd_estimate_kernels(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    sharp = load_image(args.sharp)
    blurry = load_image(args.blurry)
    km = estimate_kernel_map(sharp, blurry, patch=cfg.patch_size,
                             stride=cfg.stride, k=cfg.kernel_size,
                             lambda_k=cfg.lambda_k, threads=cfg.threads)
    save_kernel_map(km, args.output)
    if args.montage:
        save_image(args.montage, kernel_montage(km))
    return 0


def _cmd_build_lut(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    sharp = load_image(args.sharp)
    blurry = load_image(args.blurry)
    km = estimate_kernel_map(sharp, blurry, patch=cfg.patch_size,
                             stride=cfg.stride, k=cfg.kernel_size,
                             lambda_k=cfg.lambda_k, threads=cfg.threads)
    note = (f"sources={os.path.basename(args.sharp)}|"
            f"{os.path.basename(args.blurry)} patch={cfg.patch_size} "
            f"stride={cfg.stride} lambda_k="
            f"{'rel1e-3' if cfg.lambda_k is None else cfg.lambda_k}")
    lut = lut_build(km, bin_count=cfg.lut_bins, scale_note=note)
    save_lut(lut, args.output)
    return 0


def _cmd_fuse_stack(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    images = [load_image(p) for p in args.images]
    ref_index = args.ref_index if args.ref_index is not None else len(images) // 2
    if not 0 <= ref_index < len(images):
        raise ConfigError(f"--ref-index {ref_index} out of range")

    def align(pair):
        i, img = pair
        if i == ref_index:
            return img
        dx, dy, _ = register_translation(images[ref_index], img)
        return shift_image(img, -dx, -dy)

    if cfg.threads == 1:
        aligned = [align(p) for p in enumerate(images)]
    else:
        from concurrent.futures import ThreadPoolExecutor
        workers = cfg.threads if cfg.threads > 0 else None
        with ThreadPoolExecutor(max_workers=workers) as pool:
            aligned = list(pool.map(align, enumerate(images)))
    fused, selection = fuse_stack(aligned, cfg.patch_size, cfg.stride)
    save_image(args.out, fused)
    if args.emit_selection:
        from .patches import axis_origins
        h, w = images[0].shape[:2]
        origins = [(x, y) for y in axis_origins(h, cfg.patch_size, cfg.stride)
                   for x in axis_origins(w, cfg.patch_size, cfg.stride)]
        _write_csv(args.emit_selection, "x,y,index",
                   ((x, y, s) for (x, y), s in zip(origins, selection)))
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    img = load_image(args.input)
    if args.profile == "constant":
        profile = constant_profile(img.shape, args.sigma)
    else:
        profile = ramp_profile(img.shape, args.sigma_min, args.sigma_max)
    if img.ndim == 3:
        planes = [synth_depth_blur(img[:, :, c], profile, cfg.patch_size,
                                   cfg.stride) for c in range(3)]
        degraded = np.stack(planes, axis=2)
    else:
        degraded = synth_depth_blur(img, profile, cfg.patch_size, cfg.stride)
    if args.noise > 0:
        degraded = add_noise(degraded, args.noise, cfg.seed)
    save_image(args.output, degraded)
    sidecar = args.sidecar or args.output + ".sigma.csv"
    from .patches import axis_origins
    h, w = img.shape[:2]
    rows = []
    for y in axis_origins(h, cfg.patch_size, cfg.stride):
        for x in axis_origins(w, cfg.patch_size, cfg.stride):
            s = profile[y + cfg.patch_size // 2, x + cfg.patch_size // 2]
            rows.append((x, y, f"{s:.8f}"))
    _write_csv(sidecar, "x,y,sigma", rows)
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    ref = load_image(args.reference)
    test = load_image(args.test)
    err = mse(ref, test)
    print(f"mse={err:.10f}")
    print(f"psnr={'inf' if err == 0 else format(psnr(ref, test), '.6f')}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="focusextend",
        description="Extend the in-focus region of defocus-blurred images by "
                    "patch-wise Wiener deconvolution.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deblur", help="restore an image with blur-level PSFs")
    p.add_argument("input", metavar="IN")
    p.add_argument("output", metavar="OUT")
    p.add_argument("--method", choices=("gaussian", "lut"), required=True)
    p.add_argument("--lut", metavar="PATH", help="kernel lookup table JSON")
    p.add_argument("--lambda", dest="lambda_w", type=float, default=None,
                   help="Wiener regularization weight (default 0.1)")
    p.add_argument("--sigma-scale", type=float, default=None,
                   help="blur-level to sigma factor (default 50)")
    p.add_argument("--max-blur", type=float, default=None,
                   help="patches scoring above this pass through (default 1.0)")
    p.add_argument("--emit-blurmaps", metavar="DIR",
                   help="write before/after 16-bit blur maps into DIR")
    _common_options(p)
    p.set_defaults(run=_cmd_deblur)

    p = sub.add_parser("blur-map", help="write the per-pixel blur map")
    p.add_argument("input", metavar="IN")
    p.add_argument("output", metavar="OUT", help="16-bit grayscale PNG")
    p.add_argument("--csv", metavar="PATH", help="also write per-patch scores")
    _common_options(p)
    p.set_defaults(run=_cmd_blur_map)

    p = sub.add_parser("estimate-kernels",
                       help="estimate per-patch kernels from a sharp/blurry pair")
    p.add_argument("sharp", metavar="SHARP")
    p.add_argument("blurry", metavar="BLURRY")
    p.add_argument("output", metavar="OUT", help="kernel-map JSON")
    p.add_argument("--kernel-size", type=int, default=None,
                   help="odd kernel support (default 15)")
    p.add_argument("--lambda-k", type=float, default=None,
                   help="absolute ridge weight (default: 1e-3 * max|I|^2)")
    p.add_argument("--montage", metavar="PNG",
                   help="tile sheet of kernels in ascending blur order")
    _common_options(p)
    p.set_defaults(run=_cmd_estimate_kernels)

    p = sub.add_parser("build-lut",
                       help="build a blur-binned kernel lookup table")
    p.add_argument("sharp", metavar="SHARP")
    p.add_argument("blurry", metavar="BLURRY")
    p.add_argument("output", metavar="OUT", help="lookup-table JSON")
    p.add_argument("--bins", type=int, default=None,
                   help="blur bins over [0,1] (default 100)")
    p.add_argument("--kernel-size", type=int, default=None)
    p.add_argument("--lambda-k", type=float, default=None)
    _common_options(p)
    p.set_defaults(run=_cmd_build_lut)

    p = sub.add_parser("fuse-stack",
                       help="register a focal stack and fuse its sharp regions")
    p.add_argument("images", metavar="IMG", nargs="+")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--ref-index", type=int, default=None,
                   help="registration reference frame (default: middle)")
    p.add_argument("--emit-selection", metavar="CSV",
                   help="write the per-cell winning stack index")
    _common_options(p)
    p.set_defaults(run=_cmd_fuse_stack)

    p = sub.add_parser("synth", help="synthetically degrade a sharp image")
    p.add_argument("input", metavar="IN")
    p.add_argument("output", metavar="OUT")
    p.add_argument("--profile", choices=("ramp", "constant"), default="ramp")
    p.add_argument("--sigma", type=float, default=2.0,
                   help="sigma for the constant profile")
    p.add_argument("--sigma-min", type=float, default=0.0)
    p.add_argument("--sigma-max", type=float, default=8.0)
    p.add_argument("--noise", type=float, default=0.0,
                   help="additive Gaussian noise level")
    p.add_argument("--sidecar", metavar="CSV",
                   help="per-patch true sigma table (default OUT.sigma.csv)")
    _common_options(p)
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("metrics", help="print mse/psnr between two images")
    p.add_argument("reference", metavar="REF")
    p.add_argument("test", metavar="TEST")
    p.set_defaults(run=_cmd_metrics)

    return parser


def dispatch(argv: list) -> int:
    """Route an argument list to its subcommand and map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on --help (0) and usage errors (2)
        return int(exc.code or 0)
    try:
        return args.run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FocusExtendError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
