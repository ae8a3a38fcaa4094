"""Batch command-line frontend.

Subcommands cover the full pipeline: palette quantization with error
histograms, curve-model fitting, shading classification, exemplar-based
detection and recognition, a quantizer-comparison harness, and a seeded
synthetic-scene renderer. Every image command accepts multiple inputs and
can spread them over worker threads (--jobs); detection and recognition
share one immutable model across workers. Artifacts are written
atomically (temp file + rename) and runs with identical inputs and seed
produce byte-identical text artifacts; reports reference file names only,
never paths.

Exit codes: 0 success, 2 configuration error, 3 decode error (including
malformed model documents), 4 fit error (degenerate or ill-conditioned
data), 5 internal error. When a batch mixes outcomes, the exit code of
the first failing input (in argument order) is returned.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curve import deserialize_model, fit_curve, serialize_model
from .detect import detect as detect_regions
from .detect import recognize as recognize_probe
from .errors import (
    ColorModelError,
    ConfigError,
    DecodeError,
    DegenerateInputError,
    IllConditionedError,
    MalformedDocumentError,
    VersionMismatchError,
)
from .geometry import planarity_measure
from .quantize import METHODS, error_histogram, palette_document, quantize
from .raster import (
    atomic_write_text,
    image_content_hash,
    load_image,
    render_overlay,
    save_image,
)
from .shading import classify_variation, synthesize_lambertian
from .synth import random_lambertian_scene

__all__ = ["RunConfig", "run", "main"]

OUT_DIR_ENV = "RGBCURVE_OUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DECODE = 3
EXIT_FIT = 4
EXIT_INTERNAL = 5

COMMANDS = ("quantize", "fit", "classify", "detect", "recognize",
            "compare-quantizers", "render-synthetic")

DEFAULTS = {
    "method": "minimum-variance",
    "palette_size": 256,
    "dt": 25.0,
    "ls": 10,
    "lt": 150.0,
    "kappa": 0.02,
    "extrapolation": 0.10,
    "seed": 0,
    "shading_v1_min": 96.0,
    "reflectance_v1_max": 89.0,
    "width": 192,
    "height": 192,
    "min_region_pixels": 50,
    "coverage_mode": "both",
    "jobs": 1,
}

_CONFIG_KEYS = set(DEFAULTS) | {"out_dir", "report_format"}

_MIN_PIXELS_WARN = 250_000  # 0.25 MP; below this results get noisy


@dataclass
class RunConfig:
    """Fully resolved run: command, inputs, output sink, parameters."""

    command: str
    images: tuple[Path, ...] = ()
    model_path: Path | None = None
    out_dir: Path = Path(".")
    report_format: str = "text"
    params: dict = field(default_factory=dict)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgbcurve",
        description="Color-curve modeling and exemplar-based material detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, image=True):
        if image:
            p.add_argument("images", nargs="+", metavar="image",
                           help="input image(s), PNG or JPEG")
            p.add_argument("--jobs", type=int, default=None,
                           help="parallel worker slots for multiple inputs")
        p.add_argument("--out-dir", default=None,
                       help=f"output directory (default: ${OUT_DIR_ENV} or .)")
        p.add_argument("--config", default=None,
                       help="JSON file of parameter defaults")
        p.add_argument("--report-format", choices=("text", "csv"), default=None)
        p.add_argument("--seed", type=int, default=None)

    def palette_opts(p):
        p.add_argument("--method", choices=METHODS, default=None)
        p.add_argument("--palette-size", type=int, default=None)

    p = sub.add_parser("quantize", help="reduce an image to a color palette")
    common(p)
    palette_opts(p)

    p = sub.add_parser("fit", help="fit the plane + cubic color model")
    common(p)
    palette_opts(p)
    p.add_argument("--extrapolation", type=float, default=None,
                   help="domain extension per side as a fraction of the u-range")

    p = sub.add_parser("classify",
                       help="label color variation as shading or reflectance")
    common(p)
    palette_opts(p)

    p = sub.add_parser("detect", help="find exemplar-like regions in probes")
    common(p)
    p.add_argument("--model", required=True, help="model document from 'fit'")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--ls", type=int, default=None)
    p.add_argument("--lt", type=float, default=None)

    p = sub.add_parser("recognize", help="score probes against an exemplar model")
    common(p)
    p.add_argument("--model", required=True, help="model document from 'fit'")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)

    p = sub.add_parser("compare-quantizers",
                       help="planarity of all four quantizers per image")
    common(p)
    p.add_argument("--palette-size", type=int, default=None)

    p = sub.add_parser("render-synthetic",
                       help="render a seeded synthetic diffuse scene")
    common(p, image=False)
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)

    return parser


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return doc


def _validate(params: dict) -> dict:
    checks = {
        "palette_size": lambda v: v >= 1,
        "dt": lambda v: v > 0,
        "ls": lambda v: v >= 0,
        "lt": lambda v: v >= 0,
        "kappa": lambda v: v >= 0,
        "extrapolation": lambda v: 0.0 <= v <= 1.0,
        "width": lambda v: v >= 1,
        "height": lambda v: v >= 1,
        "min_region_pixels": lambda v: v >= 0,
        "jobs": lambda v: v >= 1,
    }
    for key, ok in checks.items():
        if key in params and not ok(params[key]):
            raise ConfigError(f"parameter {key}={params[key]!r} is out of range")
    if params.get("method") not in (None, *METHODS):
        raise ConfigError(f"unknown method {params['method']!r}")
    if params.get("coverage_mode") not in ("both", "either"):
        raise ConfigError(f"unknown coverage_mode {params['coverage_mode']!r}")
    if not params["reflectance_v1_max"] < params["shading_v1_min"]:
        raise ConfigError("reflectance_v1_max must be below shading_v1_min")
    return params


def _resolve(args: argparse.Namespace) -> RunConfig:
    file_cfg = _load_config_file(getattr(args, "config", None))
    params = dict(DEFAULTS)
    for key, value in file_cfg.items():
        if key in params:
            params[key] = value
    for key in DEFAULTS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            params[key] = cli_value
    _validate(params)

    out_dir = getattr(args, "out_dir", None)
    if out_dir is None:
        out_dir = file_cfg.get("out_dir")
    if out_dir is None:
        out_dir = os.environ.get(OUT_DIR_ENV, ".")

    report_format = getattr(args, "report_format", None)
    if report_format is None:
        report_format = file_cfg.get("report_format", "text")
    if report_format not in ("text", "csv"):
        raise ConfigError(f"unknown report format {report_format!r}")

    images = tuple(Path(p) for p in getattr(args, "images", []) or [])
    return RunConfig(
        command=args.command,
        images=images,
        model_path=Path(args.model) if getattr(args, "model", None) else None,
        out_dir=Path(out_dir),
        report_format=report_format,
        params=params,
    )


def _load_probe(image: Path) -> np.ndarray:
    img = load_image(image)
    if img.shape[0] * img.shape[1] < _MIN_PIXELS_WARN:
        print(f"warning: {image.name} is below 0.25 MP; "
              "models from small inputs are noisy", file=sys.stderr)
    return img


def _load_model(config: RunConfig):
    try:
        text = config.model_path.read_text()
    except OSError as exc:
        raise DecodeError(f"cannot read model {config.model_path}: {exc}") from exc
    return deserialize_model(text)


def _write_report(config: RunConfig, stem: str, suffix: str,
                  rows: list[tuple[str, str]]) -> Path:
    if config.report_format == "csv":
        body = "key,value\n" + "".join(f"{k},{v}\n" for k, v in rows)
        path = config.out_dir / f"{stem}.{suffix}.csv"
    else:
        body = "".join(f"{k}: {v}\n" for k, v in rows)
        path = config.out_dir / f"{stem}.{suffix}.txt"
    atomic_write_text(path, body)
    return path


def _pm_rows(pm) -> list[tuple[str, str]]:
    r1, r2 = pm.rounded()
    return [("v1", f"{r1:.2f}"), ("v2", f"{r2:.2f}")]


def _cmd_quantize(config: RunConfig, image: Path, model) -> None:
    img = _load_probe(image)
    p = config.params
    palette = quantize(img, method=p["method"], palette_size=p["palette_size"],
                       seed=p["seed"])
    hist = error_histogram(img, palette)
    stem = image.stem
    atomic_write_text(config.out_dir / f"{stem}.palette.txt",
                      palette_document(palette))
    atomic_write_text(config.out_dir / f"{stem}.errors.csv", hist.to_csv())
    save_image(config.out_dir / f"{stem}.quantized.png", palette.reconstruct())
    pm = planarity_measure(palette.colors)
    rows = [("method", palette.method),
            ("palette_colors", str(len(palette.colors))),
            *_pm_rows(pm),
            ("mean_error", repr(hist.mean_error)),
            ("max_error", repr(hist.max_error))]
    _write_report(config, stem, "quantize", rows)
    print(f"quantized {image.name}: {len(palette.colors)} colors, "
          f"mean error {hist.mean_error:.3f}")


def _cmd_fit(config: RunConfig, image: Path, model) -> None:
    img = _load_probe(image)
    p = config.params
    palette = quantize(img, method=p["method"], palette_size=p["palette_size"],
                       seed=p["seed"])
    provenance = {
        "sourceImageHash": image_content_hash(img),
        "quantizer": palette.method,
        "paletteSize": p["palette_size"],
    }
    fitted = fit_curve(palette, extrapolation_fraction=p["extrapolation"],
                       provenance=provenance)
    stem = image.stem
    model_path = config.out_dir / f"{stem}.model.json"
    atomic_write_text(model_path, serialize_model(fitted))
    rows = [("method", palette.method),
            ("palette_colors", str(len(palette.colors))),
            *_pm_rows(fitted.planarity),
            ("arc_length", repr(fitted.arc_length)),
            ("sample_count", str(fitted.sample_count)),
            ("u_domain", f"{fitted.u_domain[0]!r} {fitted.u_domain[1]!r}"),
            ("model", model_path.name)]
    _write_report(config, stem, "fit", rows)
    print(f"fit {image.name}: PM {fitted.planarity}, "
          f"arc length {fitted.arc_length:.1f}")


def _cmd_classify(config: RunConfig, image: Path, model) -> None:
    img = _load_probe(image)
    p = config.params
    palette = quantize(img, method=p["method"], palette_size=p["palette_size"],
                       seed=p["seed"])
    result = classify_variation(palette.colors,
                                shading_v1_min=p["shading_v1_min"],
                                reflectance_v1_max=p["reflectance_v1_max"])
    rows = [("label", result.label),
            *_pm_rows(result.pm),
            ("line_residual", repr(result.line_residual)),
            ("shading_v1_min", repr(float(p["shading_v1_min"]))),
            ("reflectance_v1_max", repr(float(p["reflectance_v1_max"])))]
    _write_report(config, image.stem, "classify", rows)
    print(f"{image.name}: {result.label} (PM {result.pm})")


def _cmd_detect(config: RunConfig, image: Path, model) -> None:
    img = _load_probe(image)
    p = config.params
    result = detect_regions(img, model, d_t=p["dt"], l_s=p["ls"], l_t=p["lt"],
                            min_region_pixels=p["min_region_pixels"],
                            coverage_mode=p["coverage_mode"])
    stem = image.stem
    accepted = result.accepted_mask()
    save_image(config.out_dir / f"{stem}.mask.png",
               np.where(accepted[..., None], 255.0, 0.0).repeat(3, axis=2))
    save_image(config.out_dir / f"{stem}.overlay.png",
               render_overlay(img, ~result.conformity_mask, (255.0, 0.0, 0.0)))
    n_accepted = sum(1 for r in result.regions if r.accepted)
    if config.report_format == "csv":
        body = "region,pixel_count,coverage_length,accepted\n"
        for i, region in enumerate(result.regions):
            body += (f"{i},{region.pixel_count},{region.coverage_length!r},"
                     f"{str(region.accepted).lower()}\n")
        atomic_write_text(config.out_dir / f"{stem}.detect.csv", body)
    else:
        lines = [f"model: {config.model_path.name}",
                 f"dt: {p['dt']!r}", f"ls: {p['ls']}", f"lt: {p['lt']!r}",
                 f"conforming_pixels: {int(result.conformity_mask.sum())}",
                 f"regions: {len(result.regions)}",
                 f"accepted_regions: {n_accepted}"]
        for i, region in enumerate(result.regions):
            lines.append(f"region {i}: pixels={region.pixel_count} "
                         f"coverage_length={region.coverage_length!r} "
                         f"accepted={str(region.accepted).lower()}")
        atomic_write_text(config.out_dir / f"{stem}.detect.txt",
                          "\n".join(lines) + "\n")
    print(f"{image.name}: {n_accepted} accepted region(s) "
          f"of {len(result.regions)}")


def _cmd_recognize(config: RunConfig, image: Path, model) -> None:
    img = _load_probe(image)
    p = config.params
    score = recognize_probe(img, model, kappa=p["kappa"], d_t=p["dt"],
                            l_s_floor=p["ls"],
                            coverage_mode=p["coverage_mode"])
    rows = [("model", config.model_path.name),
            ("score", repr(score.score)),
            ("adaptive_l_s", str(score.adaptive_l_s)),
            ("conforming_pixels", str(score.conforming_count)),
            ("arc_length", repr(model.arc_length))]
    _write_report(config, image.stem, "recognize", rows)
    print(f"{image.name}: score {score.score:.1f} "
          f"of arc {model.arc_length:.1f}")


def _cmd_compare_quantizers(config: RunConfig, image: Path, model) -> None:
    img = _load_probe(image)
    p = config.params
    rows = [("palette_size", str(p["palette_size"]))]
    v2s = []
    for method in METHODS:
        palette = quantize(img, method=method, palette_size=p["palette_size"],
                           seed=p["seed"])
        pm = planarity_measure(palette.colors)
        r1, r2 = pm.rounded()
        rows.append((method, f"v1={r1:.2f} v2={r2:.2f}"))
        v2s.append(pm.v2)
    delta = max(abs(a - b) for a in v2s for b in v2s)
    rows.append(("max_delta_v2", f"{delta:.4f}"))
    _write_report(config, image.stem, "quantizers", rows)
    print(f"{image.name}: max pairwise |dv2| = {delta:.4f}")


def _cmd_render_synthetic(config: RunConfig, image, model) -> None:
    p = config.params
    scene = random_lambertian_scene(height=p["height"], width=p["width"],
                                    seed=p["seed"])
    img = synthesize_lambertian(scene)
    stem = f"synthetic_seed{p['seed']}"
    save_image(config.out_dir / f"{stem}.png", img)
    rows = [("seed", str(p["seed"])),
            ("width", str(p["width"])), ("height", str(p["height"])),
            ("albedo", " ".join(repr(a) for a in scene.albedo)),
            ("flux", repr(scene.flux)),
            ("light_direction", " ".join(repr(c) for c in scene.light_direction))]
    _write_report(config, stem, "scene", rows)
    print(f"rendered {stem}.png ({p['width']}x{p['height']})")


_COMMANDS = {
    "quantize": _cmd_quantize,
    "fit": _cmd_fit,
    "classify": _cmd_classify,
    "detect": _cmd_detect,
    "recognize": _cmd_recognize,
    "compare-quantizers": _cmd_compare_quantizers,
    "render-synthetic": _cmd_render_synthetic,
}

_NEEDS_MODEL = {"detect", "recognize"}


def _guarded(action) -> int:
    """Run one unit of work, mapping library errors to exit codes."""
    try:
        action()
        return EXIT_OK
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DecodeError, MalformedDocumentError, VersionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except (DegenerateInputError, IllConditionedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except ColorModelError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def run(config: RunConfig) -> int:
    """Execute a resolved run; returns the process exit code.

    Multiple input images are dispatched to a thread pool of `jobs`
    workers; each writes its own artifacts, so outputs are identical
    regardless of worker count. The first failing input (in argument
    order) decides a nonzero exit code.
    """
    try:
        config.out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {config.out_dir}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    command = _COMMANDS[config.command]
    if config.command == "render-synthetic":
        return _guarded(lambda: command(config, None, None))

    model = None
    if config.command in _NEEDS_MODEL:
        loaded = []
        code = _guarded(lambda: loaded.append(_load_model(config)))
        if code != EXIT_OK:
            return code
        model = loaded[0]

    def worker(image: Path) -> int:
        return _guarded(lambda: command(config, image, model))

    jobs = min(config.params["jobs"], len(config.images))
    if jobs <= 1:
        codes = [worker(image) for image in config.images]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            codes = list(pool.map(worker, config.images))
    return next((code for code in codes if code != EXIT_OK), EXIT_OK)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _resolve(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
