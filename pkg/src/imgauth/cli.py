"""imgauth command-line tool.

Subcommands: verify, synth, calibrate, train, recognize, bench. Every
command takes --config; --seed overrides the configured training seed.

Exit codes: 0 success/match, 1 error, 3 forged, 4 rejected.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import (
    PipelineConfig,
    load_config,
    save_config,
    with_seed,
    with_threshold,
)
from .detect import detect_forgery, spectrum_csv
from .gallery import load_gallery
from .image_io import CropRect, GrayImage, crop, load_pgm, save_pgm
from .modelio import load_model, save_model
from .pipeline import (
    ForgedGalleryError,
    bench_hidden,
    bench_subjects,
    calibrate_detector,
    recognize,
    train_recognizer,
)
from .resample import SingularTransformError, apply_affine, synthesis_params

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FORGED = 3
EXIT_REJECTED = 4


class CommandError(Exception):
    """User-facing failure; message goes to stderr, exit code 1."""


def _read_image(path: str) -> GrayImage:
    p = Path(path)
    if not p.is_file():
        raise CommandError(f"cannot read image file {path}")
    try:
        return load_pgm(p.read_bytes())
    except ValueError as exc:
        raise CommandError(f"cannot decode {path}: {exc}") from exc


def _load_cfg(path: str | None, seed: int | None) -> PipelineConfig:
    try:
        cfg = load_config(path) if path else PipelineConfig()
    except (OSError, ValueError) as exc:
        raise CommandError(f"cannot load config {path}: {exc}") from exc
    return with_seed(cfg, seed) if seed is not None else cfg


def _parse_crop(text: str) -> CropRect:
    try:
        x0, y0, w, h = (int(t) for t in text.split(","))
        return CropRect(x0=x0, y0=y0, w=w, h=h)
    except ValueError as exc:
        raise CommandError(f"bad --crop {text!r}, expected x0,y0,w,h: {exc}") from exc


def cmd_verify(args) -> int:
    cfg = _load_cfg(args.config, args.seed)
    img = _read_image(args.image)
    verdict = detect_forgery(img, cfg.detector)
    if args.csv_out:
        Path(args.csv_out).write_text(spectrum_csv(img, cfg.detector), encoding="utf-8")
    if verdict.forged:
        peak = verdict.report
        best = max(peak.entries, key=lambda e: (e.strength, -e.angle))
        print(
            f"FORGED score={verdict.score!r} threshold={verdict.threshold!r} "
            f"angle={peak.global_peak_angle} freq={best.dominant_frequency!r}"
        )
        return EXIT_FORGED
    print(f"AUTHENTIC score={verdict.score!r} threshold={verdict.threshold!r}")
    return EXIT_OK


def cmd_synth(args) -> int:
    img = _read_image(args.image)
    try:
        params = synthesis_params(
            img.width, img.height, scale=args.scale, rotate_deg=args.rotate_deg, skew=args.skew
        )
        out = apply_affine(img, params, args.kernel)
    except SingularTransformError as exc:
        raise CommandError(str(exc)) from exc
    Path(args.out).write_bytes(save_pgm(out))
    print(
        f"params a0={params.a0!r} a1={params.a1!r} a2={params.a2!r} "
        f"b0={params.b0!r} b1={params.b1!r} b2={params.b2!r}"
    )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _load_cfg(args.config, args.seed)
    root = Path(args.originals_dir)
    if not root.is_dir():
        raise CommandError(f"{args.originals_dir} is not a directory")
    paths = sorted(root.glob("*.pgm"))
    if len(paths) < 10:
        raise CommandError(f"calibration needs at least 10 originals, found {len(paths)}")
    originals = [_read_image(str(p)) for p in paths]
    result = calibrate_detector(originals, cfg.detector)
    save_config(with_threshold(cfg, result.tau), args.config_out)
    print(
        f"threshold={result.tau!r} balanced_accuracy={result.balanced_accuracy!r} "
        f"originals={len(result.original_scores)} forgeries={len(result.forgery_scores)}"
    )
    return EXIT_OK


def _training_csv(history) -> str:
    lines = ["epoch,mse,seconds"]
    for rec in history:
        lines.append(f"{rec.epoch},{rec.mse!r},{rec.wall_time!r}")
    return "\n".join(lines) + "\n"


def cmd_train(args) -> int:
    cfg = _load_cfg(args.config, args.seed)
    try:
        gallery = load_gallery(args.gallery_dir)
    except (OSError, ValueError) as exc:
        raise CommandError(str(exc)) from exc
    try:
        outcome = train_recognizer(gallery, cfg)
    except ForgedGalleryError as exc:
        print("FORGED gallery images:", file=sys.stderr)
        for path, score in exc.offenders:
            print(f"  {path} score={score!r}", file=sys.stderr)
        return EXIT_FORGED
    save_model(outcome.model, args.model_out)
    if args.train_log and outcome.history:
        Path(args.train_log).write_text(_training_csv(outcome.history), encoding="utf-8")
    if outcome.pca_k_used is not None and outcome.pca_k_used != cfg.pca_k:
        print(f"note: pca_k clamped to {outcome.pca_k_used} for {len(gallery.entries)} images")
    if outcome.final_mse is None:
        print(f"stored {len(gallery.entries)} gallery features for euclidean matching")
    else:
        epochs = outcome.history[-1].epoch
        print(f"final_mse={outcome.final_mse!r} epochs={epochs}")
        if not outcome.goal_met:
            print(
                f"warning: error goal {cfg.train.error_goal!r} not reached "
                f"within {cfg.train.max_epochs} epochs"
            )
    return EXIT_OK


def cmd_recognize(args) -> int:
    cfg = _load_cfg(args.config, args.seed) if args.config else None
    img = _read_image(args.image)
    if args.crop:
        rect = _parse_crop(args.crop)
        try:
            img = crop(img, rect)
        except ValueError as exc:
            raise CommandError(str(exc)) from exc
    try:
        models = [load_model(p) for p in args.models]
    except (OSError, ValueError) as exc:
        raise CommandError(f"cannot load model: {exc}") from exc

    reject_below = cfg.reject_below if cfg else 0.0
    detector = cfg.detector if cfg else None
    best = None
    for model in models:
        try:
            result = recognize(img, model, reject_below, detector=detector)
        except ValueError as exc:
            raise CommandError(str(exc)) from exc
        if result.verdict.forged:
            v = result.verdict
            print(f"FORGED score={v.score!r} threshold={v.threshold!r}")
            return EXIT_FORGED
        if best is None or result.confidence > best.confidence:
            best = result
    if best.matched:
        print(f"MATCH {best.label} confidence={best.confidence!r}")
        return EXIT_OK
    print(f"REJECTED confidence={best.confidence!r}")
    return EXIT_REJECTED


def cmd_bench(args) -> int:
    cfg = _load_cfg(args.config, args.seed)
    try:
        gallery = load_gallery(args.gallery_dir)
    except (OSError, ValueError) as exc:
        raise CommandError(str(exc)) from exc
    try:
        if args.hidden_sweep:
            rows = bench_hidden(gallery, cfg)
            lines = ["hidden,epochs,seconds_per_epoch,macs_per_epoch"]
            for h, epochs, spe, macs in rows:
                lines.append(f"{h},{epochs},{spe!r},{macs}")
        else:
            rows = bench_subjects(gallery, cfg)
            lines = ["subjects,train_images,test_images,accuracy"]
            for c, ntr, nte, acc in rows:
                lines.append(f"{c},{ntr},{nte},{acc!r}")
    except (ValueError, ForgedGalleryError) as exc:
        raise CommandError(str(exc)) from exc
    Path(args.csv_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    for line in lines:
        print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imgauth",
        description="Authenticate images against resampling forgeries; recognize authentic faces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="pipeline config JSON")
        p.add_argument("--seed", type=int, help="override the configured training seed")

    p = sub.add_parser("verify", help="authenticate one image")
    p.add_argument("image", help="PGM image to test")
    p.add_argument("--csv-out", help="write the angle,frequency,magnitude spectrum CSV here")
    add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="synthesize a resampling forgery")
    p.add_argument("image", help="source PGM image")
    p.add_argument("out", help="output PGM path")
    p.add_argument("--scale", type=float, default=1.0, help="content magnification factor")
    p.add_argument("--rotate-deg", type=float, default=0.0, help="content rotation, degrees CCW")
    p.add_argument("--skew", type=float, default=0.0, help="horizontal shear per unit height")
    p.add_argument("--kernel", choices=("nearest", "linear", "cubic"), default="linear")
    add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("calibrate", help="fix the verdict threshold from an originals corpus")
    p.add_argument("originals_dir", help="directory of original .pgm images (>= 10)")
    p.add_argument("config_out", help="where to write the updated config JSON")
    add_common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("train", help="train a recognizer over an authenticated gallery")
    p.add_argument("gallery_dir", help="gallery directory with manifest.tsv")
    p.add_argument("model_out", help="where to write the model JSON")
    p.add_argument("--train-log", help="write the epoch,mse,seconds training CSV here")
    add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="verify, then match one probe image")
    p.add_argument("image", help="probe PGM image")
    p.add_argument("models", nargs="+", help="model JSON file(s); best match across models wins")
    p.add_argument("--crop", help="x0,y0,w,h rectangle to cut before processing")
    add_common(p)
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("bench", help="hidden-width or subject-count sweeps")
    p.add_argument("gallery_dir", help="gallery directory with manifest.tsv")
    p.add_argument("csv_out", help="where to write the sweep CSV")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--hidden-sweep", action="store_true",
                      help="hidden widths 30,60,90,180,360: per-epoch seconds and MACs")
    mode.add_argument("--subject-sweep", action="store_true",
                      help="subject counts 2,4,...: rank-1 accuracy on the per-subject split "
                           "(last third of each subject's sorted files held out)")
    add_common(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
