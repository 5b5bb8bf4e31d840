"""Command line entry point: ``odm <subcommand> ...``.

Exit codes: 0 success, 1 a check or metric threshold failed, 2 bad input.
Summaries go to stdout; logging and diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

log = logging.getLogger("odm")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad paths, formats or arguments; maps to exit code 2."""


# -- image i/o ----------------------------------------------------------------------------

def load_image(path, size: int | None = None) -> np.ndarray:
    """Decode a PNG/PPM into a (3, H, W) float32 array in [0, 1], optionally resized to size x size."""
    from PIL import Image, UnidentifiedImageError
    try:
        with Image.open(path) as im:
            if im.format not in ("PNG", "PPM"):
                raise InputError(f"{path}: unsupported image format {im.format} (PNG or PPM expected)")
            im = im.convert("RGB")
            if size is not None and im.size != (size, size):
                im = im.resize((size, size), Image.BILINEAR)
            arr = np.asarray(im, dtype=np.float32) / 255.0
    except (OSError, UnidentifiedImageError) as exc:
        raise InputError(f"cannot read image {path}: {exc}") from None
    return arr.transpose(2, 0, 1)


def save_png(path, arr: np.ndarray):
    """Write a 2-D uint8 array (grey) or a (3, H, W) float array in [0, 1] (RGB)."""
    from PIL import Image
    if arr.ndim == 3:
        arr = (np.clip(arr.transpose(1, 2, 0), 0, 1) * 255).round().astype(np.uint8)
    Image.fromarray(arr).save(path, format="PNG")


def find_image(images_dir, image_id: str) -> Path:
    for ext in (".png", ".ppm", ".PNG", ".PPM"):
        p = Path(images_dir) / f"{image_id}{ext}"
        if p.exists():
            return p
    raise InputError(f"no PNG/PPM image for {image_id!r} in {images_dir}")


def heat_to_png(heat: np.ndarray, size: int) -> np.ndarray:
    """(grid*grid,) attention mass -> size x size greyscale, max-normalised."""
    grid = int(round(np.sqrt(heat.size)))
    h = heat.reshape(grid, grid)
    h = h / h.max() if h.max() > 0 else h
    rep = size // grid
    return (np.kron(h, np.ones((rep, rep))) * 255).round().astype(np.uint8)


def _scaled(ann, size: int):
    from .annot import SceneAnnotation
    from .glyph import scale_instance
    sx, sy = size / ann.width, size / ann.height
    return SceneAnnotation(ann.image_id, size, size, tuple(scale_instance(i, sx, sy) for i in ann.instances))


def _read_annotations(path):
    from .annot import AnnotationError, read_canonical
    try:
        return read_canonical(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except AnnotationError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_model(path):
    from .train import FormatError, model_from_checkpoint
    try:
        return model_from_checkpoint(path)
    except OSError as exc:
        raise InputError(f"cannot read checkpoint {path}: {exc.strerror}") from None
    except (FormatError, KeyError, ValueError) as exc:
        raise InputError(f"bad checkpoint {path}: {exc}") from None


# -- subcommands ---------------------------------------------------------------------------

def cmd_import(args) -> int:
    from .annot import (AnnotationError, SceneAnnotation, extent, iter_canonical, parse_quad_file,
                        parse_weak_line, write_canonical)
    src = Path(args.src)
    records, errors, lines_bad = [], [], 0

    def fail(exc):
        nonlocal lines_bad
        lines_bad += 1
        if not args.lenient:
            raise InputError(str(exc))
        log.warning("skipped: %s", exc)

    if args.format == "icdar-quad":
        files = sorted(src.glob("*.txt")) if src.is_dir() else [src]
        if not files:
            raise InputError(f"no .txt files under {src}")
        for f in files:
            errs: list = []
            try:
                with open(f, encoding="utf-8-sig") as fh:
                    insts = parse_quad_file(fh, lenient=args.lenient, errors=errs)
            except OSError as exc:
                raise InputError(f"cannot read {f}: {exc.strerror}") from None
            except AnnotationError as exc:
                fail(f"{f.name}: {exc}")
            for e in errs:
                fail(f"{f.name}: {e}")
            image_id = f.stem[3:] if f.stem.startswith("gt_") else f.stem
            w, h = (args.width, args.height) if args.width and args.height else extent(insts)
            records.append(SceneAnnotation(image_id, w, h, tuple(insts)))
    else:
        try:
            fh = open(src, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {src}: {exc.strerror}") from None
        with fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    if args.format == "canonical":
                        records.extend(iter_canonical([line]))
                    else:
                        image_id, insts = parse_weak_line(line, lineno)
                        w, h = (args.width, args.height) if args.width and args.height else extent(insts)
                        records.append(SceneAnnotation(image_id, w, h, tuple(insts)))
                except AnnotationError as exc:
                    fail(f"line {lineno}: {exc}")
    write_canonical(records, args.out)
    n_inst = sum(len(r.instances) for r in records)
    print(f"imported {len(records)} images, {n_inst} instances, {lines_bad} errors")
    return EXIT_OK


def _glyphs(args):
    from .glyph import FontError, builtin_font, load_font
    if args.font:
        try:
            return load_font(args.font)
        except (FontError, OSError) as exc:
            raise InputError(f"cannot load font {args.font}: {exc}") from None
    return builtin_font()


def cmd_gen_labels(args) -> int:
    from .glyph import render_label
    glyphs = _glyphs(args)
    anns = _read_annotations(args.annotations)
    keep = None
    if args.keep_indices is not None:
        try:
            keep = {int(k) for k in args.keep_indices.split(",") if k.strip()}
        except ValueError:
            raise InputError(f"--keep-indices expects comma-separated integers, got {args.keep_indices!r}")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for ann in anns:
        if args.size:
            ann = _scaled(ann, args.size)
        canvas = render_label(ann, glyphs, (ann.width, ann.height), keep=keep)
        save_png(out / f"{ann.image_id}.png", canvas.to_png_array())
        rows.append((ann.image_id, len(canvas.rendered), len(canvas.skipped)))
    with open(out / "manifest.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["image_id", "instances_rendered", "instances_skipped"])
        w.writerows(rows)
    print(f"rendered {len(rows)} label images to {out}")
    return EXIT_OK


def cmd_filter_weak(args) -> int:
    from .annot import AnnotationError, filter_weak, write_canonical
    anns = _read_annotations(args.src)
    try:
        kept = [filter_weak(a, args.min_conf, args.min_size) for a in anns]
    except AnnotationError as exc:
        raise InputError(str(exc)) from None
    write_canonical(kept, args.out)
    print(f"kept {sum(len(a.instances) for a in kept)} of {sum(len(a.instances) for a in anns)} instances")
    return EXIT_OK


def _train_config(args):
    from .train import TrainConfig, apply_overrides
    d = {}
    if args.config:
        try:
            with open(args.config) as fh:
                d = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"config {args.config} is not valid JSON: {exc}") from None
    try:
        d = apply_overrides(d, args.set or [])
        if args.seed is not None:
            d["seed"] = args.seed
        return TrainConfig.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad config: {exc}") from None


def _dataset(args, size: int):
    from .synth import make_dataset
    from .train import Sample
    if args.synth:
        return [Sample(img, ann) for img, ann in make_dataset(args.synth, seed=args.data_seed, size=size)]
    if not (args.annotations and args.images):
        raise InputError("give --annotations and --images, or --synth N")
    return [Sample(load_image(find_image(args.images, a.image_id), size), _scaled(a, size))
            for a in _read_annotations(args.annotations)]


def cmd_pretrain(args) -> int:
    from .train import Trainer, TrainingError
    cfg = _train_config(args)
    log.info("resolved config: %s", json.dumps(cfg.to_dict(), sort_keys=True))
    data = _dataset(args, cfg.image_size)
    if not data:
        raise InputError("training set is empty")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tr = Trainer(cfg)
    try:
        rows = tr.fit(data, metrics_path=out / "metrics.csv", checkpoint_dir=out)
    except TrainingError as exc:
        log.error("%s", exc)
        return EXIT_FAIL
    tr.save(out / "final.ckpt")
    last = rows[-1] if rows else None
    summary = f"trained {len(rows)} steps" + (f", final total loss {last.total:.4f}" if last else "")
    print(f"{summary}; checkpoint {out / 'final.ckpt'}")
    return EXIT_OK


def predict_regions(model, image: np.ndarray, texts, link_radius: int = 0, min_area: float = 16):
    from .evaluation import mask_to_regions
    from .model import tokenize
    tokens = tokenize([list(texts)], max_instances=model.config.max_instances, max_len=model.config.max_len) \
        if texts else None
    out = model.predict(image[None], tokens)
    mask = (out.logits.data[0, 0] > 0).astype(np.uint8)
    return mask_to_regions(mask, min_area=min_area, link_radius=link_radius), out


def cmd_eval(args) -> int:
    from .evaluation import gt_polygons, score_dataset
    gts = {a.image_id: a for a in _read_annotations(args.annotations)}
    pairs = []
    if args.preds:
        preds = {a.image_id: a for a in _read_annotations(args.preds)}
        for image_id, gt in gts.items():
            pred = preds.get(image_id)
            pairs.append((gt_polygons(pred) if pred else [], gt_polygons(gt)))
    else:
        if not (args.ckpt and args.images):
            raise InputError("give --preds, or --ckpt together with --images")
        model, cfg, _ = _load_model(args.ckpt)
        size = cfg.image_size
        for gt in gts.values():
            scaled = _scaled(gt, size)
            texts = [i.text for i in scaled.instances if not i.ignore]
            regions, _ = predict_regions(model, load_image(find_image(args.images, gt.image_id), size), texts,
                                         args.link_radius)
            pairs.append((regions, gt_polygons(scaled)))
    result = score_dataset(pairs, args.iou)
    report = result.to_json()
    if args.out:
        Path(args.out).write_text(report + "\n")
    print(report)
    if args.min_hmean is not None and result.hmean < args.min_hmean:
        log.error("hmean %.4f below required %.4f", result.hmean, args.min_hmean)
        return EXIT_FAIL
    return EXIT_OK


def cmd_render(args) -> int:
    model, cfg, _ = _load_model(args.ckpt)
    size = cfg.image_size
    texts = list(args.text or [])
    if len(texts) > model.config.max_instances:
        raise InputError(f"at most {model.config.max_instances} --text prompts")
    image = load_image(args.image, size)
    _, out = predict_regions(model, image, texts)
    dest = Path(args.out_dir)
    dest.mkdir(parents=True, exist_ok=True)
    prob = 1.0 / (1.0 + np.exp(-out.logits.data[0, 0].astype(np.float64)))
    save_png(dest / "prediction.png", (prob > 0.5).astype(np.uint8) * 255)
    save_png(dest / "probability.png", (prob * 255).round().astype(np.uint8))
    for k in range(len(texts)):
        save_png(dest / f"heatmap_{k:02d}.png", heat_to_png(out.attn[0, k], size))
    print(f"wrote prediction and {len(texts)} heatmaps to {dest}")
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    from .checks import run_suite
    results = run_suite(seed=args.seed or 0)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("gradcheck: " + ("all checks passed" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_synth(args) -> int:
    from .annot import write_canonical
    from .synth import make_dataset
    out = Path(args.out_dir)
    (out / "images").mkdir(parents=True, exist_ok=True)
    data = make_dataset(args.n, seed=args.seed or 0, size=args.size)
    for img, ann in data:
        save_png(out / "images" / f"{ann.image_id}.png", img)
    write_canonical([ann for _, ann in data], out / "annotations.jsonl")
    print(f"wrote {len(data)} scenes to {out}")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="odm", description="Glyph-label destylization pre-training toolkit")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("import", help="convert annotations to canonical JSONL")
    s.add_argument("src", help="annotation file, or a directory of gt_*.txt files for icdar-quad")
    s.add_argument("--format", required=True, choices=["icdar-quad", "canonical", "weak"])
    s.add_argument("--out", required=True)
    s.add_argument("--lenient", action="store_true", help="skip bad lines instead of failing")
    s.add_argument("--width", type=int, help="image width (default: annotation extent)")
    s.add_argument("--height", type=int, help="image height (default: annotation extent)")
    s.set_defaults(func=cmd_import)

    s = sub.add_parser("gen-labels", help="render binary glyph labels")
    s.add_argument("annotations")
    s.add_argument("out_dir")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--font", help="TrueType/OpenType font file")
    g.add_argument("--builtin-font", action="store_true", help="use the embedded bitmap font (default)")
    s.add_argument("--size", type=int, help="rescale each annotation to a size x size canvas")
    s.add_argument("--keep-indices", help="comma-separated instance indices to draw")
    s.set_defaults(func=cmd_gen_labels)

    s = sub.add_parser("filter-weak", help="filter pseudo labels by confidence and size")
    s.add_argument("src")
    s.add_argument("out")
    s.add_argument("--min-conf", type=float, default=0.9)
    s.add_argument("--min-size", type=float, default=32)
    s.set_defaults(func=cmd_filter_weak)

    s = sub.add_parser("pretrain", help="train the model")
    s.add_argument("--config", help="TrainConfig JSON file")
    s.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
    s.add_argument("--seed", type=int)
    s.add_argument("--annotations")
    s.add_argument("--images", help="directory of <image_id>.png/.ppm")
    s.add_argument("--synth", type=int, metavar="N", help="train on N synthetic scenes instead")
    s.add_argument("--data-seed", type=int, default=0)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_pretrain)

    s = sub.add_parser("eval", help="score detections against ground truth")
    s.add_argument("--annotations", required=True, help="ground-truth canonical JSONL")
    s.add_argument("--preds", help="predicted regions as canonical JSONL")
    s.add_argument("--ckpt")
    s.add_argument("--images")
    s.add_argument("--link-radius", type=int, default=0)
    s.add_argument("--iou", type=float, default=0.5)
    s.add_argument("--min-hmean", type=float, help="exit 1 when hmean falls below this")
    s.add_argument("--out", help="also write the JSON report here")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("render", help="prediction and per-prompt attention heatmaps")
    s.add_argument("--ckpt", required=True)
    s.add_argument("--image", required=True)
    s.add_argument("--text", action="append", help="text prompt (repeatable)")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("gradcheck", help="finite-difference check of losses and model")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_gradcheck)

    s = sub.add_parser("synth", help="write synthetic scenes and their annotations")
    s.add_argument("out_dir")
    s.add_argument("-n", type=int, default=8)
    s.add_argument("--size", type=int, default=128)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
