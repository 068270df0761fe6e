"""Command-line interface.

Exit codes: 0 success, 1 runtime error, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .grading import BatchRecord, GradeLabel, evaluate_batch, tau_sweep
from .imaging import (
    ImageError,
    WeightPair,
    compute_histogram,
    load_image,
    save_image,
    save_mask,
    write_histogram_csv,
)
from .orchard import generate_batch
from .pipeline import PipelineConfig, grade_image, gray_image, oracle_nda, preprocess
from .segmentation import ModalityParams, roberts_edges
from .weights import (
    centroid_of_weights,
    enumerate_weight_grid,
    results_csv,
    search_weights,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

MANIFEST_FIELDS = ["image_id", "label", "defect_fraction", "seed"]


class UsageError(Exception):
    pass


def _r6(x: float) -> float:
    return round(float(x), 6)


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")
    return w, h


def _parse_weights(text: str) -> WeightPair:
    try:
        return WeightPair.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _config(args) -> PipelineConfig:
    try:
        return _build_config(args)
    except ValueError as exc:
        raise UsageError(str(exc))


def _build_config(args) -> PipelineConfig:
    return PipelineConfig(
        weights=args.weights,
        sigma=args.sigma,
        tau=args.tau,
        resize_to=args.resize,
        modality=ModalityParams(args.window, args.prominence),
        manual_threshold=getattr(args, "manual_threshold", None),
    )


def _out_dir(path: str) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {out}: {exc}")
    return out


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_grade(args) -> int:
    config = _config(args)
    paths = [Path(p) for p in args.images]
    for p in paths:
        if not p.is_file():
            raise UsageError(f"{p}: no such file")
    out = _out_dir(args.out)
    images = [load_image(p) for p in paths]

    def run(img):
        return grade_image(img, config)

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(run, images))

    rows = []
    for path, res in zip(paths, results):
        record = {
            "image": str(path),
            "image_id": path.stem,
            "weights": [config.weights.a, config.weights.b],
            "threshold": res.threshold,
            "threshold_source": "manual" if config.manual_threshold is not None else "otsu",
            "nda": _r6(res.nda),
            "label": res.label.value,
        }
        _dump_json(record, out / f"{path.stem}.json")
        save_mask(res.mask, out / f"{path.stem}_mask.png")
        rows.append(record)

    counts = {label.value: sum(r["label"] == label.value for r in rows) for label in GradeLabel}
    _dump_json({"tau": config.tau, "count": len(rows), "labels": counts, "records": rows}, out / "summary.json")
    for r in rows:
        print(f"{r['image_id']}\t{r['nda']:.6f}\t{r['label']}")
    return EXIT_OK


def cmd_search_weights(args) -> int:
    path = Path(args.image)
    img = load_image(path)
    config = _config(args)
    img = preprocess(img, config)
    grid = enumerate_weight_grid(args.step)
    results = search_weights(img, grid, config.modality, config.sigma, workers=args.workers)
    text = results_csv(results)
    accepted = [r.pair for r in results if r.is_bimodal]
    if args.out:
        out = _out_dir(args.out)
        (out / "weights.csv").write_text(text)
    else:
        sys.stdout.write(text)

    if not accepted:
        print("error: no bimodal weight pairs; centroid undefined", file=sys.stderr)
        if args.out:
            _dump_json({"bimodal_pairs": 0, "centroid": None}, out / "centroid.json")
        return EXIT_RUNTIME
    c = centroid_of_weights(accepted)
    summary = {"bimodal_pairs": len(accepted), "centroid": [_r6(c.a), _r6(c.b)]}
    if args.out:
        _dump_json(summary, out / "centroid.json")
    print(f"centroid of {len(accepted)} bimodal pairs: a={c.a:.4f} b={c.b:.4f}", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args) -> int:
    if args.defective < 0 or args.sound < 0:
        raise UsageError("counts must be non-negative")
    out = _out_dir(args.out)
    img_dir, mask_dir = out / "images", out / "masks"
    try:
        img_dir.mkdir(exist_ok=True)
        mask_dir.mkdir(exist_ok=True)
    except OSError as exc:
        raise UsageError(str(exc))
    batch = generate_batch(args.defective, args.sound, args.seed)
    with open(out / "manifest.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_FIELDS)
        for apple in batch:
            save_image(apple.image, img_dir / f"{apple.image_id}.png")
            save_mask(apple.truth.defect_mask, mask_dir / f"{apple.image_id}_mask.png")
            writer.writerow(
                [apple.image_id, apple.label.value, f"{apple.truth.defect_fraction:.6f}", apple.spec.seed]
            )
    print(f"wrote {len(batch)} apples to {out}")
    return EXIT_OK


def read_manifest(path: Path) -> list[dict]:
    """Rows of a manifest, each with a resolved ``path`` to its image."""
    if not path.is_file():
        raise UsageError(f"{path}: no such file")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"image_id", "label"} - set(reader.fieldnames or ())
        if missing:
            raise UsageError(f"{path}: manifest lacks columns {sorted(missing)}")
        rows = list(reader)
    if not rows:
        raise UsageError(f"{path}: manifest has no rows")
    for row in rows:
        try:
            row["label"] = GradeLabel.parse(row["label"])
        except ValueError as exc:
            raise UsageError(f"{path}: {exc}")
        rel = row.get("path") or f"images/{row['image_id']}.png"
        row["path"] = path.parent / rel
    return rows


def _parse_sweep(text: str) -> list[float]:
    start, stop, step = (float(v) for v in text.split(":"))
    n = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 10) for i in range(n)]


def cmd_evaluate(args) -> int:
    config = _config(args)
    rows = read_manifest(Path(args.manifest))
    out = _out_dir(args.out)

    def run(row):
        img = load_image(row["path"])
        method = grade_image(img, config)
        oracle = oracle_nda(img, config)
        return method, oracle

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        results = list(pool.map(run, rows))

    records = [
        BatchRecord(row["image_id"], m.nda, o.nda, row["label"]) for row, (m, o) in zip(rows, results)
    ]
    report = evaluate_batch(records, config.tau)
    data = report.to_dict()
    data["weights"] = [config.weights.a, config.weights.b]
    data["tau"] = config.tau
    data["oracle_valley_count"] = sum(o.from_valley for _, o in results)
    for rec, (m, o) in zip(data["records"], results):
        rec["method_threshold"] = m.threshold
        rec["oracle_threshold"] = o.threshold
        rec["oracle_from_valley"] = o.from_valley
    _dump_json(data, out / "report.json")
    (out / "records.csv").write_text(report.records_csv())

    if args.tau_sweep:
        ndas = [r.method_nda for r in records]
        labels = [r.true_label for r in records]
        with open(out / "tau_sweep.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tau", "tp", "tn", "fp", "fn", "accuracy_percent"])
            for tau, c in tau_sweep(ndas, labels, _parse_sweep(args.tau_sweep)):
                writer.writerow([f"{tau:.6f}", c.tp, c.tn, c.fp, c.fn, f"{100 * c.correct / c.total:.6f}"])

    c = report.confusion
    print(f"weights a={config.weights.a:g} b={config.weights.b:g}")
    print(f"total NDA (method)  {report.total_nda_method:.6f}")
    print(f"total NDA (oracle)  {report.total_nda_oracle:.6f}")
    print(f"error               {report.error_percent:.4f} %")
    print(f"extraction accuracy {report.extraction_accuracy_percent:.4f} %")
    print(f"classification      {c.correct}/{c.total} ({report.classification_accuracy_percent:.2f} %)")
    print(f"confusion           TP={c.tp} TN={c.tn} FP={c.fp} FN={c.fn}")
    return EXIT_OK


def cmd_histogram(args) -> int:
    config = _config(args)
    gray = gray_image(load_image(args.image), config)
    hist = compute_histogram(gray)
    if args.out:
        write_histogram_csv(hist, args.out)
    else:
        write_histogram_csv(hist, sys.stdout)
    return EXIT_OK


def cmd_edges(args) -> int:
    config = _config(args)
    gray = gray_image(load_image(args.image), config)
    mask = roberts_edges(gray, args.edge_threshold)
    save_mask(mask, args.out)
    print(f"edge pixels: {mask.ones} ({mask.ones / mask.pixels.size:.6f})")
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("pipeline")
    g.add_argument("--weights", type=_parse_weights, default=PipelineConfig().weights, metavar="A,B",
                   help="red,green weights (default 0.7641,0.7436)")
    g.add_argument("--sigma", type=float, default=0.5, help="Gaussian std in pixels (default 0.5)")
    g.add_argument("--tau", type=float, default=0.0065, help="NDA classifier threshold (default 0.0065)")
    g.add_argument("--resize", type=_parse_size, default=None, metavar="WxH",
                   help="working size (default: 1000x750 for 1600x1200 input, else unchanged)")
    g.add_argument("--window", type=int, default=9, help="histogram smoothing window (odd)")
    g.add_argument("--prominence", type=float, default=0.05, help="peak prominence, fraction of max")
    g.add_argument("--workers", type=int, default=1, help="parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="browning", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grade", help="segment and classify images")
    p.add_argument("images", nargs="+")
    p.add_argument("--manual-threshold", type=int, default=None, metavar="L",
                   help="fixed gray level instead of Otsu")
    p.add_argument("--out", default="grade_out")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_grade)

    p = sub.add_parser("search-weights", help="screen the (a, b) grid on one image")
    p.add_argument("image")
    p.add_argument("--step", type=float, default=0.1)
    p.add_argument("--out", default=None, help="directory for weights.csv and centroid.json (default stdout)")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_search_weights)

    p = sub.add_parser("synth", help="render a synthetic apple batch")
    p.add_argument("--defective", type=int, default=30)
    p.add_argument("--sound", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("evaluate", help="batch report against the valley-threshold oracle")
    p.add_argument("manifest")
    p.add_argument("--out", default="evaluate_out")
    p.add_argument("--tau-sweep", default=None, metavar="START:STOP:STEP",
                   help="also write confusion counts over a range of tau")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("histogram", help="dump the gray-level histogram as CSV")
    p.add_argument("image")
    p.add_argument("--out", default=None)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("edges", help="Roberts edge mask (baseline)")
    p.add_argument("image")
    p.add_argument("--edge-threshold", type=float, default=30.0)
    p.add_argument("--out", required=True)
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_edges)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ImageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
