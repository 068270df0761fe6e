"""Exhaustive search over red/green weights.

Every pair on a regular grid over [0.1, 1.0]^2 is turned into a gray image,
screened for a two-peak histogram and, when it passes, segmented with Otsu's
threshold. The production pair is the centroid of the accepted pairs.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .grading import compute_nda
from .imaging import (
    RgbImage,
    WeightPair,
    compute_histogram,
    gaussian_lowpass,
    weighted_grayscale,
)
from .segmentation import ModalityParams, apply_threshold, modality, otsu_threshold

GRID_MIN = 0.1
GRID_MAX = 1.0
PRODUCTION_WEIGHTS = WeightPair(0.7641, 0.7436)


@dataclass(frozen=True)
class WeightGrid:
    step: float
    pairs: tuple[WeightPair, ...]

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class WeightSearchResult:
    pair: WeightPair
    is_bimodal: bool
    threshold: Optional[int] = None
    nda: Optional[float] = None

    def __post_init__(self):
        if self.is_bimodal != (self.threshold is not None):
            raise ValueError("threshold must be present exactly when bimodal")
        if self.nda is not None and not (self.is_bimodal and 0.0 <= self.nda <= 1.0):
            raise ValueError("NDA requires a bimodal verdict and must lie in [0, 1]")


def grid_axis(step: float) -> list[float]:
    if not 0 < step <= 1:
        raise ValueError(f"grid step must lie in (0, 1], got {step}")
    n = int((GRID_MAX - GRID_MIN) / step + 1e-9) + 1
    return [round(GRID_MIN + i * step, 4) for i in range(n)]


def enumerate_weight_grid(step: float = 0.1) -> WeightGrid:
    """All (a, b) pairs on the grid, row-major in a then b."""
    axis = grid_axis(step)
    return WeightGrid(step, tuple(WeightPair(a, b) for a in axis for b in axis))


def evaluate_weight_pair(
    img: RgbImage,
    pair: WeightPair,
    params: ModalityParams = ModalityParams(),
    sigma: float = 0.5,
) -> WeightSearchResult:
    gray = gaussian_lowpass(weighted_grayscale(img, pair), sigma)
    hist = compute_histogram(gray)
    if not modality(hist, params.smoothing_window, params.prominence).is_bimodal:
        return WeightSearchResult(pair, False)
    t = otsu_threshold(hist).threshold
    return WeightSearchResult(pair, True, t, compute_nda(apply_threshold(gray, t)))


def search_weights(
    img: RgbImage,
    grid: WeightGrid,
    params: ModalityParams = ModalityParams(),
    sigma: float = 0.5,
    workers: int = 1,
) -> list[WeightSearchResult]:
    """Evaluate every grid pair; results come back in grid order."""
    if workers <= 1:
        return [evaluate_weight_pair(img, p, params, sigma) for p in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: evaluate_weight_pair(img, p, params, sigma), grid))


def centroid_of_weights(pairs: Sequence[WeightPair]) -> WeightPair:
    """Mean of the a values and of the b values."""
    if not pairs:
        raise ValueError("centroid of an empty set of weights is undefined")
    n = len(pairs)
    return WeightPair(sum(p.a for p in pairs) / n, sum(p.b for p in pairs) / n)


def production_weights() -> WeightPair:
    return PRODUCTION_WEIGHTS


def results_csv(results: Sequence[WeightSearchResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["a", "b", "is_bimodal", "threshold", "nda"])
    for r in results:
        writer.writerow(
            [
                f"{r.pair.a:.4f}",
                f"{r.pair.b:.4f}",
                "true" if r.is_bimodal else "false",
                "" if r.threshold is None else r.threshold,
                "" if r.nda is None else f"{r.nda:.6f}",
            ]
        )
    return buf.getvalue()


def read_results_csv(text: str) -> list[WeightSearchResult]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        bimodal = row["is_bimodal"] == "true"
        out.append(
            WeightSearchResult(
                WeightPair(float(row["a"]), float(row["b"])),
                bimodal,
                int(row["threshold"]) if row["threshold"] else None,
                float(row["nda"]) if row["nda"] else None,
            )
        )
    return out
