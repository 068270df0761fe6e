"""Global thresholding of gray-level images.

Dark pixels are foreground throughout: a pixel at level ``v`` belongs to the
defect class when ``v <= t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import BinaryMask, GrayImage, Histogram

DEFAULT_SMOOTHING_WINDOW = 9
DEFAULT_PROMINENCE = 0.05


@dataclass(frozen=True)
class ThresholdResult:
    threshold: int
    criterion_value: float


@dataclass(frozen=True)
class ModalityReport:
    peak_levels: tuple[int, ...]

    @property
    def peak_count(self) -> int:
        return len(self.peak_levels)

    @property
    def is_bimodal(self) -> bool:
        return self.peak_count == 2


@dataclass(frozen=True)
class ModalityParams:
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW
    prominence: float = DEFAULT_PROMINENCE

    def __post_init__(self):
        _check_window(self.smoothing_window)
        if not 0.0 <= self.prominence <= 1.0:
            raise ValueError(f"prominence must lie in [0, 1], got {self.prominence}")


class NotBimodalError(ValueError):
    """Raised when a two-peak histogram was required."""


def _check_window(window: int) -> None:
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ValueError(f"smoothing window must be an odd integer >= 1, got {window}")


def between_class_variance(h: Histogram) -> np.ndarray:
    """``w0*w1*(mu0 - mu1)**2`` for every threshold t, class 0 being levels <= t.

    Thresholds leaving one class empty score 0.
    """
    counts = h.counts
    total = int(counts.sum())
    n0 = np.cumsum(counts)
    s0 = np.cumsum(counts * np.arange(256, dtype=np.int64))
    n1 = total - n0
    s1 = int(s0[-1]) - s0

    crit = np.zeros(256)
    ok = (n0 > 0) & (n1 > 0)
    n0f, n1f = n0[ok].astype(np.float64), n1[ok].astype(np.float64)
    w0 = n0f / total
    w1 = n1f / total
    mu0 = s0[ok] / n0f
    mu1 = s1[ok] / n1f
    crit[ok] = w0 * w1 * (mu0 - mu1) ** 2
    return crit


def otsu_threshold(h: Histogram) -> ThresholdResult:
    """Otsu's threshold; ties go to the smallest level at or above the darkest
    occupied bin (so a single-level histogram returns that level).

    Candidates are ranked on the exact rational form of the criterion,
    ``(N*s0 - n0*S)**2 / (N**2 * n0 * n1)``, in integer arithmetic, so the
    choice never depends on floating-point rounding.
    """
    if h.total <= 0:
        raise ValueError("cannot threshold an empty histogram")
    counts = [int(c) for c in h.counts]
    total = sum(counts)
    weighted = sum(v * c for v, c in enumerate(counts))
    lowest = next(v for v, c in enumerate(counts) if c)

    best_t, best_num, best_den = lowest, 0, 1
    n0 = s0 = 0
    for t in range(256):
        n0 += counts[t]
        s0 += t * counts[t]
        n1 = total - n0
        if t < lowest or n0 == 0 or n1 == 0:
            continue
        num = (total * s0 - n0 * weighted) ** 2
        den = n0 * n1
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    crit = float(between_class_variance(h)[best_t])
    return ThresholdResult(threshold=best_t, criterion_value=crit)


def apply_threshold(img: GrayImage, t: int) -> BinaryMask:
    if not 0 <= t <= 255:
        raise ValueError(f"threshold must lie in [0, 255], got {t}")
    return BinaryMask((img.pixels <= t).astype(np.uint8))


def smooth_counts(h: Histogram, window: int) -> np.ndarray:
    """Centered moving average; bins outside [0, 255] count as zero.

    Window sums are taken in integers so equal plateaus stay exactly equal.
    """
    _check_window(window)
    half = window // 2
    csum = np.concatenate(([0], np.cumsum(np.pad(h.counts, half))))
    return (csum[window:] - csum[:-window]) / window


def _find_peaks(s: np.ndarray, half: int, floor: float) -> list[int]:
    peaks = []
    n = len(s)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and s[j + 1] == s[i]:
            j += 1
        v = s[i]
        left_ok = i == 0 or s[i - 1] < v
        right_ok = j == n - 1 or s[j + 1] < v
        if left_ok and right_ok and v > 0 and v > floor:
            lo, hi = max(0, i - half), min(n, j + half + 1)
            if v >= s[lo:hi].max():
                peaks.append((i + j) // 2)
        i = j + 1
    return peaks


def modality(
    h: Histogram,
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
    prominence: float = DEFAULT_PROMINENCE,
) -> ModalityReport:
    """Count the dominant peaks of the smoothed histogram.

    A peak is a plateau of equal smoothed counts that is strictly higher than
    the bins on either side, is the maximum within ``smoothing_window // 2``
    bins of its ends, and exceeds ``prominence`` times the smoothed maximum.
    Its level is the plateau's center.
    """
    params = ModalityParams(smoothing_window, prominence)
    s = smooth_counts(h, params.smoothing_window)
    if s.max() <= 0:
        return ModalityReport(())
    peaks = _find_peaks(s, params.smoothing_window // 2, params.prominence * s.max())
    return ModalityReport(tuple(peaks))


def valley_threshold(
    h: Histogram,
    smoothing_window: int = DEFAULT_SMOOTHING_WINDOW,
    prominence: float = DEFAULT_PROMINENCE,
) -> int:
    """Deepest smoothed bin strictly between the two peaks of a bimodal
    histogram (lowest level on ties)."""
    report = modality(h, smoothing_window, prominence)
    if not report.is_bimodal:
        raise NotBimodalError(f"histogram has {report.peak_count} peaks, need exactly 2")
    lo, hi = report.peak_levels
    if hi - lo < 2:
        raise NotBimodalError("peaks are adjacent; no interior valley")
    s = smooth_counts(h, smoothing_window)
    interior = s[lo + 1 : hi]
    return lo + 1 + int(np.argmin(interior))


def roberts_magnitude(img: GrayImage) -> np.ndarray:
    """``|d1| + |d2|`` of the Roberts cross, with edge replication at the
    right and bottom borders."""
    f = np.pad(img.pixels.astype(np.int32), ((0, 1), (0, 1)), mode="edge")
    d1 = f[:-1, :-1] - f[1:, 1:]
    d2 = f[:-1, 1:] - f[1:, :-1]
    return np.abs(d1) + np.abs(d2)


def roberts_edges(img: GrayImage, edge_threshold: float) -> BinaryMask:
    if edge_threshold < 0:
        raise ValueError("edge threshold must be non-negative")
    return BinaryMask((roberts_magnitude(img) > edge_threshold).astype(np.uint8))
