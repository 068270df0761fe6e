"""End-to-end grading: resize, weighted gray, Gaussian low-pass, Otsu (or a
fixed threshold), NDA and classification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .grading import DEFAULT_TAU, GradeLabel, classify_nda, compute_nda
from .imaging import (
    BinaryMask,
    GrayImage,
    Histogram,
    RgbImage,
    WeightPair,
    compute_histogram,
    gaussian_lowpass,
    resize_bilinear,
    weighted_grayscale,
)
from .segmentation import (
    ModalityParams,
    NotBimodalError,
    apply_threshold,
    otsu_threshold,
    valley_threshold,
)
from .weights import PRODUCTION_WEIGHTS

CAMERA_SIZE = (1600, 1200)
WORKING_SIZE = (1000, 750)


@dataclass(frozen=True)
class PipelineConfig:
    weights: WeightPair = PRODUCTION_WEIGHTS
    sigma: float = 0.5
    tau: float = DEFAULT_TAU
    # None: shrink camera-sized frames to WORKING_SIZE, leave others alone
    resize_to: Optional[tuple[int, int]] = None
    modality: ModalityParams = field(default_factory=ModalityParams)
    manual_threshold: Optional[int] = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 <= self.tau <= 1:
            raise ValueError("tau must lie in [0, 1]")
        if self.manual_threshold is not None and not 0 <= self.manual_threshold <= 255:
            raise ValueError("manual threshold must lie in [0, 255]")
        if self.resize_to is not None and min(self.resize_to) <= 0:
            raise ValueError("resize target must be positive")

    def target_size(self, img: RgbImage) -> tuple[int, int]:
        if self.resize_to is not None:
            return self.resize_to
        if (img.width, img.height) == CAMERA_SIZE:
            return WORKING_SIZE
        return img.width, img.height


@dataclass(frozen=True, eq=False)
class GradeResult:
    gray: GrayImage
    histogram: Histogram
    threshold: int
    mask: BinaryMask
    nda: float
    label: GradeLabel


def preprocess(img: RgbImage, config: PipelineConfig) -> RgbImage:
    w, h = config.target_size(img)
    return resize_bilinear(img, w, h)


def gray_image(img: RgbImage, config: PipelineConfig, weights: Optional[WeightPair] = None) -> GrayImage:
    """Resize, weighted gray transform, Gaussian low-pass."""
    rgb = preprocess(img, config)
    return gaussian_lowpass(weighted_grayscale(rgb, weights or config.weights), config.sigma)


def grade_image(img: RgbImage, config: PipelineConfig = PipelineConfig()) -> GradeResult:
    gray = gray_image(img, config)
    hist = compute_histogram(gray)
    if config.manual_threshold is not None:
        t = config.manual_threshold
    else:
        t = otsu_threshold(hist).threshold
    mask = apply_threshold(gray, t)
    nda = compute_nda(mask)
    return GradeResult(gray, hist, t, mask, nda, classify_nda(nda, config.tau))


@dataclass(frozen=True)
class OracleResult:
    threshold: int
    nda: float
    from_valley: bool


def oracle_nda(
    img: RgbImage,
    config: PipelineConfig = PipelineConfig(),
    weights: WeightPair = PRODUCTION_WEIGHTS,
) -> OracleResult:
    """NDA under a histogram-valley threshold, the stand-in for a human picking
    the threshold by eye.

    The oracle always looks at the production-weight gray image, so its
    totals do not move with the weights under evaluation. When the
    histogram shows no two-peak structure there is no valley to pick; the
    Otsu threshold is used instead and ``from_valley`` is False.
    """
    gray = gray_image(img, config, weights)
    hist = compute_histogram(gray)
    try:
        t = valley_threshold(hist, config.modality.smoothing_window, config.modality.prominence)
        from_valley = True
    except NotBimodalError:
        t = otsu_threshold(hist).threshold
        from_valley = False
    return OracleResult(t, compute_nda(apply_threshold(gray, t)), from_valley)
