"""Deterministic synthetic Golden Delicious apples with ground-truth masks.

The fruit is an ellipse on a light backdrop. Its color falls off radially
(``1 - (1 - rim) * r**p``) to mimic the uneven reflectance of a round fruit,
so a plain luminance conversion yields a spread, many-peaked histogram while
the defects stay darker than every healthy pixel in both red and green.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .grading import GradeLabel, compute_nda
from .imaging import BinaryMask, RgbImage, WeightPair, weighted_gray_values
from .weights import PRODUCTION_WEIGHTS

# Minimum separation, in gray levels under the production weights, between the
# darkest healthy pixel and the brightest defect pixel.
MIN_GRAY_GAP = 20.0


@dataclass(frozen=True)
class Defect:
    center: tuple[float, float]
    radius: float
    color: tuple[int, int, int]


@dataclass(frozen=True)
class SyntheticAppleSpec:
    seed: int = 0
    image_size: tuple[int, int] = (1600, 1200)
    fruit_axes: tuple[float, float] = (620.0, 520.0)
    base_color: tuple[int, int, int] = (236, 206, 72)
    shading_exponent: float = 4.0
    rim_brightness: float = 0.8
    background_color: tuple[int, int, int] = (250, 250, 246)
    noise: int = 3
    defects: tuple[Defect, ...] = ()
    include_calyx: bool = False
    include_stem: bool = False
    calyx_stem_area_fraction: float = 0.002
    calyx_stem_color: tuple[int, int, int] = (58, 44, 22)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    defect_mask: BinaryMask
    defect_fraction: float


@dataclass(frozen=True, eq=False)
class SyntheticApple:
    image_id: str
    image: RgbImage
    truth: GroundTruth
    label: GradeLabel
    spec: SyntheticAppleSpec = field(repr=False)


class SpecError(ValueError):
    pass


def _center(spec: SyntheticAppleSpec) -> tuple[float, float]:
    w, h = spec.image_size
    return w / 2.0, h / 2.0


def disk_inside_fruit(spec: SyntheticAppleSpec, center, radius) -> bool:
    """Conservative containment test of a disk in the fruit ellipse."""
    cx, cy = _center(spec)
    ax, ay = spec.fruit_axes
    theta = np.linspace(0.0, 2 * math.pi, 720, endpoint=False)
    px = center[0] + radius * np.cos(theta) - cx
    py = center[1] + radius * np.sin(theta) - cy
    return bool(((px / ax) ** 2 + (py / ay) ** 2 <= 1.0).all())


def healthy_gray_floor(spec: SyntheticAppleSpec, w: WeightPair = PRODUCTION_WEIGHTS) -> float:
    """Lowest weighted gray a healthy fruit pixel can take (rim, worst noise)."""
    r, g, _ = spec.base_color
    return w.a * (r * spec.rim_brightness - spec.noise) + w.b * (g * spec.rim_brightness - spec.noise)


def defect_gray_ceiling(color, noise: int, w: WeightPair = PRODUCTION_WEIGHTS) -> float:
    return w.a * (color[0] + noise) + w.b * (color[1] + noise)


def _validate(spec: SyntheticAppleSpec) -> None:
    w, h = spec.image_size
    ax, ay = spec.fruit_axes
    if w <= 0 or h <= 0:
        raise SpecError("image size must be positive")
    if not (0 < ax <= w / 2 and 0 < ay <= h / 2):
        raise SpecError("fruit ellipse must fit in the image")
    if not 0 < spec.rim_brightness <= 1:
        raise SpecError("rim brightness must lie in (0, 1]")
    rim = [c * spec.rim_brightness for c in spec.base_color]
    floor = healthy_gray_floor(spec)
    for d in spec.defects:
        if d.radius <= 0 or not disk_inside_fruit(spec, d.center, d.radius):
            raise SpecError(f"defect at {d.center} r={d.radius} leaves the fruit")
        if not (d.color[0] + spec.noise < rim[0] - spec.noise and d.color[1] + spec.noise < rim[1] - spec.noise):
            raise SpecError("defect must be darker than the healthy rim in red and green")
        if floor - defect_gray_ceiling(d.color, spec.noise) < MIN_GRAY_GAP:
            raise SpecError("defect color too close to the healthy rim")
    if spec.include_calyx or spec.include_stem:
        if not 0 < spec.calyx_stem_area_fraction < 0.0065:
            raise SpecError("calyx/stem area must stay below the classifier threshold")


def _disk(xx, yy, center, radius):
    return (xx - center[0]) ** 2 + (yy - center[1]) ** 2 <= radius * radius


def _calyx_stem_regions(spec: SyntheticAppleSpec):
    """Disk (center, radius) list totalling the requested area fraction."""
    w, h = spec.image_size
    cx, cy = _center(spec)
    ax, ay = spec.fruit_axes
    parts = []
    if spec.include_calyx:
        parts.append((cx + 0.15 * ax, cy + 0.1 * ay))
    if spec.include_stem:
        parts.append((cx - 0.1 * ax, cy - 0.2 * ay))
    area = spec.calyx_stem_area_fraction * w * h / len(parts)
    radius = math.sqrt(area / math.pi)
    return [(c, radius) for c in parts]


@dataclass(frozen=True, eq=False)
class Regions:
    """Boolean layout of a rendered apple."""

    fruit: np.ndarray
    defect: np.ndarray
    calyx_stem: np.ndarray

    @property
    def healthy(self) -> np.ndarray:
        return self.fruit & ~self.defect & ~self.calyx_stem


def _layout(spec: SyntheticAppleSpec):
    w, h = spec.image_size
    cx, cy = _center(spec)
    ax, ay = spec.fruit_axes
    # pixel centers
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64) + 0.5
    rho2 = ((xx - cx) / ax) ** 2 + ((yy - cy) / ay) ** 2
    fruit = rho2 <= 1.0
    defect = np.zeros((h, w), dtype=bool)
    for d in spec.defects:
        defect |= _disk(xx, yy, d.center, d.radius)
    calyx = np.zeros((h, w), dtype=bool)
    if spec.include_calyx or spec.include_stem:
        for center, radius in _calyx_stem_regions(spec):
            calyx |= _disk(xx, yy, center, radius)
        calyx &= ~defect
    return rho2, (xx, yy), Regions(fruit, defect, calyx)


def regions(spec: SyntheticAppleSpec) -> Regions:
    _validate(spec)
    return _layout(spec)[2]


def render_apple(spec: SyntheticAppleSpec) -> tuple[RgbImage, GroundTruth]:
    _validate(spec)
    rho2, (xx, yy), reg = _layout(spec)
    rng = np.random.default_rng(spec.seed)

    shade = 1.0 - (1.0 - spec.rim_brightness) * np.minimum(rho2, 1.0) ** (spec.shading_exponent / 2)
    rgb = np.empty(rho2.shape + (3,), dtype=np.float64)
    rgb[:] = spec.background_color
    rgb[reg.fruit] = shade[reg.fruit, None] * np.asarray(spec.base_color, dtype=np.float64)
    for d in spec.defects:
        rgb[_disk(xx, yy, d.center, d.radius)] = d.color
    rgb[reg.calyx_stem] = spec.calyx_stem_color

    if spec.noise:
        rgb += rng.integers(-spec.noise, spec.noise + 1, size=rgb.shape)
    pixels = np.clip(np.rint(rgb), 0, 255).astype(np.uint8)

    mask = BinaryMask(reg.defect.astype(np.uint8))
    return RgbImage(pixels), GroundTruth(mask, compute_nda(mask))


def separation_margin(img: RgbImage, spec: SyntheticAppleSpec, w: WeightPair = PRODUCTION_WEIGHTS) -> float:
    """Darkest healthy minus brightest defect weighted gray (unclamped)."""
    reg = regions(spec)
    if not reg.defect.any():
        return math.inf
    gray = weighted_gray_values(img, w)
    return float(gray[reg.healthy].min() - gray[reg.defect].max())


# --------------------------------------------------------------------------
# Batches
# --------------------------------------------------------------------------

DEFECT_FRACTION_RANGE = (0.01, 0.11)
# brown tones, comfortably below the production-weight rim level
DEFECT_RED_RANGE = (88, 126)
DEFECT_GREEN_RANGE = (52, 84)


def _place_defects(spec: SyntheticAppleSpec, rng: np.random.Generator, fraction: float, count: int):
    w, h = spec.image_size
    cx, cy = _center(spec)
    ax, ay = spec.fruit_axes
    shares = rng.dirichlet(np.full(count, 4.0))
    radii = sorted((math.sqrt(s * fraction * w * h / math.pi) for s in shares), reverse=True)
    # one browning process per fruit: every patch shares a tone
    color = (
        int(rng.integers(DEFECT_RED_RANGE[0], DEFECT_RED_RANGE[1] + 1)),
        int(rng.integers(DEFECT_GREEN_RANGE[0], DEFECT_GREEN_RANGE[1] + 1)),
        int(rng.integers(18, 45)),
    )
    placed: list[Defect] = []
    for radius in radii:
        for _ in range(10_000):
            ang = rng.uniform(0, 2 * math.pi)
            rad = math.sqrt(rng.uniform(0, 1))
            c = (cx + rad * ax * math.cos(ang), cy + rad * ay * math.sin(ang))
            if not disk_inside_fruit(spec, c, radius):
                continue
            if any(math.dist(c, p.center) < radius + p.radius + 2 for p in placed):
                continue
            placed.append(Defect(c, radius, color))
            break
        else:
            return None
    return tuple(placed)


def defective_spec(seed: int, base: SyntheticAppleSpec = SyntheticAppleSpec()) -> SyntheticAppleSpec:
    rng = np.random.default_rng(seed)
    while True:
        fraction = rng.uniform(*DEFECT_FRACTION_RANGE)
        count = int(rng.integers(1, 4))
        defects = _place_defects(base, rng, fraction, count)
        if defects is not None:
            break
    return replace(base, seed=seed, defects=defects, include_calyx=False, include_stem=False)


def sound_spec(seed: int, base: SyntheticAppleSpec = SyntheticAppleSpec()) -> SyntheticAppleSpec:
    rng = np.random.default_rng(seed)
    return replace(
        base,
        seed=seed,
        defects=(),
        include_calyx=True,
        include_stem=bool(rng.integers(0, 2)),
        calyx_stem_area_fraction=float(rng.uniform(0.0005, 0.004)),
    )


def generate_batch(
    n_defective: int,
    n_sound: int,
    master_seed: int,
    base: SyntheticAppleSpec = SyntheticAppleSpec(),
) -> list[SyntheticApple]:
    """Defective apples first, then sound ones; per-image seeds come from
    ``master_seed``."""
    if n_defective < 0 or n_sound < 0:
        raise ValueError("counts must be non-negative")
    seeds = np.random.SeedSequence(master_seed).generate_state(n_defective + n_sound, dtype=np.uint32)
    batch = []
    for i, seed in enumerate(seeds.tolist()):
        if i < n_defective:
            spec, label, tag = defective_spec(seed, base), GradeLabel.DEFECTIVE, "d"
        else:
            spec, label, tag = sound_spec(seed, base), GradeLabel.HEALTHY, "s"
        img, truth = render_apple(spec)
        batch.append(SyntheticApple(f"apple_{i:03d}_{tag}", img, truth, label, spec))
    return batch
