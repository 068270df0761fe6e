"""Published NDA values used as fixtures.

WEIGHT_SCREEN: accepted (a, b) pairs with the NDA each gave on one defective
apple. DEFECTIVE_* / SOUND_*: per-apple NDA for 17 defective and 17 sound
apples under weights (0.3, 1) and under the production weights. TOTALS:
batch totals for the method and the interactive-threshold reference.
"""

from .imaging import WeightPair

WEIGHT_SCREEN: tuple[tuple[WeightPair, float], ...] = tuple(
    (WeightPair(a, b), nda)
    for a, b, nda in [
        (0.3, 1.0, 0.0432),
        (0.4, 0.9, 0.0418),
        (0.5, 0.7, 0.0410),
        (0.5, 0.8, 0.0406),
        (0.6, 0.7, 0.0398),
        (0.4, 1.0, 0.0394),
        (0.5, 0.9, 0.0385),
        (1.0, 0.2, 0.0382),
        (0.8, 0.5, 0.0378),
        (0.6, 0.8, 0.0378),
        (0.7, 0.7, 0.0368),
        (0.5, 1.0, 0.0367),
        (1.0, 0.3, 0.0361),
        (0.8, 0.6, 0.0359),
        (0.6, 0.9, 0.0359),
        (0.9, 0.5, 0.0351),
        (1.0, 0.4, 0.0343),
    ]
)

DEFECTIVE_GREEN_HEAVY = (
    0.031, 0.1097, 0.0625, 0.0672, 0.0303, 0.0311, 0.0432, 0.0591, 0.0662,
    0.0378, 0.0423, 0.0465, 0.0508, 0.0467, 0.0701, 0.0305, 0.0487,
)  # fmt: skip
SOUND_GREEN_HEAVY = (
    2.6e-6, 0.011, 0.0238, 0.0302, 2.55e-5, 2.4e-4, 1.21e-4, 3.14e-4, 5.63e-4,
    4.39e-4, 4.88e-4, 3.59e-4, 2.83e-4, 1.16e-4, 2.11e-4, 2.27e-4, 1.86e-4,
)  # fmt: skip

DEFECTIVE_PRODUCTION = (
    0.0246, 0.0836, 0.0530, 0.0119, 0.0224, 0.0344, 0.0413, 0.0388, 0.0224,
    0.0236, 0.0316, 0.0401, 0.0181, 0.0508, 0.0275, 0.0103, 0.0400,
)  # fmt: skip
SOUND_PRODUCTION = (
    0.0, 4.72e-4, 0.0065, 0.0095, 0.0, 1.56e-6, 5.63e-5, 1.74e-4, 4.01e-4,
    2.19e-4, 1.74e-4, 1.59e-4, 2.18e-4, 3.07e-5, 1.27e-4, 7.66e-5, 9.69e-5,
)  # fmt: skip

GREEN_HEAVY_WEIGHTS = WeightPair(0.3, 1.0)

# (method total, reference total, printed error percent)
TOTALS = {
    GREEN_HEAVY_WEIGHTS: (0.8754, 0.5867, 50.06),
    WeightPair(0.7641, 0.7436): (0.6014, 0.5867, 2.49),
}
