"""Where and how strongly a sticker lands on the UV canvas."""

from dataclasses import dataclass

import numpy as np

from ..errors import PlacementError

SCALE_RANGE = (0.5, 1.5)            # multiples of the cheek diameter
DEFAULT_OPACITY_RANGE = (0.6, 1.0)


@dataclass(frozen=True)
class PlacementParams:
    """One sticker placement: size, position, strength.

    scale multiplies the cheek diameter to give the sticker width; center_uv
    is the sticker center as (u, v) canvas fractions; opacity scales the
    sticker's own alpha.
    """

    scale: float
    center_uv: tuple
    opacity: float
    seed: int = 0

    def as_dict(self):
        return {
            "scale": float(self.scale),
            "center_uv": [float(self.center_uv[0]), float(self.center_uv[1])],
            "opacity": float(self.opacity),
            "seed": int(self.seed),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            scale=d["scale"],
            center_uv=(d["center_uv"][0], d["center_uv"][1]),
            opacity=d["opacity"],
            seed=d.get("seed", 0),
        )


def center_exclusion_box(valid):
    """Middle ninth of the valid region's bounding box, as half-open
    (r0, r1, c0, c1). Sticker centers may not land here: patterns sit on
    cheeks, forehead, chin, not on the middle of the face."""
    rows = np.flatnonzero(valid.any(axis=1))
    cols = np.flatnonzero(valid.any(axis=0))
    if rows.size == 0:
        raise PlacementError("valid region is empty")
    r0, r1 = rows[0], rows[-1] + 1
    c0, c1 = cols[0], cols[-1] + 1
    rh, cw = (r1 - r0) / 3.0, (c1 - c0) / 3.0
    return (
        int(round(r0 + rh)),
        int(round(r0 + 2 * rh)),
        int(round(c0 + cw)),
        int(round(c0 + 2 * cw)),
    )


def validate_placement(p: PlacementParams, valid):
    """Raise PlacementError unless p satisfies every placement rule."""
    if not (0.0 <= p.opacity <= 1.0):
        raise PlacementError("opacity %r outside [0, 1]" % (p.opacity,))
    if not (SCALE_RANGE[0] <= p.scale <= SCALE_RANGE[1]):
        raise PlacementError(
            "scale %r outside [%g, %g] cheek diameters" % ((p.scale,) + SCALE_RANGE)
        )
    h, w = valid.shape
    col = int(p.center_uv[0] * w)
    row = int(p.center_uv[1] * h)
    if not (0 <= row < h and 0 <= col < w) or not valid[row, col]:
        raise PlacementError("sticker center %r is off the face" % (p.center_uv,))
    r0, r1, c0, c1 = center_exclusion_box(valid)
    if r0 <= row < r1 and c0 <= col < c1:
        raise PlacementError(
            "sticker center %r lies in the excluded middle of the face" % (p.center_uv,)
        )


def draw_placement(rng, valid, opacity_range=DEFAULT_OPACITY_RANGE,
                   scale_range=SCALE_RANGE, seed=0):
    """Sample a uniformly random admissible placement from rng."""
    h, w = valid.shape
    allowed = valid.copy()
    r0, r1, c0, c1 = center_exclusion_box(valid)
    allowed[r0:r1, c0:c1] = False
    rows, cols = np.nonzero(allowed)
    if rows.size == 0:
        raise PlacementError("no admissible sticker centers")
    k = int(rng.integers(rows.size))
    center = ((cols[k] + 0.5) / w, (rows[k] + 0.5) / h)
    p = PlacementParams(
        scale=float(rng.uniform(*scale_range)),
        center_uv=center,
        opacity=float(rng.uniform(*opacity_range)),
        seed=int(seed),
    )
    validate_placement(p, valid)
    return p
