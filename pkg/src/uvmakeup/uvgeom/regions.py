"""Universal cosmetic-region masks on the fixed UV layout.

Because every face shares one UV parameterization, the eye / lip / skin
regions are the same soft masks for all subjects. Supports are kept strictly
disjoint (not merely disjoint after thresholding) so that region-masked
blends compose exactly.
"""

from functools import lru_cache

import numpy as np

from . import layout


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _soft_ellipse(uv_size, center, semi, feather):
    """Soft mask: 1 inside the ellipse, ramping to exactly 0 outside it.

    The ramp spans `feather` canvas fraction beyond the semi-axes, so the
    support is the ellipse scaled by (1 + feather/min(semi)).
    """
    h, w = uv_size
    v = (np.arange(h, dtype=np.float64) + 0.5) / h
    u = (np.arange(w, dtype=np.float64) + 0.5) / w
    uu, vv = np.meshgrid(u, v)
    n = np.sqrt(((uu - center[0]) / semi[0]) ** 2 + ((vv - center[1]) / semi[1]) ** 2)
    ramp = feather / min(semi)
    mask = _smoothstep((1.0 + ramp - n) / ramp)
    return mask.astype(np.float32)


def _support_semi(semi, feather):
    """Semi-axes of the support of a _soft_ellipse with this feather."""
    grow = 1.0 + feather / min(semi)
    return (semi[0] * grow, semi[1] * grow)


@lru_cache(maxsize=4)
def universal_region_masks(uv_size=layout.UV_SIZE):
    """Build the shared eyes / lips / skin masks for the UV layout.

    Skin is the face interior with exclusion zones cut out around the eye
    and lip supports (plus clearance), so no texel carries weight in two
    regions. All masks are zero outside the valid face ellipse.
    """
    from .types import RegionMaskSet

    fe = layout.MASK_FEATHER
    gap = layout.MASK_CLEARANCE

    eyes = np.zeros(uv_size, dtype=np.float32)
    for c in layout.EYE_CENTERS:
        eyes = np.maximum(eyes, _soft_ellipse(uv_size, c, layout.EYE_SEMI, fe))
    lips = _soft_ellipse(uv_size, layout.LIP_CENTER, layout.LIP_SEMI, fe)

    face_soft = _soft_ellipse(
        uv_size,
        layout.FACE_CENTER,
        (layout.FACE_SEMI[0] * 0.94, layout.FACE_SEMI[1] * 0.94),
        fe,
    )
    skin = face_soft
    for c, semi in [(c, layout.EYE_SEMI) for c in layout.EYE_CENTERS] + [
        (layout.LIP_CENTER, layout.LIP_SEMI)
    ]:
        sup = _support_semi(semi, fe)
        excl = _soft_ellipse(uv_size, c, (sup[0] + gap, sup[1] + gap), fe)
        skin = skin * (1.0 - excl)

    valid = layout.valid_mask(uv_size)
    face = valid.astype(np.float32)
    eyes = eyes * face
    lips = lips * face
    skin = (skin * face).astype(np.float32)
    return RegionMaskSet(eyes=eyes, lips=lips, skin=skin, face=face)
