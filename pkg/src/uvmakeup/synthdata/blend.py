"""Alpha-compositing stickers onto UV textures."""

import numpy as np

from ..uvgeom import layout
from ..uvgeom.extract import bilinear_sample
from ..uvgeom.types import TextureMap
from .placement import PlacementParams, validate_placement


def blend_sticker(tex: TextureMap, sticker, p: PlacementParams, valid=None):
    """Composite a sticker onto a texture map.

    The sticker is scaled so its width is p.scale cheek diameters, centered
    at p.center_uv, and blended with effective alpha = sticker alpha x
    p.opacity, restricted to the valid face region. The effective alpha is
    returned as the ground-truth pattern mask.

    Returns:
        (blended TextureMap, float32 mask of shape uv_size)
    """
    h, w = tex.uv_shape
    if valid is None:
        valid = layout.valid_mask((h, w))
    validate_placement(p, valid)

    sh, sw = sticker.rgba.shape[:2]
    width_px = p.scale * layout.cheek_diameter_px((h, w))
    height_px = width_px * sh / sw
    cx = p.center_uv[0] * w - 0.5
    cy = p.center_uv[1] * h - 0.5

    r0 = max(int(np.floor(cy - height_px / 2.0)), 0)
    r1 = min(int(np.ceil(cy + height_px / 2.0)) + 1, h)
    c0 = max(int(np.floor(cx - width_px / 2.0)), 0)
    c1 = min(int(np.ceil(cx + width_px / 2.0)) + 1, w)

    out = tex.texels.copy()
    mask = np.zeros((h, w), dtype=np.float32)
    if r1 <= r0 or c1 <= c0:
        return TextureMap(texels=out, observed=tex.observed), mask

    # map each covered texel center into sticker pixel coordinates
    yy, xx = np.mgrid[r0:r1, c0:c1].astype(np.float64)
    sx = (xx - cx) / width_px * sw + (sw - 1) / 2.0
    sy = (yy - cy) / height_px * sh + (sh - 1) / 2.0
    inside = (sx > -0.5) & (sx < sw - 0.5) & (sy > -0.5) & (sy < sh - 0.5)

    rgba = bilinear_sample(sticker.rgba.astype(np.float32), sx, sy)
    alpha = rgba[..., 3] * p.opacity * inside * valid[r0:r1, c0:c1]
    alpha = alpha.astype(np.float32)

    patch = out[r0:r1, c0:c1]
    out[r0:r1, c0:c1] = patch * (1.0 - alpha[..., None]) + rgba[..., :3] * alpha[..., None]
    mask[r0:r1, c0:c1] = alpha
    np.clip(out, 0.0, 1.0, out=out)
    return TextureMap(texels=out, observed=tex.observed), mask
