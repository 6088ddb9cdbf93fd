"""Image -> UV texture extraction."""

import numpy as np
from scipy.ndimage import distance_transform_edt

from ..errors import GeometryError, GeometryMismatchError
from .types import PositionMap, TextureMap


def bilinear_sample(image: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample image channels at fractional pixel coordinates (x, y).

    Coordinates are clamped to the valid interpolation range, so callers must
    bounds-check first if clamping would hide an error.
    """
    h, w = image.shape[:2]
    x0 = np.clip(np.floor(x), 0, w - 2).astype(np.int64)
    y0 = np.clip(np.floor(y), 0, h - 2).astype(np.int64)
    fx = (np.clip(x, 0, w - 1) - x0)[..., None]
    fy = (np.clip(y, 0, h - 1) - y0)[..., None]
    top = image[y0, x0] * (1 - fx) + image[y0, x0 + 1] * fx
    bot = image[y0 + 1, x0] * (1 - fx) + image[y0 + 1, x0 + 1] * fx
    return top * (1 - fy) + bot * fy


def front_facing(pos: PositionMap) -> np.ndarray:
    """Texels whose surface normal points toward the camera.

    The normal is d(coords)/du x d(coords)/dv; with the UV layout's
    orientation its z component is positive where the surface faces the
    camera. Coordinates of invalid texels are replaced by their nearest valid
    neighbor's first, so border texels get one-sided but usable gradients.
    """
    if not pos.valid.any():
        return np.zeros_like(pos.valid)
    coords = pos.coords.astype(np.float64).copy()
    _, (iy, ix) = distance_transform_edt(~pos.valid, return_indices=True)
    coords[~pos.valid] = coords[iy[~pos.valid], ix[~pos.valid]]
    dv = np.gradient(coords, axis=0)
    du = np.gradient(coords, axis=1)
    nz = du[..., 0] * dv[..., 1] - du[..., 1] * dv[..., 0]
    return pos.valid & (nz > 0)


def extract_texture(image: np.ndarray, pos: PositionMap) -> TextureMap:
    """Pull the face appearance out of an image into UV space.

    Each valid UV texel samples the image bilinearly at the XY location its
    position-map entry points to. Texels on the far side of the head
    (back-facing) cannot be observed; they are filled from the nearest
    visible texel and reported via the observed mask.

    Args:
        image: (H, W, 3) float array in [0, 1].
        pos: face geometry; XY coordinates must land inside the image.

    Returns:
        TextureMap with observed = the directly visible texels.
    """
    image = np.asarray(image, dtype=np.float32)
    if image.ndim != 3 or image.shape[2] != 3:
        raise GeometryMismatchError("image must be (H, W, 3)")
    h, w = image.shape[:2]
    xy = pos.coords[pos.valid][:, :2]
    if xy.size and (
        np.round(xy[:, 0]).min() < 0
        or np.round(xy[:, 1]).min() < 0
        or np.round(xy[:, 0]).max() > w - 1
        or np.round(xy[:, 1]).max() > h - 1
    ):
        raise GeometryMismatchError(
            "position map XY range does not fit a %dx%d image" % (w, h)
        )

    visible = front_facing(pos)
    if not visible.any():
        raise GeometryError("no visible face texels; face entirely back-facing")

    texels = np.zeros(pos.coords.shape[:2] + (3,), dtype=np.float32)
    vis_xy = pos.coords[visible]
    texels[visible] = bilinear_sample(image, vis_xy[:, 0], vis_xy[:, 1])

    hidden = pos.valid & ~visible
    if hidden.any():
        _, (iy, ix) = distance_transform_edt(~visible, return_indices=True)
        texels[hidden] = texels[iy[hidden], ix[hidden]]

    np.clip(texels, 0.0, 1.0, out=texels)
    return TextureMap(texels=texels, observed=visible)
