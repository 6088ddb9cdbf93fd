"""UV texture -> image rendering: z-buffered triangle rasterization."""

import warnings

import numpy as np
from scipy.ndimage import distance_transform_edt, gaussian_filter

from ..errors import EmptyFaceWarning
from .types import PositionMap, TextureMap

FEATHER_SIGMA = 1.0     # ~3 px blend band at the face boundary
_EDGE_EPS = 1e-7
_BIG_BBOX = 144         # candidate pixels per triangle before falling back to a loop


def _triangle_fragments(ax, ay, bx, by, cx, cy, za, zb, zc, ca, cb, cc, order, h, w):
    """Rasterize a batch of triangles; returns flat fragment arrays."""
    minx = np.minimum(np.minimum(ax, bx), cx)
    maxx = np.maximum(np.maximum(ax, bx), cx)
    miny = np.minimum(np.minimum(ay, by), cy)
    maxy = np.maximum(np.maximum(ay, by), cy)
    x_lo = np.ceil(minx - 1e-6).astype(np.int64)
    x_hi = np.floor(maxx + 1e-6).astype(np.int64)
    y_lo = np.ceil(miny - 1e-6).astype(np.int64)
    y_hi = np.floor(maxy + 1e-6).astype(np.int64)

    den = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    ok = np.abs(den) > 1e-12
    safe_den = np.where(ok, den, 1.0)

    bb_w = int(max((x_hi - x_lo + 1).max(initial=0), 0))
    bb_h = int(max((y_hi - y_lo + 1).max(initial=0), 0))

    pix_out, z_out, rgb_out, ord_out = [], [], [], []
    for b in range(bb_h):
        py = y_lo + b
        row_act = ok & (py <= y_hi) & (py >= 0) & (py < h)
        if not row_act.any():
            continue
        for a in range(bb_w):
            px = x_lo + a
            act = row_act & (px <= x_hi) & (px >= 0) & (px < w)
            idx = np.nonzero(act)[0]
            if idx.size == 0:
                continue
            pxf = px[idx].astype(np.float64)
            pyf = py[idx].astype(np.float64)
            axi, ayi = ax[idx], ay[idx]
            wb = ((pxf - axi) * (cy[idx] - ayi) - (pyf - ayi) * (cx[idx] - axi)) / safe_den[idx]
            wc = ((bx[idx] - axi) * (pyf - ayi) - (by[idx] - ayi) * (pxf - axi)) / safe_den[idx]
            wa = 1.0 - wb - wc
            inside = (wa >= -_EDGE_EPS) & (wb >= -_EDGE_EPS) & (wc >= -_EDGE_EPS)
            if not inside.any():
                continue
            sub = idx[inside]
            wa, wb, wc = wa[inside], wb[inside], wc[inside]
            pix_out.append(py[sub] * w + px[sub])
            z_out.append(wa * za[sub] + wb * zb[sub] + wc * zc[sub])
            rgb_out.append(
                wa[:, None] * ca[sub] + wb[:, None] * cb[sub] + wc[:, None] * cc[sub]
            )
            ord_out.append(order[sub])
    if not pix_out:
        empty = np.empty(0)
        return empty.astype(np.int64), empty, empty.reshape(0, 3), empty.astype(np.int64)
    return (
        np.concatenate(pix_out),
        np.concatenate(z_out),
        np.concatenate(rgb_out),
        np.concatenate(ord_out),
    )


def rasterize(pos: PositionMap, tex: TextureMap, out_shape):
    """Draw the UV mesh into an image buffer.

    Every 2x2 block of valid texels becomes two triangles; fragments are
    depth-tested with larger Z in front. Ties (shared edges) resolve to the
    lower triangle index, which keeps output independent of evaluation order.

    Returns:
        (color (H, W, 3) float32, coverage (H, W) bool)
    """
    h, w = out_shape
    valid = pos.valid
    quad = valid[:-1, :-1] & valid[1:, :-1] & valid[:-1, 1:] & valid[1:, 1:]
    qi, qj = np.nonzero(quad)
    color = np.zeros((h, w, 3), dtype=np.float32)
    coverage = np.zeros((h, w), dtype=bool)
    if qi.size == 0:
        return color, coverage

    xy = pos.coords[..., :2].astype(np.float64)
    z = pos.coords[..., 2].astype(np.float64)
    tx = tex.texels.astype(np.float64)

    # Two triangles per quad: (i,j),(i+1,j),(i,j+1) and (i+1,j),(i+1,j+1),(i,j+1).
    vi = [
        (qi, qj), (qi + 1, qj), (qi, qj + 1),
        (qi + 1, qj), (qi + 1, qj + 1), (qi, qj + 1),
    ]
    pts = [xy[i, j] for i, j in vi]
    zs = [z[i, j] for i, j in vi]
    cs = [tx[i, j] for i, j in vi]

    def stack(first):
        off = 0 if first else 3
        a, b, c = pts[off], pts[off + 1], pts[off + 2]
        return (
            a[:, 0], a[:, 1], b[:, 0], b[:, 1], c[:, 0], c[:, 1],
            zs[off], zs[off + 1], zs[off + 2],
            cs[off], cs[off + 1], cs[off + 2],
        )

    t1 = stack(True)
    t2 = stack(False)
    n = qi.size
    parts = []
    for args, base in ((t1, 0), (t2, n)):
        order = np.arange(n, dtype=np.int64) + base
        area = (
            (args[2] - args[0]) * (args[5] - args[1])
            - (args[3] - args[1]) * (args[4] - args[0])
        )
        bbw = np.floor(np.maximum(np.maximum(args[0], args[2]), args[4])) - np.ceil(
            np.minimum(np.minimum(args[0], args[2]), args[4])
        )
        bbh = np.floor(np.maximum(np.maximum(args[1], args[3]), args[5])) - np.ceil(
            np.minimum(np.minimum(args[1], args[3]), args[5])
        )
        nondegenerate = np.abs(area) > 1e-12
        big = ((bbw + 1) * (bbh + 1) > _BIG_BBOX) & nondegenerate
        small = nondegenerate & ~big
        parts.append(_triangle_fragments(*[a[small] for a in args[:9]],
                                         *[a[small] for a in args[9:]],
                                         order[small], h, w))
        for k in np.nonzero(big)[0]:
            parts.append(_triangle_fragments(*[a[k:k + 1] for a in args[:9]],
                                             *[a[k:k + 1] for a in args[9:]],
                                             order[k:k + 1], h, w))

    pix = np.concatenate([p[0] for p in parts])
    depth = np.concatenate([p[1] for p in parts])
    rgb = np.concatenate([p[2] for p in parts])
    tri = np.concatenate([p[3] for p in parts])
    if pix.size == 0:
        return color, coverage

    srt = np.lexsort((tri, -depth, pix))
    pix_s = pix[srt]
    keep = np.ones(pix_s.size, dtype=bool)
    keep[1:] = pix_s[1:] != pix_s[:-1]
    win = srt[keep]
    flat = color.reshape(-1, 3)
    flat[pix[win]] = np.clip(rgb[win], 0.0, 1.0).astype(np.float32)
    coverage.reshape(-1)[pix[win]] = True
    return color, coverage


def render(pos: PositionMap, tex: TextureMap, background: np.ndarray) -> np.ndarray:
    """Map a UV texture back into image space over a background.

    The rasterized face is composited with a Gaussian-feathered coverage
    mask so the silhouette blends instead of cutting. With no valid quads
    the background is returned unchanged under an EmptyFaceWarning.
    """
    background = np.asarray(background, dtype=np.float32)
    h, w = background.shape[:2]
    color, coverage = rasterize(pos, tex, (h, w))
    if not coverage.any():
        warnings.warn("position map has no renderable quads", EmptyFaceWarning)
        return background.copy()

    # The feather needs face color a little beyond coverage; borrow nearest.
    _, (iy, ix) = distance_transform_edt(~coverage, return_indices=True)
    filled = color[iy, ix]
    alpha = gaussian_filter(coverage.astype(np.float32), FEATHER_SIGMA)
    alpha = np.clip(alpha, 0.0, 1.0)[..., None]
    out = alpha * filled + (1.0 - alpha) * background
    return np.clip(out, 0.0, 1.0).astype(np.float32)
