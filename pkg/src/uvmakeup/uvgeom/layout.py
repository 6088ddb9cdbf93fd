"""The fixed UV face layout.

All coordinates are fractions of the UV canvas: u runs along columns, v along
rows. Every module that draws on, samples from, or masks the UV plane imports
these numbers; nothing else may redefine where a facial feature lives.
"""

UV_SIZE = (256, 256)

# Face ellipse: the valid region of the UV parameterization.
FACE_CENTER = (0.50, 0.52)   # (u, v)
FACE_SEMI = (0.40, 0.46)     # (semi-u, semi-v)

# Feature anchors inside the ellipse.
EYE_CENTERS = ((0.355, 0.372), (0.645, 0.372))
EYE_SEMI = (0.085, 0.050)          # per-eye soft ellipse half-axes
BROW_OFFSET_V = -0.085
LIP_CENTER = (0.50, 0.80)
LIP_SEMI = (0.105, 0.048)
NOSE_TIP = (0.50, 0.60)
CHEEK_CENTERS = ((0.30, 0.62), (0.70, 0.62))
CHEEK_RADIUS = 0.09

# Soft masks ramp from 1 to 0 across this fraction of the canvas, and region
# supports keep at least this much clearance from each other so that partial
# transfers over different regions compose exactly.
MASK_FEATHER = 0.02
MASK_CLEARANCE = 0.02


def cheek_diameter_px(uv_size=UV_SIZE):
    """Cheek-region diameter in texels, the unit for sticker sizing."""
    return 2.0 * CHEEK_RADIUS * min(uv_size)


def face_param_grid(uv_size=UV_SIZE):
    """Normalized ellipse coordinates (p, q) per texel center.

    p and q are scaled so the face boundary is the unit circle p^2 + q^2 = 1.
    Returns float32 arrays of shape uv_size.
    """
    import numpy as np

    h, w = uv_size
    v = (np.arange(h, dtype=np.float32) + 0.5) / h
    u = (np.arange(w, dtype=np.float32) + 0.5) / w
    uu, vv = np.meshgrid(u, v)
    p = (uu - FACE_CENTER[0]) / FACE_SEMI[0]
    q = (vv - FACE_CENTER[1]) / FACE_SEMI[1]
    return p.astype(np.float32), q.astype(np.float32)


def valid_mask(uv_size=UV_SIZE):
    """Boolean face-region mask of the UV layout."""
    p, q = face_param_grid(uv_size)
    return (p * p + q * q) <= 1.0
