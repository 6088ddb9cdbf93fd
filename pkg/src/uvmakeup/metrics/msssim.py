"""Multi-scale structural similarity, float images in [0, 1].

The canonical construction: 11x11 Gaussian window (sigma 1.5), stability
constants K1=0.01 / K2=0.03, five scales with weights 0.0448 / 0.2856 /
0.3001 / 0.2363 / 0.1333, dyadic downsampling by 2x2 mean pooling. Window
statistics are taken over fully covered positions only (valid filtering).
RGB inputs score each channel independently and average.
"""

import warnings

import numpy as np
from scipy.ndimage import correlate

from ..errors import ReducedScaleWarning

WINDOW = 11
SIGMA = 1.5
K1 = 0.01
K2 = 0.03
SCALE_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)


def _gaussian_window(size=WINDOW, sigma=SIGMA):
    x = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    return k / k.sum()

_KERNEL = _gaussian_window()


def _filt(img):
    # full correlation then margin crop == 'valid' filtering
    m = WINDOW // 2
    out = correlate(img, _KERNEL, mode="constant")
    return out[m:-m, m:-m]


def _ssim_terms(a, b):
    """Mean luminance*cs and mean cs of one 2D channel pair."""
    c1 = K1 * K1
    c2 = K2 * K2
    mu_a, mu_b = _filt(a), _filt(b)
    var_a = _filt(a * a) - mu_a * mu_a
    var_b = _filt(b * b) - mu_b * mu_b
    cov = _filt(a * b) - mu_a * mu_b
    lum = (2.0 * mu_a * mu_b + c1) / (mu_a * mu_a + mu_b * mu_b + c1)
    cs = (2.0 * cov + c2) / (var_a + var_b + c2)
    return float((lum * cs).mean()), float(cs.mean())


def _downsample(img):
    h, w = img.shape
    img = img[: h - h % 2, : w - w % 2]
    return 0.25 * (img[0::2, 0::2] + img[0::2, 1::2] + img[1::2, 0::2] + img[1::2, 1::2])


def _supported_scales(shape):
    side = min(shape[:2])
    scales = 1
    while scales < len(SCALE_WEIGHTS) and side // 2 >= WINDOW:
        side //= 2
        scales += 1
    return scales


def ms_ssim(a, b):
    """Multi-scale SSIM of two images, higher is more similar.

    Args:
        a, b: (H, W) or (H, W, C) float arrays in [0, 1], same shape.

    Returns:
        Scalar in [0, 1] for non-negative inputs.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("image shapes differ: %r vs %r" % (a.shape, b.shape))
    if min(a.shape[:2]) < WINDOW:
        raise ValueError("images smaller than the %dpx SSIM window" % WINDOW)

    scales = _supported_scales(a.shape)
    weights = np.asarray(SCALE_WEIGHTS[:scales])
    if scales < len(SCALE_WEIGHTS):
        weights = weights / weights.sum()
        warnings.warn(
            "image too small for %d scales; using %d"
            % (len(SCALE_WEIGHTS), scales),
            ReducedScaleWarning,
        )

    channels = a[..., None] if a.ndim == 2 else a
    channels_b = b[..., None] if b.ndim == 2 else b
    per_channel = []
    for c in range(channels.shape[2]):
        ca, cb = channels[..., c], channels_b[..., c]
        score = 1.0
        for s in range(scales):
            ssim_mean, cs_mean = _ssim_terms(ca, cb)
            term = ssim_mean if s == scales - 1 else cs_mean
            score *= max(term, 0.0) ** weights[s]
            if s != scales - 1:
                ca, cb = _downsample(ca), _downsample(cb)
        per_channel.append(score)
    return float(np.mean(per_channel))
