"""Quantitative evaluation: mask overlap, image similarity, identity."""

import numpy as np

from .identity import PixelProjectionEmbedder, identity_similarity
from .msssim import ms_ssim
from .report import EvalReport, config_hash
from .segmentation import iou_per_class, miou


def psnr(a, b, peak=1.0):
    """Peak signal-to-noise ratio in dB; inf for identical inputs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak * peak / mse)


__all__ = [
    "EvalReport",
    "PixelProjectionEmbedder",
    "config_hash",
    "identity_similarity",
    "iou_per_class",
    "miou",
    "ms_ssim",
    "psnr",
]
