"""Masked per-channel histogram matching.

The matching target for the color branch: values inside a region are remapped
so their distribution follows the reference's, by aligning 256-bin CDFs. Pure
numpy; the result is used as a constant regression target, so no gradients
are involved here by construction.
"""

import warnings

import numpy as np

from ..errors import EmptyRegionWarning

BINS = 256


def _texels(t):
    return t.texels if hasattr(t, "texels") else np.asarray(t)


def _bin_index(values, bins):
    return np.minimum((values * bins).astype(np.int64), bins - 1)


def match_channel(source_vals, reference_vals, bins=BINS):
    """CDF-match one channel's masked values to a reference distribution.

    Each occupied source bin maps to the lowest reference bin whose CDF
    reaches the source bin's CDF; outputs are bin centers (so the mapping is
    idempotent and off by at most half a bin from exact value assignment).
    """
    src_idx = _bin_index(source_vals, bins)
    ref_idx = _bin_index(reference_vals, bins)
    cdf_src = np.cumsum(np.bincount(src_idx, minlength=bins)) / src_idx.size
    cdf_ref = np.cumsum(np.bincount(ref_idx, minlength=bins)) / ref_idx.size
    mapping = np.searchsorted(cdf_ref, cdf_src, side="left")
    np.clip(mapping, 0, bins - 1, out=mapping)
    return ((mapping[src_idx] + 0.5) / bins).astype(np.float32)


def histogram_match(source, reference, mask, bins=BINS):
    """Remap source colors inside the mask to match the reference histogram.

    Args:
        source, reference: (H, W, 3) arrays or TextureMaps in [0, 1].
        mask: (H, W) soft weights; texels with weight >= 0.5 participate.
        bins: quantization resolution of the CDFs.

    Returns:
        (H, W, 3) float32 array: matched values inside the mask, source
        values untouched (bit-exact) outside. An empty mask degrades to a
        copy of source under an EmptyRegionWarning.
    """
    src = _texels(source)
    ref = _texels(reference)
    mask = np.asarray(mask)
    if src.shape != ref.shape or mask.shape != src.shape[:2]:
        raise ValueError("histogram_match inputs must share UV dimensions")
    out = np.array(src, dtype=np.float32, copy=True)
    region = mask >= 0.5
    if not region.any():
        warnings.warn("histogram_match: mask empty at threshold", EmptyRegionWarning)
        return out
    for c in range(src.shape[2]):
        out[region, c] = match_channel(src[region, c], ref[region, c], bins)
    return out
