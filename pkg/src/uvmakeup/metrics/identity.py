"""Identity preservation scoring via pluggable face embedders.

Production use would plug in a pretrained face-recognition embedding; the
shipped PixelProjectionEmbedder is a deterministic stand-in (downsampled
grayscale pixels through a fixed random projection) good enough to test the
plumbing and to catch gross identity changes.
"""

import numpy as np

from ..errors import DataError
from ..uvgeom.extract import bilinear_sample


class PixelProjectionEmbedder:
    """Fixed random projection of a downsampled grayscale image.

    Deterministic per (dim, grid, seed); embeddings are unit-normalized.
    """

    def __init__(self, dim=64, grid=32, seed=0):
        self.dim = int(dim)
        self.grid = int(grid)
        rng = np.random.default_rng([int(seed), self.dim, self.grid])
        self._proj = rng.normal(0.0, 1.0, (self.dim, self.grid * self.grid))

    def __call__(self, image):
        image = np.asarray(image, dtype=np.float64)
        if image.ndim == 3:
            image = image.mean(axis=2)
        if image.ndim != 2 or min(image.shape) < 2:
            raise DataError("embedder needs a 2D image of at least 2x2 pixels")
        h, w = image.shape
        # sample a grid x grid lattice of cell centers
        ys = (np.arange(self.grid) + 0.5) / self.grid * h - 0.5
        xs = (np.arange(self.grid) + 0.5) / self.grid * w - 0.5
        gx, gy = np.meshgrid(xs, ys)
        small = bilinear_sample(image[..., None], gx, gy)[..., 0]
        vec = self._proj @ small.ravel()
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise DataError("degenerate embedding (all-zero projection)")
        return vec / norm


def identity_similarity(a, b, embedder):
    """Cosine similarity of the two images' embeddings, in [-1, 1]."""
    ea = embedder(a)
    eb = embedder(b)
    return float(np.clip(np.dot(ea, eb), -1.0, 1.0))
