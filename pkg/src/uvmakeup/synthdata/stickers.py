"""Procedural pattern-sticker assets.

Real pattern makeup comes from curated RGBA art; this module synthesizes a
stand-in library of distinct antialiased shapes so the whole data pipeline
runs hermetically. Stickers are stored and loaded as RGBA PNGs plus a JSON
index, and anything without an alpha channel is rejected at load time.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from ..errors import DataError
from ..uvgeom.io import file_sha256

INDEX_NAME = "stickers.json"
SUPERSAMPLE = 3

# Saturated cosmetic-leaning palette; dark skin tones are deliberately absent
# so blended patterns stay visible against the face textures.
PALETTE = (
    (0.85, 0.10, 0.25),
    (0.95, 0.55, 0.10),
    (0.98, 0.85, 0.20),
    (0.15, 0.65, 0.30),
    (0.15, 0.45, 0.90),
    (0.55, 0.20, 0.80),
    (0.95, 0.35, 0.65),
    (0.10, 0.75, 0.75),
)


@dataclass(frozen=True)
class Sticker:
    """An RGBA pattern raster; alpha is its own blending mask."""

    name: str
    rgba: np.ndarray

    def __post_init__(self):
        if self.rgba.ndim != 3 or self.rgba.shape[2] != 4:
            raise DataError("sticker %r must be (H, W, 4) RGBA" % (self.name,))
        if self.rgba.min() < 0.0 or self.rgba.max() > 1.0:
            raise DataError("sticker %r values outside [0, 1]" % (self.name,))

    @property
    def alpha(self):
        return self.rgba[..., 3]


def _shape_field(kind, px, py, rng):
    """Signed distance-like field, positive inside the shape."""
    r = np.hypot(px, py)
    theta = np.arctan2(py, px)
    if kind == "disc":
        return 0.8 - r
    if kind == "ring":
        return 0.22 - np.abs(r - 0.62)
    if kind == "star":
        points = int(rng.integers(4, 8))
        wobble = 0.42 + 0.38 * np.cos(points * theta)
        return wobble - r
    if kind == "flower":
        petals = int(rng.integers(4, 7))
        return 0.55 + 0.32 * np.abs(np.cos(petals * theta / 2.0)) - r
    if kind == "heart":
        x, y = px * 1.25, -py * 1.25 + 0.25
        return -((x * x + y * y - 0.35) ** 3 - x * x * y * y * y)
    if kind == "crescent":
        return np.minimum(0.8 - r, np.hypot(px - 0.35, py) - 0.45)
    if kind == "diamond":
        return 0.75 - (np.abs(px) + np.abs(py))
    raise ValueError(kind)

SHAPE_KINDS = ("disc", "ring", "star", "flower", "heart", "crescent", "diamond")


def make_sticker(index, seed, size=96):
    """Deterministic sticker #index of the library keyed by seed."""
    rng = np.random.default_rng([seed, index])
    kind = SHAPE_KINDS[int(rng.integers(len(SHAPE_KINDS)))]
    color = np.array(PALETTE[int(rng.integers(len(PALETTE)))], dtype=np.float64)
    color = np.clip(color + rng.uniform(-0.06, 0.06, 3), 0.0, 1.0)

    n = size * SUPERSAMPLE
    c = (np.arange(n) + 0.5) / n * 2.0 - 1.0
    px, py = np.meshgrid(c, c)
    field = _shape_field(kind, px, py, rng)
    # supersampled coverage, then box-filter back down for soft edges
    hard = (field > 0).astype(np.float64)
    alpha = hard.reshape(size, SUPERSAMPLE, size, SUPERSAMPLE).mean(axis=(1, 3))

    rgba = np.empty((size, size, 4), dtype=np.float32)
    rgba[..., :3] = color
    rgba[..., 3] = alpha
    return Sticker(name="sticker_%03d_%s" % (index, kind), rgba=rgba)


def make_sticker_library(count, seed, size=96):
    return [make_sticker(i, seed, size) for i in range(count)]


def save_sticker_library(stickers, root):
    """Write RGBA PNGs plus the JSON index; returns the index path."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for st in stickers:
        u8 = np.round(st.rgba * 255.0).astype(np.uint8)
        path = root / ("%s.png" % st.name)
        PILImage.fromarray(u8, mode="RGBA").save(path, format="PNG")
        entries.append({"name": st.name, "file": path.name, "sha256": file_sha256(path)})
    index_path = root / INDEX_NAME
    index_path.write_text(json.dumps({"stickers": entries}, indent=2) + "\n")
    return index_path


def load_sticker(path, name=None):
    path = Path(path)
    with PILImage.open(path) as im:
        if "A" not in im.getbands():
            raise DataError("sticker %s has no alpha channel" % path)
        arr = np.asarray(im.convert("RGBA"), dtype=np.float32) / 255.0
    return Sticker(name=name or path.stem, rgba=arr)


def load_sticker_library(root):
    """Load every sticker under root, preferring the index order."""
    root = Path(root)
    index_path = root / INDEX_NAME
    if index_path.exists():
        index = json.loads(index_path.read_text())
        files = [(e["name"], root / e["file"]) for e in index["stickers"]]
    else:
        files = [(p.stem, p) for p in sorted(root.glob("*.png"))]
    if not files:
        raise DataError("no stickers found in %s" % root)
    return [load_sticker(path, name) for name, path in files]
