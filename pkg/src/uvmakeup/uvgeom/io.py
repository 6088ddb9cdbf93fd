"""File formats: UVPM position maps, PNG images and masks, checksums."""

import hashlib
import struct
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from ..errors import DataError
from .types import PositionMap

UVPM_MAGIC = b"UVPM"


def save_position_map(path, pos: PositionMap):
    """Write the bit-exact UVPM container.

    Layout: magic "UVPM", little-endian u32 width and height, then
    width*height little-endian float32 values for each of the X, Y, Z
    planes in row-major order, then width*height validity bytes (0/1).
    """
    h, w = pos.uv_shape
    with open(path, "wb") as f:
        f.write(UVPM_MAGIC)
        f.write(struct.pack("<II", w, h))
        for ch in range(3):
            f.write(np.ascontiguousarray(pos.coords[..., ch], dtype="<f4").tobytes())
        f.write(pos.valid.astype(np.uint8).tobytes())


def load_position_map(path) -> PositionMap:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != UVPM_MAGIC:
        raise DataError("not a UVPM file: %s" % path)
    w, h = struct.unpack("<II", data[4:12])
    plane = w * h * 4
    expected = 12 + 3 * plane + w * h
    if len(data) != expected:
        raise DataError(
            "truncated UVPM file: %s (%d bytes, expected %d)" % (path, len(data), expected)
        )
    coords = np.empty((h, w, 3), dtype=np.float32)
    for ch in range(3):
        start = 12 + ch * plane
        coords[..., ch] = np.frombuffer(
            data[start:start + plane], dtype="<f4"
        ).reshape(h, w)
    valid = (
        np.frombuffer(data[12 + 3 * plane:], dtype=np.uint8).reshape(h, w) != 0
    )
    return PositionMap(coords=coords, valid=valid)


def save_image(path, arr):
    """Save an (H, W, 3) float [0,1] array as 8-bit RGB PNG."""
    u8 = np.round(np.clip(np.asarray(arr), 0.0, 1.0) * 255.0).astype(np.uint8)
    PILImage.fromarray(u8, mode="RGB").save(path, format="PNG")


def load_image(path):
    with PILImage.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32) / 255.0
    return arr


def save_mask(path, mask):
    """Save a single-channel soft mask; stored value/255 is the weight."""
    u8 = np.round(np.clip(np.asarray(mask), 0.0, 1.0) * 255.0).astype(np.uint8)
    PILImage.fromarray(u8, mode="L").save(path, format="PNG")


def load_mask(path):
    with PILImage.open(path) as im:
        arr = np.asarray(im.convert("L"), dtype=np.float32) / 255.0
    return arr


def file_sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class PositionMapDirectory:
    """Loader for externally produced position maps, keyed by file stem.

    A directory of <name>.uvpm files; the map for /some/dir/face_01.png is
    looked up as <root>/face_01.uvpm.
    """

    def __init__(self, root):
        self.root = Path(root)
        if not self.root.is_dir():
            raise DataError("position-map directory not found: %s" % root)

    def stems(self):
        return sorted(p.stem for p in self.root.glob("*.uvpm"))

    def load(self, stem) -> PositionMap:
        path = self.root / ("%s.uvpm" % stem)
        if not path.exists():
            raise DataError("no position map for %r in %s" % (stem, self.root))
        return load_position_map(path)

    def for_image_path(self, image_path) -> PositionMap:
        return self.load(Path(image_path).stem)
