"""Core geometry-side containers: position maps, texture maps, providers."""

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np


@dataclass(frozen=True)
class PositionMap:
    """UV-indexed camera-space geometry of one face.

    coords holds (H_uv, W_uv, 3) float32 XYZ. X and Y are image pixel
    coordinates (column, row) of the surface point; Z is camera depth with
    larger values closer to the camera. valid marks UV cells that lie on the
    face surface; coords outside valid are undefined.
    """

    coords: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        if self.coords.ndim != 3 or self.coords.shape[2] != 3:
            raise ValueError("coords must be (H, W, 3), got %r" % (self.coords.shape,))
        if self.valid.shape != self.coords.shape[:2]:
            raise ValueError("valid mask shape does not match coords")
        if not np.all(np.isfinite(self.coords[self.valid])):
            raise ValueError("coords contain non-finite values inside the valid region")

    @property
    def uv_shape(self):
        return self.coords.shape[:2]


@dataclass(frozen=True)
class TextureMap:
    """UV-indexed color raster, values in [0, 1].

    observed marks texels that were directly visible at extraction time;
    texels valid in the UV layout but not observed were inpainted. observed
    may be None for textures that were authored rather than extracted.
    """

    texels: np.ndarray
    observed: np.ndarray | None = None

    def __post_init__(self):
        if self.texels.ndim != 3 or self.texels.shape[2] != 3:
            raise ValueError("texels must be (H, W, 3), got %r" % (self.texels.shape,))
        lo, hi = float(self.texels.min(initial=0.0)), float(self.texels.max(initial=0.0))
        if lo < -1e-6 or hi > 1 + 1e-6:
            raise ValueError("texel values outside [0, 1]: min %g max %g" % (lo, hi))
        if self.observed is not None and self.observed.shape != self.texels.shape[:2]:
            raise ValueError("observed mask shape does not match texels")

    @property
    def uv_shape(self):
        return self.texels.shape[:2]


@dataclass(frozen=True)
class RegionMaskSet:
    """Universal soft cosmetic-region masks on the fixed UV layout.

    eyes / lips / skin are float32 (H_uv, W_uv) in [0, 1] with mutually
    disjoint supports. face is the full valid-region mask (1.0 inside).
    """

    eyes: np.ndarray
    lips: np.ndarray
    skin: np.ndarray
    face: np.ndarray

    REGION_NAMES = ("eyes", "lips", "skin")

    def named(self, name):
        if name == "full":
            return self.face
        if name not in self.REGION_NAMES:
            raise KeyError("unknown region %r" % (name,))
        return getattr(self, name)

    def union(self, selection):
        """Combined soft mask of the selected regions ("full" wins outright)."""
        if "full" in selection:
            return self.face
        total = np.zeros_like(self.face)
        for name in selection:
            total = total + self.named(name)
        return np.clip(total, 0.0, 1.0)

    def items(self):
        return [(name, getattr(self, name)) for name in self.REGION_NAMES]


@runtime_checkable
class GeometryProvider(Protocol):
    """Produces a PositionMap for a face image; deterministic per image."""

    uv_size: tuple[int, int]

    def position_map(self, image: np.ndarray) -> PositionMap: ...


@dataclass
class Pose:
    """Head rotation in radians: yaw (left/right), pitch (up/down), roll."""

    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0

    def as_tuple(self):
        return (float(self.yaw), float(self.pitch), float(self.roll))
