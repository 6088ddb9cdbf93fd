from . import layout
from .extract import bilinear_sample, extract_texture, front_facing
from .io import (
    PositionMapDirectory,
    file_sha256,
    load_image,
    load_mask,
    load_position_map,
    save_image,
    save_mask,
    save_position_map,
)
from .regions import universal_region_masks
from .render import rasterize, render
from .synthetic import SyntheticFaceProvider
from .types import GeometryProvider, Pose, PositionMap, RegionMaskSet, TextureMap

__all__ = [
    "layout",
    "bilinear_sample",
    "extract_texture",
    "front_facing",
    "PositionMapDirectory",
    "file_sha256",
    "load_image",
    "load_mask",
    "load_position_map",
    "save_image",
    "save_mask",
    "save_position_map",
    "universal_region_masks",
    "rasterize",
    "render",
    "SyntheticFaceProvider",
    "GeometryProvider",
    "Pose",
    "PositionMap",
    "RegionMaskSet",
    "TextureMap",
]
