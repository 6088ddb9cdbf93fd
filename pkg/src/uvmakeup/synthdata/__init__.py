"""Synthetic training and evaluation data: stickers, faces, generators."""

from .blend import blend_sticker
from .faces import (
    FaceDataset,
    build_face_dataset,
    clean_subject_texture,
    style_texture,
)
from .generate import generate_synt1, generate_synt2, read_manifest
from .placement import (
    DEFAULT_OPACITY_RANGE,
    SCALE_RANGE,
    PlacementParams,
    center_exclusion_box,
    draw_placement,
    validate_placement,
)
from .stickers import (
    Sticker,
    load_sticker,
    load_sticker_library,
    make_sticker,
    make_sticker_library,
    save_sticker_library,
)

__all__ = [
    "FaceDataset",
    "PlacementParams",
    "Sticker",
    "DEFAULT_OPACITY_RANGE",
    "SCALE_RANGE",
    "blend_sticker",
    "build_face_dataset",
    "center_exclusion_box",
    "clean_subject_texture",
    "draw_placement",
    "generate_synt1",
    "generate_synt2",
    "load_sticker",
    "load_sticker_library",
    "make_sticker",
    "make_sticker_library",
    "read_manifest",
    "save_sticker_library",
    "style_texture",
    "validate_placement",
]
