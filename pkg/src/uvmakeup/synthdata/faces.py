"""Procedural face subjects: textures, rendered images, dataset layout.

Subjects are deterministic functions of their integer id, so any two runs
agree on what subject 7 looks like. A face dataset on disk is a directory of
rendered images plus UVPM position maps and a JSONL manifest; that is also
the ingestion format for externally supplied face crops.
"""

import json
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from ..errors import DataError
from ..uvgeom import layout
from ..uvgeom.io import (
    file_sha256,
    load_image,
    load_position_map,
    save_image,
    save_position_map,
)
from ..uvgeom.regions import universal_region_masks
from ..uvgeom.render import render
from ..uvgeom.synthetic import SyntheticFaceProvider
from ..uvgeom.types import Pose, TextureMap

MANIFEST_NAME = "manifest.jsonl"

SKIN_TONES = (
    (0.96, 0.85, 0.76),
    (0.92, 0.77, 0.65),
    (0.85, 0.68, 0.55),
    (0.72, 0.55, 0.42),
    (0.58, 0.42, 0.32),
    (0.45, 0.31, 0.23),
)

LIP_COLORS = (
    (0.78, 0.22, 0.28),
    (0.62, 0.12, 0.35),
    (0.85, 0.35, 0.30),
    (0.55, 0.20, 0.20),
    (0.90, 0.45, 0.50),
)

SHADOW_COLORS = (
    (0.45, 0.25, 0.55),
    (0.25, 0.35, 0.60),
    (0.60, 0.40, 0.20),
    (0.30, 0.50, 0.45),
    (0.50, 0.25, 0.30),
)


def _base_face(rng, uv_size, tone):
    """Smooth skin-toned canvas with mild per-subject shading."""
    h, w = uv_size
    tone = np.asarray(tone, dtype=np.float32)
    tex = np.broadcast_to(tone, (h, w, 3)).copy()
    # low-frequency shading field, different per subject
    grain = rng.normal(0.0, 1.0, (h // 8, w // 8, 3)).astype(np.float32)
    grain = gaussian_filter(grain, sigma=(2.0, 2.0, 0.0))
    grain = np.kron(grain, np.ones((8, 8, 1), dtype=np.float32))[:h, :w]
    vshade = np.linspace(-0.02, 0.02, h, dtype=np.float32)[:, None, None]
    tex = tex * (1.0 + 0.08 * grain + vshade)
    return np.clip(tex, 0.0, 1.0)


def clean_subject_texture(subject_id, uv_size=layout.UV_SIZE):
    """Bare-face texture of one synthetic subject (no cosmetics)."""
    rng = np.random.default_rng([7701, int(subject_id)])
    tone = SKIN_TONES[int(rng.integers(len(SKIN_TONES)))]
    tex = _base_face(rng, uv_size, tone)
    regions = universal_region_masks(tuple(uv_size))
    # natural lip tint and eye darkening, weak enough to read as "no makeup"
    lip = np.clip(np.asarray(tone) * np.array([1.0, 0.75, 0.75]), 0.0, 1.0)
    tex = tex * (1.0 - 0.35 * regions.lips[..., None]) + lip * (0.35 * regions.lips[..., None])
    tex = tex * (1.0 - 0.25 * regions.eyes[..., None])
    tex *= layout.valid_mask(tuple(uv_size))[..., None]
    return TextureMap(texels=np.clip(tex, 0.0, 1.0).astype(np.float32))


def style_texture(style_id, uv_size=layout.UV_SIZE):
    """Color-makeup style texture: saturated lips, eye shadow, foundation."""
    rng = np.random.default_rng([8802, int(style_id)])
    tone = SKIN_TONES[int(rng.integers(len(SKIN_TONES)))]
    tex = _base_face(rng, uv_size, tone)
    regions = universal_region_masks(tuple(uv_size))
    lip = np.asarray(LIP_COLORS[int(rng.integers(len(LIP_COLORS)))], dtype=np.float32)
    shadow = np.asarray(SHADOW_COLORS[int(rng.integers(len(SHADOW_COLORS)))], dtype=np.float32)
    lw = regions.lips[..., None]
    ew = regions.eyes[..., None]
    tex = tex * (1.0 - 0.9 * lw) + lip * (0.9 * lw)
    tex = tex * (1.0 - 0.6 * ew) + shadow * (0.6 * ew)
    # foundation: pull skin toward a slightly warmer flat tone
    foundation = np.clip(np.asarray(tone) + rng.uniform(-0.08, 0.08, 3), 0.0, 1.0).astype(np.float32)
    sw = (0.3 * regions.skin)[..., None]
    tex = tex * (1.0 - sw) + foundation * sw
    tex *= layout.valid_mask(tuple(uv_size))[..., None]
    return TextureMap(texels=np.clip(tex, 0.0, 1.0).astype(np.float32))


def _background(rng, image_size):
    h = w = int(image_size)
    top = rng.uniform(0.1, 0.9, 3)
    bot = rng.uniform(0.1, 0.9, 3)
    t = np.linspace(0.0, 1.0, h)[:, None, None]
    return (top * (1 - t) + bot * t * np.ones((h, w, 3))).astype(np.float32)


def build_face_dataset(
    root,
    subjects,
    per_subject,
    seed,
    uv_size=layout.UV_SIZE,
    image_size=256,
    max_angles=(0.35, 0.25, 0.15),
):
    """Render a directory of synthetic face images with geometry.

    Layout: images/<stem>.png, posmaps/<stem>.uvpm, manifest.jsonl with one
    record per image. Poses are drawn per (seed, subject, shot).

    Returns the list of manifest records.
    """
    root = Path(root)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "posmaps").mkdir(parents=True, exist_ok=True)
    provider = SyntheticFaceProvider(uv_size, pose=None, min_image_size=min(image_size, 150))
    records = []
    for s in range(int(subjects)):
        tex = clean_subject_texture(s, uv_size)
        for k in range(int(per_subject)):
            rng = np.random.default_rng([int(seed), s, k])
            pose = Pose(*(rng.uniform(-m, m) for m in max_angles))
            pos = provider.position_map_for_pose(pose, (image_size, image_size))
            background = _background(rng, image_size)
            image = render(pos, tex, background)
            stem = "subj%03d_%02d" % (s, k)
            image_rel = "images/%s.png" % stem
            posmap_rel = "posmaps/%s.uvpm" % stem
            save_image(root / image_rel, image)
            save_position_map(root / posmap_rel, pos)
            records.append(
                {
                    "stem": stem,
                    "subject": s,
                    "pose": list(pose.as_tuple()),
                    "image": image_rel,
                    "posmap": posmap_rel,
                    "sha256": {
                        "image": file_sha256(root / image_rel),
                        "posmap": file_sha256(root / posmap_rel),
                    },
                }
            )
    with open(root / MANIFEST_NAME, "w") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")
    return records


class FaceDataset:
    """Reader for the on-disk face layout produced by build_face_dataset.

    Also accepts hand-assembled directories: any images/ + posmaps/ pair
    listed in manifest.jsonl works, whatever produced the geometry.
    """

    def __init__(self, root):
        self.root = Path(root)
        manifest = self.root / MANIFEST_NAME
        if not manifest.exists():
            raise DataError("no %s in %s" % (MANIFEST_NAME, root))
        self.records = [
            json.loads(line)
            for line in manifest.read_text().splitlines()
            if line.strip()
        ]
        if not self.records:
            raise DataError("empty face manifest in %s" % root)

    def subjects(self):
        return sorted({rec["subject"] for rec in self.records})

    def by_subject(self, subject):
        return [rec for rec in self.records if rec["subject"] == subject]

    def load_image(self, rec):
        return load_image(self.root / rec["image"])

    def load_position_map(self, rec):
        return load_position_map(self.root / rec["posmap"])
