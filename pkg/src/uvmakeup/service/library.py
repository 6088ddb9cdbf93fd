"""Persisted style library.

Each style is a directory of artifacts precomputed once at upload time:
the stored reference photo, its position map, the extracted UV texture,
the pattern mask, and a display thumbnail. The index file carries a
checksum per artifact so a restart can prove the library is intact.
Precomputing the mask here is what makes interactive alpha and region
changes cheap: they never re-run segmentation.
"""

import json
import os
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from PIL import Image

from ..errors import DataError
from ..patternseg.networks import predict_mask
from ..uvgeom.extract import extract_texture
from ..uvgeom.io import (
    file_sha256,
    load_image,
    load_mask,
    load_position_map,
    save_image,
    save_mask,
    save_position_map,
)

INDEX_NAME = "styles.json"
THUMB_SIZE = 96

REFERENCE_FILE = "reference.png"
POSITION_FILE = "position.uvpm"
TEXTURE_FILE = "texture.png"
MASK_FILE = "mask.png"
THUMB_FILE = "thumbnail.png"

ARTIFACTS = (REFERENCE_FILE, POSITION_FILE, TEXTURE_FILE, MASK_FILE, THUMB_FILE)


class StyleLibrary:
    """Disk-backed style store; writes serialized, reads lock-free."""

    def __init__(self, root, verify=True):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._entries = {}
        index = self.root / INDEX_NAME
        if index.exists():
            try:
                stored = json.loads(index.read_text())
            except json.JSONDecodeError as exc:
                raise DataError("style index %s is corrupt: %s" % (index, exc))
            for entry in stored.get("styles", []):
                if verify:
                    self._verify_entry(entry)
                self._entries[entry["id"]] = entry

    def _verify_entry(self, entry):
        style_dir = self.root / entry["id"]
        for name, expected in entry["sha256"].items():
            path = style_dir / name
            if not path.exists():
                raise DataError(
                    "style %s is missing artifact %s" % (entry["id"], name),
                    detail={"style": entry["id"], "artifact": name},
                )
            actual = file_sha256(path)
            if actual != expected:
                raise DataError(
                    "style %s artifact %s fails its checksum" % (entry["id"], name),
                    detail={"style": entry["id"], "artifact": name},
                )

    def _write_index(self):
        index = self.root / INDEX_NAME
        tmp = index.with_suffix(".json.tmp")
        payload = {"styles": [self._entries[k] for k in sorted(self._entries)]}
        tmp.write_text(json.dumps(payload, indent=2) + "\n")
        os.replace(tmp, index)

    def ids(self):
        return sorted(self._entries)

    def has(self, style_id):
        return style_id in self._entries

    def entries(self):
        return [dict(self._entries[k]) for k in sorted(self._entries)]

    def get(self, style_id):
        entry = self._entries.get(style_id)
        if entry is None:
            raise KeyError(style_id)
        return dict(entry)

    def add(self, image, bundle, name=None):
        """Precompute and persist one style from an (H, W, 3) float image.

        Geometry and segmentation both run here, once. Raises GeometryError
        when no face geometry fits the image and ModelMissingError when the
        segmentation net is not loaded.
        """
        image = np.asarray(image, dtype=np.float32)
        pos = bundle.provider.position_map(image)
        tex = extract_texture(image, pos)
        mask = predict_mask(bundle.require("pattern"), tex)

        style_id = uuid.uuid4().hex[:10]
        style_dir = self.root / style_id
        style_dir.mkdir(parents=True)
        save_image(style_dir / REFERENCE_FILE, image)
        save_position_map(style_dir / POSITION_FILE, pos)
        save_image(style_dir / TEXTURE_FILE, tex.texels)
        save_mask(style_dir / MASK_FILE, mask)
        thumb = Image.fromarray(
            (np.clip(image, 0.0, 1.0) * 255.0).round().astype(np.uint8)
        ).resize((THUMB_SIZE, THUMB_SIZE), Image.LANCZOS)
        thumb.save(style_dir / THUMB_FILE)

        entry = {
            "id": style_id,
            "name": name or style_id,
            "created": datetime.now(timezone.utc).isoformat(),
            "sha256": {a: file_sha256(style_dir / a) for a in ARTIFACTS},
        }
        with self._lock:
            self._entries[style_id] = entry
            self._write_index()
        return dict(entry)

    def artifact_path(self, style_id, name):
        if name not in ARTIFACTS:
            raise KeyError(name)
        entry = self._entries.get(style_id)
        if entry is None:
            raise KeyError(style_id)
        return self.root / style_id / name

    def load_reference(self, style_id):
        return load_image(self.artifact_path(style_id, REFERENCE_FILE))

    def load_position(self, style_id):
        return load_position_map(self.artifact_path(style_id, POSITION_FILE))

    def load_mask(self, style_id):
        return load_mask(self.artifact_path(style_id, MASK_FILE))

    def load_texture(self, style_id):
        return load_image(self.artifact_path(style_id, TEXTURE_FILE))
