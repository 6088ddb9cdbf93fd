"""Dataset generators: segmentation pairs and transfer-evaluation triplets.

Both generators derive one RNG stream per sample from (seed, index), so the
output is reproducible record-for-record and safe to parallelize. Manifests
are JSONL, one record per emitted (or skipped) sample, with a sha256 per
artifact; regenerating with the same seed reproduces every checksum.
"""

import json
from pathlib import Path

import numpy as np

from ..errors import DataError, GeometryError, PlacementError
from ..uvgeom import layout
from ..uvgeom.extract import extract_texture
from ..uvgeom.io import file_sha256, save_image, save_mask, save_position_map
from ..uvgeom.render import render
from .blend import blend_sticker
from .faces import style_texture
from .placement import DEFAULT_OPACITY_RANGE, draw_placement

MANIFEST_NAME = "manifest.jsonl"
_PLACEMENT_TRIES = 8


def _write_manifest(path, header, records):
    with open(path, "w") as f:
        f.write(json.dumps(header) + "\n")
        for rec in records:
            f.write(json.dumps(rec) + "\n")


def read_manifest(path):
    """Returns (header, records) of a dataset manifest."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise DataError("empty manifest: %s" % path)
    header = json.loads(lines[0])
    return header, [json.loads(ln) for ln in lines[1:]]


def _split_pools(ids, rng, train_fraction):
    """Disjoint train/test identity pools; both sides non-empty."""
    ids = sorted(ids)
    if len(ids) < 2:
        raise DataError("need at least 2 identities to split, got %d" % len(ids))
    order = [ids[i] for i in rng.permutation(len(ids))]
    cut = min(max(int(round(train_fraction * len(order))), 1), len(order) - 1)
    return {"train": order[:cut], "test": order[cut:]}


def _nonzero_placement(rng, tex, sticker, valid, opacity_range, seed):
    # a ring-shaped sticker can miss its own center; redraw a few times
    for _ in range(_PLACEMENT_TRIES):
        p = draw_placement(rng, valid, opacity_range=opacity_range, seed=seed)
        blended, mask = blend_sticker(tex, sticker, p, valid)
        if mask.max() > 0:
            return p, blended, mask
    raise PlacementError("no placement produced a visible pattern")


def generate_synt1(
    faces,
    stickers,
    n,
    seed,
    out_root,
    train_fraction=0.75,
    opacity_range=DEFAULT_OPACITY_RANGE,
):
    """Build n (image, texture, pattern-mask) samples for segmentation.

    faces is a FaceDataset; stickers a list of Sticker. Subject ids and
    sticker names are partitioned so the train and test splits share
    neither. Samples whose geometry fails are skipped and logged.

    Returns (manifest_path, emitted_records).
    """
    out_root = Path(out_root)
    for sub in ("images", "textures", "masks"):
        (out_root / sub).mkdir(parents=True, exist_ok=True)
    if not faces.records or not stickers:
        raise DataError("faces and stickers must be non-empty")

    split_rng = np.random.default_rng([int(seed)])
    subject_pool = _split_pools(faces.subjects(), split_rng, train_fraction)
    sticker_pool = _split_pools([st.name for st in stickers], split_rng, train_fraction)
    by_name = {st.name: st for st in stickers}

    n_train = int(round(n * train_fraction))
    records = []
    emitted = []
    for i in range(int(n)):
        rng = np.random.default_rng([int(seed), i])
        split = "train" if i < n_train else "test"
        candidates = [r for r in faces.records if r["subject"] in subject_pool[split]]
        face_rec = candidates[int(rng.integers(len(candidates)))]
        sticker = by_name[
            sticker_pool[split][int(rng.integers(len(sticker_pool[split])))]
        ]
        try:
            image = faces.load_image(face_rec)
            pos = faces.load_position_map(face_rec)
            tex = extract_texture(image, pos)
            p, blended, mask = _nonzero_placement(
                rng, tex, sticker, pos.valid, opacity_range, seed=i
            )
            out_image = render(pos, blended, image)
        except (GeometryError, PlacementError) as exc:
            records.append(
                {"index": i, "event": "skipped", "reason": str(exc), "face": face_rec["stem"]}
            )
            continue

        stem = "synt1_%05d" % i
        paths = {
            "image": "images/%s.png" % stem,
            "texture": "textures/%s.png" % stem,
            "posmap": "textures/%s.uvpm" % stem,
            "mask": "masks/%s.png" % stem,
        }
        save_image(out_root / paths["image"], out_image)
        save_image(out_root / paths["texture"], blended.texels)
        save_position_map(out_root / paths["posmap"], pos)
        save_mask(out_root / paths["mask"], mask)
        rec = {
            "index": i,
            "event": "sample",
            "stem": stem,
            "split": split,
            "subject": face_rec["subject"],
            "face": face_rec["stem"],
            "sticker": sticker.name,
            "placement": p.as_dict(),
            "paths": paths,
            "sha256": {k: file_sha256(out_root / v) for k, v in paths.items()},
        }
        records.append(rec)
        emitted.append(rec)

    header = {
        "format": "uvmakeup-synt1",
        "version": 1,
        "seed": int(seed),
        "n": int(n),
        "train_fraction": train_fraction,
        "subjects": subject_pool,
        "stickers": sticker_pool,
    }
    manifest = out_root / MANIFEST_NAME
    _write_manifest(manifest, header, records)
    return manifest, emitted


def generate_synt2(
    faces,
    styles,
    stickers,
    color_net,
    n,
    seed,
    out_root,
    opacity_range=DEFAULT_OPACITY_RANGE,
):
    """Build n (source, reference, ground-truth) transfer triplets.

    Two faces of different subjects are color-styled toward the same style
    texture by color_net; the same sticker with the same UV placement is
    blended into both styled textures. The ground truth is the styled,
    stickered source re-rendered over the source image; the reference shows
    the same makeup on the other subject.

    styles: list of (name, TextureMap) or plain int style ids.
    Returns (manifest_path, emitted_records).
    """
    out_root = Path(out_root)
    for sub in ("images", "textures", "masks"):
        (out_root / sub).mkdir(parents=True, exist_ok=True)
    if len(faces.subjects()) < 2:
        raise DataError("synt2 needs at least two subjects")
    if not styles or not stickers:
        raise DataError("styles and stickers must be non-empty")
    if not getattr(color_net, "initialized", False):
        raise DataError("synt2 needs an initialized color net")

    named_styles = [
        (s[0], s[1]) if isinstance(s, tuple) else ("style_%03d" % s, style_texture(s))
        for s in styles
    ]

    records = []
    emitted = []
    for i in range(int(n)):
        rng = np.random.default_rng([int(seed), i])
        subjects = faces.subjects()
        src_subject, ref_subject = (
            subjects[j] for j in rng.choice(len(subjects), size=2, replace=False)
        )
        src_rec = faces.by_subject(src_subject)[
            int(rng.integers(len(faces.by_subject(src_subject))))
        ]
        ref_rec = faces.by_subject(ref_subject)[
            int(rng.integers(len(faces.by_subject(ref_subject))))
        ]
        style_name, style_tex = named_styles[int(rng.integers(len(named_styles)))]
        sticker = stickers[int(rng.integers(len(stickers)))]

        try:
            src_image = faces.load_image(src_rec)
            ref_image = faces.load_image(ref_rec)
            src_pos = faces.load_position_map(src_rec)
            ref_pos = faces.load_position_map(ref_rec)
            t_src = extract_texture(src_image, src_pos)
            t_ref = extract_texture(ref_image, ref_pos)
            styled_src, _ = color_net.swap(t_src, style_tex)
            styled_ref, _ = color_net.swap(t_ref, style_tex)
            p, gt_tex, mask = _nonzero_placement(
                rng, styled_src, sticker, src_pos.valid, opacity_range, seed=i
            )
            ref_blend, ref_mask = blend_sticker(styled_ref, sticker, p, ref_pos.valid)
            gt_image = render(src_pos, gt_tex, src_image)
            ref_out_image = render(ref_pos, ref_blend, ref_image)
        except (GeometryError, PlacementError) as exc:
            records.append({"index": i, "event": "skipped", "reason": str(exc)})
            continue

        stem = "synt2_%05d" % i
        paths = {
            "source": "images/%s_source.png" % stem,
            "reference": "images/%s_reference.png" % stem,
            "gt": "images/%s_gt.png" % stem,
            "source_posmap": "textures/%s_source.uvpm" % stem,
            "reference_posmap": "textures/%s_reference.uvpm" % stem,
            "gt_texture": "textures/%s_gt.png" % stem,
            "reference_texture": "textures/%s_reference.png" % stem,
            "mask": "masks/%s.png" % stem,
        }
        save_image(out_root / paths["source"], src_image)
        save_image(out_root / paths["reference"], ref_out_image)
        save_image(out_root / paths["gt"], gt_image)
        save_position_map(out_root / paths["source_posmap"], src_pos)
        save_position_map(out_root / paths["reference_posmap"], ref_pos)
        save_image(out_root / paths["gt_texture"], gt_tex.texels)
        save_image(out_root / paths["reference_texture"], ref_blend.texels)
        save_mask(out_root / paths["mask"], mask)
        rec = {
            "index": i,
            "event": "sample",
            "stem": stem,
            "source_subject": src_subject,
            "reference_subject": ref_subject,
            "source_face": src_rec["stem"],
            "reference_face": ref_rec["stem"],
            "style": style_name,
            "sticker": sticker.name,
            "placement": p.as_dict(),
            "mask_identical": bool(np.array_equal(mask, ref_mask)),
            "paths": paths,
            "sha256": {k: file_sha256(out_root / v) for k, v in paths.items()},
        }
        records.append(rec)
        emitted.append(rec)

    header = {
        "format": "uvmakeup-synt2",
        "version": 1,
        "seed": int(seed),
        "n": int(n),
        "styles": [name for name, _ in named_styles],
    }
    manifest = out_root / MANIFEST_NAME
    _write_manifest(manifest, header, records)
    return manifest, emitted
