"""Sticker assets, placement rules, blending, and dataset generation."""

import numpy as np
import pytest
from PIL import Image as PILImage

from uvmakeup.colorxfer.networks import ColorNet, IdentityColorNet
from uvmakeup.errors import DataError, PlacementError
from uvmakeup.synthdata import (
    FaceDataset,
    PlacementParams,
    Sticker,
    blend_sticker,
    build_face_dataset,
    center_exclusion_box,
    draw_placement,
    generate_synt1,
    generate_synt2,
    validate_placement,
    load_sticker,
    load_sticker_library,
    make_sticker,
    make_sticker_library,
    read_manifest,
    save_sticker_library,
)
from uvmakeup.uvgeom import layout
from uvmakeup.uvgeom.extract import extract_texture
from uvmakeup.uvgeom.io import load_image, load_mask, load_position_map
from uvmakeup.uvgeom.render import render


@pytest.fixture(scope="module")
def face_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("faces")
    build_face_dataset(root, subjects=4, per_subject=2, seed=11, image_size=256)
    return root


@pytest.fixture(scope="module")
def faces(face_root):
    return FaceDataset(face_root)


@pytest.fixture(scope="module")
def stickers():
    return make_sticker_library(6, seed=5)


@pytest.fixture(scope="module")
def synt1_run(tmp_path_factory, faces, stickers):
    out = tmp_path_factory.mktemp("synt1")
    manifest, emitted = generate_synt1(faces, stickers, n=10, seed=3, out_root=out)
    return out, manifest, emitted


def solid_sticker(color, size=32, alpha=1.0):
    rgba = np.empty((size, size, 4), dtype=np.float32)
    rgba[..., :3] = color
    rgba[..., 3] = alpha
    return Sticker(name="solid", rgba=rgba)


class TestStickers:
    def test_deterministic(self):
        a = make_sticker(3, seed=9)
        b = make_sticker(3, seed=9)
        assert a.name == b.name
        assert np.array_equal(a.rgba, b.rgba)

    def test_library_round_trip(self, tmp_path, stickers):
        save_sticker_library(stickers, tmp_path)
        loaded = load_sticker_library(tmp_path)
        assert [s.name for s in loaded] == [s.name for s in stickers]
        for orig, back in zip(stickers, loaded):
            assert np.abs(orig.rgba - back.rgba).max() <= 0.5 / 255 + 1e-6

    def test_alpha_present_and_partial(self, stickers):
        for st in stickers:
            assert st.alpha.max() > 0.5
            assert st.alpha.min() == 0.0

    def test_rejects_missing_alpha(self, tmp_path):
        path = tmp_path / "flat.png"
        PILImage.new("RGB", (8, 8), (200, 10, 10)).save(path)
        with pytest.raises(DataError):
            load_sticker(path)

    def test_empty_dir_rejected(self, tmp_path):
        with pytest.raises(DataError):
            load_sticker_library(tmp_path)


class TestPlacement:
    def test_draws_stay_admissible(self):
        valid = layout.valid_mask()
        r0, r1, c0, c1 = center_exclusion_box(valid)
        rng = np.random.default_rng(0)
        h, w = valid.shape
        for _ in range(200):
            p = draw_placement(rng, valid)
            row, col = int(p.center_uv[1] * h), int(p.center_uv[0] * w)
            assert valid[row, col]
            assert not (r0 <= row < r1 and c0 <= col < c1)
            assert 0.5 <= p.scale <= 1.5
            assert 0.6 <= p.opacity <= 1.0

    def test_center_of_face_rejected(self):
        # dead center of the face lies inside the excluded middle ninth
        valid = layout.valid_mask()
        with pytest.raises(PlacementError):
            validate_placement(
                PlacementParams(scale=1.0, center_uv=(0.5, 0.52), opacity=0.8), valid
            )

    def test_off_face_rejected(self):
        valid = layout.valid_mask()
        with pytest.raises(PlacementError):
            validate_placement(
                PlacementParams(scale=1.0, center_uv=(0.02, 0.02), opacity=0.8), valid
            )

    def test_bad_scale_and_opacity_rejected(self):
        valid = layout.valid_mask()
        ok = (0.3, 0.62)
        with pytest.raises(PlacementError):
            validate_placement(PlacementParams(scale=2.0, center_uv=ok, opacity=0.8), valid)
        with pytest.raises(PlacementError):
            validate_placement(PlacementParams(scale=1.0, center_uv=ok, opacity=1.5), valid)

    def test_dict_round_trip(self):
        p = PlacementParams(scale=1.2, center_uv=(0.3, 0.6), opacity=0.7, seed=4)
        assert PlacementParams.from_dict(p.as_dict()) == p


class TestBlend:
    def cheek_placement(self, opacity=0.8, scale=1.0):
        return PlacementParams(scale=scale, center_uv=(0.30, 0.62), opacity=opacity)

    def test_zero_opacity_is_identity(self, face_texture):
        st = solid_sticker((0.1, 0.9, 0.1))
        out, mask = blend_sticker(face_texture, st, self.cheek_placement(opacity=0.0))
        assert np.array_equal(out.texels, face_texture.texels)
        assert mask.max() == 0.0

    def test_opaque_blend_takes_sticker_color(self, face_texture):
        st = solid_sticker((0.75, 0.5, 0.25))
        out, mask = blend_sticker(face_texture, st, self.cheek_placement(opacity=1.0))
        core = mask > 0.999
        assert core.sum() > 50
        assert np.allclose(out.texels[core], (0.75, 0.5, 0.25), atol=1e-5)

    def test_half_opacity_mixes_evenly(self):
        white = np.ones(layout.UV_SIZE + (3,), dtype=np.float32)
        from uvmakeup.uvgeom.types import TextureMap

        tex = TextureMap(texels=white)
        st = solid_sticker((0.0, 0.0, 0.0))
        out, mask = blend_sticker(tex, st, self.cheek_placement(opacity=0.5))
        core = mask > 0.499
        assert np.allclose(out.texels[core], 0.5, atol=1e-5)
        assert np.allclose(mask[core], 0.5, atol=1e-6)

    def test_untouched_where_mask_zero(self, face_texture):
        st = make_sticker(2, seed=5)
        out, mask = blend_sticker(face_texture, st, self.cheek_placement())
        zero = mask == 0.0
        assert np.array_equal(out.texels[zero], face_texture.texels[zero])

    def test_mask_clipped_to_valid_region(self, face_texture):
        # rim placement: sticker overhangs the face boundary
        st = solid_sticker((0.9, 0.1, 0.1))
        p = PlacementParams(scale=1.5, center_uv=(0.14, 0.52), opacity=1.0)
        out, mask = blend_sticker(face_texture, st, p)
        valid = layout.valid_mask()
        assert mask[~valid].max() == 0.0
        assert mask[valid].max() > 0.9

    def test_invalid_placement_rejected(self, face_texture):
        st = solid_sticker((0.9, 0.1, 0.1))
        with pytest.raises(PlacementError):
            blend_sticker(face_texture, st, PlacementParams(1.0, (0.5, 0.52), 0.8))


class TestSynt1:
    def test_emits_requested_samples(self, synt1_run):
        out, manifest, emitted = synt1_run
        header, records = read_manifest(manifest)
        assert header["format"] == "uvmakeup-synt1"
        assert len(emitted) == 10
        assert {r["split"] for r in emitted} == {"train", "test"}

    def test_split_identities_disjoint(self, synt1_run):
        _, manifest, emitted = synt1_run
        header, _ = read_manifest(manifest)
        assert not set(header["subjects"]["train"]) & set(header["subjects"]["test"])
        assert not set(header["stickers"]["train"]) & set(header["stickers"]["test"])
        for rec in emitted:
            assert rec["subject"] in header["subjects"][rec["split"]]
            assert rec["sticker"] in header["stickers"][rec["split"]]

    def test_masks_nonzero_and_on_face(self, synt1_run):
        out, _, emitted = synt1_run
        for rec in emitted:
            mask = load_mask(out / rec["paths"]["mask"])
            pos = load_position_map(out / rec["paths"]["posmap"])
            assert mask.max() > 0.0
            assert mask[~pos.valid].max() == 0.0

    def test_regeneration_reproduces_checksums(self, tmp_path, faces, stickers, synt1_run):
        _, _, first = synt1_run
        _, again = generate_synt1(faces, stickers, n=10, seed=3, out_root=tmp_path)
        assert [r["sha256"] for r in again] == [r["sha256"] for r in first]

    def test_label_round_trip_fidelity(self, synt1_run, faces):
        # residual of the re-extracted texture against an equally processed
        # clean texture must land on the stored mask; both chains go through
        # one render->extract hop so resampling blur cancels
        out, _, emitted = synt1_run
        for rec in emitted:
            pos = load_position_map(out / rec["paths"]["posmap"])
            re_tex = extract_texture(load_image(out / rec["paths"]["image"]), pos)
            face_rec = next(r for r in faces.records if r["stem"] == rec["face"])
            orig = faces.load_image(face_rec)
            clean = extract_texture(orig, pos)
            clean_rt = extract_texture(
                np.clip(render(pos, clean, orig), 0.0, 1.0), pos
            )
            resid = np.abs(re_tex.texels - clean_rt.texels).max(axis=2) > 0.05
            stored = load_mask(out / rec["paths"]["mask"]) >= 0.05
            iou = (resid & stored).sum() / (resid | stored).sum()
            assert iou >= 0.9, "sample %s IoU %.3f" % (rec["stem"], iou)

    def test_failed_geometry_skipped_and_logged(self, tmp_path, stickers):
        root = tmp_path / "faces"
        build_face_dataset(root, subjects=2, per_subject=1, seed=1, image_size=256)
        # shrink one image so its stored position map no longer fits
        victim = root / "images" / "subj001_00.png"
        PILImage.open(victim).resize((160, 160)).save(victim)
        faces = FaceDataset(root)
        manifest, emitted = generate_synt1(
            faces, stickers, n=6, seed=2, out_root=tmp_path / "out"
        )
        _, records = read_manifest(manifest)
        skipped = [r for r in records if r["event"] == "skipped"]
        assert skipped and all("geometry" in r["reason"] or "image" in r["reason"] or "fit" in r["reason"] for r in skipped)
        assert len(emitted) == 6 - len(skipped)

    def test_empty_inputs_rejected(self, faces):
        with pytest.raises(DataError):
            generate_synt1(faces, [], n=2, seed=0, out_root="/tmp/unused")


@pytest.fixture(scope="module")
def synt2_run(tmp_path_factory, faces, stickers):
    out = tmp_path_factory.mktemp("synt2")
    manifest, emitted = generate_synt2(
        faces, [0, 1], stickers, IdentityColorNet(), n=3, seed=9, out_root=out
    )
    return out, manifest, emitted


class TestSynt2:
    def test_triplets_complete(self, synt2_run):
        out, manifest, emitted = synt2_run
        assert len(emitted) == 3
        for rec in emitted:
            for key in ("source", "reference", "gt", "mask"):
                assert (out / rec["paths"][key]).exists()
            assert rec["source_subject"] != rec["reference_subject"]

    def test_reference_and_gt_share_the_mask(self, synt2_run, faces, stickers):
        out, _, emitted = synt2_run
        by_name = {s.name: s for s in stickers}
        for rec in emitted:
            assert rec["mask_identical"]
            # recompute the reference-side mask from stored placement
            ref_rec = next(r for r in faces.records if r["stem"] == rec["reference_face"])
            pos = faces.load_position_map(ref_rec)
            t_ref = extract_texture(faces.load_image(ref_rec), pos)
            _, mask = blend_sticker(
                t_ref,
                by_name[rec["sticker"]],
                PlacementParams.from_dict(rec["placement"]),
                pos.valid,
            )
            stored = load_mask(out / rec["paths"]["mask"])
            assert np.abs(stored - mask).max() <= 0.5 / 255 + 1e-6

    def test_identity_net_gt_is_plain_blend(self, synt2_run, faces, stickers):
        # with a pass-through color net, the ground-truth texture must equal
        # sticker-on-source directly, up to 8-bit storage rounding
        out, _, emitted = synt2_run
        by_name = {s.name: s for s in stickers}
        for rec in emitted:
            src_rec = next(r for r in faces.records if r["stem"] == rec["source_face"])
            pos = faces.load_position_map(src_rec)
            t_src = extract_texture(faces.load_image(src_rec), pos)
            blended, _ = blend_sticker(
                t_src,
                by_name[rec["sticker"]],
                PlacementParams.from_dict(rec["placement"]),
                pos.valid,
            )
            stored = load_image(out / rec["paths"]["gt_texture"])
            assert np.array_equal(
                np.round(stored * 255.0), np.round(blended.texels * 255.0)
            )

    def test_deterministic(self, tmp_path, faces, stickers, synt2_run):
        _, _, first = synt2_run
        _, again = generate_synt2(
            faces, [0, 1], stickers, IdentityColorNet(), n=3, seed=9, out_root=tmp_path
        )
        assert [r["sha256"] for r in again] == [r["sha256"] for r in first]

    def test_single_subject_rejected(self, tmp_path, stickers):
        root = tmp_path / "one"
        build_face_dataset(root, subjects=1, per_subject=2, seed=1, image_size=256)
        with pytest.raises(DataError):
            generate_synt2(
                FaceDataset(root), [0], stickers, IdentityColorNet(), n=1, seed=0,
                out_root=tmp_path / "out",
            )

    def test_uninitialized_net_rejected(self, faces, stickers, tmp_path):
        bare = ColorNet(width=4, res_blocks=1, disc_width=4, init_seed=None)
        with pytest.raises(DataError):
            generate_synt2(
                faces, [0], stickers, bare, n=1, seed=0, out_root=tmp_path / "out"
            )
