"""End-to-end pipeline tests: the transfer runner, model persistence,
evaluation drivers, and the command-line interface."""

import json

import numpy as np
import pytest
import yaml
from click.testing import CliRunner

from uvmakeup.colorxfer.networks import ColorNet, IdentityColorNet
from uvmakeup.errors import GeometryError, ModelMissingError
from uvmakeup.fusion import TransferRequest
from uvmakeup.metrics import EvalReport, psnr
from uvmakeup.patternseg.networks import SegNet, predict_mask
from uvmakeup.pipeline import (
    ModelBundle,
    dump_intermediates,
    evaluate_segmentation,
    evaluate_transfer,
    load_models,
    refuse_intermediates,
    regional_histogram_distance,
    save_models,
    transfer,
)
from uvmakeup.pipeline.cli import main as cli_main
from uvmakeup.synthdata import (
    FaceDataset,
    build_face_dataset,
    generate_synt1,
    generate_synt2,
    make_sticker_library,
    save_sticker_library,
)
from uvmakeup.uvgeom.extract import extract_texture
from uvmakeup.uvgeom.types import TextureMap


@pytest.fixture(scope="module")
def face_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipe_faces")
    build_face_dataset(root, subjects=3, per_subject=1, seed=11, image_size=256)
    return root


@pytest.fixture(scope="module")
def faces(face_root):
    return FaceDataset(face_root)


@pytest.fixture(scope="module")
def src_img(faces):
    return faces.load_image(faces.records[0])


@pytest.fixture(scope="module")
def ref_img(faces):
    return faces.load_image(faces.records[1])


@pytest.fixture(scope="module")
def seg_net():
    # untrained but deterministic; enough for plumbing tests
    return SegNet(init_seed=0)


@pytest.fixture(scope="module")
def bundle(provider, seg_net):
    return ModelBundle(color=IdentityColorNet(), pattern=seg_net, provider=provider)


class TintNet:
    """Color stub that paints the source with the reference's mean color.

    Distinct references give distinct outputs, which the identity net
    cannot, so alpha semantics become observable.
    """

    initialized = True

    def swap(self, t_src, t_ref):
        src = t_src.texels if hasattr(t_src, "texels") else np.asarray(t_src)
        ref = t_ref.texels if hasattr(t_ref, "texels") else np.asarray(t_ref)
        mean = ref.reshape(-1, 3).mean(axis=0).astype(np.float32)
        out = np.broadcast_to(mean, src.shape).copy()
        return TextureMap(texels=out), TextureMap(texels=ref.copy())


class TestTransferRun:
    def test_identity_pipeline_psnr(self, src_img, ref_img, bundle):
        req = TransferRequest(use_color=False, use_pattern=False)
        result = transfer(src_img, ref_img, req, bundle)
        assert result.image.shape == src_img.shape
        assert psnr(result.image, src_img) >= 30.0

    def test_output_valid_range(self, src_img, ref_img, bundle):
        result = transfer(src_img, ref_img, TransferRequest(), bundle)
        assert np.isfinite(result.image).all()
        assert result.image.min() >= 0.0 and result.image.max() <= 1.0

    def test_bit_reproducible(self, src_img, ref_img, bundle):
        a = transfer(src_img, ref_img, TransferRequest(seed=7), bundle)
        b = transfer(src_img, ref_img, TransferRequest(seed=7), bundle)
        assert np.array_equal(a.image, b.image)
        assert np.array_equal(
            a.intermediates["final_texture"].texels,
            b.intermediates["final_texture"].texels,
        )

    def test_zero_mask_equals_color_only(self, src_img, ref_img, bundle):
        zero = np.zeros((256, 256), np.float32)
        with_pat = transfer(
            src_img, ref_img, TransferRequest(), bundle, pattern_mask_override=zero
        )
        without = transfer(
            src_img, ref_img, TransferRequest(use_pattern=False), bundle
        )
        assert np.array_equal(
            with_pat.intermediates["final_texture"].texels,
            without.intermediates["final_texture"].texels,
        )
        assert with_pat.metadata["pattern_empty"]

    def test_mask_independent_of_color_branch(self, src_img, ref_img, bundle):
        on = transfer(src_img, ref_img, TransferRequest(), bundle)
        off = transfer(src_img, ref_img, TransferRequest(use_color=False), bundle)
        assert np.array_equal(
            on.intermediates["pattern_mask"], off.intermediates["pattern_mask"]
        )

    def test_refusion_bit_identity(self, src_img, ref_img, bundle):
        result = transfer(
            src_img, ref_img, TransferRequest(regions=("lips", "skin")), bundle
        )
        redone = refuse_intermediates(result)
        assert np.array_equal(
            redone.texels, result.intermediates["final_texture"].texels
        )

    def test_partial_leaves_outside_untouched(self, src_img, ref_img, bundle, regions):
        req = TransferRequest(regions=("lips",))
        result = transfer(src_img, ref_img, req, bundle)
        outside = regions.union(("lips",)) == 0.0
        t_src = result.intermediates["source_texture"].texels
        final = result.intermediates["final_texture"].texels
        assert np.array_equal(final[outside], t_src[outside])

    def test_alpha_weighs_first_style(self, src_img, ref_img, faces, provider):
        ref2 = faces.load_image(faces.records[2])
        b = ModelBundle(color=TintNet(), provider=provider)
        kw = dict(models=b, reference2=ref2)
        full = transfer(
            src_img, ref_img, TransferRequest(use_pattern=False, alpha=1.0), **kw
        )
        other = transfer(
            src_img, ref_img, TransferRequest(use_pattern=False, alpha=0.0), **kw
        )
        tint_a = TintNet().swap(
            full.intermediates["source_texture"],
            full.intermediates["reference_texture"],
        )[0].texels
        tint_b = TintNet().swap(
            full.intermediates["source_texture"],
            full.intermediates["reference2_texture"],
        )[0].texels
        assert np.array_equal(full.intermediates["color_texture"], tint_a)
        assert np.array_equal(other.intermediates["color_texture"], tint_b)

    def test_alpha_zero_single_reference_is_bare(self, src_img, ref_img, provider):
        b = ModelBundle(color=TintNet(), provider=provider)
        req = TransferRequest(use_pattern=False, alpha=0.0)
        result = transfer(src_img, ref_img, req, b)
        assert np.array_equal(
            result.intermediates["color_texture"],
            result.intermediates["source_texture"].texels,
        )

    def test_pattern_source_reference2(self, src_img, ref_img, faces, bundle):
        ref2 = faces.load_image(faces.records[2])
        req = TransferRequest(pattern_source="reference2")
        result = transfer(src_img, ref_img, req, bundle, reference2=ref2)
        assert np.array_equal(
            result.intermediates["pattern_reference_texture"].texels,
            result.intermediates["reference2_texture"].texels,
        )
        expected = predict_mask(
            bundle.pattern, result.intermediates["reference2_texture"]
        )
        assert np.array_equal(result.intermediates["pattern_mask"], expected)

    def test_geometry_errors_name_the_input(self, src_img, bundle):
        tiny = np.full((64, 64, 3), 0.5, np.float32)
        with pytest.raises(GeometryError) as e:
            transfer(tiny, src_img, TransferRequest(), bundle)
        assert e.value.detail["input"] == "source"
        with pytest.raises(GeometryError) as e:
            transfer(src_img, tiny, TransferRequest(), bundle)
        assert e.value.detail["input"] == "reference"

    def test_missing_models_name_the_branch(self, src_img, ref_img, provider):
        empty = ModelBundle(provider=provider)
        with pytest.raises(ModelMissingError) as e:
            transfer(src_img, ref_img, TransferRequest(use_pattern=False), empty)
        assert e.value.detail["branch"] == "color"
        with pytest.raises(ModelMissingError) as e:
            transfer(src_img, ref_img, TransferRequest(use_color=False), empty)
        assert e.value.detail["branch"] == "pattern"

    def test_histogram_distance_monitor(self, src_img, ref_img, bundle, regions):
        t_a = transfer(
            src_img, ref_img, TransferRequest(use_pattern=False), bundle
        ).intermediates["color_texture"]
        assert regional_histogram_distance(t_a, t_a, regions) == 0.0
        d = regional_histogram_distance(t_a, np.clip(t_a + 0.25, 0, 1), regions)
        assert 0.0 < d <= 1.0

    def test_dump_intermediates(self, src_img, ref_img, bundle, tmp_path):
        result = transfer(src_img, ref_img, TransferRequest(), bundle)
        out = dump_intermediates(result, tmp_path / "dump")
        names = {p.name for p in out.iterdir()}
        assert {
            "source_texture.png",
            "reference_texture.png",
            "color_texture.png",
            "pattern_mask.png",
            "final_texture.png",
            "output.png",
            "source_position.uvpm",
            "timings.json",
        } <= names
        timings = json.loads((out / "timings.json").read_text())
        assert set(timings["timings"]) == {
            "geometry", "extract", "color", "pattern", "fuse", "render",
        }


class TestModelStore:
    def test_identity_marker_round_trip(self, tmp_path, provider):
        saved = save_models(ModelBundle(color=IdentityColorNet()), tmp_path / "m")
        assert [p.name for p in saved] == ["color.identity"]
        again = load_models(tmp_path / "m", provider=provider)
        assert isinstance(again.color, IdentityColorNet)
        assert again.loaded() == ["color"]

    def test_network_round_trip(self, tmp_path, provider, seg_net, face_texture):
        color = ColorNet(width=4, res_blocks=1, init_seed=3)
        save_models(ModelBundle(color=color, pattern=seg_net), tmp_path / "m")
        again = load_models(tmp_path / "m", provider=provider)
        assert again.loaded() == ["color", "pattern"]
        a, _ = color.swap(face_texture, face_texture)
        b, _ = again.color.swap(face_texture, face_texture)
        assert np.array_equal(a.texels, b.texels)
        assert np.array_equal(
            predict_mask(seg_net, face_texture),
            predict_mask(again.pattern, face_texture),
        )

    def test_empty_directory(self, tmp_path, provider):
        empty = load_models(tmp_path, provider=provider)
        assert empty.loaded() == []
        with pytest.raises(ModelMissingError):
            empty.require("color")


@pytest.fixture(scope="module")
def sticker_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("pipe_stickers")
    save_sticker_library(make_sticker_library(4, seed=5), root)
    return root


@pytest.fixture(scope="module")
def synt1_root(tmp_path_factory, faces, sticker_root):
    from uvmakeup.synthdata import load_sticker_library

    root = tmp_path_factory.mktemp("pipe_synt1")
    generate_synt1(
        faces, load_sticker_library(sticker_root), n=6, seed=3, out_root=root
    )
    return root


@pytest.fixture(scope="module")
def synt2_root(tmp_path_factory, faces, sticker_root):
    from uvmakeup.synthdata import load_sticker_library

    root = tmp_path_factory.mktemp("pipe_synt2")
    generate_synt2(
        faces,
        [0, 1],
        load_sticker_library(sticker_root),
        IdentityColorNet(),
        n=2,
        seed=9,
        out_root=root,
    )
    return root


@pytest.fixture(scope="module")
def models_root(tmp_path_factory, seg_net):
    root = tmp_path_factory.mktemp("pipe_models") / "m"
    save_models(ModelBundle(color=IdentityColorNet(), pattern=seg_net), root)
    return root


class TestEvalRuns:
    def test_segmentation_eval(self, synt1_root, seg_net, tmp_path):
        path = tmp_path / "seg.jsonl"
        report = evaluate_segmentation(synt1_root, seg_net, report_path=path)
        agg = report.aggregates()
        assert agg["sample_count"] >= 1 and agg["failure_count"] == 0
        assert 0.0 <= agg["miou"] <= 1.0
        again = EvalReport.load(path)
        assert again.aggregates() == agg

    def test_transfer_eval_gt_mask(self, synt2_root, bundle, tmp_path):
        report = evaluate_transfer(
            synt2_root, bundle, use_gt_mask=True, report_path=tmp_path / "t.jsonl"
        )
        agg = report.aggregates()
        assert agg["sample_count"] == 2 and agg["failure_count"] == 0
        # identity color net + true mask: only resampling separates
        # output from ground truth
        assert agg["ms_ssim"] >= 0.99
        assert agg["identity"] >= 0.99


def _invoke(*args):
    return CliRunner().invoke(cli_main, [str(a) for a in args])


def _stderr_category(result):
    return json.loads(result.stderr.strip().splitlines()[-1])["category"]


class TestCLI:
    def test_version(self):
        out = _invoke("--version")
        assert out.exit_code == 0 and "0.1.0" in out.output

    def test_generators(self, tmp_path):
        out = _invoke("make-stickers", "--out", tmp_path / "st", "--n", 3, "--seed", 1)
        assert out.exit_code == 0, out.output
        out = _invoke(
            "make-faces", "--out", tmp_path / "f",
            "--subjects", 2, "--per-subject", 1, "--seed", 4,
        )
        assert out.exit_code == 0, out.output
        out = _invoke(
            "synth1", "--faces", tmp_path / "f", "--stickers", tmp_path / "st",
            "--n", 2, "--seed", 1, "--out", tmp_path / "s1",
        )
        assert out.exit_code == 0, out.output
        out = _invoke(
            "synth2", "--faces", tmp_path / "f", "--stickers", tmp_path / "st",
            "--n", 1, "--seed", 2, "--out", tmp_path / "s2", "--styles", 2,
        )
        assert out.exit_code == 0, out.output
        assert (tmp_path / "s2" / "manifest.jsonl").exists()

    def test_transfer_command(self, face_root, models_root, tmp_path):
        src = face_root / "images" / "subj000_00.png"
        ref = face_root / "images" / "subj001_00.png"
        out = _invoke(
            "transfer", "--source", src, "--reference", ref,
            "--out", tmp_path / "out.png", "--models", models_root,
            "--regions", "lips,eyes", "--alpha", 0.5,
            "--dump-intermediates", tmp_path / "dump",
        )
        assert out.exit_code == 0, out.output
        assert (tmp_path / "out.png").exists()
        assert (tmp_path / "dump" / "final_texture.png").exists()

    def test_transfer_missing_model(self, face_root, tmp_path):
        src = face_root / "images" / "subj000_00.png"
        (tmp_path / "empty").mkdir()
        out = _invoke(
            "transfer", "--source", src, "--reference", src,
            "--out", tmp_path / "o.png", "--models", tmp_path / "empty",
        )
        assert out.exit_code == 1
        assert _stderr_category(out) == "model"

    def test_transfer_bad_alpha(self, face_root, models_root, tmp_path):
        src = face_root / "images" / "subj000_00.png"
        out = _invoke(
            "transfer", "--source", src, "--reference", src,
            "--out", tmp_path / "o.png", "--models", models_root, "--alpha", 1.5,
        )
        assert out.exit_code == 1
        assert _stderr_category(out) == "request"

    def test_eval_seg_command(self, synt1_root, models_root, tmp_path):
        out = _invoke(
            "eval", "--task", "seg", "--dataset", synt1_root,
            "--models", models_root, "--report", tmp_path / "r.jsonl",
        )
        assert out.exit_code == 0, out.output
        assert "miou" in json.loads(out.output)
        assert (tmp_path / "r.jsonl").exists()

    def test_eval_transfer_command(self, synt2_root, models_root, tmp_path):
        out = _invoke(
            "eval", "--task", "transfer", "--dataset", synt2_root,
            "--models", models_root, "--report", tmp_path / "r.jsonl", "--gt-mask",
        )
        assert out.exit_code == 0, out.output
        assert json.loads(out.output)["ms_ssim"] >= 0.99

    def test_train_color_command(self, tmp_path):
        cfg = {
            "data": {"makeup": {"procedural": 2}, "clean": {"procedural": 2}},
            "train": {
                "epochs": 1, "iterations_per_epoch": 2,
                "width": 4, "res_blocks": 1, "disc_width": 4,
            },
            "out": str(tmp_path / "m"),
        }
        (tmp_path / "c.yaml").write_text(yaml.safe_dump(cfg))
        out = _invoke("train-color", "--config", tmp_path / "c.yaml")
        assert out.exit_code == 0, out.output
        assert (tmp_path / "m" / "color.pt").exists()

    def test_train_pattern_command(self, synt1_root, tmp_path):
        cfg = {
            "data": {"dataset": str(synt1_root), "split": "train"},
            "train": {"epochs": 1, "batch_size": 2, "base_width": 4, "depth": 2},
            "out": str(tmp_path / "m"),
        }
        (tmp_path / "c.yaml").write_text(yaml.safe_dump(cfg))
        out = _invoke("train-pattern", "--config", tmp_path / "c.yaml")
        assert out.exit_code == 0, out.output
        assert (tmp_path / "m" / "pattern.pt").exists()

    def test_train_bad_config_key(self, tmp_path):
        (tmp_path / "c.yaml").write_text(yaml.safe_dump({"train": {"bogus": 1}}))
        out = _invoke("train-color", "--config", tmp_path / "c.yaml")
        assert out.exit_code == 1
        assert _stderr_category(out) == "config"

    def test_train_unknown_section(self, synt1_root, tmp_path):
        # net shape belongs under train:, a stray model: section must not
        # be silently ignored
        cfg = {
            "data": {"dataset": str(synt1_root)},
            "train": {"epochs": 1, "batch_size": 2},
            "model": {"base_width": 4, "depth": 2},
        }
        (tmp_path / "c.yaml").write_text(yaml.safe_dump(cfg))
        out = _invoke("train-pattern", "--config", tmp_path / "c.yaml")
        assert out.exit_code == 1
        assert _stderr_category(out) == "config"
        assert "model" in out.stderr

    def test_train_out_must_be_a_path(self, synt1_root, tmp_path):
        cfg = {
            "data": {"dataset": str(synt1_root)},
            "train": {"epochs": 1, "batch_size": 2, "base_width": 4, "depth": 2},
            "out": {"checkpoint_dir": str(tmp_path / "m")},
        }
        (tmp_path / "c.yaml").write_text(yaml.safe_dump(cfg))
        out = _invoke("train-pattern", "--config", tmp_path / "c.yaml")
        assert out.exit_code == 1
        assert _stderr_category(out) == "config"
