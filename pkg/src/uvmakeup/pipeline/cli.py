"""Command-line entry points.

Every failure path prints one machine-readable JSON line to stderr with a
stable error category and exits nonzero; success prints human-oriented
progress to stdout and exits zero.
"""

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np
import yaml

from .. import __version__
from ..colorxfer.losses import LossWeights
from ..colorxfer.networks import IdentityColorNet
from ..colorxfer.train import ColorTrainConfig, train_color
from ..errors import ConfigError, DataError, UVMakeupError
from ..fusion import TransferRequest
from ..patternseg.train import PatternTrainConfig, train_pattern
from ..synthdata import (
    FaceDataset,
    build_face_dataset,
    clean_subject_texture,
    generate_synt1,
    generate_synt2,
    load_sticker_library,
    make_sticker_library,
    save_sticker_library,
    style_texture,
)
from ..synthdata.generate import read_manifest
from ..uvgeom import layout
from ..uvgeom.io import load_image, load_mask, save_image
from ..uvgeom.types import TextureMap
from .evalrun import evaluate_segmentation, evaluate_transfer
from .models import ModelBundle, load_models, save_models
from .transfer import dump_intermediates, transfer


def _emit_error(category, message, detail=None):
    click.echo(
        json.dumps({"category": category, "message": message, "detail": detail or {}}),
        err=True,
    )


def cli_guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UVMakeupError as exc:
            _emit_error(exc.category, exc.message, exc.detail)
            sys.exit(1)
        except click.ClickException:
            raise
        except Exception as exc:  # pragma: no cover - defensive
            _emit_error("internal", "%s: %s" % (type(exc).__name__, exc))
            sys.exit(1)

    return wrapper


def _load_yaml(path):
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError("config file not found: %s" % path)
    except yaml.YAMLError as exc:
        raise ConfigError("config file %s is not valid YAML: %s" % (path, exc))
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping: %s" % path)
    return data


def _check_sections(cfg, allowed, path):
    unknown = sorted(set(cfg) - set(allowed))
    if unknown:
        raise ConfigError(
            "unknown config section(s) %s in %s; expected only %s"
            % (", ".join(repr(k) for k in unknown), path, ", ".join(sorted(allowed)))
        )


def _out_dir(cfg):
    """The optional 'out' entry must be a plain directory path."""
    out = cfg.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out: expected a directory path, got %r" % (out,))
    return out


def _texture_source(spec, kind):
    """data section entry -> list of TextureMaps.

    {"procedural": N} draws N built-in subjects/styles; {"dir": PATH} loads
    every PNG under PATH as a UV texture.
    """
    if not isinstance(spec, dict):
        raise ConfigError("%s: expected {procedural: N} or {dir: PATH}" % kind)
    if "procedural" in spec:
        count = int(spec["procedural"])
        maker = style_texture if kind == "makeup" else clean_subject_texture
        return [maker(i) for i in range(count)]
    if "dir" in spec:
        root = Path(spec["dir"])
        paths = sorted(root.glob("*.png"))
        if not paths:
            raise DataError("no textures found in %s" % root)
        out = []
        for p in paths:
            arr = load_image(p).astype(np.float32)
            if arr.shape[:2] != layout.UV_SIZE:
                raise DataError(
                    "%s is %r, expected UV size %r" % (p, arr.shape[:2], layout.UV_SIZE)
                )
            out.append(TextureMap(texels=arr))
        return out
    raise ConfigError("%s: expected {procedural: N} or {dir: PATH}" % kind)


@click.group()
@click.version_option(version=__version__, prog_name="uvmakeup")
def main():
    """Color-and-pattern makeup transfer on UV texture maps."""


@main.command("transfer")
@click.option("--source", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--reference", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--no-color", is_flag=True, help="Disable the color branch.")
@click.option("--no-pattern", is_flag=True, help="Disable the pattern branch.")
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--regions", default="full", show_default=True,
              help="Comma-separated subset of lips,eyes,skin, or 'full'.")
@click.option("--reference2", type=click.Path(exists=True, dir_okay=False),
              help="Second style image; alpha then mixes the two styles.")
@click.option("--pattern-source", type=click.Choice(["reference", "reference2"]),
              default="reference", show_default=True)
@click.option("--dump-intermediates", "dump_dir", type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None)
@click.option("--models", "models_dir", default="models", show_default=True,
              type=click.Path(file_okay=False))
@cli_guard
def transfer_cmd(source, reference, out, no_color, no_pattern, alpha, regions,
                 reference2, pattern_source, dump_dir, seed, models_dir):
    """Apply the reference image's makeup to the source image."""
    request = TransferRequest(
        use_color=not no_color,
        use_pattern=not no_pattern,
        alpha=alpha,
        regions=tuple(part.strip() for part in regions.split(",") if part.strip()),
        pattern_source=pattern_source,
        seed=seed,
    )
    bundle = load_models(models_dir)
    result = transfer(
        load_image(source),
        load_image(reference),
        request,
        bundle,
        reference2=load_image(reference2) if reference2 else None,
    )
    save_image(out, result.image)
    if dump_dir:
        dump_intermediates(result, dump_dir)
    click.echo("wrote %s" % out)
    if result.metadata.get("pattern_empty"):
        click.echo("note: no pattern detected in the reference")


@main.command("train-color")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@cli_guard
def train_color_cmd(config_path):
    """Train the color branch from a YAML config."""
    cfg = _load_yaml(config_path)
    _check_sections(cfg, ("data", "weights", "train", "out"), config_path)
    out_dir = _out_dir(cfg)
    data = cfg.get("data") or {}
    makeup = _texture_source(data.get("makeup", {"procedural": 12}), "makeup")
    clean = _texture_source(data.get("clean", {"procedural": 12}), "clean")
    weights = LossWeights.from_dict(cfg.get("weights") or {})
    train_cfg = ColorTrainConfig.from_dict(cfg.get("train") or {})
    net, history = train_color(makeup, clean, weights, train_cfg)
    if out_dir:
        files = save_models(ModelBundle(color=net), out_dir)
        click.echo("saved %s" % ", ".join(str(f) for f in files))
    final = [h for h in history if h.get("event") == "final_eval"]
    if final:
        click.echo("final generator loss %.6f" % final[-1]["g_total"])
    click.echo("trained color branch: %d log records" % len(history))


@main.command("train-pattern")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@cli_guard
def train_pattern_cmd(config_path):
    """Train the pattern segmentation branch from a YAML config."""
    cfg = _load_yaml(config_path)
    _check_sections(cfg, ("data", "train", "out"), config_path)
    out_dir = _out_dir(cfg)
    data = cfg.get("data") or {}
    dataset_dir = data.get("dataset")
    if not dataset_dir:
        raise ConfigError("data.dataset must point at a synt1-format dataset")
    split = data.get("split", "train")
    dataset_dir = Path(dataset_dir)
    _, records = read_manifest(dataset_dir / "manifest.jsonl")
    pairs = []
    for rec in records:
        if rec.get("event") != "sample" or (split and rec.get("split") != split):
            continue
        tex = load_image(dataset_dir / rec["paths"]["texture"]).astype(np.float32)
        mask = load_mask(dataset_dir / rec["paths"]["mask"])
        pairs.append((tex, mask))
    if not pairs:
        raise DataError("no %r samples under %s" % (split, dataset_dir))
    train_cfg = PatternTrainConfig.from_dict(cfg.get("train") or {})
    seg, history = train_pattern(pairs, train_cfg)
    if out_dir:
        files = save_models(ModelBundle(pattern=seg), out_dir)
        click.echo("saved %s" % ", ".join(str(f) for f in files))
    click.echo(
        "trained pattern branch on %d pairs, final loss %.6f"
        % (len(pairs), history[-1]["loss"])
    )


@main.command("synth1")
@click.option("--faces", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--stickers", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--n", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--train-fraction", type=float, default=0.75, show_default=True)
@cli_guard
def synth1_cmd(faces, stickers, n, seed, out, train_fraction):
    """Generate (image, texture, pattern-mask) segmentation samples."""
    manifest, emitted = generate_synt1(
        FaceDataset(faces),
        load_sticker_library(stickers),
        n=n,
        seed=seed,
        out_root=out,
        train_fraction=train_fraction,
    )
    click.echo("wrote %d samples, manifest %s" % (len(emitted), manifest))


@main.command("synth2")
@click.option("--faces", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--stickers", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--n", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--styles", type=int, default=4, show_default=True,
              help="Number of procedural color styles to draw from.")
@click.option("--color-model", type=click.Path(exists=True),
              help="Model directory for the color branch; default pass-through.")
@cli_guard
def synth2_cmd(faces, stickers, n, seed, out, styles, color_model):
    """Generate (source, reference, ground-truth) transfer triplets."""
    if color_model:
        net = load_models(color_model).require("color")
    else:
        net = IdentityColorNet()
    manifest, emitted = generate_synt2(
        FaceDataset(faces),
        list(range(styles)),
        load_sticker_library(stickers),
        net,
        n=n,
        seed=seed,
        out_root=out,
    )
    click.echo("wrote %d triplets, manifest %s" % (len(emitted), manifest))


@main.command("make-faces")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--subjects", type=int, default=8, show_default=True)
@click.option("--per-subject", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--image-size", type=int, default=256, show_default=True)
@cli_guard
def make_faces_cmd(out, subjects, per_subject, seed, image_size):
    """Render a procedural face dataset (images + position maps)."""
    records = build_face_dataset(
        out, subjects=subjects, per_subject=per_subject, seed=seed, image_size=image_size
    )
    click.echo("wrote %d face images to %s" % (len(records), out))


@main.command("make-stickers")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--n", type=int, default=12, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@cli_guard
def make_stickers_cmd(out, n, seed):
    """Write a procedural sticker library (RGBA PNGs + index)."""
    index = save_sticker_library(make_sticker_library(n, seed), out)
    click.echo("wrote %d stickers, index %s" % (n, index))


@main.command("eval")
@click.option("--task", required=True, type=click.Choice(["seg", "transfer"]))
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--models", "models_dir", required=True,
              type=click.Path(exists=True, file_okay=False))
@click.option("--report", "report_path", required=True, type=click.Path(dir_okay=False))
@click.option("--split", default="test", show_default=True,
              help="seg only; 'all' evaluates every sample.")
@click.option("--gt-mask", is_flag=True,
              help="transfer only: use stored ground-truth pattern masks.")
@cli_guard
def eval_cmd(task, dataset, models_dir, report_path, split, gt_mask):
    """Evaluate a trained model on a generated dataset."""
    bundle = load_models(models_dir)
    if task == "seg":
        report = evaluate_segmentation(
            dataset,
            bundle.require("pattern"),
            split=None if split == "all" else split,
            report_path=report_path,
        )
    else:
        report = evaluate_transfer(
            dataset, bundle, use_gt_mask=gt_mask, report_path=report_path
        )
    click.echo(json.dumps(report.aggregates(), indent=2))


@main.command("serve")
@click.option("--models", "models_dir", default="models", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--styles", "styles_dir", default="styles", show_default=True,
              type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8765, show_default=True)
@cli_guard
def serve_cmd(models_dir, styles_dir, host, port):
    """Serve the HTTP try-on API."""
    import uvicorn

    from ..service.app import create_app

    app = create_app(models_dir=models_dir, styles_dir=styles_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
