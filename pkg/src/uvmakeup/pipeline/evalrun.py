"""Dataset evaluation drivers for both branches."""

import warnings
from pathlib import Path

import numpy as np

from ..errors import UVMakeupError, VacuousClassWarning
from ..fusion import TransferRequest
from ..metrics import (
    EvalReport,
    PixelProjectionEmbedder,
    identity_similarity,
    iou_per_class,
    ms_ssim,
    psnr,
)
from ..synthdata.generate import read_manifest
from ..patternseg.networks import predict_mask
from ..uvgeom.io import load_image, load_mask, load_position_map
from .transfer import transfer

MANIFEST_NAME = "manifest.jsonl"


def _samples(dataset_dir):
    header, records = read_manifest(Path(dataset_dir) / MANIFEST_NAME)
    return header, [r for r in records if r.get("event") == "sample"]


def evaluate_segmentation(dataset_dir, seg_net, split="test", threshold=0.5, report_path=None):
    """Score predicted pattern masks against stored ground truth.

    Runs on the named split of a synt1-format dataset; records two-class
    mIoU and foreground IoU per sample.
    """
    dataset_dir = Path(dataset_dir)
    header, samples = _samples(dataset_dir)
    if split is not None:
        samples = [r for r in samples if r.get("split") == split]
    report = EvalReport(
        task="seg",
        dataset="%s#seed%s" % (dataset_dir.name, header.get("seed")),
        models={"pattern": "base_width=%d,depth=%d" % (seg_net.base_width, seg_net.depth)},
    )
    for rec in samples:
        try:
            tex = load_image(dataset_dir / rec["paths"]["texture"])
            gt = load_mask(dataset_dir / rec["paths"]["mask"])
            pred = predict_mask(seg_net, tex.astype(np.float32))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", VacuousClassWarning)
                fg, bg = iou_per_class(gt, pred, threshold)
            report.add(rec["stem"], {"miou": (fg + bg) / 2.0, "fg_iou": fg})
        except UVMakeupError as exc:
            report.add_failure(rec["stem"], "%s: %s" % (exc.category, exc))
    if report_path is not None:
        report.save(report_path)
    return report


def evaluate_transfer(
    dataset_dir,
    models,
    use_gt_mask=False,
    report_path=None,
    embedder=None,
):
    """Run the full pipeline over synt2 triplets and score against ground truth.

    With use_gt_mask the stored pattern mask substitutes for segmentation,
    isolating the geometry/fusion path from mask prediction quality.
    """
    dataset_dir = Path(dataset_dir)
    header, samples = _samples(dataset_dir)
    embedder = embedder or PixelProjectionEmbedder()
    report = EvalReport(
        task="transfer",
        dataset="%s#seed%s" % (dataset_dir.name, header.get("seed")),
        models={k: str(v) for k, v in models.paths.items()} or {"color": type(models.color).__name__},
    )
    request = TransferRequest()
    for rec in samples:
        try:
            source = load_image(dataset_dir / rec["paths"]["source"])
            reference = load_image(dataset_dir / rec["paths"]["reference"])
            gt = load_image(dataset_dir / rec["paths"]["gt"])
            pos_s = load_position_map(dataset_dir / rec["paths"]["source_posmap"])
            pos_r = load_position_map(dataset_dir / rec["paths"]["reference_posmap"])
            override = (
                load_mask(dataset_dir / rec["paths"]["mask"]) if use_gt_mask else None
            )
            result = transfer(
                source,
                reference,
                request,
                models,
                source_position=pos_s,
                reference_position=pos_r,
                pattern_mask_override=override,
                keep_intermediates=False,
            )
            report.add(
                rec["stem"],
                {
                    "ms_ssim": ms_ssim(result.image, gt),
                    "psnr": min(psnr(result.image, gt), 99.0),
                    "identity": identity_similarity(result.image, source, embedder),
                },
            )
        except UVMakeupError as exc:
            report.add_failure(rec["stem"], "%s: %s" % (exc.category, exc))
    if report_path is not None:
        report.save(report_path)
    return report
