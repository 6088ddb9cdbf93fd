"""The end-to-end transfer pipeline.

One call runs: geometry on both faces, texture extraction, the color and
pattern branches (independently, in parallel threads), fusion, optional
interpolation and partial-region restriction, then rendering back over the
source photograph. Every intermediate can be returned for inspection, and
re-running the fusion stage on the stored intermediates reproduces the final
texture bit for bit.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import GeometryError
from ..fusion import TransferRequest, fuse, interpolate, partial_apply
from ..patternseg.networks import predict_mask
from ..uvgeom.extract import extract_texture
from ..uvgeom.io import save_image, save_mask, save_position_map
from ..uvgeom.regions import universal_region_masks
from ..uvgeom.render import render
from ..uvgeom.types import TextureMap


@dataclass
class TransferResult:
    """Output image plus optional intermediates and per-stage timings."""

    image: np.ndarray
    request: TransferRequest
    intermediates: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def _tag_geometry(role):
    """Re-raise geometry errors annotated with which input failed."""

    class _ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if isinstance(exc, GeometryError):
                exc.detail = dict(exc.detail or {})
                exc.detail["input"] = role
            return False

    return _ctx()


def transfer(
    source,
    reference,
    request: TransferRequest,
    models,
    reference2=None,
    source_position=None,
    reference_position=None,
    reference2_position=None,
    pattern_mask_override=None,
    keep_intermediates=True,
):
    """Apply the reference's makeup to the source image.

    Args:
        source, reference: (H, W, 3) float images in [0, 1].
        request: what to transfer and how to mix it.
        models: ModelBundle with the branches the request enables.
        reference2: optional second style image for interpolation.
        *_position: precomputed PositionMaps, bypassing the provider.
        pattern_mask_override: use this UV mask instead of running the
            segmentation net (evaluation against known ground truth).

    Returns:
        TransferResult; result.image has the source's shape.
    """
    provider = models.provider
    timings = {}

    t0 = time.perf_counter()
    with _tag_geometry("source"):
        pos_s = source_position or provider.position_map(source)
    with _tag_geometry("reference"):
        pos_r = reference_position or provider.position_map(reference)
    pos_r2 = None
    if reference2 is not None:
        with _tag_geometry("reference2"):
            pos_r2 = reference2_position or provider.position_map(reference2)
    timings["geometry"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    with _tag_geometry("source"):
        t_src = extract_texture(source, pos_s)
    with _tag_geometry("reference"):
        t_ref = extract_texture(reference, pos_r)
    t_ref2 = None
    if reference2 is not None:
        with _tag_geometry("reference2"):
            t_ref2 = extract_texture(reference2, pos_r2)
    timings["extract"] = time.perf_counter() - t0

    pattern_ref = (
        t_ref2 if (request.pattern_source == "reference2" and t_ref2 is not None) else t_ref
    )

    def color_branch():
        t0 = time.perf_counter()
        if not request.use_color:
            out = (t_src, None, time.perf_counter() - t0)
            return out
        net = models.require("color")
        styled_a, _ = net.swap(t_src, t_ref)
        styled_b = None
        if t_ref2 is not None:
            styled_b, _ = net.swap(t_src, t_ref2)
        return styled_a, styled_b, time.perf_counter() - t0

    def pattern_branch():
        t0 = time.perf_counter()
        if not request.use_pattern:
            mask = np.zeros(t_src.uv_shape, dtype=np.float32)
        elif pattern_mask_override is not None:
            mask = np.asarray(pattern_mask_override, dtype=np.float32)
        else:
            mask = predict_mask(models.require("pattern"), pattern_ref)
        return mask, time.perf_counter() - t0

    # the branches share no state; run them concurrently and join
    with ThreadPoolExecutor(max_workers=2) as pool:
        color_future = pool.submit(color_branch)
        pattern_future = pool.submit(pattern_branch)
        styled_a, styled_b, timings["color"] = color_future.result()
        mask, timings["pattern"] = pattern_future.result()

    t0 = time.perf_counter()
    if request.use_color:
        if styled_b is not None:
            # alpha weighs the first style against the second
            t_color = interpolate(styled_a, styled_b, request.alpha)
        else:
            t_color = interpolate(styled_a, t_src, request.alpha)
    else:
        t_color = t_src.texels
    t_color = np.asarray(t_color, dtype=np.float32)

    fused = fuse(pattern_ref, t_color, mask) if request.use_pattern else t_color
    regions = universal_region_masks(tuple(t_src.uv_shape))
    final = partial_apply(t_src, fused, regions, request.regions)
    final_tex = TextureMap(texels=np.clip(final, 0.0, 1.0).astype(np.float32))
    timings["fuse"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    image = render(pos_s, final_tex, source)
    timings["render"] = time.perf_counter() - t0

    result = TransferResult(
        image=image,
        request=request,
        timings=timings,
        metadata={
            "pattern_empty": bool(request.use_pattern and mask.max() <= 0.0),
            "two_style": reference2 is not None,
        },
    )
    if keep_intermediates:
        result.intermediates = {
            "source_position": pos_s,
            "source_texture": t_src,
            "reference_texture": t_ref,
            "reference2_texture": t_ref2,
            "pattern_reference_texture": pattern_ref,
            "color_texture": np.asarray(t_color, dtype=np.float32),
            "pattern_mask": np.asarray(mask, dtype=np.float32),
            "final_texture": final_tex,
        }
    return result


def refuse_intermediates(result: TransferResult):
    """Re-run the fusion stage from stored intermediates.

    Returns the recomputed final texture; bit-identical to
    result.intermediates["final_texture"] by construction.
    """
    inter = result.intermediates
    req = result.request
    if req.use_pattern:
        fused = fuse(
            inter["pattern_reference_texture"],
            inter["color_texture"],
            inter["pattern_mask"],
        )
    else:
        fused = inter["color_texture"]
    regions = universal_region_masks(tuple(inter["source_texture"].uv_shape))
    final = partial_apply(inter["source_texture"], fused, regions, req.regions)
    return TextureMap(texels=np.clip(final, 0.0, 1.0).astype(np.float32))


def regional_histogram_distance(tex_a, tex_b, regions, bins=256):
    """Mean per-region, per-channel L1 distance of normalized histograms.

    Monitors the transfer-stability property: two sources styled toward the
    same reference should have close regional color statistics.
    """
    a = tex_a.texels if hasattr(tex_a, "texels") else np.asarray(tex_a)
    b = tex_b.texels if hasattr(tex_b, "texels") else np.asarray(tex_b)
    dists = []
    for _, mask in regions.items():
        sel = mask >= 0.5
        if not sel.any():
            continue
        for ch in range(3):
            ha = np.bincount(
                np.minimum((a[sel, ch] * bins).astype(np.int64), bins - 1), minlength=bins
            ).astype(np.float64)
            hb = np.bincount(
                np.minimum((b[sel, ch] * bins).astype(np.int64), bins - 1), minlength=bins
            ).astype(np.float64)
            dists.append(np.abs(ha / ha.sum() - hb / hb.sum()).sum() / 2.0)
    return float(np.mean(dists))


def dump_intermediates(result: TransferResult, out_dir):
    """Write every stored intermediate plus timings to out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    inter = result.intermediates
    save_position_map(out_dir / "source_position.uvpm", inter["source_position"])
    for name in (
        "source_texture",
        "reference_texture",
        "reference2_texture",
        "pattern_reference_texture",
        "final_texture",
    ):
        tex = inter.get(name)
        if tex is not None:
            save_image(out_dir / ("%s.png" % name), tex.texels)
    save_image(out_dir / "color_texture.png", inter["color_texture"])
    save_mask(out_dir / "pattern_mask.png", inter["pattern_mask"])
    save_image(out_dir / "output.png", result.image)
    (out_dir / "timings.json").write_text(
        json.dumps({"timings": result.timings, "metadata": result.metadata}, indent=2)
        + "\n"
    )
    return out_dir
