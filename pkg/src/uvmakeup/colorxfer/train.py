"""Unpaired training loop of the color branch."""

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from ..configs import parse_config
from ..errors import DataError, TrainingDivergedError
from ..uvgeom import layout
from ..uvgeom.regions import universal_region_masks
from .losses import (
    LossWeights,
    cycle_loss,
    hist_loss,
    hist_targets,
    lsgan_discriminator_loss,
    lsgan_generator_loss,
    perceptual_loss,
    to_tensor,
)
from .networks import ColorNet, make_extractor


@dataclass
class ColorTrainConfig:
    epochs: int = 1
    iterations_per_epoch: int | None = None
    batch_size: int = 1
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    seed: int = 0
    width: int = 8
    res_blocks: int = 4
    disc_width: int = 8
    perceptual: str = "random"
    perceptual_seed: int = 0
    checkpoint_dir: str | None = None
    log_path: str | None = None

    @classmethod
    def from_dict(cls, d):
        return parse_config(cls, d, "color training")


def _as_array(t):
    return t.texels if hasattr(t, "texels") else np.asarray(t, dtype=np.float32)


def _generator_losses(net, extractor, clean, makeup, regions, weights, targets):
    """All generator-side loss components for one (clean, makeup) pair."""
    clean_t = to_tensor(clean)
    makeup_t = to_tensor(makeup)
    styled, destyled = net.generator(clean_t.unsqueeze(0), makeup_t.unsqueeze(0))
    styled0, destyled0 = styled[0], destyled[0]

    parts = {}
    if weights.lambda_adv > 0:
        parts["adv"] = lsgan_generator_loss(net.disc_makeup(styled)) + lsgan_generator_loss(
            net.disc_clean(destyled)
        )
    if weights.lambda_cyc > 0:
        restyled, recleaned = net.generator(destyled, styled)
        parts["cyc"] = cycle_loss(restyled[0], makeup_t) + cycle_loss(recleaned[0], clean_t)
    if weights.lambda_per > 0:
        parts["per"] = perceptual_loss(extractor, clean_t, styled0) + perceptual_loss(
            extractor, makeup_t, destyled0
        )
    if weights.lambda_hist > 0:
        parts["hist"] = hist_loss(styled0, clean, makeup, regions, weights, targets=targets)

    lambdas = {
        "adv": weights.lambda_adv,
        "cyc": weights.lambda_cyc,
        "per": weights.lambda_per,
        "hist": weights.lambda_hist,
    }
    total = None
    for name, value in parts.items():
        term = lambdas[name] * value
        total = term if total is None else total + term
    return total, parts, styled, destyled


def train_color(
    makeup_textures,
    clean_textures,
    weights: LossWeights | None = None,
    config: ColorTrainConfig | None = None,
    regions=None,
    valid_mask=None,
):
    """Train the color branch on unpaired makeup / non-makeup texture sets.

    Each iteration samples one texture from each set (batch size 1 by
    default), runs a generator update on the weighted four-part objective,
    then a discriminator update when the adversarial weight is active.
    Sampling is driven by a per-iteration RNG stream so runs are replayable.

    Returns:
        (ColorNet, history) where history is the list of per-iteration
        logged records; the final record replays the loss from the saved
        end state on a fixed pair for checkpoint verification.
    """
    weights = weights or LossWeights()
    config = config or ColorTrainConfig()
    makeup = [_as_array(t) for t in makeup_textures]
    clean = [_as_array(t) for t in clean_textures]
    if not makeup or not clean:
        raise DataError("both texture sets must be non-empty")
    regions = regions or universal_region_masks()
    valid_mask = valid_mask if valid_mask is not None else layout.valid_mask()

    net = ColorNet(
        width=config.width,
        res_blocks=config.res_blocks,
        disc_width=config.disc_width,
        valid_mask=valid_mask,
        init_seed=config.seed,
    )
    extractor = make_extractor(config.perceptual, seed=config.perceptual_seed)
    opt_g = torch.optim.Adam(
        net.generator.parameters(), lr=config.lr, betas=(config.beta1, config.beta2)
    )
    opt_d = torch.optim.Adam(
        list(net.disc_makeup.parameters()) + list(net.disc_clean.parameters()),
        lr=config.lr,
        betas=(config.beta1, config.beta2),
    )

    iters = config.iterations_per_epoch or max(len(makeup), len(clean))
    history = []
    step = 0
    for epoch in range(config.epochs):
        for _ in range(iters):
            step += 1
            rng = np.random.default_rng([config.seed, step])
            record = {"iteration": step, "epoch": epoch}
            g_total_val = 0.0
            d_vals = {}
            for _ in range(config.batch_size):
                im = int(rng.integers(len(makeup)))
                ic = int(rng.integers(len(clean)))
                targets = (
                    hist_targets(clean[ic], makeup[im], regions)
                    if weights.lambda_hist > 0
                    else None
                )
                total, parts, styled, destyled = _generator_losses(
                    net, extractor, clean[ic], makeup[im], regions, weights, targets
                )
                if total is not None:
                    opt_g.zero_grad(set_to_none=True)
                    total.backward()
                    opt_g.step()
                    g_total_val += float(total.detach())
                    for name, value in parts.items():
                        record["g_%s" % name] = record.get("g_%s" % name, 0.0) + float(
                            value.detach()
                        )
                if weights.lambda_adv > 0:
                    opt_d.zero_grad(set_to_none=True)
                    d_m = lsgan_discriminator_loss(
                        net.disc_makeup(to_tensor(makeup[im]).unsqueeze(0)),
                        net.disc_makeup(styled.detach()),
                    )
                    d_c = lsgan_discriminator_loss(
                        net.disc_clean(to_tensor(clean[ic]).unsqueeze(0)),
                        net.disc_clean(destyled.detach()),
                    )
                    (d_m + d_c).backward()
                    opt_d.step()
                    d_vals = {"d_makeup": float(d_m.detach()), "d_clean": float(d_c.detach())}
            record["g_total"] = g_total_val
            record.update(d_vals)
            if not math.isfinite(record["g_total"]):
                raise TrainingDivergedError(
                    "non-finite generator loss at iteration %d" % step,
                    detail={"record": record},
                )
            history.append(record)
        if config.checkpoint_dir:
            net.save(
                Path(config.checkpoint_dir) / ("color_epoch_%03d.pt" % epoch),
                optimizer_state={"g": opt_g.state_dict(), "d": opt_d.state_dict()},
                iteration=step,
                extra_meta={"loss_weights": weights.as_dict(), "config": asdict(config)},
            )

    history.append(replay_record(net, extractor, clean, makeup, regions, weights, step))
    if config.log_path:
        with open(config.log_path, "w") as f:
            for rec in history:
                f.write(json.dumps(rec) + "\n")
    return net, history


def replay_record(net, extractor, clean, makeup, regions, weights, step):
    """Recompute the generator loss on the fixed pair (0, 0) without updating.

    Written as the last history record; recomputing it from a reloaded
    checkpoint must reproduce the value bit for bit.
    """
    with torch.no_grad():
        targets = hist_targets(clean[0], makeup[0], regions) if weights.lambda_hist > 0 else None
        total, parts, _, _ = _generator_losses(
            net, extractor, clean[0], makeup[0], regions, weights, targets
        )
    rec = {"event": "final_eval", "iteration": step, "pair": [0, 0]}
    rec["g_total"] = float(total) if total is not None else 0.0
    for name, value in parts.items():
        rec["g_%s" % name] = float(value)
    return rec
