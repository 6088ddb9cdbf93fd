"""Supervised training of the pattern segmenter on (texture, mask) pairs."""

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from ..configs import parse_config
from ..errors import DataError, TrainingDivergedError
from .networks import SegNet, dice_coefficient


@dataclass
class PatternTrainConfig:
    epochs: int = 300
    batch_size: int = 8
    lr: float = 1e-4
    seed: int = 0
    base_width: int = 8
    depth: int = 4
    encoder_weights: str | None = None
    checkpoint_dir: str | None = None
    checkpoint_every: int = 0   # epochs between periodic saves; 0 = final only
    log_path: str | None = None

    @classmethod
    def from_dict(cls, d):
        return parse_config(cls, d, "pattern training")


def _stack(pairs, idx):
    texs = np.stack([pairs[i][0] for i in idx]).transpose(0, 3, 1, 2)
    masks = np.stack([pairs[i][1] for i in idx])[:, None]
    return (
        torch.from_numpy(np.ascontiguousarray(texs)).float(),
        torch.from_numpy(np.ascontiguousarray(masks)).float(),
    )


def train_pattern(dataset, config: PatternTrainConfig | None = None, valid_mask=None):
    """Train the segmenter by minimizing 1 - soft dice.

    Args:
        dataset: sequence of (texture, mask) pairs; textures (H, W, 3) in
            [0, 1], masks (H, W) soft targets in [0, 1].
        config: defaults are the full-scale recipe (300 epochs, batch 8,
            Adam at 1e-4); tests shrink epochs and width.

    Returns:
        (SegNet, history): history holds one record per epoch with the mean
        training loss, plus periodic checkpoints when configured.
    """
    config = config or PatternTrainConfig()
    pairs = []
    for tex, mask in dataset:
        tex = tex.texels if hasattr(tex, "texels") else np.asarray(tex, dtype=np.float32)
        mask = np.asarray(mask, dtype=np.float32)
        if tex.shape[:2] != mask.shape:
            raise DataError(
                "texture %r and mask %r shapes do not match" % (tex.shape, mask.shape)
            )
        pairs.append((tex.astype(np.float32), mask))
    if not pairs:
        raise DataError("empty segmentation dataset")

    seg = SegNet(
        base_width=config.base_width,
        depth=config.depth,
        valid_mask=valid_mask,
        init_seed=config.seed,
    )
    if config.encoder_weights:
        state = torch.load(config.encoder_weights, map_location="cpu", weights_only=False)
        seg.net.load_encoder_state(state)
    opt = torch.optim.Adam(seg.net.parameters(), lr=config.lr)

    history = []
    step = 0
    for epoch in range(config.epochs):
        rng = np.random.default_rng([config.seed, epoch])
        order = rng.permutation(len(pairs))
        losses = []
        seg.net.train()
        for start in range(0, len(order), config.batch_size):
            idx = order[start:start + config.batch_size]
            texs, masks = _stack(pairs, idx)
            pred = seg.net(texs)
            # soft dice per sample, averaged over the batch
            loss = torch.stack(
                [1.0 - dice_coefficient(masks[i], pred[i]) for i in range(len(idx))]
            ).mean()
            opt.zero_grad(set_to_none=True)
            loss.backward()
            opt.step()
            step += 1
            losses.append(float(loss.detach()))
        mean_loss = float(np.mean(losses))
        if not math.isfinite(mean_loss):
            raise TrainingDivergedError("non-finite dice loss in epoch %d" % epoch)
        history.append({"epoch": epoch, "iteration": step, "loss": mean_loss})
        periodic = config.checkpoint_every and (epoch + 1) % config.checkpoint_every == 0
        if config.checkpoint_dir and (periodic or epoch == config.epochs - 1):
            seg.save(
                Path(config.checkpoint_dir) / ("pattern_epoch_%03d.pt" % epoch),
                optimizer_state=opt.state_dict(),
                iteration=step,
                extra_meta={"config": asdict(config)},
            )
    if config.log_path:
        with open(config.log_path, "w") as f:
            for rec in history:
                f.write(json.dumps(rec) + "\n")
    return seg, history
