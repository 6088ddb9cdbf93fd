"""Training objective of the color branch.

Four parts: least-squares adversarial terms, cycle reconstruction, feature
(perceptual) distance, and the regional histogram-matching loss. The
histogram target is computed in numpy and enters the graph as a constant, so
gradients flow only through the generator output.
"""

from dataclasses import asdict, dataclass, fields

import numpy as np
import torch

from ..configs import parse_config
from ..errors import ConfigError
from .histmatch import histogram_match


@dataclass
class LossWeights:
    lambda_adv: float = 1.0
    lambda_cyc: float = 10.0
    lambda_per: float = 0.005
    lambda_hist: float = 1.0
    lambda_eyes: float = 1.0
    lambda_lips: float = 1.0
    lambda_skin: float = 0.1

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v) or v < 0:
                raise ConfigError("%s must be finite and >= 0, got %r" % (f.name, v))

    def region_weight(self, name):
        return {"eyes": self.lambda_eyes, "lips": self.lambda_lips, "skin": self.lambda_skin}[name]

    def as_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return parse_config(cls, d, "loss weight")


def to_tensor(tex):
    """(H, W, 3) [0,1] array or TextureMap -> float32 tensor (3, H, W)."""
    arr = tex.texels if hasattr(tex, "texels") else np.asarray(tex)
    return torch.from_numpy(np.ascontiguousarray(arr.transpose(2, 0, 1))).float()


def to_texture_array(t):
    """(3, H, W) tensor -> (H, W, 3) float32 array."""
    return t.detach().cpu().numpy().transpose(1, 2, 0).astype(np.float32)


def hist_targets(source, reference, regions):
    """Per-region histogram-matching targets, as constant tensors."""
    out = {}
    for name, mask in regions.items():
        if not (mask >= 0.5).any():
            continue
        matched = histogram_match(source, reference, mask)
        out[name] = (to_tensor(matched), torch.from_numpy(mask >= 0.5))
    return out


def hist_loss(output, source, reference, regions, weights, targets=None):
    """Weighted regional distance to the histogram-matched targets.

    Args:
        output: generator output, tensor (3, H, W), gradients flow here.
        source, reference: (H, W, 3) arrays the targets are built from.
        regions: RegionMaskSet; each region contributes mean |output - HM|
            over its thresholded texels, scaled by the region's weight.
        targets: optional precomputed hist_targets(...) result.

    Returns: scalar tensor.
    """
    if targets is None:
        targets = hist_targets(source, reference, regions)
    total = output.new_zeros(())
    for name, (tgt, sel) in targets.items():
        lam = weights.region_weight(name)
        if lam == 0 or not bool(sel.any()):
            continue
        diff = (output - tgt.to(output.device))[:, sel]
        total = total + lam * diff.abs().mean()
    return total


def cycle_loss(reconstructed, original):
    return (reconstructed - original).abs().mean()


def perceptual_loss(extractor, x, y):
    """Mean squared feature distance; extractor returns a list of maps."""
    fx = extractor(x.unsqueeze(0))
    fy = extractor(y.unsqueeze(0))
    total = x.new_zeros(())
    for a, b in zip(fx, fy):
        total = total + torch.nn.functional.mse_loss(a, b)
    return total / len(fx)


def lsgan_generator_loss(d_fake):
    return ((d_fake - 1.0) ** 2).mean()


def lsgan_discriminator_loss(d_real, d_fake):
    return 0.5 * (((d_real - 1.0) ** 2).mean() + (d_fake**2).mean())
