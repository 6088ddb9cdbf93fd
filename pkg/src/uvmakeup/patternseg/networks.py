"""Pattern segmentation: soft dice, the UNet, mask prediction."""

import numpy as np
import torch
import torch.nn as nn

from .. import checkpoints
from ..colorxfer.networks import seeded_normal_init
from ..errors import ModelNotInitializedError
from ..uvgeom import layout

DICE_EPS = 1.0


def dice_coefficient(gt, pr, eps=DICE_EPS):
    """Soft dice overlap: (2*sum(gt*pr) + eps) / (sum(gt) + sum(pr) + eps).

    Symmetric, in [0, 1] for masks in [0, 1], and 1 at perfect overlap up to
    the eps smoothing. Accepts torch tensors (differentiable) or arrays.
    """
    if isinstance(gt, torch.Tensor) or isinstance(pr, torch.Tensor):
        gt_t = gt if isinstance(gt, torch.Tensor) else torch.as_tensor(gt)
        pr_t = pr if isinstance(pr, torch.Tensor) else torch.as_tensor(pr)
        inter = (gt_t * pr_t).sum()
        return (2 * inter + eps) / (gt_t.sum() + pr_t.sum() + eps)
    gt_a = np.asarray(gt, dtype=np.float64)
    pr_a = np.asarray(pr, dtype=np.float64)
    return float((2 * (gt_a * pr_a).sum() + eps) / (gt_a.sum() + pr_a.sum() + eps))


def dice_loss(gt, pr, eps=DICE_EPS):
    return 1.0 - dice_coefficient(gt, pr, eps)


def binarize(mask, threshold=0.5):
    return np.asarray(mask) >= threshold


class _DoubleConv(nn.Module):
    def __init__(self, cin, cout):
        super().__init__()
        self.block = nn.Sequential(
            nn.Conv2d(cin, cout, 3, padding=1),
            nn.InstanceNorm2d(cout),
            nn.ReLU(inplace=True),
            nn.Conv2d(cout, cout, 3, padding=1),
            nn.InstanceNorm2d(cout),
            nn.ReLU(inplace=True),
        )

    def forward(self, x):
        return self.block(x)


class SegUNet(nn.Module):
    """Small UNet with sigmoid output, width/depth set by config.

    The full-scale recipe swaps in a deep pretrained encoder; at desk scale
    the encoder is trained from scratch at reduced width. Pretrained encoder
    weights, when available, load through load_encoder_state.
    """

    def __init__(self, base_width=8, depth=4):
        super().__init__()
        self.base_width = base_width
        self.depth = depth
        widths = [base_width * (2**i) for i in range(depth)]
        self.enc = nn.ModuleList()
        cin = 3
        for w in widths:
            self.enc.append(_DoubleConv(cin, w))
            cin = w
        self.pool = nn.MaxPool2d(2)
        self.up = nn.ModuleList()
        self.dec = nn.ModuleList()
        for i in range(depth - 1, 0, -1):
            self.up.append(nn.ConvTranspose2d(widths[i], widths[i - 1], 2, stride=2))
            self.dec.append(_DoubleConv(widths[i - 1] * 2, widths[i - 1]))
        self.head = nn.Conv2d(widths[0], 1, 1)

    def forward(self, x):
        skips = []
        h = x
        for i, block in enumerate(self.enc):
            h = block(h)
            if i < len(self.enc) - 1:
                skips.append(h)
                h = self.pool(h)
        for up, dec, skip in zip(self.up, self.dec, reversed(skips)):
            h = up(h)
            h = dec(torch.cat([h, skip], dim=1))
        return torch.sigmoid(self.head(h))

    def load_encoder_state(self, state_dict):
        own = {k: v for k, v in state_dict.items() if k.startswith("enc.")}
        missing = self.load_state_dict(own, strict=False)
        return missing


class SegNet:
    """Wrapper pairing the UNet with the UV valid region and persistence."""

    def __init__(self, base_width=8, depth=4, valid_mask=None, init_seed=None):
        self.base_width = base_width
        self.depth = depth
        self.valid_mask = (
            valid_mask.astype(bool) if valid_mask is not None else layout.valid_mask()
        )
        self.net = SegUNet(base_width, depth)
        self.initialized = init_seed is not None
        if init_seed is not None:
            seeded_normal_init(self.net, init_seed)

    def save(self, path, optimizer_state=None, iteration=0, extra_meta=None):
        meta = {
            "base_width": self.base_width,
            "depth": self.depth,
            "valid_mask": np.asarray(self.valid_mask, dtype=np.uint8),
        }
        meta.update(extra_meta or {})
        return checkpoints.save_checkpoint(
            path, "pattern", self.net.state_dict(), optimizer_state, iteration, meta
        )

    @classmethod
    def load(cls, path):
        payload = checkpoints.load_checkpoint(path, expected_kind="pattern")
        meta = payload["meta"]
        seg = cls(
            base_width=meta["base_width"],
            depth=meta["depth"],
            valid_mask=np.asarray(meta["valid_mask"]).astype(bool),
        )
        seg.net.load_state_dict(payload["model_state"])
        seg.initialized = True
        return seg, payload


def predict_mask(seg: SegNet, tex):
    """Segment the makeup pattern in a texture map.

    Returns the sigmoid response as a float32 (H, W) soft mask, zeroed
    outside the valid UV region.
    """
    if not seg.initialized:
        raise ModelNotInitializedError("segmentation net has no trained or seeded parameters")
    arr = tex.texels if hasattr(tex, "texels") else np.asarray(tex, dtype=np.float32)
    t = torch.from_numpy(np.ascontiguousarray(arr.transpose(2, 0, 1))).float().unsqueeze(0)
    seg.net.eval()
    with torch.no_grad():
        out = seg.net(t)[0, 0].numpy().astype(np.float32)
    out *= seg.valid_mask
    return out
