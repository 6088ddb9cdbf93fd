"""Color-swapping generator, patch discriminators, feature extractors."""

import numpy as np
import torch
import torch.nn as nn

from .. import checkpoints
from ..errors import ModelNotInitializedError
from ..uvgeom import layout
from .losses import to_tensor, to_texture_array


def seeded_normal_init(module, seed, std=0.02):
    """Fill conv/linear weights with N(0, std) from a private generator."""
    g = torch.Generator()
    g.manual_seed(int(seed))
    for m in module.modules():
        if isinstance(m, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
            with torch.no_grad():
                m.weight.normal_(0.0, std, generator=g)
                if m.bias is not None:
                    m.bias.zero_()


class ResidualBlock(nn.Module):
    def __init__(self, dim):
        super().__init__()
        self.block = nn.Sequential(
            nn.ReflectionPad2d(1),
            nn.Conv2d(dim, dim, 3),
            nn.InstanceNorm2d(dim),
            nn.ReLU(inplace=True),
            nn.ReflectionPad2d(1),
            nn.Conv2d(dim, dim, 3),
            nn.InstanceNorm2d(dim),
        )

    def forward(self, x):
        return x + self.block(x)


def _encoder(width):
    w = width
    return nn.Sequential(
        nn.ReflectionPad2d(3),
        nn.Conv2d(3, w, 7),
        nn.InstanceNorm2d(w),
        nn.ReLU(inplace=True),
        nn.Conv2d(w, 2 * w, 3, stride=2, padding=1),
        nn.InstanceNorm2d(2 * w),
        nn.ReLU(inplace=True),
        nn.Conv2d(2 * w, 4 * w, 3, stride=2, padding=1),
        nn.InstanceNorm2d(4 * w),
        nn.ReLU(inplace=True),
        nn.Conv2d(4 * w, 8 * w, 3, stride=2, padding=1),
        nn.InstanceNorm2d(8 * w),
        nn.ReLU(inplace=True),
    )


def _decoder(width):
    w = width
    return nn.Sequential(
        nn.ConvTranspose2d(8 * w, 4 * w, 3, stride=2, padding=1, output_padding=1),
        nn.InstanceNorm2d(4 * w),
        nn.ReLU(inplace=True),
        nn.ConvTranspose2d(4 * w, 2 * w, 3, stride=2, padding=1, output_padding=1),
        nn.InstanceNorm2d(2 * w),
        nn.ReLU(inplace=True),
        nn.ConvTranspose2d(2 * w, w, 3, stride=2, padding=1, output_padding=1),
        nn.InstanceNorm2d(w),
        nn.ReLU(inplace=True),
        nn.ReflectionPad2d(3),
        nn.Conv2d(w, 3, 7),
        nn.Tanh(),
    )


class ColorGenerator(nn.Module):
    """Dual-input, dual-output swapping generator.

    Both textures are encoded separately, fused in a shared residual
    bottleneck, and decoded into (styled source, destyled reference).
    Inputs and outputs live in [0, 1]; internally the net works in [-1, 1].
    """

    def __init__(self, width=8, res_blocks=4):
        super().__init__()
        self.enc_src = _encoder(width)
        self.enc_ref = _encoder(width)
        self.fuse = nn.Conv2d(16 * width, 8 * width, 1)
        self.blocks = nn.Sequential(*[ResidualBlock(8 * width) for _ in range(res_blocks)])
        self.dec_src = _decoder(width)
        self.dec_ref = _decoder(width)

    def forward(self, src, ref):
        hs = self.enc_src(src * 2 - 1)
        hr = self.enc_ref(ref * 2 - 1)
        h = self.blocks(self.fuse(torch.cat([hs, hr], dim=1)))
        styled = (self.dec_src(h) + 1) / 2
        destyled = (self.dec_ref(h) + 1) / 2
        return styled, destyled


class PatchDiscriminator(nn.Module):
    def __init__(self, width=8):
        super().__init__()
        w = width
        self.model = nn.Sequential(
            nn.Conv2d(3, w, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(w, 2 * w, 4, stride=2, padding=1),
            nn.InstanceNorm2d(2 * w),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(2 * w, 4 * w, 4, stride=2, padding=1),
            nn.InstanceNorm2d(4 * w),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(4 * w, 1, 4, padding=1),
        )

    def forward(self, x):
        return self.model(x * 2 - 1)


class RandomFeatureExtractor(nn.Module):
    """Fixed-seed random conv stack standing in for a pretrained backbone.

    Three stride-2 conv+relu stages; weights are frozen at construction so
    the same seed always yields the same features on any machine.
    """

    def __init__(self, seed=0, widths=(16, 32, 64)):
        super().__init__()
        chans = [3, *widths]
        self.stages = nn.ModuleList(
            [nn.Conv2d(chans[i], chans[i + 1], 3, stride=2, padding=1) for i in range(len(widths))]
        )
        seeded_normal_init(self, seed, std=0.1)
        for p in self.parameters():
            p.requires_grad_(False)

    def forward(self, x):
        feats = []
        h = x
        for conv in self.stages:
            h = torch.relu(conv(h))
            feats.append(h)
        return feats


def vgg16_extractor():
    """ImageNet-pretrained VGG-16 features, when torchvision is installed.

    The offline test path uses RandomFeatureExtractor instead; this adapter
    exists for full-scale runs.
    """
    try:
        from torchvision.models import vgg16
    except ImportError as exc:
        raise ModelNotInitializedError(
            "torchvision is not available; use the random feature extractor"
        ) from exc
    features = vgg16(weights="IMAGENET1K_V1").features[:16].eval()
    for p in features.parameters():
        p.requires_grad_(False)

    class _Wrap(nn.Module):
        def __init__(self, net):
            super().__init__()
            self.net = net
            self.taps = {3, 8, 15}

        def forward(self, x):
            feats = []
            h = x
            for i, layer in enumerate(self.net):
                h = layer(h)
                if i in self.taps:
                    feats.append(h)
            return feats

    return _Wrap(features)


def make_extractor(name="random", seed=0):
    if name == "random":
        return RandomFeatureExtractor(seed=seed)
    if name == "vgg16":
        return vgg16_extractor()
    raise ValueError("unknown perceptual extractor %r" % (name,))


class ColorNet:
    """The trainable color branch: generator, two discriminators, masks."""

    def __init__(
        self,
        width=8,
        res_blocks=4,
        disc_width=8,
        valid_mask=None,
        init_seed=None,
    ):
        self.width = width
        self.res_blocks = res_blocks
        self.disc_width = disc_width
        self.valid_mask = (
            valid_mask.astype(bool) if valid_mask is not None else layout.valid_mask()
        )
        self.generator = ColorGenerator(width, res_blocks)
        self.disc_makeup = PatchDiscriminator(disc_width)
        self.disc_clean = PatchDiscriminator(disc_width)
        self.initialized = init_seed is not None
        if init_seed is not None:
            seeded_normal_init(self.generator, init_seed)
            seeded_normal_init(self.disc_makeup, init_seed + 1)
            seeded_normal_init(self.disc_clean, init_seed + 2)

    def swap(self, t_src, t_ref):
        """Swap makeup color: returns (styled source, destyled reference).

        Numpy in, TextureMap out; outputs are clamped to [0, 1] and zeroed
        outside the valid UV region.
        """
        from ..uvgeom.types import TextureMap

        if not self.initialized:
            raise ModelNotInitializedError("color net has no trained or seeded parameters")
        self.generator.eval()
        with torch.no_grad():
            styled, destyled = self.generator(
                to_tensor(t_src).unsqueeze(0), to_tensor(t_ref).unsqueeze(0)
            )
        out = []
        for t in (styled[0], destyled[0]):
            arr = np.clip(to_texture_array(t), 0.0, 1.0)
            arr *= self.valid_mask[..., None]
            out.append(TextureMap(texels=arr))
        return out[0], out[1]

    def save(self, path, optimizer_state=None, iteration=0, extra_meta=None):
        meta = {
            "width": self.width,
            "res_blocks": self.res_blocks,
            "disc_width": self.disc_width,
            "valid_mask": np.asarray(self.valid_mask, dtype=np.uint8),
        }
        meta.update(extra_meta or {})
        state = {
            "generator": self.generator.state_dict(),
            "disc_makeup": self.disc_makeup.state_dict(),
            "disc_clean": self.disc_clean.state_dict(),
        }
        return checkpoints.save_checkpoint(
            path, "color", state, optimizer_state, iteration, meta
        )

    @classmethod
    def load(cls, path):
        payload = checkpoints.load_checkpoint(path, expected_kind="color")
        meta = payload["meta"]
        net = cls(
            width=meta["width"],
            res_blocks=meta["res_blocks"],
            disc_width=meta["disc_width"],
            valid_mask=np.asarray(meta["valid_mask"]).astype(bool),
        )
        net.generator.load_state_dict(payload["model_state"]["generator"])
        net.disc_makeup.load_state_dict(payload["model_state"]["disc_makeup"])
        net.disc_clean.load_state_dict(payload["model_state"]["disc_clean"])
        net.initialized = True
        return net, payload


class IdentityColorNet:
    """Pass-through stand-in with the ColorNet interface.

    Useful wherever the color branch must be present but inert: isolating
    the pattern path in dataset generation, toy service deployments.
    """

    initialized = True

    def __init__(self, valid_mask=None):
        self.valid_mask = (
            valid_mask.astype(bool) if valid_mask is not None else layout.valid_mask()
        )

    def swap(self, t_src, t_ref):
        from ..uvgeom.types import TextureMap

        out = []
        for t in (t_src, t_ref):
            arr = t.texels if hasattr(t, "texels") else np.asarray(t, dtype=np.float32)
            arr = np.clip(arr.astype(np.float32), 0.0, 1.0) * self.valid_mask[..., None]
            out.append(TextureMap(texels=arr))
        return out[0], out[1]
