from .histmatch import histogram_match, match_channel
from .losses import (
    LossWeights,
    cycle_loss,
    hist_loss,
    hist_targets,
    lsgan_discriminator_loss,
    lsgan_generator_loss,
    perceptual_loss,
    to_tensor,
    to_texture_array,
)
from .networks import (
    ColorGenerator,
    ColorNet,
    IdentityColorNet,
    PatchDiscriminator,
    RandomFeatureExtractor,
    make_extractor,
)
from .train import ColorTrainConfig, train_color

__all__ = [
    "histogram_match",
    "match_channel",
    "LossWeights",
    "cycle_loss",
    "hist_loss",
    "hist_targets",
    "lsgan_discriminator_loss",
    "lsgan_generator_loss",
    "perceptual_loss",
    "to_tensor",
    "to_texture_array",
    "ColorGenerator",
    "ColorNet",
    "IdentityColorNet",
    "PatchDiscriminator",
    "RandomFeatureExtractor",
    "make_extractor",
    "ColorTrainConfig",
    "train_color",
]
