from .networks import (
    DICE_EPS,
    SegNet,
    SegUNet,
    binarize,
    dice_coefficient,
    dice_loss,
    predict_mask,
)
from .train import PatternTrainConfig, train_pattern

__all__ = [
    "DICE_EPS",
    "SegNet",
    "SegUNet",
    "binarize",
    "dice_coefficient",
    "dice_loss",
    "predict_mask",
    "PatternTrainConfig",
    "train_pattern",
]
