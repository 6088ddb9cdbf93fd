"""End-to-end transfer pipeline: model bundles, the two-branch runner,
evaluation drivers, and the command-line interface."""

from .evalrun import evaluate_segmentation, evaluate_transfer
from .models import ModelBundle, load_models, save_models
from .transfer import (
    TransferResult,
    dump_intermediates,
    refuse_intermediates,
    regional_histogram_distance,
    transfer,
)

__all__ = [
    "ModelBundle",
    "TransferResult",
    "dump_intermediates",
    "evaluate_segmentation",
    "evaluate_transfer",
    "load_models",
    "refuse_intermediates",
    "regional_histogram_distance",
    "save_models",
    "transfer",
]
