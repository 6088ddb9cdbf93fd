"""Mask-agreement metrics for the pattern branch."""

import warnings

import numpy as np

from ..errors import VacuousClassWarning


def iou_per_class(gt, pr, threshold=0.5):
    """(foreground IoU, background IoU) of two soft masks.

    Masks are binarized at threshold. A class empty in both masks scores 1
    (vacuous agreement) and raises VacuousClassWarning.
    """
    gt = np.asarray(gt)
    pr = np.asarray(pr)
    if gt.shape != pr.shape:
        raise ValueError("mask shapes differ: %r vs %r" % (gt.shape, pr.shape))
    g = gt >= threshold
    p = pr >= threshold
    scores = []
    for name, a, b in (("foreground", g, p), ("background", ~g, ~p)):
        union = (a | b).sum()
        if union == 0:
            warnings.warn(
                "%s class empty in both masks; scoring 1" % name, VacuousClassWarning
            )
            scores.append(1.0)
        else:
            scores.append(float((a & b).sum() / union))
    return tuple(scores)


def miou(gt, pr, threshold=0.5):
    """Two-class mean IoU (pattern + background) of two soft masks."""
    fg, bg = iou_per_class(gt, pr, threshold)
    return (fg + bg) / 2.0
