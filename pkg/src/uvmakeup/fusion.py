"""Branch fusion, style interpolation, and partial (per-region) transfer.

All three operations are texelwise convex blends; they are kept free of any
rounding or reordering so the algebraic identities (endpoints, affinity in
the mixing weight, composition over disjoint regions) hold exactly in
floating point.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import RequestValidationError

REGION_CHOICES = ("lips", "eyes", "skin")


def _texels(t):
    return t.texels if hasattr(t, "texels") else np.asarray(t)


@dataclass(frozen=True)
class TransferRequest:
    """What a caller wants from one transfer run.

    regions is either ("full",) or a non-empty subset of lips/eyes/skin;
    alpha mixes the styled texture against the source (one reference) or
    between two references (when a second style is supplied). At most one
    reference contributes the pattern, named by pattern_source.
    """

    use_color: bool = True
    use_pattern: bool = True
    alpha: float = 1.0
    regions: tuple = ("full",)
    pattern_source: str = "reference"
    seed: int | None = None

    def __post_init__(self):
        if not np.isfinite(self.alpha) or not (0.0 <= self.alpha <= 1.0):
            raise RequestValidationError("alpha must be in [0, 1], got %r" % (self.alpha,))
        if not self.regions:
            raise RequestValidationError("region selection must not be empty")
        normalized = tuple(dict.fromkeys(self.regions))
        for name in normalized:
            if name != "full" and name not in REGION_CHOICES:
                raise RequestValidationError("unknown region %r" % (name,))
        if "full" in normalized and len(normalized) > 1:
            raise RequestValidationError('"full" cannot be combined with named regions')
        if self.pattern_source not in ("reference", "reference2"):
            raise RequestValidationError(
                "pattern_source must be 'reference' or 'reference2'"
            )
        object.__setattr__(self, "regions", normalized)


def fuse(t_ref, t_color, mask):
    """Overlay the reference pattern onto the color-transferred texture.

    out = t_ref * mask + t_color * (1 - mask), texelwise; the pattern mask
    takes precedence wherever it is positive.
    """
    a = _texels(t_ref)
    b = _texels(t_color)
    m = np.asarray(mask)
    if a.shape != b.shape or m.shape != a.shape[:2]:
        raise ValueError("fuse inputs must share UV dimensions")
    m3 = m[..., None]
    return a * m3 + b * (1.0 - m3)


def interpolate(t_a, t_b, alpha):
    """Mix two textures: alpha weights the first.

    Single-reference interpolation passes the source texture as t_b, giving
    a no-makeup render at alpha 0.
    """
    if not (0.0 <= alpha <= 1.0):
        raise RequestValidationError("alpha must be in [0, 1], got %r" % (alpha,))
    a = _texels(t_a)
    b = _texels(t_b)
    if a.shape != b.shape:
        raise ValueError("interpolate inputs must share UV dimensions")
    return alpha * a + (1.0 - alpha) * b


def partial_apply(t_src, t_full, regions, selection):
    """Keep the transferred result only inside the selected regions.

    M is the union of the selected soft masks ("full" selects the whole
    valid face); out = M * t_full + (1 - M) * t_src.
    """
    selection = tuple(selection)
    if not selection:
        raise RequestValidationError("partial transfer needs at least one region")
    m = regions.union(selection)[..., None]
    a = _texels(t_full)
    b = _texels(t_src)
    return m * a + (1.0 - m) * b
