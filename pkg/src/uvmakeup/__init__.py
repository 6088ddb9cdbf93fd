"""Two-branch makeup transfer in UV texture space.

Color is moved between faces by a histogram-matching-guided swapping network,
patterns by a supervised segmentation network; both operate on UV texture maps
and are fused back into the source photo through a z-buffer renderer.
"""

__version__ = "0.1.0"
