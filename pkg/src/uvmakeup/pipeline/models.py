"""Model bundle: what the transfer pipeline needs loaded to run.

On disk a bundle is a directory holding ``color.pt`` and/or ``pattern.pt``
checkpoints. A ``color.identity`` marker file stands for the pass-through
color branch, which keeps toy deployments self-describing.
"""

from dataclasses import dataclass, field
from pathlib import Path

from ..colorxfer.networks import ColorNet, IdentityColorNet
from ..errors import ModelMissingError
from ..patternseg.networks import SegNet
from ..uvgeom.synthetic import SyntheticFaceProvider

COLOR_FILE = "color.pt"
PATTERN_FILE = "pattern.pt"
IDENTITY_MARKER = "color.identity"


@dataclass
class ModelBundle:
    """Loaded branch models plus the geometry provider they run against."""

    color: object = None
    pattern: object = None
    provider: object = field(default_factory=SyntheticFaceProvider)
    paths: dict = field(default_factory=dict)

    def require(self, branch):
        model = getattr(self, branch)
        if model is None:
            raise ModelMissingError(
                "no %s model loaded but the %s branch is enabled" % (branch, branch),
                detail={"branch": branch},
            )
        return model

    def loaded(self):
        out = []
        if self.color is not None:
            out.append("color")
        if self.pattern is not None:
            out.append("pattern")
        return out


def load_models(directory, provider=None):
    """Load whatever checkpoints exist under directory.

    Missing files leave the branch unset; transfer fails only when a request
    actually enables that branch.
    """
    directory = Path(directory)
    bundle = ModelBundle(provider=provider or SyntheticFaceProvider())
    color_path = directory / COLOR_FILE
    if (directory / IDENTITY_MARKER).exists():
        bundle.color = IdentityColorNet()
        bundle.paths["color"] = str(directory / IDENTITY_MARKER)
    elif color_path.exists():
        bundle.color, _ = ColorNet.load(color_path)
        bundle.paths["color"] = str(color_path)
    pattern_path = directory / PATTERN_FILE
    if pattern_path.exists():
        bundle.pattern, _ = SegNet.load(pattern_path)
        bundle.paths["pattern"] = str(pattern_path)
    return bundle


def save_models(bundle, directory):
    """Persist the bundle's branches; returns the files written."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if isinstance(bundle.color, IdentityColorNet):
        marker = directory / IDENTITY_MARKER
        marker.write_text("pass-through color branch\n")
        written.append(marker)
    elif bundle.color is not None:
        path = directory / COLOR_FILE
        bundle.color.save(path)
        written.append(path)
    if bundle.pattern is not None:
        path = directory / PATTERN_FILE
        bundle.pattern.save(path)
        written.append(path)
    return written
