import numpy as np
import pytest

from uvmakeup.uvgeom import Pose, SyntheticFaceProvider, universal_region_masks
from uvmakeup.uvgeom import layout
from uvmakeup.uvgeom.types import TextureMap


@pytest.fixture(scope="session")
def provider():
    return SyntheticFaceProvider()


@pytest.fixture(scope="session")
def regions():
    return universal_region_masks()


def smooth_face_texture(seed=0, uv_size=layout.UV_SIZE):
    """A smooth plausible face-like texture for geometry tests."""
    rng = np.random.default_rng(seed)
    h, w = uv_size
    vv, uu = np.meshgrid(
        np.linspace(0, 1, h, dtype=np.float32),
        np.linspace(0, 1, w, dtype=np.float32),
        indexing="ij",
    )
    base = rng.uniform(0.45, 0.75, size=3).astype(np.float32)
    tex = np.stack(
        [
            base[0] + 0.12 * np.sin(3 * uu + rng.uniform(0, 6)),
            base[1] + 0.10 * vv,
            base[2] + 0.10 * np.cos(4 * vv + rng.uniform(0, 6)),
        ],
        axis=-1,
    )
    masks = universal_region_masks(uv_size)
    tex = tex + masks.lips[..., None] * np.array([0.2, -0.15, -0.05], np.float32)
    tex = tex + masks.eyes[..., None] * np.array([-0.1, -0.1, 0.1], np.float32)
    valid = layout.valid_mask(uv_size)
    tex = np.clip(tex, 0.0, 1.0) * valid[..., None]
    return TextureMap(texels=tex.astype(np.float32))


@pytest.fixture()
def face_texture():
    return smooth_face_texture(seed=3)


@pytest.fixture(scope="session")
def frontal_pos(provider):
    return provider.position_map_for_pose(Pose(), (256, 256))
