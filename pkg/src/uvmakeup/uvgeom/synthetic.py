"""Synthetic parametric face geometry.

Models the face as the front half of an ellipsoid sampled over the fixed UV
layout, posed by yaw/pitch/roll and projected orthographically. It stands in
for a learned 3D reconstruction so every geometry-dependent code path can run
hermetically, with poses either fixed, supplied per call, or derived
deterministically from the image content.
"""

import hashlib

import numpy as np

from ..errors import GeometryError
from . import layout
from .types import Pose, PositionMap

# Head half-axes in the head frame, as fractions of the projection scale.
HEAD_AX = 0.62
HEAD_AY = 0.80
HEAD_AZ = 0.55

DEFAULT_SCALE = 0.42
MIN_IMAGE_SIZE = 150    # same floor as the face-crop ingestion rule
MAX_HASH_ANGLES = (0.35, 0.25, 0.15)


def rotation_matrix(pose: Pose) -> np.ndarray:
    yaw, pitch, roll = pose.as_tuple()
    cy, sy = np.cos(yaw), np.sin(yaw)
    cx, sx = np.cos(pitch), np.sin(pitch)
    cz, sz = np.cos(roll), np.sin(roll)
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return (rz @ rx @ ry).astype(np.float64)


class SyntheticFaceProvider:
    """GeometryProvider over the parametric ellipsoid head.

    Args:
        uv_size: UV canvas shape (H_uv, W_uv).
        pose: fixed pose used for every image. If None, the pose is derived
            from a hash of the image bytes, so distinct images get distinct
            but reproducible poses.
        scale: projection scale as a fraction of min(image H, W).
    """

    def __init__(
        self,
        uv_size=layout.UV_SIZE,
        pose: Pose | None = Pose(),
        scale=DEFAULT_SCALE,
        min_image_size=MIN_IMAGE_SIZE,
    ):
        self.uv_size = tuple(uv_size)
        self.pose = pose
        self.scale = float(scale)
        self.min_image_size = int(min_image_size)
        p, q = layout.face_param_grid(self.uv_size)
        r2 = p * p + q * q
        self._valid = r2 <= 1.0
        # Head-frame surface points; z=0 off the face keeps the math finite.
        z = np.sqrt(np.clip(1.0 - r2, 0.0, None))
        self._surface = np.stack(
            [HEAD_AX * p, HEAD_AY * q, HEAD_AZ * z], axis=-1
        ).astype(np.float64)

    @property
    def valid_mask(self) -> np.ndarray:
        return self._valid.copy()

    def position_map(self, image: np.ndarray) -> PositionMap:
        pose = self.pose if self.pose is not None else self._pose_from_image(image)
        return self.position_map_for_pose(pose, image.shape[:2])

    def position_map_for_pose(self, pose: Pose, image_shape) -> PositionMap:
        """Pose the head explicitly; image_shape is (H, W) of the target image."""
        h, w = int(image_shape[0]), int(image_shape[1])
        if min(h, w) < self.min_image_size:
            raise GeometryError(
                "image %dx%d below the %d px minimum for face geometry"
                % (w, h, self.min_image_size),
                detail={"image_shape": [h, w], "min_size": self.min_image_size},
            )
        f = self.scale * min(h, w)
        rot = rotation_matrix(pose)
        pts = self._surface @ rot.T
        coords = np.empty(self._surface.shape, dtype=np.float32)
        coords[..., 0] = f * pts[..., 0] + (w - 1) / 2.0
        coords[..., 1] = f * pts[..., 1] + (h - 1) / 2.0
        coords[..., 2] = f * pts[..., 2]
        coords[~self._valid] = 0.0

        xy = coords[self._valid][:, :2]
        x_round = np.round(xy[:, 0])
        y_round = np.round(xy[:, 1])
        if (
            x_round.min() < 0
            or y_round.min() < 0
            or x_round.max() > w - 1
            or y_round.max() > h - 1
        ):
            raise GeometryError(
                "face does not fit inside a %dx%d image at scale %.3f" % (w, h, self.scale),
                detail={"image_shape": [h, w], "scale": self.scale},
            )
        return PositionMap(coords=coords, valid=self._valid.copy())

    def _pose_from_image(self, image: np.ndarray) -> Pose:
        arr = np.ascontiguousarray(np.asarray(image))
        digest = hashlib.blake2b(arr.tobytes(), digest_size=12).digest()
        vals = np.frombuffer(digest, dtype="<u4").astype(np.float64) / 0xFFFFFFFF
        ang = [(2 * v - 1) * m for v, m in zip(vals, MAX_HASH_ANGLES)]
        return Pose(*ang)
