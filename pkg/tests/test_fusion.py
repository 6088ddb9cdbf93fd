"""Exact-algebra tests for fusion, interpolation, and partial transfer.

The blend identities are checked bitwise, not within a tolerance. For the
affinity checks that requires dyadic inputs: texel values that are multiples
of 1/256 and weights that are multiples of 1/64 make every product and sum
exactly representable in float64.
"""

import numpy as np
import pytest

from uvmakeup.errors import RequestValidationError
from uvmakeup.fusion import TransferRequest, fuse, interpolate, partial_apply
from uvmakeup.uvgeom import TextureMap


def dyadic_texture(rng, shape=(16, 16, 3)):
    return rng.integers(0, 257, size=shape).astype(np.float64) / 256.0


def dyadic_mask(rng, shape=(16, 16)):
    return rng.integers(0, 65, size=shape).astype(np.float64) / 64.0


class TestFuse:
    def test_mask_zero_returns_color_branch(self):
        rng = np.random.default_rng(0)
        a, b = dyadic_texture(rng), dyadic_texture(rng)
        out = fuse(a, b, np.zeros((16, 16)))
        assert np.array_equal(out, b)

    def test_mask_one_returns_reference(self):
        rng = np.random.default_rng(1)
        a, b = dyadic_texture(rng), dyadic_texture(rng)
        out = fuse(a, b, np.ones((16, 16)))
        assert np.array_equal(out, a)

    def test_equal_inputs_fixed_point(self):
        rng = np.random.default_rng(2)
        t = dyadic_texture(rng)
        assert np.array_equal(fuse(t, t, dyadic_mask(rng)), t)

    def test_bounded_by_inputs(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a, b = rng.random((8, 8, 3)), rng.random((8, 8, 3))
            m = rng.random((8, 8))
            out = fuse(a, b, m)
            assert np.all(out >= np.minimum(a, b) - 1e-12)
            assert np.all(out <= np.maximum(a, b) + 1e-12)

    def test_accepts_texture_maps(self):
        rng = np.random.default_rng(4)
        a = TextureMap(texels=rng.random((8, 8, 3)).astype(np.float32))
        b = TextureMap(texels=rng.random((8, 8, 3)).astype(np.float32))
        out = fuse(a, b, np.ones((8, 8), np.float32))
        assert np.array_equal(out, a.texels)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            fuse(np.zeros((8, 8, 3)), np.zeros((8, 8, 3)), np.zeros((4, 4)))
        with pytest.raises(ValueError):
            fuse(np.zeros((8, 8, 3)), np.zeros((4, 4, 3)), np.zeros((8, 8)))


class TestInterpolate:
    def test_endpoints(self):
        rng = np.random.default_rng(5)
        a, b = dyadic_texture(rng), dyadic_texture(rng)
        assert np.array_equal(interpolate(a, b, 1.0), a)
        assert np.array_equal(interpolate(a, b, 0.0), b)

    def test_affine_in_alpha(self):
        # midpoint identity: out((a1+a2)/2) == (out(a1)+out(a2))/2, bitwise
        rng = np.random.default_rng(6)
        for _ in range(200):
            a, b = dyadic_texture(rng, (8, 8, 3)), dyadic_texture(rng, (8, 8, 3))
            a1 = rng.integers(0, 65) / 64.0
            a2 = rng.integers(0, 65) / 64.0
            mid = interpolate(a, b, (a1 + a2) / 2.0)
            avg = (interpolate(a, b, a1) + interpolate(a, b, a2)) / 2.0
            assert np.array_equal(mid, avg)

    def test_slope_form(self):
        # out(alpha) - out(0) == alpha * (out(1) - out(0))
        rng = np.random.default_rng(7)
        a, b = dyadic_texture(rng), dyadic_texture(rng)
        for alpha in np.arange(0, 65) / 64.0:
            lhs = interpolate(a, b, alpha) - b
            rhs = alpha * (a - b)
            assert np.array_equal(lhs, rhs)

    def test_alpha_out_of_range_rejected(self):
        a = np.zeros((4, 4, 3))
        with pytest.raises(RequestValidationError):
            interpolate(a, a, 1.5)
        with pytest.raises(RequestValidationError):
            interpolate(a, a, -0.1)


class TestPartialApply:
    def test_composition_matches_joint_selection(self, regions):
        # lips-then-eyes must equal selecting both at once; relies on the
        # region masks having disjoint supports
        rng = np.random.default_rng(8)
        shape = regions.face.shape + (3,)
        src = rng.random(shape)
        full = rng.random(shape)
        step1 = partial_apply(src, full, regions, ("lips",))
        step2 = partial_apply(step1, full, regions, ("eyes",))
        joint = partial_apply(src, full, regions, ("lips", "eyes"))
        assert np.array_equal(step2, joint)

    def test_order_independent(self, regions):
        rng = np.random.default_rng(9)
        shape = regions.face.shape + (3,)
        src, full = rng.random(shape), rng.random(shape)
        ab = partial_apply(partial_apply(src, full, regions, ("skin",)), full, regions, ("lips",))
        ba = partial_apply(partial_apply(src, full, regions, ("lips",)), full, regions, ("skin",))
        assert np.array_equal(ab, ba)

    def test_full_selection_uses_face_mask(self, regions):
        rng = np.random.default_rng(10)
        shape = regions.face.shape + (3,)
        src, full = rng.random(shape), rng.random(shape)
        out = partial_apply(src, full, regions, ("full",))
        inside = regions.face > 0.999
        assert np.array_equal(out[inside], full[inside])
        assert np.array_equal(out[regions.face == 0.0], src[regions.face == 0.0])

    def test_untouched_outside_selection(self, regions):
        rng = np.random.default_rng(11)
        shape = regions.face.shape + (3,)
        src, full = rng.random(shape), rng.random(shape)
        out = partial_apply(src, full, regions, ("lips",))
        outside = regions.lips == 0.0
        assert np.array_equal(out[outside], src[outside])

    def test_empty_selection_rejected(self, regions):
        with pytest.raises(RequestValidationError):
            partial_apply(np.zeros((4, 4, 3)), np.zeros((4, 4, 3)), regions, ())


class TestTransferRequest:
    def test_defaults(self):
        req = TransferRequest()
        assert req.use_color and req.use_pattern
        assert req.alpha == 1.0
        assert req.regions == ("full",)

    def test_region_dedup(self):
        req = TransferRequest(regions=("lips", "lips", "eyes"))
        assert req.regions == ("lips", "eyes")

    def test_invalid_alpha(self):
        for alpha in (-0.01, 1.01, float("nan")):
            with pytest.raises(RequestValidationError):
                TransferRequest(alpha=alpha)

    def test_empty_regions(self):
        with pytest.raises(RequestValidationError):
            TransferRequest(regions=())

    def test_unknown_region(self):
        with pytest.raises(RequestValidationError):
            TransferRequest(regions=("nose",))

    def test_full_exclusive(self):
        with pytest.raises(RequestValidationError):
            TransferRequest(regions=("full", "lips"))

    def test_pattern_source(self):
        assert TransferRequest(pattern_source="reference2").pattern_source == "reference2"
        with pytest.raises(RequestValidationError):
            TransferRequest(pattern_source="both")
