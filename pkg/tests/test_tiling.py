import numpy as np
import pytest

from lppad.tiling import (
    ConvPipeline,
    ConvStage,
    ShellReport,
    convolve_valid,
    default_pipeline,
    equivariance_deviation,
    run_pipeline,
    shell_mse,
    stitch_tiles,
)


def naive_correlate(plane, kernel):
    """Per-pixel loop with the same accumulation order as the module."""
    kh, kw = kernel.shape
    oh, ow = plane.shape[0] - kh + 1, plane.shape[1] - kw + 1
    out = np.zeros((oh, ow))
    for y in range(oh):
        for x in range(ow):
            acc = 0.0
            for i in range(kh):
                for j in range(kw):
                    acc += kernel[i, j] * plane[y + i, x + j]
            out[y, x] = acc
    return out


def tile_grid(extent, tile, stride):
    starts = list(range(0, extent - tile + 1, stride))
    if starts[-1] + tile < extent:
        starts.append(extent - tile)
    return starts


class TestStages:
    def test_rejects_even_or_rectangular_kernels(self):
        with pytest.raises(ValueError):
            ConvStage(np.ones((2, 2)))
        with pytest.raises(ValueError):
            ConvStage(np.ones((3, 5)))
        with pytest.raises(ValueError):
            ConvStage(np.ones(3))

    def test_rejects_non_finite_weights(self):
        k = np.ones((3, 3))
        k[1, 1] = np.inf
        with pytest.raises(ValueError):
            ConvStage(k)

    def test_rejects_unknown_policy(self):
        with pytest.raises(ValueError):
            ConvStage(np.ones((3, 3)), policy="reflect")

    def test_kernel_frozen(self):
        stage = ConvStage(np.ones((3, 3)))
        with pytest.raises(ValueError):
            stage.kernel[0, 0] = 2.0

    def test_radius(self):
        assert ConvStage(np.ones((1, 1))).radius == 0
        assert ConvStage(np.ones((5, 5))).radius == 2

    def test_pipeline_receptive_radius(self):
        pipe = ConvPipeline((ConvStage(np.ones((3, 3))), ConvStage(np.ones((5, 5)))))
        assert pipe.receptive_radius == 3

    def test_empty_pipeline_rejected(self):
        with pytest.raises(ValueError):
            ConvPipeline(())

    def test_default_pipeline_is_seeded_and_normalized(self):
        a = default_pipeline(seed=5)
        b = default_pipeline(seed=5)
        c = default_pipeline(seed=6)
        assert a.receptive_radius == 3
        for sa, sb in zip(a.stages, b.stages):
            np.testing.assert_array_equal(sa.kernel, sb.kernel)
            assert np.sum(sa.kernel**2) == pytest.approx(1.0, rel=1e-12)
            assert sa.policy == "pad"
        assert not np.array_equal(a.stages[0].kernel, c.stages[0].kernel)


class TestConvolveValid:
    def test_matches_naive_loop_bitwise(self):
        rng = np.random.default_rng(0)
        plane = rng.standard_normal((12, 9))
        for size in (1, 3, 5):
            kernel = rng.standard_normal((size, size))
            np.testing.assert_array_equal(
                convolve_valid(plane, kernel), naive_correlate(plane, kernel)
            )

    def test_output_shape(self):
        out = convolve_valid(np.zeros((10, 8)), np.ones((5, 3)))
        assert out.shape == (6, 6)


class TestRunPipeline:
    def test_identity_kernels_preserve_input(self):
        pipe = ConvPipeline((ConvStage(np.ones((1, 1))), ConvStage(np.ones((1, 1)))))
        x = np.random.default_rng(1).standard_normal((9, 7))
        np.testing.assert_array_equal(run_pipeline(x, pipe, "repl"), x)

    def test_box_kernel_zero_padding_matches_oracle(self):
        x = np.random.default_rng(2).standard_normal((10, 11))
        box = np.full((3, 3), 1.0 / 9.0)
        pipe = ConvPipeline((ConvStage(box),))
        got = run_pipeline(x, pipe, "zero")
        np.testing.assert_array_equal(got, naive_correlate(np.pad(x, 1), box))

    def test_crop_equals_all_valid_pipeline(self):
        rng = np.random.default_rng(3)
        k1, k2 = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
        padded = ConvPipeline((ConvStage(k1), ConvStage(k2)))
        x = rng.standard_normal((14, 16))
        got = run_pipeline(x, padded, "repl", output_crop=2)
        expect = convolve_valid(convolve_valid(x, k1), k2)
        np.testing.assert_array_equal(got, expect)
        assert got.shape == (10, 12)

    def test_crop_must_match_stage_radii(self):
        pipe = ConvPipeline((ConvStage(np.ones((5, 5))), ConvStage(np.ones((3, 3)))))
        with pytest.raises(ValueError):
            run_pipeline(np.zeros((12, 12)), pipe, "zero", output_crop=2)

    def test_crop_cannot_exceed_radius(self):
        with pytest.raises(ValueError):
            run_pipeline(np.zeros((12, 12)), default_pipeline(), "zero", output_crop=4)
        with pytest.raises(ValueError):
            run_pipeline(np.zeros((12, 12)), default_pipeline(), "zero", output_crop=-1)

    def test_channels_run_independently(self):
        pipe = default_pipeline(seed=7)
        x = np.random.default_rng(4).standard_normal((12, 10, 3))
        out = run_pipeline(x, pipe, "lp1x1cs")
        assert out.shape == (12, 10, 3)
        for ch in range(3):
            np.testing.assert_array_equal(out[:, :, ch], run_pipeline(x[:, :, ch], pipe, "lp1x1cs"))

    def test_valid_pipeline_is_shift_equivariant(self):
        pipe = default_pipeline(seed=8)
        x = np.random.default_rng(5).standard_normal((20, 18))
        whole = run_pipeline(x, pipe, "zero", output_crop=3)
        shifted = run_pipeline(x[2:, 1:], pipe, "zero", output_crop=3)
        np.testing.assert_array_equal(whole[2:, 1:], shifted)


class TestStitchTiles:
    def test_crop_at_radius_matches_whole_image_bitwise(self):
        pipe = default_pipeline(seed=0)
        x = np.random.default_rng(6).standard_normal((37, 41))
        expect = run_pipeline(x, pipe, "zero", output_crop=3)
        for method in ("zero", "repl", "lp2x3"):
            for tile in (16, 19, 37):
                got = stitch_tiles(x, pipe, method, tile=tile, crop=3)
                np.testing.assert_array_equal(got, expect)

    def test_grid_invariance_at_full_crop(self):
        pipe = default_pipeline(seed=0)
        x = np.random.default_rng(7).standard_normal((40, 40, 2))
        outs = [stitch_tiles(x, pipe, "repl", tile=t, crop=3) for t in (12, 17, 25, 40)]
        for other in outs[1:]:
            np.testing.assert_array_equal(outs[0], other)

    def test_crop_zero_has_seams(self):
        pipe = default_pipeline(seed=0)
        x = np.random.default_rng(8).standard_normal((32, 32))
        stitched = stitch_tiles(x, pipe, "zero", tile=16, crop=0)
        whole = run_pipeline(x, pipe, "zero", output_crop=0)
        assert stitched.shape == whole.shape
        assert np.any(stitched != whole)

    def test_constant_input_stitches_seam_free(self):
        pipe = default_pipeline(seed=0)
        x = np.full((30, 26), 2.5)
        for crop in (0, 3):
            stitched = stitch_tiles(x, pipe, "repl", tile=13, crop=crop)
            assert np.ptp(stitched) == 0.0

    def test_infeasible_geometry_rejected(self):
        pipe = default_pipeline(seed=0)
        x = np.zeros((20, 20))
        with pytest.raises(ValueError):
            stitch_tiles(x, pipe, "zero", tile=24, crop=3)
        with pytest.raises(ValueError):
            stitch_tiles(x, pipe, "zero", tile=6, crop=3)


class TestEquivarianceDeviation:
    def test_full_crop_deviation_is_zero(self):
        pipe = default_pipeline(seed=0)
        x = np.random.default_rng(9).standard_normal((40, 37))
        dev = equivariance_deviation(x, pipe, "zero", tile=16, crop=3)
        assert dev.shape == (34, 31)
        assert np.all(dev == 0.0)

    def test_cropping_reduces_mean_deviation(self):
        pipe = default_pipeline(seed=0)
        x = np.random.default_rng(10).standard_normal((40, 37))
        dev0 = equivariance_deviation(x, pipe, "zero", tile=16, crop=0)
        dev3 = equivariance_deviation(x, pipe, "zero", tile=16, crop=3)
        assert dev0.mean() > dev3.mean() == 0.0

    def test_deviation_is_local_to_seams(self):
        pipe = default_pipeline(seed=0)
        radius = pipe.receptive_radius
        x = np.random.default_rng(11).standard_normal((40, 40))
        tile, crop = 16, 0
        dev = equivariance_deviation(x, pipe, "zero", tile=tile, crop=crop)
        # Slab boundaries in absolute pixel coordinates; the map is inset by
        # the receptive radius relative to the input frame.
        starts = tile_grid(40, tile, tile - 2 * crop)
        edges = [s for s in starts if s != 0]
        far = np.ones(dev.shape, dtype=bool)
        for axis, extent in ((0, dev.shape[0]), (1, dev.shape[1])):
            coord = np.arange(extent) + radius
            near = np.zeros(extent, dtype=bool)
            for b in edges:
                near |= np.abs(coord + 0.5 - b) <= radius + 1
            far &= ~near[:, None] if axis == 0 else ~near[None, :]
        assert far.sum() > 100
        assert np.all(dev[far] == 0.0)
        assert np.any(dev != 0.0)


class TestShellMse:
    def test_equal_rasters_give_zero_shells(self):
        x = np.random.default_rng(12).standard_normal((8, 8))
        report = shell_mse(x, x)
        assert report.pixel_counts == (28, 20, 12, 4)
        assert report.mses == (0.0, 0.0, 0.0, 0.0)
        assert report.total_mse == 0.0

    def test_corner_delta_lands_in_outer_shell(self):
        target = np.zeros((8, 8))
        output = target.copy()
        output[0, 7] = 0.5
        report = shell_mse(output, target)
        assert report.mses[0] == pytest.approx(0.25 / 28.0, rel=1e-15)
        assert report.mses[1:] == (0.0, 0.0, 0.0)

    def test_uniform_difference_hits_every_shell(self):
        target = np.zeros((9, 11))
        report = shell_mse(target + 0.3, target)
        np.testing.assert_allclose(report.mses, 0.09, rtol=1e-14)

    def test_partition_identity(self):
        rng = np.random.default_rng(13)
        out = rng.standard_normal((11, 13, 3))
        tgt = rng.standard_normal((11, 13, 3))
        report = shell_mse(out, tgt, thickness=2)
        direct = float(np.mean((out - tgt) ** 2))
        assert report.total_mse == pytest.approx(direct, rel=1e-12)
        assert sum(report.pixel_counts) == 11 * 13 * 3

    def test_max_shells_lumps_interior(self):
        x = np.zeros((8, 8))
        report = shell_mse(x, x, max_shells=2)
        assert report.pixel_counts == (28, 36)

    def test_thickness_groups_depths(self):
        x = np.zeros((8, 8))
        report = shell_mse(x, x, thickness=2)
        assert report.pixel_counts == (48, 16)

    def test_validation(self):
        with pytest.raises(ValueError):
            shell_mse(np.zeros((4, 4)), np.zeros((4, 5)))
        with pytest.raises(ValueError):
            shell_mse(np.zeros((4, 4)), np.zeros((4, 4)), thickness=0)
        with pytest.raises(ValueError):
            shell_mse(np.zeros((4, 4)), np.zeros((4, 4)), max_shells=0)
        with pytest.raises(ValueError):
            ShellReport(1, (4, 4), (0.0,))

    def test_csv_round_trip(self):
        target = np.zeros((8, 8))
        output = np.full((8, 8), 1.0 / 3.0)
        lines = shell_mse(output, target).to_csv().strip().split("\n")
        assert lines[0] == "shell_index,pixel_count,mse"
        assert len(lines) == 5
        idx, count, mse = lines[1].split(",")
        assert (idx, count) == ("0", "28")
        assert float(mse) == shell_mse(output, target).mses[0]
