import numpy as np
import pytest

from maskbench.bank import (
    BANK_SIZE,
    CLUSTER_SUBSETS,
    CandidateBank,
    build_bank,
    cluster_masks,
    fit_three_clusters,
    invert_mask,
    otsu_threshold,
    quantize_plane,
    rats_threshold,
)
from maskbench.raster import BinaryMask, GrayPlane, WordImage, intensity

from conftest import glyph_image, k_color_image, make_rng, random_image, random_mask
from oracles import otsu_sweep, rats_direct


def plane_of(values, tag="Intensity"):
    return GrayPlane(np.asarray(values, dtype=np.float64), tag)


class TestQuantize:
    def test_min_max_mapping(self):
        q, degenerate = quantize_plane(plane_of([[0.0, 50.0, 100.0]]))
        assert not degenerate
        assert q[0, 0] == 0 and q[0, 2] == 255

    def test_constant_plane_degenerate(self):
        q, degenerate = quantize_plane(plane_of([[7.0, 7.0], [7.0, 7.0]]))
        assert degenerate
        assert (q == 0).all()


class TestOtsu:
    def test_two_level_split(self):
        res = otsu_threshold(plane_of([[0, 0, 0, 0, 255, 255, 255, 255]]))
        assert not res.degenerate
        assert np.array_equal(res.mask.bits, [[0, 0, 0, 0, 1, 1, 1, 1]])

    def test_constant_plane(self):
        res = otsu_threshold(plane_of([[9.0] * 6]))
        assert res.degenerate
        assert res.threshold == 0.0
        assert res.mask.foreground_count() == 0

    def test_against_sweep_oracle_fixed_plane(self):
        vals = [[12, 40, 41, 43, 200, 210, 215, 220, 221, 230]]
        plane = plane_of(vals)
        q, _ = quantize_plane(plane)
        res = otsu_threshold(plane)
        assert res.threshold == otsu_sweep(q)

    def test_against_sweep_oracle_random(self):
        rng = make_rng(21)
        for _ in range(100):
            h, w = int(rng.integers(1, 12)), int(rng.integers(2, 12))
            vals = rng.normal(0, 100, (h, w))
            plane = plane_of(vals)
            q, degenerate = quantize_plane(plane)
            if degenerate:
                continue
            res = otsu_threshold(plane)
            assert res.threshold == otsu_sweep(q)
            assert np.array_equal(res.mask.bits, (q > res.threshold).astype(np.uint8))

    def test_tie_breaks_to_lowest(self):
        # values only in bins 0 and 255: every t in 0..254 gives the same
        # between-class split, so the lowest must win
        res = otsu_threshold(plane_of([[0, 255]]))
        assert res.threshold == 0.0


class TestRats:
    def test_constant_plane_zero_gradient(self):
        res = rats_threshold(plane_of(np.full((4, 5), 3.3)))
        assert res.degenerate
        assert res.threshold == 0.0
        assert res.mask.foreground_count() == 0

    def test_ramp_matches_direct_summation(self):
        ramp = np.tile(np.arange(256, dtype=np.float64), (4, 1))
        res = rats_threshold(plane_of(ramp))
        expected, degenerate = rats_direct(ramp.tolist())
        assert not degenerate
        assert res.threshold == pytest.approx(expected, rel=1e-9)

    def test_two_region_plane(self):
        vals = np.zeros((6, 10))
        vals[:, 5:] = 255.0
        res = rats_threshold(plane_of(vals))
        assert 0.0 < res.threshold < 255.0
        assert np.array_equal(res.mask.bits, (vals > res.threshold).astype(np.uint8))

    def test_random_planes_match_direct_summation(self):
        rng = make_rng(22)
        for _ in range(50):
            h, w = int(rng.integers(1, 10)), int(rng.integers(1, 10))
            vals = rng.uniform(-50, 300, (h, w))
            res = rats_threshold(plane_of(vals))
            expected, degenerate = rats_direct(vals.tolist())
            assert res.degenerate == degenerate
            if not degenerate:
                assert res.threshold == pytest.approx(expected, rel=1e-9)


class TestClustering:
    def test_exact_three_color_recovery(self):
        rng = make_rng(23)
        for _ in range(20):
            img = k_color_image(rng, 3)
            model = fit_three_clusters(img, seed=0)
            assert not model.degenerate
            assert model.inertia == 0.0
            colors = {tuple(c) for c in img.pixels.reshape(-1, 3)}
            fitted = {tuple(c) for c in model.centroids}
            assert fitted == {tuple(float(x) for x in c) for c in colors}

    def test_uniform_image_degenerate(self):
        img = WordImage("u", np.full((4, 4, 3), 9, dtype=np.uint8))
        model = fit_three_clusters(img, seed=0)
        assert model.degenerate
        assert model.empty_clusters != ()

    def test_two_color_image_degenerate(self):
        rng = make_rng(24)
        img = k_color_image(rng, 2)
        model = fit_three_clusters(img, seed=0)
        assert model.degenerate
        assert len(model.empty_clusters) == 1

    def test_requires_three_pixels(self):
        img = WordImage("t", np.zeros((1, 2, 3), dtype=np.uint8))
        with pytest.raises(ValueError):
            fit_three_clusters(img)

    def test_nearest_centroid_and_inertia_monotone(self):
        rng = make_rng(25)
        for _ in range(30):
            img = random_image(rng, 4, 4)
            model = fit_three_clusters(img, seed=0)
            log = model.inertia_log
            assert all(b <= a for a, b in zip(log, log[1:]))
            flat = img.pixels.reshape(-1, 3).astype(np.float64)
            labels = model.assignment.ravel() - 1
            dists = ((flat[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
            for p in range(flat.shape[0]):
                row = dists[p]
                assert row[labels[p]] == row.min()
                # ties must resolve to the lowest centroid index
                assert labels[p] == int(np.flatnonzero(row == row.min())[0])

    def test_assignment_labels_are_one_based(self):
        rng = make_rng(26)
        model = fit_three_clusters(random_image(rng, 5, 5), seed=0)
        assert set(np.unique(model.assignment)) <= {1, 2, 3}

    def test_inertia_equals_direct_sum(self):
        rng = make_rng(39)
        for _ in range(20):
            img = random_image(rng, 5, 8)
            model = fit_three_clusters(img, seed=0)
            flat = img.pixels.reshape(-1, 3).astype(np.float64)
            assigned = model.centroids[model.assignment.ravel() - 1]
            direct = float(((flat - assigned) ** 2).sum())
            assert model.inertia == pytest.approx(direct, rel=1e-12)

    def test_deterministic_across_calls(self):
        rng = make_rng(27)
        img = random_image(rng, 6, 6)
        m1 = fit_three_clusters(img, seed=0)
        m2 = fit_three_clusters(img, seed=0)
        assert np.array_equal(m1.assignment, m2.assignment)
        assert np.array_equal(m1.centroids, m2.centroids)


class TestClusterMasks:
    def test_all_in_cluster_one(self):
        model = fit_three_clusters(WordImage("u", np.full((2, 2, 3), 5, dtype=np.uint8)))
        masks = cluster_masks(model)
        full, empty = 4, 0
        got = [m.foreground_count() for m in masks]
        assert got == [full, empty, empty, full, full, empty]

    def test_three_pixel_enumeration(self):
        img = k_color_image(make_rng(28), 3, height=1, width=3)
        model = fit_three_clusters(img)
        # normalize to the label order of the three pixels
        lab = model.assignment[0]
        masks = cluster_masks(model)
        for subset, mask in zip(CLUSTER_SUBSETS, masks):
            expected = [1 if lab[i] in subset else 0 for i in range(3)]
            assert mask.bits[0].tolist() == expected

    def test_membership_oracle_random(self):
        rng = make_rng(29)
        for _ in range(20):
            img = random_image(rng, 5, 7)
            model = fit_three_clusters(img)
            masks = cluster_masks(model)
            for subset, mask in zip(CLUSTER_SUBSETS, masks):
                for y in range(img.height):
                    for x in range(img.width):
                        assert mask.bits[y, x] == (1 if model.assignment[y, x] in subset else 0)

    def test_singletons_partition_image(self):
        rng = make_rng(30)
        img = random_image(rng, 6, 9)
        masks = cluster_masks(fit_three_clusters(img))
        total = masks[0].bits + masks[1].bits + masks[2].bits
        assert (total == 1).all()


class TestInvert:
    def test_all_zero_flips_to_all_one(self):
        m = BinaryMask(np.zeros((3, 4), dtype=np.uint8))
        assert invert_mask(m).foreground_count() == 12

    def test_involution(self):
        rng = make_rng(31)
        m = random_mask(rng, 8, 8)
        assert np.array_equal(invert_mask(invert_mask(m)).bits, m.bits)

    def test_counts_complement(self):
        rng = make_rng(32)
        m = random_mask(rng, 9, 7)
        assert invert_mask(m).foreground_count() == 63 - m.foreground_count()


class TestBuildBank:
    def test_bank_has_sixteen_candidates(self):
        rng = make_rng(33)
        bank = build_bank(random_image(rng, 8, 10))
        assert len(bank.candidates) == BANK_SIZE
        assert len(bank.methods) == BANK_SIZE

    def test_method_descriptor_order(self):
        rng = make_rng(34)
        bank = build_bank(random_image(rng, 6, 6))
        prefixes = [m.split(":")[0] for m in bank.methods]
        assert prefixes == ["otsu"] * 9 + ["cluster"] * 6 + ["rats"]
        tags = [m.split(":")[1] for m in bank.methods[:9]]
        assert tags == ["R", "G", "B", "H", "S", "V", "L", "a", "b"]
        assert bank.methods[9] == "cluster:{1}"
        assert bank.methods[12] == "cluster:{1,2}"

    def test_inverted_is_complement_of_normal(self):
        rng = make_rng(35)
        img = random_image(rng, 7, 9)
        normal = build_bank(img, "normal")
        inverted = build_bank(img, "inverted")
        for k in range(1, BANK_SIZE + 1):
            assert np.array_equal(
                inverted.candidate(k).bits, 1 - normal.candidate(k).bits
            )

    def test_dark_glyphs_recovered(self):
        from conftest import block_glyph_stencil

        stencil = block_glyph_stencil()
        img = glyph_image(stencil)  # dark text on light ground
        bank = build_bank(img, "inverted")  # complement marks the dark side
        assert np.array_equal(bank.candidate(1).bits, stencil)

    def test_light_glyphs_recovered_normal_polarity(self):
        from conftest import block_glyph_stencil

        stencil = block_glyph_stencil()
        img = glyph_image(stencil, dark=(240, 240, 240), light=(15, 15, 15))
        bank = build_bank(img, "normal")
        assert np.array_equal(bank.candidate(1).bits, stencil)

    def test_constant_image_keeps_cardinality(self):
        img = WordImage("c", np.full((5, 8, 3), 100, dtype=np.uint8))
        bank = build_bank(img)
        assert len(bank.candidates) == BANK_SIZE
        assert any(bank.degenerate)
        # all nine plane thresholds and the gradient threshold degenerate
        assert all(bank.degenerate[i] for i in range(9))
        assert bank.degenerate[15]

    def test_degenerate_masks_invert_to_all_one(self):
        img = WordImage("c", np.full((3, 3, 3), 50, dtype=np.uint8))
        bank = build_bank(img, "inverted")
        assert bank.candidate(1).foreground_count() == 9

    def test_candidate_index_bounds(self):
        rng = make_rng(36)
        bank = build_bank(random_image(rng, 4, 4))
        with pytest.raises(IndexError):
            bank.candidate(0)
        with pytest.raises(IndexError):
            bank.candidate(17)

    def test_deterministic(self):
        rng = make_rng(37)
        img = random_image(rng, 10, 12)
        b1 = build_bank(img, "normal", seed=5)
        b2 = build_bank(img, "normal", seed=5)
        assert b1.methods == b2.methods
        for k in range(1, BANK_SIZE + 1):
            assert np.array_equal(b1.candidate(k).bits, b2.candidate(k).bits)

    def test_rejects_unknown_polarity(self):
        rng = make_rng(38)
        with pytest.raises(ValueError):
            build_bank(random_image(rng, 4, 4), "flipped")

    def test_bank_type_enforces_cardinality(self):
        with pytest.raises(ValueError):
            CandidateBank("x", (), (), (), "normal")
