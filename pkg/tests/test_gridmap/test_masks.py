"""
Tests for mask primitives: morphology, distance transforms, seeds and components
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from src.gridmap.masks import (compute_seeds, connected_components, edt, edt_with_border,
                               erode_with_border, morphology)
from src.utils.errors import DegenerateField


def brute_force_edt(mask: np.ndarray) -> np.ndarray:
    rows, cols = np.nonzero(mask)
    out = np.zeros(mask.shape)
    for r in range(mask.shape[0]):
        for c in range(mask.shape[1]):
            out[r, c] = np.min(np.hypot(rows - r, cols - c))
    return out


class TestMorphology:
    """Test square-kernel morphology"""

    def test_dilate_grows_by_radius(self):
        """Test a single cell dilates into a (2r+1) square"""
        mask = np.zeros((9, 9), dtype=bool)
        mask[4, 4] = True
        out = morphology(mask, 'dilate', 2)

        assert out.sum() == 25
        assert out[2:7, 2:7].all()

    def test_erode_keeps_cells_touching_border(self):
        """Test erosion treats cells outside the grid as neutral"""
        mask = np.ones((5, 5), dtype=bool)
        assert morphology(mask, 'erode', 1).all()

    def test_close_fills_single_gap(self):
        """Test closing bridges a one-cell gap in a wall"""
        mask = np.zeros((7, 7), dtype=bool)
        mask[3, :] = True
        mask[3, 3] = False
        out = morphology(mask, 'close', 1)

        assert out[3, :].all()

    def test_zero_radius_is_identity(self):
        """Test radius 0 returns an unchanged copy"""
        mask = np.eye(4, dtype=bool)
        out = morphology(mask, 'dilate', 0)

        assert np.array_equal(out, mask)
        assert out is not mask

    def test_invalid_arguments(self):
        """Test negative radius and unknown op raise"""
        mask = np.zeros((3, 3), dtype=bool)
        with pytest.raises(ValueError):
            morphology(mask, 'dilate', -1)
        with pytest.raises(ValueError):
            morphology(mask, 'open', 1)

    def test_erode_with_border_treats_edge_as_wall(self):
        """Test erode_with_border peels cells next to the grid edge"""
        mask = np.ones((5, 5), dtype=bool)
        out = erode_with_border(mask, 1)

        assert out.sum() == 9
        assert out[1:4, 1:4].all()


class TestDistanceTransforms:
    """Test exact Euclidean distance transforms"""

    def test_edt_distances(self):
        """Test distances to a single wall cell"""
        mask = np.zeros((5, 5), dtype=bool)
        mask[0, 0] = True
        dist = edt(mask)

        assert dist[0, 0] == 0.0
        assert dist[0, 3] == pytest.approx(3.0)
        assert dist[3, 4] == pytest.approx(5.0)

    def test_edt_needs_a_true_cell(self):
        """Test an empty mask raises DegenerateField"""
        with pytest.raises(DegenerateField):
            edt(np.zeros((3, 3), dtype=bool))

    def test_edt_with_border_counts_outside_ring(self):
        """Test the ring outside the grid acts as wall"""
        dist = edt_with_border(np.zeros((5, 5), dtype=bool))

        assert dist[0, 0] == pytest.approx(1.0)
        assert dist[2, 2] == pytest.approx(3.0)

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.bool_, st.tuples(st.integers(1, 8), st.integers(1, 8))))
    def test_edt_matches_brute_force(self, mask):
        """Test the transform equals the brute-force minimum distance"""
        if not mask.any():
            mask = mask.copy()
            mask.flat[0] = True
        assert np.allclose(edt(mask), brute_force_edt(mask))


class TestSeeds:
    """Test room-core seed extraction"""

    def test_seeds_subset_of_free(self, two_room_map):
        """Test seeds never leave the walkable mask"""
        walls = two_room_map.values >= 128
        dist = edt_with_border(walls)
        seeds = compute_seeds(dist, ~walls)

        assert seeds.any()
        assert not (seeds & walls).any()

    def test_seeds_are_far_from_walls(self, two_room_map):
        """Test Otsu keeps the cores and drops the wall band"""
        walls = two_room_map.values >= 128
        dist = edt_with_border(walls)
        seeds = compute_seeds(dist, ~walls)

        assert dist[seeds].min() > dist[~walls].min()

    def test_constant_threshold_replaces_otsu(self):
        """Test a given distance threshold is applied directly"""
        dist = np.array([[0.0, 1.0, 2.0, 3.0]])
        free = np.array([[False, True, True, True]])

        assert compute_seeds(dist, free, distance_threshold=2.0).tolist() == [[False, False, True, True]]

    def test_constant_field_returns_free_mask(self):
        """Test a flat field has no core structure"""
        free = np.ones((4, 4), dtype=bool)
        assert compute_seeds(np.ones((4, 4)), free).all()

    def test_shape_mismatch(self):
        """Test mismatched shapes raise ValueError"""
        with pytest.raises(ValueError):
            compute_seeds(np.zeros((3, 3)), np.ones((4, 4), dtype=bool))


class TestConnectedComponents:
    """Test 8-connected labeling"""

    def test_diagonal_cells_connect(self):
        """Test diagonal neighbours belong to the same component"""
        mask = np.eye(4, dtype=bool)
        count, labels = connected_components(mask)

        assert count == 1
        assert set(np.unique(labels[mask])) == {1}

    def test_labels_in_scan_order(self):
        """Test components are numbered in raster scan order"""
        mask = np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=bool)
        count, labels = connected_components(mask)

        assert count == 2
        assert labels[0, 2] == 1
        assert labels[2, 0] == 2
        assert labels.dtype == np.int32
