"""
Tests for room segmentation
"""
import numpy as np
import pytest

from src.config.run_config import RoomSettings
from src.gridmap.grid import GridMap, extract_wall_mask
from src.rooms.segmentation import RoomSegmentation, merge_small_rooms, segment_rooms, watershed
from src.utils.errors import NoMarkers, NoWalkableSpace, UnknownRoom
from tests.conftest import two_room_values


@pytest.fixture
def two_rooms(two_room_map):
    return segment_rooms(extract_wall_mask(two_room_map), two_room_map.geometry)


class TestSegmentRooms:
    """Test the full segmentation pipeline"""

    def test_two_rooms_found(self, two_rooms):
        """Test a doorway splits the plan into two rooms"""
        assert two_rooms.count == 2
        assert two_rooms.room_ids == [1, 2]
        west = two_rooms.labels[10, 5]
        east = two_rooms.labels[10, 35]
        assert west and east and west != east

    def test_every_walkable_cell_labeled(self, two_room_map, two_rooms):
        """Test walkable cells get a room and walls stay 0"""
        walls = extract_wall_mask(two_room_map)

        assert (two_rooms.labels[~walls] > 0).all()
        assert (two_rooms.labels[walls] == 0).all()

    @pytest.mark.parametrize('settings', [RoomSettings(), RoomSettings(distance_threshold_m=1.0)],
                             ids=['otsu', 'constant'])
    def test_three_rooms(self, three_room_map, settings):
        """Test a hall and two side rooms come out as three rooms with either seed threshold"""
        walls = extract_wall_mask(three_room_map)
        seg = segment_rooms(walls, three_room_map.geometry, settings)

        assert seg.count == 3
        assert len({seg.labels[20, 10], seg.labels[10, 45], seg.labels[30, 45]}) == 3

    def test_closet_absorbed(self):
        """Test a closet below the minimum room area does not become a room"""
        values = two_room_values()
        values[4, 1:5] = 255
        values[1:5, 4] = 255
        values[4, 2] = 0
        grid_map = GridMap.from_array(values, resolution=0.25)
        seg = segment_rooms(extract_wall_mask(grid_map), grid_map.geometry, RoomSettings())

        assert seg.count == 2
        assert seg.labels[2, 2] == seg.labels[10, 5]

    def test_single_room(self, one_room_map):
        """Test an undivided plan is one room"""
        seg = segment_rooms(extract_wall_mask(one_room_map), one_room_map.geometry)
        assert seg.count == 1

    def test_all_wall(self, one_room_map):
        """Test a plan without walkable cells raises NoWalkableSpace"""
        walls = np.ones(one_room_map.geometry.shape, dtype=bool)
        with pytest.raises(NoWalkableSpace):
            segment_rooms(walls, one_room_map.geometry)

    def test_deterministic(self, two_room_map):
        """Test repeated runs give identical labels"""
        walls = extract_wall_mask(two_room_map)
        a = segment_rooms(walls, two_room_map.geometry)
        b = segment_rooms(walls, two_room_map.geometry)

        assert np.array_equal(a.labels, b.labels)


class TestRoomSegmentation:
    """Test region metadata and lookups"""

    def test_region_metadata(self, two_rooms):
        """Test centroids fall in their own room and areas sum to the walkable area"""
        for region in two_rooms.regions:
            assert two_rooms.label_at(region.centroid) == region.id
            r0, c0, r1, c1 = region.bbox
            assert r0 <= region.centroid_cell[0] <= r1
            assert c0 <= region.centroid_cell[1] <= c1
        assert sum(r.area for r in two_rooms.regions) == int((two_rooms.labels > 0).sum())

    def test_unknown_room(self, two_rooms):
        """Test looking up a missing room raises UnknownRoom"""
        with pytest.raises(UnknownRoom):
            two_rooms.region(7)
        with pytest.raises(UnknownRoom):
            two_rooms.room_mask(0)

    def test_largest_region_prefers_lower_id(self, two_room_map):
        """Test ties on area go to the lower id"""
        labels = np.zeros(two_room_map.geometry.shape, dtype=np.int32)
        labels[1:3, 1:3] = 2
        labels[5:7, 5:7] = 1
        seg = RoomSegmentation.from_labels(labels, two_room_map.geometry)

        assert seg.largest_region().id == 1

    def test_nearest_label_off_the_rooms(self, two_rooms):
        """Test a point on a wall resolves to the closest room"""
        assert two_rooms.label_at((0.1, 2.5)) == 0
        assert two_rooms.nearest_label((0.1, 2.5)) == two_rooms.labels[10, 5]
        assert two_rooms.label_at((-5.0, 0.0)) == 0

    def test_to_dict(self, two_rooms):
        """Test the serialized form carries geometry and regions"""
        data = two_rooms.to_dict()

        assert data['resolution'] == 0.25
        assert data['width'] == 40
        assert [r['id'] for r in data['regions']] == [1, 2]

    def test_labels_read_only(self, two_rooms):
        """Test the label grid cannot be modified"""
        with pytest.raises(ValueError):
            two_rooms.labels[0, 0] = 3


class TestWatershed:
    """Test priority-flood watershed"""

    def test_ties_go_to_lower_label(self):
        """Test a flat corridor splits toward the lower label"""
        markers = np.array([[1, 0, 0, 0, 2]])
        out = watershed(np.zeros((1, 5)), markers, np.ones((1, 5), dtype=bool))

        assert out.tolist() == [[1, 1, 1, 2, 2]]

    def test_domain_limits_flooding(self):
        """Test cells outside the domain stay 0"""
        domain = np.array([[True, True, False, True]])
        out = watershed(np.zeros((1, 4)), np.array([[1, 0, 0, 0]]), domain)

        assert out.tolist() == [[1, 1, 0, 0]]

    def test_needs_marker(self):
        """Test no marker inside the domain raises NoMarkers"""
        with pytest.raises(NoMarkers):
            watershed(np.zeros((2, 2)), np.zeros((2, 2), dtype=np.int32), np.ones((2, 2), dtype=bool))


class TestMergeSmallRooms:
    """Test folding undersized fragments"""

    def test_small_region_merged_into_neighbour(self):
        """Test a fragment below min area joins its neighbour"""
        labels = np.array([[1, 1, 1, 2], [1, 1, 1, 2]])
        assert merge_small_rooms(labels, 3).tolist() == [[1, 1, 1, 1], [1, 1, 1, 1]]

    def test_isolated_region_kept(self):
        """Test a fragment without neighbours stays and labels are compacted"""
        labels = np.array([[3, 0, 5]])
        assert merge_small_rooms(labels, 2).tolist() == [[1, 0, 2]]

    def test_prefers_longer_shared_boundary(self):
        """Test the neighbour with more shared boundary wins"""
        labels = np.array([
            [1, 1, 1, 1],
            [1, 1, 1, 1],
            [2, 2, 3, 3],
            [0, 0, 3, 3],
        ])
        out = merge_small_rooms(labels, 3)

        assert out[2, 0] == out[2, 1] == out[0, 0]
        assert out[2, 2] != out[0, 0]
