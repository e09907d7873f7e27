"""
Tests for annotated map rendering
"""
import numpy as np
import pytest

from src.config.run_config import RunConfig
from src.gridmap.grid import GridMap, extract_wall_mask
from src.harness.episode import prepare_map
from src.reasoning.rendering import (BOUNDARY_COLOR, LABEL_BACKGROUND, MARKER_COLORS, AnnotatedMap,
                                     crop_box, map_schematic, render_candidate_crop, render_floor_plan,
                                     render_node_map, render_node_overview, render_room_map, room_boundaries)


@pytest.fixture
def prepared(two_room_map):
    return prepare_map(extract_wall_mask(two_room_map), two_room_map.geometry, RunConfig())


class TestSchematic:
    """Test base map colors and boundaries"""

    def test_walls_dark_for_both_polarities(self):
        """Test walls render dark whichever way the map encodes them"""
        high = GridMap.from_array(np.array([[255, 0]], dtype=np.uint8), 0.1)
        low = GridMap.from_array(np.array([[0, 255]], dtype=np.uint8), 0.1, wall_polarity='low')

        assert map_schematic(high)[0, 0].tolist() == [0, 0, 0]
        assert map_schematic(high)[0, 1].tolist() == [255, 255, 255]
        assert map_schematic(low)[0, 0].tolist() == [0, 0, 0]

    def test_room_boundaries(self):
        """Test cells next to a different room are boundary, walls are not"""
        labels = np.array([[1, 1, 2, 2], [1, 0, 0, 2]])

        assert room_boundaries(labels).tolist() == [[False, True, True, False],
                                                    [False, False, False, False]]

    def test_pixel_of_with_offset(self):
        """Test cell centers account for crop offset and scale"""
        canvas = AnnotatedMap(image=None, offset=(2, 3), scale=4)
        assert canvas.pixel_of((2, 3)) == (2.0, 2.0)
        assert canvas.pixel_of((4, 5)) == (10.0, 10.0)

    def test_cell_of_inverts_pixel_of(self):
        """Test any pixel inside a cell's square maps back to that cell"""
        canvas = AnnotatedMap(image=None, offset=(2, 3), scale=4)

        assert canvas.cell_of(canvas.pixel_of((4, 5))) == (4, 5)
        assert canvas.cell_of((8.0, 8.0)) == (4, 5)
        assert canvas.cell_of((11.9, 11.9)) == (4, 5)
        assert canvas.cell_of((0.0, 0.0)) == (2, 3)


class TestRoomMap:
    """Test the annotated floor plan"""

    def test_size_follows_scale(self, two_room_map, prepared):
        """Test the image is the map size times the scale"""
        seg, _ = prepared

        assert render_room_map(two_room_map, seg).image.size == (40, 20)
        assert render_room_map(two_room_map, seg, scale=4).image.size == (160, 80)

    def test_floor_plan_has_no_labels(self, two_room_map, prepared):
        """Test the plain floor plan matches the room map size without any label box"""
        seg, _ = prepared
        plan = render_floor_plan(two_room_map, seg, scale=4)

        assert plan.image.size == (160, 80)
        assert plan.labels == {}

    def test_room_labels_drawn(self, two_room_map, prepared):
        """Test every room id is drawn near its centroid on a black box"""
        seg, _ = prepared
        annotated = render_room_map(two_room_map, seg, scale=4)
        pixels = np.asarray(annotated.image)

        assert set(annotated.labels) == set(seg.room_ids)
        for region in seg.regions:
            x0, y0, x1, y1 = annotated.labels[region.id]
            cx, cy = annotated.pixel_of(region.centroid_cell)
            assert x0 <= cx <= x1 and y0 <= cy <= y1
            assert tuple(pixels[y0, x0]) == LABEL_BACKGROUND

    def test_boundary_is_white(self, two_room_map, prepared):
        """Test the room boundary cells are drawn white"""
        seg, _ = prepared
        boundary = room_boundaries(seg.labels)
        annotated = render_room_map(two_room_map, seg)
        pixels = np.asarray(annotated.image)
        rows, cols = np.nonzero(boundary)

        assert boundary.any()
        labeled = list(annotated.labels.values())
        for row, col in zip(rows, cols):
            if not any(x0 <= col <= x1 and y0 <= row <= y1 for x0, y0, x1, y1 in labeled):
                assert tuple(pixels[row, col]) == BOUNDARY_COLOR


class TestNodeMaps:
    """Test per-room crops and overviews"""

    def test_room_crop(self, two_room_map, prepared):
        """Test both crops share the room box and only room nodes are labeled"""
        seg, nodes = prepared
        region = seg.region(1)
        plain, annotated = render_node_map(two_room_map, region.bbox, nodes.in_region(1), margin=2, scale=2)
        r0, c0, r1, c1 = crop_box(two_room_map, region.bbox, 2)

        assert plain.size == annotated.image.size == ((c1 - c0 + 1) * 2, (r1 - r0 + 1) * 2)
        assert set(annotated.labels) == set(nodes.in_region(1).ids)
        assert annotated.offset == (r0, c0)

    def test_crop_box_clipped(self, two_room_map):
        """Test the crop never leaves the map"""
        assert crop_box(two_room_map, (0, 0, 19, 39), 5) == (0, 0, 19, 39)

    def test_overview_labels_every_node(self, two_room_map, prepared):
        """Test the overview numbers all nodes"""
        seg, nodes = prepared
        assert set(render_node_overview(two_room_map, seg, nodes).labels) == set(nodes.ids)


class TestCandidateCrop:
    """Test discriminator crops"""

    @pytest.mark.parametrize('color', ['blue', 'red'])
    def test_marker_drawn(self, two_room_map, color):
        """Test the crop shows a circle in the requested color"""
        image = render_candidate_crop(two_room_map, (2.0, 2.5), color, margin_m=1.0, scale=4)
        pixels = np.asarray(image).reshape(-1, 3)

        assert image.size == (36, 36)
        assert (pixels == MARKER_COLORS[color]).all(axis=1).any()

    def test_unknown_color(self, two_room_map):
        """Test colors other than blue and red are rejected"""
        with pytest.raises(ValueError):
            render_candidate_crop(two_room_map, (2.0, 2.5), 'green')
