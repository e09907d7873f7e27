"""
Tests for trajectory images and summary tables
"""
from rich.console import Console

from src.harness.render import (END_COLOR, GOAL_COLOR, INSTANCE_COLOR, OBSTACLE_COLOR, START_COLOR,
                                TARGET_COLOR, render_trajectory)
from src.harness.report import summary_table

RECORDS = [{'x': 3.0, 'y': 2.5}, {'x': 4.0, 'y': 2.5}]


class TestRenderTrajectory:
    """Test the trajectory overlay"""

    def test_markers(self, make_scenario):
        """Test start, end, obstacle and object footprints are drawn"""
        scenario = make_scenario(obstacles=[[5.0, 2.0, 5.24, 2.99]])
        image = render_trajectory(scenario, RECORDS, scale=4)

        assert image.size == (160, 80)
        assert image.getpixel((32, 40)) == START_COLOR
        assert image.getpixel((64, 40)) == END_COLOR
        assert image.getpixel((82, 42)) == OBSTACLE_COLOR
        assert image.getpixel((50, 18)) == INSTANCE_COLOR
        assert image.getpixel((130, 42)) == TARGET_COLOR

    def test_global_target_cross(self, make_scenario):
        """Test the global target is marked"""
        image = render_trajectory(make_scenario(), RECORDS, (6.0, 1.0), scale=4)
        around = [image.getpixel((x, y)) for x in range(92, 101) for y in range(12, 21)]

        assert GOAL_COLOR in around

    def test_no_records(self, make_scenario):
        """Test an empty trajectory still draws the start"""
        image = render_trajectory(make_scenario(), [], scale=2)
        assert image.getpixel((16, 20)) == END_COLOR


class TestSummaryTable:
    """Test the console summary"""

    def test_rows(self):
        """Test one row per group with formatted percentages"""
        groups = [('ObjNav', {'episodes': 2, 'SR': 50.0, 'SPL': 41.25, 'excluded': 0}),
                  ('Overall', {'episodes': 2, 'SR': 50.0, 'SPL': 41.25, 'excluded': 1})]
        console = Console(record=True, width=100)
        console.print(summary_table(groups, title='Results (test)'))
        text = console.export_text()

        assert 'Results (test)' in text
        assert 'ObjNav' in text and 'Overall' in text
        assert '41.2' in text
