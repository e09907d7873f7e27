"""
Tests for the grid-world simulator and its sensors
"""
import math

import pytest

from src.config.run_config import RunConfig
from src.localnav.types import DiscreteAction
from src.simulator.sensors import ray_bearings
from src.simulator.scenario import parse_scenario
from src.simulator.sim import GridWorldSim
from src.utils.errors import EpisodeOver
from tests.conftest import scenario_document


@pytest.fixture
def sim(make_scenario):
    return GridWorldSim(make_scenario())


class TestActions:
    """Test discrete action execution"""

    def test_forward_moves_one_step(self, sim):
        """Test a free forward move advances by the step size"""
        pose, _, steps = sim.step(DiscreteAction.MOVE_FORWARD)

        assert pose.position == pytest.approx((2.25, 2.5))
        assert steps == 1
        assert sim.executed_length == pytest.approx(0.25)

    def test_turns_are_thirty_degrees(self, sim):
        """Test left turns are counter-clockwise and a full turn restores the heading"""
        pose, _, _ = sim.step(DiscreteAction.TURN_LEFT)
        assert math.degrees(pose.heading) == pytest.approx(30.0)

        for _ in range(11):
            pose, _, _ = sim.step(DiscreteAction.TURN_LEFT)
        assert pose.heading == sim.scenario.start.heading

        pose, _, _ = sim.step('turn_right')
        assert math.degrees(pose.heading) == pytest.approx(-30.0)

    def test_collision_keeps_pose(self, make_scenario):
        """Test a forward move into a wall costs a step but does not move"""
        sim = GridWorldSim(make_scenario(start={'x': 0.4, 'y': 2.5, 'heading_deg': 180.0}))
        pose, _, steps = sim.step(DiscreteAction.MOVE_FORWARD)

        assert pose.position == pytest.approx((0.4, 2.5))
        assert steps == 1
        assert sim.collisions == 1
        assert sim.executed_length == 0.0
        assert sim.log[-1]['moved'] is False

    def test_stop_ends_episode(self, sim):
        """Test stop ends the episode and later actions raise"""
        sim.step(DiscreteAction.STOP)

        assert sim.done and sim.stopped
        with pytest.raises(EpisodeOver):
            sim.step(DiscreteAction.TURN_LEFT)

    def test_budget_ends_episode(self, make_scenario):
        """Test the episode ends when the step budget is used"""
        sim = GridWorldSim(make_scenario(max_steps=3))
        for _ in range(3):
            sim.step(DiscreteAction.TURN_LEFT)

        assert sim.done
        assert not sim.stopped
        assert not sim.check_success()

    def test_budget_and_radius_from_config(self, scenario_dir):
        """Test documents without a budget or radius take them from the run config"""
        document = scenario_document('map.png')
        del document['max_steps']
        del document['success_radius']
        cfg = RunConfig.from_file(None, {'sim.max_steps': 42, 'sim.success_radius_m': 0.5})
        sim = GridWorldSim(parse_scenario(document, scenario_dir), cfg)

        assert sim.max_steps == 42
        assert sim.success_radius == 0.5

    def test_log_records_tags(self, sim):
        """Test step records carry pose, action and caller tags"""
        sim.step(DiscreteAction.MOVE_FORWARD, phase='navigate', replanned=True)
        record = sim.log[-1]

        assert record['step'] == 1
        assert record['action'] == 'move_forward'
        assert record['x'] == pytest.approx(2.25)
        assert record['phase'] == 'navigate'
        assert record['replanned'] is True


class TestScoring:
    """Test target distances, oracle path length and success"""

    def test_distance_to_target(self, sim):
        """Test Euclidean distance to the nearest target"""
        assert sim.distance_to_target() == pytest.approx(6.0)

    def test_optimal_length_through_door(self, sim):
        """Test the oracle path runs straight through the doorway"""
        assert sim.optimal_length() == pytest.approx(5.0)

    def test_unreachable_target(self, make_scenario):
        """Test an obstacle sealing the door makes the target unreachable"""
        sim = GridWorldSim(make_scenario(obstacles=[[5.0, 2.0, 5.24, 2.99]]))
        assert math.isinf(sim.optimal_length())

    def test_geodesic_distance_shrinks_with_radius(self, sim):
        """Test a wider goal radius never lengthens the geodesic path"""
        near = sim.geodesic_distance((2.0, 2.5), 1.0)
        wide = sim.geodesic_distance((2.0, 2.5), 2.0)

        assert 0.0 < wide <= near < math.inf

    def test_geodesic_distance_from_wall(self, sim):
        """Test a start inside a wall is unreachable"""
        assert math.isinf(sim.geodesic_distance((0.1, 2.5), 1.0))

    def test_success_when_stopped_near_target(self, make_scenario):
        """Test stopping within the success radius succeeds"""
        sim = GridWorldSim(make_scenario(start={'x': 7.5, 'y': 2.5, 'heading_deg': 0.0}))
        sim.step(DiscreteAction.STOP)

        assert sim.check_success()

    def test_no_success_when_far(self, sim):
        """Test stopping far from the target fails"""
        sim.step(DiscreteAction.STOP)
        assert not sim.check_success()

    def test_geodesic_success_metric(self, make_scenario):
        """Test the geodesic metric also accepts a nearby stop"""
        cfg = RunConfig.from_file(None, {'sim.success_metric': 'geodesic'})
        sim = GridWorldSim(make_scenario(start={'x': 7.5, 'y': 2.5, 'heading_deg': 0.0}), cfg)
        sim.step(DiscreteAction.STOP)

        assert sim.check_success()


class TestSensors:
    """Test rendered depth scans and camera frames"""

    def test_bearings_cover_fov(self):
        """Test rays span the field of view edge to edge"""
        bearings = ray_bearings(math.pi / 2, 5)

        assert bearings[0] == pytest.approx(-math.pi / 4)
        assert bearings[-1] == pytest.approx(math.pi / 4)
        assert ray_bearings(math.pi / 2, 1).tolist() == [0.0]

    def test_depth_center_ray_hits_wall(self, make_scenario):
        """Test the forward ray measures the distance to the wall ahead"""
        sim = GridWorldSim(make_scenario(start={'x': 2.0, 'y': 1.0, 'heading_deg': 0.0}))
        scan = sim.observe()
        middle = len(scan) // 2

        assert len(scan) == 128
        assert scan.hits[middle]
        assert scan.ranges[middle] == pytest.approx(3.0, abs=0.01)

    def test_frame_shows_target(self, make_scenario):
        """Test the camera sees the bed in front of the agent"""
        sim = GridWorldSim(make_scenario(start={'x': 6.5, 'y': 2.5, 'heading_deg': 0.0}))
        frame = sim.frame()
        mask = frame.instance_mask(0)

        assert mask.any()
        assert frame.depth[mask].min() > 0.0
        assert frame.depth[mask].max() <= 1.5 + 1e-6
