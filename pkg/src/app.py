"""
navkit - command line entry point

Map preparation (segment, nodes), global reasoning, single episodes, batches,
trajectory rendering and scenario generation.
"""
import json
import sys
from functools import wraps
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
from dotenv import load_dotenv
from rich.console import Console
from rich.table import Table

from src.config.config import Config
from src.config.run_config import RunConfig
from src.gridmap.grid import MapMeta, extract_wall_mask, load_map_file, save_label_raster
from src.harness.artifacts import RunArtifacts
from src.harness.batch import run_batch
from src.harness.episode import prepare_map, run_episode, select_target
from src.harness.render import render_trajectory
from src.harness.report import summary_table
from src.harness.writer import ResultsWriter
from src.reasoning.rendering import render_node_overview, render_room_map
from src.rooms.segmentation import segment_rooms
from src.simulator.procedural import generate_batch
from src.simulator.scenario import load_scenario
from src.utils.errors import NavKitError
from src.utils.logger import get_logger, setup_logging

# Load environment variables
load_dotenv()

logger = get_logger(__name__)
console = Console()


def _split_models(value: Optional[str]):
    if not value:
        return None
    return [part.strip() for part in value.split(',') if part.strip()]


def build_config(options: Dict[str, Any]) -> RunConfig:
    """RunConfig from --config plus whichever flags were given"""
    overrides = {
        'reasoning.backend': options.get('backend'),
        'reasoning.mode': options.get('mode'),
        'reasoning.ensemble': options.get('ensemble') or None,
        'reasoning.endpoint': options.get('endpoint') or Config.NAVKIT_ENDPOINT,
        'reasoning.model': options.get('model') or Config.NAVKIT_MODEL,
        'reasoning.ensemble_models': _split_models(options.get('ensemble_models')),
        'reasoning.discriminator_model': options.get('discriminator_model'),
        'verify.detector': options.get('detector'),
        'harness.seed': options.get('seed'),
        'harness.jobs': options.get('jobs'),
        'harness.dump_artifacts': options.get('dump_artifacts') or None,
    }
    cfg = RunConfig.from_file(options.get('config'), overrides)
    if cfg.reasoning.backend == 'http' and not Config.api_token(cfg.reasoning.api_token_env):
        logger.warning("No API token configured for the http backend", token_env=cfg.reasoning.api_token_env)
    return cfg


def run_options(func):
    """Flags shared by the commands that run reasoning or episodes"""
    options = [
        click.option('--config', 'config', type=click.Path(exists=True, dir_okay=False),
                     help='JSON run configuration'),
        click.option('--backend', type=click.Choice(['oracle', 'adversarial', 'http']),
                     help='Reasoning backend'),
        click.option('--mode', type=click.Choice(['hierarchical', 'single_stage', 'direct']),
                     help='Global reasoning mode'),
        click.option('--ensemble', is_flag=True, default=False, help='Two reasoning units plus a discriminator'),
        click.option('--endpoint', help='Chat completions URL (http backend)'),
        click.option('--model', help='Model name (http backend)'),
        click.option('--ensemble-models', help='Comma-separated model names for the two units'),
        click.option('--discriminator-model', help='Model name for the discriminator'),
        click.option('--detector', type=click.Choice(['oracle']), help='Object detector'),
        click.option('--seed', type=int, help='Random seed'),
        click.option('--dump-artifacts', is_flag=True, default=False,
                     help='Write maps, node sets and renders per episode'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def handle_errors(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NavKitError as e:
            logger.error("Command failed", error=str(e), tag=e.tag)
            console.print(f"[red]Error ({e.tag}): {e}[/red]")
            sys.exit(1)
    return wrapper


def _load_map_inputs(scenario_path: Optional[str], map_path: Optional[str], resolution: Optional[float],
                     origin: Tuple[float, float], wall_polarity: str, wall_threshold: int):
    """(map, wall mask, scenario or None) from --scenario or --map"""
    if scenario_path:
        scenario = load_scenario(scenario_path, wall_threshold)
        return scenario.map, scenario.agent_wall_mask(), scenario
    if not map_path or resolution is None:
        raise click.UsageError('Give --scenario, or --map together with --resolution')
    grid_map = load_map_file(map_path, MapMeta(resolution, tuple(origin), wall_polarity))
    return grid_map, extract_wall_mask(grid_map, wall_threshold), None


def map_options(func):
    options = [
        click.option('--scenario', 'scenario_path', type=click.Path(exists=True, dir_okay=False),
                     help='Scenario JSON (map and metadata taken from it)'),
        click.option('--map', 'map_path', type=click.Path(exists=True, dir_okay=False),
                     help='Map raster (PGM/PNG)'),
        click.option('--resolution', type=float, help='Meters per cell (with --map)'),
        click.option('--origin', type=float, nargs=2, default=(0.0, 0.0), help='World x y of the map corner'),
        click.option('--wall-polarity', type=click.Choice(['high', 'low']), default='high'),
        click.option('--config', 'config', type=click.Path(exists=True, dir_okay=False),
                     help='JSON run configuration'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option('--log-level', default=None, help='DEBUG, INFO, WARNING, ERROR')
@click.option('--log-file', default=None, type=click.Path(dir_okay=False), help='Also log to this file')
@click.option('--console-logs', is_flag=True, default=False, help='Human-readable log lines instead of JSON')
def cli(log_level, log_file, console_logs):
    """navkit - map reasoning object-goal navigation"""
    setup_logging(log_level or Config.LOG_LEVEL, log_file or Config.LOG_FILE,
                  json_logs=Config.LOG_JSON and not console_logs)


@cli.command()
@map_options
@click.option('--out', type=click.Path(file_okay=False), required=True, help='Output directory')
@handle_errors
def segment(scenario_path, map_path, resolution, origin, wall_polarity, config, out):
    """Split a map into rooms and write the label raster, metadata and render"""
    cfg = RunConfig.from_file(config)
    grid_map, walls, _ = _load_map_inputs(scenario_path, map_path, resolution, origin, wall_polarity,
                                          cfg.map.wall_threshold)
    seg = segment_rooms(walls, grid_map.geometry, cfg.rooms)

    out = Path(out)
    save_label_raster(seg.labels, out / 'rooms.pgm')
    (out / 'rooms.json').write_text(json.dumps(seg.to_dict(), indent=2), encoding='utf-8')
    render_room_map(grid_map, seg, cfg.reasoning.render_scale).image.save(out / 'room_map.png')

    table = Table(title=f"{seg.count} rooms", show_header=True, header_style="bold magenta")
    table.add_column("Room", style="cyan", justify="right")
    table.add_column("Area (m²)", justify="right")
    table.add_column("Centroid (x, y)")
    cell_area = grid_map.resolution ** 2
    for region in seg.regions:
        table.add_row(str(region.id), f"{region.area * cell_area:.2f}",
                      f"({region.centroid.x:.2f}, {region.centroid.y:.2f})")
    console.print(table)


@cli.command()
@map_options
@click.option('--seed', type=int, default=None, help='Random seed')
@click.option('--out', type=click.Path(file_okay=False), required=True, help='Output directory')
@handle_errors
def nodes(scenario_path, map_path, resolution, origin, wall_polarity, config, seed, out):
    """Sample navigation nodes and write them with a render"""
    cfg = RunConfig.from_file(config, {'harness.seed': seed})
    grid_map, walls, _ = _load_map_inputs(scenario_path, map_path, resolution, origin, wall_polarity,
                                          cfg.map.wall_threshold)
    seg, node_set = prepare_map(walls, grid_map.geometry, cfg)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / 'nodes.json').write_text(json.dumps(node_set.to_dict(), indent=2), encoding='utf-8')
    render_node_overview(grid_map, seg, node_set, cfg.reasoning.render_scale).image.save(out / 'node_map.png')
    console.print(f"[green]✓[/green] {len(node_set)} nodes over {seg.count} rooms written to [cyan]{out}[/cyan]")


@cli.command('reason')
@click.option('--scenario', 'scenario_path', type=click.Path(exists=True, dir_okay=False), required=True)
@run_options
@handle_errors
def reason_command(scenario_path, **options):
    """Pick the global target for a scenario without moving"""
    cfg = build_config(options)
    scenario = load_scenario(scenario_path, cfg.map.wall_threshold)
    seg, node_set = prepare_map(scenario.agent_wall_mask(), scenario.geometry, cfg)
    target = select_target(scenario, cfg, seg, node_set)
    console.print_json(json.dumps(target.to_dict()))


@cli.command()
@click.option('--scenario', 'scenario_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(file_okay=False), default=None, help='Run directory')
@run_options
@handle_errors
def run(scenario_path, out, **options):
    """Run one episode"""
    cfg = build_config(options)
    scenario = load_scenario(scenario_path, cfg.map.wall_threshold)
    artifacts = RunArtifacts(out) if out else None
    if artifacts is not None:
        artifacts.write_config(cfg)
    result = run_episode(scenario, cfg, artifacts)
    if artifacts is not None:
        ResultsWriter(artifacts.base_path).write_results([result])
    console.print_json(json.dumps(result.to_dict()))
    if result.error:
        sys.exit(2)


@cli.command()
@click.option('--scenarios-dir', type=click.Path(exists=True, file_okay=False), required=True)
@click.option('--out', type=click.Path(file_okay=False), default=None, help='Run directory')
@click.option('--jobs', type=int, default=None, help='Worker processes')
@run_options
@handle_errors
def batch(scenarios_dir, out, jobs, **options):
    """Run every scenario of a directory and print SR/SPL per goal kind"""
    options['jobs'] = jobs
    cfg = build_config(options)
    out = out or str(Path(Config.NAVKIT_OUTPUT_DIR) / Path(scenarios_dir).name)
    summary = run_batch(scenarios_dir, cfg, out_dir=out)
    console.print(summary_table(summary.groups, title=f"Results ({Path(scenarios_dir).name})"))
    errors = [result for result in summary.results if result.error]
    if errors:
        console.print(f"[yellow]{len(errors)} episode(s) ended with an error, see {out}/results.jsonl[/yellow]")


@cli.command()
@click.option('--scenario', 'scenario_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(exists=True, file_okay=False), required=True,
              help='Run directory holding the trajectory')
@click.option('--image', type=click.Path(dir_okay=False), default=None, help='Output PNG')
@click.option('--scale', type=int, default=4, help='Pixels per cell')
@handle_errors
def render(scenario_path, out, image, scale):
    """Draw an episode's trajectory over its map"""
    scenario = load_scenario(scenario_path)
    artifacts = RunArtifacts(out)
    records = artifacts.read_trajectory(scenario.id)
    if not records:
        raise click.ClickException(f"No trajectory for {scenario.id} in {out}")
    target = None
    for result in ResultsWriter(out).read_results():
        if result.get('scenario_id') == scenario.id and result.get('target'):
            target = (result['target']['x'], result['target']['y'])
    image = Path(image) if image else artifacts.episode_dir(scenario.id) / 'trajectory.png'
    render_trajectory(scenario, records, target, scale).save(image)
    console.print(f"[green]✓[/green] Trajectory written to [cyan]{image}[/cyan]")


@cli.command()
@click.option('--count', type=int, default=20, help='Number of scenarios')
@click.option('--seed', type=int, default=0, help='First seed')
@click.option('--max-steps', type=int, default=500)
@click.option('--out', type=click.Path(file_okay=False), required=True, help='Output directory')
def generate(count, seed, max_steps, out):
    """Write procedurally generated scenarios"""
    paths = generate_batch(count, out, first_seed=seed, max_steps=max_steps)
    console.print(f"[green]✓[/green] {len(paths)} scenarios written to [cyan]{out}[/cyan]")


if __name__ == '__main__':
    cli()
