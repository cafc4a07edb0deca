"""Commands producing crossbar current, endurance and disparity data."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.circuit.calibration import read_voltage
from src.circuit.network import ResistanceState
from src.config.technology import ToolConfig
from src.runner.sweep_runner import SweepRunner, disparity_point
from src.tasks.common import compute_endurance, finish_run, solve_crossbar, spike_voltage
from src.utils.helpers import save_json, save_matrix_csv, save_table_csv

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _cell(index) -> List[int]:
    return [int(i) for i in index]


def cmd_current_map(config: ToolConfig, config_path: PathLike, out_dir: PathLike, n: int, node: float,
                    v_spike: Optional[float] = None, state: Optional[str] = None) -> List[Path]:
    """
    Per-cell current of an N x N crossbar with every wordline spiking.

    Args:
        config: Tool configuration
        config_path: Path the configuration was loaded from
        out_dir: Output directory
        n: Crossbar dimension
        node: Technology node in nm
        v_spike: Spike voltage; defaults to the calibrated read voltage
        state: Programmed state of every cell; defaults to the configured state

    Returns:
        List[Path]: Written files
    """
    out_dir = Path(out_dir)
    state = ResistanceState.parse(state or config.cells.default_state)
    v = v_spike if v_spike is not None else read_voltage(config, node, n)
    network, result = solve_crossbar(config, node, n, v, state)

    written = [save_matrix_csv(result.cell_current, out_dir / 'current_map.csv')]
    written.append(save_json({
        'n': n,
        'node': float(node),
        'state': state.value,
        'v_spike': v,
        'r_segment': network.geometry.r_wordline_segment,
        'residual': result.residual,
        'method': result.method,
        'iterations': result.iterations,
        'total_current': float(result.bitline_current.sum()),
        'min_current_cell': _cell(np.unravel_index(np.argmin(result.cell_current), (n, n))),
        'max_current_cell': _cell(np.unravel_index(np.argmax(result.cell_current), (n, n))),
        'parameter_hash': config.parameter_hash(),
    }, out_dir / 'current_map.json'))
    written.append(finish_run(
        f"current-map n={n} node={float(node):g} state={state.value} v_spike={v!r}",
        config, config_path, out_dir,
    ))
    return written


def cmd_endurance_map(config: ToolConfig, config_path: PathLike, out_dir: PathLike, n: int, node: float,
                      state: str = 'hrs', pulse_width: Optional[float] = None,
                      v_spike: Optional[float] = None) -> List[Path]:
    """Read endurance of every cell of a uniformly programmed crossbar."""
    out_dir = Path(out_dir)
    state = ResistanceState.parse(state)
    pulse_width = pulse_width if pulse_width is not None else config.endurance.pulse_width
    v = spike_voltage(config, node, n, v_spike)
    _, result, emap = compute_endurance(config, node, n, state, pulse_width, v)

    written = [save_matrix_csv(emap.cycles, out_dir / 'endurance_map.csv')]
    written.append(save_json({
        'n': n,
        'node': float(node),
        'state': state.value,
        'pulse_width': pulse_width,
        'v_spike': v,
        'residual': result.residual,
        'min_cycles': int(emap.cycles.min()),
        'max_cycles': int(emap.cycles.max()),
        'min_cell': _cell(np.unravel_index(np.argmin(emap.cycles), (n, n))),
        'max_cell': _cell(np.unravel_index(np.argmax(emap.cycles), (n, n))),
        'spread': emap.spread(),
        'parameter_hash': config.parameter_hash(),
    }, out_dir / 'endurance_map.json'))
    written.append(finish_run(
        f"endurance-map n={n} node={float(node):g} state={state.value} "
        f"pulse_width={pulse_width!r} v_spike={v!r}",
        config, config_path, out_dir,
    ))
    return written


def cmd_disparity_sweep(config: ToolConfig, config_path: PathLike, out_dir: PathLike,
                        sizes: Sequence[int] = (32, 64, 128, 256), nodes: Optional[Sequence[float]] = None,
                        jobs: int = 1) -> List[Path]:
    """
    Shortest- versus longest-path current disparity over crossbar sizes.

    Writes one JSON per sweep point and a summary CSV sorted by (node, size).
    """
    out_dir = Path(out_dir)
    nodes = [float(x) for x in (nodes or [config.technology.reference_node])]
    for node in nodes:
        config.node_profile(node)

    runner = SweepRunner(config, jobs=jobs)
    results = runner.run(disparity_point, [(node, int(n)) for node in nodes for n in sizes])

    written = [
        save_json(point, out_dir / f"disparity_{point['node']:g}nm_n{point['n']}.json")
        for point in results
    ]
    summary = pd.DataFrame(results, columns=['node', 'n', 'r_segment', 'i_shortest', 'i_longest',
                                             'disparity_percent'])
    written.append(save_table_csv(summary, out_dir / 'disparity_sweep.csv'))
    written.append(finish_run(
        f"disparity-sweep sizes={sorted(set(int(n) for n in sizes))} nodes={sorted(set(nodes))}",
        config, config_path, out_dir,
    ))
    for point in results:
        logger.info(f"{point['n']}x{point['n']} at {point['node']:g} nm: {point['disparity_percent']:.2f}% disparity")
    return written
