"""Shared pieces of the command bodies."""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

from src import __version__
from src.circuit.calibration import crossbar_network, read_voltage, solver_options
from src.circuit.network import ActivationPattern, CrossbarNetwork, ResistanceState
from src.circuit.solver import SolveResult, solve_dc
from src.config.technology import ToolConfig
from src.endurance.lifetime import EnduranceMap, endurance_map
from src.utils.helpers import RunManifest, write_manifest

logger = logging.getLogger(__name__)


def spike_voltage(config: ToolConfig, node: float, n: int, override: Optional[float] = None) -> float:
    """Stress voltage of endurance runs: the override, the configured value, or the calibrated read voltage."""
    if override is not None:
        return override
    if config.endurance.spike_voltage is not None:
        return config.endurance.spike_voltage
    return read_voltage(config, node, n)


def solve_crossbar(config: ToolConfig, node: float, n: int, v_spike: float,
                   state: Optional[Union[ResistanceState, str]] = None) -> Tuple[CrossbarNetwork, SolveResult]:
    network = crossbar_network(config, node, n, state)
    result = solve_dc(network, ActivationPattern.all_rows(n, v_spike), **solver_options(config))
    return network, result


def compute_endurance(config: ToolConfig, node: float, n: int, state: Union[ResistanceState, str],
                      pulse_width: float, v_spike: float) -> Tuple[CrossbarNetwork, SolveResult, EnduranceMap]:
    """
    Endurance map of a uniformly programmed crossbar with every row spiking.

    Returns:
        tuple: (network, solve result, endurance map)
    """
    network, result = solve_crossbar(config, node, n, v_spike, state)
    emap = endurance_map(result, network.cells, config.technology_params(node), pulse_width)
    return network, result, emap


def finish_run(command: str, config: ToolConfig, config_path: Union[str, Path], out_dir: Union[str, Path],
               seed: Optional[int] = None) -> Path:
    """Write the run manifest; called after every other output of the command exists."""
    manifest = RunManifest(
        command=command,
        config_path=str(config_path),
        output_dir=str(out_dir),
        seed=seed,
        tool_version=__version__,
        parameter_hash=config.parameter_hash(),
    )
    return write_manifest(manifest, out_dir)
