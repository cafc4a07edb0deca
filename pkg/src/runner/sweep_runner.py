"""Sweep runner that evaluates independent design points, optionally in parallel."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Hashable, List, Sequence, Tuple

from src.circuit.calibration import (
    crossbar_network,
    read_path_network,
    read_voltage,
    resolve_segment_resistance,
    solver_options,
)
from src.circuit.network import ActivationPattern
from src.circuit.solver import path_currents, solve_dc
from src.config.technology import ToolConfig
from src.cost.model import cost_per_bit
from src.endurance.lifetime import endurance_map

logger = logging.getLogger(__name__)


def disparity_point(config: ToolConfig, node: float, n: int) -> Dict[str, Any]:
    """Shortest/longest read-path currents of one crossbar size at unit spike voltage."""
    r_segment = resolve_segment_resistance(config, node)
    network = read_path_network(config, n, r_segment)
    shortest, longest = path_currents(network, config.crossbar.activation, **solver_options(config))
    return {
        'node': float(node),
        'n': n,
        'r_segment': r_segment,
        'i_shortest': shortest,
        'i_longest': longest,
        'disparity_percent': 100.0 * (shortest - longest) / shortest,
    }


def tradeoff_point(config: ToolConfig, node: float, n: int) -> Dict[str, Any]:
    """Cost-per-bit, read-path disparity and all-HRS endurance spread of one crossbar size."""
    point = disparity_point(config, node, n)
    exact, approx = cost_per_bit(n, config.cost_params(node))

    v_spike = config.endurance.spike_voltage or read_voltage(config, node, n)
    network = crossbar_network(config, node, n, 'hrs')
    solve = solve_dc(network, ActivationPattern.all_rows(n, v_spike), **solver_options(config))
    emap = endurance_map(solve, network.cells, config.technology_params(node), config.endurance.pulse_width)

    point.update({
        'exact_cost': exact,
        'approx_cost': approx,
        'v_spike': v_spike,
        'min_cycles': int(emap.cycles.min()),
        'max_cycles': int(emap.cycles.max()),
        'endurance_spread': emap.spread(),
    })
    return point


class SweepRunner:
    """Runs sweep points of one configuration, sequentially or in worker processes."""

    def __init__(self, config: ToolConfig, jobs: int = 1):
        """
        Initialize the sweep runner.

        Args:
            config: Tool configuration shared by every point
            jobs: Maximum number of worker processes
        """
        self.config = config
        self.jobs = max(1, int(jobs))
        self._pinned_config = None

    @property
    def pinned_config(self) -> ToolConfig:
        """Configuration with the reference segment resistance fixed, so workers never refit it."""
        if self._pinned_config is None:
            reference = self.config.technology.reference_node
            r_reference = resolve_segment_resistance(self.config, reference)
            self._pinned_config = self.config.with_overrides(
                technology={'nodes': {str(reference): {'r_segment': r_reference}}}
            )
        return self._pinned_config

    def run(
        self,
        worker: Callable[..., Dict[str, Any]],
        points: Sequence[Tuple[Hashable, ...]],
    ) -> List[Dict[str, Any]]:
        """
        Evaluate ``worker(config, *point)`` for every point.

        Args:
            worker: Module-level function taking the pinned config and the point's arguments
            points: Argument tuples, one per sweep point

        Returns:
            List[Dict[str, Any]]: Results in sorted point order, independent of completion order
        """
        config = self.pinned_config
        ordered = sorted(set(points))
        if self.jobs == 1 or len(ordered) == 1:
            results = [worker(config, *point) for point in ordered]
        else:
            logger.info(f"Running {len(ordered)} sweep points on {min(self.jobs, len(ordered))} workers")
            with ProcessPoolExecutor(max_workers=min(self.jobs, len(ordered))) as ex:
                futures = [ex.submit(worker, config, *point) for point in ordered]
                results = [future.result() for future in futures]
        for point, result in zip(ordered, results):
            logger.debug(f"Sweep point {point}: {result}")
        return results
