"""
Builds crossbars from a ToolConfig and resolves the per-node parasitics.

The reference node's segment resistance, when not given explicitly, is
fitted so the read-path disparity of the calibration crossbar hits the
configured target. Other nodes scale it with 1/F.
"""

import logging
from typing import Dict, Optional, Union

from src.circuit.network import (
    CellStateMatrix,
    CrossbarGeometry,
    CrossbarNetwork,
    ResistanceState,
    StateResistances,
    build_network,
)
from src.circuit.solver import calibrate_spike_voltage, fit_segment_resistance
from src.config.technology import ToolConfig

logger = logging.getLogger(__name__)

Node = Union[int, float, str]

# parameter hash -> fitted reference-node segment resistance
_FIT_CACHE: Dict[str, float] = {}


def state_resistances(config: ToolConfig) -> StateResistances:
    cells = config.cells
    return StateResistances(hrs=cells.hrs, lrs1=cells.lrs1, lrs2=cells.lrs2, lrs3=cells.lrs3)


def solver_options(config: ToolConfig) -> dict:
    xbar = config.crossbar
    return {
        'tol': xbar.tol,
        'method': xbar.solver,
        'direct_max_n': xbar.direct_max_n,
        'max_iter': xbar.max_iter,
    }


def geometry(config: ToolConfig, n: int, r_segment: float) -> CrossbarGeometry:
    return CrossbarGeometry(
        n=n,
        r_wordline_segment=r_segment,
        r_bitline_segment=r_segment,
        r_driver=config.crossbar.r_driver,
        sense_mode=config.crossbar.sense_mode,
    )


def uniform_cells(config: ToolConfig, n: int, state: Optional[Union[ResistanceState, str]] = None) -> CellStateMatrix:
    return CellStateMatrix.uniform(
        n,
        state or config.cells.default_state,
        resistances=state_resistances(config),
        r_access=config.cells.r_access,
    )


def read_path_network(config: ToolConfig, n: int, r_segment: float) -> CrossbarNetwork:
    """Crossbar with only the shortest- and longest-path cells selected, in the read-path state."""
    cells = CellStateMatrix.read_path_cells(
        n,
        config.calibration.read_path_state,
        resistances=state_resistances(config),
        r_access=config.cells.r_access,
    )
    return build_network(geometry(config, n, r_segment), cells)


def _fitted_reference_resistance(config: ToolConfig) -> float:
    key = config.parameter_hash()
    if key not in _FIT_CACHE:
        n = config.calibration.size
        _FIT_CACHE[key] = fit_segment_resistance(
            lambda r: read_path_network(config, n, r),
            config.calibration.target_disparity,
            activation=config.crossbar.activation,
        )
    return _FIT_CACHE[key]


def resolve_segment_resistance(config: ToolConfig, node: Node) -> float:
    """
    Per-segment wordline/bitline resistance of a technology node.

    Args:
        config: Tool configuration
        node: Technology node in nm

    Returns:
        float: Resistance in ohms
    """
    profile = config.node_profile(node)
    if profile.r_segment is not None:
        return profile.r_segment

    reference = config.node_profile(config.technology.reference_node)
    r_reference = reference.r_segment
    if r_reference is None:
        r_reference = _fitted_reference_resistance(config)
    r_segment = r_reference * reference.feature_size / profile.feature_size
    logger.debug(f"Segment resistance at {profile.feature_size:g} nm: {r_segment:.6g} ohm")
    return r_segment


def read_voltage(config: ToolConfig, node: Node, n: int) -> float:
    """Spike voltage that drives the configured read current through the longest-path read cell."""
    network = read_path_network(config, n, resolve_segment_resistance(config, node))
    return calibrate_spike_voltage(
        network,
        config.crossbar.read_current,
        (0, n - 1),
        **solver_options(config),
    )


def crossbar_network(config: ToolConfig, node: Node, n: int,
                     state: Optional[Union[ResistanceState, str]] = None) -> CrossbarNetwork:
    """Fully selected crossbar with every cell in ``state`` (the configured default when None)."""
    r_segment = resolve_segment_resistance(config, node)
    return build_network(geometry(config, n, r_segment), uniform_cells(config, n, state))


def clear_cache() -> None:
    _FIT_CACHE.clear()
