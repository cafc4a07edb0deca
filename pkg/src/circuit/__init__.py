"""Parasitic crossbar model and its DC solver."""

from src.circuit.network import (
    ActivationPattern,
    CellStateMatrix,
    CrossbarGeometry,
    CrossbarNetwork,
    ResistanceState,
    StateResistances,
    build_network,
)
from src.circuit.solver import (
    SolveResult,
    calibrate_spike_voltage,
    current_disparity,
    fit_segment_resistance,
    solve_dc,
)

__all__ = [
    'ActivationPattern',
    'CellStateMatrix',
    'CrossbarGeometry',
    'CrossbarNetwork',
    'ResistanceState',
    'StateResistances',
    'SolveResult',
    'build_network',
    'calibrate_spike_voltage',
    'current_disparity',
    'fit_segment_resistance',
    'solve_dc',
]
