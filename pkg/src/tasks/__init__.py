"""Command bodies of the command-line interface."""

from src.tasks.circuit_tasks import cmd_current_map, cmd_disparity_sweep, cmd_endurance_map
from src.tasks.design_tasks import cmd_cost_sweep, cmd_generate_workload, cmd_optimize, cmd_tradeoff

__all__ = [
    'cmd_current_map',
    'cmd_disparity_sweep',
    'cmd_endurance_map',
    'cmd_cost_sweep',
    'cmd_generate_workload',
    'cmd_optimize',
    'cmd_tradeoff',
]
