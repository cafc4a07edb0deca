"""Read-disturb kinetics, endurance maps and inference lifetime."""

from src.endurance.disturb import (
    TechnologyParams,
    gap_rate,
    hrs_disturb_times,
    time_to_disturb_hrs,
    time_to_disturb_lrs,
)
from src.endurance.lifetime import (
    UNBOUNDED_CYCLES,
    EnduranceMap,
    endurance_cycles,
    endurance_map,
    inference_lifetime,
)

__all__ = [
    'TechnologyParams',
    'gap_rate',
    'hrs_disturb_times',
    'time_to_disturb_hrs',
    'time_to_disturb_lrs',
    'UNBOUNDED_CYCLES',
    'EnduranceMap',
    'endurance_cycles',
    'endurance_map',
    'inference_lifetime',
]
