"""Read endurance of a crossbar and the inference lifetime it allows."""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from src.circuit.network import CellStateMatrix
from src.circuit.solver import SolveResult
from src.endurance.disturb import TechnologyParams, hrs_disturb_times, lrs_disturb_times
from src.errors import DomainError

logger = logging.getLogger(__name__)

# cycle count of a cell that is never disturbed within the horizon
UNBOUNDED_CYCLES = int(np.iinfo(np.int64).max)

# floor() guard against quotients like 0.999999999 that are exactly 1 in decimal
_FLOOR_EPS = 1e-12

Lifetime = Union[int, float]


def endurance_cycles(t_disturb: float, pulse_width: float) -> int:
    """
    Number of whole read pulses a cell survives.

    Args:
        t_disturb: Time to disturb in seconds, may be ``inf``
        pulse_width: Spike pulse width in seconds

    Returns:
        int: floor(t_disturb / pulse_width), or UNBOUNDED_CYCLES
    """
    if not pulse_width > 0:
        raise DomainError(f"pulse width must be positive, got {pulse_width}")
    if t_disturb < 0:
        raise DomainError(f"time to disturb must be non-negative, got {t_disturb}")
    if math.isinf(t_disturb):
        return UNBOUNDED_CYCLES
    q = t_disturb / pulse_width
    cycles = math.floor(q + q * _FLOOR_EPS)
    return min(cycles, UNBOUNDED_CYCLES)


def _cycles_array(times: np.ndarray, pulse_width: float) -> np.ndarray:
    q = times / pulse_width
    finite = np.isfinite(q) & (q < UNBOUNDED_CYCLES)
    cycles = np.full(q.shape, UNBOUNDED_CYCLES, dtype=np.int64)
    cycles[finite] = np.floor(q[finite] * (1.0 + _FLOOR_EPS)).astype(np.int64)
    return cycles


def inference_lifetime(endurance: int, spikes_per_image: int) -> Lifetime:
    """
    Images a cell can serve before its state is disturbed.

    A synapse that never spikes, or a cell with unbounded endurance, never
    wears out; both return ``math.inf``.
    """
    if spikes_per_image < 0:
        raise DomainError(f"spikes per image must be non-negative, got {spikes_per_image}")
    if endurance < 0:
        raise DomainError(f"endurance must be non-negative, got {endurance}")
    if spikes_per_image == 0 or endurance >= UNBOUNDED_CYCLES:
        return math.inf
    return int(endurance) // int(spikes_per_image)


@dataclass(frozen=True)
class EnduranceMap:
    """Per-cell read endurance of a crossbar under one spike stress."""

    cycles: np.ndarray
    pulse_width: float
    time_to_disturb: np.ndarray

    def __post_init__(self):
        if not self.pulse_width > 0:
            raise DomainError(f"pulse width must be positive, got {self.pulse_width}")
        self.cycles.setflags(write=False)
        self.time_to_disturb.setflags(write=False)

    @classmethod
    def from_cycles(cls, cycles, pulse_width: float = 1e-3) -> 'EnduranceMap':
        """Map built directly from cycle counts, e.g. for placement studies."""
        cycles = np.array(cycles, dtype=np.int64)
        if cycles.ndim != 2 or cycles.shape[0] != cycles.shape[1]:
            raise DomainError(f"endurance map must be square, got shape {cycles.shape}")
        if np.any(cycles < 0):
            raise DomainError("endurance cycles must be non-negative")
        times = np.where(cycles >= UNBOUNDED_CYCLES, np.inf, cycles * pulse_width)
        return cls(cycles=cycles, pulse_width=pulse_width, time_to_disturb=times)

    @property
    def n(self) -> int:
        return self.cycles.shape[0]

    def spread(self) -> float:
        """Ratio of the highest to the lowest finite endurance; 1.0 when uniform."""
        finite = self.cycles[self.cycles < UNBOUNDED_CYCLES]
        if finite.size == 0:
            return 1.0
        lowest = finite.min()
        if lowest == 0:
            return math.inf
        return float(finite.max() / lowest)


def endurance_map(
    solve: SolveResult,
    cells: CellStateMatrix,
    p: TechnologyParams,
    pulse_width: float,
) -> EnduranceMap:
    """
    Convert the cell voltages of a solve into read-endurance cycles.

    HRS cells follow the filament-gap law, LRS cells the lateral-growth law.
    Unselected cells carry no stress and are never disturbed.

    Args:
        solve: DC solution at the spike voltage
        cells: Cell states of the solved crossbar
        p: Technology parameters
        pulse_width: Spike pulse width in seconds

    Returns:
        EnduranceMap: Cycle and time matrices
    """
    if solve.n != cells.n:
        raise DomainError(f"solve is {solve.n}x{solve.n} but cell states are {cells.n}x{cells.n}")
    if not pulse_width > 0:
        raise DomainError(f"pulse width must be positive, got {pulse_width}")

    voltage = np.where(cells.selected, solve.cell_voltage, 0.0)
    if np.any(voltage < 0):
        i, j = np.unravel_index(np.argmin(voltage), voltage.shape)
        raise DomainError(f"negative cell voltage {voltage[i, j]:.3e} V at ({i}, {j})")

    hrs = cells.is_hrs() & cells.selected
    lrs = ~cells.is_hrs() & cells.selected
    times = np.full(voltage.shape, np.inf)
    if hrs.any():
        times[hrs] = hrs_disturb_times(voltage[hrs], p)
    if lrs.any():
        times[lrs] = lrs_disturb_times(voltage[lrs])

    cycles = _cycles_array(times, pulse_width)
    logger.debug(f"Endurance map {cells.n}x{cells.n}: {int(hrs.sum())} HRS, {int(lrs.sum())} LRS cells, "
                 f"min {cycles.min()} cycles")
    return EnduranceMap(cycles=cycles, pulse_width=pulse_width, time_to_disturb=times)
