"""
Parasitic resistive model of an N x N 1T-1R crossbar.

Node numbering: the wordline node of crosspoint (i, j) is ``i * N + j`` and
its bitline node is ``N^2 + i * N + j``. Drivers sit at column 0 of every
wordline, virtual-ground sense inputs below row N-1 of every bitline.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.errors import ConfigurationError

logger = logging.getLogger(__name__)


class ResistanceState(str, Enum):
    """Programmed state of a cell, ordered from highest to lowest resistance."""

    HRS = 'hrs'
    LRS1 = 'lrs1'
    LRS2 = 'lrs2'
    LRS3 = 'lrs3'

    @property
    def logic(self) -> str:
        return _LOGIC[self]

    @property
    def code(self) -> int:
        return STATE_ORDER.index(self)

    @classmethod
    def parse(cls, value: Union['ResistanceState', str]) -> 'ResistanceState':
        try:
            return cls(value.lower() if isinstance(value, str) else value)
        except ValueError:
            choices = ', '.join(s.value for s in cls)
            raise ConfigurationError(f"unknown resistance state {value!r}; expected one of {choices}")


STATE_ORDER = (ResistanceState.HRS, ResistanceState.LRS1, ResistanceState.LRS2, ResistanceState.LRS3)
_LOGIC = {
    ResistanceState.HRS: '00',
    ResistanceState.LRS1: '01',
    ResistanceState.LRS2: '10',
    ResistanceState.LRS3: '11',
}


class StateResistances(BaseModel):
    """Device resistance of each state, ohms."""

    model_config = ConfigDict(frozen=True)

    hrs: float = Field(1e6, gt=0)
    lrs1: float = Field(215443.5, gt=0)
    lrs2: float = Field(46415.9, gt=0)
    lrs3: float = Field(1e4, gt=0)

    @model_validator(mode='after')
    def _check_order(self):
        if not self.hrs > self.lrs1 > self.lrs2 > self.lrs3:
            raise ValueError("resistances must satisfy hrs > lrs1 > lrs2 > lrs3")
        return self

    def resistance(self, state: ResistanceState) -> float:
        return getattr(self, ResistanceState.parse(state).value)

    def as_array(self) -> np.ndarray:
        """Resistances indexed by state code."""
        return np.array([self.resistance(s) for s in STATE_ORDER])


class CrossbarGeometry(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    r_wordline_segment: float = Field(gt=0)
    r_bitline_segment: float = Field(gt=0)
    r_driver: float = Field(gt=0)
    sense_mode: Literal['virtual-ground'] = 'virtual-ground'

    @property
    def num_nodes(self) -> int:
        return 2 * self.n * self.n


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class CellStateMatrix:
    """
    Programmed state of every cell plus its access transistor.

    ``codes`` holds indices into ``STATE_ORDER``. ``selected`` is the gate
    state of the access transistors; an unselected cell is an open branch.
    """

    codes: np.ndarray
    resistances: StateResistances = field(default_factory=StateResistances)
    r_access: float = 5e3
    selected: Optional[np.ndarray] = None

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int8)
        if codes.ndim != 2 or codes.shape[0] != codes.shape[1]:
            raise ConfigurationError(f"cell state matrix must be square, got shape {codes.shape}")
        if codes.size and (codes.min() < 0 or codes.max() >= len(STATE_ORDER)):
            raise ConfigurationError("cell state codes must be in 0..3")
        if self.r_access < 0:
            raise ConfigurationError(f"r_access must be non-negative, got {self.r_access}")
        if self.selected is None:
            selected = np.ones(codes.shape, dtype=bool)
        else:
            selected = np.array(self.selected, dtype=bool)
            if selected.shape != codes.shape:
                raise ConfigurationError(
                    f"selected mask shape {selected.shape} does not match states {codes.shape}"
                )
        object.__setattr__(self, 'codes', _freeze(codes))
        object.__setattr__(self, 'selected', _freeze(selected))

    @classmethod
    def from_states(cls, states: Sequence[Sequence[Union[ResistanceState, str]]], **kwargs) -> 'CellStateMatrix':
        codes = [[ResistanceState.parse(s).code for s in row] for row in states]
        return cls(codes=np.array(codes, dtype=np.int8), **kwargs)

    @classmethod
    def uniform(cls, n: int, state: Union[ResistanceState, str] = ResistanceState.HRS, **kwargs) -> 'CellStateMatrix':
        code = ResistanceState.parse(state).code
        return cls(codes=np.full((n, n), code, dtype=np.int8), **kwargs)

    @classmethod
    def read_path_cells(cls, n: int, state: Union[ResistanceState, str] = ResistanceState.LRS3,
                        **kwargs) -> 'CellStateMatrix':
        """Only the shortest-path (N-1, 0) and longest-path (0, N-1) cells are selected."""
        selected = np.zeros((n, n), dtype=bool)
        selected[n - 1, 0] = True
        selected[0, n - 1] = True
        kwargs['selected'] = selected
        return cls.uniform(n, state, **kwargs)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    def is_hrs(self) -> np.ndarray:
        return self.codes == ResistanceState.HRS.code

    def branch_resistance(self) -> np.ndarray:
        """State resistance plus access resistance, N x N ohms."""
        return self.resistances.as_array()[self.codes] + self.r_access

    def branch_conductance(self) -> np.ndarray:
        """Conductance of each cell branch, zero where the access device is off."""
        return np.where(self.selected, 1.0 / self.branch_resistance(), 0.0)


@dataclass(frozen=True)
class ActivationPattern:
    """Which wordlines carry the spike; the others are held at 0 V."""

    driven: np.ndarray
    v_spike: float

    def __post_init__(self):
        driven = np.array(self.driven, dtype=bool)
        if driven.ndim != 1:
            raise ConfigurationError("driven must be a 1-D boolean vector")
        if not driven.any():
            raise ConfigurationError("at least one wordline must be driven")
        if not self.v_spike > 0:
            raise ConfigurationError(f"v_spike must be positive, got {self.v_spike}")
        object.__setattr__(self, 'driven', _freeze(driven))
        object.__setattr__(self, 'v_spike', float(self.v_spike))

    @classmethod
    def all_rows(cls, n: int, v_spike: float = 1.0) -> 'ActivationPattern':
        return cls(np.ones(n, dtype=bool), v_spike)

    @classmethod
    def single_row(cls, n: int, row: int, v_spike: float = 1.0) -> 'ActivationPattern':
        if not 0 <= row < n:
            raise ConfigurationError(f"row {row} outside a {n}-row crossbar")
        driven = np.zeros(n, dtype=bool)
        driven[row] = True
        return cls(driven, v_spike)

    def source_voltages(self) -> np.ndarray:
        return np.where(self.driven, self.v_spike, 0.0)


@dataclass(frozen=True)
class CrossbarNetwork:
    """Assembled nodal conductance matrix of a crossbar. Immutable."""

    geometry: CrossbarGeometry
    cells: CellStateMatrix
    conductance: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.geometry.n

    @property
    def num_nodes(self) -> int:
        return self.geometry.num_nodes

    @property
    def driver_nodes(self) -> np.ndarray:
        return np.arange(self.n) * self.n

    @property
    def sense_nodes(self) -> np.ndarray:
        n = self.n
        return n * n + (n - 1) * n + np.arange(n)

    def rhs(self, act: ActivationPattern) -> np.ndarray:
        """Norton source vector of the drivers for an activation pattern."""
        if act.driven.shape[0] != self.n:
            raise ConfigurationError(
                f"activation covers {act.driven.shape[0]} wordlines, crossbar has {self.n}"
            )
        b = np.zeros(self.num_nodes)
        b[self.driver_nodes] = act.source_voltages() / self.geometry.r_driver
        return b


def _two_terminal(a: np.ndarray, b: np.ndarray, g: np.ndarray):
    """COO triplets of conductances ``g`` between node arrays ``a`` and ``b``."""
    rows = np.concatenate([a, b, a, b])
    cols = np.concatenate([a, b, b, a])
    vals = np.concatenate([g, g, -g, -g])
    return rows, cols, vals


def build_network(geom: CrossbarGeometry, cells: CellStateMatrix) -> CrossbarNetwork:
    """
    Assemble the nodal conductance matrix of a crossbar.

    Args:
        geom: Crossbar geometry and parasitics
        cells: Cell states; must be ``geom.n`` square

    Returns:
        CrossbarNetwork: Network with 2N^2 unknown node voltages
    """
    n = geom.n
    if cells.n != n:
        raise ConfigurationError(f"geometry is {n}x{n} but cell states are {cells.n}x{cells.n}")

    idx = np.arange(n * n).reshape(n, n)
    wl = idx
    bl = idx + n * n
    triplets = []

    g_wl = 1.0 / geom.r_wordline_segment
    a, b = wl[:, :-1].ravel(), wl[:, 1:].ravel()
    triplets.append(_two_terminal(a, b, np.full(a.size, g_wl)))

    g_bl = 1.0 / geom.r_bitline_segment
    a, b = bl[:-1, :].ravel(), bl[1:, :].ravel()
    triplets.append(_two_terminal(a, b, np.full(a.size, g_bl)))

    g_cell = cells.branch_conductance().ravel()
    on = g_cell > 0
    triplets.append(_two_terminal(wl.ravel()[on], bl.ravel()[on], g_cell[on]))

    # drivers and the last bitline segment into the virtual ground
    grounded = np.concatenate([wl[:, 0], bl[n - 1, :]])
    g_ground = np.concatenate([np.full(n, 1.0 / geom.r_driver), np.full(n, g_bl)])
    triplets.append((grounded, grounded, g_ground))

    rows = np.concatenate([t[0] for t in triplets])
    cols = np.concatenate([t[1] for t in triplets])
    vals = np.concatenate([t[2] for t in triplets])
    size = geom.num_nodes
    conductance = sp.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsr()
    conductance.sum_duplicates()

    logger.debug(f"Built {n}x{n} crossbar network: {size} nodes, {conductance.nnz} non-zeros, "
                 f"{int(on.sum())} conducting cells")
    return CrossbarNetwork(geometry=geom, cells=cells, conductance=conductance)
