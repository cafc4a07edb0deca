"""
Technology, crossbar and cell configuration loaded from a TOML profile.
"""

import logging
import sys
from pathlib import Path
from typing import Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.cost.model import CostModelParams
from src.endurance.disturb import TechnologyParams
from src.errors import ConfigurationError
from src.utils.helpers import stable_hash

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

StateName = Literal['hrs', 'lrs1', 'lrs2', 'lrs3']


class NodeProfile(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    feature_size: float = Field(gt=0, description="nm")
    r_segment: Optional[float] = Field(None, gt=0, description="ohms per inter-cell segment")
    c_segment: float = Field(0.0, ge=0, description="farads, unused by the DC analysis")


class TechnologySection(TechnologyParams):
    """Device-physics constants shared by every node plus the per-node profiles."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    reference_node: int = Field(65, gt=0)
    nodes: Dict[str, NodeProfile] = Field(default_factory=lambda: {
        '90': NodeProfile(feature_size=90.0),
        '65': NodeProfile(feature_size=65.0),
        '45': NodeProfile(feature_size=45.0),
        '32': NodeProfile(feature_size=32.0),
    })

    @model_validator(mode='after')
    def _check_reference(self):
        if str(self.reference_node) not in self.nodes:
            raise ValueError(f"reference_node {self.reference_node} has no [technology.nodes] profile")
        return self


class CrossbarSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    size: int = Field(128, ge=2)
    r_driver: float = Field(100.0, gt=0)
    sense_mode: Literal['virtual-ground'] = 'virtual-ground'
    read_current: float = Field(50e-6, gt=0)
    activation: Literal['all', 'single'] = 'all'
    solver: Literal['auto', 'direct', 'cg'] = 'auto'
    direct_max_n: int = Field(64, ge=2)
    tol: float = Field(1e-9, gt=0, lt=1)
    max_iter: Optional[int] = Field(None, ge=1)


class CalibrationSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    target_disparity: float = Field(39.2, gt=0, lt=100)
    size: int = Field(128, ge=2)
    read_path_state: StateName = 'lrs3'


class CellsSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    hrs: float = Field(1e6, gt=0)
    lrs1: float = Field(215443.5, gt=0)
    lrs2: float = Field(46415.9, gt=0)
    lrs3: float = Field(1e4, gt=0)
    r_access: float = Field(5e3, ge=0)
    default_state: StateName = 'hrs'

    @model_validator(mode='after')
    def _check_order(self):
        if not self.hrs > self.lrs1 > self.lrs2 > self.lrs3:
            raise ValueError("cell resistances must satisfy hrs > lrs1 > lrs2 > lrs3")
        return self


class EnduranceSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    pulse_width: float = Field(1e-3, gt=0)
    spike_voltage: Optional[float] = Field(0.1, gt=0)


class CostSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    transistors_per_neuron: int = Field(20, ge=1)
    capacitors_per_neuron: int = Field(1, ge=1)
    bits_per_cell: int = Field(2, ge=1)
    transistor_area: float = Field(1.0, gt=0)
    capacitor_area: float = Field(1.0, gt=0)
    nvm_area: float = Field(1.0, gt=0)


class WorkloadSection(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    n_synapses: int = Field(1024, ge=1)
    max_spikes: int = Field(100, ge=1)
    activity_support: int = Field(1000, ge=1)
    window_seconds: float = Field(0.35, gt=0)


class ToolConfig(BaseModel):
    """Validated contents of a technology profile."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    technology: TechnologySection = Field(default_factory=TechnologySection)
    crossbar: CrossbarSection = Field(default_factory=CrossbarSection)
    calibration: CalibrationSection = Field(default_factory=CalibrationSection)
    cells: CellsSection = Field(default_factory=CellsSection)
    endurance: EnduranceSection = Field(default_factory=EnduranceSection)
    cost: CostSection = Field(default_factory=CostSection)
    workload: WorkloadSection = Field(default_factory=WorkloadSection)

    def parameter_hash(self) -> str:
        return stable_hash(self.model_dump(mode='json'))

    def node_profile(self, node: Union[int, float, str]) -> NodeProfile:
        key = _node_key(node)
        try:
            return self.technology.nodes[key]
        except KeyError:
            known = ', '.join(sorted(self.technology.nodes, key=float))
            raise ConfigurationError(f"unknown technology node {node!r}; configured nodes: {known}")

    def technology_params(self, node: Union[int, float, str]) -> TechnologyParams:
        """Device-physics constants of the given node as a standalone TechnologyParams."""
        profile = self.node_profile(node)
        fields = self.technology.model_dump(exclude={'reference_node', 'nodes', 'feature_size'})
        return TechnologyParams(feature_size=profile.feature_size, **fields)

    def cost_params(self, node: Union[int, float, str, None] = None) -> CostModelParams:
        feature_size = 1.0 if node is None else self.node_profile(node).feature_size
        return CostModelParams(feature_size=feature_size, **self.cost.model_dump())

    def with_overrides(self, **sections) -> 'ToolConfig':
        """
        Copy of the configuration with some keys replaced.

        Args:
            **sections: Section name mapped to a dict of replacement keys,
                e.g. ``crossbar={'solver': 'direct'}``

        Returns:
            ToolConfig: A revalidated configuration
        """
        data = self.model_dump()
        for section, values in sections.items():
            if section not in data:
                raise ConfigurationError(f"unknown configuration section [{section}]")
            data[section] = _merge(data[section], values)
        return build_config(data)


def _node_key(node) -> str:
    try:
        value = float(node)
    except (TypeError, ValueError):
        raise ConfigurationError(f"technology node must be numeric, got {node!r}")
    return str(int(value)) if value.is_integer() else str(value)


def _merge(base: dict, update: dict) -> dict:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def build_config(data: dict) -> ToolConfig:
    """Validate a raw mapping, translating pydantic errors into ConfigurationError."""
    try:
        return ToolConfig.model_validate(data)
    except ValidationError as e:
        problems = '; '.join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        raise ConfigurationError(f"invalid configuration: {problems}") from e


def load_config(path: Union[str, Path]) -> ToolConfig:
    """
    Load and validate a technology profile.

    Args:
        path: Path to the TOML file

    Returns:
        ToolConfig: The validated configuration
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"configuration file not found: {path}")

    try:
        with open(path, 'rb') as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"cannot parse {path}: {e}") from e

    config = build_config(data)
    logger.debug(f"Loaded configuration {path} (hash {config.parameter_hash()[:12]})")
    return config
