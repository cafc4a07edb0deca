"""Crossbar area and cost-per-bit model."""

import logging
from typing import Dict, Iterable, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

# the back-of-the-envelope closed form, cost ~ F^2 (27 + 2N) / N
APPROX_CONSTANT = 27.0
APPROX_SLOPE = 2.0


class CostModelParams(BaseModel):
    """Element counts and areas. Areas are in units of F^2."""

    model_config = ConfigDict(frozen=True)

    transistors_per_neuron: int = Field(20, ge=1)
    capacitors_per_neuron: int = Field(1, ge=1)
    bits_per_cell: int = Field(2, ge=1)
    feature_size: float = Field(1.0, gt=0, description="nm")
    transistor_area: float = Field(1.0, gt=0)
    capacitor_area: float = Field(1.0, gt=0)
    nvm_area: float = Field(1.0, gt=0)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"crossbar dimension must be at least 1, got {n}")


def neuron_area(n: int, p: CostModelParams) -> float:
    """Area of the 2N neurons of an N x N crossbar, in F^2."""
    _check_n(n)
    per_neuron = p.transistors_per_neuron * p.transistor_area + p.capacitors_per_neuron * p.capacitor_area
    return 2.0 * n * per_neuron


def synapse_area(n: int, p: CostModelParams) -> float:
    """Area of the N^2 1T-1R synapses, in F^2."""
    _check_n(n)
    return float(n * n) * (p.transistor_area + p.nvm_area)


def total_bits(n: int, p: CostModelParams) -> int:
    _check_n(n)
    return p.bits_per_cell * n * n


def cost_per_bit(n: int, p: CostModelParams) -> Tuple[float, float]:
    """
    Cost-per-bit of an N x N crossbar at feature size ``p.feature_size``.

    Args:
        n: Crossbar dimension
        p: Cost model parameters

    Returns:
        Tuple[float, float]: (exact, approximate) cost in F^2 per bit, with F
        taken in nanometers. The exact value is the primary output.
    """
    f2 = p.feature_size ** 2
    exact = f2 * (neuron_area(n, p) + synapse_area(n, p)) / total_bits(n, p)
    approx = f2 * (APPROX_CONSTANT + APPROX_SLOPE * n) / n
    return exact, approx


def cost_sweep(
    nodes: Iterable[float],
    sizes: Iterable[int],
    p: CostModelParams,
) -> Dict[float, pd.DataFrame]:
    """
    Sweep cost-per-bit over crossbar sizes for each technology node.

    Normalization divides by the maximum exact cost of each node's own sweep.

    Args:
        nodes: Feature sizes in nanometers
        sizes: Crossbar dimensions
        p: Base cost parameters; ``feature_size`` is replaced per node

    Returns:
        Dict[float, pd.DataFrame]: One table per node with columns
        n, exact_cost, approx_cost, normalized_cost
    """
    sizes = sorted(int(s) for s in sizes)
    if not sizes:
        raise ValueError("cost sweep needs at least one crossbar size")

    tables = {}
    for node in nodes:
        node_params = p.model_copy(update={'feature_size': float(node)})
        rows = [cost_per_bit(n, node_params) for n in sizes]
        exact = np.array([r[0] for r in rows])
        approx = np.array([r[1] for r in rows])
        tables[float(node)] = pd.DataFrame({
            'n': sizes,
            'exact_cost': exact,
            'approx_cost': approx,
            'normalized_cost': exact / exact.max(),
        })
        logger.debug(f"Cost sweep at {node} nm over {len(sizes)} sizes")
    return tables
