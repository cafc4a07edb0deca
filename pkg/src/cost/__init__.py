"""Crossbar area and cost-per-bit model."""

from src.cost.model import (
    CostModelParams,
    cost_per_bit,
    cost_sweep,
    neuron_area,
    synapse_area,
    total_bits,
)

__all__ = ['CostModelParams', 'cost_per_bit', 'cost_sweep', 'neuron_area', 'synapse_area', 'total_bits']
