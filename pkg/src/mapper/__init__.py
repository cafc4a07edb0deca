"""Endurance-aware synapse placement."""

from src.mapper.placement import (
    LifetimeReport,
    Placement,
    evaluate_lifetime,
    improvement_from_counts,
    lifetime_ratio,
    place_baseline,
    place_endurance_aware,
    place_random,
    placement_document,
    refine_swaps,
    skew_study,
)

__all__ = [
    'LifetimeReport',
    'Placement',
    'evaluate_lifetime',
    'improvement_from_counts',
    'lifetime_ratio',
    'place_baseline',
    'place_endurance_aware',
    'place_random',
    'placement_document',
    'refine_swaps',
    'skew_study',
]
