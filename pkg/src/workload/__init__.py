"""Clustered SNN workloads and spike-train metrics."""

from src.workload.spikes import (
    ClusteredWorkload,
    SpikeDistribution,
    Synapse,
    average_isi,
    cv_isi,
    draw_spike_counts,
    export_spike_counts_csv,
    generate_workload,
    isi_summary,
    load_workload,
    parse_distribution,
    save_workload,
)

__all__ = [
    'ClusteredWorkload',
    'SpikeDistribution',
    'Synapse',
    'average_isi',
    'cv_isi',
    'draw_spike_counts',
    'export_spike_counts_csv',
    'generate_workload',
    'isi_summary',
    'load_workload',
    'parse_distribution',
    'save_workload',
]
