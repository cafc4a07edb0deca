"""Commands for cost, workload and placement studies."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd

from src.circuit.network import ResistanceState
from src.config.technology import ToolConfig
from src.cost.model import cost_sweep
from src.mapper.placement import (
    evaluate_lifetime,
    place_baseline,
    place_endurance_aware,
    placement_document,
    refine_swaps,
    skew_study,
)
from src.runner.sweep_runner import SweepRunner, tradeoff_point
from src.tasks.common import compute_endurance, finish_run, spike_voltage
from src.utils.helpers import save_json, save_table_csv
from src.workload.spikes import (
    export_spike_counts_csv,
    generate_workload,
    isi_summary,
    load_workload,
    save_workload,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULT_COST_SIZES = tuple(range(16, 257, 16))


def cmd_cost_sweep(config: ToolConfig, config_path: PathLike, out_dir: PathLike,
                   nodes: Optional[Sequence[float]] = None,
                   sizes: Sequence[int] = DEFAULT_COST_SIZES) -> List[Path]:
    """
    Normalized cost-per-bit over crossbar sizes for each technology node.

    Args:
        config: Tool configuration
        config_path: Path the configuration was loaded from
        out_dir: Output directory
        nodes: Feature sizes in nm; defaults to every configured node
        sizes: Crossbar dimensions

    Returns:
        List[Path]: Written files
    """
    out_dir = Path(out_dir)
    if nodes is None:
        nodes = sorted((float(k) for k in config.technology.nodes), reverse=True)
    feature_sizes = {float(node): config.node_profile(node).feature_size for node in nodes}

    tables = cost_sweep(sorted(set(feature_sizes.values()), reverse=True), sizes, config.cost_params())
    written, frames = [], []
    for node in sorted(feature_sizes, reverse=True):
        table = tables[feature_sizes[node]]
        written.append(save_table_csv(table, out_dir / f"cost_{node:g}nm.csv"))
        frames.append(table.assign(node=node)[['node', 'n', 'exact_cost', 'approx_cost', 'normalized_cost']])

    written.append(save_table_csv(pd.concat(frames, ignore_index=True), out_dir / 'cost_sweep.csv'))
    written.append(finish_run(
        f"cost-sweep nodes={sorted(feature_sizes)} sizes={sorted(set(int(n) for n in sizes))}",
        config, config_path, out_dir,
    ))
    return written


def cmd_generate_workload(config: ToolConfig, config_path: PathLike, out_dir: PathLike,
                          distribution: str, seed: int, n_synapses: Optional[int] = None,
                          with_trains: bool = False) -> List[Path]:
    """Synthetic workload file plus its spike-count table and, with trains, ISI statistics."""
    out_dir = Path(out_dir)
    settings = config.workload
    n_synapses = n_synapses or settings.n_synapses
    workload = generate_workload(
        n_synapses,
        distribution,
        seed,
        max_spikes=settings.max_spikes,
        window_seconds=settings.window_seconds if with_trains else None,
        with_trains=with_trains,
    )
    written = [
        save_workload(workload, out_dir / 'workload.json'),
        export_spike_counts_csv(workload, out_dir / 'spike_counts.csv'),
    ]
    if with_trains:
        written.append(save_table_csv(isi_summary(workload), out_dir / 'isi_summary.csv'))
    written.append(finish_run(
        f"generate-workload n_synapses={n_synapses} distribution={distribution} trains={with_trains}",
        config, config_path, out_dir, seed=seed,
    ))
    return written


def cmd_optimize(config: ToolConfig, config_path: PathLike, out_dir: PathLike, n: int, node: float,
                 seed: int = 0, workload_path: Optional[PathLike] = None,
                 distribution: Optional[str] = None, state: str = 'hrs',
                 pulse_width: Optional[float] = None, v_spike: Optional[float] = None,
                 refine: bool = False, skews: Optional[Sequence[float]] = None,
                 replicates: int = 50) -> List[Path]:
    """
    Endurance-aware placement of one workload, compared with the row-major baseline.

    Args:
        config: Tool configuration
        config_path: Path the configuration was loaded from
        out_dir: Output directory
        n: Crossbar dimension
        node: Technology node in nm
        seed: Seed of the generated workload and of the skew study
        workload_path: Workload file; when absent one is generated from ``distribution``
        distribution: Spike-count distribution of the generated workload
        state: Programmed state of every cell
        pulse_width: Spike pulse width in seconds
        v_spike: Spike voltage override
        refine: Run the local swap pass after the greedy placement
        skews: Zipf exponents of an optional skew study
        replicates: Workloads per skew

    Returns:
        List[Path]: Written files
    """
    out_dir = Path(out_dir)
    state = ResistanceState.parse(state)
    pulse_width = pulse_width if pulse_width is not None else config.endurance.pulse_width
    v = spike_voltage(config, node, n, v_spike)

    if workload_path is not None:
        workload = load_workload(workload_path)
        source = str(workload_path)
    else:
        distribution = distribution or 'zipf:1.2'
        workload = generate_workload(
            min(config.workload.n_synapses, n * n), distribution, seed,
            max_spikes=config.workload.max_spikes,
        )
        source = distribution
    workload.check_capacity(n)

    _, _, emap = compute_endurance(config, node, n, state, pulse_width, v)
    placement = place_endurance_aware(workload, emap)
    if refine:
        placement = refine_swaps(placement, workload, emap)
    report = evaluate_lifetime(placement, workload, emap)
    baseline = place_baseline(workload, n)
    baseline_report = evaluate_lifetime(baseline, workload, emap)
    study = skew_study(emap, skews, replicates, seed=seed, max_spikes=config.workload.max_spikes,
                       activity_support=config.workload.activity_support) if skews else None
    logger.info(f"Lifetime {report.lifetime_images} images, {report.improvement_vs_baseline:.4g}x the baseline")

    written = [
        save_json(placement_document(placement, report), out_dir / 'placement.json'),
        save_json(placement_document(baseline, baseline_report), out_dir / 'baseline_placement.json'),
        save_json(report, out_dir / 'lifetime_report.json'),
    ]
    if study is not None:
        written.append(save_table_csv(study, out_dir / 'skew_study.csv'))

    written.append(finish_run(
        f"optimize n={n} node={float(node):g} state={state.value} pulse_width={pulse_width!r} "
        f"v_spike={v!r} workload={source} refine={refine} "
        f"skews={sorted(skews) if skews else []} replicates={replicates}",
        config, config_path, out_dir, seed=seed,
    ))
    return written


def cmd_tradeoff(config: ToolConfig, config_path: PathLike, out_dir: PathLike,
                 sizes: Sequence[int] = (32, 64, 128, 256), node: Optional[float] = None,
                 jobs: int = 1) -> List[Path]:
    """Cost-per-bit against endurance variation over crossbar sizes at one node."""
    out_dir = Path(out_dir)
    node = float(node if node is not None else config.technology.reference_node)
    config.node_profile(node)

    runner = SweepRunner(config, jobs=jobs)
    results = runner.run(tradeoff_point, [(node, int(n)) for n in sizes])

    written = [
        save_json(point, out_dir / f"tradeoff_{point['node']:g}nm_n{point['n']}.json")
        for point in results
    ]
    table = pd.DataFrame(results)
    table['normalized_cost'] = table['exact_cost'] / table['exact_cost'].max()
    table = table[['node', 'n', 'exact_cost', 'normalized_cost', 'disparity_percent', 'v_spike',
                   'min_cycles', 'max_cycles', 'endurance_spread']]
    written.append(save_table_csv(table, out_dir / 'tradeoff.csv'))
    written.append(finish_run(
        f"tradeoff node={node:g} sizes={sorted(set(int(n) for n in sizes))}",
        config, config_path, out_dir,
    ))
    return written
