"""
Placement of a cluster's synapses onto crossbar cells.

The endurance-aware strategy pairs the busiest synapses with the most
durable cells. For a one-to-one assignment this sorted pairing maximises
min(endurance / spikes).
"""

import logging
import math
from typing import Dict, Iterable, List, Literal, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.stats import gmean

from src.endurance.lifetime import UNBOUNDED_CYCLES, EnduranceMap, Lifetime, inference_lifetime
from src.errors import PlacementError
from src.workload.spikes import ClusteredWorkload, SpikeDistribution, draw_spike_counts

logger = logging.getLogger(__name__)

Strategy = Literal['baseline-row-major', 'random', 'endurance-aware']
Cell = Tuple[int, int]


class Placement(BaseModel):
    """Injective map from synapse id to crossbar cell."""

    model_config = ConfigDict(frozen=True)

    assignment: Dict[int, Cell]
    strategy: Strategy
    n: int
    seed: Optional[int] = None
    refined: bool = False

    @model_validator(mode='after')
    def _check_assignment(self):
        cells = list(self.assignment.values())
        if len(set(cells)) != len(cells):
            raise ValueError("two synapses share a cell")
        for synapse_id, (row, col) in self.assignment.items():
            if not (0 <= row < self.n and 0 <= col < self.n):
                raise ValueError(f"synapse {synapse_id} placed at ({row}, {col}) outside a {self.n}x{self.n} crossbar")
        return self

    def to_records(self) -> List[dict]:
        return [{'id': sid, 'row': cell[0], 'col': cell[1]} for sid, cell in sorted(self.assignment.items())]


class LifetimeReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    lifetime_images: Lifetime
    limiting_cell: Optional[Cell] = None
    limiting_synapse: Optional[int] = None
    baseline_lifetime: Lifetime
    improvement_vs_baseline: float


def _sorted_ids(workload: ClusteredWorkload) -> List[int]:
    return sorted(s.id for s in workload.synapses)


def place_baseline(workload: ClusteredWorkload, n: int) -> Placement:
    """Row-major placement in synapse-id order."""
    workload.check_capacity(n)
    assignment = {sid: divmod(k, n) for k, sid in enumerate(_sorted_ids(workload))}
    return Placement(assignment=assignment, strategy='baseline-row-major', n=n)


def place_random(workload: ClusteredWorkload, n: int, seed: int) -> Placement:
    workload.check_capacity(n)
    rng = np.random.default_rng(seed)
    cells = rng.permutation(n * n)[:len(workload)]
    assignment = {sid: divmod(int(c), n) for sid, c in zip(_sorted_ids(workload), cells)}
    return Placement(assignment=assignment, strategy='random', n=n, seed=seed)


def place_endurance_aware(workload: ClusteredWorkload, endurance: EnduranceMap) -> Placement:
    """
    Pair synapses sorted by spikes with cells sorted by endurance.

    Synapse ties break by id, cell ties by (row, col).

    Args:
        workload: Cluster to place
        endurance: Read endurance of the target crossbar

    Returns:
        Placement: The endurance-aware placement
    """
    n = endurance.n
    workload.check_capacity(n)
    synapses = sorted(workload.synapses, key=lambda s: (-s.spikes_per_image, s.id))
    # stable sort on the row-major flattening keeps (row, col) order among equal cells
    cells = np.argsort(-endurance.cycles.ravel(), kind='stable')
    assignment = {s.id: divmod(int(c), n) for s, c in zip(synapses, cells)}
    return Placement(assignment=assignment, strategy='endurance-aware', n=n)


def _synapse_lifetimes(placement: Placement, workload: ClusteredWorkload,
                       endurance: EnduranceMap) -> List[Tuple[int, Cell, Lifetime]]:
    ids = set(_sorted_ids(workload))
    if set(placement.assignment) != ids:
        missing = sorted(ids - set(placement.assignment))
        extra = sorted(set(placement.assignment) - ids)
        raise PlacementError(f"placement does not match the workload (missing {missing[:5]}, extra {extra[:5]})")

    lifetimes = []
    for synapse in sorted(workload.synapses, key=lambda s: s.id):
        row, col = placement.assignment[synapse.id]
        if not (0 <= row < endurance.n and 0 <= col < endurance.n):
            raise PlacementError(
                f"synapse {synapse.id} at ({row}, {col}) lies outside the {endurance.n}x{endurance.n} endurance map"
            )
        cycles = int(endurance.cycles[row, col])
        lifetimes.append((synapse.id, (row, col), inference_lifetime(cycles, synapse.spikes_per_image)))
    return lifetimes


def _minimum(lifetimes) -> Tuple[Lifetime, Optional[Cell], Optional[int]]:
    best: Lifetime = math.inf
    cell, synapse_id = None, None
    for sid, where, value in lifetimes:
        if value < best:
            best, cell, synapse_id = value, where, sid
    return best, cell, synapse_id


def lifetime_ratio(lifetime: Lifetime, baseline: Lifetime) -> float:
    """Improvement of ``lifetime`` over ``baseline``; equal lifetimes, infinite or zero, give 1."""
    if lifetime == baseline:
        return 1.0
    if baseline == 0 or math.isinf(lifetime):
        return math.inf
    return float(lifetime / baseline)


def evaluate_lifetime(placement: Placement, workload: ClusteredWorkload,
                      endurance: EnduranceMap) -> LifetimeReport:
    """
    Inference lifetime of a placement and its gain over the baseline placement.

    Args:
        placement: Placement of the workload's synapses
        workload: Cluster providing spikes per image
        endurance: Endurance map the placement targets

    Returns:
        LifetimeReport: Minimum lifetime over occupied cells, its limiting
        cell and synapse, and the ratio to the row-major baseline
    """
    lifetime, cell, synapse_id = _minimum(_synapse_lifetimes(placement, workload, endurance))
    if placement.strategy == 'baseline-row-major' and placement.n == endurance.n:
        baseline = lifetime
    else:
        baseline, _, _ = _minimum(_synapse_lifetimes(place_baseline(workload, endurance.n), workload, endurance))

    if math.isinf(lifetime):
        logger.warning(f"Cluster {workload.cluster_id} never disturbs its cells (no spiking synapse)")
    return LifetimeReport(
        lifetime_images=lifetime,
        limiting_cell=cell,
        limiting_synapse=synapse_id,
        baseline_lifetime=baseline,
        improvement_vs_baseline=lifetime_ratio(lifetime, baseline),
    )


def refine_swaps(placement: Placement, workload: ClusteredWorkload, endurance: EnduranceMap,
                 max_passes: int = 100) -> Placement:
    """
    Local search that relocates the limiting synapse while that helps.

    Each pass moves the current limiting synapse to the cell, free or
    occupied (the occupant takes its place), that maximises the smaller of
    the two affected lifetimes, as long as that beats the current limit.

    Args:
        placement: Starting placement
        workload: Cluster providing spikes per image
        endurance: Endurance map of the crossbar
        max_passes: Upper bound on accepted moves

    Returns:
        Placement: Refined placement, flagged ``refined``
    """
    n = endurance.n
    spikes = workload.spike_counts()
    assignment = dict(placement.assignment)
    cycles = endurance.cycles.ravel()

    for _ in range(max_passes):
        lifetime, cell, sid = _minimum(_synapse_lifetimes(
            placement.model_copy(update={'assignment': assignment}), workload, endurance))
        if sid is None:
            break

        here = cell[0] * n + cell[1]
        occupant = np.full(n * n, -1, dtype=np.int64)
        occupant_spikes = np.zeros(n * n, dtype=np.int64)
        for other, (r, c) in assignment.items():
            occupant[r * n + c] = other
            occupant_spikes[r * n + c] = spikes[other]

        moved = np.where(cycles >= UNBOUNDED_CYCLES, np.inf, cycles // spikes[sid])
        partner = np.where(occupant_spikes > 0, cycles[here] // np.maximum(occupant_spikes, 1), np.inf)
        partner = np.where(occupant < 0, np.inf, partner)
        gain = np.minimum(moved, partner)
        gain[here] = -np.inf

        best = int(np.argmax(gain))
        if not gain[best] > lifetime:
            break
        other = int(occupant[best])
        assignment[sid] = divmod(best, n)
        if other >= 0:
            assignment[other] = cell
        logger.debug(f"Moved synapse {sid} to {divmod(best, n)}: limiting lifetime {lifetime} -> {gain[best]:g}")

    return Placement(assignment=assignment, strategy=placement.strategy, n=n, seed=placement.seed, refined=True)


def placement_document(placement: Placement, report: LifetimeReport) -> dict:
    return {
        'strategy': placement.strategy,
        'refined': placement.refined,
        'seed': placement.seed,
        'assignment': placement.to_records(),
        'lifetime_images': report.lifetime_images,
        'baseline_lifetime': report.baseline_lifetime,
        'limiting_cell': report.limiting_cell,
        'limiting_synapse': report.limiting_synapse,
        'improvement_vs_baseline': report.improvement_vs_baseline,
    }


def _array_lifetime(cycles: np.ndarray, counts: np.ndarray) -> Lifetime:
    wears = (counts > 0) & (cycles < UNBOUNDED_CYCLES)
    if not np.any(wears):
        return math.inf
    return int(np.min(cycles[wears] // counts[wears]))


def improvement_from_counts(endurance: EnduranceMap, counts: np.ndarray) -> float:
    """
    Endurance-aware over row-major improvement for synapses 0..len(counts)-1.

    Array form of ``place_endurance_aware``, ``place_baseline`` and
    ``evaluate_lifetime`` for workloads given only by their spike counts.
    """
    counts = np.asarray(counts, dtype=np.int64)
    flat = endurance.cycles.ravel().astype(np.int64)
    if counts.size > flat.size:
        raise PlacementError(f"{counts.size} synapses do not fit {flat.size} cells")
    busiest = np.argsort(-counts, kind='stable')
    durable = np.argsort(-flat, kind='stable')[:counts.size]
    aware = _array_lifetime(flat[durable], counts[busiest])
    baseline = _array_lifetime(flat[:counts.size], counts)
    return lifetime_ratio(aware, baseline)


def skew_study(
    endurance: EnduranceMap,
    skews: Iterable[float] = (1.0, 1.2, 1.5),
    replicates: int = 50,
    n_synapses: Optional[int] = None,
    seed: int = 0,
    max_spikes: int = 100,
    activity_support: int = 1000,
) -> pd.DataFrame:
    """
    Endurance-aware improvement over seeded zipf workloads of varying skew.

    Each replicate fills the crossbar (``n_synapses`` defaults to N^2) with
    zipf activity over 1..activity_support spikes, saturated at ``max_spikes``
    per image. Every skew uses the same replicate seeds.

    Returns:
        pd.DataFrame: One row per skew with the geometric-mean, minimum and
        maximum improvement ratio
    """
    n_synapses = endurance.n * endurance.n if n_synapses is None else n_synapses
    if not 1 <= n_synapses <= endurance.n * endurance.n:
        raise PlacementError(f"n_synapses must lie in 1..{endurance.n * endurance.n}, got {n_synapses}")
    seeds = np.random.SeedSequence(seed).generate_state(replicates).tolist()
    rows = []
    for s in sorted(skews):
        distribution = SpikeDistribution(kind='zipf', params=(s, activity_support))
        ratios = np.array([
            improvement_from_counts(
                endurance,
                draw_spike_counts(distribution, n_synapses, np.random.default_rng(replicate_seed), max_spikes),
            )
            for replicate_seed in seeds
        ])
        rows.append({
            'skew': s,
            'replicates': replicates,
            'geomean_improvement': float(gmean(ratios)) if np.all(np.isfinite(ratios)) else math.inf,
            'min_improvement': float(ratios.min()),
            'max_improvement': float(ratios.max()),
        })
        logger.info(f"Skew {s:g}: geometric-mean improvement {rows[-1]['geomean_improvement']:.4g}")
    return pd.DataFrame(rows, columns=['skew', 'replicates', 'geomean_improvement',
                                       'min_improvement', 'max_improvement'])
