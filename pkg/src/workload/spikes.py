"""
Clustered SNN workloads: per-synapse spike counts and optional spike trains.

Workload files are JSON::

    {"cluster_id": ..., "window_seconds": ...,
     "synapses": [{"id": 0, "spikes_per_image": 3, "times": [...]}, ...]}
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy import stats

from src.errors import CapacityError, UndefinedMetricError, WorkloadError
from src.utils.helpers import save_json, save_table_csv

logger = logging.getLogger(__name__)


class Synapse(BaseModel):
    model_config = ConfigDict(frozen=True, extra='forbid')

    id: int = Field(ge=0)
    spikes_per_image: int = Field(ge=0)
    times: Optional[Tuple[float, ...]] = None

    @model_validator(mode='after')
    def _check_train(self):
        if self.times is None:
            return self
        times = np.asarray(self.times, dtype=float)
        if times.size and times[0] < 0:
            raise ValueError(f"synapse {self.id}: spike times must be non-negative")
        if np.any(np.diff(times) <= 0):
            raise ValueError(f"synapse {self.id}: spike times are not strictly increasing")
        if times.size != self.spikes_per_image:
            raise ValueError(
                f"synapse {self.id}: spikes_per_image is {self.spikes_per_image} "
                f"but the train has {times.size} spikes"
            )
        return self


class ClusteredWorkload(BaseModel):
    """Synapses of one cluster mapped to a single crossbar."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    cluster_id: Union[int, str]
    window_seconds: Optional[float] = Field(None, gt=0)
    synapses: Tuple[Synapse, ...]

    @model_validator(mode='after')
    def _check_synapses(self):
        seen = set()
        for synapse in self.synapses:
            if synapse.id in seen:
                raise ValueError(f"duplicate synapse id {synapse.id}")
            seen.add(synapse.id)
            if synapse.times and self.window_seconds is not None and synapse.times[-1] > self.window_seconds:
                raise ValueError(
                    f"synapse {synapse.id}: spike at {synapse.times[-1]} s lies beyond the "
                    f"{self.window_seconds} s window"
                )
        return self

    def __len__(self) -> int:
        return len(self.synapses)

    def spike_counts(self) -> Dict[int, int]:
        return {s.id: s.spikes_per_image for s in self.synapses}

    def check_capacity(self, n: int) -> None:
        if len(self.synapses) > n * n:
            raise CapacityError(
                f"cluster {self.cluster_id} has {len(self.synapses)} synapses, "
                f"more than the {n * n} cells of a {n}x{n} crossbar"
            )


def _validation_message(error: ValidationError) -> str:
    parts = []
    for err in error.errors():
        where = '.'.join(str(p) for p in err['loc'])
        message = err['msg'].removeprefix('Value error, ')
        parts.append(f"{where}: {message}" if where else message)
    return '; '.join(parts)


def build_workload(data: dict) -> ClusteredWorkload:
    try:
        return ClusteredWorkload.model_validate(data)
    except ValidationError as e:
        raise WorkloadError(f"invalid workload: {_validation_message(e)}") from e


def load_workload(path: Union[str, Path]) -> ClusteredWorkload:
    """
    Load and validate a workload file.

    Args:
        path: JSON workload file

    Returns:
        ClusteredWorkload: The validated workload
    """
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise WorkloadError(f"malformed workload file {path}: {e}") from e
    if not isinstance(data, dict):
        raise WorkloadError(f"workload file {path} must hold a JSON object")
    workload = build_workload(data)
    logger.info(f"Loaded workload {workload.cluster_id} with {len(workload)} synapses from {path}")
    return workload


def save_workload(workload: ClusteredWorkload, path: Union[str, Path]) -> Path:
    return save_json(workload.model_dump(mode='json', exclude_none=True), path)


def export_spike_counts_csv(workload: ClusteredWorkload, path: Union[str, Path]) -> Path:
    table = pd.DataFrame(
        [(s.id, s.spikes_per_image) for s in workload.synapses],
        columns=['synapse_id', 'spikes_per_image'],
    )
    return save_table_csv(table, path)


class SpikeDistribution(BaseModel):
    """
    Distribution of spikes per image, e.g. ``zipf:1.2`` or ``uniform:1,10``.

    ``zipf:s,support`` draws activity over 1..support and saturates it at the
    per-image cap; plain ``zipf:s`` uses the cap as its support.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal['uniform', 'lognormal', 'zipf']
    params: Tuple[float, ...]

    @model_validator(mode='after')
    def _check_params(self):
        expected = {'uniform': (2,), 'lognormal': (2,), 'zipf': (1, 2)}[self.kind]
        if len(self.params) not in expected:
            allowed = ' or '.join(str(e) for e in expected)
            raise ValueError(f"{self.kind} takes {allowed} parameter(s), got {len(self.params)}")
        if self.kind == 'uniform':
            lo, hi = self.params
            if lo < 0 or hi < lo or not float(lo).is_integer() or not float(hi).is_integer():
                raise ValueError(f"uniform bounds must be integers with 0 <= lo <= hi, got {lo}, {hi}")
        elif self.kind == 'lognormal' and self.params[1] < 0:
            raise ValueError(f"lognormal sigma must be non-negative, got {self.params[1]}")
        elif self.kind == 'zipf':
            if self.params[0] <= 0:
                raise ValueError(f"zipf exponent must be positive, got {self.params[0]}")
            if len(self.params) == 2 and (self.params[1] < 1 or not float(self.params[1]).is_integer()):
                raise ValueError(f"zipf support must be a positive integer, got {self.params[1]}")
        return self

    def __str__(self) -> str:
        return f"{self.kind}:{','.join(f'{p:g}' for p in self.params)}"


def parse_distribution(text: Union[str, SpikeDistribution]) -> SpikeDistribution:
    if isinstance(text, SpikeDistribution):
        return text
    kind, _, args = str(text).partition(':')
    try:
        params = tuple(float(a) for a in args.split(',')) if args else ()
        return SpikeDistribution(kind=kind.strip().lower(), params=params)
    except (ValueError, ValidationError) as e:
        raise WorkloadError(f"invalid spike distribution {text!r}: {e}") from e


def draw_spike_counts(
    distribution: Union[str, SpikeDistribution],
    size: int,
    rng: np.random.Generator,
    max_spikes: int = 100,
) -> np.ndarray:
    """Draw ``size`` spike counts; zipf and lognormal counts never exceed ``max_spikes``."""
    dist = parse_distribution(distribution)
    if dist.kind == 'uniform':
        lo, hi = (int(p) for p in dist.params)
        return rng.integers(lo, hi + 1, size=size)
    if dist.kind == 'lognormal':
        mu, sigma = dist.params
        return np.clip(np.rint(rng.lognormal(mu, sigma, size=size)), 0, max_spikes).astype(np.int64)
    s = dist.params[0]
    n_support = int(dist.params[1]) if len(dist.params) == 2 else max_spikes
    support = np.arange(1, n_support + 1)
    pmf = stats.zipfian.pmf(support, s, n_support)
    activity = rng.choice(support, size=size, p=pmf / pmf.sum())
    return np.minimum(activity, max_spikes).astype(np.int64)


def generate_workload(
    n_synapses: int,
    distribution: Union[str, SpikeDistribution],
    seed: int,
    cluster_id: Union[int, str] = 'synthetic',
    max_spikes: int = 100,
    window_seconds: Optional[float] = None,
    with_trains: bool = False,
) -> ClusteredWorkload:
    """
    Draw a reproducible synthetic workload.

    Args:
        n_synapses: Number of synapses
        distribution: Spike-count distribution, parsed by ``parse_distribution``
        seed: Seed of the random stream
        cluster_id: Identifier written to the workload
        max_spikes: Upper bound of zipf and lognormal counts
        window_seconds: Observation window; required for trains
        with_trains: Also draw sorted spike times, uniform over the window

    Returns:
        ClusteredWorkload: Synapses with ids 0..n_synapses-1
    """
    if n_synapses < 1:
        raise WorkloadError(f"n_synapses must be at least 1, got {n_synapses}")
    if max_spikes < 1:
        raise WorkloadError(f"max_spikes must be at least 1, got {max_spikes}")
    if with_trains and window_seconds is None:
        raise WorkloadError("spike trains need a window_seconds")

    dist = parse_distribution(distribution)
    rng = np.random.default_rng(seed)
    counts = draw_spike_counts(dist, n_synapses, rng, max_spikes)

    synapses = []
    for synapse_id, count in enumerate(counts.tolist()):
        record = {'id': synapse_id, 'spikes_per_image': int(count)}
        if with_trains:
            record['times'] = np.sort(rng.uniform(0.0, window_seconds, size=int(count))).tolist()
        synapses.append(record)

    logger.debug(f"Generated {n_synapses} synapses from {dist} with seed {seed}")
    return build_workload({
        'cluster_id': cluster_id,
        'window_seconds': window_seconds,
        'synapses': synapses,
    })


def _train(times: Sequence[float], minimum: int, metric: str) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.size < minimum:
        raise UndefinedMetricError(f"{metric} needs at least {minimum} spikes, got {times.size}")
    return times


def average_isi(times: Sequence[float]) -> float:
    """Mean inter-spike interval of a sorted spike train, in seconds."""
    return float(np.mean(np.diff(_train(times, 2, 'average ISI'))))


def cv_isi(times: Sequence[float]) -> float:
    """Coefficient of variation (std / mean) of the inter-spike intervals."""
    isi = np.diff(_train(times, 3, 'ISI coefficient of variation'))
    return float(np.std(isi) / np.mean(isi))


def isi_summary(workload: ClusteredWorkload) -> pd.DataFrame:
    """
    Per-synapse ISI statistics of the synapses that carry spike trains.

    Metrics a train is too short for are left as NaN.
    """
    rows: List[dict] = []
    for synapse in workload.synapses:
        if synapse.times is None:
            continue
        row = {'synapse_id': synapse.id, 'spikes': synapse.spikes_per_image,
               'mean_isi': np.nan, 'cv_isi': np.nan}
        if len(synapse.times) >= 2:
            row['mean_isi'] = average_isi(synapse.times)
        if len(synapse.times) >= 3:
            row['cv_isi'] = cv_isi(synapse.times)
        rows.append(row)
    return pd.DataFrame(rows, columns=['synapse_id', 'spikes', 'mean_isi', 'cv_isi'])
