from __future__ import annotations
import math
import multiprocessing
from dataclasses import dataclass
from enum import Enum
from functools import partial
from typing import List, Sequence, Tuple

import numpy as np

from subcusum.model.scenario import iter_stream
from subcusum.montecarlo.spec import DetectorConfig, RunLengthEstimate
from subcusum.utils.helpers import replication_rng, standard_error


class Regime(str, Enum):
    PRE = "pre"  # no change before the horizon cap: run lengths measure the ARL
    POST = "post"  # change at the start: run lengths measure the EDD


@dataclass(frozen=True)
class ReplicationPath:
    r"""Record values of one replication's statistic.

    `values` holds the successive running maxima of the statistic and `times` the effective
    times (samples consumed) at which they were set. The stopping time for any threshold
    b <= level is the first record time whose value is >= b.

    Attributes:
        times: Effective times of the records.
        values: Strictly increasing record values.
        level: The threshold the replication was run to.
        length: Samples consumed.
        censored: True when the horizon cap was hit before the level.
    """

    times: np.ndarray
    values: np.ndarray
    level: float
    length: int
    censored: bool

    def stopping_time(self, b: float, cap: int) -> Tuple[int, bool]:
        """Effective stopping time at threshold b and whether it is censored at the cap."""
        idx = int(np.searchsorted(self.values, b, side="left"))
        if idx < len(self.values):
            return int(self.times[idx]), False
        if not self.censored:
            raise ValueError(f"Threshold {b} lies above the simulated level {self.level}")
        return cap, True


def simulate_path(
    config: DetectorConfig,
    regime: Regime,
    level: float,
    cap: int,
    master_seed: int,
    index: int,
) -> ReplicationPath:
    """Runs replication `index` until its statistic reaches `level` or `cap` samples are used."""
    scenario = config.scenario.with_tau(cap if regime is Regime.PRE else 0)
    _, projection = config.working_scenario()
    detector = config.build()
    detector.reset()

    times: List[int] = []
    values: List[float] = []
    best = -math.inf
    n = 0
    for block in iter_stream(scenario, replication_rng(master_seed, index)):
        if projection is not None:
            block = projection.apply(block)
        for x in block:
            n += 1
            update = detector.update(x)
            if update is not None and update.statistic > best:
                best = update.statistic
                times.append(n)
                values.append(best)
                if best >= level:
                    return ReplicationPath(
                        np.array(times), np.array(values), level, n, False
                    )
            if n >= cap:
                return ReplicationPath(np.array(times), np.array(values), level, n, True)


def simulate_paths(
    config: DetectorConfig,
    regime: Regime,
    level: float,
    cap: int,
    master_seed: int,
    indices: Sequence[int],
    workers: int = 1,
) -> List[ReplicationPath]:
    """Simulates the given replications, in index order whatever the number of workers."""
    task = partial(simulate_path, config, regime, level, cap, master_seed)
    indices = list(indices)
    if workers <= 1 or len(indices) < 2:
        return [task(i) for i in indices]
    chunksize = max(1, len(indices) // (4 * workers))
    with multiprocessing.Pool(processes=workers) as pool:
        return pool.map(task, indices, chunksize=chunksize)


def extend_paths(
    paths: List[ReplicationPath],
    config: DetectorConfig,
    regime: Regime,
    level: float,
    cap: int,
    master_seed: int,
    workers: int = 1,
) -> List[ReplicationPath]:
    """Raises every path to a higher level.

    Censored paths never reached the old level within the cap, so they are kept as they are;
    the others are re-simulated from their seeds.
    """
    rerun = [i for i, path in enumerate(paths) if not path.censored and path.level < level]
    fresh = simulate_paths(config, regime, level, cap, master_seed, rerun, workers)
    paths = list(paths)
    for i, path in zip(rerun, fresh):
        paths[i] = path
    return paths


def summarize(
    paths: Sequence[ReplicationPath], b: float, cap: int
) -> RunLengthEstimate:
    """Mean stopping time at threshold b over the paths, censored runs counted at the cap."""
    times = np.empty(len(paths))
    censored = np.zeros(len(paths), dtype=bool)
    for i, path in enumerate(paths):
        times[i], censored[i] = path.stopping_time(b, cap)
    return RunLengthEstimate(
        mean=float(np.mean(times)),
        stderr=standard_error(times),
        censored_frac=float(np.mean(censored)),
        reps=len(paths),
    )
