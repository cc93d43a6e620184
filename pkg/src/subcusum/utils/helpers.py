import math
from typing import Sequence, Union

import numpy as np

from subcusum.utils.types import InvalidModelError

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


def fmt_float(value: float) -> str:
    """Formats a float with 17 significant digits, the export format of every table."""
    if value is None:
        return ""
    return f"{float(value):.17g}"


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Returns a numpy Generator for an int seed, a SeedSequence, or passes a Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def replication_rng(master_seed: int, index: int) -> np.random.Generator:
    """Generator for replication `index` of an experiment seeded with `master_seed`.

    The stream only depends on the pair (master_seed, index), so replications can be
    scheduled on any number of workers in any order.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    )


def unit_vector(
    values: Sequence[float], tol: float = 1e-12, name: str = "u"
) -> np.ndarray:
    """Converts `values` to a float vector and checks that it has unit norm."""
    vec = np.asarray(values, dtype=float)
    if vec.ndim != 1:
        raise InvalidModelError(f"{name} must be a vector, got shape {vec.shape}")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > tol:
        raise InvalidModelError(f"{name} must have unit norm, got |{name}|={norm!r}")
    return vec


def random_unit_vector(k: int, seed: SeedLike = None) -> np.ndarray:
    """Uniformly distributed direction on the unit sphere of R^k."""
    rng = as_generator(seed)
    vec = rng.standard_normal(k)
    return vec / np.linalg.norm(vec)


def basis_vector(k: int, index: int = 0) -> np.ndarray:
    vec = np.zeros(k)
    vec[index] = 1.0
    return vec


def fix_sign(vec: np.ndarray) -> np.ndarray:
    """Flips `vec` so that its entry of largest magnitude is positive."""
    if vec[int(np.argmax(np.abs(vec)))] < 0:
        return -vec
    return vec


def standard_error(samples: np.ndarray) -> float:
    if len(samples) < 2:
        return math.nan
    return float(np.std(samples, ddof=1) / math.sqrt(len(samples)))
