import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

import numpy as np

from subcusum.utils.helpers import fmt_float

PathLike = Union[str, Path]


def _prepare(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_table_csv(
    path: PathLike, header: Sequence[str], rows: Iterable[Sequence[str]]
) -> Path:
    """Writes already formatted rows under `header`, with "\\n" line endings."""
    path = _prepare(path)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_stream_csv(path: PathLike, stream: np.ndarray) -> Path:
    """Writes an (n, k) sample stream with columns t, x1, ..., xk (t starting at 1)."""
    stream = np.atleast_2d(stream)
    header = ["t"] + [f"x{j + 1}" for j in range(stream.shape[1])]
    rows = (
        [str(t)] + [fmt_float(value) for value in sample]
        for t, sample in enumerate(stream, start=1)
    )
    return write_table_csv(path, header, rows)


def write_trace_csv(path: PathLike, trace: Iterable) -> Path:
    """Writes TracePoints as t, statistic, stopped."""
    rows = (
        [str(point.t), fmt_float(point.statistic), str(int(point.stopped))]
        for point in trace
    )
    return write_table_csv(path, ["t", "statistic", "stopped"], rows)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # nan and inf are not valid JSON numbers
        return value if math.isfinite(value) else None
    return value


def write_json(path: PathLike, payload: Any) -> Path:
    path = _prepare(path)
    with open(path, "w") as f:
        json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def dumps_json(payload: Any) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True)
