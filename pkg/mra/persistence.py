"""CSV and JSON artefacts.

Floats are written with 17 significant digits so every value reads back to the
same double.
"""
import csv
import json
import logging
import math
import re
from pathlib import Path

import numpy as np

from .exceptions import InvalidSignalError
from .signal_core import SampleSet, as_signal

logger = logging.getLogger(__name__)

RUN_COLUMNS = ['method', 'tau', 'N', 'seed', 'nrmse', 'iterations', 'wall_s', 'converged', 'error']
SUMMARY_COLUMNS = [
    'method', 'tau', 'runs', 'failures', 'nrmse_median', 'nrmse_p05', 'nrmse_p95',
    'wall_s_median', 'iterations_median', 'converged_fraction',
]
EFFICIENCY_COLUMNS = ['tau', 'eps', 'N_required', 'nrmse_median', 'censored']
SLOPE_COLUMNS = ['eps', 'window', 'tau_min', 'tau_max', 'slope', 'points']
GRID_COLUMNS = ['phi1', 'phi2', 'loss', 'gradnorm']

_SAMPLE_HEADER = re.compile(r'^L=(\d+),N=(\d+),tau=(\S+)$')


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f'{float(value):.17g}'
    return '' if value is None else str(value)


def _ensure_parent(path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_signals(path, signals, ids=None):
    path = _ensure_parent(path)
    rows = np.atleast_2d(np.asarray(signals, dtype=np.float64))
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle)
        for i, row in enumerate(rows):
            prefix = [str(int(ids[i]))] if ids is not None else []
            writer.writerow(prefix + [fmt(v) for v in row])
    return path


def read_signals(path, has_ids=False):
    with open(path, newline='') as handle:
        rows = [row for row in csv.reader(handle) if row and not row[0].startswith('#')]
    if has_ids:
        rows = [row[1:] for row in rows]
    try:
        values = np.array([[float(v) for v in row] for row in rows])
    except ValueError as exc:
        raise InvalidSignalError(f'{path}: {exc}') from exc
    if values.ndim != 2 or values.shape[0] == 0:
        raise InvalidSignalError(f'{path}: expected at least one signal row')
    return values


def read_signal(path, has_ids=False):
    return as_signal(read_signals(path, has_ids)[0])


def write_sample_set(path, X):
    path = _ensure_parent(path)
    with open(path, 'w', newline='') as handle:
        handle.write(f'L={X.length},N={X.n_samples},tau={fmt(X.tau)}\n')
        writer = csv.writer(handle)
        for row in X.samples:
            writer.writerow([fmt(v) for v in row])
    return path


def read_sample_set(path):
    with open(path, newline='') as handle:
        header = handle.readline().strip()
        match = _SAMPLE_HEADER.match(header)
        if not match:
            raise InvalidSignalError(f'{path}: bad sample-set header {header!r}')
        length, n, tau = int(match.group(1)), int(match.group(2)), float(match.group(3))
        rows = [[float(v) for v in row] for row in csv.reader(handle) if row]
    samples = np.array(rows)
    if samples.shape != (n, length):
        raise InvalidSignalError(f'{path}: header says {n}x{length}, found {samples.shape}')
    return SampleSet(samples, tau)


def write_integers(path, values):
    path = _ensure_parent(path)
    with open(path, 'w', newline='') as handle:
        csv.writer(handle).writerow([str(int(v)) for v in values])
    return path


def read_integers(path):
    with open(path, newline='') as handle:
        return np.array([int(v) for row in csv.reader(handle) for v in row if v != ''], dtype=np.int64)


def _write_table(path, columns, rows, comments=()):
    path = _ensure_parent(path)
    with open(path, 'w', newline='') as handle:
        for line in comments:
            handle.write(f'# {line}\n')
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([fmt(row[c]) for c in columns])
    return path


def _read_table(path):
    with open(path, newline='') as handle:
        lines = [line for line in handle if not line.startswith('#')]
    return list(csv.DictReader(lines))


def write_runs(path, records, metadata=()):
    return _write_table(path, RUN_COLUMNS, [r.as_row() for r in records], metadata)


def write_summary(path, rows):
    return _write_table(path, SUMMARY_COLUMNS, rows)


def write_efficiency(path, rows):
    return _write_table(path, EFFICIENCY_COLUMNS, rows)


def write_slopes(path, rows):
    return _write_table(path, SLOPE_COLUMNS, rows)


def read_table(path):
    return _read_table(path)


def write_grid(path, grid):
    phis = grid.phis
    rows = (
        {'phi1': phis[i], 'phi2': phis[j], 'loss': grid.loss[i, j], 'gradnorm': grid.grad_norm[i, j]}
        for i in range(grid.resolution)
        for j in range(grid.resolution)
    )
    return _write_table(path, GRID_COLUMNS, rows)


def read_grid_losses(path):
    """Loss matrix of a grid CSV (row-major, square)."""
    rows = _read_table(path)
    resolution = math.isqrt(len(rows))
    if resolution * resolution != len(rows) or resolution == 0:
        raise InvalidSignalError(f'{path}: grid CSV must hold a square number of rows')
    return np.array([float(row['loss']) for row in rows]).reshape(resolution, resolution)


def write_json(path, payload):
    path = _ensure_parent(path)
    with open(path, 'w') as handle:
        json.dump(payload, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write('\n')
    return path


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f'{type(value).__name__} is not JSON serialisable')
