"""Datasets, weight vectors, file loaders and synthetic generators."""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DatasetError, DimensionMismatch


@dataclass(frozen=True)
class DataPoint:
    features: np.ndarray
    target: float


@dataclass(frozen=True)
class Dataset:
    """``N`` points ``T_j`` in ``d`` dimensions with targets ``f(T_j)``."""

    features: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.features, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.targets, dtype=float).reshape(-1)
        if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
            raise DatasetError("dataset needs N >= 1 points of dimension d >= 1")
        if X.shape[0] != y.size:
            raise DimensionMismatch(f"{X.shape[0]} feature rows but {y.size} targets")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise DatasetError("dataset entries must be finite")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)

    @classmethod
    def from_points(cls, points):
        points = list(points)
        return cls(np.array([np.atleast_1d(p.features) for p in points]), [p.target for p in points])

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    @property
    def points(self):
        return [DataPoint(x, float(t)) for x, t in zip(self.features, self.targets)]

    def lifted(self):
        """Rows ``E_j = (1, T_j)``."""
        return np.hstack([np.ones((self.n, 1)), self.features])

    def with_targets(self, targets):
        return Dataset(self.features, targets)

    def summary(self):
        return {
            "n": self.n,
            "d": self.d,
            "target_min": float(self.targets.min()),
            "target_max": float(self.targets.max()),
        }


@dataclass(frozen=True)
class WeightVector:
    """Bias ``w0`` and weights ``w``; the pre-activation is ``w . T + w0``."""

    w0: float
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).reshape(-1)
        w0 = float(self.w0)
        if not (math.isfinite(w0) and np.isfinite(w).all()):
            raise ValueError("weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "w", w)

    @classmethod
    def zeros(cls, d):
        return cls(0.0, np.zeros(d))

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float).reshape(-1)
        if arr.size < 2:
            raise DimensionMismatch("weight array needs w0 and at least one weight")
        return cls(arr[0], arr[1:])

    def as_array(self):
        return np.r_[self.w0, self.w]

    @property
    def d(self):
        return self.w.size

    def preactivation(self, data):
        X = data.features if isinstance(data, Dataset) else np.atleast_2d(np.asarray(data, dtype=float))
        if X.shape[1] != self.d:
            raise DimensionMismatch(f"weights have dimension {self.d}, data has {X.shape[1]}")
        return X @ self.w + self.w0


# ---------------------------------------------------------------------------
# file loaders


def _sniff_delimiter(line):
    if "\t" in line:
        return "\t"
    if "," in line:
        return ","
    return None  # whitespace


def _split(line, delim):
    return line.split(delim) if delim else line.split()


def _to_float(field, lineno):
    try:
        return float(field)
    except ValueError:
        raise DatasetError(f"non-numeric field {field.strip()!r}", line=lineno) from None


def load_ucr(path):
    """Read a UCR-style file: class label first, then features, one record per line.

    A two-class file has its labels mapped to ``{0, 1}`` in ascending label order.
    Returns ``(dataset, labels)`` where ``labels`` are the original class values.
    """
    rows, labels = [], []
    width = None
    delim = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            if delim is None:
                delim = _sniff_delimiter(line)
            fields = _split(line.strip(), delim)
            if width is None:
                width = len(fields)
                if width < 2:
                    raise DatasetError("need a label and at least one feature", line=lineno)
            elif len(fields) != width:
                raise DatasetError(f"ragged row: expected {width} fields, got {len(fields)}", line=lineno)
            values = [_to_float(f, lineno) for f in fields]
            labels.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise DatasetError(f"{path}: no records")
    classes = sorted(set(labels))
    if len(classes) > 2:
        raise DatasetError(f"{path}: {len(classes)} classes found; only two-class files can be mapped to {{0, 1}}")
    mapping = {c: float(i) for i, c in enumerate(classes)}
    targets = [mapping[c] for c in labels]
    return Dataset(np.array(rows), targets), np.array(labels)


def load_csv(path, target):
    """Read a CSV with a header row; ``target`` names the target column.

    All other columns become features, in header order.
    """
    if not target:
        raise DatasetError("csv format requires a target column name")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if target not in header:
            raise DatasetError(f"target column {target!r} not in header {header}", line=1)
        ti = header.index(target)
        rows, targets = [], []
        for lineno, fields in enumerate(reader, 2):
            if not fields or all(not f.strip() for f in fields):
                continue
            if len(fields) != len(header):
                raise DatasetError(f"ragged row: expected {len(header)} fields, got {len(fields)}", line=lineno)
            values = [_to_float(f, lineno) for f in fields]
            targets.append(values[ti])
            rows.append(values[:ti] + values[ti + 1:])
    if not rows:
        raise DatasetError(f"{path}: no records")
    if len(header) < 2:
        raise DatasetError(f"{path}: no feature columns")
    return Dataset(np.array(rows), targets)


def load_dataset(path, format="csv", target=None):
    if format == "ucr":
        return load_ucr(path)[0]
    if format == "csv":
        return load_csv(path, target)
    raise DatasetError(f"unknown format {format!r}")


def minmax_normalize(data):
    X = data.features
    lo, hi = X.min(axis=0), X.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    return Dataset((X - lo) / span, data.targets)


def write_csv(data, path, target="y"):
    header = [f"x{i + 1}" for i in range(data.d)] + [target]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for x, t in zip(data.features, data.targets):
            w.writerow([repr(float(v)) for v in x] + [repr(float(t))])


# ---------------------------------------------------------------------------
# synthetic data


def tent():
    """Three points ``(0, 0), (1, 1), (2, 0)``: the best constant is 0.5 with alternating errors."""
    return Dataset(np.array([[0.0], [1.0], [2.0]]), [0.0, 1.0, 0.0])


def planted(activation, n, d, rng, scale=1.0):
    """Targets produced exactly by one unit with random weights."""
    X = rng.uniform(-1.0, 1.0, size=(n, d))
    W = WeightVector(rng.normal(0.0, scale), rng.normal(0.0, scale, size=d))
    y = activation.evaluate(X @ W.w + W.w0)
    return Dataset(X, y), W


def random_dataset(n, d, rng, low=0.0, high=1.0):
    return Dataset(rng.uniform(-1.0, 1.0, size=(n, d)), rng.uniform(low, high, size=n))
