"""Loading the four line-oriented data families and writing result tables.

Formats (blank lines are ignored everywhere):

* ``vectors``   - whitespace-separated reals per line
* ``strings``   - one string per line, compared as raw UTF-8 bytes
* ``sets``      - whitespace-separated tokens per line, interned to integer
                  ids in order of first appearance in the file
* ``sequences`` - one fixed-length symbol string per line

Sampling is a seeded shuffle with numpy's PCG64 bit generator:
``Generator(PCG64(seed)).permutation(N)[:sample_size]``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from pathlib import Path

import numpy as np

from .metric import ConfigurationError, MetricKind, MetricSpace

__all__ = [
    "DataFormat",
    "DatasetSpec",
    "DatasetError",
    "ResultRow",
    "RESULT_HEADER",
    "load_dataset",
    "read_points",
    "sample_order",
    "write_results",
    "read_results",
    "uniform_vectors",
    "random_strings",
    "random_sets",
    "random_sequences",
    "synthetic_space",
]


class DatasetError(ValueError):
    pass


class DataFormat(str, Enum):
    VECTORS = "vectors"
    STRINGS = "strings"
    SETS = "sets"
    SEQUENCES = "sequences"


COMPATIBLE = {
    DataFormat.VECTORS: {MetricKind.EUCLIDEAN, MetricKind.CHEBYSHEV},
    DataFormat.STRINGS: {MetricKind.LEVENSHTEIN},
    DataFormat.SETS: {MetricKind.JACCARD},
    DataFormat.SEQUENCES: {MetricKind.HAMMING, MetricKind.LEVENSHTEIN},
}


@dataclass
class DatasetSpec:
    path: str | Path
    format: DataFormat | str
    metric: MetricKind | str
    sample_size: int | None = None
    seed: int = 0

    def __post_init__(self):
        self.format = DataFormat(str(self.format).lower()) if not isinstance(self.format, DataFormat) else self.format
        self.metric = MetricKind.parse(self.metric)
        if self.metric not in COMPATIBLE[self.format]:
            raise ConfigurationError(f"metric {self.metric.value} cannot be used with {self.format.value} data")
        if self.sample_size is not None and self.sample_size < 1:
            raise ConfigurationError("sample_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")


def read_points(path: str | Path, fmt: DataFormat | str) -> list:
    """Parse every non-blank line of ``path`` in file order."""
    fmt = DataFormat(fmt)
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    points: list = []
    vocab: dict[bytes, int] = {}
    width = None
    for lineno, line in enumerate(raw.split(b"\n"), start=1):
        line = line.rstrip(b"\r")
        if not line.strip():
            continue
        if fmt is DataFormat.VECTORS:
            try:
                row = [float(x) for x in line.split()]
            except ValueError:
                raise DatasetError(f"{path}:{lineno}: not a row of reals") from None
            if not all(math.isfinite(x) for x in row):
                raise DatasetError(f"{path}:{lineno}: non-finite coordinate")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DatasetError(f"{path}:{lineno}: expected {width} coordinates, got {len(row)}")
            points.append(row)
        elif fmt is DataFormat.STRINGS:
            points.append(bytes(line))
        elif fmt is DataFormat.SETS:
            ids = {vocab.setdefault(tok, len(vocab)) for tok in line.split()}
            points.append(tuple(sorted(ids)))
        else:
            seq = line.strip()
            if width is None:
                width = len(seq)
            elif len(seq) != width:
                raise DatasetError(f"{path}:{lineno}: sequence length {len(seq)}, expected {width}")
            points.append(bytes(seq))
    return points


def sample_order(total: int, sample_size: int | None, seed: int) -> np.ndarray:
    if sample_size is not None and sample_size > total:
        raise DatasetError(f"sample_size {sample_size} exceeds the {total} available rows")
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(total)
    return perm if sample_size is None else perm[:sample_size]


def load_dataset(spec: DatasetSpec) -> MetricSpace:
    """Read, sample and shuffle; never evaluates a distance."""
    points = read_points(spec.path, spec.format)
    order = sample_order(len(points), spec.sample_size, spec.seed)
    return MetricSpace([points[i] for i in order], spec.metric)


# -- synthetic data ---------------------------------------------------------

def uniform_vectors(n: int, dim: int = 8, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).random((n, dim))


def random_strings(n: int, seed: int = 0, alphabet: bytes = b"abcdefgh", min_len: int = 3, max_len: int = 10) -> list[bytes]:
    rng = np.random.default_rng(seed)
    letters = np.frombuffer(alphabet, dtype=np.uint8)
    lengths = rng.integers(min_len, max_len + 1, size=n)
    return [letters[rng.integers(0, len(letters), size=k)].tobytes() for k in lengths]


def random_sets(n: int, seed: int = 0, vocab: int = 30, max_size: int = 8) -> list[tuple[int, ...]]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        k = int(rng.integers(1, max_size + 1))
        out.append(tuple(sorted(rng.choice(vocab, size=k, replace=False).tolist())))
    return out


def random_sequences(n: int, length: int = 24, seed: int = 0, alphabet: bytes = b"ACGT") -> list[bytes]:
    rng = np.random.default_rng(seed)
    letters = np.frombuffer(alphabet, dtype=np.uint8)
    return [letters[rng.integers(0, len(letters), size=length)].tobytes() for _ in range(n)]


def synthetic_space(metric: MetricKind | str, n: int, seed: int = 0, dim: int = 8) -> MetricSpace:
    """Random points of the natural kind for ``metric``."""
    metric = MetricKind.parse(metric)
    if metric in (MetricKind.EUCLIDEAN, MetricKind.CHEBYSHEV):
        return MetricSpace(uniform_vectors(n, dim, seed), metric)
    if metric is MetricKind.HAMMING:
        return MetricSpace(random_sequences(n, seed=seed), metric)
    if metric is MetricKind.JACCARD:
        return MetricSpace(random_sets(n, seed=seed), metric)
    return MetricSpace(random_strings(n, seed=seed), metric)


# -- result tables ----------------------------------------------------------

@dataclass
class ResultRow:
    algorithm: str
    b: int
    tree_weight: float
    forest_weight: float
    opt_weight: float | None
    alpha: float
    cost_ratio: float | None
    completion_ratio: float | None
    distance_calls: int
    elapsed_ms: float
    seed: int


RESULT_HEADER = [f.name for f in fields(ResultRow)]
_FLOATS = {"tree_weight", "forest_weight", "opt_weight", "alpha", "cost_ratio", "completion_ratio", "elapsed_ms"}
_INTS = {"b", "distance_calls", "seed"}


def _fmt(name: str, value) -> str:
    if value is None:
        return ""
    if name in _FLOATS:
        return format(float(value), ".12g")
    return str(value)


def write_results(rows: list[ResultRow], path: str | Path) -> None:
    """CSV with a fixed header; floats at 12 significant digits, blanks for None."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULT_HEADER)
            for row in rows:
                d = asdict(row)
                writer.writerow([_fmt(k, d[k]) for k in RESULT_HEADER])
    except OSError as exc:
        raise DatasetError(f"cannot write {path}: {exc}") from exc


def read_results(path: str | Path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULT_HEADER:
            raise DatasetError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            vals = {}
            for k, v in rec.items():
                if v == "":
                    vals[k] = None
                elif k in _FLOATS:
                    vals[k] = float(v)
                elif k in _INTS:
                    vals[k] = int(v)
                else:
                    vals[k] = v
            rows.append(ResultRow(**vals))
    return rows
