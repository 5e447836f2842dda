"""Point collections, the supported metrics and the counted distance oracle.

Every distance evaluation in the package goes through :class:`MetricSpace`,
which keeps a running count of evaluations.  Batched evaluation
(:meth:`MetricSpace.block`) is the workhorse; it charges one query per
(row, column) pair, exactly as the scalar :meth:`MetricSpace.distance` would.
"""

from __future__ import annotations

import threading
from enum import Enum
from typing import Iterable, Sequence

import numpy as np
from rapidfuzz.distance import Levenshtein as _rf_levenshtein
from rapidfuzz.process import cdist as _rf_cdist
from scipy import sparse
from scipy.spatial.distance import cdist

__all__ = [
    "ConfigurationError",
    "MetricKind",
    "MetricSpace",
    "set_distance",
]


class ConfigurationError(ValueError):
    """Points are incompatible with the requested metric."""


class MetricKind(str, Enum):
    EUCLIDEAN = "euclidean"
    HAMMING = "hamming"
    JACCARD = "jaccard"
    LEVENSHTEIN = "levenshtein"
    CHEBYSHEV = "linf"

    @classmethod
    def parse(cls, value: str | "MetricKind") -> "MetricKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"chebyshev": "linf", "l_inf": "linf", "edit": "levenshtein", "l2": "euclidean"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ConfigurationError(f"unknown metric {value!r}") from None


def _as_bytes(point, i: int) -> bytes:
    if isinstance(point, bytes):
        return point
    if isinstance(point, (bytearray, memoryview)):
        return bytes(point)
    if isinstance(point, str):
        return point.encode("utf-8")
    raise ConfigurationError(f"point {i}: expected text (str or bytes), got {type(point).__name__}")


def _as_symbols(point, i: int) -> np.ndarray:
    if isinstance(point, (bytes, bytearray)):
        return np.frombuffer(bytes(point), dtype=np.uint8).astype(np.int64)
    if isinstance(point, str):
        return np.fromiter((ord(c) for c in point), dtype=np.int64, count=len(point))
    try:
        arr = np.asarray(point)
    except Exception as exc:  # pragma: no cover - defensive
        raise ConfigurationError(f"point {i}: not a symbol sequence") from exc
    if arr.ndim != 1 or not np.issubdtype(arr.dtype, np.integer):
        raise ConfigurationError(f"point {i}: expected a 1-d sequence of integer symbols")
    return arr.astype(np.int64)


def _as_token_set(point, i: int) -> tuple[int, ...]:
    if isinstance(point, (str, bytes)):
        raise ConfigurationError(f"point {i}: expected a set of integer token ids")
    try:
        ids = sorted(set(int(x) for x in point))
    except (TypeError, ValueError):
        raise ConfigurationError(f"point {i}: expected a set of integer token ids") from None
    if ids and ids[0] < 0:
        raise ConfigurationError(f"point {i}: token ids must be non-negative")
    return tuple(ids)


class MetricSpace:
    """A finite metric space with a monotone distance-query counter.

    ``points`` may be a 2-d array or a list of rows for the vector metrics,
    a list of ``str``/``bytes`` for Levenshtein, equal-length symbol strings
    for Hamming and iterables of non-negative ints for Jaccard.  Points are
    validated and converted once, here; queries never fail on type.
    """

    def __init__(self, points: Sequence | np.ndarray, metric: MetricKind | str):
        self.metric = MetricKind.parse(metric)
        self._lock = threading.Lock()
        self._count = 0
        n = len(points)
        if self.metric in (MetricKind.EUCLIDEAN, MetricKind.CHEBYSHEV):
            try:
                data = np.asarray(points, dtype=np.float64)
            except (TypeError, ValueError):
                raise ConfigurationError(
                    f"{self.metric.value} requires equal-dimension real vectors"
                ) from None
            if n == 0:
                data = data.reshape(0, 0)
            if data.ndim != 2:
                raise ConfigurationError(f"{self.metric.value} requires equal-dimension real vectors")
            if not np.all(np.isfinite(data)):
                raise ConfigurationError("vector coordinates must be finite")
            self._data = np.ascontiguousarray(data)
            self.points = [tuple(row) for row in self._data.tolist()]
        elif self.metric is MetricKind.HAMMING:
            seqs = [_as_symbols(p, i) for i, p in enumerate(points)]
            lengths = {len(s) for s in seqs}
            if len(lengths) > 1:
                raise ConfigurationError(f"hamming requires equal-length sequences, got lengths {sorted(lengths)}")
            length = lengths.pop() if lengths else 0
            self._data = np.vstack(seqs) if seqs else np.zeros((0, 0), dtype=np.int64)
            self._length = length
            self.points = [p if isinstance(p, (str, bytes)) else tuple(int(x) for x in p) for p in points]
        elif self.metric is MetricKind.JACCARD:
            sets = [_as_token_set(p, i) for i, p in enumerate(points)]
            vocab = 1 + max((s[-1] for s in sets if s), default=-1)
            indptr = np.zeros(n + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(s) for s in sets])
            indices = np.fromiter((x for s in sets for x in s), dtype=np.int64, count=int(indptr[-1]))
            mat = sparse.csr_matrix(
                (np.ones(len(indices), dtype=np.int64), indices, indptr), shape=(n, max(vocab, 1))
            )
            self._data = mat
            self._sizes = np.diff(indptr)
            self.points = sets
        elif self.metric is MetricKind.LEVENSHTEIN:
            self._data = [_as_bytes(p, i) for i, p in enumerate(points)]
            self.points = list(self._data)
        self.n = n

    # -- counter -----------------------------------------------------------
    @property
    def query_counter(self) -> int:
        return self._count

    def _charge(self, amount: int) -> None:
        with self._lock:
            self._count += amount

    def fork(self) -> "MetricSpace":
        """Same points and metric, fresh counter (storage is shared, read-only)."""
        other = object.__new__(MetricSpace)
        other.__dict__.update(self.__dict__)
        other._lock = threading.Lock()
        other._count = 0
        return other

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"MetricSpace(n={self.n}, metric={self.metric.value}, queries={self._count})"

    @property
    def dimension(self) -> int | None:
        if self.metric in (MetricKind.EUCLIDEAN, MetricKind.CHEBYSHEV):
            return int(self._data.shape[1])
        if self.metric is MetricKind.HAMMING:
            return self._length
        return None

    # -- evaluation --------------------------------------------------------
    def _check(self, idx: np.ndarray) -> None:
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise IndexError(f"point index out of range for space of size {self.n}")

    def block(self, rows: Iterable[int], cols: Iterable[int]) -> np.ndarray:
        """Distance matrix ``D[a, b] = d(rows[a], cols[b])``; charges len(rows)*len(cols)."""
        r = np.asarray(rows, dtype=np.int64).reshape(-1)
        c = np.asarray(cols, dtype=np.int64).reshape(-1)
        self._check(r)
        self._check(c)
        if r.size == 0 or c.size == 0:
            return np.zeros((r.size, c.size))
        out = self._evaluate(r, c)
        self._charge(int(r.size) * int(c.size))
        return out

    def distance(self, i: int, j: int) -> float:
        return float(self.block([i], [j])[0, 0])

    def _evaluate(self, r: np.ndarray, c: np.ndarray) -> np.ndarray:
        kind = self.metric
        if kind is MetricKind.EUCLIDEAN:
            x, y = self._data[r], self._data[c]
            d = cdist(x, y, "euclidean")
            # squares of tiny differences underflow to 0; redo those pairs scaled
            for a, b in zip(*np.nonzero(d == 0.0)):
                diff = x[a] - y[b]
                scale = np.abs(diff).max()
                if scale > 0.0:
                    d[a, b] = scale * np.sqrt(np.sum((diff / scale) ** 2))
            return d
        if kind is MetricKind.CHEBYSHEV:
            return cdist(self._data[r], self._data[c], "chebyshev")
        if kind is MetricKind.HAMMING:
            if self._length == 0:
                return np.zeros((r.size, c.size))
            frac = cdist(self._data[r], self._data[c], "hamming")
            return np.rint(frac * self._length)
        if kind is MetricKind.JACCARD:
            inter = (self._data[r] @ self._data[c].T).toarray().astype(np.float64)
            union = self._sizes[r][:, None] + self._sizes[c][None, :] - inter
            with np.errstate(invalid="ignore", divide="ignore"):
                d = 1.0 - inter / union
            d[union == 0] = 0.0
            return d
        # Levenshtein
        strings = self._data
        return _rf_cdist(
            [strings[i] for i in r],
            [strings[j] for j in c],
            scorer=_rf_levenshtein.distance,
            dtype=np.int64,
        ).astype(np.float64)


def set_distance(space: MetricSpace, A: Iterable[int], B: Iterable[int]) -> tuple[float, tuple[int, int]]:
    """Bichromatic closest pair between disjoint index sets ``A`` and ``B``.

    Exhaustive: charges ``|A|*|B|`` queries.  Among minimizing pairs the
    lexicographically smallest ``(a, b)`` is returned as the witness.
    """
    a = np.unique(np.asarray(list(A), dtype=np.int64))
    b = np.unique(np.asarray(list(B), dtype=np.int64))
    if a.size == 0 or b.size == 0:
        raise ValueError("set_distance needs two nonempty index sets")
    if np.intersect1d(a, b).size:
        raise ValueError("set_distance needs disjoint index sets")
    d = space.block(a, b)
    k = int(np.argmin(d))
    ia, ib = divmod(k, b.size)
    return float(d[ia, ib]), (int(a[ia]), int(b[ib]))
