"""Initial forests: a partition of the points plus a spanning tree per part."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .metric import MetricSpace

log = logging.getLogger(__name__)

Edge = tuple[int, int, float]

__all__ = [
    "Edge",
    "Partition",
    "InitialForest",
    "KCenterResult",
    "gonzalez_kcenter",
    "exact_component_mst",
    "build_initial_forest",
    "truncated_kruskal_forest",
    "gamma_overlap",
    "full_distance_edges",
    "default_t",
    "save_forest",
    "load_forest",
]

#: gamma_overlap and truncated Kruskal materialise all pairwise distances
MAX_FULL_MATRIX_N = 2000


def default_t(n: int) -> int:
    return max(1, math.isqrt(n))


@dataclass
class Partition:
    assignment: list[int]
    members: list[list[int]]

    @property
    def t(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return len(self.assignment)

    @classmethod
    def from_assignment(cls, assignment: Sequence[int]) -> "Partition":
        assignment = [int(a) for a in assignment]
        t = max(assignment) + 1 if assignment else 0
        members: list[list[int]] = [[] for _ in range(t)]
        for x, c in enumerate(assignment):
            members[c].append(x)
        if any(not m for m in members):
            raise ValueError("partition has an empty component")
        return cls(assignment, members)

    def validate(self) -> None:
        seen = [False] * self.n
        for c, mem in enumerate(self.members):
            if not mem:
                raise ValueError(f"component {c} is empty")
            for x in mem:
                if self.assignment[x] != c or seen[x]:
                    raise ValueError(f"point {x} inconsistently assigned")
                seen[x] = True
        if not all(seen):
            raise ValueError("some point is not assigned")


@dataclass
class InitialForest:
    partition: Partition
    trees: list[list[Edge]]
    forest_weight: float = field(default=float("nan"))

    def __post_init__(self):
        if math.isnan(self.forest_weight):
            self.forest_weight = math.fsum(w for tree in self.trees for _, _, w in tree)

    @property
    def t(self) -> int:
        return self.partition.t

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def edges(self) -> list[Edge]:
        return [e for tree in self.trees for e in tree]

    def validate(self) -> None:
        """Each tree spans exactly its component; raise ValueError otherwise."""
        self.partition.validate()
        if len(self.trees) != self.t:
            raise ValueError("one tree per component expected")
        for c, (mem, tree) in enumerate(zip(self.partition.members, self.trees)):
            if len(tree) != len(mem) - 1:
                raise ValueError(f"component {c}: {len(tree)} edges for {len(mem)} points")
            ds = DisjointSet(mem)
            for u, v, _ in tree:
                if self.partition.assignment[u] != c or self.partition.assignment[v] != c:
                    raise ValueError(f"component {c}: edge ({u}, {v}) leaves the component")
                if not ds.merge(u, v):
                    raise ValueError(f"component {c}: edge ({u}, {v}) closes a cycle")
            if ds.n_subsets != 1:
                raise ValueError(f"component {c}: tree does not span")


@dataclass
class KCenterResult:
    centers: list[int]
    radii: list[float]
    assignment: dict[int, int]  # point -> position of its nearest center in ``centers``


def gonzalez_kcenter(
    space: MetricSpace, members: Sequence[int], k: int, first: int | None = None
) -> KCenterResult:
    """Farthest-first traversal on ``members`` with ``k`` centers.

    ``radii[j]`` is the covering radius of the first ``j + 1`` centers.
    Farthest-point ties go to the smallest point index; a point equidistant to
    several centers stays with the earliest-selected one.  Uses exactly
    ``k * len(members)`` distance queries.
    """
    mem = np.asarray(members, dtype=np.int64)
    m = mem.size
    if not 1 <= k <= m:
        raise ValueError(f"k={k} out of range for {m} members")
    if first is None:
        first = int(mem.min())
    hits = np.flatnonzero(mem == first)
    if hits.size == 0:
        raise ValueError(f"first center {first} is not a member")
    pos = int(hits[0])

    is_center = np.zeros(m, dtype=bool)
    nearest = np.zeros(m, dtype=np.int64)
    mind = space.block([first], mem)[0]
    is_center[pos] = True
    centers = [int(first)]
    radii = [float(mind.max())]
    for j in range(1, k):
        cand = np.where(is_center, -np.inf, mind)
        best = cand.max()
        pos = int(np.flatnonzero(cand == best)[np.argmin(mem[cand == best])])
        c = int(mem[pos])
        is_center[pos] = True
        centers.append(c)
        d = space.block([c], mem)[0]
        closer = d < mind
        nearest[closer] = j
        mind = np.where(closer, d, mind)
        radii.append(float(mind.max()))
    # a duplicate point promoted to center still owns itself
    for j, c in enumerate(centers):
        nearest[np.flatnonzero(mem == c)[0]] = j
    assignment = {int(x): int(a) for x, a in zip(mem, nearest)}
    return KCenterResult(centers, radii, assignment)


def exact_component_mst(space: MetricSpace, members: Sequence[int]) -> list[Edge]:
    """Dense Prim over the complete graph on ``members``.

    Starts from the smallest index; weight ties pick the smallest vertex index,
    and a tied attachment keeps the earlier parent.
    """
    mem = np.unique(np.asarray(members, dtype=np.int64))
    if mem.size == 0:
        raise ValueError("exact_component_mst needs at least one point")
    m = mem.size
    in_tree = np.zeros(m, dtype=bool)
    in_tree[0] = True
    best = space.block([mem[0]], mem[1:])[0] if m > 1 else np.zeros(0)
    best = np.concatenate([[np.inf], best])
    parent = np.zeros(m, dtype=np.int64)
    edges: list[Edge] = []
    for _ in range(m - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))  # first minimum -> smallest index (mem is sorted)
        in_tree[v] = True
        u = int(parent[v])
        a, b = int(mem[u]), int(mem[v])
        edges.append((min(a, b), max(a, b), float(best[v])))
        rest = np.flatnonzero(~in_tree)
        if rest.size == 0:
            break
        d = space.block([mem[v]], mem[rest])[0]
        closer = d < best[rest]
        parent[rest[closer]] = v
        best[rest[closer]] = d[closer]
    return edges


def build_initial_forest(space: MetricSpace, t: int | None = None, first: int = 0) -> InitialForest:
    """k-center partition (k = t) followed by an exact MST per component."""
    n = space.n
    if t is None:
        t = default_t(n)
    if not 1 <= t <= n:
        raise ValueError(f"t={t} out of range for n={n}")
    kc = gonzalez_kcenter(space, range(n), t, first=first)
    assignment = [kc.assignment[x] for x in range(n)]
    partition = Partition.from_assignment(assignment)
    trees = [exact_component_mst(space, mem) for mem in partition.members]
    return InitialForest(partition, trees)


def full_distance_edges(space: MetricSpace, max_n: int = MAX_FULL_MATRIX_N):
    """All n(n-1)/2 edges as arrays ``(u, v, w)`` with ``u < v``, row-major order."""
    n = space.n
    if n > max_n:
        raise ValueError(f"n={n} exceeds the full distance-matrix limit of {max_n}")
    us, vs, ws = [], [], []
    idx = np.arange(n)
    for i in range(n - 1):
        us.append(np.full(n - i - 1, i))
        vs.append(idx[i + 1 :])
        ws.append(space.block([i], idx[i + 1 :])[0])
    if not us:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    return np.concatenate(us), np.concatenate(vs), np.concatenate(ws)


def _components_from(ds: DisjointSet, n: int) -> Partition:
    label: dict[int, int] = {}
    assignment = []
    for x in range(n):
        root = ds[x]
        if root not in label:
            label[root] = len(label)
        assignment.append(label[root])
    return Partition.from_assignment(assignment)


def truncated_kruskal_forest(space: MetricSpace, t: int) -> InitialForest:
    """Kruskal on the full distance matrix, stopped with ``t`` components left.

    Components are numbered by their smallest point index.
    """
    n = space.n
    if not 1 <= t <= n:
        raise ValueError(f"t={t} out of range for n={n}")
    u, v, w = full_distance_edges(space)
    order = np.lexsort((v, u, w))
    ds = DisjointSet(range(n))
    chosen: list[Edge] = []
    for e in order:
        if len(chosen) == n - t:
            break
        a, b = int(u[e]), int(v[e])
        if ds.merge(a, b):
            chosen.append((a, b, float(w[e])))
    partition = _components_from(ds, n)
    trees: list[list[Edge]] = [[] for _ in range(partition.t)]
    for a, b, wt in chosen:
        trees[partition.assignment[a]].append((a, b, wt))
    return InitialForest(partition, trees)


def gamma_overlap(space: MetricSpace, forest: InitialForest, max_n: int = MAX_FULL_MATRIX_N) -> float:
    """Forest weight over the largest within-component weight of any MST.

    Kruskal with ties resolved in favour of within-component edges returns,
    among all minimum spanning trees, one that maximises the within-component
    weight, so the maximum in the definition is attained without enumerating
    MSTs.  Returns 1.0 for 0/0 and ``inf`` (with a warning) for x/0.
    """
    n = space.n
    u, v, w = full_distance_edges(space, max_n)
    assign = np.asarray(forest.partition.assignment)
    external = (assign[u] != assign[v]).astype(np.int8) if u.size else np.zeros(0, np.int8)
    order = np.lexsort((v, u, external, w))
    if w.size > 1:
        ws = np.sort(w)
        n_ties = int(np.count_nonzero(ws[1:] == ws[:-1]))
        if n_ties:
            log.debug("gamma_overlap: %d tied edge weights, resolved internal-first", n_ties)
    ds = DisjointSet(range(n))
    internal: list[float] = []
    added = 0
    for e in order:
        if added == n - 1:
            break
        if ds.merge(int(u[e]), int(v[e])):
            added += 1
            if not external[e]:
                internal.append(float(w[e]))
    denom = math.fsum(internal)
    num = forest.forest_weight
    if denom == 0.0:
        if num == 0.0:
            return 1.0
        warnings.warn("no MST edge lies inside a component; gamma is unbounded", RuntimeWarning)
        return math.inf
    return num / denom


def save_forest(forest: InitialForest, path: str | Path) -> None:
    """Text format: ``n t``, the n component ids, then ``u v w c`` per edge."""
    lines = [f"{forest.n} {forest.t}", " ".join(map(str, forest.partition.assignment))]
    for c, tree in enumerate(forest.trees):
        for a, b, wt in tree:
            lines.append(f"{a} {b} {wt!r} {c}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_forest(path: str | Path) -> InitialForest:
    text = Path(path).read_text().splitlines()
    try:
        n, t = (int(x) for x in text[0].split())
        assignment = [int(x) for x in text[1].split()] if n else []
    except (IndexError, ValueError):
        raise ValueError(f"{path}: malformed forest header") from None
    if len(assignment) != n:
        raise ValueError(f"{path}: expected {n} component ids, got {len(assignment)}")
    partition = Partition.from_assignment(assignment)
    if partition.t != t:
        raise ValueError(f"{path}: header says t={t}, assignment has {partition.t}")
    trees: list[list[Edge]] = [[] for _ in range(t)]
    for lineno, line in enumerate(text[2:], start=3):
        if not line.strip():
            continue
        try:
            a, b, wt, c = line.split()
            trees[int(c)].append((int(a), int(b), float(wt)))
        except (ValueError, IndexError):
            raise ValueError(f"{path}:{lineno}: malformed edge line") from None
    forest = InitialForest(partition, trees)
    forest.validate()
    return forest
