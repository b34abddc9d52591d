"""Static analyses of induced graphs.

Degrees are taken on the deduplicated directed edge set; clustering,
triangles, distances, and the null model all work on the symmetrized
(undirected) view. Per-pair link multiplicities are deliberately not
handled here, they belong to the cross-stream interplay metrics.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .errors import DegenerateModelError, UndefinedCorrelationError
from .stream_core import InducedGraph


@dataclass(frozen=True)
class DegreeReport:
    in_degree: dict[int, int]
    out_degree: dict[int, int]

    def in_histogram(self) -> Counter[int]:
        return Counter(self.in_degree.values())

    def out_histogram(self) -> Counter[int]:
        return Counter(self.out_degree.values())


def degree_report(g: InducedGraph) -> DegreeReport:
    """Exact in/out degrees of every node on the deduplicated edge set."""
    in_deg = dict.fromkeys(g.nodes, 0)
    out_deg = dict.fromkeys(g.nodes, 0)
    for u, v in g.directed_edges:
        out_deg[u] += 1
        in_deg[v] += 1
    return DegreeReport(in_degree=in_deg, out_degree=out_deg)


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    pairs: tuple[tuple[int, float, float], ...]  # (node, x, y) scatter export


def degree_correlation(
    xs: Mapping[int, float], ys: Mapping[int, float]
) -> CorrelationResult:
    """Pearson product-moment coefficient of two per-node series.

    Both series must cover the same node set with at least two nodes, and
    neither may be constant.
    """
    if set(xs) != set(ys):
        raise ValueError("per-node series cover different node sets")
    nodes = sorted(xs)
    if len(nodes) < 2:
        raise ValueError("correlation needs at least two nodes")
    xv = [float(xs[n]) for n in nodes]
    yv = [float(ys[n]) for n in nodes]
    n = len(nodes)
    mx = sum(xv) / n
    my = sum(yv) / n
    sxx = sum((x - mx) ** 2 for x in xv)
    syy = sum((y - my) ** 2 for y in yv)
    if sxx == 0.0 or syy == 0.0:
        raise UndefinedCorrelationError("zero variance on one of the series")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xv, yv))
    r = sxy / math.sqrt(sxx * syy)
    pairs = tuple((node, x, y) for node, x, y in zip(nodes, xv, yv))
    return CorrelationResult(r=r, pairs=pairs)


@dataclass(frozen=True)
class ClusteringReport:
    """Per-node neighborhood density on the undirected view.

    Nodes of degree < 2 get coefficient 0 and are included in ``average``;
    ``average_active`` restricts the mean to nodes of degree >= 2 since both
    conventions circulate.
    """

    coefficients: dict[int, float]
    average: float
    average_active: float

    def histogram(self, bins: int = 10) -> Counter[int]:
        """Coefficient counts per [i/bins, (i+1)/bins) bucket; 1.0 lands in
        the last bucket."""
        hist: Counter[int] = Counter()
        for c in self.coefficients.values():
            hist[min(int(c * bins), bins - 1)] += 1
        return hist


def clustering(g: InducedGraph) -> ClusteringReport:
    """Local clustering coefficient of every node: edges among its
    neighbors divided by k*(k-1)/2."""
    adj = g.undirected_adjacency()
    coeffs: dict[int, float] = {}
    active: list[float] = []
    for node in g.nodes:
        nbrs = adj[node]
        k = len(nbrs)
        if k < 2:
            coeffs[node] = 0.0
            continue
        links = 0
        for u in nbrs:
            # count each neighbor pair once via the node order
            links += sum(1 for w in adj[u] if w in nbrs and w > u)
        c = 2.0 * links / (k * (k - 1))
        coeffs[node] = c
        active.append(c)
    n = len(g.nodes)
    return ClusteringReport(
        coefficients=coeffs,
        average=sum(coeffs.values()) / n if n else 0.0,
        average_active=sum(active) / len(active) if active else 0.0,
    )


def triangle_count(g: InducedGraph) -> int:
    """Number of unordered node triples mutually adjacent in the undirected view."""
    return _triangles_in_adjacency(g.undirected_adjacency())


def _triangles_in_adjacency(adj: Mapping[int, set[int]]) -> int:
    count = 0
    for u, nbrs in adj.items():
        for v in nbrs:
            if v <= u:
                continue
            # common neighbors above v close a triangle exactly once
            count += sum(1 for w in (nbrs & adj[v]) if w > v)
    return count


def triangles_per_node(g: InducedGraph) -> dict[int, int]:
    """Triangles through each node; cross-checks the clustering formula."""
    adj = g.undirected_adjacency()
    out = dict.fromkeys(g.nodes, 0)
    for u, nbrs in adj.items():
        for v in nbrs:
            if v <= u:
                continue
            for w in nbrs & adj[v]:
                if w > v:
                    out[u] += 1
                    out[v] += 1
                    out[w] += 1
    return out


@dataclass(frozen=True)
class NullModelResult:
    observed: int
    samples: tuple[int, ...]
    mean: float
    std: float
    ratio: float  # observed / mean


def rewired_samples(g: InducedGraph, samples: int, seed: int):
    """Degree-preserving randomizations of the undirected view.

    Each sample applies 10 * |edges| double-edge swap attempts; attempts
    that would create a self-loop or duplicate edge are skipped, so rigid
    graphs such as complete graphs come back intact. Sample i uses its own
    generator derived from (seed, i), which makes the sequence independent
    of evaluation order.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    edges = sorted(g.undirected_edges())
    if len(edges) < 2:
        raise DegenerateModelError(
            f"need at least 2 undirected edges to rewire, got {len(edges)}"
        )
    degree_before = _degree_sequence(edges, g.nodes)
    for i in range(samples):
        rng = random.Random(seed * 1_000_003 + i)
        rewired = _double_edge_swap(edges, rng, attempts=10 * len(edges))
        if _degree_sequence(rewired, g.nodes) != degree_before:
            raise AssertionError("rewiring changed the degree sequence")
        yield rewired


def null_model_triangles(
    g: InducedGraph, samples: int = 100, seed: int = 0
) -> NullModelResult:
    """Triangle counts under the degree-preserving null model; see
    :func:`rewired_samples` for the randomization."""
    observed = triangle_count(g)
    counts = [
        _triangles_in_edges(rewired, g.nodes)
        for rewired in rewired_samples(g, samples, seed)
    ]

    mean = sum(counts) / len(counts)
    var = sum((c - mean) ** 2 for c in counts) / len(counts)
    if mean > 0:
        ratio = observed / mean
    else:
        ratio = math.inf if observed else math.nan
    return NullModelResult(
        observed=observed,
        samples=tuple(counts),
        mean=mean,
        std=math.sqrt(var),
        ratio=ratio,
    )


def _degree_sequence(edges: list[tuple[int, int]], nodes: Iterable[int]) -> tuple:
    deg = dict.fromkeys(nodes, 0)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return tuple(sorted(deg.items()))


def _double_edge_swap(
    edges: list[tuple[int, int]], rng: random.Random, attempts: int
) -> list[tuple[int, int]]:
    edges = list(edges)
    present = set(edges)
    m = len(edges)
    for _ in range(attempts):
        i = rng.randrange(m)
        j = rng.randrange(m)
        if i == j:
            continue
        u, v = edges[i]
        x, y = edges[j]
        if rng.random() < 0.5:
            x, y = y, x
        # propose (u, x) and (v, y)
        if u == x or v == y:
            continue
        e1 = (min(u, x), max(u, x))
        e2 = (min(v, y), max(v, y))
        if e1 in present or e2 in present:
            continue
        present.discard(edges[i])
        present.discard(edges[j])
        present.add(e1)
        present.add(e2)
        edges[i] = e1
        edges[j] = e2
    return edges


def _triangles_in_edges(edges: list[tuple[int, int]], nodes: Iterable[int]) -> int:
    adj: dict[int, set[int]] = {n: set() for n in nodes}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return _triangles_in_adjacency(adj)


def pair_distance(g: InducedGraph, u: int, v: int) -> int | None:
    """Breadth-first shortest path length between u and v on the undirected
    view; None when unreachable."""
    if u not in g.nodes or v not in g.nodes:
        missing = u if u not in g.nodes else v
        raise KeyError(f"node {missing} not in graph")
    return _bfs_from(g.undirected_adjacency(), u, targets={v}).get(v)


def _bfs_from(
    adj: Mapping[int, set[int]], source: int, targets: set[int] | None = None
) -> dict[int, int]:
    """Hop counts from source; stops early once all targets are found."""
    dist = {source: 0}
    remaining = set(targets) - {source} if targets is not None else None
    frontier = [source]
    d = 0
    while frontier and (remaining is None or remaining):
        d += 1
        nxt = []
        for node in frontier:
            for nbr in adj[node]:
                if nbr not in dist:
                    dist[nbr] = d
                    nxt.append(nbr)
                    if remaining is not None:
                        remaining.discard(nbr)
        frontier = nxt
    return dist


@dataclass(frozen=True)
class DistanceDistribution:
    counts: dict[int, int]  # finite distance -> number of pairs
    unreachable: int

    def total(self) -> int:
        return sum(self.counts.values()) + self.unreachable

    def shares(self) -> dict[int, float]:
        n = self.total()
        return {d: c / n for d, c in sorted(self.counts.items())} if n else {}


def distance_distribution(
    pairs: Iterable[tuple[int, int]], g: InducedGraph
) -> DistanceDistribution:
    """Histogram of undirected shortest-path distances over node pairs.

    One BFS per distinct source, cut off as soon as that source's targets
    are all reached; intended for the pairs that transact without a
    certification, measured in the undirected certification graph.
    """
    by_source: dict[int, set[int]] = {}
    for u, v in pairs:
        if u not in g.nodes or v not in g.nodes:
            missing = u if u not in g.nodes else v
            raise KeyError(f"node {missing} not in graph")
        by_source.setdefault(u, set()).add(v)
    adj = g.undirected_adjacency()
    counts: Counter[int] = Counter()
    unreachable = 0
    for source, targets in by_source.items():
        dist = _bfs_from(adj, source, targets=targets)
        for v in targets:
            if v in dist:
                counts[dist[v]] += 1
            else:
                unreachable += 1
    return DistanceDistribution(counts=dict(sorted(counts.items())), unreachable=unreachable)
