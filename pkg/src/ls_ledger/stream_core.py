"""Directed link-stream data model and fundamental stream operations.

A link stream couples a time interval, a node set, and a chronologically
ordered sequence of timestamped directed links. Timestamps are integer
seconds since the Unix epoch: the data source records blockchain median
times, and integers keep every equality test exact. Node identities are
dense integer handles; the handle <-> public-key mapping lives in a
:class:`NodeTable` side table so links stay small.
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassificationError, IntervalError, SelfLinkError


class NodeTable:
    """Bijective mapping between public-key strings and dense int handles."""

    def __init__(self, keys: Iterable[str] = ()):
        self._key_to_id: dict[str, int] = {}
        self._keys: list[str] = []
        for k in keys:
            self.intern(k)

    def intern(self, key: str) -> int:
        """Return the handle for ``key``, assigning the next free one if new."""
        h = self._key_to_id.get(key)
        if h is None:
            h = len(self._keys)
            self._key_to_id[key] = h
            self._keys.append(key)
        return h

    def id_of(self, key: str) -> int:
        try:
            return self._key_to_id[key]
        except KeyError:
            raise KeyError(f"unknown key {key!r}") from None

    def key_of(self, handle: int) -> str:
        if 0 <= handle < len(self._keys):
            return self._keys[handle]
        raise KeyError(f"unknown node handle {handle}")

    def keys(self) -> list[str]:
        return list(self._keys)

    def __contains__(self, key: str) -> bool:
        return key in self._key_to_id

    def __len__(self) -> int:
        return len(self._keys)


@dataclass(frozen=True, slots=True)
class Link:
    """One timestamped directed event, optionally weighted by an amount.

    ``amount`` is in currency centimes and present only for transaction
    links; certifications carry ``None``. Self-links are rejected here, at
    the earliest possible point.
    """

    t: int
    source: int
    target: int
    amount: int | None = None

    def __post_init__(self):
        if self.source == self.target:
            raise SelfLinkError(
                f"self-link rejected: ({self.t}, {self.source}, {self.target})"
            )
        if self.t < 0:
            raise ValueError(f"negative timestamp {self.t}")
        if self.amount is not None and self.amount < 0:
            raise ValueError(f"negative amount {self.amount}")

    def sort_key(self) -> tuple[int, int, int]:
        return (self.t, self.source, self.target)


@dataclass(frozen=True)
class LinkStream:
    """A time interval, a node set, and links sorted by (t, source, target).

    Instances are immutable after construction; every read operation is safe
    to share across threads. Use :func:`build_stream` rather than the raw
    constructor so sorting, interval defaulting, and node collection happen
    in one place.
    """

    interval: tuple[int, int]
    nodes: frozenset[int]
    links: tuple[Link, ...]

    def __post_init__(self):
        t0, t1 = self.interval
        if t0 > t1:
            raise IntervalError(f"empty interval [{t0}, {t1}]")
        prev = None
        for i, ln in enumerate(self.links):
            if not t0 <= ln.t <= t1:
                raise IntervalError(
                    f"link {i} at t={ln.t} outside interval [{t0}, {t1}]", index=i
                )
            if ln.source not in self.nodes or ln.target not in self.nodes:
                raise IntervalError(f"link {i} has endpoint outside node set", index=i)
            if prev is not None and ln.sort_key() < prev:
                raise IntervalError(f"links out of order at position {i}", index=i)
            prev = ln.sort_key()

    @property
    def link_count(self) -> int:
        return len(self.links)

    def times(self) -> list[int]:
        """Timestamps of the links, non-decreasing."""
        return [ln.t for ln in self.links]


class NodeClass(enum.Enum):
    MEMBER = "member"
    ANONYMOUS = "anonymous"


@dataclass(frozen=True)
class NodeClassification:
    """Partition of node handles into identified members and anonymous wallets.

    ``table`` is optional and only used to name keys in error messages.
    """

    members: frozenset[int]
    anonymous: frozenset[int]
    table: NodeTable | None = field(default=None, compare=False)

    def __post_init__(self):
        overlap = self.members & self.anonymous
        if overlap:
            raise ClassificationError(f"nodes classified twice: {sorted(overlap)}")

    def class_of(self, node: int) -> NodeClass:
        if node in self.members:
            return NodeClass.MEMBER
        if node in self.anonymous:
            return NodeClass.ANONYMOUS
        raise ClassificationError(f"unclassified node: {self.name_of(node)}")

    def nodes_of(self, cls: NodeClass) -> frozenset[int]:
        return self.members if cls is NodeClass.MEMBER else self.anonymous

    def require_covers(self, nodes: Iterable[int]) -> None:
        missing = set(nodes) - self.members - self.anonymous
        if missing:
            names = ", ".join(self.name_of(n) for n in sorted(missing))
            raise ClassificationError(f"unclassified node(s): {names}")

    def name_of(self, node: int) -> str:
        """Key string for error messages, falling back to the raw handle."""
        if self.table is not None:
            try:
                return repr(self.table.key_of(node))
            except KeyError:
                pass
        return str(node)


@dataclass(frozen=True)
class InducedGraph:
    """Static directed graph aggregated from a stream: one edge per node pair
    that interacted at least once."""

    nodes: frozenset[int]
    directed_edges: frozenset[tuple[int, int]]

    def undirected_edges(self) -> frozenset[tuple[int, int]]:
        """Symmetrized view; each edge as a (min, max) pair."""
        return frozenset((min(u, v), max(u, v)) for u, v in self.directed_edges)

    def undirected_adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {n: set() for n in self.nodes}
        for u, v in self.directed_edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


@dataclass(frozen=True)
class BinnedSeries:
    """Counts per fixed-width time bin; bin k covers [start + k*w, start + (k+1)*w)."""

    start: int
    bin_width: int
    values: tuple[int, ...]

    def bin_starts(self) -> list[int]:
        return [self.start + i * self.bin_width for i in range(len(self.values))]

    def total(self) -> int:
        return sum(self.values)


def build_stream(
    links: Iterable[Link], interval: tuple[int, int] | None = None
) -> LinkStream:
    """Assemble a stream from links, sorting by (t, source, target).

    The interval defaults to [min t, max t] of the links; an empty link list
    requires an explicit interval. Links outside an explicit interval are
    rejected with the offending link's index (position in the sorted order).
    """
    seq = sorted(links, key=Link.sort_key)
    if not seq and interval is None:
        raise IntervalError("empty link sequence requires an explicit interval")
    if interval is None:
        interval = (seq[0].t, seq[-1].t)
    nodes = set()
    for ln in seq:
        nodes.add(ln.source)
        nodes.add(ln.target)
    return LinkStream(interval=interval, nodes=frozenset(nodes), links=tuple(seq))


def induced_graph(s: LinkStream) -> InducedGraph:
    """Deduplicate the stream's (source, target) pairs into a static graph."""
    edges = frozenset((ln.source, ln.target) for ln in s.links)
    return InducedGraph(nodes=s.nodes, directed_edges=edges)


def activity(s: LinkStream, t: int) -> int:
    """Number of distinct node pairs active exactly at time ``t``.

    Duplicate links at the same instant count once: the measure is over the
    set of pairs, not link multiplicities. ``t`` must lie in the interval;
    instants between events simply yield 0.
    """
    t0, t1 = s.interval
    if not t0 <= t <= t1:
        raise IntervalError(f"t={t} outside interval [{t0}, {t1}]")
    times = s.times()
    lo = bisect_left(times, t)
    hi = bisect_right(times, t)
    return len({(ln.source, ln.target) for ln in s.links[lo:hi]})


def activity_series(s: LinkStream, bin_width: int) -> BinnedSeries:
    """Link counts per bin of width ``bin_width``, aligned to the interval start.

    Counts links with multiplicity, so the series total is exactly the number
    of links whatever the bin width.
    """
    if bin_width <= 0:
        raise ValueError(f"bin width must be positive, got {bin_width}")
    t0, t1 = s.interval
    n_bins = (t1 - t0) // bin_width + 1
    counts = np.zeros(n_bins, dtype=np.int64)
    if s.links:
        ts = np.fromiter((ln.t for ln in s.links), dtype=np.int64, count=len(s.links))
        counts = np.bincount((ts - t0) // bin_width, minlength=n_bins)
    return BinnedSeries(start=t0, bin_width=bin_width, values=tuple(int(c) for c in counts))


def rolling_sum(series: BinnedSeries, window: int) -> BinnedSeries:
    """Right-aligned rolling sum over ``window`` seconds of a binned series.

    The value at bin b sums the bins whose start lies in (b.start - window,
    b.start], current bin included; leading windows are partial sums over
    the bins available so far.
    """
    if window < series.bin_width:
        raise ValueError(
            f"window {window} smaller than bin width {series.bin_width}"
        )
    span = -(-window // series.bin_width)  # bins per window, ceil
    vals = np.asarray(series.values, dtype=np.int64)
    csum = np.concatenate(([0], np.cumsum(vals)))
    out = [int(csum[i + 1] - csum[max(0, i + 1 - span)]) for i in range(len(vals))]
    return BinnedSeries(start=series.start, bin_width=series.bin_width, values=tuple(out))


def substream_by_class(
    s: LinkStream,
    cls: NodeClassification,
    src_class: NodeClass,
    dst_class: NodeClass,
) -> LinkStream:
    """Restrict a stream to links from ``src_class`` nodes to ``dst_class`` nodes.

    The interval is left unchanged (all substreams share the parent's time
    interval) and the node set is the class-restricted node set, so nodes
    without any retained link stay present.
    """
    cls.require_covers(s.nodes)
    src_nodes = cls.nodes_of(src_class)
    dst_nodes = cls.nodes_of(dst_class)
    kept = tuple(
        ln for ln in s.links if ln.source in src_nodes and ln.target in dst_nodes
    )
    nodes = (s.nodes & src_nodes) | (s.nodes & dst_nodes)
    return LinkStream(interval=s.interval, nodes=frozenset(nodes), links=kept)


def pair_times(s: LinkStream) -> Mapping[tuple[int, int], list[int]]:
    """Sorted link times per directed (source, target) pair; shared index
    used by the temporal metrics."""
    idx: dict[tuple[int, int], list[int]] = {}
    for ln in s.links:
        idx.setdefault((ln.source, ln.target), []).append(ln.t)
    return idx
