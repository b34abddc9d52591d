"""Independent brute-force reference implementations.

Everything here works on plain tuples and exhaustive scans, deliberately
ignoring the indexed code paths under test. Keep it that way: these are the
other side of every dual-route check.
"""

from __future__ import annotations

from itertools import combinations


def two_closure(events: list[tuple[int, int, int]], i: int) -> int | None:
    """Linear scan: latest reverse link at or before the query's time."""
    t, u, v = events[i]
    best = None
    for t2, a, b in events:
        if t2 <= t and a == v and b == u and (best is None or t2 > best):
            best = t2
    return None if best is None else t - best


def three_closure(events: list[tuple[int, int, int]], i: int) -> int | None:
    """Quadratic scan per link over all support pairs, strictly earlier
    than the query's time, closing the directed cycle u -> v -> w -> u."""
    t, u, v = events[i]
    best = None
    for t1, a, b in events:
        if t1 >= t or a != v:
            continue
        w = b
        for t2, c, d in events:
            if t2 < t and c == w and d == u:
                start = min(t1, t2)
                if best is None or start > best:
                    best = start
    return None if best is None else t - best


def triangle_count(nodes, und_edges: set[tuple[int, int]]) -> int:
    """Full enumeration over all node triples."""
    nodes = sorted(nodes)
    count = 0
    for a, b, c in combinations(nodes, 3):
        if (
            (a, b) in und_edges
            and (a, c) in und_edges
            and (b, c) in und_edges
        ):
            count += 1
    return count


def triangles_through(node, nodes, und_edges: set[tuple[int, int]]) -> int:
    cnt = 0
    for a, b, c in combinations(sorted(nodes), 3):
        if node not in (a, b, c):
            continue
        if (a, b) in und_edges and (a, c) in und_edges and (b, c) in und_edges:
            cnt += 1
    return cnt


def undirected_edge_set(directed_edges) -> set[tuple[int, int]]:
    return {(min(u, v), max(u, v)) for u, v in directed_edges}
