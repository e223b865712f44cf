"""Exact graph edit distance (unit costs) by best-first search over partial node maps."""
from __future__ import annotations

import heapq
import itertools
from collections import Counter

from ..errors import TooLargeError
from ..geometry import Floorplan
from ..graph import DEFAULT_EPS, BubbleGraph, extract_bubble_graph

MAX_NODES = 12


def _lower_bound(labels1, labels2, unassigned, unused, edges1, edges2) -> int:
    common = sum((Counter(labels1[i] for i in unassigned) & Counter(labels2[j] for j in unused)).values())
    node_lb = max(len(unassigned), len(unused)) - common
    r1 = sum(1 for a, b in edges1 if a in unassigned or b in unassigned)
    r2 = sum(1 for a, b in edges2 if a in unused or b in unused)
    return node_lb + abs(r1 - r2)


def graph_edit_distance(g1: BubbleGraph, g2: BubbleGraph, max_nodes: int = MAX_NODES) -> int:
    """Minimum number of node insertions/deletions/relabelings and edge insertions/deletions."""
    n1, n2 = len(g1.nodes), len(g2.nodes)
    if max(n1, n2) > max_nodes:
        raise TooLargeError(f"exact GED limited to {max_nodes} nodes per graph, got {n1} and {n2}")
    # highest-degree nodes first tightens the bound early
    deg = Counter()
    for a, b in g1.edges:
        deg[a] += 1
        deg[b] += 1
    order1 = sorted((i for i, _ in g1.nodes), key=lambda i: (-deg[i], i))
    pos1 = {nid: k for k, nid in enumerate(order1)}
    lab1 = {pos1[i]: t for i, t in g1.nodes}
    ids2 = [i for i, _ in g2.nodes]
    pos2 = {nid: k for k, nid in enumerate(ids2)}
    lab2 = {pos2[i]: t for i, t in g2.nodes}
    e1 = {frozenset((pos1[a], pos1[b])) for a, b in g1.edges}
    e2 = {frozenset((pos2[a], pos2[b])) for a, b in g2.edges}
    edges1 = [tuple(e) for e in e1]
    edges2 = [tuple(e) for e in e2]

    counter = itertools.count()
    all2 = frozenset(range(n2))
    start_h = _lower_bound(lab1, lab2, set(range(n1)), set(all2), edges1, edges2)
    heap = [(start_h, 0, next(counter), ())]
    while heap:
        f, g, _, mapping = heapq.heappop(heap)
        k = len(mapping)
        if k == n1 + 1:  # completed state (sentinel appended)
            return g
        if k == n1:
            used = {m for m in mapping if m >= 0}
            unused = all2 - used
            extra = len(unused) + sum(1 for e in e2 if e & unused)
            heapq.heappush(heap, (g + extra, g + extra, next(counter), mapping + (-2,)))
            continue
        used = {m for m in mapping if m >= 0}
        for v in [j for j in range(n2) if j not in used] + [-1]:
            cost = (1 if v < 0 else int(lab1[k] != lab2[v]))
            for i, m in enumerate(mapping):
                has1 = frozenset((i, k)) in e1
                has2 = m >= 0 and v >= 0 and frozenset((m, v)) in e2
                cost += has1 != has2
            new = mapping + (v,)
            unassigned = set(range(k + 1, n1))
            unused = set(all2 - used - ({v} if v >= 0 else set()))
            h = _lower_bound(lab1, lab2, unassigned, unused, edges1, edges2)
            heapq.heappush(heap, (g + cost + h, g + cost, next(counter), new))
    raise AssertionError("search exhausted without reaching a complete mapping")


def compatibility(pred: Floorplan, target: Floorplan, eps: float = DEFAULT_EPS) -> int:
    """Graph edit distance between the two plans' bubble graphs."""
    return graph_edit_distance(extract_bubble_graph(pred, eps), extract_bubble_graph(target, eps))


def set_compatibility(pairs, eps: float = DEFAULT_EPS) -> float:
    vals = [compatibility(p, t, eps) for p, t in pairs]
    return sum(vals) / len(vals)
