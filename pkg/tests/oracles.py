"""Independent brute-force implementations used to check the real ones.

Everything here trades speed for obviousness: plain loops, no numpy
vectorization, no shared code with the package internals beyond data
types. If these disagree with the library, the library is wrong.
"""

from __future__ import annotations

import itertools
import math


def brute_force_neighbors(
    vectors: dict[str, list[float]],
    word: str,
    tau: float,
    k: int,
    stop_words: set[str] = frozenset(),
    antonyms: dict[str, set[str]] | None = None,
    case_sensitive_stops: bool = False,
) -> list[tuple[str, float]]:
    """Linear scan nearest neighbors: threshold first, then top-k."""
    if word not in vectors:
        return []
    blocked = (antonyms or {}).get(word, set())
    if case_sensitive_stops:
        stopped = lambda w: w in stop_words
    else:
        folded = {s.casefold() for s in stop_words}
        stopped = lambda w: w.casefold() in folded
    u = vectors[word]
    out = []
    for cand, v in vectors.items():
        if cand == word or cand in blocked or stopped(cand):
            continue
        dist = math.sqrt(sum((a - b) ** 2 for a, b in zip(u, v)))
        if dist <= tau:
            out.append((cand, dist))
    out.sort(key=lambda pair: (pair[1], pair[0]))
    return out[:k]


def _solve_tree_flows(
    cells: tuple[tuple[int, int], ...], supply: list[float], demand: list[float]
) -> list[float] | None:
    """Flows on a spanning-tree basis of the transport graph, or None.

    Nodes are rows 0..m-1 and columns m..m+n-1; cells are edges. A basis
    is feasible when the edges form a spanning tree and peeling leaves
    yields non-negative flows that satisfy every marginal.
    """
    m, n = len(supply), len(demand)
    balance = supply + demand
    adjacency: dict[int, list[tuple[int, int]]] = {node: [] for node in range(m + n)}
    for idx, (i, j) in enumerate(cells):
        adjacency[i].append((m + j, idx))
        adjacency[m + j].append((i, idx))

    flows = [0.0] * len(cells)
    remaining = dict(adjacency)
    degree = {node: len(edges) for node, edges in remaining.items()}
    used = [False] * len(cells)
    balance = list(balance)
    order = [node for node in range(m + n) if degree[node] == 1]
    seen = 0
    while order:
        leaf = order.pop()
        if degree[leaf] != 1:
            continue
        edge = next((e for e in remaining[leaf] if not used[e[1]]), None)
        if edge is None:
            continue
        other, idx = edge
        flows[idx] = balance[leaf]
        used[idx] = True
        balance[other] -= balance[leaf]
        balance[leaf] = 0.0
        degree[leaf] -= 1
        degree[other] -= 1
        seen += 1
        if degree[other] == 1:
            order.append(other)
    if seen != len(cells):
        return None  # the edge set has a cycle or is disconnected
    if any(abs(b) > 1e-12 for b in balance):
        return None
    if any(f < -1e-12 for f in flows):
        return None
    return flows


def brute_force_transport(
    supply: list[float], demand: list[float], cost: list[list[float]]
) -> float:
    """Exact optimal transport by enumerating every basic feasible solution.

    Every vertex of the transportation polytope is supported on a
    spanning tree of the bipartite supply/demand graph, so trying every
    (m + n - 1)-subset of cells and keeping the cheapest feasible one is
    a complete search. Only viable for tiny instances.
    """
    m, n = len(supply), len(demand)
    cells = list(itertools.product(range(m), range(n)))
    best = math.inf
    for basis in itertools.combinations(cells, m + n - 1):
        flows = _solve_tree_flows(basis, supply, demand)
        if flows is None:
            continue
        total = sum(f * cost[i][j] for f, (i, j) in zip(flows, basis))
        best = min(best, total)
    return best


def brute_force_wmd(
    bag_a: dict[str, float], bag_b: dict[str, float], vectors: dict[str, list[float]]
) -> float:
    words_a, words_b = sorted(bag_a), sorted(bag_b)
    cost = [
        [
            math.sqrt(sum((x - y) ** 2 for x, y in zip(vectors[wa], vectors[wb])))
            for wb in words_b
        ]
        for wa in words_a
    ]
    return brute_force_transport(
        [bag_a[w] for w in words_a], [bag_b[w] for w in words_b], cost
    )
