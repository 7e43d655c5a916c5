"""Bipartite matching engines for the one-step lookahead heuristic.

Both matchers are deterministic: adjacency is scanned in ascending node id,
so equal inputs always yield the same matching.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

_INF = float("inf")


@dataclass(frozen=True)
class BipartiteGraph:
    left: tuple[int, ...]
    right: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, left: Iterable[int], right: Iterable[int],
              edges: Iterable[tuple[int, int]]) -> BipartiteGraph:
        left_t = tuple(sorted(set(left)))
        right_t = tuple(sorted(set(right)))
        overlap = set(left_t) & set(right_t)
        if overlap:
            raise ValueError(f"sides overlap: {sorted(overlap)}")
        left_s, right_s = set(left_t), set(right_t)
        edge_set = set()
        for l, r in edges:
            if l not in left_s or r not in right_s:
                raise ValueError(f"edge ({l}, {r}) leaves the declared sides")
            edge_set.add((l, r))
        return cls(left_t, right_t, tuple(sorted(edge_set)))

    @cached_property
    def adj_left(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {l: [] for l in self.left}
        for l, r in self.edges:
            adj[l].append(r)
        return {l: tuple(sorted(rs)) for l, rs in adj.items()}

    @cached_property
    def adj_right(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {r: [] for r in self.right}
        for l, r in self.edges:
            adj[r].append(l)
        return {r: tuple(sorted(ls)) for r, ls in adj.items()}


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]

    @property
    def cardinality(self) -> int:
        return len(self.pairs)

    def weight(self, weights: Mapping[int, int]) -> int:
        return sum(weights[r] for _, r in self.pairs)

    def pair_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.pairs)


def max_cardinality_matching(bg: BipartiteGraph) -> Matching:
    """Hopcroft-Karp maximum cardinality matching, O(sqrt(n) * |E|)."""
    adj = bg.adj_left
    pair_l: dict[int, int] = {}
    pair_r: dict[int, int] = {}
    dist: dict[int, float] = {}

    def bfs() -> bool:
        queue = deque()
        for l in bg.left:
            if l not in pair_l:
                dist[l] = 0
                queue.append(l)
            else:
                dist[l] = _INF
        found = False
        while queue:
            l = queue.popleft()
            for r in adj[l]:
                mate = pair_r.get(r)
                if mate is None:
                    found = True
                elif dist[mate] == _INF:
                    dist[mate] = dist[l] + 1
                    queue.append(mate)
        return found

    def dfs(root: int) -> bool:
        # iterative alternating DFS along the BFS level graph
        stack = [(root, iter(adj[root]))]
        path = []  # (l, r) edges tentatively on the augmenting path
        while stack:
            l, it = stack[-1]
            advanced = False
            for r in it:
                mate = pair_r.get(r)
                if mate is None:
                    path.append((l, r))
                    for pl, pr in path:
                        pair_l[pl] = pr
                        pair_r[pr] = pl
                    return True
                if dist.get(mate) == dist[l] + 1:
                    path.append((l, r))
                    stack.append((mate, iter(adj[mate])))
                    advanced = True
                    break
            if not advanced:
                dist[l] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for l in bg.left:
            if l not in pair_l:
                dfs(l)
    return Matching(tuple(sorted(pair_l.items())))


def max_vertex_weight_matching(bg: BipartiteGraph,
                               weights: Mapping[int, int]) -> Matching:
    """Maximize the total weight of matched right nodes.

    Right nodes are inserted heaviest-first via augmenting paths, which is
    exact for one-sided vertex weights (matchable right sets form a
    transversal matroid). With all weights >= 1 the result also has maximum
    cardinality.
    """
    missing = [r for r in bg.right if r not in weights]
    if missing:
        raise ValueError(f"missing weights for right nodes {missing}")
    bad = [r for r in bg.right if weights[r] < 1]
    if bad:
        raise ValueError(f"weights must be >= 1, got {[(r, weights[r]) for r in bad]}")
    adj = bg.adj_right
    match_l: dict[int, int] = {}  # left -> right
    match_r: dict[int, int] = {}  # right -> left

    def try_augment(root: int) -> bool:
        visited: set[int] = set()
        stack = [(root, iter(adj[root]))]
        path: list[tuple[int, int]] = []  # (r, l) candidate assignments
        while stack:
            r, it = stack[-1]
            advanced = False
            for l in it:
                if l in visited:
                    continue
                visited.add(l)
                mate = match_l.get(l)
                path.append((r, l))
                if mate is None:
                    for pr, pl in path:
                        match_l[pl] = pr
                        match_r[pr] = pl
                    return True
                stack.append((mate, iter(adj[mate])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
        return False

    order = sorted(bg.right, key=lambda r: (-weights[r], r))
    for r in order:
        try_augment(r)
    return Matching(tuple(sorted((l, r) for r, l in match_r.items())))
