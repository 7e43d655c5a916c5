"""Graph and instance types, file formats, and the seeded random generator.

Node ids are 1-based everywhere, matching the instance file conventions.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence


class ParseError(ValueError):
    """Malformed instance text; carries the 1-based line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(ValueError):
    """Instance violates a structural requirement (connectivity, sources)."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def _normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes 1..node_count."""

    node_count: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> Graph:
        if node_count < 1:
            raise ValueError(f"node count must be positive, got {node_count}")
        normalized = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (1 <= u <= node_count and 1 <= v <= node_count):
                raise ValueError(f"node id out of range: edge ({u}, {v}) with n={node_count}")
            e = _normalize_edge(u, v)
            if e in normalized:
                raise ValueError(f"duplicate edge ({e[0]}, {e[1]})")
            normalized.add(e)
        return cls(node_count, frozenset(normalized))

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {u: [] for u in range(1, self.node_count + 1)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {u: tuple(sorted(nbrs)) for u, nbrs in adj.items()}

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def max_degree(self) -> int:
        return max((len(nbrs) for nbrs in self.adjacency.values()), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return _normalize_edge(u, v) in self.edges if u != v else False

    def nodes(self) -> range:
        return range(1, self.node_count + 1)

    def is_connected(self) -> bool:
        if self.node_count <= 1:
            return True
        seen = {1}
        queue = deque([1])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.node_count

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class Instance:
    """A graph together with its ordered source set."""

    graph: Graph
    sources: tuple[int, ...]
    name: str = ""

    @classmethod
    def build(cls, graph: Graph, sources: Sequence[int], name: str = "") -> Instance:
        return cls(graph, tuple(sources), name)

    @property
    def n(self) -> int:
        return self.graph.node_count

    @property
    def sigma(self) -> int:
        return len(self.sources)

    @property
    def source_set(self) -> frozenset[int]:
        return frozenset(self.sources)


@dataclass(frozen=True)
class GeneratorConfig:
    """Parameters of the random instance generator."""

    n: int
    p: float
    sigma: int = 1
    seed: int = 0

    def validate(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if not 1 <= self.sigma <= self.n:
            raise ValueError(f"sigma must be in [1, n], got {self.sigma}")


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64 PRNG (Steele et al.); fixed so equal seeds give identical instances."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        return self.next_u64() % bound

    def bernoulli(self, p: float) -> bool:
        # threshold floor(p * 2^64): p=0 never fires, p=1 always does
        return self.next_u64() < int(p * 2.0**64)


def _prufer_decode(seq: list[int], n: int) -> list[tuple[int, int]]:
    """Decode a Pruefer sequence (entries in 1..n, length n-2) into tree edges."""
    degree = [1] * (n + 1)
    degree[0] = 0
    for x in seq:
        degree[x] += 1
    edges = []
    ptr = 1
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append(_normalize_edge(leaf, x))
        degree[x] -= 1
        if degree[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append(_normalize_edge(leaf, n))
    return edges


def generate_random(cfg: GeneratorConfig) -> Instance:
    """Connected random instance: uniform labeled spanning tree (Pruefer decoding
    of a uniform random sequence) plus each non-tree pair added with probability p.

    Equal configs produce bit-identical instances.
    """
    cfg.validate()
    rng = SplitMix64(cfg.seed)
    n = cfg.n
    if n == 1:
        tree: set[tuple[int, int]] = set()
    elif n == 2:
        tree = {(1, 2)}
    else:
        seq = [rng.below(n) + 1 for _ in range(n - 2)]
        tree = set(_prufer_decode(seq, n))
    edges = set(tree)
    for u in range(1, n):
        for v in range(u + 1, n + 1):
            if (u, v) in tree:
                continue
            if rng.bernoulli(cfg.p):
                edges.add((u, v))
    graph = Graph.from_edges(n, edges)
    name = f"rnd-n{n}-p{cfg.p:g}-s{cfg.seed}"
    return Instance(graph, tuple(range(1, cfg.sigma + 1)), name)


def validate_instance(inst: Instance) -> list[str]:
    """Return a list of violations; empty means the instance is usable."""
    violations = []
    if not inst.sources:
        violations.append("no sources")
    seen = set()
    for s in inst.sources:
        if not 1 <= s <= inst.n:
            violations.append(f"source {s} out of range 1..{inst.n}")
        elif s in seen:
            violations.append(f"duplicate source {s}")
        seen.add(s)
    if not inst.graph.is_connected():
        violations.append("graph disconnected")
    return violations


def check_instance(inst: Instance) -> Instance:
    """Raise ValidationError unless the instance is valid."""
    violations = validate_instance(inst)
    if violations:
        raise ValidationError(violations)
    return inst


def ordered_degree_sequence(inst: Instance) -> list[int]:
    """Source degrees in source order, then non-source degrees non-increasing."""
    g = inst.graph
    src = inst.source_set
    head = [g.degree(s) for s in inst.sources]
    tail = sorted((g.degree(v) for v in g.nodes() if v not in src), reverse=True)
    return head + tail


# --- STP (SteinLib) reader -------------------------------------------------

def parse_stp(text: str, sources: Sequence[int] | None = None, name: str = "") -> Instance:
    """Parse SteinLib STP text into an Instance.

    Edge weights and the Terminals section are ignored. Sources default to
    node 1 unless overridden.
    """
    node_count = None
    declared_edges = None
    edges: list[tuple[int, int]] = []
    section = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.upper() == "EOF":
            continue
        parts = line.split()
        key = parts[0].upper()
        if key == "SECTION":
            if section is not None:
                raise ParseError(f"nested SECTION {line!r}", line_no)
            if len(parts) < 2:
                raise ParseError("SECTION without a name", line_no)
            section = parts[1].lower()
            continue
        if key == "END":
            if section is None:
                raise ParseError("END outside any section", line_no)
            section = None
            continue
        if section != "graph":
            continue  # headers, comments, terminals: tolerated and ignored
        if key == "NODES":
            try:
                node_count = int(parts[1])
            except (IndexError, ValueError):
                raise ParseError(f"bad Nodes line {line!r}", line_no) from None
        elif key == "EDGES":
            try:
                declared_edges = int(parts[1])
            except (IndexError, ValueError):
                raise ParseError(f"bad Edges line {line!r}", line_no) from None
        elif key == "E":
            if node_count is None:
                raise ParseError("edge before Nodes declaration", line_no)
            if len(parts) < 3:
                raise ParseError(f"bad edge line {line!r}", line_no)
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"bad edge line {line!r}", line_no) from None
            if not (1 <= u <= node_count and 1 <= v <= node_count):
                raise ParseError(f"node id out of range: ({u}, {v})", line_no)
            if u == v:
                raise ParseError(f"self-loop at node {u}", line_no)
            edges.append((u, v))
        elif key in ("A", "AA"):
            raise ParseError("directed arcs are not supported", line_no)
        # other graph-section keys (obstacles, coordinates) are ignored
    if section is not None:
        raise ParseError(f"unterminated SECTION {section}")
    if node_count is None:
        raise ParseError("no Graph section with a Nodes line")
    if declared_edges is not None and declared_edges != len(edges):
        raise ParseError(f"Edges declares {declared_edges} but file lists {len(edges)}")
    graph = Graph.from_edges(node_count, edges)
    inst = Instance(graph, tuple(sources) if sources else (1,), name)
    return check_instance(inst)


# --- plain edge-list format -------------------------------------------------
# first line: n m sigma; second line: sigma source ids; then m lines "u v"

def parse_edgelist(text: str, name: str = "") -> Instance:
    lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((line_no, stripped))
    if not lines:
        raise ParseError("empty edge-list file")
    line_no, header = lines[0]
    parts = header.split()
    if len(parts) != 3:
        raise ParseError(f"header must be 'n m sigma', got {header!r}", line_no)
    try:
        n, m, sigma = (int(x) for x in parts)
    except ValueError:
        raise ParseError(f"header must be 'n m sigma', got {header!r}", line_no) from None
    if len(lines) < 2:
        raise ParseError("missing source line", line_no)
    line_no, src_line = lines[1]
    try:
        sources = tuple(int(x) for x in src_line.split())
    except ValueError:
        raise ParseError(f"bad source line {src_line!r}", line_no) from None
    if len(sources) != sigma:
        raise ParseError(f"expected {sigma} sources, got {len(sources)}", line_no)
    body = lines[2:]
    if len(body) != m:
        raise ParseError(f"expected {m} edge lines, got {len(body)}")
    edges = []
    for line_no, entry in body:
        parts = entry.split()
        if len(parts) != 2:
            raise ParseError(f"bad edge line {entry!r}", line_no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"bad edge line {entry!r}", line_no) from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"node id out of range: ({u}, {v})", line_no)
        edges.append((u, v))
    graph = Graph.from_edges(n, edges)
    return check_instance(Instance(graph, sources, name))


def write_edgelist(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.graph.edge_count} {inst.sigma}"]
    lines.append(" ".join(str(s) for s in inst.sources))
    lines.extend(f"{u} {v}" for u, v in inst.graph.sorted_edges())
    return "\n".join(lines) + "\n"


def write_stp(inst: Instance) -> str:
    """Minimal STP writer covering the fields the reader needs."""
    lines = ["33D32945 STP File, STP Format Version 1.0", ""]
    lines += ["SECTION Graph", f"Nodes {inst.n}", f"Edges {inst.graph.edge_count}"]
    lines += [f"E {u} {v} 1" for u, v in inst.graph.sorted_edges()]
    lines += ["END", "", "SECTION Terminals", f"Terminals {inst.sigma}"]
    lines += [f"T {s}" for s in inst.sources]
    lines += ["END", "", "EOF"]
    return "\n".join(lines) + "\n"


def load_instance(path: str, sources: Sequence[int] | None = None) -> Instance:
    """Load an instance file, picking the format from the extension."""
    import os

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = os.path.splitext(os.path.basename(path))[0]
    if path.lower().endswith(".stp"):
        return parse_stp(text, sources=sources, name=name)
    inst = parse_edgelist(text, name=name)
    if sources:
        inst = check_instance(Instance(inst.graph, tuple(sources), name))
    return inst
