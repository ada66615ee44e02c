"""Finite directed graphs with positive edge lengths.

Nodes are dense integer indices ``0..n-1``; optional string labels are only
used for file I/O and the CLI.  Besides the graph container this module
provides neighbourhoods, successor cones, structural classification and the
potential (signed distance) machinery.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DifferentComponents,
    DuplicateEdge,
    IndexOutOfRange,
    NonPositiveLength,
    NoPotential,
    ParseError,
    SelfLoop,
    UnknownNode,
)

POTENTIAL_RTOL = 1e-12

Edge = tuple[int, int, float]


class Graph:
    """Immutable directed graph ``(V, E, length)``.

    Build instances with :func:`build_graph`.  ``out_adj[v]`` lists
    ``(u, length)`` for every edge ``v -> u`` and ``in_adj[u]`` lists
    ``(v, length)`` for the same edge; both are sorted by neighbour index.
    """

    __slots__ = ("node_count", "labels", "edges", "out_adj", "in_adj", "delta", "Delta", "_lengths")

    def __init__(self, node_count: int, edges: Sequence[Edge], labels: Sequence[str] | None = None):
        out_adj: list[list[tuple[int, float]]] = [[] for _ in range(node_count)]
        in_adj: list[list[tuple[int, float]]] = [[] for _ in range(node_count)]
        lengths: dict[tuple[int, int], float] = {}
        for src, dst, length in edges:
            out_adj[src].append((dst, length))
            in_adj[dst].append((src, length))
            lengths[(src, dst)] = length
        self.node_count = node_count
        self.labels = tuple(labels) if labels is not None else None
        self.edges: tuple[Edge, ...] = tuple(sorted(edges))
        self.out_adj = tuple(tuple(sorted(a)) for a in out_adj)
        self.in_adj = tuple(tuple(sorted(a)) for a in in_adj)
        self.delta = min((e[2] for e in self.edges), default=math.inf)
        self.Delta = max((len(o) + len(i) for o, i in zip(self.out_adj, self.in_adj)), default=0)
        self._lengths = lengths

    def __repr__(self) -> str:
        return f"Graph(n={self.node_count}, edges={len(self.edges)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_count, self.edges, self.labels) == (other.node_count, other.edges, other.labels)

    def __hash__(self) -> int:
        return hash((self.node_count, self.edges, self.labels))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def check_node(self, u: int) -> int:
        if not isinstance(u, (int, np.integer)) or not 0 <= u < self.node_count:
            raise IndexOutOfRange(f"node {u!r} not in 0..{self.node_count - 1}")
        return int(u)

    def has_edge(self, v: int, u: int) -> bool:
        return (v, u) in self._lengths

    def length(self, v: int, u: int) -> float:
        """Length of edge ``v -> u`` (KeyError if absent)."""
        return self._lengths[(v, u)]

    def successors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u, _ in self.out_adj[v])

    def predecessors(self, u: int) -> tuple[int, ...]:
        return tuple(v for v, _ in self.in_adj[u])

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)

    def node_index(self, token: str | int) -> int:
        """Resolve a CLI/file node token (label or integer index)."""
        if self.labels is not None:
            try:
                return self.labels.index(str(token))
            except ValueError:
                raise UnknownNode(f"unknown node label {token!r}") from None
        try:
            idx = int(token)
        except (TypeError, ValueError):
            raise UnknownNode(f"unknown node {token!r}") from None
        if not 0 <= idx < self.node_count:
            raise UnknownNode(f"node {idx} out of range")
        return idx


def build_graph(
    edge_list: Iterable[tuple[int, int, float]],
    node_count: int | None = None,
    labels: Sequence[str] | None = None,
) -> Graph:
    """Validate an edge list and build a :class:`Graph`.

    Raises SelfLoop, DuplicateEdge, NonPositiveLength or IndexOutOfRange.
    """
    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    max_index = -1
    for src, dst, length in edge_list:
        src, dst = int(src), int(dst)
        length = float(length)
        if src < 0 or dst < 0:
            raise IndexOutOfRange(f"negative node index in edge ({src}, {dst})")
        if src == dst:
            raise SelfLoop(f"self-loop at node {src}")
        if not length > 0 or not math.isfinite(length):
            raise NonPositiveLength(f"edge ({src}, {dst}) has length {length}")
        if (src, dst) in seen:
            raise DuplicateEdge(f"duplicate edge ({src}, {dst})")
        seen.add((src, dst))
        edges.append((src, dst, length))
        max_index = max(max_index, src, dst)
    if node_count is None:
        node_count = max_index + 1 if labels is None else len(labels)
    elif max_index >= node_count:
        raise IndexOutOfRange(f"edge endpoint {max_index} >= node_count {node_count}")
    if labels is not None and len(labels) != node_count:
        raise ValueError(f"{len(labels)} labels for {node_count} nodes")
    return Graph(node_count, edges, labels)


# ---------------------------------------------------------------------------
# neighbourhoods


def _step(g: Graph, u: int, direction: str) -> Iterable[int]:
    if direction == "out":
        return g.successors(u)
    if direction == "in":
        return g.predecessors(u)
    if direction == "both":
        return g.successors(u) + g.predecessors(u)
    raise ValueError(f"direction must be 'out', 'in' or 'both', got {direction!r}")


def neighbors(g: Graph, u: int, direction: str = "both") -> list[int]:
    """N+(u), N-(u) or N(u), sorted and duplicate free."""
    u = g.check_node(u)
    return sorted(set(_step(g, u, direction)))


def iterated_neighborhood(g: Graph, u: int, k: int, direction: str = "both", closed: bool = True) -> set[int]:
    """Closed k-neighbourhood N_k[u], or the ring N_k[u] minus N_{k-1}[u]."""
    u = g.check_node(u)
    if k < 0:
        raise ValueError("k must be nonnegative")
    ball = {u}
    frontier = {u}
    for _ in range(k):
        frontier = {w for x in frontier for w in _step(g, x, direction)} - ball
        if not frontier:
            return ball if closed else set()
        ball |= frontier
    if closed or k == 0:
        return ball
    return frontier


def successor_cone(g: Graph, seeds: Iterable[int]) -> set[int]:
    """All nodes reachable from ``seeds`` along directed walks, seeds included."""
    cone = {g.check_node(s) for s in seeds}
    queue = deque(cone)
    while queue:
        v = queue.popleft()
        for u in g.successors(v):
            if u not in cone:
                cone.add(u)
                queue.append(u)
    return cone


def predecessor_cone(g: Graph, seeds: Iterable[int]) -> set[int]:
    """All nodes from which some seed is reachable, seeds included."""
    cone = {g.check_node(s) for s in seeds}
    queue = deque(cone)
    while queue:
        v = queue.popleft()
        for u in g.predecessors(v):
            if u not in cone:
                cone.add(u)
                queue.append(u)
    return cone


def weak_components(g: Graph) -> np.ndarray:
    """Component id per node; components numbered by their minimum node."""
    comp = np.full(g.node_count, -1, dtype=np.int64)
    next_id = 0
    for start in range(g.node_count):
        if comp[start] >= 0:
            continue
        comp[start] = next_id
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in _step(g, v, "both"):
                if comp[u] < 0:
                    comp[u] = next_id
                    queue.append(u)
        next_id += 1
    return comp


# ---------------------------------------------------------------------------
# classification and potentials


@dataclass(frozen=True)
class GraphClassification:
    is_oriented: bool
    is_oriented_tree: bool
    is_leafless: bool
    has_potential: bool
    delta: float
    Delta: int


def is_oriented(g: Graph) -> bool:
    return not any(g.has_edge(u, v) for v, u, _ in g.edges)


def classify(g: Graph) -> GraphClassification:
    oriented = is_oriented(g)
    n = g.node_count
    connected = n > 0 and int(weak_components(g).max()) == 0
    tree = oriented and connected and g.edge_count == n - 1
    try:
        compute_potential(g)
        has_pot = True
    except NoPotential:
        has_pot = False
    leafless = all(g.out_degree(v) >= 1 for v in range(n))
    return GraphClassification(oriented, tree, leafless, has_pot, g.delta, g.Delta)


@dataclass(frozen=True)
class Potential:
    """Node potential ``phi`` with ``phi[u] - phi[v] == length(v, u)`` on every edge.

    ``component[u]`` identifies the weakly connected component of ``u``; phi is
    zero at the smallest node of each component.
    """

    phi: np.ndarray
    component: np.ndarray

    def __len__(self) -> int:
        return len(self.phi)


def compute_potential(g: Graph) -> Potential:
    comp = weak_components(g)
    phi = np.zeros(g.node_count)
    done = np.zeros(g.node_count, dtype=bool)
    for start in range(g.node_count):
        if done[start]:
            continue
        done[start] = True
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u, length in g.out_adj[v]:
                if not done[u]:
                    phi[u] = phi[v] + length
                    done[u] = True
                    queue.append(u)
            for w, length in g.in_adj[v]:
                if not done[w]:
                    phi[w] = phi[v] - length
                    done[w] = True
                    queue.append(w)
    # length scale per component for the relative consistency check
    scale = np.zeros(int(comp.max()) + 1 if g.node_count else 0)
    np.maximum.at(scale, comp, np.abs(phi))
    for v, u, length in g.edges:
        scale[comp[v]] = max(scale[comp[v]], length)
    for v, u, length in g.edges:
        err = abs(phi[u] - phi[v] - length)
        if err > POTENTIAL_RTOL * scale[comp[v]]:
            raise NoPotential(
                f"edge ({v}, {u}) of length {length} inconsistent with potential (mismatch {err:.3g})"
            )
    phi.flags.writeable = False
    comp.flags.writeable = False
    return Potential(phi, comp)


def signed_distance(pot: Potential, v: int, u: int) -> float:
    """d_vu = phi(u) - phi(v)."""
    if pot.component[v] != pot.component[u]:
        raise DifferentComponents(f"nodes {v} and {u} lie in different components")
    return float(pot.phi[u] - pot.phi[v])


# ---------------------------------------------------------------------------
# edge-list text format


def _format_length(x: float) -> str:
    return repr(float(x))


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.label(v)}\t{g.label(u)}\t{_format_length(w)}" for v, u, w in g.edges]
    return "".join(line + "\n" for line in lines)


def write_edge_list(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")


def parse_edge_list(text: str, node_count: int | None = None) -> Graph:
    """Parse ``src<TAB>dst<TAB>length`` lines; ``#`` lines are comments.

    Tokens are either all nonnegative integers (indices) or all labels; labels
    are numbered in order of first appearance.
    """
    rows: list[tuple[str, str, float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}")
        try:
            length = float(parts[2])
        except ValueError:
            raise ParseError(f"line {lineno}: bad length {parts[2]!r}") from None
        rows.append((parts[0].strip(), parts[1].strip(), length))

    tokens = [t for src, dst, _ in rows for t in (src, dst)]
    numeric = [t.isdigit() for t in tokens]
    if all(numeric):
        edges = [(int(s), int(d), w) for s, d, w in rows]
        return build_graph(edges, node_count)
    if any(numeric):
        raise ParseError("mixed integer and label node tokens")
    index: dict[str, int] = {}
    for t in tokens:
        index.setdefault(t, len(index))
    edges = [(index[s], index[d], w) for s, d, w in rows]
    return build_graph(edges, labels=list(index))


def read_edge_list(path: str | Path, node_count: int | None = None) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"), node_count)
