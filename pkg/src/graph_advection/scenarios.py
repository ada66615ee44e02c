"""Deterministic generators for the example graphs and road-network orientation."""
from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .errors import TargetUnreachable
from .graph import Graph, build_graph, successor_cone, weak_components


def gen_two_cycles(p: int = 5, q: int = 9) -> Graph:
    """Two oriented cycles of total length 1 sharing node 0.

    Nodes 1..p-1 form the left cycle (edge length 1/p), nodes p..p+q-2 the
    right one (edge length 1/q).
    """
    if p < 2 or q < 2:
        raise ValueError("cycle sizes must be at least 2")
    edges = []
    for size, first in ((p, 1), (q, p)):
        ring = [0] + list(range(first, first + size - 1))
        for a, b in zip(ring, ring[1:] + ring[:1]):
            edges.append((a, b, 1.0 / size))
    return build_graph(edges, p + q - 1)


def gen_grid(nx: int, ny: int, dx: float = 3.0, dy: float = 1.0) -> tuple[Graph, np.ndarray]:
    """Oriented nx-by-ny grid with edges pointing right and up.

    Node (i, j) has index ``j * nx + i`` and sits at ``(i * dx, j * dy)``.
    Returns the graph and an ``(n, 2)`` coordinate array.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid needs nx, ny >= 1")
    edges = []
    for j in range(ny):
        for i in range(nx):
            v = j * nx + i
            if i + 1 < nx:
                edges.append((v, v + 1, dx))
            if j + 1 < ny:
                edges.append((v, v + nx, dy))
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny))
    coords = np.column_stack([ii.ravel() * dx, jj.ravel() * dy])
    return build_graph(edges, nx * ny), coords


def gen_half_line(n: int = 400) -> Graph:
    """Nodes 0..n with unit edges u -> u+1 and shortcuts u -> u+2 of length 2."""
    if n < 3:
        raise ValueError("half-line truncation needs n >= 3")
    edges = [(u, u + 1, 1.0) for u in range(n)]
    edges += [(u, u + 2, 2.0) for u in range(n - 1)]
    return build_graph(edges, n + 1)


def _branch_letters(count: int) -> list[str]:
    pool = "zwu" + "".join(c for c in string.ascii_lowercase if c not in "zwuv")
    if count <= len(pool):
        return list(pool[:count])
    return [f"b{k}_" for k in range(count)]


def gen_branching_tree(
    root_distances: Sequence[float] = (1.0, 1 / 2, 1 / 3),
    depth_distances: Sequence[float] = (1 / 2, 1 / 4),
) -> Graph:
    """Root ``v`` with one chain per root distance.

    Chain k starts with an edge of length ``root_distances[k]`` and continues
    with the shared ``depth_distances``, so all chains have isomorphic
    forward neighbourhoods below the first level.  Labels are ``v`` for the
    root and ``z1, z2, ...``, ``w1, ...``, ``u1, ...`` along the chains.
    """
    if not root_distances:
        raise ValueError("need at least one branch")
    letters = _branch_letters(len(root_distances))
    labels = ["v"]
    edges = []
    for k, first in enumerate(root_distances):
        prev = 0
        for level, d in enumerate([first, *depth_distances], 1):
            node = len(labels)
            labels.append(f"{letters[k]}{level}")
            edges.append((prev, node, float(d)))
            prev = node
    return build_graph(edges, len(labels), labels)


def gen_two_leaf(d_vw: float = 1.0, d_vu: float = 2.0) -> Graph:
    """Root ``v`` (node 0) with leaves ``u`` (node 1) and ``w`` (node 2)."""
    return build_graph([(0, 1, d_vu), (0, 2, d_vw)], 3, ["v", "u", "w"])


def branches(g: Graph, root: int = 0) -> list[list[int]]:
    """Node sets of the subtrees hanging from each child of ``root``."""
    return [sorted(successor_cone(g, [c])) for c in g.successors(root)]


# ---------------------------------------------------------------------------
# two-target orientation


@dataclass(frozen=True)
class OrientationSpec:
    targets: tuple[int, ...]
    tie_rule: str = "both_directions"
    make_sinks: bool = True
    metric: str = "directed"  # or "undirected"

    def __post_init__(self):
        if not self.targets:
            raise ValueError("need at least one target")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("targets must be distinct")
        if self.tie_rule != "both_directions":
            raise ValueError(f"unsupported tie rule {self.tie_rule!r}")
        if self.metric not in ("directed", "undirected"):
            raise ValueError(f"unknown metric {self.metric!r}")


def target_distances(g: Graph, target: int, metric: str = "directed") -> np.ndarray:
    """Shortest travel distance from every node to ``target``.

    ``directed`` honours edge directions (Dijkstra on the reversed graph);
    ``undirected`` lets every edge be used both ways at its length.
    """
    target = g.check_node(target)
    n = g.node_count
    if not g.edges:
        dist = np.full(n, np.inf)
        dist[target] = 0.0
        return dist
    src, dst, w = (np.array(x) for x in zip(*g.edges))
    # reversed graph: an edge v -> u becomes u -> v
    rev = sp.csr_matrix((w, (dst, src)), shape=(n, n))
    return dijkstra(rev, directed=metric == "directed", indices=target)


def orient_toward(g: Graph, target: int, metric: str = "directed") -> set[tuple[int, int]]:
    """Edge set E_T: one-way edges kept, two-way pairs oriented toward ``target``."""
    dist = target_distances(g, target, metric)
    kept: set[tuple[int, int]] = set()
    for v, u, _ in g.edges:
        if not g.has_edge(u, v):
            kept.add((v, u))
        elif dist[u] < dist[v]:
            kept.add((v, u))
        elif dist[u] == dist[v]:
            kept.add((v, u))
            kept.add((u, v))
    return kept


def two_target_orient(g: Graph, spec: OrientationSpec) -> Graph:
    """Union of the per-target orientations, optionally with the targets made sinks."""
    comp = weak_components(g)
    active = {x for v, u, _ in g.edges for x in (v, u)}
    for t in spec.targets:
        g.check_node(t)
        stranded = [x for x in active if comp[x] != comp[t]]
        if stranded:
            raise TargetUnreachable(f"target {g.label(t)} unreachable from node {g.label(stranded[0])}")
    union: set[tuple[int, int]] = set()
    for t in spec.targets:
        union |= orient_toward(g, t, spec.metric)
    if spec.make_sinks:
        sinks = set(spec.targets)
        union = {(v, u) for v, u in union if v not in sinks}
    edges = [(v, u, g.length(v, u)) for v, u in sorted(union)]
    return build_graph(edges, g.node_count, g.labels)
