"""Closed-form reference solutions used to cross-check the numerics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotASuccessor, NotSimpleGraph, ZeroDiagonal
from .graph import Graph
from .operators import AdvectionMatrix, Kind

DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class CascadeParams:
    """Coefficients of a two-node cascade v -> u."""

    a_vv: float
    a_uu: float
    a_uv: float

    def __post_init__(self):
        if self.a_vv < 0 or self.a_uu < 0:
            raise ValueError("diagonal coefficients must be nonnegative")
        if self.a_uv > 0:
            raise ValueError("a_uv must be nonpositive")


def cascade_mass(p: CascadeParams, t: float) -> float:
    """Mass on u at time t when a unit mass starts on v.

    Uses the linear-in-t limit when the two diagonals coincide.
    """
    gap = p.a_vv - p.a_uu
    if abs(gap) <= DEGENERATE_RTOL * max(abs(p.a_vv), abs(p.a_uu)):
        return -p.a_uv * t * math.exp(-t * p.a_vv)
    return p.a_uv / gap * (math.exp(-t * p.a_vv) - math.exp(-t * p.a_uu))


def _log_poisson(n: int, lam: float) -> float:
    if lam == 0.0:
        return 0.0 if n == 0 else -math.inf
    return n * math.log(lam) - lam - math.lgamma(n + 1)


def grid_mass(alpha_x: float, alpha_y: float, n_x: int, n_y: int, t: float) -> float:
    """Mass at offset (n_x, n_y) cells from the start on the infinite oriented grid.

    Product of two Poisson probabilities, evaluated in log space.
    """
    if alpha_x < 0 or alpha_y < 0:
        raise ValueError("grid rates must be nonnegative")
    return math.exp(_log_poisson(n_x, t * alpha_x) + _log_poisson(n_y, t * alpha_y))


def grid_mean(alpha_x: float, alpha_y: float, d_x: float, d_y: float, t: float) -> tuple[float, float]:
    return (t * d_x * alpha_x, t * d_y * alpha_y)


def grid_rates(kind: Kind | str, d_x: float, d_y: float) -> tuple[float, float]:
    """(alpha_x, alpha_y) = (-a_{v v_x}, -a_{v v_y}) at an interior grid node."""
    kind = Kind(kind)
    if kind is Kind.A3:
        return 1 / d_x, 1 / d_y
    if kind is Kind.A4:
        return 1 / (2 * d_x), 1 / (2 * d_y)
    if kind is Kind.A5:
        s = 1 / (d_x + d_y)
        return s, s
    raise ValueError(f"no grid rates for {kind}")


def limit_cone_mass(m: AdvectionMatrix, v: int, u: int, g: Graph | None = None) -> float:
    """Long-time mass in the successor cone of child ``u`` of ``v``: -a_uv / a_vv."""
    g = g or m.graph
    if g is None or not g.has_edge(v, u):
        raise NotASuccessor(f"{u} is not a successor of {v}")
    a_vv = float(m.entry(v, v))
    if a_vv <= 0:
        raise ZeroDiagonal(f"a_vv = {a_vv} at node {v}")
    return -float(m.entry(u, v)) / a_vv


def laplacian_reference(g: Graph, variant: str = "combinatorial") -> np.ndarray:
    """Dense graph Laplacian of a simple graph stored as reciprocal unit edges.

    ``combinatorial``: D - Adj.  ``right_normalized``: I - Adj D^-1, with zero
    columns for isolated nodes.
    """
    n = g.node_count
    adj = np.zeros((n, n))
    for v, u, d in g.edges:
        if d != 1.0:
            raise NotSimpleGraph(f"edge ({v}, {u}) has length {d}, expected 1")
        if not g.has_edge(u, v):
            raise NotSimpleGraph(f"edge ({v}, {u}) is not reciprocated")
        adj[u, v] = 1.0
    deg = adj.sum(axis=0)
    if variant == "combinatorial":
        return np.diag(deg) - adj
    if variant == "right_normalized":
        inv = np.divide(1.0, deg, out=np.zeros(n), where=deg > 0)
        return np.diag((deg > 0).astype(float)) - adj * inv[None, :]
    raise ValueError(f"unknown variant {variant!r}")


def expm_taylor_dense(a: np.ndarray, t: float, tol: float = 1e-17) -> np.ndarray:
    """exp(-t a) for a small dense matrix by scaling and squaring a Taylor series."""
    x = -t * np.asarray(a, dtype=float)
    n = x.shape[0]
    norm = np.abs(x).sum(axis=0).max() if n else 0.0
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    x = x / 2.0**s
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 200):
        term = term @ x / k
        result = result + term
        if np.abs(term).max() <= tol:
            break
    for _ in range(s):
        result = result @ result
    return result
