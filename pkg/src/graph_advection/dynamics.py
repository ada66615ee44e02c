"""Time evolution f_t = exp(-tA) f_0 and observables of the transport.

The integrator is uniformization: with alpha >= max diag(A) the matrix
N = alpha*I - A has nonnegative entries whenever A has nonpositive
off-diagonals, and

    exp(-tA) f = exp(-alpha t) * sum_k (t^k / k!) N^k f

is a sum of nonnegative vectors for nonnegative f.  Positivity therefore holds
by construction, and the truncation error is controlled by a Poisson tail.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import pdtrc

from .errors import DifferentComponents, DimensionMismatch, NonFiniteInput
from .graph import Graph, Potential, classify, predecessor_cone, successor_cone
from .operators import AdvectionMatrix, check_advection_1, check_mass_transfer_1, check_mass_transfer_2

DEFAULT_TOL = 1e-10
MAX_STEP = 20.0  # cap on alpha * dt per uniformization step
MAX_TERMS = 10_000


@dataclass
class UniformizationStats:
    alpha: float = 0.0
    steps: int = 0
    matvecs: int = 0


class _Propagator:
    """Precomputed shifted matrix for repeated uniformization steps."""

    def __init__(self, m: AdvectionMatrix):
        self.n = m.n
        diag = np.asarray(m.diag)
        alpha = float(diag.max()) if m.n else 0.0
        self.alpha = alpha if alpha > 0 else 1.0
        self.shifted = (self.alpha * sp.identity(m.n, format="csr") - m.csr).tocsr()
        # l1 operator norm of the shifted matrix; equals alpha for conservative M-matrices
        col_abs = np.asarray(abs(self.shifted).sum(axis=0)).ravel()
        self.beta = max(float(col_abs.max()) if m.n else 0.0, self.alpha)

    def _terms(self, dt: float, budget: float) -> int:
        """Smallest K whose series tail, relative to ||f||_1, is below ``budget``."""
        x, y = self.alpha * dt, self.beta * dt
        growth = math.exp(y - x)
        k = max(int(y), 0)
        while k < MAX_TERMS and growth * pdtrc(k, y) > budget:
            k += 1
        return k

    def advance(self, f: np.ndarray, t: float, tol: float, stats: UniformizationStats) -> np.ndarray:
        if t == 0.0 or self.n == 0:
            return f.copy()
        steps = max(1, math.ceil(self.alpha * t / MAX_STEP))
        dt = t / steps
        stats.alpha = self.alpha
        stats.steps += steps
        for _ in range(steps):
            norm = float(np.abs(f).sum())
            if norm == 0.0:
                return np.zeros_like(f)
            # per-step budget so that the accumulated truncation stays below tol
            K = self._terms(dt, tol / (steps * norm))
            term = f
            acc = f.copy()
            for k in range(1, K + 1):
                term = (dt / k) * (self.shifted @ term)
                acc += term
            stats.matvecs += K
            f = math.exp(-self.alpha * dt) * acc
        return f


def _check_state(m: AdvectionMatrix, f0) -> np.ndarray:
    f = np.array(f0, dtype=float)
    if f.shape != (m.n,):
        raise DimensionMismatch(f"initial state of shape {f.shape} for operator of size {m.n}")
    if not np.all(np.isfinite(f)):
        raise NonFiniteInput("initial state contains non-finite values")
    return f


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise NonFiniteInput(f"time {t} is not finite")
    if t < 0:
        raise ValueError("backward evolution (t < 0) is not supported")
    return t


def evolve(m: AdvectionMatrix, f0, t: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Return exp(-tA) f0 with l1 truncation error at most ``tol``.

    For operators with nonpositive off-diagonals and f0 >= 0 the result is
    nonnegative entrywise.
    """
    f = _check_state(m, f0)
    t = _check_time(t)
    return _Propagator(m).advance(f, t, tol, UniformizationStats())


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n)
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.states[i]


def trajectory(m: AdvectionMatrix, f0, times: Sequence[float], tol: float = DEFAULT_TOL) -> Trajectory:
    """Sample the solution at ascending ``times``, restarting from each state."""
    f = _check_state(m, f0)
    ts = np.array([_check_time(t) for t in times], dtype=float)
    if len(ts) and np.any(np.diff(ts) <= 0):
        raise ValueError("times must be strictly ascending")
    prop = _Propagator(m)
    stats = UniformizationStats()
    horizon = float(ts[-1]) if len(ts) else 0.0
    states = np.empty((len(ts), m.n))
    prev = 0.0
    for i, t in enumerate(ts):
        span = t - prev
        seg_tol = tol * span / horizon if horizon > 0 else tol
        f = prop.advance(f, span, seg_tol, stats)
        states[i] = f
        prev = t
    meta = {"kind": str(m.kind), "tol": tol, "alpha": prop.alpha, "steps": stats.steps, "matvecs": stats.matvecs}
    return Trajectory(ts, states, meta)


# ---------------------------------------------------------------------------
# observables


def total_mass(f) -> float:
    """Plain sum of the entries (the l1 norm when f >= 0)."""
    return float(np.sum(f))


def l1_mass(f) -> float:
    return float(np.sum(np.abs(f)))


def min_value(f) -> float:
    return float(np.min(f))


def average_displacement(pot: Potential, v: int, f) -> float:
    """sum over u of (phi(u) - phi(v)) f(u)."""
    f = np.asarray(f, dtype=float)
    same = pot.component == pot.component[v]
    if np.any(f[~same] != 0):
        raise DifferentComponents(f"mass outside the component of node {v}")
    return float(np.dot(pot.phi[same] - pot.phi[v], f[same]))


def cone_mass(g: Graph, f, u: int) -> float:
    """Mass in the successor cone of ``u``, ``u`` itself included."""
    cone = sorted(successor_cone(g, [u]))
    return float(np.sum(np.asarray(f)[cone]))


def center_of_mass(coords: np.ndarray, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return (coords * f[:, None]).sum(axis=0) / f.sum()


@dataclass(frozen=True)
class FlowResidual:
    residual: float
    lhs: float  # a_uu * integral of f_s(u) over [0, t]
    rhs: float  # mass strictly downstream of u at time t
    flags: tuple[str, ...] = ()


def simpson(values: np.ndarray, t: float) -> float:
    """Composite Simpson rule on an odd number of equispaced samples over [0, t]."""
    n = len(values) - 1
    if n < 2 or n % 2:
        raise ValueError("Simpson needs an even number of subintervals")
    h = t / n
    return float(h / 3 * (values[0] + values[-1] + 4 * values[1:-1:2].sum() + 2 * values[2:-1:2].sum()))


def flow_residual(
    g: Graph,
    m: AdvectionMatrix,
    f0,
    u: int,
    t: float,
    quad_steps: int = 256,
    tol: float = DEFAULT_TOL,
) -> FlowResidual:
    """Compare time-integrated outflow of ``u`` with the mass downstream of it.

    The identity holds on oriented trees for conservative forward operators
    and f0 >= 0 supported upstream of ``u``; violated preconditions are
    reported in ``flags`` rather than raised.
    """
    f0 = _check_state(m, f0)
    t = _check_time(t)
    flags = []
    if not classify(g).is_oriented_tree:
        flags.append("not-an-oriented-tree")
    if np.any(f0 < 0):
        flags.append("negative-initial-mass")
    upstream = predecessor_cone(g, [u])
    if np.any(f0[[w for w in range(m.n) if w not in upstream]] != 0):
        flags.append("mass-not-upstream")
    if not (check_mass_transfer_1(m).passed and check_mass_transfer_2(m).passed and check_advection_1(m, g).passed):
        flags.append("operator-hypotheses-unmet")

    downstream = sorted(successor_cone(g, [u]) - {u})
    if t == 0.0:
        return FlowResidual(0.0, 0.0, float(np.sum(f0[downstream])) if downstream else 0.0, tuple(flags))
    times = np.linspace(0.0, t, 2 * quad_steps + 1)
    traj = trajectory(m, f0, times[1:], tol)
    path = np.concatenate([[f0[u]], traj.states[:, u]])
    lhs = float(m.diag[u]) * simpson(path, t)
    rhs = float(np.sum(traj.states[-1][downstream])) if downstream else 0.0
    return FlowResidual(abs(lhs - rhs), lhs, rhs, tuple(flags))


# ---------------------------------------------------------------------------
# CSV export


def format_trajectory_csv(traj: Trajectory, g: Graph | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", "node", "value"])
    n = traj.states.shape[1] if traj.states.ndim == 2 else 0
    names = [g.label(u) for u in range(n)] if g is not None else [str(u) for u in range(n)]
    for t, state in zip(traj.times, traj.states):
        for u in range(n):
            writer.writerow([f"{t:.17g}", names[u], f"{state[u]:.17g}"])
    return buf.getvalue()


def write_trajectory_csv(traj: Trajectory, path: str | Path, g: Graph | None = None) -> None:
    Path(path).write_text(format_trajectory_csv(traj, g), encoding="utf-8")
