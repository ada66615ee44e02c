"""Advection operators A1..A5 and matrix-level axiom checks.

Entry ``a[u, v]`` is ``[A 1_v](u)``, so column ``v`` describes where a unit
mass sitting on ``v`` is sent.  Every axiom characterisation is a statement
about single columns, hence the column-major storage.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, ParseError
from .graph import Graph, build_graph

DEFAULT_TOL = 1e-10


class Kind(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"

    def __str__(self) -> str:
        return self.value


Column = tuple[tuple[int, object], ...]


def _column_entries(g: Graph, kind: Kind, v: int, num: Callable[[float], object]) -> list[tuple[int, object]]:
    """Entries (row, value) of column ``v``, diagonal included, rows sorted."""
    zero = num(0)
    one = num(1)
    out = g.out_adj[v]
    k = len(out)
    entries: dict[int, object] = {}
    if kind is Kind.A1:
        diag = zero
        for _, d in out:
            diag -= one / num(d)
        for u, d in g.in_adj[v]:
            entries[u] = one / num(d)
    elif kind is Kind.A2:
        diag = zero
        for _, d in g.in_adj[v]:
            diag += one / num(d)
        for u, d in out:
            entries[u] = -one / num(d)
    elif kind is Kind.A3:
        diag = zero
        for u, d in out:
            entries[u] = -one / num(d)
            diag += one / num(d)
    elif kind is Kind.A4:
        diag = zero
        for u, d in out:
            entries[u] = -one / (num(k) * num(d))
            diag += one / (num(k) * num(d))
    elif kind is Kind.A5:
        total = zero
        for _, d in out:
            total += num(d)
        s = one / total if k else zero
        for u, _ in out:
            entries[u] = -s
        diag = num(k) * s
    else:  # pragma: no cover
        raise ValueError(kind)
    entries[v] = diag
    return sorted(entries.items())


@dataclass(frozen=True, eq=False)
class AdvectionMatrix:
    """Sparse advection operator built from ``graph``.

    ``columns[v]`` holds ``(row, value)`` pairs including the diagonal.  In
    exact mode the values are :class:`fractions.Fraction`.
    """

    kind: Kind
    n: int
    columns: tuple[Column, ...]
    graph: Graph | None = field(default=None, repr=False)
    exact: bool = False

    @cached_property
    def csc(self) -> sp.csc_matrix:
        rows, cols, vals = [], [], []
        for v, col in enumerate(self.columns):
            for u, a in col:
                rows.append(u)
                cols.append(v)
                vals.append(float(a))
        return sp.csc_matrix((vals, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def csr(self) -> sp.csr_matrix:
        return self.csc.tocsr()

    @cached_property
    def diag(self) -> np.ndarray:
        d = np.zeros(self.n)
        for v, col in enumerate(self.columns):
            for u, a in col:
                if u == v:
                    d[v] = float(a)
        d.flags.writeable = False
        return d

    def column(self, v: int) -> Column:
        return self.columns[v]

    def entry(self, u: int, v: int):
        for row, a in self.columns[v]:
            if row == u:
                return a
        return Fraction(0) if self.exact else 0.0

    def off_diagonal(self):
        """Yield ``(u, v, a_uv)`` for every stored off-diagonal entry."""
        for v, col in enumerate(self.columns):
            for u, a in col:
                if u != v:
                    yield u, v, a

    def toarray(self) -> np.ndarray:
        return self.csc.toarray()

    def to_fractions(self) -> list[list[Fraction]]:
        dense = [[Fraction(0)] * self.n for _ in range(self.n)]
        for v, col in enumerate(self.columns):
            for u, a in col:
                dense[u][v] = Fraction(a)
        return dense


def build_operator(g: Graph, kind: Kind | str, exact: bool = False) -> AdvectionMatrix:
    """Build the sparse operator of the given kind on ``g``.

    With ``exact=True`` every entry is an exact Fraction computed from the
    binary value of the edge lengths (exact for integer or dyadic lengths).
    Nodes without successors get all-zero columns for A3, A4 and A5.
    """
    kind = Kind(kind)
    num = Fraction if exact else float
    columns = tuple(tuple(_column_entries(g, kind, v, num)) for v in range(g.node_count))
    return AdvectionMatrix(kind, g.node_count, columns, g, exact)


def apply(m: AdvectionMatrix, f) -> np.ndarray:
    """[A f](u) = sum over v of a_uv f(v)."""
    f = np.asarray(f, dtype=float)
    if f.shape != (m.n,):
        raise DimensionMismatch(f"vector of shape {f.shape} for operator of size {m.n}")
    return m.csr @ f


def inf_norm(m: AdvectionMatrix) -> float:
    if m.n == 0:
        return 0.0
    return float(abs(m.csr).sum(axis=1).max())


# ---------------------------------------------------------------------------
# axiom checks


class Status(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    NOT_APPLICABLE = "not-applicable"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Verdict:
    """Outcome of one axiom check.

    ``worst_violation`` is the largest violation of the scalar condition; for
    pass/fail verdicts ``status is PASS`` exactly when it is within tolerance.
    """

    status: Status
    worst_violation: float
    witness: tuple | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS


def _verdict(worst: float, witness, tol: float, note: str = "") -> Verdict:
    return Verdict(Status.PASS if worst <= tol else Status.FAIL, worst, witness, note)


def check_locality(m: AdvectionMatrix, g: Graph | None = None, tol: float = DEFAULT_TOL) -> Verdict:
    """Every nonzero a_uv (u != v) joins two adjacent nodes."""
    g = g or m.graph
    worst, witness = 0.0, None
    for u, v, a in m.off_diagonal():
        if not (g.has_edge(u, v) or g.has_edge(v, u)) and abs(float(a)) > worst:
            worst, witness = abs(float(a)), (u, v, float(a))
    return _verdict(worst, witness, tol)


def check_mass_transfer_1(m: AdvectionMatrix, tol: float = DEFAULT_TOL) -> Verdict:
    """Off-diagonal entries must be nonpositive."""
    worst, witness = 0.0, None
    for u, v, a in m.off_diagonal():
        if float(a) > worst:
            worst, witness = float(a), (u, v, float(a))
    return _verdict(worst, witness, tol)


def check_mass_transfer_2(m: AdvectionMatrix, tol: float = DEFAULT_TOL) -> Verdict:
    """Every column must sum to zero."""
    worst, witness = 0.0, None
    for v, col in enumerate(m.columns):
        s = float(sum(a for _, a in col))
        if abs(s) > worst:
            worst, witness = abs(s), (v, s)
    return _verdict(worst, witness, tol)


def check_advection_1(m: AdvectionMatrix, g: Graph | None = None, tol: float = DEFAULT_TOL) -> Verdict:
    """Nonzero off-diagonal a_uv only where v -> u is an edge."""
    g = g or m.graph
    worst, witness = 0.0, None
    for u, v, a in m.off_diagonal():
        if not g.has_edge(v, u) and abs(float(a)) > worst:
            worst, witness = abs(float(a)), (u, v, float(a))
    return _verdict(worst, witness, tol)


def check_advection_2(m: AdvectionMatrix, g: Graph | None = None, tol: float = DEFAULT_TOL) -> Verdict:
    """sum over u in N+(v) of d_vu a_uv equals -1 for every non-sink v.

    Sinks are skipped; their number is stored in ``note``.
    """
    g = g or m.graph
    worst, witness, skipped = 0.0, None, 0
    for v in range(m.n):
        if g.out_degree(v) == 0:
            skipped += 1
            continue
        s = sum(d * float(m.entry(u, v)) for u, d in g.out_adj[v])
        if abs(s + 1.0) > worst:
            worst, witness = abs(s + 1.0), (v, s)
    return _verdict(worst, witness, tol, note=f"skipped_sinks={skipped}")


def _splitting_violation(m: AdvectionMatrix, g: Graph) -> tuple[float, tuple | None]:
    worst, witness = 0.0, None
    for v in range(m.n):
        if g.out_degree(v) < 2:
            continue
        scaled = [(u, d * float(m.entry(u, v))) for u, d in g.out_adj[v]]
        lo = min(scaled, key=lambda t: t[1])
        hi = max(scaled, key=lambda t: t[1])
        scale = max(abs(lo[1]), abs(hi[1]))
        if scale == 0.0:
            continue
        rel = (hi[1] - lo[1]) / scale
        if rel > worst:
            worst, witness = rel, (v, lo[0], hi[0], lo[1], hi[1])
    return worst, witness


def check_splitting(
    m: AdvectionMatrix,
    g: Graph | None = None,
    tol: float = DEFAULT_TOL,
    hypotheses: bool | None = None,
) -> Verdict:
    """d_vu a_uv must not depend on u in N+(v) (relative tolerance).

    The ratio condition only characterises splitting when the operator also
    transfers mass and moves forward; otherwise the verdict is
    not-applicable.  ``hypotheses`` overrides that precondition check.
    """
    g = g or m.graph
    if hypotheses is None:
        hypotheses = (
            check_mass_transfer_1(m, tol).passed
            and check_mass_transfer_2(m, tol).passed
            and check_advection_1(m, g, tol).passed
        )
    worst, witness = _splitting_violation(m, g)
    if not hypotheses:
        return Verdict(Status.NOT_APPLICABLE, worst, witness, "hypotheses unmet")
    return _verdict(worst, witness, tol)


AXIOMS = ("Locality", "Mass Transfer I", "Mass Transfer II", "Advection I", "Advection II", "Splitting")
_KEYS = {
    "Locality": "locality",
    "Mass Transfer I": "mass_transfer_1",
    "Mass Transfer II": "mass_transfer_2",
    "Advection I": "advection_1",
    "Advection II": "advection_2",
    "Splitting": "splitting",
}


@dataclass(frozen=True)
class AxiomReport:
    kind: Kind
    tol: float
    verdicts: dict[str, Verdict]
    skipped_sinks: int = 0

    def __getitem__(self, axiom: str) -> Verdict:
        return self.verdicts[axiom]

    @property
    def all_pass(self) -> bool:
        """True when no applicable axiom fails."""
        return all(v.status is not Status.FAIL for v in self.verdicts.values())

    def to_text(self) -> str:
        """Machine-readable ``key=value`` lines."""
        lines = [f"kind={self.kind}", f"tol={self.tol!r}", f"skipped_sinks={self.skipped_sinks}"]
        for axiom in AXIOMS:
            v = self.verdicts[axiom]
            key = _KEYS[axiom]
            lines.append(f"{key}.status={v.status}")
            lines.append(f"{key}.worst_violation={v.worst_violation:.17g}")
            if v.witness is not None:
                lines.append(f"{key}.witness={' '.join(_fmt_witness(w) for w in v.witness)}")
        return "\n".join(lines) + "\n"


def _fmt_witness(w) -> str:
    return f"{w:.17g}" if isinstance(w, float) else str(w)


_MARK = {Status.PASS: "Y", Status.FAIL: "N", Status.NOT_APPLICABLE: "n/a"}


def format_table(reports: list[AxiomReport]) -> str:
    """Axioms as rows, operators as columns, Y/N marks."""
    width = max(len(a) for a in AXIOMS)
    header = "Axiom".ljust(width) + "".join(f"  {str(r.kind):>5}" for r in reports)
    rule = "-" * len(header)
    rows = [header, rule]
    for axiom in AXIOMS:
        rows.append(axiom.ljust(width) + "".join(f"  {_MARK[r[axiom].status]:>5}" for r in reports))
    rows.append(rule)
    return "\n".join(rows) + "\n"


def check_axioms(m: AdvectionMatrix, g: Graph | None = None, tol: float = DEFAULT_TOL) -> AxiomReport:
    g = g or m.graph
    mt1 = check_mass_transfer_1(m, tol)
    mt2 = check_mass_transfer_2(m, tol)
    adv1 = check_advection_1(m, g, tol)
    adv2 = check_advection_2(m, g, tol)
    split = check_splitting(m, g, tol, hypotheses=mt1.passed and mt2.passed and adv1.passed)
    verdicts = {
        "Locality": check_locality(m, g, tol),
        "Mass Transfer I": mt1,
        "Mass Transfer II": mt2,
        "Advection I": adv1,
        "Advection II": adv2,
        "Splitting": split,
    }
    skipped = sum(1 for v in range(m.n) if g.out_degree(v) == 0)
    return AxiomReport(m.kind, tol, verdicts, skipped)


def neighborhood_consistent(m: AdvectionMatrix, v: int, g: Graph | None = None, atol: float = 1e-15) -> bool:
    """Rebuild the operator on the subgraph induced by N[v] and compare column v.

    Exercises the stronger form of locality: a column must only depend on the
    closed neighbourhood of its node.
    """
    g = g or m.graph
    nodes = sorted({v, *g.successors(v), *g.predecessors(v)})
    local = {x: i for i, x in enumerate(nodes)}
    sub_edges = [(local[a], local[b], d) for a, b, d in g.edges if a in local and b in local]
    sub = build_graph(sub_edges, len(nodes))
    col = dict(build_operator(sub, m.kind).columns[local[v]])
    full = {u: float(a) for u, a in m.columns[v]}
    for u, a in full.items():
        if abs(a - float(col.get(local[u], 0.0))) > atol:
            return False
    return all(nodes[i] in full for i in col)


# ---------------------------------------------------------------------------
# coordinate text export


def format_matrix(m: AdvectionMatrix) -> str:
    entries = sorted((u, v, float(a)) for u, v, a in _all_entries(m))
    lines = [f"# kind={m.kind} n={m.n}"]
    lines += [f"{u} {v} {a:.17g}" for u, v, a in entries]
    return "\n".join(lines) + "\n"


def _all_entries(m: AdvectionMatrix):
    for v, col in enumerate(m.columns):
        for u, a in col:
            yield u, v, a


def parse_matrix(text: str) -> tuple[Kind, sp.csc_matrix]:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ParseError("missing '# kind=.. n=..' header")
    try:
        header = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        kind, n = Kind(header["kind"]), int(header["n"])
        rows, cols, vals = [], [], []
        for line in lines[1:]:
            if not line.strip():
                continue
            r, c, a = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(float(a))
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad matrix file: {exc}") from None
    return kind, sp.csc_matrix((vals, (rows, cols)), shape=(n, n))
