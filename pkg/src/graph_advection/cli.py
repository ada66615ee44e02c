"""Command-line front end: ``graph-advection {gen,check,simulate,orient,observe}``.

Exit codes: 0 success, 1 axiom failure, 2 usage error, 3 I/O or parse error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import dynamics, oracles, scenarios
from .errors import AdvectionError, GraphError, NoPotential, ParseError, UnknownNode
from .graph import Graph, compute_potential, format_edge_list, read_edge_list
from .operators import DEFAULT_TOL, Kind, build_operator, check_axioms, format_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _real(text: str) -> float:
    """Parse a float, also accepting fractions such as ``1/3``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _reals(text: str) -> list[float]:
    return [_real(x) for x in text.split(",") if x.strip()]


def _times(text: str) -> list[float]:
    """``t1,t2,...`` or ``start:stop:count`` (inclusive linspace)."""
    if ":" in text:
        try:
            start, stop, count = text.split(":")
            return [float(x) for x in np.linspace(_real(start), _real(stop), int(count))]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad time grid {text!r}") from None
    return _reals(text)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.quiet = args.quiet

    def info(self, msg: str) -> None:
        if not self.quiet:
            print(msg, file=sys.stderr)

    def emit(self, text: str, path: str | None = None) -> None:
        """Write ``text`` to ``path`` (or --output, or stdout)."""
        path = path or self.args.output
        if path:
            Path(path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


def _load(path: str) -> Graph:
    try:
        return read_edge_list(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except GraphError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _initial_state(g: Graph, args) -> tuple[np.ndarray, int | None]:
    f0 = np.zeros(g.node_count)
    origin = None
    if args.mass_at is not None:
        origin = g.node_index(args.mass_at)
        f0[origin] = 1.0
    elif args.mass_file is not None:
        try:
            text = Path(args.mass_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read {args.mass_file}: {exc}") from None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{args.mass_file}:{lineno}: expected 'node value'")
            try:
                f0[g.node_index(parts[0])] = float(parts[1])
            except ValueError:
                raise ParseError(f"{args.mass_file}:{lineno}: bad value {parts[1]!r}") from None
        if np.any(f0 < 0):
            raise UsageError("initial mass must be nonnegative")
    else:
        raise UsageError("give --mass-at or --mass-file")
    if getattr(args, "origin", None) is not None:
        origin = g.node_index(args.origin)
    return f0, origin


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(ctx: _Ctx) -> int:
    a = ctx.args
    coords = None
    if a.scenario == "two-cycles":
        g = scenarios.gen_two_cycles(a.p, a.q)
    elif a.scenario == "grid":
        g, coords = scenarios.gen_grid(a.nx, a.ny, a.dx, a.dy)
    elif a.scenario == "half-line":
        g = scenarios.gen_half_line(a.n)
    elif a.scenario == "tree":
        g = scenarios.gen_branching_tree(a.root_distances, a.depth_distances)
    else:
        g = scenarios.gen_two_leaf(a.d_vw, a.d_vu)
    ctx.emit(format_edge_list(g))
    if coords is not None:
        sidecar = a.coords or (a.output + ".coords" if a.output else None)
        if sidecar:
            lines = [f"{u}\t{_fmt(x)}\t{_fmt(y)}\n" for u, (x, y) in enumerate(coords)]
            Path(sidecar).write_text("".join(lines), encoding="utf-8")
    ctx.info(f"{a.scenario}: {g.node_count} nodes, {g.edge_count} edges")
    return EXIT_OK


def cmd_check(ctx: _Ctx) -> int:
    a = ctx.args
    g = _load(a.graph)
    kinds = list(Kind) if a.kind == "all" else [Kind(a.kind)]
    reports = [check_axioms(build_operator(g, k), g, a.tol) for k in kinds]
    if not ctx.quiet:
        print(format_table(reports), end="")
    if a.report or a.output:
        ctx.emit("".join(r.to_text() for r in reports), a.report)
    return EXIT_OK if all(r.all_pass for r in reports) else EXIT_FAIL


def cmd_simulate(ctx: _Ctx) -> int:
    a = ctx.args
    g = _load(a.graph)
    m = build_operator(g, a.kind)
    f0, origin = _initial_state(g, a)
    traj = dynamics.trajectory(m, f0, a.times, a.tol)
    ctx.emit(dynamics.format_trajectory_csv(traj, g))
    final = traj.states[-1] if len(traj) else f0
    m0 = dynamics.total_mass(f0)
    summary = [
        f"mass_drift={_fmt(dynamics.total_mass(final) - m0)}",
        f"min_value={_fmt(dynamics.min_value(final))}",
    ]
    if origin is not None:
        try:
            pot = compute_potential(g)
            summary.append(f"displacement={_fmt(dynamics.average_displacement(pot, origin, final))}")
        except (NoPotential, AdvectionError):
            pass
    ctx.info(" ".join(summary))
    return EXIT_OK


def cmd_orient(ctx: _Ctx) -> int:
    a = ctx.args
    g = _load(a.graph)
    targets = tuple(g.node_index(t) for t in a.targets.split(","))
    metric = "undirected" if a.undirected_metric else "directed"
    spec = scenarios.OrientationSpec(targets, make_sinks=not a.no_sinks, metric=metric)
    out = scenarios.two_target_orient(g, spec)
    ctx.emit(format_edge_list(out))
    for t in targets:
        d = scenarios.target_distances(g, t, metric)
        finite = d[np.isfinite(d)]
        ctx.info(
            f"target={g.label(t)} reachable={len(finite)} unreachable={len(d) - len(finite)} "
            f"max_dist={_fmt(float(finite.max()))} mean_dist={_fmt(float(finite.mean()))}"
        )
    ctx.info(f"edges_in={g.edge_count} edges_out={out.edge_count}")
    return EXIT_OK


def cmd_observe(ctx: _Ctx) -> int:
    a = ctx.args
    lines: list[str] = []
    if a.observable == "grid-mean":
        ax, ay = oracles.grid_rates(a.kind, a.dx, a.dy)
        x, y = oracles.grid_mean(ax, ay, a.dx, a.dy, a.t)
        lines.append(f"grid_mean\t{_fmt(x)}\t{_fmt(y)}")
        ctx.emit("".join(line + "\n" for line in lines))
        return EXIT_OK
    if a.graph is None:
        raise UsageError(f"observe {a.observable} needs --graph")
    g = _load(a.graph)
    m = build_operator(g, a.kind)
    if a.observable == "limit-split":
        if a.v is None:
            raise UsageError("limit-split needs --v")
        v = g.node_index(a.v)
        for u in g.successors(v):
            lines.append(f"{g.label(u)}\t{_fmt(oracles.limit_cone_mass(m, v, u, g))}")
    else:
        f0, origin = _initial_state(g, a)
        if a.observable == "displacement":
            if origin is None:
                raise UsageError("displacement needs --mass-at or --origin")
            ft = dynamics.evolve(m, f0, a.t, a.tol)
            d = dynamics.average_displacement(compute_potential(g), origin, ft)
            lines.append(f"displacement\t{_fmt(d)}")
        elif a.observable == "cone-mass":
            ft = dynamics.evolve(m, f0, a.t, a.tol)
            nodes = [g.node_index(a.u)] if a.u is not None else range(g.node_count)
            for u in nodes:
                lines.append(f"{g.label(u)}\t{_fmt(dynamics.cone_mass(g, ft, u))}")
        else:
            if a.u is None:
                raise UsageError("flow-residual needs --u")
            r = dynamics.flow_residual(g, m, f0, g.node_index(a.u), a.t, a.quad_steps, a.tol)
            lines.append(f"flow_residual\t{_fmt(r.residual)}")
            lines.append(f"lhs\t{_fmt(r.lhs)}")
            lines.append(f"rhs\t{_fmt(r.rhs)}")
            if r.flags:
                lines.append(f"flags\t{','.join(r.flags)}")
    lines.append(f"# kind={m.kind} tol={a.tol!r}")
    ctx.emit("".join(line + "\n" for line in lines))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    def global_flags(p, suppress):
        default = (lambda value: argparse.SUPPRESS) if suppress else (lambda value: value)
        p.add_argument("--tol", type=_real, default=default(DEFAULT_TOL), help="numerical tolerance (default 1e-10)")
        p.add_argument("--output", "-o", default=default(None), help="output file (default stdout)")
        p.add_argument("--quiet", "-q", action="store_true", default=default(False), help="suppress summaries")

    # subcommands repeat the global flags without defaults so they never
    # overwrite a value given before the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    global_flags(common, suppress=True)

    kinds = [k.value for k in Kind]
    parser = argparse.ArgumentParser(
        prog="graph-advection", description="Advection operators on distance-weighted directed graphs."
    )
    global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="write a scenario graph as an edge list")
    gsub = gen.add_subparsers(dest="scenario", required=True)
    p = gsub.add_parser("two-cycles", parents=[common])
    p.add_argument("--p", type=int, default=5)
    p.add_argument("--q", type=int, default=9)
    p = gsub.add_parser("grid", parents=[common])
    p.add_argument("--nx", type=int, default=40)
    p.add_argument("--ny", type=int, default=120)
    p.add_argument("--dx", type=_real, default=3.0)
    p.add_argument("--dy", type=_real, default=1.0)
    p.add_argument("--coords", default=None, help="coordinate sidecar path (default <output>.coords)")
    p = gsub.add_parser("half-line", parents=[common])
    p.add_argument("--n", type=int, default=400)
    p = gsub.add_parser("tree", parents=[common])
    p.add_argument("--root-distances", type=_reals, default=[1.0, 1 / 2, 1 / 3])
    p.add_argument("--depth-distances", type=_reals, default=[1 / 2, 1 / 4])
    p = gsub.add_parser("two-leaf", parents=[common])
    p.add_argument("--d-vw", type=_real, default=1.0)
    p.add_argument("--d-vu", type=_real, default=2.0)

    p = sub.add_parser("check", parents=[common], help="verify the axioms for an operator")
    p.add_argument("graph")
    p.add_argument("--kind", choices=kinds + ["all"], default="A4")
    p.add_argument("--report", default=None, help="machine-readable report path")

    def initial(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--mass-at", default=None, help="unit mass at this node")
        g.add_argument("--mass-file", default=None, help="file of 'node value' lines")
        p.add_argument("--origin", default=None, help="reference node for displacement")

    p = sub.add_parser("simulate", parents=[common], help="evolve a mass distribution, write CSV")
    p.add_argument("graph")
    p.add_argument("--kind", choices=kinds, default="A4")
    p.add_argument("--times", type=_times, required=True, help="t1,t2,... or start:stop:count")
    initial(p)

    p = sub.add_parser("orient", parents=[common], help="two-target orientation of a road graph")
    p.add_argument("graph")
    p.add_argument("--targets", required=True, help="comma-separated target nodes")
    p.add_argument("--no-sinks", action="store_true", help="keep out-edges of the targets")
    p.add_argument("--undirected-metric", action="store_true", help="distances ignore edge directions")

    p = sub.add_parser("observe", parents=[common], help="compute an observable")
    p.add_argument(
        "observable", choices=["displacement", "cone-mass", "flow-residual", "limit-split", "grid-mean"]
    )
    p.add_argument("--graph", default=None)
    p.add_argument("--kind", choices=kinds, default="A4")
    p.add_argument("--t", type=_real, default=1.0)
    p.add_argument("--u", default=None)
    p.add_argument("--v", default=None)
    p.add_argument("--quad-steps", type=int, default=256)
    p.add_argument("--dx", type=_real, default=3.0)
    p.add_argument("--dy", type=_real, default=1.0)
    initial(p)
    return parser


COMMANDS = {"gen": cmd_gen, "check": cmd_check, "simulate": cmd_simulate, "orient": cmd_orient, "observe": cmd_observe}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](_Ctx(args))
    except (UsageError, UnknownNode) as exc:
        # KeyError.__str__ quotes its message
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AdvectionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
