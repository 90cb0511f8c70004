import argparse
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from src.cli import suites
from src.cli.config_loader import load_config
from src.cli.manifest import RunManifest
from src.cli.reports import report_document, table_path, write_json, write_table
from src.common.errors import CapacityError, ComplementEmpty, InputError
from src.common.logger import setup_logger
from src.common.seeding import stream
from src.common.settings import Settings, load_settings, resolve_threads
from src.database.manager import ResultStore
from src.ergodicity_harness.experiment import ergodicity_experiment
from src.ergodicity_harness.mpl import MPL_CAP
from src.exclusion_sim.boundary import make_boundary_spec
from src.exclusion_sim.configuration import Configuration
from src.exclusion_sim.measures import MeasureSpec
from src.exclusion_sim.observers import OccupationIntegral, Snapshots
from src.exclusion_sim.simulator import run_trajectories
from src.graph_core.families import FAMILIES, family_exhaustion, generate
from src.graph_core.io import graph_hash, read_graph, write_graph
from src.graph_core.metric import ball, default_origin, distances, eccentricity
from src.potential_theory.harmonic import resistance_matrix
from src.potential_theory.marginal import boundary_flow_scaling, stationary_marginal
from src.potential_theory.scaling import EXIT_MODES, VOLUME_MODES, level_scales, scaling_report
from src.potential_theory.trace import trace_network
from src.potential_theory.walks import commute_time, exit_times

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_ERROR = 0, 1, 2
# all-pairs resistance tables above this size fall back to the farthest pair
ALL_PAIRS_LIMIT = 60
COMMUTE_TOL = 1e-8
ROW_SUM_TOL = 1e-12
ENERGY_TOL = 1e-8
AGREEMENT_TOL = 1e-8
DEFAULT_GASKET_CORNER_RATES = ((1.0, 1.0), (2.0, 1.0), (1.0, 2.0))


@dataclass
class CommandResult:
    summary: list[str]
    payload: dict = field(default_factory=dict)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    checks: pd.DataFrame | None = None
    graph_hash: str | None = None
    inputs: dict = field(default_factory=dict)
    # generate and experiment write their own primary output
    primary: object = None
    always_tables: bool = False


@contextmanager
def stage(name: str):
    logger.info(f"==== Stage: {name} ====")
    yield
    logger.info(f"==== Stage: {name} finished ====")


def _checks_frame(rows: list[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=suites.CHECK_COLUMNS)


def _tol(args, settings: Settings) -> float:
    return args.tol if args.tol is not None else settings.tolerance


def _seed(args) -> int:
    return args.seed if args.seed is not None else 0


def _reservoir_args(entries) -> dict[int, tuple[float, float]] | None:
    if not entries:
        return None
    return {int(v): (float(plus), float(minus)) for v, plus, minus in entries}


def _load_graph(args):
    if not args.graph:
        raise InputError("--graph is required for this command.")
    g, reservoirs = read_graph(args.graph)
    reservoirs = _reservoir_args(getattr(args, "reservoir", None)) or reservoirs
    spec = make_boundary_spec(g, reservoirs) if reservoirs else None
    return g, reservoirs, spec, graph_hash(g, reservoirs)


# --- commands ---

def cmd_generate(args, settings: Settings) -> CommandResult:
    params = {
        "path": {"n": args.n},
        "lattice_box": {"d": args.d, "side": args.side},
        "sg": {"level": args.level},
        "vicsek": {"level": args.level},
        "carpet": {"level": args.level},
    }[args.family]
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise InputError(f"{args.family} needs --{' --'.join(missing)}.")
    with stage("Generate graph"):
        g = generate(args.family, max_vertices=settings.max_vertices, **params)
        reservoirs = _reservoir_args(args.reservoir)
        if reservoirs:
            make_boundary_spec(g, reservoirs)

    def write(out):
        write_graph(g, out, reservoirs)

    return CommandResult(
        summary=[f"{args.family} {params}: {g.n} vertices, {len(g.edges)} edges"],
        payload={"vertices": g.n, "edges": len(g.edges)},
        graph_hash=graph_hash(g, reservoirs),
        primary=write,
    )


def cmd_resistance(args, settings: Settings) -> CommandResult:
    g, _, _, digest = _load_graph(args)
    tol = _tol(args, settings)
    with stage("Effective resistance"):
        if args.pair:
            pairs = [(int(x), int(y)) for x, y in args.pair]
        elif g.n <= ALL_PAIRS_LIMIT:
            pairs = [(g.vertices[i], g.vertices[j]) for i in range(g.n) for j in range(i + 1, g.n)]
        else:
            origin = default_origin(g)
            pairs = [(origin, g.vertices[int(np.argmax(distances(g, origin)))])]
        rows = []
        for x, y in pairs:
            commute = commute_time(g, x, y, tol)
            rows.append(
                {
                    "x": x,
                    "y": y,
                    "r_eff": commute.identity / g.volume(),
                    "commute": commute.commute,
                    "identity": commute.identity,
                    "residual": commute.residual,
                }
            )
        table = pd.DataFrame(rows)
    if g.n <= ALL_PAIRS_LIMIT:
        dense = resistance_matrix(g)
        spread = max(abs(dense[g.position(r["x"]), g.position(r["y"])] - r["r_eff"]) for r in rows)
    else:
        spread = np.nan
    checks = _checks_frame(
        [
            {
                "check": "commute_identity",
                "passed": bool(table["residual"].max() <= COMMUTE_TOL),
                "value": table["residual"].max(),
                "bound": COMMUTE_TOL,
                "residual": table["residual"].max(),
            }
        ]
    )
    return CommandResult(
        summary=[f"{len(table)} pairs, max commute residual {table['residual'].max():.2e}"],
        payload={"pairs": table, "pseudo_inverse_gap": spread},
        tables={"resistance": table},
        checks=checks,
        graph_hash=digest,
    )


def cmd_exit_time(args, settings: Settings) -> CommandResult:
    g, _, _, digest = _load_graph(args)
    origin = args.origin if args.origin is not None else default_origin(g)
    radius = args.radius if args.radius is not None else eccentricity(g, origin)
    members = ball(g, origin, radius)
    if len(members) == g.n:
        raise ComplementEmpty(f"B({origin}, {radius}) is the whole graph; the walk never exits.")
    with stage("Exit times"):
        times = exit_times(g, members, _tol(args, settings))
    table = pd.DataFrame({"vertex": list(times), "exit_time": list(times.values())})
    payload = {
        "origin": origin,
        "radius": radius,
        "members": len(members),
        "max_exit_time": float(table["exit_time"].max()),
        "origin_exit_time": times[origin],
    }
    return CommandResult(
        summary=[f"B({origin}, {radius}): {len(members)} vertices, max exit time {payload['max_exit_time']:.6g}"],
        payload=payload,
        tables={"exit_times": table},
        graph_hash=digest,
    )


def cmd_trace(args, settings: Settings) -> CommandResult:
    g, reservoirs, _, digest = _load_graph(args)
    boundary = args.boundary or (sorted(reservoirs) if reservoirs else list(g.corners))
    if not boundary:
        raise InputError("No boundary given and the graph has no reservoirs or corners.")
    with stage("Trace network"):
        trace = trace_network(g, boundary, _tol(args, settings))
        rng = stream(_seed(args), "trace")
        values = rng.standard_normal(len(trace.boundary))
        energy_residual = trace.energy_residual(values)
    scale = max(1.0, float(g.weights.max()))
    rows = [
        {"check": "row_sums", "passed": trace.row_sum_residual() <= ROW_SUM_TOL * scale,
         "value": trace.row_sum_residual(), "bound": ROW_SUM_TOL * scale, "residual": trace.row_sum_residual()},
        {"check": "partition_of_unity", "passed": trace.partition_of_unity_residual() <= ENERGY_TOL,
         "value": trace.partition_of_unity_residual(), "bound": ENERGY_TOL, "residual": trace.partition_of_unity_residual()},
        {"check": "energy_identity", "passed": energy_residual <= ENERGY_TOL,
         "value": energy_residual, "bound": ENERGY_TOL, "residual": energy_residual},
    ]
    table = pd.DataFrame(trace.conductances, index=trace.boundary, columns=trace.boundary)
    table = table.rename_axis("a").reset_index()
    return CommandResult(
        summary=[f"Trace onto {len(trace.boundary)} boundary vertices, row-sum residual {trace.row_sum_residual():.2e}"],
        payload={
            "boundary": trace.boundary,
            "conductances": trace.conductances,
            "kernel": trace.kernel,
        },
        tables={"trace": table},
        checks=_checks_frame(rows),
        graph_hash=digest,
    )


def cmd_marginal(args, settings: Settings) -> CommandResult:
    g, _, spec, digest = _load_graph(args)
    if spec is None:
        raise InputError("marginal needs reservoirs: a boundary section in the graph file or --reservoir.")
    with stage("Stationary marginal"):
        profile = stationary_marginal(g, spec, _tol(args, settings))
    low, high = profile.bounds
    rows = [
        {"check": "duality", "passed": profile.agreement <= AGREEMENT_TOL,
         "value": profile.agreement, "bound": AGREEMENT_TOL, "residual": profile.agreement},
        {"check": "density_bounds", "passed": bool(profile.rho.min() >= low - 1e-12 and profile.rho.max() <= high + 1e-12),
         "value": float(profile.rho.min()), "bound": low, "residual": np.nan},
    ]
    if g.n <= settings.state_cap:
        with stage("Full-chain stationary law"):
            chain = suites._chain_marginals(g, spec, settings.state_cap)
        gap = float(np.abs(chain - profile.rho).max())
        rows.append({"check": "full_chain", "passed": gap <= AGREEMENT_TOL, "value": gap, "bound": AGREEMENT_TOL, "residual": gap})
    table = pd.DataFrame({"vertex": list(g.vertices), "rho": profile.rho, "rho_trace": profile.rho_trace})
    return CommandResult(
        summary=[
            f"rho in [{profile.rho.min():.6g}, {profile.rho.max():.6g}], total |flow| {profile.total_flow:.6g}, "
            f"energy {profile.energy:.6g}"
        ],
        payload={
            "flows": profile.flows,
            "energy": profile.energy,
            "total_flow": profile.total_flow,
            "gamma": spec.gamma,
            "gamma_prime": spec.gamma_prime,
            "delta": spec.delta,
            "bounds": profile.bounds,
        },
        tables={"marginal": table},
        checks=_checks_frame(rows),
        graph_hash=digest,
    )


def cmd_scaling(args, settings: Settings) -> CommandResult:
    volume_mode = args.volume_mode or settings.volume_mode
    exit_mode = args.exit_mode or settings.exit_mode
    digest = None
    with stage("Build exhaustion"):
        if args.family:
            ex = family_exhaustion(args.family, args.levels, max_vertices=settings.max_vertices)
        else:
            g, _, _, digest = _load_graph(args)
            ex = suites.graph_exhaustion(g)
            ex = replace(ex, radii=ex.radii[: args.levels], subgraphs=ex.subgraphs[: args.levels])
    with stage("Scaling report"):
        report = scaling_report(
            ex,
            eps_values=tuple(args.eps),
            probe_pairs=args.probe_pairs if args.probe_pairs is not None else settings.probe_pairs,
            seed=_seed(args),
            volume_mode=volume_mode,
            exit_mode=exit_mode,
            fit_window=args.fit_window,
            tol=_tol(args, settings),
        )
    tables = {"levels": report.levels, "probes": report.probes}
    if args.boundary_flow:
        if args.family != "sg":
            raise InputError("--boundary-flow is defined for the sg family only.")
        with stage("Gasket boundary flow"):
            tables["boundary_flow"] = boundary_flow_scaling(range(1, args.levels + 1), DEFAULT_GASKET_CORNER_RATES)
    return CommandResult(
        summary=[
            f"{len(report.levels)} levels: alpha_hat {report.alpha_hat:.4f} (rms {report.alpha_residual:.2e}), "
            f"beta_hat {report.beta_hat:.4f} (rms {report.beta_residual:.2e})"
        ],
        payload={
            "alpha_hat": report.alpha_hat,
            "beta_hat": report.beta_hat,
            "alpha_residual": report.alpha_residual,
            "beta_residual": report.beta_residual,
            "levels": report.levels,
        },
        tables=tables,
        graph_hash=digest,
        inputs={"family": args.family, "levels": args.levels, "volume_mode": volume_mode, "exit_mode": exit_mode},
    )


def _auto_time_scale(g) -> float:
    """T_N of the largest dyadic ball around the default origin that leaves part of g outside."""
    ex = suites.graph_exhaustion(g)
    _, time_scale, _ = level_scales(ex, ex.levels[-1])
    return time_scale


def cmd_simulate(args, settings: Settings) -> CommandResult:
    g, _, spec, digest = _load_graph(args)
    time_scale = _auto_time_scale(g) if args.time_scale == "auto" else float(args.time_scale)
    if args.initial == "product":
        initial = MeasureSpec.product(stationary_marginal(g, spec).rho) if spec else MeasureSpec.bernoulli(args.alpha)
    elif args.initial == "empty":
        initial = Configuration.empty(g)
    else:
        initial = Configuration.full(g)
    times = sorted(args.times) if args.times else [args.horizon]
    if times[-1] > args.horizon:
        raise InputError("Observation times must not exceed the horizon.")
    blocks = [tuple(int(v) for v in block) for block in args.block] if args.block else [ball(g, default_origin(g), 2)]

    def observers():
        made = [Snapshots(times)]
        if args.observe == "occupation":
            made.append(OccupationIntegral())
        return made

    with stage("Simulate trajectories"):
        runs = run_trajectories(
            g,
            spec,
            initial,
            time_scale,
            args.horizon,
            args.trajectories,
            _seed(args),
            observer_factory=observers,
            label="simulate",
            threads=resolve_threads(args.threads, settings),
        )

    rows, conserved = [], True
    for i, run in enumerate(runs):
        snaps = run.observables["snapshots"]
        if spec is None:
            conserved &= bool(np.all(snaps.sum(axis=1) == run.initial.particles))
        if args.observe == "block-averages":
            for t, occ in zip(times, snaps):
                for b, block in enumerate(blocks):
                    value = float(np.mean(occ[g.positions(block)]))
                    rows.append({"trajectory": i, "time": t, "observable": f"block:{b}", "value": value})
        else:
            for v, value in zip(g.vertices, run.observables["occupation_integral"]):
                rows.append({"trajectory": i, "time": args.horizon, "observable": f"occupation:{v}", "value": value})
    table = pd.DataFrame(rows, columns=["trajectory", "time", "observable", "value"])
    checks = None
    if spec is None:
        checks = _checks_frame(
            [{"check": "particle_conservation", "passed": conserved, "value": float(conserved), "bound": 1.0, "residual": np.nan}]
        )
    payload = {
        "vertices": g.n,
        "time_scale": time_scale,
        "horizon": args.horizon,
        "trajectories": len(runs),
        "mean_events": float(np.mean([r.event_count for r in runs])),
        "absorbed": sum(r.absorbed for r in runs),
        "initial": args.initial,
        "blocks": blocks,
    }
    return CommandResult(
        summary=[f"{len(runs)} trajectories, T={time_scale:.6g}, mean events {payload['mean_events']:.1f}"],
        payload=payload,
        tables={"observables": table},
        checks=checks,
        graph_hash=digest,
        always_tables=True,
        inputs={"alpha": args.alpha, "horizon": args.horizon, "trajectories": args.trajectories},
    )


def cmd_verify(args, settings: Settings) -> CommandResult:
    g, spec, digest = None, None, None
    if args.graph:
        g, _, spec, digest = _load_graph(args)
    elif args.suite not in ("mpl", "two-block"):
        raise InputError(f"--graph is required for the {args.suite} suite.")
    options = argparse.Namespace(**vars(args))
    options.seed = _seed(args)
    options.state_cap = min(settings.state_cap, MPL_CAP)
    options.ball_cap = settings.ball_enumeration_cap
    options.volume_mode = args.volume_mode or settings.volume_mode
    options.exit_mode = args.exit_mode or settings.exit_mode
    if options.bundle is None:
        options.bundle = "edge_pairs" if args.suite == "ensembles" else "occupation"

    with stage(f"Verify {args.suite}"):
        if args.suite == "mpl":
            payload, tables, checks = suites.run_mpl(g, options)
        elif args.suite == "ensembles":
            payload, tables, checks = suites.run_ensembles(g, options)
        elif args.suite == "two-block":
            payload, tables, checks = suites.run_two_block(g, options)
        elif args.suite == "averaging":
            payload, tables, checks = suites.run_averaging(g, options)
        elif args.suite == "boundary":
            payload, tables, checks = suites.run_boundary(g, spec, options)
        else:
            payload, tables, checks = suites.run_spectral(g, options)
    failed = int((~checks["passed"].astype(bool)).sum())
    return CommandResult(
        summary=[f"suite {args.suite}: {len(checks) - failed}/{len(checks)} checks passed"],
        payload=payload,
        tables=tables,
        checks=checks,
        graph_hash=digest,
        inputs={"suite": args.suite},
    )


def cmd_experiment(args, settings: Settings) -> CommandResult:
    config = load_config(args.config)
    if args.threads is not None:
        config = replace(config, threads=resolve_threads(args.threads, settings))
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    digest = None
    if Path(config.graph).is_file():
        g, reservoirs = read_graph(config.graph)
        digest = graph_hash(g, reservoirs)
    with stage("Local ergodicity experiment"):
        report = ergodicity_experiment(config)

    summary = []
    for f in config.fields:
        for eps in config.eps:
            trend = report.trend(f, eps, policy="product")
            decreasing = report.strictly_decreasing(f, eps, policy="product")
            summary.append(
                f"{f} eps={eps:g}: estimates {[float(f'{v:.4g}') for v in trend]} "
                f"({'strictly decreasing' if decreasing else 'not strictly decreasing'})"
            )
    if len(report.boundary):
        worst = report.boundary["z_score"].abs().max()
        summary.append(f"boundary statistic: max |z| {worst:.2f}")

    def write(out):
        write_table(report.curves, out)
        write_table(report.scales, table_path(out, "scales"))
        if len(report.boundary):
            write_table(report.boundary, table_path(out, "boundary"))

    return CommandResult(
        summary=summary,
        payload={"rows": len(report.curves)},
        graph_hash=digest,
        inputs=config.as_dict(),
        primary=write,
    )


COMMANDS = {
    "generate": cmd_generate,
    "resistance": cmd_resistance,
    "exit-time": cmd_exit_time,
    "trace": cmd_trace,
    "marginal": cmd_marginal,
    "scaling": cmd_scaling,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="machine output file")
    common.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    common.add_argument("--tol", type=float, default=None, help="relative residual for sparse solves")
    common.add_argument("--threads", type=int, default=None, help="worker threads; 0 = one per CPU")
    common.add_argument("--csv", action="store_true", help="also write result tables as CSV next to --out")
    common.add_argument("--no-db", action="store_true", help="do not record the run in the result store")
    common.add_argument("--settings", type=Path, default=None, help="alternative config.ini")

    graph_opts = argparse.ArgumentParser(add_help=False)
    graph_opts.add_argument("--graph", type=Path, help="graph JSON file")
    graph_opts.add_argument(
        "--reservoir", nargs=3, action="append", metavar=("V", "LAMBDA_PLUS", "LAMBDA_MINUS"),
        help="reservoir at vertex V; overrides the file's boundary section",
    )

    scale_opts = argparse.ArgumentParser(add_help=False)
    scale_opts.add_argument("--volume-mode", choices=VOLUME_MODES, default=None)
    scale_opts.add_argument("--exit-mode", choices=EXIT_MODES, default=None)

    parser = argparse.ArgumentParser(prog="resistor-sep", description="Potential theory and exclusion processes on weighted graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="build a graph family member")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--side", type=int)
    p.add_argument("--level", type=int)
    p.add_argument("--reservoir", nargs=3, action="append", metavar=("V", "LAMBDA_PLUS", "LAMBDA_MINUS"))

    p = sub.add_parser("resistance", parents=[common, graph_opts], help="effective resistance and commute times")
    p.add_argument("--pair", nargs=2, action="append", metavar=("X", "Y"))

    p = sub.add_parser("exit-time", parents=[common, graph_opts], help="mean exit times from a ball")
    p.add_argument("--origin", type=int)
    p.add_argument("--radius", type=int)

    p = sub.add_parser("trace", parents=[common, graph_opts], help="trace network onto a boundary set")
    p.add_argument("--boundary", type=int, nargs="+")

    sub.add_parser("marginal", parents=[common, graph_opts], help="stationary one-site density")

    p = sub.add_parser("scaling", parents=[common, graph_opts, scale_opts], help="volume and time scales of an exhaustion")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--eps", type=float, nargs="+", default=[0.5, 1.0])
    p.add_argument("--probe-pairs", type=int, default=None)
    p.add_argument("--fit-window", type=int, default=3)
    p.add_argument("--boundary-flow", action="store_true")

    p = sub.add_parser("simulate", parents=[common, graph_opts], help="exact exclusion trajectories")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--initial", choices=("product", "empty", "full"), default="product")
    p.add_argument("--time-scale", default="auto")
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--trajectories", type=int, default=1)
    p.add_argument("--observe", choices=("block-averages", "occupation"), default="block-averages")
    p.add_argument("--block", type=int, nargs="+", action="append")
    p.add_argument("--times", type=float, nargs="+")

    p = sub.add_parser("verify", parents=[common, graph_opts, scale_opts], help="run a verification suite")
    p.add_argument("--suite", choices=suites.SUITES, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--alphas", type=float, nargs="+", default=[0.3, 0.5])
    p.add_argument("--max-vertices", type=int, default=5)
    p.add_argument("--random-instances", type=int, default=100)
    p.add_argument("--bundle", default=None)
    p.add_argument("--block-radius", type=float, default=2.0)
    p.add_argument("--max-block", type=int, default=14)
    p.add_argument("--samples", type=int, default=256)

    p = sub.add_parser("experiment", parents=[common], help="Monte Carlo local-ergodicity curves")
    p.add_argument("--config", type=Path, required=True)
    return parser


def _write_outputs(args, result: CommandResult, manifest: RunManifest) -> None:
    out = args.out
    if result.primary is not None:
        result.primary(out)
        manifest.outputs.append(str(out))
    else:
        document = report_document(args.command, result.payload, result.checks, manifest.provenance())
        write_json(out, document)
        manifest.outputs.append(str(out))
        if args.csv or result.always_tables:
            for name, table in result.tables.items():
                path = table_path(out, name)
                write_table(table, path)
                manifest.outputs.append(str(path))
    manifest.write(out)


def _record(settings: Settings, manifest: RunManifest, suite: str, checks: pd.DataFrame | None) -> bool:
    """Store the manifest and its checks; a run whose checks cannot be stored is not kept."""
    try:
        store = ResultStore(settings.connection_string)
        store.create_tables()
        if not store.record_run(manifest.as_dict()):
            return False
        if checks is not None and not store.record_checks(manifest.run_id, suite, checks):
            logger.error(f"Checks of run {manifest.run_id[:12]} were not stored; dropping the run row.")
            store.discard_run(manifest.run_id)
            return False
        return True
    except Exception as e:
        logger.error(f"Could not record run {manifest.run_id[:12]} in the result store: {e}")
        return False


def dispatch(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR

    try:
        settings = load_settings(args.settings)
    except (FileNotFoundError, ValueError) as e:
        print(f"resistor-sep: {e}", file=sys.stderr)
        return EXIT_ERROR
    setup_logger("src", settings.log_file, settings.log_level)

    logger.info(f"=== resistor-sep {args.command} ===")
    try:
        result = COMMANDS[args.command](args, settings)
        manifest = RunManifest(
            command=args.command,
            argv=argv,
            seed=args.seed,
            tolerances={
                "solve": _tol(args, settings),
                "state_cap": settings.state_cap,
                "dense_state_limit": settings.dense_state_limit,
            },
            graph_hash=result.graph_hash,
            inputs=result.inputs,
        )
        if args.out is not None:
            with stage("Write outputs"):
                _write_outputs(args, result, manifest)
    except (InputError, CapacityError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"resistor-sep {args.command}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as e:
        logger.critical(f"A critical error occurred in {args.command}: {e}", exc_info=True)
        logger.info(f"=== resistor-sep {args.command} FAILED ===")
        return EXIT_ERROR

    if settings.database_enabled and not args.no_db:
        if not _record(settings, manifest, getattr(args, "suite", args.command), result.checks):
            print(f"resistor-sep {args.command}: results were not stored in the result store; see the log.", file=sys.stderr)

    for line in result.summary:
        print(line)
    if result.checks is not None and len(result.checks) and not result.checks["passed"].astype(bool).all():
        failed = result.checks.loc[~result.checks["passed"].astype(bool), "check"].tolist()
        print(f"FAILED checks: {', '.join(map(str, failed[:10]))}")
        logger.info(f"=== resistor-sep {args.command} finished with failed checks ===")
        return EXIT_CHECK_FAILED
    logger.info(f"=== resistor-sep {args.command} completed successfully ===")
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
