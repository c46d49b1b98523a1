"""Command line front end: coinwalk run | sweep | mix | trajectory.

Data goes to CSV, run configuration and provenance to a JSON sidecar
next to it. Files are written whole via a temp file and atomic rename,
so a failed command leaves no partial output behind.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from . import __version__
from .analysis import ComplementarityPoint, compare_mixing, tvd
from .classical import classical_run
from .coin import coin_spec_from_config, default_coin_spec
from .errors import ConfigError, InvariantViolation, StructureError
from .evolution import (
    make_step,
    marginal_history,
    reconstruct_cycle_path,
    sample_trajectory,
)
from .graph import PortGraph, build_cycle, load_graph
from .meter import distinguishability, visibility
from .shift import build_cycle_shift, build_shift
from .state import DEFAULT_TOLERANCES, basis_state, pure_position_marginal

RNG_NAME = "numpy.random.default_rng (PCG64)"


# ----------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coinwalk",
        description="Coined quantum walks on port-labeled graphs with "
        "tunable coin measurement.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group(required=True)
    source.add_argument("--cycle", type=int, metavar="N", help="built-in cycle graph")
    source.add_argument("--graph", metavar="FILE", help="graph JSON file")
    common.add_argument(
        "--coin", choices=["hadamard", "dft", "custom"], default=None,
        help="coin family (default: hadamard on two-port graphs, dft otherwise)",
    )
    common.add_argument("--coin-file", metavar="FILE", help="JSON config for --coin custom")
    common.add_argument("--phi", type=float, default=math.pi / 2,
                        help="phase angle of the hadamard coin (radians)")
    common.add_argument("--shift", choices=["port-swap", "direction-preserving"],
                        default=None,
                        help="shift convention (direction-preserving is cycle-only; "
                        "default: direction-preserving on cycles, port-swap otherwise)")
    common.add_argument("--beta", type=float, default=0.0,
                        help="coin measurement strength in [0,1]")
    common.add_argument("--vertex-dephasing", type=float, default=0.0, metavar="P",
                        help="position dephasing strength in [0,1]")
    common.add_argument("--dephasing-placement",
                        choices=["before-shift", "after-shift"],
                        default="before-shift")
    common.add_argument("--start", default="0,0", metavar="J,K",
                        help="initial (vertex, port) basis state")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=1, metavar="W",
                        help="worker processes for sweep and trajectory")
    common.add_argument("--out", required=True, metavar="PATH", help="output CSV path")

    p_run = sub.add_parser("run", parents=[common],
                           help="evolve one configuration, emit marginals per step")
    p_run.add_argument("--steps", type=int, required=True)

    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="trade-off curve over a measurement strength grid")
    p_sweep.add_argument("--steps", type=int, required=True)
    grid = p_sweep.add_mutually_exclusive_group(required=True)
    grid.add_argument("--betas", metavar="B1,B2,...", help="explicit grid values")
    grid.add_argument("--beta-points", type=int, metavar="M",
                      help="M evenly spaced values covering [0,1]")

    p_mix = sub.add_parser("mix", parents=[common],
                           help="race time-averaged walk mixing against the classical chain")
    p_mix.add_argument("--t-max", type=int, required=True)
    p_mix.add_argument("--epsilon", type=float, required=True)

    p_traj = sub.add_parser("trajectory", parents=[common],
                            help="sample measurement records")
    p_traj.add_argument("--steps", type=int, required=True)
    p_traj.add_argument("--samples", type=int, required=True)

    return parser


def _parse_start(text: str) -> tuple[int, int]:
    try:
        j, k = text.split(",")
        return int(j), int(k)
    except ValueError:
        raise ConfigError(f"--start expects 'J,K' with integers, got {text!r}") from None


def _build_graph(args) -> PortGraph:
    if args.cycle is not None:
        return build_cycle(args.cycle)
    return load_graph(args.graph)


def _build_setup(args):
    """Resolve graph, coin, shift, start state, and the step kwargs."""
    graph = _build_graph(args)

    coin_kind = args.coin
    if coin_kind is None:
        coin_kind = "hadamard" if all(d == 2 for d in graph.vertex_degrees) else "dft"
    if coin_kind == "custom":
        if not args.coin_file:
            raise ConfigError("--coin custom requires --coin-file")
        with open(args.coin_file, encoding="utf-8") as fh:
            try:
                coin_config = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.coin_file}: not valid JSON: {exc.msg}") from None
        spec = coin_spec_from_config(coin_config, graph, phi=args.phi)
    elif coin_kind == "hadamard":
        if any(d != 2 for d in graph.vertex_degrees):
            raise ConfigError("the hadamard coin needs every vertex to have degree 2")
        spec = default_coin_spec(graph, phi=args.phi)
    else:
        spec = coin_spec_from_config({"type": "dft"}, graph, phi=args.phi)

    shift_kind = args.shift
    if shift_kind is None:
        shift_kind = "direction-preserving" if args.cycle is not None else "port-swap"
    if shift_kind == "direction-preserving":
        if args.cycle is None:
            raise ConfigError("--shift direction-preserving is defined on --cycle graphs only")
        shift = build_cycle_shift(args.cycle)
    else:
        shift = build_shift(graph)

    if not 0.0 <= args.beta <= 1.0:
        raise ConfigError(f"--beta must lie in [0,1], got {args.beta}")
    if not 0.0 <= args.vertex_dephasing <= 1.0:
        raise ConfigError(f"--vertex-dephasing must lie in [0,1], got {args.vertex_dephasing}")

    start = _parse_start(args.start)
    psi0 = basis_state(graph, *start)

    step_kwargs = dict(
        coin_spec=spec,
        shift=shift,
        vertex_p=args.vertex_dephasing,
        placement=args.dephasing_placement,
        phi=args.phi,
    )
    description = {
        "graph": {
            "source": f"cycle:{args.cycle}" if args.cycle is not None else args.graph,
            "vertices": graph.num_vertices,
            "degree": graph.degree,
            "port_labeling": [
                {"u": e.u, "pu": e.pu, "v": e.v, "pv": e.pv}
                for e in graph.to_edge_list()
            ],
        },
        "coin": {"type": coin_kind, "phi": args.phi},
        "shift": shift.kind,
        "beta": args.beta,
        "vertex_dephasing": args.vertex_dephasing,
        "dephasing_placement": args.dephasing_placement,
        "start": {"vertex": start[0], "port": start[1]},
    }
    if coin_kind == "custom":
        description["coin"]["file"] = args.coin_file
    return graph, psi0, step_kwargs, description


# ----------------------------------------------------------------------
# output helpers

def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".coinwalk-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sidecar_path(out: str) -> str:
    if out.endswith(".csv"):
        return out[: -len(".csv")] + ".meta.json"
    return out + ".meta.json"


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_outputs(files: dict[str, str]) -> None:
    for path, text in files.items():
        _atomic_write(path, text)


def _metadata(args, description: dict, extra: dict) -> str:
    meta = {
        "tool": "coinwalk",
        "version": __version__,
        "command": args.command,
        "configuration": description,
        "rng": RNG_NAME,
        "tolerances": asdict(DEFAULT_TOLERANCES),
    }
    meta.update(extra)
    return json.dumps(meta, indent=1, sort_keys=True) + "\n"


# ----------------------------------------------------------------------
# commands

def cmd_run(args) -> int:
    graph, psi0, step_kwargs, description = _build_setup(args)
    if args.steps < 0:
        raise ConfigError(f"--steps must be nonnegative, got {args.steps}")
    step = make_step(graph, beta=args.beta, **step_kwargs)
    history = marginal_history(psi0, step, args.steps)

    lines = ["t,vertex,probability"]
    for t, row in enumerate(history):
        for v, prob in enumerate(row):
            if prob != 0.0:
                lines.append(f"{t},{v},{_fmt(prob)}")
    description["steps"] = args.steps
    meta = _metadata(args, description, {"output": {"csv": args.out, "rows": len(lines) - 1}})
    _write_outputs({args.out: "\n".join(lines) + "\n", _sidecar_path(args.out): meta})
    return 0


def _sweep_point(task) -> list[float]:
    graph, psi0, steps, beta, step_kwargs = task
    step = make_step(graph, beta=beta, **step_kwargs)
    return marginal_history(psi0, step, steps)[-1].tolist()


def cmd_sweep(args) -> int:
    graph, psi0, step_kwargs, description = _build_setup(args)
    if args.steps < 0:
        raise ConfigError(f"--steps must be nonnegative, got {args.steps}")
    if args.betas is not None:
        try:
            betas = sorted(float(x) for x in args.betas.split(","))
        except ValueError:
            raise ConfigError(f"--betas expects comma-separated floats, got {args.betas!r}") from None
    else:
        if args.beta_points < 2:
            raise ConfigError("--beta-points must be at least 2")
        betas = np.linspace(0.0, 1.0, args.beta_points).tolist()
    if any(not 0.0 <= b <= 1.0 for b in betas):
        raise ConfigError("every sweep beta must lie in [0,1]")

    tasks = [(graph, psi0, args.steps, beta, step_kwargs) for beta in betas]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            finals = list(pool.map(_sweep_point, tasks))
    else:
        finals = [_sweep_point(t) for t in tasks]

    anchor_unitary = np.asarray(
        _sweep_point((graph, psi0, args.steps, 0.0, step_kwargs))
    )
    anchor_classical = classical_run(
        pure_position_marginal(psi0, graph.degree), graph, args.steps
    )
    points = [
        ComplementarityPoint(
            beta=beta,
            visibility=visibility(beta),
            distinguishability=distinguishability(beta),
            tvd_to_unitary=tvd(np.asarray(final), anchor_unitary),
            tvd_to_classical=tvd(np.asarray(final), anchor_classical),
        )
        for beta, final in zip(betas, finals)
    ]

    lines = ["beta,visibility,distinguishability,tvd_to_unitary,tvd_to_classical"]
    for pt in points:
        lines.append(
            ",".join(_fmt(x) for x in (
                pt.beta, pt.visibility, pt.distinguishability,
                pt.tvd_to_unitary, pt.tvd_to_classical,
            ))
        )
    description["steps"] = args.steps
    description["betas"] = betas
    meta = _metadata(args, description, {"output": {"csv": args.out, "rows": len(points)}})
    _write_outputs({args.out: "\n".join(lines) + "\n", _sidecar_path(args.out): meta})
    return 0


def cmd_mix(args) -> int:
    graph, psi0, step_kwargs, description = _build_setup(args)
    if args.t_max < 1:
        raise ConfigError(f"--t-max must be at least 1, got {args.t_max}")
    if not 0.0 < args.epsilon <= 1.0:
        raise ConfigError(f"--epsilon must lie in (0,1], got {args.epsilon}")
    step = make_step(graph, beta=args.beta, **step_kwargs)
    result = compare_mixing(graph, step, psi0, args.t_max, args.epsilon)

    lines = ["t,tvd_quantum_time_averaged,tvd_classical"]
    for t, q, c in zip(result.quantum.times, result.quantum.tvd_to_uniform,
                       result.classical.tvd_to_uniform):
        lines.append(f"{t},{_fmt(q)},{_fmt(c)}")
    description["t_max"] = args.t_max
    description["epsilon"] = args.epsilon
    meta = _metadata(args, description, {
        "result": {
            "quantum_crossing": result.quantum_crossing,
            "classical_crossing": result.classical_crossing,
            "first_to_cross": result.first_to_cross,
            "quantum_variant": result.quantum.variant,
            "classical_variant": result.classical.variant,
        },
        "output": {"csv": args.out, "rows": args.t_max + 1},
    })
    _write_outputs({args.out: "\n".join(lines) + "\n", _sidecar_path(args.out): meta})
    return 0


def _trajectory_chunk(task) -> list[tuple[int, int, tuple, tuple, list, tuple | None]]:
    graph, psi0, steps, beta, step_kwargs, jobs = task
    step = make_step(graph, beta=beta, **step_kwargs)
    out = []
    for index, seed in jobs:
        final, record = sample_trajectory(psi0, step, steps, seed)
        marginal = pure_position_marginal(final, graph.degree).tolist()
        out.append((index, seed, record.outcomes, record.outcome_probabilities,
                    marginal, record.vertex_outcomes))
    return out


def cmd_trajectory(args) -> int:
    graph, psi0, step_kwargs, description = _build_setup(args)
    if args.steps < 0:
        raise ConfigError(f"--steps must be nonnegative, got {args.steps}")
    if args.samples < 1:
        raise ConfigError(f"--samples must be positive, got {args.samples}")
    if args.beta <= 0.0:
        raise ConfigError(
            "trajectory sampling needs --beta > 0; with no measurement there is "
            "a single deterministic branch, which the run command already covers"
        )

    root_seed = args.seed
    if root_seed is None:
        root_seed = int(np.random.SeedSequence().entropy) % (2**63)
    sample_seeds = [
        int(s) for s in np.random.SeedSequence(root_seed).generate_state(
            args.samples, dtype=np.uint64
        )
    ]

    jobs = list(enumerate(sample_seeds))
    if args.jobs > 1:
        chunks = [jobs[i:: args.jobs] for i in range(args.jobs)]
        tasks = [
            (graph, psi0, args.steps, args.beta, step_kwargs, chunk)
            for chunk in chunks if chunk
        ]
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = [r for chunk in pool.map(_trajectory_chunk, tasks) for r in chunk]
        results.sort(key=lambda r: r[0])
    else:
        results = _trajectory_chunk(
            (graph, psi0, args.steps, args.beta, step_kwargs, jobs)
        )

    record_lines = ["sample,step,outcome,probability"]
    for index, _seed, outcomes, probs, _marginal, _vertices in results:
        for t, (o, p) in enumerate(zip(outcomes, probs), start=1):
            record_lines.append(f"{index},{t},{o},{_fmt(p)}")

    aggregate = np.zeros(graph.num_vertices)
    for _index, _seed, _o, _p, marginal, _v in results:
        aggregate += np.asarray(marginal)
    aggregate /= len(results)
    hist_lines = ["vertex,probability"]
    for v, prob in enumerate(aggregate):
        hist_lines.append(f"{v},{_fmt(prob)}")

    files = {}
    base = args.out[: -len(".csv")] if args.out.endswith(".csv") else args.out
    records_path = base + "_records.csv"
    hist_path = base + "_histogram.csv"
    files[records_path] = "\n".join(record_lines) + "\n"
    files[hist_path] = "\n".join(hist_lines) + "\n"

    reconstructable = (
        args.beta == 1.0
        and step_kwargs["shift"].kind.startswith("direction-preserving")
    )
    paths_path = None
    if reconstructable:
        direction = 1 if step_kwargs["shift"].kind == "direction-preserving" else -1
        start_vertex = description["start"]["vertex"]
        path_lines = ["sample,step,vertex"]
        for index, _seed, outcomes, _p, _m, _v in results:
            walk = reconstruct_cycle_path(
                outcomes, start_vertex, graph.num_vertices, direction
            )
            for t, vertex in enumerate(walk):
                path_lines.append(f"{index},{t},{vertex}")
        paths_path = base + "_paths.csv"
        files[paths_path] = "\n".join(path_lines) + "\n"

    description["steps"] = args.steps
    description["samples"] = args.samples
    meta = _metadata(args, description, {
        "seed": {
            "root": root_seed,
            "per_sample": "uint64 stream generated from the root seed, index order",
        },
        "output": {
            "records_csv": records_path,
            "histogram_csv": hist_path,
            "paths_csv": paths_path,
            "path_reconstruction": reconstructable,
        },
    })
    files[_sidecar_path(base + ".csv")] = meta
    _write_outputs(files)
    return 0


# ----------------------------------------------------------------------

COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "mix": cmd_mix,
    "trajectory": cmd_trajectory,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, StructureError, FileNotFoundError) as exc:
        print(f"coinwalk: configuration error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"coinwalk: numerical invariant violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
