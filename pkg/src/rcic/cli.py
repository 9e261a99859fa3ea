"""Command line front end: experiment runs, oracle checks, scalability slices.

Every run flag can also come from a key=value config file (--config); flags
given on the command line win.  File keys use the flag names with
underscores, e.g. `rumor_size = 150`, `algo = topk,bab`.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    ALGORITHMS,
    SWEEP_AXES,
    ExperimentConfig,
    run_experiment,
    run_scalability,
    write_rows,
)
from .blocking import LogisticParams
from .exact import check_envelope_dominance, find_submodularity_violation


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_FILE_CONVERTERS = {
    "graph": str,
    "undirected": _parse_bool,
    "directed": _parse_bool,
    "algo": str,
    "k": int,
    "rumor_size": int,
    "rumor_seed": int,
    "T": int,
    "alpha": float,
    "beta": float,
    "samples": int,
    "rho": float,
    "epsilon": float,
    "delta": float,
    "sweep": str,
    "certified_bounds": _parse_bool,
    "node_cap": int,
    "time_cap": float,
    "seed": int,
    "threads": int,
    "out": str,
    "format": str,
    "fractions": str,
}


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, text = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _FILE_CONVERTERS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _FILE_CONVERTERS[key](text.strip())
    return values


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file supplying any of the flags")
    p.add_argument("--graph", help="edge-list file path")
    p.add_argument("--undirected", action="store_true", default=False,
                   help="treat edges as undirected (the default)")
    p.add_argument("--directed", action="store_true", default=False,
                   help="treat edges as directed")
    p.add_argument("--algo", help="comma-separated subset of: "
                                  + ",".join(ALGORITHMS))
    p.add_argument("--k", type=int, help="protector budget")
    p.add_argument("--rumor-size", type=int, dest="rumor_size")
    p.add_argument("--rumor-seed", type=int, dest="rumor_seed")
    p.add_argument("-T", type=int, dest="T", help="walk length threshold")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--samples", type=int, help="walks per start node (X)")
    p.add_argument("--rho", type=float, help="progressive threshold decay")
    p.add_argument("--epsilon", type=float,
                   help="with --delta, derive X from the sampling bound")
    p.add_argument("--delta", type=float)
    p.add_argument("--sweep", help="AXIS=v1,v2,... with AXIS one of: "
                                   + ",".join(SWEEP_AXES))
    p.add_argument("--certified-bounds", action="store_true", default=False,
                   dest="certified_bounds",
                   help="divide envelope bounds by the greedy factor")
    p.add_argument("--node-cap", type=int, dest="node_cap",
                   help="branch-and-bound expansion cap")
    p.add_argument("--time-cap", type=float, dest="time_cap",
                   help="branch-and-bound wall-time cap in seconds")
    p.add_argument("--seed", type=int, help="walk sampling seed")
    p.add_argument("--threads", type=int, help="sampling worker cap")
    p.add_argument("--out", help="report path; stdout when omitted")
    p.add_argument("--format", choices=("csv", "json"), dest="out_format")


def _merged(args, file_cfg: dict, key: str):
    value = getattr(args, key, None)
    if isinstance(value, bool):
        return value or file_cfg.get(key, False)
    if value is not None:
        return value
    return file_cfg.get(key)


def _parse_sweep(text: str):
    axis, sep, values = text.partition("=")
    axis = axis.strip().replace("-", "_")
    if not sep or not values:
        raise ValueError(f"bad sweep spec {text!r}; expected AXIS=v1,v2,...")
    return axis, tuple(float(v) for v in values.split(","))


def _build_config(args) -> ExperimentConfig:
    file_cfg = _load_config_file(args.config) if args.config else {}
    graph = _merged(args, file_cfg, "graph")
    if graph is None:
        raise ValueError("no graph given (--graph or config file)")
    undirected = _merged(args, file_cfg, "undirected")
    directed = _merged(args, file_cfg, "directed")
    if undirected and directed:
        raise ValueError("--undirected and --directed conflict")

    kwargs = {"graph_path": graph, "directed": bool(directed)}
    algo = _merged(args, file_cfg, "algo")
    if algo is not None:
        kwargs["algorithms"] = tuple(a.strip() for a in algo.split(",") if a.strip())
    sweep = _merged(args, file_cfg, "sweep")
    if sweep is not None:
        kwargs["sweep_axis"], kwargs["sweep_values"] = _parse_sweep(sweep)
    for arg_key, cfg_key in (
            ("k", "k"), ("rumor_size", "rumor_size"), ("rumor_seed", "rumor_seed"),
            ("T", "T"), ("alpha", "alpha"), ("beta", "beta"), ("samples", "X"),
            ("rho", "rho"), ("epsilon", "epsilon"), ("delta", "delta"),
            ("node_cap", "node_cap"), ("time_cap", "time_cap"), ("seed", "seed"),
            ("threads", "threads"), ("out", "out_path"),
            ("format", "out_format")):
        value = _merged(args, file_cfg, arg_key)
        if value is not None:
            kwargs[cfg_key] = value
    if _merged(args, file_cfg, "certified_bounds"):
        kwargs["certified_bounds"] = True
    return ExperimentConfig(**kwargs)


def _emit(rows, config: ExperimentConfig) -> None:
    if config.out_path is None:
        write_rows(rows, sys.stdout, config.out_format)
    else:
        print(f"wrote {len(rows)} rows to {config.out_path}")


def _cmd_run(args) -> int:
    config = _build_config(args)
    rows = run_experiment(config)
    _emit(rows, config)
    return 0


def _cmd_scalability(args) -> int:
    config = _build_config(args)
    file_cfg = _load_config_file(args.config) if args.config else {}
    fractions = _merged(args, file_cfg, "fractions")
    if fractions is None:
        raise ValueError("--fractions is required")
    rows = run_scalability(config, [float(f) for f in fractions.split(",")])
    _emit(rows, config)
    return 0


def _cmd_oracle(args) -> int:
    params = LogisticParams(args.alpha, args.beta)
    rng = np.random.default_rng(args.seed)
    if args.check == "dominance":
        bad = check_envelope_dominance(params, args.trials, rng)
        if bad is None:
            print(f"dominance: pass ({args.trials} probes)")
            return 0
        print(f"dominance: FAIL {bad}")
        return 1
    if args.check == "submodularity":
        witness = find_submodularity_violation(params, args.trials, rng)
        if witness is not None:
            print("objective is not submodular: "
                  f"gain {witness.gain_given_B:.6g} given B={sorted(witness.B)} "
                  f"> gain {witness.gain_given_A:.6g} given A={sorted(witness.A)} "
                  f"for node {witness.v}")
            return 0
        print(f"no violation found in {args.trials} trials")
        return 1
    witness = find_submodularity_violation(params, args.trials, rng,
                                           envelope=True)
    if witness is None:
        print(f"envelope submodularity: pass ({args.trials} probes)")
        return 0
    print(f"envelope submodularity: FAIL {witness}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcic",
        description="Rumor containment benchmarks: random-walk sampling, "
                    "logistic influence block, bound-driven protector selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment or sweep")
    _add_run_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_scal = sub.add_parser("scalability",
                            help="repeat a run on nested BFS slices")
    _add_run_flags(p_scal)
    p_scal.add_argument("--fractions",
                        help="ascending node fractions, e.g. 0.2,0.4,0.6,0.8,1.0")
    p_scal.set_defaults(func=_cmd_scalability)

    p_or = sub.add_parser("oracle", help="randomized property checks")
    p_or.add_argument("--check", required=True,
                      choices=("dominance", "submodularity",
                               "envelope-submodularity"))
    p_or.add_argument("--trials", type=int, default=10_000)
    p_or.add_argument("--seed", type=int, default=0)
    p_or.add_argument("--alpha", type=float, default=3.0)
    p_or.add_argument("--beta", type=float, default=1.0)
    p_or.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
