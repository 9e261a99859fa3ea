"""Experiment runner: parameter sweeps, rumor-set generation, report files.

One experiment = one graph, one rumor protocol, one or more algorithms, and
optionally one sweep axis.  Rumor sets are drawn uniformly from the top
degree decile; the same rumor seed yields nested sets across sizes (a prefix
of one permutation), so growing |R| never swaps the rumor population.
Sample stores are reused across sweep points whenever the rumor set, T, X
and seed are unchanged (k and rho sweeps amortize one sampling pass).

Reported blocking_pct divides the objective by the expected number of users
the rumor reaches (sum of per-start hit probabilities; estimated as
hit_count/X under sampling).  Reports are CSV (comment header, fixed column
order, 6-significant-digit floats, integer milliseconds) or JSON.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import resource
from dataclasses import dataclass, replace

import numpy as np

from .blocking import LogisticParams
from .graph import Graph, bfs_subgraph, load_edge_list, top_decile_nodes
from .sampling import SampleConfig, build_sample_store, hoeffding_sample_size
from .solvers import SolveReport, SolverLimits, run_solver

ALGORITHMS = ("topk", "greedy", "bab", "probab")
SWEEP_AXES = ("k", "rumor_size", "T", "X", "rho", "alpha", "beta")
_INT_AXES = {"k", "rumor_size", "T", "X"}

_CSV_COMMENTS = (
    "# experiment report",
    "# blocking_pct = objective / expected number of users influenced by the"
    " rumor set",
    "#   (denominator: sum over non-rumor starts of the walk's rumor-hit"
    " probability; hit_count/X under sampling)",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one `run` needs; defaults follow the benchmark protocol."""

    graph_path: str
    directed: bool = False
    algorithms: tuple[str, ...] = ("bab",)
    k: int = 150
    rumor_size: int = 150
    rumor_seed: int = 0
    T: int = 9
    alpha: float = 7.0
    beta: float = 3.0
    X: int = 1000
    rho: float = 0.1
    epsilon: float | None = None
    delta: float | None = None
    sweep_axis: str | None = None
    sweep_values: tuple[float, ...] | None = None
    certified_bounds: bool = False
    node_cap: int | None = None
    time_cap: float | None = None
    seed: int = 0
    threads: int = 1
    out_path: str | None = None
    out_format: str = "csv"

    def __post_init__(self):
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")
        if not self.algorithms:
            raise ValueError("no algorithm requested")
        if self.out_format not in ("csv", "json"):
            raise ValueError(f"unknown output format {self.out_format!r}")
        if (self.sweep_axis is None) != (self.sweep_values is None):
            raise ValueError("sweep axis and values must be given together")
        if self.sweep_axis is not None:
            if self.sweep_axis not in SWEEP_AXES:
                raise ValueError(f"unknown sweep axis {self.sweep_axis!r}")
            if not self.sweep_values:
                raise ValueError("empty sweep value list")
        if (self.epsilon is None) != (self.delta is None):
            raise ValueError("epsilon and delta must be given together")


@dataclass(frozen=True)
class ReportRow:
    """One (algorithm, sweep point, seed) outcome plus the config that ran it."""

    algorithm: str
    sweep_axis: str
    sweep_value: str
    fraction: float
    k: int
    rumor_size: int
    rumor_seed: int
    T: int
    alpha: float
    beta: float
    X: int
    rho: float
    seed: int
    chosen_size: int
    chosen_set: str
    objective: float
    blocking_pct: float
    wall_time_ms: int
    peak_mem_mb: float | None
    expansions: int
    bound_calls: int
    truncated: bool
    status: str


def generate_rumor_set(g: Graph, size: int, seed: int) -> frozenset[int]:
    """`size` nodes uniformly without replacement from the top degree decile."""
    decile = top_decile_nodes(g)
    if not 1 <= size <= len(decile):
        raise ValueError(
            f"rumor size {size} infeasible; top decile holds {len(decile)} nodes")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(decile))
    return frozenset(int(decile[i]) for i in order[:size])


def _apply_sweep(config: ExperimentConfig, axis: str, value: float
                 ) -> ExperimentConfig:
    cast = int(value) if axis in _INT_AXES else float(value)
    return replace(config, **{axis: cast})


def _peak_mem_mb() -> float:
    # ru_maxrss is in KiB on Linux; best-effort estimate only
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _sweep_points(config: ExperimentConfig):
    if config.sweep_axis is None:
        return [(None, None)]
    return [(config.sweep_axis, v) for v in config.sweep_values]


def _resolve_x(config: ExperimentConfig, n_candidates: int) -> int:
    if config.epsilon is not None:
        return hoeffding_sample_size(config.epsilon, config.delta, n_candidates)
    return config.X


def _make_row(cfg: ExperimentConfig, axis, value, fraction: float, algo: str,
              report: SolveReport | None, x_used: int, id_map, status: str
              ) -> ReportRow:
    if report is None:
        chosen: list[int] = []
        objective = blocking = 0.0
        wall_ms = expansions = bound_calls = 0
        truncated = False
    else:
        chosen = sorted(id_map[v] for v in report.chosen_set)
        objective = report.objective
        blocking = report.blocking_percentage
        wall_ms = int(round(report.wall_time * 1000))
        expansions = report.expansions
        bound_calls = report.bound_calls
        truncated = report.truncated
    return ReportRow(
        algorithm=algo,
        sweep_axis=axis or "",
        sweep_value="" if value is None else _format_cell(float(value)),
        fraction=fraction,
        k=cfg.k, rumor_size=cfg.rumor_size, rumor_seed=cfg.rumor_seed,
        T=cfg.T, alpha=cfg.alpha, beta=cfg.beta, X=x_used, rho=cfg.rho,
        seed=cfg.seed,
        chosen_size=len(chosen),
        chosen_set="|".join(str(v) for v in chosen),
        objective=objective,
        blocking_pct=blocking,
        wall_time_ms=wall_ms,
        peak_mem_mb=_peak_mem_mb(),
        expansions=expansions,
        bound_calls=bound_calls,
        truncated=truncated,
        status=status,
    )


def run_on_graph(g: Graph, config: ExperimentConfig, fraction: float = 1.0,
                 id_map=None) -> list[ReportRow]:
    """Run the configured sweep on an already-loaded graph; no file emission."""
    if id_map is None:
        id_map = g.original_ids
    rows: list[ReportRow] = []
    cached_key = None
    cached_store = None
    for axis, value in _sweep_points(config):
        cfg = config if axis is None else _apply_sweep(config, axis, value)
        rumor = generate_rumor_set(g, cfg.rumor_size, cfg.rumor_seed)
        x_used = _resolve_x(cfg, g.n - len(rumor))
        key = (rumor, cfg.T, x_used, cfg.seed)
        if key != cached_key:
            cached_store = build_sample_store(
                g, rumor, SampleConfig(T=cfg.T, X=x_used, seed=cfg.seed),
                threads=cfg.threads)
            cached_key = key
        params = LogisticParams(cfg.alpha, cfg.beta)
        limits = SolverLimits(node_expansion_cap=cfg.node_cap,
                              wall_time_cap=cfg.time_cap)
        for algo in cfg.algorithms:
            try:
                report = run_solver(algo, cached_store, params, cfg.k,
                                    rho=cfg.rho, limits=limits,
                                    certified=cfg.certified_bounds)
            except Exception as exc:
                rows.append(_make_row(cfg, axis, value, fraction, algo, None,
                                      x_used, id_map,
                                      f"error: {type(exc).__name__}: {exc}"))
                _emit_if_configured(rows, config)
                raise
            rows.append(_make_row(cfg, axis, value, fraction, algo, report,
                                  x_used, id_map, "ok"))
    return rows


def run_experiment(config: ExperimentConfig) -> list[ReportRow]:
    """Load the graph, run the sweep, and emit the report file if configured."""
    with open(config.graph_path) as fh:
        g = load_edge_list(fh, directed=config.directed)
    rows = run_on_graph(g, config)
    _emit_if_configured(rows, config)
    return rows


def run_scalability(config: ExperimentConfig, fractions) -> list[ReportRow]:
    """Re-run the experiment on nested BFS slices of the graph.

    The BFS seed is the highest-degree node (ties to smaller id); the rumor
    set is regenerated per slice with the same rumor seed.
    """
    fractions = [float(f) for f in fractions]
    if not fractions:
        raise ValueError("no fractions given")
    if any(not 0 < f <= 1 for f in fractions):
        raise ValueError("fractions must lie in (0, 1]")
    if sorted(fractions) != fractions:
        raise ValueError("fractions must be ascending")
    with open(config.graph_path) as fh:
        g = load_edge_list(fh, directed=config.directed)
    degrees = g.degrees()
    bfs_seed = min(range(g.n), key=lambda u: (-degrees[u], u))
    rows: list[ReportRow] = []
    for frac in fractions:
        sub, keep = bfs_subgraph(g, bfs_seed, frac)
        id_map = [g.original_ids[keep[v]] for v in range(sub.n)]
        rows.extend(run_on_graph(sub, config, fraction=frac, id_map=id_map))
    _emit_if_configured(rows, config)
    return rows


def _emit_if_configured(rows: list[ReportRow], config: ExperimentConfig) -> None:
    if config.out_path is None:
        return
    with open(config.out_path, "w") as fh:
        write_rows(rows, fh, config.out_format)


def write_rows(rows: list[ReportRow], sink, fmt: str = "csv") -> None:
    names = [f.name for f in dataclasses.fields(ReportRow)]
    if fmt == "csv":
        for line in _CSV_COMMENTS:
            sink.write(line + "\n")
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([_format_cell(getattr(row, name)) for name in names])
    elif fmt == "json":
        payload = [{name: getattr(row, name) for name in names} for row in rows]
        json.dump({"rows": payload}, sink, indent=1)
        sink.write("\n")
    else:
        raise ValueError(f"unknown output format {fmt!r}")


def _parse_cell(text: str, ftype: str):
    if ftype == "bool":
        return text == "true"
    if ftype == "float | None":
        return None if text == "" else float(text)
    if ftype == "int":
        return int(text)
    if ftype == "float":
        return float(text)
    return text


def read_rows(source) -> list[ReportRow]:
    """Parse a CSV report back into rows (comments skipped)."""
    specs = [(f.name, f.type) for f in dataclasses.fields(ReportRow)]
    lines = [ln for ln in source if not ln.startswith("#")]
    records = list(csv.reader(lines))
    if not records:
        return []
    if records[0] != [name for name, _ in specs]:
        raise ValueError("unexpected report header")
    rows = []
    for cells in records[1:]:
        if not cells:
            continue
        kwargs = {name: _parse_cell(cell, ftype)
                  for (name, ftype), cell in zip(specs, cells)}
        rows.append(ReportRow(**kwargs))
    return rows
