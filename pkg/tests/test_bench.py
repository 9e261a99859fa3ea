import io
import json

import pytest

from rcic.bench import (
    ExperimentConfig,
    ReportRow,
    generate_rumor_set,
    read_rows,
    run_experiment,
    run_on_graph,
    run_scalability,
    write_rows,
)
from rcic.blocking import LogisticParams
from rcic.graph import dump_edge_list, top_decile_nodes
from rcic.sampling import SampleConfig, build_sample_store, hoeffding_sample_size
from rcic.solvers import run_solver
from rcic.synth import barabasi_albert_graph


def small_graph():
    return barabasi_albert_graph(60, 2, seed=3)


def base_config(**overrides):
    kwargs = dict(graph_path="unused", algorithms=("topk", "greedy"), k=3,
                  rumor_size=4, rumor_seed=1, T=3, alpha=3.0, beta=1.0, X=50,
                  seed=0)
    kwargs.update(overrides)
    return ExperimentConfig(**kwargs)


def test_generate_rumor_set_is_deterministic_and_nested():
    g = barabasi_albert_graph(100, 3, seed=2)
    decile = set(top_decile_nodes(g))
    r5 = generate_rumor_set(g, 5, seed=9)
    assert r5 == generate_rumor_set(g, 5, seed=9)
    assert r5 <= decile
    assert len(r5) == 5
    # growing the size with the same seed only adds nodes
    assert r5 <= generate_rumor_set(g, 8, seed=9)
    assert r5 != generate_rumor_set(g, 5, seed=10)


def test_generate_rumor_set_size_limits():
    g = barabasi_albert_graph(100, 3, seed=2)
    with pytest.raises(ValueError):
        generate_rumor_set(g, 0, seed=0)
    with pytest.raises(ValueError):
        generate_rumor_set(g, 11, seed=0)  # decile holds 10 nodes


def test_config_validation():
    with pytest.raises(ValueError):
        base_config(algorithms=("topk", "magic"))
    with pytest.raises(ValueError):
        base_config(algorithms=())
    with pytest.raises(ValueError):
        base_config(out_format="xml")
    with pytest.raises(ValueError):
        base_config(sweep_axis="T")
    with pytest.raises(ValueError):
        base_config(sweep_values=(1.0,))
    with pytest.raises(ValueError):
        base_config(sweep_axis="gamma", sweep_values=(1.0,))
    with pytest.raises(ValueError):
        base_config(sweep_axis="T", sweep_values=())
    with pytest.raises(ValueError):
        base_config(epsilon=0.1)


def test_run_on_graph_basic_rows():
    g = small_graph()
    rows = run_on_graph(g, base_config())
    assert [r.algorithm for r in rows] == ["topk", "greedy"]
    for row in rows:
        assert row.status == "ok"
        assert row.chosen_size == 3
        chosen = [int(v) for v in row.chosen_set.split("|")]
        assert chosen == sorted(chosen)
        assert all(0 <= v < g.n for v in chosen)
        assert row.objective > 0.0
        assert 0.0 <= row.blocking_pct < 1.0
        assert row.X == 50
        assert row.sweep_axis == "" and row.sweep_value == ""
        assert row.fraction == 1.0


def test_run_on_graph_rows_match_direct_solving():
    g = small_graph()
    config = base_config()
    rows = run_on_graph(g, config)
    rumor = generate_rumor_set(g, config.rumor_size, config.rumor_seed)
    store = build_sample_store(g, rumor,
                               SampleConfig(T=config.T, X=config.X,
                                            seed=config.seed))
    params = LogisticParams(config.alpha, config.beta)
    for row in rows:
        report = run_solver(row.algorithm, store, params, config.k)
        assert row.objective == report.objective
        assert row.chosen_set == "|".join(
            str(v) for v in sorted(report.chosen_set))


def test_run_on_graph_sweep_reuses_consistent_stores():
    g = small_graph()
    rows = run_on_graph(g, base_config(algorithms=("greedy",),
                                       sweep_axis="alpha",
                                       sweep_values=(3.0, 7.0)))
    assert [r.sweep_value for r in rows] == ["3", "7"]
    # same store both points: only the logistic changed
    rumor = generate_rumor_set(g, 4, 1)
    store = build_sample_store(g, rumor, SampleConfig(T=3, X=50, seed=0))
    for row, alpha in zip(rows, (3.0, 7.0)):
        report = run_solver("greedy", store, LogisticParams(alpha, 1.0), 3)
        assert row.objective == report.objective


def test_run_on_graph_integer_sweep_axis():
    g = small_graph()
    rows = run_on_graph(g, base_config(algorithms=("topk",), sweep_axis="T",
                                       sweep_values=(2.0, 4.0)))
    assert [r.T for r in rows] == [2, 4]
    assert [r.sweep_value for r in rows] == ["2", "4"]


def test_run_on_graph_resolves_hoeffding_samples():
    g = small_graph()
    rows = run_on_graph(g, base_config(algorithms=("topk",), epsilon=0.2,
                                       delta=0.1))
    expected = hoeffding_sample_size(0.2, 0.1, g.n - 4)
    assert rows[0].X == expected


def test_run_on_graph_emits_error_marker(tmp_path):
    g = small_graph()
    out = tmp_path / "report.csv"
    # k exceeds the candidate pool: the solver raises, the row records it
    config = base_config(algorithms=("greedy",), k=57, out_path=str(out))
    with pytest.raises(ValueError):
        run_on_graph(g, config)
    rows = read_rows(out.open())
    assert len(rows) == 1
    assert rows[0].status.startswith("error: ValueError")
    assert rows[0].chosen_set == ""


def test_csv_round_trip(tmp_path):
    g = small_graph()
    rows = run_on_graph(g, base_config())
    buf = io.StringIO()
    write_rows(rows, buf, "csv")
    text = buf.getvalue()
    assert text.startswith("# experiment report")
    parsed = read_rows(io.StringIO(text))
    assert len(parsed) == len(rows)
    for orig, back in zip(rows, parsed):
        assert back.algorithm == orig.algorithm
        assert back.chosen_set == orig.chosen_set
        assert back.objective == pytest.approx(orig.objective, rel=1e-5)
        assert back.wall_time_ms == orig.wall_time_ms
        assert back.truncated == orig.truncated


def test_csv_quotes_awkward_status_text():
    row = ReportRow(algorithm="bab", sweep_axis="", sweep_value="",
                    fraction=1.0, k=2, rumor_size=2, rumor_seed=0, T=3,
                    alpha=3.0, beta=1.0, X=10, rho=0.1, seed=0, chosen_size=0,
                    chosen_set="", objective=0.0, blocking_pct=0.0,
                    wall_time_ms=0, peak_mem_mb=None, expansions=0,
                    bound_calls=0, truncated=False,
                    status='error: ValueError: bad, "quoted" value')
    buf = io.StringIO()
    write_rows([row], buf, "csv")
    parsed = read_rows(io.StringIO(buf.getvalue()))
    assert parsed[0].status == row.status
    assert parsed[0].peak_mem_mb is None


def test_json_output():
    g = small_graph()
    rows = run_on_graph(g, base_config())
    buf = io.StringIO()
    write_rows(rows, buf, "json")
    payload = json.loads(buf.getvalue())
    assert len(payload["rows"]) == len(rows)
    assert payload["rows"][0]["algorithm"] == "topk"
    assert payload["rows"][0]["objective"] == rows[0].objective


def test_read_rows_rejects_foreign_header():
    with pytest.raises(ValueError):
        read_rows(io.StringIO("a,b,c\n1,2,3\n"))
    assert read_rows(io.StringIO("")) == []


def test_run_experiment_writes_report(tmp_path):
    g = small_graph()
    graph_path = tmp_path / "graph.txt"
    with graph_path.open("w") as fh:
        dump_edge_list(g, fh)
    out = tmp_path / "report.csv"
    config = base_config(graph_path=str(graph_path), out_path=str(out))
    rows = run_experiment(config)
    parsed = read_rows(out.open())
    assert [r.chosen_set for r in parsed] == [r.chosen_set for r in rows]
    assert len(rows) == 2


def test_run_scalability_slices(tmp_path):
    g = barabasi_albert_graph(80, 2, seed=5)
    graph_path = tmp_path / "graph.txt"
    with graph_path.open("w") as fh:
        dump_edge_list(g, fh)
    config = base_config(graph_path=str(graph_path), algorithms=("topk",),
                         rumor_size=2, k=2)
    rows = run_scalability(config, [0.5, 1.0])
    assert [r.fraction for r in rows] == [0.5, 1.0]
    for row in rows:
        chosen = [int(v) for v in row.chosen_set.split("|")]
        # reported ids live in the full graph's id space
        assert all(0 <= v < g.n for v in chosen)


def test_run_scalability_fraction_validation(tmp_path):
    config = base_config()
    with pytest.raises(ValueError):
        run_scalability(config, [])
    with pytest.raises(ValueError):
        run_scalability(config, [1.0, 0.5])
    with pytest.raises(ValueError):
        run_scalability(config, [0.0, 1.0])
    with pytest.raises(ValueError):
        run_scalability(config, [0.5, 1.5])
