import json

import numpy as np
import pytest

from linflow import ConfigError, NonFiniteStateError, parse_config
from linflow.cli import entry
from linflow.config import parse_graph_only

TRIANGLE = [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
SQUARE = [
    [0.0, 1.0, 0.0, 1.0],
    [1.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 1.0],
    [1.0, 0.0, 1.0, 0.0],
]


def base_config(**over):
    cfg = {
        "system": {
            "H": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            "z": [0.0, 1.0, 1.0],
        },
        "graph": {"segments": [{"duration": 1.0, "weights": TRIANGLE}]},
        "flow": {"kind": "consensus_projection"},
        "integrator": {"t_end": 40.0, "step": 0.01, "sample_stride": 50},
        "x0": [[1.0, 0.0], [2.0, 3.0], [-1.0, 0.5]],
    }
    cfg.update(over)
    return cfg


def inconsistent_config(**over):
    cfg = base_config(
        system={
            "H": [[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
            "z": [1.0, 1.0, -1.0, -1.0],
        },
        graph={"segments": [{"duration": 1.0, "weights": SQUARE}]},
        x0=[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
    )
    cfg.update(over)
    return cfg


def write_config(tmp_path, cfg, name="config.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def test_roundtrip_through_dict():
    cfg = parse_config(base_config())
    d = cfg.to_dict()
    again = parse_config(json.loads(json.dumps(d)))
    assert again.to_dict() == d


def test_parse_defaults():
    cfg = parse_config(base_config())
    assert cfg.n_nodes == 3
    assert cfg.sys.normalized
    assert cfg.spec.K == 1.0
    assert cfg.spec.gamma == 1.0
    assert not cfg.project_initial
    assert cfg.monitors == ("disagreement", "average", "own_set_distance")
    assert cfg.integrator.sample_stride == 50
    assert cfg.output_dir is None


def test_parse_grouping():
    cfg_d = base_config(grouping=[[0, 1], [2]], x0=[[1.0, 0.0], [2.0, 3.0]])
    cfg_d["graph"] = {"segments": [{"duration": 1.0, "weights": [[0.0, 1.0], [1.0, 0.0]]}]}
    cfg = parse_config(cfg_d)
    assert cfg.n_nodes == 2
    assert cfg.patches[0].nrows == 2
    assert cfg.patches[1].nrows == 1


@pytest.mark.parametrize(
    "mutate,match",
    [
        (lambda c: c.pop("system"), "system: missing"),
        (lambda c: c.update(extra=1), "extra: unknown key"),
        (lambda c: c["system"].update(junk=1), "system.junk: unknown key"),
        (lambda c: c["system"].update(H=[[1.0], [1.0, 2.0]]), "system.H"),
        (lambda c: c["system"].update(z=[1.0]), "system.z"),
        (lambda c: c["system"].update(H=[[1.0, 0.0], [0.0, 0.0], [1.0, 1.0]]), "system: row 1"),
        (lambda c: c.update(monitors=["nope"]), "unknown monitor"),
        (lambda c: c["integrator"].update(t0=40.0), "integrator.t0"),
        (lambda c: c["integrator"].update(step=-1.0), "integrator.step"),
        (lambda c: c["integrator"].update(junk=1), "integrator.junk"),
        (lambda c: c["flow"].update(kind="warp"), "flow.kind"),
        (lambda c: c["flow"].update(K=0.0), "flow.K"),
        (lambda c: c["flow"].update(junk=1), "flow.junk"),
        (lambda c: c["graph"].update(mode="sometimes"), "graph.mode"),
        (lambda c: c["graph"].update(segments=[]), "graph.segments"),
        (lambda c: c["graph"]["segments"][0].update(duration=0.0), "duration"),
        (lambda c: c["graph"]["segments"][0].update(junk=1), "junk"),
        (lambda c: c["graph"].update(a_star=0.5), "declared bound"),
        (lambda c: c.update(x0=[[1.0, 0.0]]), "x0"),
        (lambda c: c.update(grouping=[[0, 7]]), "grouping"),
        (lambda c: c.update(output_dir=7), "output_dir"),
    ],
)
def test_parse_rejections(mutate, match):
    cfg = base_config()
    mutate(cfg)
    with pytest.raises(ConfigError, match=match):
        parse_config(cfg)


def test_parse_bad_arc_triples():
    cfg = base_config()
    cfg["graph"] = {"segments": [{"duration": 1.0, "n": 3, "arcs": [[0, 1]]}]}
    with pytest.raises(ConfigError, match="bad triple"):
        parse_config(cfg)
    cfg["graph"] = {"segments": [{"duration": 1.0, "n": 3, "arcs": [[0, 5, 1.0]]}]}
    with pytest.raises(ConfigError, match="outside"):
        parse_config(cfg)


def test_parse_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(str(tmp_path / "missing.json"))
    p = tmp_path / "broken.json"
    p.write_text("{")
    with pytest.raises(ConfigError, match="not valid JSON"):
        parse_config(str(p))
    with pytest.raises(ConfigError, match="path or a dict"):
        parse_config(42)


def test_parse_graph_only_requires_n(tmp_path):
    doc = {"graph": {"segments": [{"duration": 1.0, "n": 3, "arcs": [[0, 1, 1.0], [1, 2, 1.0]]}]}}
    sig = parse_graph_only(write_config(tmp_path, doc))
    assert sig.n == 3


def test_cli_simulate_writes_outputs(tmp_path, capsys):
    cfg = base_config(monitors=["disagreement", "average", "limit_gap"])
    path = write_config(tmp_path, cfg)
    out = tmp_path / "out"
    assert entry(["simulate", path, "--output", str(out)]) == 0
    for name in (
        "trajectory.csv",
        "states.png",
        "summary.json",
        "monitor_disagreement.csv",
        "monitor_disagreement.png",
        "monitor_average.csv",
        "monitor_limit_gap.csv",
    ):
        assert (out / name).exists(), name
    summary = json.loads((out / "summary.json").read_text())
    assert summary["case"] == "unique"
    assert summary["samples"] > 10
    conv = summary["convergence"]
    assert conv["converged"] is True
    assert conv["max_final_deviation"] <= 1e-4
    assert np.allclose(conv["predicted_limit"]["limit"], [0.0, 1.0], atol=1e-12)
    assert "wrote" in capsys.readouterr().out


def test_cli_outputs_are_deterministic(tmp_path):
    cfg = base_config(monitors=["disagreement"])
    cfg["integrator"]["t_end"] = 2.0
    path = write_config(tmp_path, cfg)
    a, b = tmp_path / "a", tmp_path / "b"
    assert entry(["simulate", path, "--output", str(a)]) == 0
    assert entry(["simulate", path, "--output", str(b)]) == 0
    for name in ("trajectory.csv", "monitor_disagreement.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cli_output_precedence(tmp_path, monkeypatch):
    cfg = base_config(output_dir=str(tmp_path / "from_config"))
    cfg["integrator"].update(t_end=1.0, step=0.05)
    path = write_config(tmp_path, cfg)

    monkeypatch.setenv("LINFLOW_OUTPUT_DIR", str(tmp_path / "from_env"))
    assert entry(["simulate", path, "--output", str(tmp_path / "from_flag")]) == 0
    assert (tmp_path / "from_flag" / "summary.json").exists()
    assert not (tmp_path / "from_env").exists()

    assert entry(["simulate", path]) == 0
    assert (tmp_path / "from_env" / "summary.json").exists()
    assert not (tmp_path / "from_config").exists()

    monkeypatch.delenv("LINFLOW_OUTPUT_DIR")
    assert entry(["simulate", path]) == 0
    assert (tmp_path / "from_config" / "summary.json").exists()

    cfg.pop("output_dir")
    path2 = write_config(tmp_path, cfg, "noout.json")
    monkeypatch.chdir(tmp_path)
    assert entry(["simulate", path2]) == 0
    assert (tmp_path / "linflow-out" / "summary.json").exists()


def test_cli_reproduce_first_demo(tmp_path, capsys):
    out = tmp_path / "rep1"
    assert entry(["reproduce", "1", "--output", str(out)]) == 0
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["pass"] is True
    assert verdict["demo"] == 1
    for run in verdict["flows"].values():
        assert run["pass"] is True
        assert run["max_final_deviation"] <= 1e-4
    assert (out / "consensus_projection_states.png").exists()
    assert (out / "projection_consensus_trajectory.csv").exists()
    assert "PASS demo 1 overall" in capsys.readouterr().out


def test_cli_reproduce_sweep_demo(tmp_path, capsys):
    out = tmp_path / "rep3"
    assert entry(["reproduce", "3", "--output", str(out)]) == 0
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["pass"] is True
    assert verdict["energy_decreasing"] is True
    assert verdict["gap_attained"] is True
    assert verdict["equilibrium_match"] is True
    assert np.allclose(verdict["least_squares"], [0.0, 0.0], atol=1e-12)
    assert set(verdict["sweep"]) == {"1", "5", "100"}
    assert (out / "energy.png").exists()
    assert (out / "K100_trajectory.csv").exists()
    assert "PASS demo 3 overall" in capsys.readouterr().out


def test_cli_check_graph(tmp_path, capsys):
    doc = {
        "graph": {
            "mode": "periodic",
            "segments": [
                {"duration": 1.0, "n": 3, "arcs": [[0, 1, 1.0], [1, 2, 1.0]]},
                {"duration": 1.0, "n": 3, "arcs": [[2, 0, 1.0]]},
            ],
        }
    }
    path = write_config(tmp_path, doc)
    assert entry(["check-graph", path, "--T", "2.0", "--delta", "0.5", "--horizon", "6.0"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["jointly_connected"] is True
    assert rep["tail_connected"] is True
    assert rep["bidirectional"] is False
    assert rep["windows"][0]["connected"] is True


def test_cli_analyze_consistent(tmp_path, capsys):
    path = write_config(tmp_path, base_config())
    assert entry(["analyze", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["case"] == "unique"
    assert np.allclose(out["prediction"]["limit"], [0.0, 1.0], atol=1e-12)


def test_cli_analyze_sweep(tmp_path, capsys):
    path = write_config(tmp_path, inconsistent_config())
    assert entry(["analyze", path, "--k-sweep", "1", "5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["case"] == "inconsistent"
    assert out["origin_symmetry"]["holds"] is True
    assert len(out["k_sweep"]) == 2
    assert out["k_sweep"][0]["K"] == 1.0
    assert out["k_sweep"][1]["lambda_min"] > out["k_sweep"][0]["lambda_min"]


def test_cli_analyze_needs_symmetric_graph(tmp_path, capsys):
    cfg = inconsistent_config()
    cfg["graph"] = {
        "segments": [
            {
                "duration": 1.0,
                "n": 4,
                "arcs": [[0, 1, 1.0], [1, 2, 1.0], [2, 3, 1.0], [3, 0, 1.0]],
            }
        ]
    }
    path = write_config(tmp_path, cfg)
    assert entry(["analyze", path]) == 1
    assert "bidirectional" in capsys.readouterr().err


def test_cli_exit_one_on_bad_input(tmp_path, capsys):
    assert entry(["simulate", str(tmp_path / "gone.json")]) == 1
    assert "not found" in capsys.readouterr().err

    broken = tmp_path / "broken.json"
    broken.write_text("{oops")
    assert entry(["simulate", str(broken)]) == 1
    assert "not valid JSON" in capsys.readouterr().err

    cfg = base_config()
    cfg["system"]["H"][1] = [0.0, 0.0]
    assert entry(["simulate", write_config(tmp_path, cfg, "zero.json")]) == 1
    assert "system: row 1" in capsys.readouterr().err

    assert entry([]) == 1
    assert entry(["simulate"]) == 1


def test_cli_exit_two_on_divergence(tmp_path, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise NonFiniteStateError("state diverged at t = 0.25")

    monkeypatch.setattr("linflow.cli.sim.simulate", boom)
    path = write_config(tmp_path, base_config())
    assert entry(["simulate", path]) == 2
    assert "diverged" in capsys.readouterr().err


def test_cli_monitor_preconditions(tmp_path, capsys):
    cfg = inconsistent_config(monitors=["limit_gap"])
    assert entry(["simulate", write_config(tmp_path, cfg), "--output", str(tmp_path / "x")]) == 1
    assert "exact solution" in capsys.readouterr().err
