import json

import pytest

from xrcache import create_cli, main
from xrcache.repositories import AllocationRepository, PlanRepository

TABLE_CONFIG = """
[environment]
spatial_multiplexing_gain = 2
antenna_count = 2
room_width_m = 4.0
room_depth_m = 4.0
rate_samples = 50

[allocation]
user_count = 4
total_memory = 2.25
rates = [3000.0, 2000.0, 1000.0, 2000.0, 3000.0]

[delivery]
mode = "phantom"
user_states = [0, 1, 2, 3]

[beamforming]
method = "zero_forcing"
inner_tol = 1e-3
"""


@pytest.fixture
def table_config(tmp_path):
    path = tmp_path / "table.toml"
    path.write_text(TABLE_CONFIG, encoding="utf-8")
    return str(path)


def _run(tmp_path, config, *args):
    return main(["--output-dir", str(tmp_path / "out"), "--config", config, *args])


def test_no_arguments_prints_usage(capsys):
    assert main([]) == 2
    assert "Usage" in capsys.readouterr().out


def test_every_subcommand_is_registered():
    assert set(create_cli().commands) == {
        "rate-map", "allocate", "plan", "solve-beams", "experiment", "reproduce-examples",
    }


def test_unknown_option_is_a_usage_error(capsys):
    assert main(["allocate", "--frobnicate"]) == 2
    assert capsys.readouterr().err.startswith("error: usage:")


def test_allocate_writes_the_table_fractions(tmp_path, table_config):
    assert _run(tmp_path, table_config, "allocate") == 0
    allocation = AllocationRepository().load(str(tmp_path / "out" / "allocation.csv"))
    assert allocation.fractions.tolist() == pytest.approx([0.25, 0.5, 0.75, 0.5, 0.25], abs=1e-6)


def test_allocate_local_first(tmp_path, table_config):
    assert _run(tmp_path, table_config, "allocate", "--tradeoff", "local_first") == 0
    allocation = AllocationRepository().load(str(tmp_path / "out" / "allocation.csv"))
    assert allocation.fractions.tolist() == pytest.approx([0.25, 0.5, 0.75, 0.5, 0.25], abs=1e-6)


def test_plan_then_solve_beams_keeps_the_hash(tmp_path, table_config):
    assert _run(tmp_path, table_config, "plan") == 0
    plan_path = str(tmp_path / "out" / "plan.json")
    stored = PlanRepository().load(plan_path)
    assert stored.context["user_states"] == [0, 1, 2, 3]

    assert _run(tmp_path, table_config, "solve-beams", plan_path, "--trace") == 0
    with open(tmp_path / "out" / "beams.json", encoding="utf-8") as handle:
        beams = json.load(handle)
    assert beams["plan_hash"] == stored.plan_hash
    assert len(beams["solutions"]) == len(stored.plan)
    assert (tmp_path / "out" / "beams_trace.csv").exists()


def test_rate_map_command(tmp_path, table_config):
    assert _run(tmp_path, table_config, "rate-map", "--samples", "20") == 0
    lines = (tmp_path / "out" / "rate_map.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# xrcache")
    assert len(lines) == 2 + 16


def test_bad_config_exits_with_config_error(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("allocation:\n  user_count: 0\n", encoding="utf-8")
    assert _run(tmp_path, str(path), "allocate") == 2
    assert capsys.readouterr().err.startswith("error: config:")


def test_tampered_plan_exits_with_runtime_error(tmp_path, table_config, capsys):
    assert _run(tmp_path, table_config, "plan") == 0
    plan_path = tmp_path / "out" / "plan.json"
    document = json.loads(plan_path.read_text(encoding="utf-8"))
    document["plan_hash"] = "0" * 64
    plan_path.write_text(json.dumps(document), encoding="utf-8")
    assert _run(tmp_path, table_config, "solve-beams", str(plan_path)) == 3
    assert capsys.readouterr().err.startswith("error: plan:")


def test_reproduce_examples_passes(capsys):
    assert main(["reproduce-examples"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_experiment_writes_all_reports(tmp_path, table_config):
    config = tmp_path / "small.yaml"
    config.write_text(
        "environment:\n  room_width_m: 4.0\n  room_depth_m: 4.0\n  antenna_count: 2\n  rate_samples: 50\n"
        "allocation:\n  user_count: 3\n"
        "beamforming:\n  method: zero_forcing\n  inner_tol: 0.001\n"
        "experiment:\n  drops: 2\n  schemes: [proposed_local_first, ms_uniform]\n",
        encoding="utf-8",
    )
    assert main(["--output-dir", str(tmp_path / "out"), "--config", str(config), "--threads", "2",
                 "experiment"]) == 0
    for name in ("drops.csv", "aggregate.csv", "cdf.csv"):
        assert (tmp_path / "out" / name).exists()
    aggregate = (tmp_path / "out" / "aggregate.csv").read_text(encoding="utf-8").splitlines()
    assert aggregate[1] == "parameter,value,scheme,drops,mean_T_T,p95_T_T,iqr_T_T,censored"
    assert len(aggregate) == 2 + 2


def test_experiment_rejects_unknown_schemes(tmp_path, table_config, capsys):
    assert _run(tmp_path, table_config, "experiment", "--schemes", "bogus") == 2
