import json
import os

import pandas as pd
import pytest

from engine.store import RunStore
from run import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main


def test_rates(config_json, four_users_record, capsys):
    assert main(["-q", "rates", "--config", config_json(four_users_record)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "1.7578125" in out
    assert "225/128" in out


def test_rates_json(config_json, four_users_record, capsys):
    assert main(["-q", "rates", "--config", config_json(four_users_record), "--json"]) == EXIT_OK
    assert '"exact": "225/128"' in capsys.readouterr().out


def test_bounds_ceiling(config_json, bound3_record, capsys):
    assert main(["-q", "bounds", "--config", config_json(bound3_record), "--gamma", "ceil"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "26/25" in out
    assert "s=2, l=1" in out


def test_config_errors_exit_2(config_json, tmp_path):
    bad = config_json({"N": 2, "K": 2, "M": [1, 2]})
    assert main(["-q", "rates", "--config", bad]) == EXIT_USAGE
    assert main(["-q", "rates", "--config", bad, "--drop-full-cache"]) == EXIT_OK
    assert main(["-q", "rates", "--config", str(tmp_path / "missing.json")]) == EXIT_USAGE
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert main(["-q", "rates", "--config", str(broken)]) == EXIT_USAGE


def test_missing_subcommand():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_simulate_with_dump(config_json, four_users_record, tmp_path):
    dump = tmp_path / "dump"
    code = main([
        "-q", "simulate", "--config", config_json(four_users_record),
        "--trials", "2", "--file-size", "512", "--dump", str(dump),
    ])
    assert code == EXIT_OK
    assert (dump / "transcript.bin").exists()
    assert (dump / "transcript.json").exists()


def test_simulate_random(config_json, four_users_record):
    code = main([
        "-q", "simulate", "--config", config_json(four_users_record),
        "--trials", "1", "--file-size", "256", "--delivery", "random",
    ])
    assert code == EXIT_OK


def test_simulate_explicit_demands(config_json, four_users_record):
    path = config_json(four_users_record)
    assert main(["-q", "simulate", "--config", path, "--demands", "explicit"]) == EXIT_USAGE
    with_demands = config_json({**four_users_record, "demands": [2, 2, 1, 1]}, name="demands.json")
    args = ["-q", "simulate", "--config", with_demands, "--demands", "explicit", "--trials", "1", "--file-size", "512"]
    assert main(args) == EXIT_OK


def test_simulate_random_needs_small_file(config_json, four_users_record):
    args = ["-q", "simulate", "--config", config_json(four_users_record), "--trials", "1", "--file-size", "20000", "--delivery", "random"]
    assert main(args) == EXIT_USAGE


def test_sweep_preset(tmp_path):
    out = tmp_path / "small.csv"
    assert main(["-q", "sweep", "--preset", "small_mmax", "--out", str(out)]) == EXIT_OK
    df = pd.read_csv(out, dtype=str, keep_default_na=False)
    assert len(df) == 7


def test_sweep_spec_file(config_json, tmp_path):
    spec = config_json(
        {"variable": "alpha", "range": ["0.5", "1"], "fixed": {"N": 2, "K": 4, "Mmax": 1}},
        name="spec.json",
    )
    assert main(["-q", "sweep", "--spec", spec, "--out", str(tmp_path / "a.csv")]) == EXIT_OK
    assert main(["-q", "sweep"]) == EXIT_USAGE


def test_sweep_default_output_dir(tmp_path):
    assert main(["-q", "sweep", "--preset", "small_mmax"]) == EXIT_OK
    assert os.path.exists(tmp_path / "data" / "small_mmax.csv")


def test_verify(config_json, four_users_record, tmp_path):
    out = tmp_path / "gate.json"
    path = config_json(four_users_record)
    assert main(["-q", "verify", "--config", path, "--no-simulation", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text(encoding="utf-8"))["gate"] == "PASS"


def test_store_and_seed_override(config_json, four_users_record, tmp_path, monkeypatch):
    store_path = str(tmp_path / "runs.jsonl")
    monkeypatch.setenv("CACHELAB_SEED", "42")
    assert main(["-q", "rates", "--config", config_json(four_users_record), "--store", store_path]) == EXIT_OK
    records = RunStore(store_path).load()
    assert len(records) == 1
    assert records[0].config["seed"] == 42


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_FAILED, EXIT_USAGE}) == 3
