from fractions import Fraction

import pandas as pd
import pytest

from config import SweepPresets
from engine.exceptions import ConfigError, SweepSpecError
from models import CSV_COLUMNS, SweepSpec, SweepVariable
from sweep import SweepRunner, exp_cache_profile


@pytest.fixture
def runner():
    return SweepRunner(verbose=False)


def gaps(result):
    return [row.report.r_baseline - row.report.r_gbd for row in result.valid_rows]


def test_exp_cache_profile():
    assert exp_cache_profile("1/2", 1, 4) == [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), 1]
    assert exp_cache_profile(1, 2, 3) == [2, 2, 2]
    with pytest.raises(ConfigError):
        exp_cache_profile("1.1", 1, 3)
    with pytest.raises(ConfigError):
        exp_cache_profile("0.5", -1, 3)


def test_small_mmax_matches_baseline(runner):
    result = runner.run(SweepPresets.get("small_mmax"))
    assert len(result.rows) == 7
    # M_max = N 인 마지막 지점은 설정 오류로 플래그된다
    assert [row.x for row in result.flagged_rows] == [3]
    for row in result.valid_rows:
        assert row.report.r_gbd == row.report.r_baseline
        assert max(row.report.lower_bound_new, row.report.lower_bound_cut_set) <= row.report.r_gbd
    first = result.rows[0].report
    assert first.r_gbd == first.r_uncoded == first.lower_bound_new == first.lower_bound_cut_set == 3


def test_large_mmax_orderings(runner):
    result = runner.run(SweepPresets.get("large_mmax"))
    assert not result.flagged_rows
    for row in result.rows:
        report = row.report
        assert report.r_baseline > report.r_gbd
        assert report.r_uncoded >= report.r_gbd
        assert max(report.lower_bound_new, report.lower_bound_cut_set) <= report.r_gbd
    zero = result.rows[0].report
    assert zero.r_gbd == zero.r_uncoded == zero.lower_bound_cut_set == zero.lower_bound_new == 50


def test_alpha_gain_shrinks(runner):
    spec = SweepSpec(
        name="alpha_coarse",
        variable=SweepVariable.ALPHA,
        values=["0.9", "0.925", "0.95", "0.975", "1"],
        fixed={"N": 30, "K": 45, "Mmax": 2},
        curves=["rGBD", "rBaseline"],
    )
    values = gaps(runner.run(spec))
    assert all(a >= b for a, b in zip(values, values[1:]))


def test_users_gain_grows(runner):
    values = gaps(runner.run(SweepPresets.get("users")))
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_files_switch_between_procedures(runner):
    result = runner.run(SweepPresets.get("files"))
    rows = {row.x: row.report for row in result.rows}
    assert rows[10].r_rd < rows[10].r_cd
    assert rows[39].r_cd < rows[39].r_rd


def test_csv_output(runner, tmp_path):
    result = runner.run(SweepPresets.get("small_mmax"))
    df = runner.to_dataframe(result)
    assert list(df.columns) == CSV_COLUMNS
    path = runner.write_csv(result, str(tmp_path / "out" / "small.csv"))
    loaded = pd.read_csv(path, dtype=str, keep_default_na=False)
    assert list(loaded.columns) == CSV_COLUMNS
    assert loaded["x"].tolist()[:2] == ["0", "0.5"]
    assert loaded["rGBD"].iloc[0] == "3"
    assert loaded["rGBD"].iloc[-1] == ""


def test_sweep_is_deterministic(runner):
    spec = SweepPresets.get("small_mmax")
    a = runner.to_dataframe(runner.run(spec))
    b = runner.to_dataframe(runner.run(spec))
    assert a.equals(b)


def test_simulated_rows(tmp_path):
    spec = SweepSpec.from_dict({
        "variable": "Mmax",
        "range": ["1/2", "1"],
        "fixed": {"N": 2, "K": 4, "alpha": "1/2"},
        "simulate": True,
        "trials": 2,
        "F": 1024,
    })
    result = SweepRunner(verbose=False).run(spec)
    for row in result.rows:
        assert row.validation["decodes_ok"] == 8


@pytest.mark.parametrize(
    "data",
    [
        {"variable": "Mmax", "range": [1], "fixed": {"N": 2, "K": 4}},
        {"variable": "Mmax", "range": [1], "fixed": {"N": 2, "K": 4, "alpha": 1, "Mmax": 1}},
        {"variable": "Mmax", "range": [1], "fixed": {"N": 2, "K": 4, "alpha": 1}, "curves": ["rX"]},
        {"variable": "Mmax", "range": [], "fixed": {"N": 2, "K": 4, "alpha": 1}},
        {"variable": "alpha", "range": ["1.5"], "fixed": {"N": 2, "K": 4, "Mmax": 1}},
        {"variable": "K", "range": ["2.5"], "fixed": {"N": 2, "Mmax": 1, "alpha": 1}},
        {"variable": "speed", "range": [1], "fixed": {}},
        {"range": [1], "fixed": {}},
    ],
)
def test_spec_errors(data):
    with pytest.raises(SweepSpecError):
        SweepSpec.from_dict(data)


def test_spec_round_trip():
    spec = SweepPresets.get("alpha")
    again = SweepSpec.from_dict(spec.to_dict())
    assert again.to_dict() == spec.to_dict()
    assert again.values[0] == Fraction(9, 10)


def test_unknown_preset():
    with pytest.raises(SweepSpecError):
        SweepPresets.get("nine_users")
