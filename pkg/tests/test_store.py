import pytest

from engine.analytics import rate_report
from engine.config import GammaConvention
from engine.exceptions import StoreCorruptedError
from engine.models import RateReport
from engine.store import DiffStatus, RunRecord, RunStore, canonical_json, config_hash


@pytest.fixture
def store(tmp_path):
    return RunStore(str(tmp_path / "runs" / "store.jsonl"))


def test_config_hash_ignores_demands(four_users):
    assert config_hash(four_users) == config_hash(four_users.with_demands([1, 1, 2, 2]))
    assert config_hash(four_users) != config_hash(four_users.with_seed(8))
    assert len(config_hash(four_users)) == 64


def test_record_ids_are_line_numbers(store, four_users, bound3):
    assert store.record_run(RunRecord.create(four_users, rate_report(four_users))) == 0
    assert store.record_run(RunRecord.create(bound3, rate_report(bound3))) == 1
    assert len(store.load()) == 2
    assert len(store.records_for(config_hash(bound3))) == 1


def test_record_round_trip_is_byte_identical(four_users):
    record = RunRecord.create(four_users, rate_report(four_users), validation={"trials": 3})
    line = record.to_json()
    assert RunRecord.from_json(line).to_json() == line
    assert canonical_json({"b": 1, "a": 2}) == '{"a":2,"b":1}'


def test_report_round_trip_is_exact(bound3):
    report = rate_report(bound3, GammaConvention.CEILING)
    assert RateReport.from_dict(report.to_dict()) == report


def test_rerun_has_empty_diff(store, four_users):
    for _ in range(2):
        store.record_run(RunRecord.create(four_users, rate_report(four_users)))
    diff = store.diff_against_baseline(config_hash(four_users))
    assert diff.status is DiffStatus.MATCH
    assert diff.changed_fields == []


def test_gamma_flip_only_changes_new_bound(store, bound3):
    store.record_run(RunRecord.create(bound3, rate_report(bound3, GammaConvention.FLOOR)))
    store.record_run(RunRecord.create(bound3, rate_report(bound3, GammaConvention.CEILING)))
    diff = store.diff_against_baseline(config_hash(bound3))
    assert diff.status is DiffStatus.CHANGED
    assert set(diff.changed_fields) == {"lower_bound_new", "argmax_witness", "gamma_convention"}
    change = next(c for c in diff.changes if c.field == "lower_bound_new")
    assert (change.baseline, change.current) == ("59/50", "26/25")


def test_diff_against_explicit_record(store, bound3):
    store.record_run(RunRecord.create(bound3, rate_report(bound3)))
    current = RunRecord.create(bound3, rate_report(bound3, "ceil"))
    assert store.diff_against_baseline(config_hash(bound3), current).status is DiffStatus.CHANGED


def test_missing_baseline(store):
    diff = store.diff_against_baseline("0" * 64)
    assert diff.status is DiffStatus.NO_BASELINE
    assert diff.to_dict()["status"] == "no_baseline"


def test_corrupted_line_is_named(store, four_users):
    store.record_run(RunRecord.create(four_users, rate_report(four_users)))
    with open(store.path, "a", encoding="utf-8") as f:
        f.write("{not json\n")
    with pytest.raises(StoreCorruptedError) as info:
        store.load()
    assert info.value.line_number == 2
    assert "line 2" in str(info.value)


def test_status(store, four_users):
    assert store.status()["exists"] is False
    store.record_run(RunRecord.create(four_users, rate_report(four_users)))
    status = store.status()
    assert status["records"] == 1 and status["configs"] == 1
