import pytest

from app import create_app
from engine.analytics import rate_report
from engine.store import RunRecord, RunStore, config_hash


@pytest.fixture
def store_path(tmp_path):
    return str(tmp_path / "data" / "runs.jsonl")


@pytest.fixture
def client(store_path, tmp_path):
    app = create_app(store_path=store_path, data_dir=str(tmp_path / "data"))
    app.config["TESTING"] = True
    return app.test_client()


def test_health_and_index(client):
    assert client.get("/health").get_json() == {"status": "ok"}
    assert "/api/rates" in client.get("/").get_json()["endpoints"]


def test_rates(client, four_users_record):
    response = client.post("/api/rates", json=four_users_record)
    assert response.status_code == 200
    data = response.get_json()
    assert data["report"]["r_cd"] == {"decimal": "1.7578125", "exact": "225/128"}
    assert data["report"]["r_rd"]["exact"] == "29/16"
    assert data["parts"]["coded"] == "225/128"
    assert data["reduction_pct"] == pytest.approx(34.4262, abs=1e-3)


def test_bounds_ceiling(client, bound3_record):
    response = client.post("/api/bounds", json={**bound3_record, "gamma": "ceil"})
    data = response.get_json()
    assert data["gamma"] == "ceiling"
    assert data["lower_bound_new"]["exact"] == "26/25"
    assert data["cut_set_bound"]["exact"] == "59/75"
    assert data["witness"] == {"s": 2, "l": 1, "gamma": 1}


def test_bad_config_is_client_error(client):
    response = client.post("/api/rates", json={"N": 2, "K": 2, "M": [1, 2]})
    assert response.status_code == 400
    assert response.get_json()["status"] == "error"
    assert client.post("/api/bounds", json={"N": 2}).status_code == 400


def test_presets(client):
    presets = client.get("/api/presets").get_json()["presets"]
    assert set(presets) == {"small_mmax", "large_mmax", "alpha", "users", "files"}
    assert presets["small_mmax"]["fixed"] == {"N": "3", "K": "3", "alpha": "4/5"}


def test_sweep_preset(client):
    data = client.post("/api/sweep", json={"preset": "small_mmax"}).get_json()
    assert len(data["rows"]) == 7
    assert data["flagged"][0]["x"] == "3"
    assert data["rows"][0]["rGBD"] == "3"
    assert data["spec"]["simulate"] is False


def test_sweep_bad_spec(client):
    assert client.post("/api/sweep", json={"variable": "Mmax"}).status_code == 400
    assert client.post("/api/sweep", json={"preset": "nope"}).status_code == 400


def test_runs_and_diff(client, store_path, four_users):
    store = RunStore(store_path)
    key = config_hash(four_users)
    assert client.get(f"/api/runs/{key}/diff").get_json()["status"] == "no_baseline"

    store.record_run(RunRecord.create(four_users, rate_report(four_users)))
    store.record_run(RunRecord.create(four_users, rate_report(four_users, "ceil")))

    runs = client.get(f"/api/runs/{key}").get_json()
    assert runs["count"] == 2
    diff = client.get(f"/api/runs/{key}/diff").get_json()
    assert diff["status"] in ("match", "changed")
    assert "lower_bound_cut_set" not in [c["field"] for c in diff["changes"]]


def test_data_status(client, store_path, four_users):
    RunStore(store_path).record_run(RunRecord.create(four_users, rate_report(four_users)))
    data = client.get("/api/system/data-status").get_json()
    assert data["store"]["records"] == 1
    assert "runs.jsonl" in data["files"]
