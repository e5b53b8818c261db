import json

from engine.config import GammaConvention, SystemConfig
from verify import FAIL, PASS, SKIP, WARN, InvariantGate


def statuses(result):
    return {check["name"]: check["status"] for check in result["checks"]}


def test_gate_passes_four_users(four_users):
    result = InvariantGate(verbose=False, demand_samples=30).analyze(four_users)
    checks = statuses(result)
    assert result["gate"] == PASS
    for name in (
        "min_identity",
        "decomposition_identity",
        "strict_improvement",
        "cut_set_sandwich",
        "new_bound_sandwich",
        "q_monotonicity",
        "worst_case_dominance",
        "monotonicity_rBaseline",
        "monotonicity_rRD",
        "partition_property",
        "coded_decode",
        "random_decode",
    ):
        assert checks[name] == PASS, name
    assert checks["monotonicity_rGBD"] in (PASS, WARN)


def test_gate_n_ge_k(bound3):
    result = InvariantGate(verbose=False, simulate=False).analyze(bound3, GammaConvention.CEILING)
    checks = statuses(result)
    assert result["gate"] == PASS
    assert checks["n_ge_k_equality"] == PASS
    assert checks["decomposition_identity"] == SKIP
    assert checks["new_bound_sandwich_ceiling"] == PASS
    assert checks["simulation"] == SKIP
    assert result["report"]["lower_bound_new"]["exact"] == "26/25"


def test_rgbd_monotonicity_is_only_a_warning():
    # M_5 를 늘리면 R_CD 가 아주 조금 커진다
    config = SystemConfig(2, 5, ("19/10",) * 5)
    result = InvariantGate(verbose=False, simulate=False).analyze(config)
    checks = statuses(result)
    assert checks["monotonicity_rGBD"] == WARN
    assert checks["monotonicity_rBaseline"] == PASS
    assert result["gate"] == PASS


def test_gate_skips_simulation_for_many_users():
    config = SystemConfig(3, 24, ("1/2",) * 24)
    result = InvariantGate(verbose=False, demand_samples=5).analyze(config)
    assert statuses(result)["simulation"] == SKIP
    assert result["gate"] != FAIL


def test_gate_writes_result(four_users, tmp_path):
    path = tmp_path / "gate" / "result.json"
    InvariantGate(verbose=False, simulate=False, demand_samples=5).analyze(four_users, output_path=str(path))
    saved = json.loads(path.read_text(encoding="utf-8"))
    assert saved["gate"] == PASS
    assert saved["config"]["M"] == ["1/8", "1/4", "1/2", "1"]


def test_new_bound_above_rgbd_is_only_a_warning():
    config = SystemConfig(3, 2, (0, "27/10"))
    result = InvariantGate(verbose=False, simulate=False, demand_samples=10).analyze(config)
    checks = statuses(result)
    assert checks["new_bound_sandwich"] == WARN
    assert checks["cut_set_sandwich"] == PASS
    assert checks["n_ge_k_equality"] == PASS
    assert result["gate"] == PASS
