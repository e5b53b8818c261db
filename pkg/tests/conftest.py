import json

import pytest

from engine.config import SystemConfig


@pytest.fixture
def four_users():
    """N=2, K=4, M=(1/8, 1/4, 1/2, 1): 두 파일, 용량이 두 배씩 늘어나는 네 사용자"""
    return SystemConfig(
        num_files=2,
        num_users=4,
        cache_capacities=("1/8", "1/4", "1/2", "1"),
        file_size_bits=4096,
        seed=7,
    ).validate()


@pytest.fixture
def uniform():
    """N=2, K=4, M=1 균일 용량"""
    return SystemConfig(2, 4, (1, 1, 1, 1), file_size_bits=4096, seed=3).validate()


@pytest.fixture
def bound3():
    """N=K=3, M=(0.64, 0.8, 1.0): 새 하한이 컷셋 하한보다 큰 설정"""
    return SystemConfig(3, 3, ("0.64", "0.8", "1.0"), file_size_bits=2048, seed=1).validate()


@pytest.fixture
def four_users_record():
    return {"N": 2, "K": 4, "M": ["1/8", "1/4", "1/2", "1"], "F": 4096, "seed": 7}


@pytest.fixture
def bound3_record():
    return {"N": 3, "K": 3, "M": ["0.64", "0.8", "1.0"], "F": 2048, "seed": 1}


@pytest.fixture
def config_json(tmp_path):
    """설정 dict -> JSON 파일 경로"""

    def write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """사용자 환경 변수가 저장소/시드를 바꾸지 않도록"""
    for name in ("CACHELAB_SEED", "CACHELAB_STORE"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("CACHELAB_DATA_DIR", str(tmp_path / "data"))
