#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cachelab Configuration
스윕 프리셋 및 실행 환경 설정
"""
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional

from dotenv import load_dotenv

from engine.exceptions import SweepSpecError
from models import SweepSpec, SweepVariable

BASE_DIR = os.path.dirname(os.path.abspath(__file__))

SEED_ENV = "CACHELAB_SEED"


def _grid(start: str, stop: str, step: str) -> List[Fraction]:
    """십진 문자열 등간격 격자 (양끝 포함, 정확한 유리수)"""
    begin, end, delta = Fraction(start), Fraction(stop), Fraction(step)
    values = []
    current = begin
    while current <= end:
        values.append(current)
        current += delta
    return values


@dataclass
class RuntimeSettings:
    """환경 변수 기반 실행 설정"""
    data_dir: str = os.path.join(BASE_DIR, "data")
    store_path: Optional[str] = None
    seed_override: Optional[int] = None
    flask_port: int = 5001
    flask_debug: bool = False

    @classmethod
    def from_env(cls) -> "RuntimeSettings":
        load_dotenv()
        data_dir = os.getenv("CACHELAB_DATA_DIR", os.path.join(BASE_DIR, "data"))
        seed = os.getenv(SEED_ENV)
        return cls(
            data_dir=data_dir,
            store_path=os.getenv("CACHELAB_STORE") or None,
            seed_override=int(seed) if seed not in (None, "") else None,
            flask_port=int(os.getenv("FLASK_PORT", 5001)),
            flask_debug=os.getenv("FLASK_DEBUG", "false").lower() == "true",
        )


class SweepPresets:
    """지수 캐시 용량 분포 기본 스윕 프리셋"""

    @classmethod
    def small_mmax(cls) -> SweepSpec:
        """N = K = 3, α = 0.8, M_max 스윕 (N >= K: 기준과 동일 전송률, 하한 비교)"""
        return SweepSpec(
            name="small_mmax",
            variable=SweepVariable.MMAX,
            values=_grid("0", "3", "0.5"),
            fixed={"N": 3, "K": 3, "alpha": "0.8"},
        )

    @classmethod
    def large_mmax(cls) -> SweepSpec:
        """N = 50, K = 70, α = 0.97, M_max 스윕"""
        return SweepSpec(
            name="large_mmax",
            variable=SweepVariable.MMAX,
            values=_grid("0", "45", "5"),
            fixed={"N": 50, "K": 70, "alpha": "0.97"},
        )

    @classmethod
    def alpha(cls) -> SweepSpec:
        """N = 30, K = 45, M_max = 2, α 스윕"""
        return SweepSpec(
            name="alpha",
            variable=SweepVariable.ALPHA,
            values=_grid("0.9", "1", "0.01"),
            fixed={"N": 30, "K": 45, "Mmax": 2},
            curves=["rGBD", "rBaseline"],
        )

    @classmethod
    def users(cls) -> SweepSpec:
        """N = 60, M_max = 5, α = 0.96, K 스윕 (K > N)"""
        return SweepSpec(
            name="users",
            variable=SweepVariable.K,
            values=list(range(61, 101, 3)),
            fixed={"N": 60, "Mmax": 5, "alpha": "0.96"},
            curves=["rGBD", "rBaseline"],
        )

    @classmethod
    def files(cls) -> SweepSpec:
        """K = 40, M_max = 4, α = 0.94, N 스윕 (CODED / RANDOM 전환)"""
        return SweepSpec(
            name="files",
            variable=SweepVariable.N,
            values=list(range(10, 40)),
            fixed={"K": 40, "Mmax": 4, "alpha": "0.94"},
            curves=["rGBD", "rBaseline"],
        )

    @classmethod
    def all(cls) -> Dict[str, Callable[[], SweepSpec]]:
        return {
            "small_mmax": cls.small_mmax,
            "large_mmax": cls.large_mmax,
            "alpha": cls.alpha,
            "users": cls.users,
            "files": cls.files,
        }

    @classmethod
    def get(cls, name: str) -> SweepSpec:
        presets = cls.all()
        if name not in presets:
            raise SweepSpecError(f"unknown preset {name!r}, expected one of {sorted(presets)}")
        return presets[name]()
