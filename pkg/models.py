#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cachelab - Sweep Data Models
파라미터 스윕 데이터 모델
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional

from engine.config import GammaConvention, SystemConfig, format_decimal, format_rational, parse_rational
from engine.exceptions import CacheLabError, SweepSpecError
from engine.models import RateReport


class SweepVariable(Enum):
    """스윕 변수"""
    MMAX = "Mmax"
    ALPHA = "alpha"
    K = "K"
    N = "N"


# 곡선 이름 -> RateReport 필드
CURVE_FIELDS = {
    "rGBD": "r_gbd",
    "rBaseline": "r_baseline",
    "rUncoded": "r_uncoded",
    "lowerBoundNew": "lower_bound_new",
    "cutSetBound": "lower_bound_cut_set",
}

CSV_COLUMNS = ["x", *CURVE_FIELDS, "witness_s", "witness_l"]

PARAMETERS = tuple(v.value for v in SweepVariable)
INTEGER_PARAMETERS = ("N", "K")


def _parse_parameter(name: str, value) -> Fraction:
    try:
        parsed = parse_rational(value)
    except CacheLabError as e:
        raise SweepSpecError(f"{name}: {e}") from e
    if name in INTEGER_PARAMETERS and (parsed.denominator != 1 or parsed < 1):
        raise SweepSpecError(f"{name} must be a positive integer, got {value!r}")
    if name == "alpha" and not 0 <= parsed <= 1:
        raise SweepSpecError(f"alpha must lie in [0, 1], got {value!r}")
    if name == "Mmax" and parsed < 0:
        raise SweepSpecError(f"Mmax must be >= 0, got {value!r}")
    return parsed


@dataclass
class SweepSpec:
    """스윕 명세 (지수 캐시 용량 분포 M_k = α^{K-k} M_max)"""
    name: str
    variable: SweepVariable
    values: List[Fraction]
    fixed: Dict[str, Fraction]
    curves: List[str] = field(default_factory=lambda: list(CURVE_FIELDS))
    gamma_convention: GammaConvention = GammaConvention.FLOOR

    # 시뮬레이션 (플래그된 경우만, K <= 20)
    simulate: bool = False
    trials: int = 5
    file_size_bits: int = 10_000
    seed: int = 0

    def __post_init__(self):
        self.variable = SweepVariable(self.variable)
        self.values = [_parse_parameter(self.variable.value, v) for v in self.values]
        self.fixed = {name: _parse_parameter(name, v) for name, v in self.fixed.items()}
        self.gamma_convention = GammaConvention.parse(self.gamma_convention)
        self.validate()

    def validate(self) -> None:
        if self.variable.value in self.fixed:
            raise SweepSpecError(f"swept variable {self.variable.value} also appears in fixed")
        missing = [p for p in PARAMETERS if p != self.variable.value and p not in self.fixed]
        if missing:
            raise SweepSpecError(f"missing fixed parameters: {missing}")
        unknown = [c for c in self.curves if c not in CURVE_FIELDS]
        if unknown:
            raise SweepSpecError(f"unknown curves: {unknown}")
        if not self.values:
            raise SweepSpecError("empty sweep range")

    def point(self, x: Fraction) -> Dict[str, Fraction]:
        """스윕 값 x 에서의 전체 파라미터"""
        params = dict(self.fixed)
        params[self.variable.value] = x
        return params

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SweepSpec":
        try:
            return cls(
                name=data.get("name", "sweep"),
                variable=data["variable"],
                values=list(data.get("range", data.get("values", []))),
                fixed=dict(data["fixed"]),
                curves=list(data.get("curves", CURVE_FIELDS)),
                gamma_convention=data.get("gamma", "floor"),
                simulate=bool(data.get("simulate", False)),
                trials=int(data.get("trials", 5)),
                file_size_bits=int(data.get("F", 10_000)),
                seed=int(data.get("seed", 0)),
            )
        except (KeyError, TypeError) as e:
            raise SweepSpecError(f"malformed sweep spec: {e}") from e
        except ValueError as e:
            raise SweepSpecError(str(e)) from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "variable": self.variable.value,
            "range": [format_rational(v) for v in self.values],
            "fixed": {k: format_rational(v) for k, v in self.fixed.items()},
            "curves": list(self.curves),
            "gamma": self.gamma_convention.value,
            "simulate": self.simulate,
            "trials": self.trials,
            "F": self.file_size_bits,
            "seed": self.seed,
        }


@dataclass
class SweepRow:
    """스윕 결과 한 행"""
    x: Fraction
    config: Optional[SystemConfig] = None
    report: Optional[RateReport] = None
    error: Optional[str] = None                 # 잘못된 설정이면 플래그
    validation: Optional[Dict[str, Any]] = None
    note: str = ""

    @property
    def flagged(self) -> bool:
        return self.error is not None

    def value(self, curve: str) -> Optional[Fraction]:
        if self.report is None:
            return None
        return getattr(self.report, CURVE_FIELDS[curve])

    def to_record(self, curves: List[str]) -> Dict[str, Any]:
        """CSV 한 줄 (유효숫자 10자리 십진 문자열)"""
        record: Dict[str, Any] = {column: "" for column in CSV_COLUMNS}
        record["x"] = format_decimal(self.x)
        if self.report is not None:
            for curve in curves:
                record[curve] = format_decimal(self.value(curve))
            witness = self.report.argmax_witness
            if witness is not None:
                record["witness_s"] = witness.s
                record["witness_l"] = witness.l
        return record

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": format_rational(self.x),
            "config": None if self.config is None else self.config.to_dict(),
            "report": None if self.report is None else self.report.to_dict(),
            "error": self.error,
            "validation": self.validation,
            "note": self.note,
        }


@dataclass
class SweepResult:
    """스윕 결과"""
    spec: SweepSpec
    rows: List[SweepRow] = field(default_factory=list)

    @property
    def flagged_rows(self) -> List[SweepRow]:
        return [r for r in self.rows if r.flagged]

    @property
    def valid_rows(self) -> List[SweepRow]:
        return [r for r in self.rows if not r.flagged]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": self.spec.to_dict(),
            "columns": CSV_COLUMNS,
            "rows": [r.to_dict() for r in self.rows],
            "flagged": len(self.flagged_rows),
        }
