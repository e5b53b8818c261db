#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Invariant Gate - 불변식 검증
한 설정에 대해 해석식 항등식/하한/단조성과 비트 단위 복호를 검사하고 PASS/FAIL 판정
"""

import json
import logging
import os
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from typing import Callable, Dict, List, Optional

import numpy as np

from engine.analytics import (
    cut_set_bound,
    demand_rates,
    lower_bound_new,
    q_value,
    rate_baseline,
    rate_random,
    rate_report,
)
from engine.config import GammaConvention, SimulationConfig, SystemConfig, format_decimal
from engine.decoder import verify_transcript
from engine.exceptions import CacheLabError
from engine.models import RateReport
from engine.placement import build_demand_profile, partition_subfiles, place_caches, worst_case_demands
from engine.simulator import simulate
from engine.store import config_hash

logger = logging.getLogger(__name__)

PASS, FAIL, WARN, SKIP = "PASS", "FAIL", "WARN", "SKIP"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""

    def to_dict(self) -> Dict[str, str]:
        return {"name": self.name, "status": self.status, "detail": self.detail}


def _status(ok: bool, failure: str = FAIL) -> str:
    return PASS if ok else failure


class InvariantGate:
    """불변식 게이트"""

    def __init__(
        self,
        sim_config: Optional[SimulationConfig] = None,
        demand_samples: int = 100,
        simulate: bool = True,
        verbose: bool = True,
    ):
        self.sim_config = sim_config or SimulationConfig.fast()
        self.demand_samples = demand_samples
        self.simulate = simulate
        self.verbose = verbose

    def _print(self, message: str) -> None:
        if self.verbose:
            print(message)

    def analyze(
        self,
        config: SystemConfig,
        gamma_convention: GammaConvention = GammaConvention.FLOOR,
        output_path: Optional[str] = None,
    ) -> Dict:
        """
        불변식 검증

        Returns:
            {
                "gate": "PASS" | "FAIL",
                "checks": [{"name", "status", "detail"}, ...],
                "report": RateReport dict,
                ...
            }
        """
        self._print("=" * 60)
        self._print("🚦 Invariant Gate 검증 시작")
        self._print(f"   시간: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        self._print(f"   N={config.num_files}, K={config.num_users}, F={config.file_size_bits}")
        self._print("=" * 60)

        report = rate_report(config, gamma_convention)
        checks: List[Check] = []

        self._print("\n[1/3] 해석식 항등식 검사 중...")
        checks += self._analytic_checks(config, report)

        self._print("\n[2/3] 요청/용량 섭동 검사 중...")
        checks.append(self._check_worst_case_dominance(config, report))
        checks += self._check_monotonicity(config, report)

        self._print("\n[3/3] 비트 단위 복호 검사 중...")
        if self.simulate:
            checks += self._simulation_checks(config)
        else:
            checks.append(Check("simulation", SKIP, "disabled"))

        gate = FAIL if any(c.status == FAIL for c in checks) else PASS
        result = {
            "timestamp": datetime.now().isoformat(),
            "gate": gate,
            "config": config.to_dict(),
            "config_hash": config_hash(config),
            "report": report.to_dict(),
            "checks": [c.to_dict() for c in checks],
        }

        if output_path:
            os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)
            with open(output_path, "w", encoding="utf-8") as f:
                json.dump(result, f, ensure_ascii=False, indent=2)

        self._print("\n" + "=" * 60)
        self._print_result(result)
        return result

    # === 해석식 ===

    def _analytic_checks(self, config: SystemConfig, report: RateReport) -> List[Check]:
        checks = []
        n, k = config.num_files, config.num_users

        checks.append(Check(
            "min_identity",
            _status(report.r_gbd == min(report.r_cd, report.r_rd) and report.r_uncoded == report.r_rd),
            f"rGBD={format_decimal(report.r_gbd)}",
        ))

        if n < k:
            decomposed = report.r_cd + report.delta_r1 + report.delta_r2
            checks.append(Check(
                "decomposition_identity",
                _status(report.r_baseline == decomposed),
                f"rBaseline={format_decimal(report.r_baseline)}, rCD+ΔR1+ΔR2={format_decimal(decomposed)}",
            ))
            gain = report.delta_r1 + report.delta_r2
            gap = report.r_baseline - report.r_gbd
            exact = gap == gain if report.r_cd <= report.r_rd else gap >= gain
            checks.append(Check(
                "strict_improvement",
                _status(exact and gain > 0),
                f"gap={format_decimal(gap)}, ΔR1+ΔR2={format_decimal(gain)}",
            ))
        else:
            checks.append(Check("decomposition_identity", SKIP, "N >= K"))
            checks.append(Check(
                "n_ge_k_equality",
                _status(report.r_gbd == report.r_baseline),
                f"rGBD={format_decimal(report.r_gbd)}, rBaseline={format_decimal(report.r_baseline)}",
            ))

        floor_bound, _ = lower_bound_new(config, GammaConvention.FLOOR)
        cut_set = cut_set_bound(config)
        checks.append(Check(
            "cut_set_sandwich",
            _status(cut_set <= report.r_gbd),
            f"cut-set={format_decimal(cut_set)}",
        ))
        # (s, l) 하한은 N=3, K=2, M=(0, 2.7) 처럼 달성 전송률을 넘는 설정이 있다
        checks.append(Check(
            "new_bound_sandwich",
            _status(floor_bound <= report.r_gbd, WARN),
            f"new={format_decimal(floor_bound)}",
        ))
        if report.gamma_convention is GammaConvention.CEILING:
            checks.append(Check(
                "new_bound_sandwich_ceiling",
                _status(report.lower_bound_new <= report.r_gbd, WARN),
                f"ceiling={format_decimal(report.lower_bound_new)}",
            ))

        q = [q_value(u, config) for u in range(k)]
        caps = config.cache_capacities
        ordered = all(
            q[i] >= q[j] for i in range(k) for j in range(k) if caps[i] >= caps[j]
        )
        checks.append(Check("q_monotonicity", _status(ordered)))
        return checks

    def _check_worst_case_dominance(self, config: SystemConfig, report: RateReport) -> Check:
        """임의 요청 벡터의 기대 전송률 <= 최악 요청 전송률"""
        rng = np.random.default_rng(config.seed)
        worst = demand_rates(config, worst_case_demands(config))
        violations = 0
        for _ in range(self.demand_samples):
            demands = rng.integers(1, config.num_files + 1, size=config.num_users)
            rates = demand_rates(config, build_demand_profile(config, demands.tolist()))
            if rates.coded > worst.coded or rates.random > worst.random:
                violations += 1
        consistent = worst.coded == report.r_cd and worst.random == report.r_rd
        return Check(
            "worst_case_dominance",
            _status(violations == 0 and consistent),
            f"{violations}/{self.demand_samples} sampled demands exceed the worst case",
        )

    def _check_monotonicity(self, config: SystemConfig, report: RateReport) -> List[Check]:
        """각 M_k 를 (N - M_k)/4 만큼 늘려도 전송률이 증가하지 않는지"""
        violations: Dict[str, List[int]] = {"rBaseline": [], "rRD": [], "rGBD": []}
        metrics: Dict[str, Callable[[SystemConfig], Fraction]] = {
            "rBaseline": rate_baseline,
            "rRD": rate_random,
            "rGBD": lambda c: rate_report(c).r_gbd,
        }
        current = {"rBaseline": report.r_baseline, "rRD": report.r_rd, "rGBD": report.r_gbd}
        for user in range(config.num_users):
            capacities = list(config.cache_capacities)
            capacities[user] += (config.num_files - capacities[user]) / 4
            bumped = SystemConfig(
                config.num_files, config.num_users, tuple(capacities), config.file_size_bits, config.seed
            )
            for name, metric in metrics.items():
                if metric(bumped) > current[name]:
                    violations[name].append(user + 1)

        checks = []
        for name in ("rBaseline", "rRD"):
            checks.append(Check(
                f"monotonicity_{name}",
                _status(not violations[name]),
                f"increasing users: {violations[name]}" if violations[name] else "",
            ))
        # 큰 용량 사용자의 Part 3 항 때문에 rGBD 는 증가할 수 있다
        checks.append(Check(
            "monotonicity_rGBD",
            _status(not violations["rGBD"], WARN),
            f"increasing users: {violations['rGBD']}" if violations["rGBD"] else "",
        ))
        return checks

    # === 시뮬레이션 ===

    def _simulation_checks(self, config: SystemConfig) -> List[Check]:
        if config.num_users > self.sim_config.max_simulation_users:
            return [Check("simulation", SKIP, f"K > {self.sim_config.max_simulation_users}")]

        checks = []
        small = config.with_file_size(min(config.file_size_bits, self.sim_config.default_file_size_bits))
        placement = place_caches(small, mode=self.sim_config.placement_mode)
        partition = partition_subfiles(placement)
        covered = all(
            sum(partition.size(index) for index in partition.nonempty(i)) == small.file_size_bits
            for i in range(1, small.num_files + 1)
        )
        checks.append(Check("partition_property", _status(covered), f"F={small.file_size_bits}"))

        profile = worst_case_demands(small)
        checks.append(self._decode_check("coded_decode", small, profile, "coded"))

        rd_config = small.with_file_size(min(small.file_size_bits, self.sim_config.max_random_delivery_bits))
        checks.append(self._decode_check("random_decode", rd_config, profile, "random"))
        return checks

    def _decode_check(self, name: str, config: SystemConfig, profile, delivery: str) -> Check:
        try:
            artifacts = simulate(config, profile, delivery, self.sim_config)
            results = verify_transcript(
                artifacts.placement, artifacts.transcript, profile, artifacts.library, artifacts.partition
            )
        except CacheLabError as e:
            return Check(name, FAIL, str(e))
        decoded = sum(1 for r in results if r.decoded)
        return Check(
            name,
            _status(decoded == config.num_users),
            f"{decoded}/{config.num_users} users, rate={format_decimal(artifacts.transcript.normalized_rate)}",
        )

    def _print_result(self, result: Dict) -> None:
        icon = "🟢" if result["gate"] == PASS else "🔴"
        self._print(f"{icon} Gate: {result['gate']}")
        for check in result["checks"]:
            mark = {PASS: "✅", FAIL: "❌", WARN: "⚠️ ", SKIP: "⏭️ "}[check["status"]]
            self._print(f"   {mark} {check['name']:<26} {check['detail']}")
        self._print("=" * 60)
