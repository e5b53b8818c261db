#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Sweep Runner - 파라미터 스윕
지수 캐시 용량 분포 기반 전송률/하한 곡선 계산 및 CSV 저장
"""

import asyncio
import logging
import os
from datetime import datetime
from fractions import Fraction
from typing import List, Optional

import pandas as pd
from tqdm import tqdm

from engine.analytics import rate_report
from engine.config import SimulationConfig, SystemConfig, format_decimal
from engine.exceptions import CacheLabError, ConfigError
from engine.simulator import monte_carlo_validate
from models import CSV_COLUMNS, SweepResult, SweepRow, SweepSpec

logger = logging.getLogger(__name__)


def exp_cache_profile(alpha, mmax, num_users: int) -> List[Fraction]:
    """
    지수 캐시 용량 분포 M_k = α^{K-k} M_max (k = 1..K, 오름차순)

    Args:
        alpha: 0 <= α <= 1
        mmax: 가장 큰 캐시 용량
        num_users: K
    """
    alpha, mmax = Fraction(alpha), Fraction(mmax)
    if not 0 <= alpha <= 1:
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    if mmax < 0:
        raise ConfigError(f"Mmax must be >= 0, got {mmax}")
    return [alpha ** (num_users - k) * mmax for k in range(1, num_users + 1)]


class SweepRunner:
    """스윕 실행기"""

    def __init__(self, sim_config: Optional[SimulationConfig] = None, verbose: bool = True):
        self.sim_config = sim_config or SimulationConfig()
        self.verbose = verbose

    def _print(self, message: str) -> None:
        if self.verbose:
            print(message)

    def run(self, spec: SweepSpec) -> SweepResult:
        """
        스윕 실행 (행은 병렬 계산, 결과는 명세 순서)

        Returns:
            SweepResult
        """
        self._print("=" * 60)
        self._print(f"📈 Sweep 시작: {spec.name}")
        self._print(f"   시간: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        self._print(f"   변수: {spec.variable.value} ({len(spec.values)}개 지점)")
        self._print("=" * 60)

        rows = asyncio.run(self._run_rows(spec))
        result = SweepResult(spec=spec, rows=rows)

        self._print(f"\n✅ 스윕 완료: {len(result.valid_rows)}개 지점")
        for row in result.flagged_rows:
            self._print(f"   ⚠️  x={format_decimal(row.x)}: {row.error}")
        return result

    async def _run_rows(self, spec: SweepSpec) -> List[SweepRow]:
        bar = tqdm(total=len(spec.values), desc=spec.name, disable=not self.verbose, leave=False)

        async def evaluate(x: Fraction) -> SweepRow:
            row = await asyncio.to_thread(self._evaluate, spec, x)
            bar.update(1)
            return row

        try:
            return list(await asyncio.gather(*(evaluate(x) for x in spec.values)))
        finally:
            bar.close()

    def _evaluate(self, spec: SweepSpec, x: Fraction) -> SweepRow:
        """한 지점 계산, 잘못된 설정은 플래그 후 계속"""
        params = spec.point(x)
        row = SweepRow(x=x)
        try:
            num_files, num_users = int(params["N"]), int(params["K"])
            config = SystemConfig(
                num_files=num_files,
                num_users=num_users,
                cache_capacities=exp_cache_profile(params["alpha"], params["Mmax"], num_users),
                file_size_bits=spec.file_size_bits,
                seed=spec.seed,
            ).validate()
            row.config = config
            row.report = rate_report(config, spec.gamma_convention)
        except CacheLabError as e:
            logger.warning("sweep %s: x=%s flagged: %s", spec.name, x, e)
            row.error = str(e)
            return row

        if spec.simulate:
            if config.num_users > self.sim_config.max_simulation_users:
                row.note = f"simulation skipped (K > {self.sim_config.max_simulation_users})"
            else:
                try:
                    report = monte_carlo_validate(
                        config, trials=spec.trials, file_size_bits=spec.file_size_bits,
                        sim_config=self.sim_config,
                    )
                    row.validation = report.to_dict()
                except CacheLabError as e:
                    row.error = f"simulation failed: {e}"
        return row

    @staticmethod
    def to_dataframe(result: SweepResult) -> pd.DataFrame:
        """고정 컬럼 DataFrame: x, rGBD, rBaseline, rUncoded, lowerBoundNew, cutSetBound, witness_s, witness_l"""
        records = [row.to_record(result.spec.curves) for row in result.rows]
        return pd.DataFrame(records, columns=CSV_COLUMNS)

    def write_csv(self, result: SweepResult, output_path: str) -> str:
        directory = os.path.dirname(os.path.abspath(output_path))
        os.makedirs(directory, exist_ok=True)
        df = self.to_dataframe(result)
        df.to_csv(output_path, index=False, encoding="utf-8")
        self._print(f"   결과 저장: {output_path}")
        return output_path
