"""
Monte-Carlo 검증기 (Main Engine)
- 배치 -> 전송 -> 전체 사용자 복호를 시행마다 실행
- 측정 전송률을 해석적 기대값과 비교
"""

import asyncio
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from tqdm import tqdm

from engine.analytics import demand_rates, rate_baseline
from engine.config import SimulationConfig, SystemConfig
from engine.decoder import verify_transcript
from engine.delivery import DELIVERY_KINDS, run_delivery
from engine.exceptions import ConfigError, ValidationAbortedError
from engine.models import (
    CachePlacement,
    DeliveryTranscript,
    DemandProfile,
    Library,
    SubfilePartition,
    UserVerification,
    ValidationReport,
)
from engine.placement import (
    build_demand_profile,
    generate_library,
    partition_subfiles,
    place_caches,
    worst_case_demands,
)

logger = logging.getLogger(__name__)


@dataclass
class SimulationArtifacts:
    """한 번의 시행 산출물"""
    library: Library
    placement: CachePlacement
    partition: Optional[SubfilePartition]
    transcript: DeliveryTranscript


@dataclass
class TrialResult:
    seed: int
    rate: Fraction
    part_bits: Dict[str, int]
    verifications: List[UserVerification]


def simulate(
    config: SystemConfig,
    profile: DemandProfile,
    delivery: str = "coded",
    sim_config: Optional[SimulationConfig] = None,
) -> SimulationArtifacts:
    """config.seed 로 라이브러리/배치/전송 생성"""
    sim_config = sim_config or SimulationConfig()
    library = generate_library(config)
    placement = place_caches(
        config, mode=sim_config.placement_mode, max_users=sim_config.max_partition_users
    )
    partition = None if delivery == "random" else partition_subfiles(placement)
    transcript = run_delivery(
        delivery,
        library,
        placement,
        profile,
        partition=partition,
        slack_bits=sim_config.slack_bits,
        max_file_bits=sim_config.max_random_delivery_bits,
    )
    return SimulationArtifacts(library, placement, partition, transcript)


def expected_rate(config: SystemConfig, profile: DemandProfile, delivery: str) -> Fraction:
    """전송 절차별 해석적 기대 전송률 (RD 여유 조합 제외)"""
    if delivery == "baseline":
        return rate_baseline(config)
    rates = demand_rates(config, profile)
    return rates.random if delivery == "random" else rates.coded


class MonteCarloValidator:
    """비트 단위 시뮬레이터와 해석식 교차 검증"""

    def __init__(self, sim_config: Optional[SimulationConfig] = None):
        self.sim_config = sim_config or SimulationConfig()

    async def run(
        self,
        config: SystemConfig,
        demands: Optional[Sequence[int]] = None,
        trials: int = 20,
        file_size_bits: Optional[int] = None,
        delivery: str = "coded",
        progress: bool = False,
    ) -> ValidationReport:
        """
        검증 실행

        Args:
            config: 시스템 설정 (seed 는 첫 시행 시드)
            demands: 요청 벡터, None 이면 최악 요청
            trials: 시행 수
            file_size_bits: F, None 이면 설정 값
            delivery: coded / random / baseline

        Returns:
            ValidationReport

        Raises:
            ValidationAbortedError: 복호 실패 시 (seed, user)
        """
        if trials < 1:
            raise ConfigError(f"trials must be >= 1, got {trials}")
        if delivery not in DELIVERY_KINDS:
            raise ConfigError(f"unknown delivery procedure: {delivery!r}")
        if config.num_users > self.sim_config.max_simulation_users:
            raise ConfigError(
                f"bit-level validation is limited to K <= {self.sim_config.max_simulation_users}"
            )
        if file_size_bits is not None:
            config = config.with_file_size(file_size_bits)

        profile = (
            worst_case_demands(config) if demands is None else build_demand_profile(config, demands)
        )
        seeds = [config.seed + t for t in range(trials)]
        report = ValidationReport(
            config=config.to_dict(include_demands=False),
            demands=profile.demands,
            delivery=delivery,
            trials=trials,
            file_size_bits=config.file_size_bits,
            seeds=seeds,
            expected_rate=expected_rate(config, profile, delivery),
            decodes_expected=config.num_users * trials,
            tolerance=self.sim_config.tolerance,
        )

        semaphore = asyncio.Semaphore(max(1, self.sim_config.workers))
        bar = tqdm(total=trials, desc="trials", disable=not progress, leave=False)

        async def run_one(seed: int) -> TrialResult:
            async with semaphore:
                result = await asyncio.to_thread(self._run_trial, config, profile, seed, delivery)
            bar.update(1)
            return result

        try:
            results = await asyncio.gather(*(run_one(s) for s in seeds), return_exceptions=True)
        finally:
            bar.close()

        for result in results:
            if isinstance(result, Exception):
                raise result
            report.measured_rates.append(result.rate)
            report.decodes_ok += sum(1 for v in result.verifications if v.decoded)
            for tag, bits in result.part_bits.items():
                report.part_bits.setdefault(tag, []).append(bits)

        logger.info(
            "validated %s delivery: %d trials, mean deviation %.4f",
            delivery, trials, report.mean_rate_deviation,
        )
        return report

    def _run_trial(self, config: SystemConfig, profile: DemandProfile, seed: int, delivery: str) -> TrialResult:
        artifacts = simulate(config.with_seed(seed), profile, delivery, self.sim_config)
        verifications = verify_transcript(
            artifacts.placement, artifacts.transcript, profile, artifacts.library, artifacts.partition
        )
        for v in verifications:
            if not v.decoded:
                raise ValidationAbortedError(
                    seed, v.user_id, v.error or f"{v.mismatched_bits} mismatched bits"
                )
        transcript = artifacts.transcript
        return TrialResult(
            seed=seed,
            rate=transcript.payload_rate,
            part_bits={tag.value: bits for tag, bits in transcript.bits_by_part().items()},
            verifications=verifications,
        )


def monte_carlo_validate(
    config: SystemConfig,
    demands: Optional[Sequence[int]] = None,
    trials: int = 20,
    file_size_bits: Optional[int] = None,
    delivery: str = "coded",
    sim_config: Optional[SimulationConfig] = None,
    progress: bool = False,
) -> ValidationReport:
    """MonteCarloValidator 동기 실행"""
    validator = MonteCarloValidator(sim_config)
    return asyncio.run(
        validator.run(config, demands, trials, file_size_bits, delivery, progress)
    )
