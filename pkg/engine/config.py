"""
코디드 캐싱 시스템 설정
- SystemConfig: N개 파일, K명 사용자, 사용자별 캐시 용량 M_k, 파일 크기 F
- SimulationConfig: 비트 단위 시뮬레이터 설정
"""

import logging
import math
from dataclasses import dataclass, field, replace
from decimal import Context, Decimal, ROUND_HALF_EVEN
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from engine.exceptions import ConfigError

logger = logging.getLogger(__name__)

RationalLike = Union[int, float, str, Fraction]

# 비트마스크 부분집합 인코딩 한계 (2^K 메모리)
MAX_PARTITION_USERS = 30


class PartTag(Enum):
    """전송 세그먼트 구분"""
    P1 = "P1"        # 아무도 캐시하지 않은 비트
    P2_1 = "P2_1"    # 그룹 내부 체인
    P2_2 = "P2_2"    # 그룹 간 체인 + 페어링
    P3 = "P3"        # |V| >= 3 XOR
    RD = "RD"        # 랜덤 선형 조합
    BL = "BL"        # 기준(baseline) 디센트럴라이즈드 전송


class GammaConvention(Enum):
    """하한식 γ 정의 (floor: 정리 본문, ceiling: 증명 유도식)"""
    FLOOR = "floor"
    CEILING = "ceiling"

    @classmethod
    def parse(cls, value: Union[str, "GammaConvention"]) -> "GammaConvention":
        if isinstance(value, cls):
            return value
        text = str(value).strip().lower()
        if text in ("ceil", "ceiling"):
            return cls.CEILING
        if text == "floor":
            return cls.FLOOR
        raise ConfigError(f"unknown gamma convention: {value!r}")


class PlacementMode(Enum):
    """캐시 배치 방식"""
    EXACT = "exact"          # 정확히 round(M_k F / N) 비트
    BERNOULLI = "bernoulli"  # 비트별 독립 확률 M_k / N (LLN 실험용)


def parse_rational(value: RationalLike) -> Fraction:
    """
    "p/q", 십진 문자열, 정수, 실수를 정확한 유리수로 변환

    실수는 repr 의 십진 표기를 그대로 사용한다 (0.64 -> 16/25).
    """
    if isinstance(value, bool):
        raise ConfigError(f"not a rational: {value!r}")
    try:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ConfigError(f"not a finite rational: {value!r}")
            return Fraction(repr(value))
        if isinstance(value, str):
            return Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"not a rational: {value!r} ({e})") from e
    raise ConfigError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """정확한 'p/q' 표기 (정수는 'p')"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 10) -> str:
    """유효숫자 digits 자리, half-even 반올림 십진 표기"""
    value = Fraction(value)
    if value == 0:
        return "0"
    ctx = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    result = ctx.divide(Decimal(value.numerator), Decimal(value.denominator))
    return format(result, "f")


def round_half_down(value: Fraction) -> int:
    """가장 가까운 정수로 반올림, 동률은 floor"""
    base = math.floor(value)
    return base + 1 if value - base > Fraction(1, 2) else base


@dataclass(frozen=True)
class SystemConfig:
    """시스템 설정 (N, K, M_k, F)"""
    num_files: int                                  # N
    num_users: int                                  # K
    cache_capacities: Tuple[Fraction, ...]          # M_k (파일 크기 단위)
    file_size_bits: int = 100_000                   # F
    seed: int = 0
    demands: Optional[Tuple[int, ...]] = None       # 명시적 요청 벡터 (1-based 파일 id)

    def __post_init__(self):
        object.__setattr__(
            self, "cache_capacities", tuple(parse_rational(m) for m in self.cache_capacities)
        )
        if self.demands is not None:
            object.__setattr__(self, "demands", tuple(int(d) for d in self.demands))

    # === 검증 ===

    def validate(self, drop_full_cache: bool = False) -> "SystemConfig":
        """
        설정 검증

        Args:
            drop_full_cache: True 면 M_k >= N 인 사용자를 제외 (전송에 참여할 필요 없음)

        Returns:
            검증된 (필요 시 사용자 제외된) SystemConfig
        """
        if self.num_files < 1:
            raise ConfigError(f"N must be positive, got {self.num_files}")
        if self.num_users < 1:
            raise ConfigError(f"K must be positive, got {self.num_users}")
        if self.file_size_bits < 1:
            raise ConfigError(f"F must be positive, got {self.file_size_bits}")
        if len(self.cache_capacities) != self.num_users:
            raise ConfigError(
                f"expected {self.num_users} capacities, got {len(self.cache_capacities)}"
            )
        for k, m in enumerate(self.cache_capacities):
            if m < 0:
                raise ConfigError(f"user {k + 1}: negative capacity {format_rational(m)}")
        if self.demands is not None:
            if len(self.demands) != self.num_users:
                raise ConfigError(f"expected {self.num_users} demands, got {len(self.demands)}")
            for k, d in enumerate(self.demands):
                if not 1 <= d <= self.num_files:
                    raise ConfigError(f"user {k + 1}: demand {d} out of range [1:{self.num_files}]")

        full = [k for k, m in enumerate(self.cache_capacities) if m >= self.num_files]
        if not full:
            return self
        if not drop_full_cache:
            raise ConfigError(
                f"users {[k + 1 for k in full]} have M_k >= N={self.num_files}; "
                "use drop_full_cache to exclude them"
            )

        keep = [k for k in range(self.num_users) if k not in full]
        if not keep:
            raise ConfigError("every user caches the whole library")
        logger.info("dropping full-cache users %s", [k + 1 for k in full])
        return replace(
            self,
            num_users=len(keep),
            cache_capacities=tuple(self.cache_capacities[k] for k in keep),
            demands=None if self.demands is None else tuple(self.demands[k] for k in keep),
        )

    # === 파생 값 ===

    @property
    def is_uniform(self) -> bool:
        return len(set(self.cache_capacities)) <= 1

    def capacity_order(self) -> Tuple[int, ...]:
        """용량 오름차순 사용자 순서 (동률은 사용자 번호 순)"""
        return tuple(sorted(range(self.num_users), key=lambda k: (self.cache_capacities[k], k)))

    def sorted_capacities(self) -> Tuple[Fraction, ...]:
        return tuple(sorted(self.cache_capacities))

    def cached_bits_per_file(self, user_id: int) -> int:
        """사용자가 파일마다 캐시하는 비트 수 round(M_k F / N)"""
        exact = self.cache_capacities[user_id] * self.file_size_bits / self.num_files
        bits = round_half_down(exact)
        if exact - math.floor(exact) == Fraction(1, 2):
            logger.debug("user %d: M_k F / N = %s is a tie, rounded down", user_id + 1, exact)
        return bits

    def with_seed(self, seed: int) -> "SystemConfig":
        return replace(self, seed=int(seed))

    def with_file_size(self, file_size_bits: int) -> "SystemConfig":
        return replace(self, file_size_bits=int(file_size_bits))

    def with_demands(self, demands: Optional[Sequence[int]]) -> "SystemConfig":
        return replace(self, demands=None if demands is None else tuple(demands))

    # === 직렬화 ===

    @classmethod
    def from_dict(cls, data: Dict[str, Any], drop_full_cache: bool = False) -> "SystemConfig":
        """설정 JSON 레코드 {"N","K","M","F","seed"} (+ 선택 "demands") 로부터 생성"""
        try:
            capacities = data["M"]
            num_files = int(data["N"])
            if isinstance(capacities, (str, int, float)):
                # 균일 용량 축약 표기
                num_users = int(data["K"])
                capacities = [capacities] * num_users
            else:
                num_users = int(data.get("K", len(capacities)))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"malformed config record: {e}") from e
        config = cls(
            num_files=num_files,
            num_users=num_users,
            cache_capacities=tuple(capacities),
            file_size_bits=int(data.get("F", 100_000)),
            seed=int(data.get("seed", 0)),
            demands=data.get("demands"),
        )
        return config.validate(drop_full_cache=drop_full_cache)

    def to_dict(self, include_demands: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "N": self.num_files,
            "K": self.num_users,
            "M": [format_rational(m) for m in self.cache_capacities],
            "F": self.file_size_bits,
            "seed": self.seed,
        }
        if include_demands and self.demands is not None:
            data["demands"] = list(self.demands)
        return data


@dataclass
class SimulationConfig:
    """비트 단위 시뮬레이터 설정"""

    slack_bits: int = 32                          # RANDOM DELIVERY 여유 조합 수
    placement_mode: PlacementMode = PlacementMode.EXACT
    max_partition_users: int = MAX_PARTITION_USERS
    max_random_delivery_bits: int = 2 ** 14       # RD 랭크 검사 F 상한
    max_simulation_users: int = 20                # 비트 단위 검증 K 상한
    default_file_size_bits: int = 100_000
    tolerance: Fraction = Fraction(2, 100)        # Monte-Carlo 상대 오차 허용치
    workers: int = 4

    def __post_init__(self):
        if self.slack_bits < 0:
            raise ConfigError(f"slack_bits must be >= 0, got {self.slack_bits}")
        if not 1 <= self.max_partition_users <= MAX_PARTITION_USERS:
            raise ConfigError(f"max_partition_users must be in [1:{MAX_PARTITION_USERS}]")

    @classmethod
    def default(cls) -> "SimulationConfig":
        return cls()

    @classmethod
    def fast(cls) -> "SimulationConfig":
        """테스트/검증 게이트용 소규모 설정"""
        return cls(default_file_size_bits=4096, max_random_delivery_bits=1024)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slack_bits": self.slack_bits,
            "placement_mode": self.placement_mode.value,
            "max_partition_users": self.max_partition_users,
            "max_random_delivery_bits": self.max_random_delivery_bits,
            "max_simulation_users": self.max_simulation_users,
            "default_file_size_bits": self.default_file_size_bits,
            "tolerance": format_rational(self.tolerance),
            "workers": self.workers,
        }
