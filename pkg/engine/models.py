"""
코디드 캐싱 데이터 모델
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np

from engine.config import (
    GammaConvention,
    PartTag,
    PlacementMode,
    SystemConfig,
    format_decimal,
    format_rational,
    parse_rational,
)


def mask_users(mask: int) -> Tuple[int, ...]:
    """비트마스크 -> 사용자 id 튜플 (0-based, 오름차순)"""
    users = []
    k = 0
    while mask:
        if mask & 1:
            users.append(k)
        mask >>= 1
        k += 1
    return tuple(users)


def users_mask(users) -> int:
    mask = 0
    for k in users:
        mask |= 1 << k
    return mask


@dataclass(frozen=True, order=True)
class SubfileIndex:
    """W_{i,V}: 파일 i 중 정확히 V 의 사용자들만 캐시한 비트"""
    file_id: int            # 1-based
    user_subset: int        # 비트마스크, bit k = 사용자 k (0-based)

    def users(self) -> Tuple[int, ...]:
        return mask_users(self.user_subset)

    def contains(self, user_id: int) -> bool:
        return bool(self.user_subset >> user_id & 1)

    def label(self) -> str:
        inner = ",".join(str(k + 1) for k in self.users())
        return f"W_{{{self.file_id},{{{inner}}}}}"

    def to_dict(self) -> Dict[str, Any]:
        return {"file_id": self.file_id, "users": [k + 1 for k in self.users()]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SubfileIndex":
        return cls(int(data["file_id"]), users_mask(k - 1 for k in data["users"]))


@dataclass(frozen=True)
class DemandProfile:
    """
    요청 벡터와 그룹 구조

    user_order[p] 는 재배열 위치 p 의 원래 사용자 id 이다.
    그룹 G_i = user_order[S_{i-1}:S_i], 그룹 내부는 캐시 용량 오름차순.
    """
    demands: Tuple[int, ...]                # 원래 사용자 순서의 요청 파일 id (1-based)
    group_sizes: Tuple[int, ...]            # K_i, i = 1..N
    prefix_sums: Tuple[int, ...]            # S_0 = 0, ..., S_N = K
    user_order: Tuple[int, ...]             # 재배열 위치 -> 원래 사용자 id

    @property
    def num_files(self) -> int:
        return len(self.group_sizes)

    @property
    def num_users(self) -> int:
        return len(self.demands)

    @property
    def num_active_groups(self) -> int:
        """N′: 요청이 있는 파일 수"""
        return sum(1 for size in self.group_sizes if size > 0)

    def active_files(self) -> List[int]:
        return [i + 1 for i, size in enumerate(self.group_sizes) if size > 0]

    def group(self, file_id: int) -> Tuple[int, ...]:
        """파일 file_id 를 요청한 사용자들 (용량 오름차순, 원래 id)"""
        return self.user_order[self.prefix_sums[file_id - 1]:self.prefix_sums[file_id]]

    def leader(self, file_id: int) -> Optional[int]:
        members = self.group(file_id)
        return members[0] if members else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "demands": list(self.demands),
            "group_sizes": list(self.group_sizes),
            "prefix_sums": list(self.prefix_sums),
            "user_order": [k + 1 for k in self.user_order],
            "num_active_groups": self.num_active_groups,
        }


@dataclass(frozen=True, eq=False)
class Library:
    """서버 라이브러리: N개 파일 x F 비트"""
    files: np.ndarray                       # (N, F) uint8
    seed: int

    def file(self, file_id: int) -> np.ndarray:
        return self.files[file_id - 1]

    @property
    def file_size_bits(self) -> int:
        return self.files.shape[1]


@dataclass(frozen=True, eq=False)
class CachePlacement:
    """캐시 배치 Z_k: 사용자/파일별 캐시한 비트 위치"""
    config: SystemConfig
    cached_positions: Tuple[Tuple[np.ndarray, ...], ...]    # [k][i-1] 정렬된 비트 위치
    owner_masks: np.ndarray                                   # (N, F) int64, 비트를 캐시한 사용자 마스크
    rng_seed: int
    mode: PlacementMode = PlacementMode.EXACT

    def cached(self, user_id: int, file_id: int) -> np.ndarray:
        return self.cached_positions[user_id][file_id - 1]

    def cache_size_bits(self, user_id: int) -> int:
        return sum(len(p) for p in self.cached_positions[user_id])


@dataclass(frozen=True, eq=False)
class SubfilePartition:
    """파일별 배타적 서브파일 분할 W_{i,V} (비어 있지 않은 것만 보관)"""
    file_size_bits: int
    subfiles: Dict[SubfileIndex, np.ndarray]

    def positions(self, index: SubfileIndex) -> np.ndarray:
        found = self.subfiles.get(index)
        if found is None:
            return np.empty(0, dtype=np.int64)
        return found

    def size(self, index: SubfileIndex) -> int:
        found = self.subfiles.get(index)
        return 0 if found is None else len(found)

    def nonempty(self, file_id: Optional[int] = None) -> Iterator[SubfileIndex]:
        for index in sorted(self.subfiles):
            if file_id is None or index.file_id == file_id:
                yield index

    def __len__(self) -> int:
        return len(self.subfiles)

    def __contains__(self, index: SubfileIndex) -> bool:
        return index in self.subfiles


@dataclass(frozen=True)
class RandomCombo:
    """RANDOM DELIVERY 조합 기술자 (복호 측에서 계수 행렬 재생성용)"""
    file_id: int
    num_combinations: int
    coefficient_seed: int
    users: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "file_id": self.file_id,
            "num_combinations": self.num_combinations,
            "coefficient_seed": self.coefficient_seed,
            "users": [k + 1 for k in self.users],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RandomCombo":
        return cls(
            file_id=int(data["file_id"]),
            num_combinations=int(data["num_combinations"]),
            coefficient_seed=int(data["coefficient_seed"]),
            users=tuple(k - 1 for k in data["users"]),
        )


@dataclass(frozen=True, eq=False)
class DeliverySegment:
    """전송 세그먼트"""
    part_tag: PartTag
    payload: np.ndarray                     # uint8 비트 배열
    bit_length: int
    provenance: Tuple[SubfileIndex, ...] = ()
    combo: Optional[RandomCombo] = None

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "part_tag": self.part_tag.value,
            "bit_length": self.bit_length,
            "provenance": [index.to_dict() for index in self.provenance],
        }
        if self.combo is not None:
            data["combo"] = self.combo.to_dict()
        return data


@dataclass
class DeliveryTranscript:
    """공유 링크로 전송되는 메시지 X"""
    segments: List[DeliverySegment]
    file_size_bits: int
    slack_bits: int = 0                     # RD 여유 조합 총합 (별도 보고)

    @property
    def total_bits(self) -> int:
        return sum(s.bit_length for s in self.segments)

    @property
    def normalized_rate(self) -> Fraction:
        return Fraction(self.total_bits, self.file_size_bits)

    @property
    def payload_rate(self) -> Fraction:
        """여유 조합을 제외한 정규화 전송률"""
        return Fraction(self.total_bits - self.slack_bits, self.file_size_bits)

    def bits_by_part(self) -> Dict[PartTag, int]:
        counts: Dict[PartTag, int] = {}
        for segment in self.segments:
            counts[segment.part_tag] = counts.get(segment.part_tag, 0) + segment.bit_length
        return counts

    def segments_by_part(self, *tags: PartTag) -> List[DeliverySegment]:
        return [s for s in self.segments if s.part_tag in tags]

    def without(self, position: int) -> "DeliveryTranscript":
        """position 번째 세그먼트를 뺀 사본"""
        remaining = self.segments[:position] + self.segments[position + 1:]
        return DeliveryTranscript(remaining, self.file_size_bits, self.slack_bits)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "file_size_bits": self.file_size_bits,
            "slack_bits": self.slack_bits,
            "total_bits": self.total_bits,
            "normalized_rate": format_decimal(self.normalized_rate),
            "segments": [s.to_dict() for s in self.segments],
        }


@dataclass(frozen=True)
class LowerBoundWitness:
    """하한 최댓값을 달성한 (s, l, γ)"""
    s: int
    l: int
    gamma: int

    def to_dict(self) -> Dict[str, int]:
        return {"s": self.s, "l": self.l, "gamma": self.gamma}


@dataclass(frozen=True)
class PartRates:
    """요청 벡터별 파트 단위 기대 전송률 (정확한 유리수)"""
    part1: Fraction
    part2_1: Fraction
    part2_2: Fraction
    part3: Fraction
    random: Fraction

    @property
    def part2(self) -> Fraction:
        return self.part2_1 + self.part2_2

    @property
    def coded(self) -> Fraction:
        return self.part1 + self.part2_1 + self.part2_2 + self.part3

    @property
    def achievable(self) -> Fraction:
        return min(self.coded, self.random)

    def to_dict(self) -> Dict[str, str]:
        return {
            "part1": format_rational(self.part1),
            "part2_1": format_rational(self.part2_1),
            "part2_2": format_rational(self.part2_2),
            "part3": format_rational(self.part3),
            "coded": format_rational(self.coded),
            "random": format_rational(self.random),
        }


RATE_FIELDS = (
    "r_cd",
    "r_rd",
    "r_gbd",
    "r_baseline",
    "r_uncoded",
    "delta_r1",
    "delta_r2",
    "lower_bound_new",
    "lower_bound_cut_set",
)


@dataclass(frozen=True)
class RateReport:
    """한 설정에 대한 모든 해석적 전송률/하한 (정확한 유리수)"""
    r_cd: Fraction
    r_rd: Fraction
    r_gbd: Fraction
    r_baseline: Fraction
    r_uncoded: Fraction
    delta_r1: Fraction
    delta_r2: Fraction
    lower_bound_new: Fraction
    lower_bound_cut_set: Fraction
    argmax_witness: Optional[LowerBoundWitness]
    gamma_convention: GammaConvention = GammaConvention.FLOOR

    @property
    def reduction(self) -> Fraction:
        """기준 대비 전송률 감소 비율"""
        if self.r_baseline == 0:
            return Fraction(0)
        return 1 - self.r_gbd / self.r_baseline

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            name: {
                "decimal": format_decimal(getattr(self, name)),
                "exact": format_rational(getattr(self, name)),
            }
            for name in RATE_FIELDS
        }
        data["argmax_witness"] = (
            None if self.argmax_witness is None else self.argmax_witness.to_dict()
        )
        data["gamma_convention"] = self.gamma_convention.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RateReport":
        values = {name: parse_rational(data[name]["exact"]) for name in RATE_FIELDS}
        witness = data.get("argmax_witness")
        return cls(
            **values,
            argmax_witness=None if witness is None else LowerBoundWitness(**witness),
            gamma_convention=GammaConvention.parse(data.get("gamma_convention", "floor")),
        )


@dataclass
class UserVerification:
    """사용자별 복호 검증 결과"""
    user_id: int
    decoded: bool
    mismatched_bits: int
    segments_consumed: int
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "user": self.user_id + 1,
            "decoded": self.decoded,
            "mismatched_bits": self.mismatched_bits,
            "segments_consumed": self.segments_consumed,
        }
        if self.error:
            data["error"] = self.error
        return data


@dataclass
class ValidationReport:
    """Monte-Carlo 검증 요약"""
    config: Dict[str, Any]
    demands: Tuple[int, ...]
    delivery: str
    trials: int
    file_size_bits: int
    seeds: List[int] = field(default_factory=list)
    expected_rate: Fraction = Fraction(0)
    measured_rates: List[Fraction] = field(default_factory=list)
    part_bits: Dict[str, List[int]] = field(default_factory=dict)
    decodes_ok: int = 0
    decodes_expected: int = 0
    tolerance: Fraction = Fraction(2, 100)   # 평균 전송률 상대 오차 허용치

    @property
    def mean_rate(self) -> Fraction:
        if not self.measured_rates:
            return Fraction(0)
        return sum(self.measured_rates, Fraction(0)) / len(self.measured_rates)

    def _relative(self, value: Fraction) -> float:
        if self.expected_rate == 0:
            return 0.0 if value == 0 else float("inf")
        return float(abs(value - self.expected_rate) / self.expected_rate)

    @property
    def mean_rate_deviation(self) -> float:
        """시행 평균 전송률의 상대 오차"""
        return self._relative(self.mean_rate)

    @property
    def mean_relative_deviation(self) -> float:
        if not self.measured_rates:
            return 0.0
        return sum(self._relative(r) for r in self.measured_rates) / len(self.measured_rates)

    @property
    def max_relative_deviation(self) -> float:
        return max((self._relative(r) for r in self.measured_rates), default=0.0)

    def mean_part_rate(self, *tags: PartTag) -> Fraction:
        """지정 파트들의 시행 평균 비트 수 / F"""
        if not self.trials:
            return Fraction(0)
        total = sum(sum(self.part_bits.get(t.value, [])) for t in tags)
        return Fraction(total, self.trials * self.file_size_bits)

    @property
    def passed(self) -> bool:
        return self.decodes_ok == self.decodes_expected

    @property
    def within_tolerance(self) -> bool:
        return self.mean_rate_deviation <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "demands": list(self.demands),
            "delivery": self.delivery,
            "trials": self.trials,
            "file_size_bits": self.file_size_bits,
            "seeds": list(self.seeds),
            "expected_rate": format_decimal(self.expected_rate),
            "mean_rate": format_decimal(self.mean_rate),
            "mean_rate_deviation": round(self.mean_rate_deviation, 6),
            "mean_relative_deviation": round(self.mean_relative_deviation, 6),
            "max_relative_deviation": round(self.max_relative_deviation, 6),
            "tolerance": format_rational(self.tolerance),
            "within_tolerance": self.within_tolerance,
            "decodes_ok": self.decodes_ok,
            "decodes_expected": self.decodes_expected,
        }
