"""
전송 단계 (Delivery)
- CODED DELIVERY: 그룹 기반 체인/페어링 + |V| >= 3 XOR
- RANDOM DELIVERY: 그룹별 GF(2) 랜덤 선형 조합
- BASELINE: 비어 있지 않은 모든 V 에 대한 XOR (비교 기준)
"""

import logging
import math
from itertools import combinations
from typing import Dict, List, Optional, Sequence

import numpy as np

from engine import gf2
from engine.config import PartTag, SystemConfig
from engine.exceptions import ConfigError, EmptyArgumentError, InsufficientCombinationsError
from engine.models import (
    CachePlacement,
    DeliverySegment,
    DeliveryTranscript,
    DemandProfile,
    Library,
    RandomCombo,
    SubfileIndex,
    SubfilePartition,
    mask_users,
)
from engine.placement import partition_subfiles

logger = logging.getLogger(__name__)

DELIVERY_KINDS = ("coded", "random", "baseline")


def padded_xor(arrays: Sequence) -> np.ndarray:
    """
    zero-padding 후 XOR (⊕̄)

    결과 길이는 가장 긴 인자의 길이이며, 짧은 인자는 뒤쪽이 0으로 채워진다.
    """
    if len(arrays) == 0:
        raise EmptyArgumentError("padded XOR needs at least one argument")
    arrays = [np.asarray(a, dtype=np.uint8) for a in arrays]
    out = np.zeros(max(len(a) for a in arrays), dtype=np.uint8)
    for a in arrays:
        out[:len(a)] ^= a
    return out


class _SegmentBuilder:
    """서브파일 인자 목록 -> DeliverySegment"""

    def __init__(self, library: Library, partition: SubfilePartition):
        self.library = library
        self.partition = partition
        self.segments: List[DeliverySegment] = []

    def bits(self, index: SubfileIndex) -> np.ndarray:
        return self.library.file(index.file_id)[self.partition.positions(index)]

    def emit(self, tag: PartTag, indices: Sequence[SubfileIndex]) -> None:
        payloads = [self.bits(index) for index in indices]
        length = max(len(p) for p in payloads)
        if length == 0:
            return
        payload = padded_xor(payloads)
        payload.setflags(write=False)
        self.segments.append(DeliverySegment(tag, payload, length, tuple(indices)))


def _singleton(file_id: int, user_id: int) -> SubfileIndex:
    return SubfileIndex(file_id, 1 << user_id)


def _chain(builder: _SegmentBuilder, tag: PartTag, file_id: int, members: Sequence[int]) -> None:
    for a, b in zip(members, members[1:]):
        builder.emit(tag, [_singleton(file_id, a), _singleton(file_id, b)])


def _demanded_supersets(partition: SubfilePartition, profile: DemandProfile, min_size: int) -> set:
    """
    인자 중 하나 이상이 비어 있지 않은 사용자 집합 V (|V| >= min_size)

    W_{i,U} 가 비어 있지 않으면 U 밖에서 파일 i 를 요청한 사용자 v 마다 V = U ∪ {v} 가 후보가 된다.
    """
    candidates = set()
    for index in partition.nonempty():
        if bin(index.user_subset).count("1") < min_size - 1:
            continue
        for v in profile.group(index.file_id):
            if not index.contains(v):
                candidates.add(index.user_subset | 1 << v)
    return candidates


def _subset_segment_args(profile: DemandProfile, subset: int, positions: Dict[int, int]) -> List[SubfileIndex]:
    members = sorted(mask_users(subset), key=positions.__getitem__)
    return [SubfileIndex(profile.demands[v], subset & ~(1 << v)) for v in members]


def coded_delivery_hetero(
    library: Library,
    placement: CachePlacement,
    profile: DemandProfile,
    partition: Optional[SubfilePartition] = None,
) -> DeliveryTranscript:
    """
    이종 캐시 용량 CODED DELIVERY

    세그먼트 순서: 파트별로 그룹은 파일 id 오름차순, Part 3 의 V 는 재배열 비트마스크 오름차순.
    모든 인자가 빈 세그먼트는 생략된다.
    """
    partition = partition or partition_subfiles(placement)
    builder = _SegmentBuilder(library, partition)
    active = profile.active_files()

    # Part 1: 아무도 캐시하지 않은 비트 (그룹 리더 기준)
    for i in active:
        builder.emit(PartTag.P1, [SubfileIndex(i, 0)])

    # Part 2.1: 그룹 내부 체인
    for i in active:
        _chain(builder, PartTag.P2_1, i, profile.group(i))

    # Part 2.2: 그룹 쌍마다 교차 체인 2개 + 리더 페어링 1개
    for i, j in combinations(active, 2):
        group_i, group_j = profile.group(i), profile.group(j)
        _chain(builder, PartTag.P2_2, i, group_j)
        _chain(builder, PartTag.P2_2, j, group_i)
        builder.emit(PartTag.P2_2, [_singleton(i, group_j[0]), _singleton(j, group_i[0])])

    # Part 3: |V| >= 3
    positions = {user: p for p, user in enumerate(profile.user_order)}

    def relabeled(subset: int) -> int:
        return sum(1 << positions[v] for v in mask_users(subset))

    for subset in sorted(_demanded_supersets(partition, profile, 3), key=relabeled):
        builder.emit(PartTag.P3, _subset_segment_args(profile, subset, positions))

    return DeliveryTranscript(builder.segments, library.file_size_bits)


def coded_delivery_uniform(
    library: Library,
    placement: CachePlacement,
    profile: DemandProfile,
    partition: Optional[SubfilePartition] = None,
) -> DeliveryTranscript:
    """
    균일 캐시 용량 CODED DELIVERY

    기대 길이가 모두 같아 padding 이 점근적으로 의미가 없으므로 이종 절차와 동일한 전송을 만든다.
    """
    if not placement.config.is_uniform:
        raise ConfigError("uniform coded delivery requires equal cache capacities")
    return coded_delivery_hetero(library, placement, profile, partition)


def baseline_delivery(
    library: Library,
    placement: CachePlacement,
    profile: DemandProfile,
    partition: Optional[SubfilePartition] = None,
) -> DeliveryTranscript:
    """기준 디센트럴라이즈드 전송: 비어 있지 않은 모든 V 에 대해 ⊕̄_{v∈V} W_{d_v, V\\{v}}"""
    partition = partition or partition_subfiles(placement)
    builder = _SegmentBuilder(library, partition)
    positions = {user: p for p, user in enumerate(profile.user_order)}
    candidates = _demanded_supersets(partition, profile, 1)
    for subset in sorted(candidates, key=lambda s: (bin(s).count("1"), s)):
        builder.emit(PartTag.BL, _subset_segment_args(profile, subset, positions))
    return DeliveryTranscript(builder.segments, library.file_size_bits)


def random_delivery(
    library: Library,
    placement: CachePlacement,
    profile: DemandProfile,
    slack_bits: int = 32,
    max_file_bits: int = 2 ** 14,
) -> DeliveryTranscript:
    """
    RANDOM DELIVERY

    그룹 G_i 마다 파일 i 의 F 비트에 대한 T_i 개의 랜덤 GF(2) 조합을 전송한다.
    T_i = ceil((1 - M_min(G_i)/N) F) + slack_bits. BERNOULLI 배치에서 미지 비트가 더 많은
    구성원이 있으면 그 수를 기준으로 늘린다.
    각 구성원의 미지 비트 열에 대한 랭크로 복호 가능성을 검증한다.

    Raises:
        InsufficientCombinationsError: 랭크 부족 사용자
    """
    config: SystemConfig = placement.config
    num_bits = config.file_size_bits
    if num_bits > max_file_bits:
        raise ConfigError(f"random delivery is rank-checked only for F <= {max_file_bits}, got {num_bits}")

    segments: List[DeliverySegment] = []
    everything = np.arange(num_bits, dtype=np.int64)
    for i in profile.active_files():
        members = profile.group(i)
        unknown = {k: np.setdiff1d(everything, placement.cached(k, i), assume_unique=True) for k in members}
        smallest = min(config.cache_capacities[k] for k in members)
        base = math.ceil((1 - smallest / config.num_files) * num_bits)
        widest = max(len(u) for u in unknown.values())
        if widest > base:
            logger.debug("RD file %d: %d unknown bits exceed ceil((1-M/N)F)=%d", i, widest, base)
        rows = max(base, widest) + slack_bits
        coefficients = gf2.random_coefficients(placement.rng_seed, i, rows, num_bits)

        certified: Dict[bytes, int] = {}
        for k in members:
            key = unknown[k].tobytes()
            if key not in certified:
                restricted = gf2.select_columns(coefficients, num_bits, unknown[k])
                certified[key] = gf2.rank(restricted, len(unknown[k]))
            if certified[key] < len(unknown[k]):
                raise InsufficientCombinationsError(k, i, certified[key], len(unknown[k]))

        payload = gf2.combine(coefficients, library.file(i))
        payload.setflags(write=False)
        combo = RandomCombo(file_id=i, num_combinations=rows, coefficient_seed=placement.rng_seed, users=members)
        segments.append(DeliverySegment(PartTag.RD, payload, rows, (), combo))
        logger.debug("RD file %d: T=%d (slack %d) for users %s", i, rows, slack_bits, [k + 1 for k in members])

    slack_total = slack_bits * len(segments)
    return DeliveryTranscript(segments, num_bits, slack_bits=slack_total)


def run_delivery(
    kind: str,
    library: Library,
    placement: CachePlacement,
    profile: DemandProfile,
    partition: Optional[SubfilePartition] = None,
    slack_bits: int = 32,
    max_file_bits: int = 2 ** 14,
) -> DeliveryTranscript:
    """전송 절차 선택 실행 (coded / random / baseline)"""
    if kind == "coded":
        return coded_delivery_hetero(library, placement, profile, partition)
    if kind == "baseline":
        return baseline_delivery(library, placement, profile, partition)
    if kind == "random":
        return random_delivery(library, placement, profile, slack_bits, max_file_bits)
    raise ConfigError(f"unknown delivery procedure: {kind!r} (expected one of {DELIVERY_KINDS})")
