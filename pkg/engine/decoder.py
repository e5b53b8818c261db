"""
사용자 측 복호 (Decoder)
- CODED/BASELINE 전송: 고정점 제약 전파 (세그먼트 순서와 무관)
- RANDOM DELIVERY: GF(2) 소거법
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from engine import gf2
from engine.config import PartTag
from engine.delivery import padded_xor
from engine.exceptions import CacheLabError, SingularSystemError, UndecodableSegmentError
from engine.models import (
    CachePlacement,
    DeliverySegment,
    DeliveryTranscript,
    DemandProfile,
    Library,
    SubfileIndex,
    SubfilePartition,
    UserVerification,
)
from engine.placement import partition_subfiles

logger = logging.getLogger(__name__)

MINIMAL_PARTS = (PartTag.P1, PartTag.P2_1, PartTag.P2_2)


@dataclass
class DecodeState:
    """사용자의 복호 진행 상태 (알고 있는 서브파일은 늘어나기만 한다)"""
    user_id: int
    partition: SubfilePartition
    known: Dict[SubfileIndex, np.ndarray] = field(default_factory=dict)
    recovered: Optional[np.ndarray] = None
    segments_consumed: int = 0

    @classmethod
    def from_cache(
        cls, user_id: int, placement: CachePlacement, library: Library, partition: SubfilePartition
    ) -> "DecodeState":
        """캐시 Z_k 로 초기화: user_id 가 포함된 모든 W_{i,V}"""
        state = cls(user_id=user_id, partition=partition)
        num_bits = placement.config.file_size_bits
        for i in range(1, placement.config.num_files + 1):
            positions = placement.cached(user_id, i)
            view = np.zeros(num_bits, dtype=np.uint8)
            view[positions] = library.file(i)[positions]
            for index in partition.nonempty(i):
                if index.contains(user_id):
                    state.known[index] = view[partition.positions(index)]
        return state

    def knows(self, index: SubfileIndex) -> bool:
        return index in self.known or self.partition.size(index) == 0

    def value(self, index: SubfileIndex) -> np.ndarray:
        found = self.known.get(index)
        if found is None:
            return np.zeros(0, dtype=np.uint8)
        return found

    def learn(self, index: SubfileIndex, bits: np.ndarray) -> None:
        if index not in self.known:
            self.known[index] = bits


def _propagate(state: DecodeState, segments: List[DeliverySegment]) -> None:
    """미지 인자가 하나뿐인 세그먼트를 반복적으로 풀어 고정점까지 전파"""
    pending = [s for s in segments if s.combo is None]
    progress = True
    while progress and pending:
        progress = False
        remaining = []
        for segment in pending:
            unknown = [a for a in segment.provenance if not state.knows(a)]
            if not unknown:
                continue
            if len(unknown) > 1:
                remaining.append(segment)
                continue
            target = unknown[0]
            others = [state.value(a) for a in segment.provenance if a != target]
            bits = padded_xor([segment.payload, *others])[:state.partition.size(target)]
            state.learn(target, bits)
            state.segments_consumed += 1
            progress = True
        pending = remaining


def _decode_coded(
    user_id: int,
    placement: CachePlacement,
    transcript: DeliveryTranscript,
    profile: DemandProfile,
    library: Library,
    partition: SubfilePartition,
) -> DecodeState:
    state = DecodeState.from_cache(user_id, placement, library, partition)
    _propagate(state, transcript.segments)

    wanted = profile.demands[user_id]
    for index in partition.nonempty(wanted):
        if not state.knows(index):
            raise UndecodableSegmentError(user_id, index)

    recovered = np.zeros(placement.config.file_size_bits, dtype=np.uint8)
    for index in partition.nonempty(wanted):
        recovered[partition.positions(index)] = state.value(index)
    state.recovered = recovered
    return state


def decode_user(
    user_id: int,
    placement: CachePlacement,
    transcript: DeliveryTranscript,
    profile: DemandProfile,
    library: Library,
    partition: Optional[SubfilePartition] = None,
) -> np.ndarray:
    """
    CODED (또는 BASELINE) 전송으로부터 사용자의 요청 파일 복원

    기준 스케줄은 Part 1 직접 읽기 -> 자기 그룹 체인 -> 다른 그룹 체인과 페어링 -> Part 3 XOR 소거이지만,
    구현은 고정점 전파이므로 세그먼트 순서가 바뀌어도 복호된다.
    라이브러리는 사용자 캐시 위치의 비트를 읽는 데만 쓰인다.

    Raises:
        UndecodableSegmentError: 풀리지 않은 첫 번째 서브파일
    """
    partition = partition or partition_subfiles(placement)
    return _decode_coded(user_id, placement, transcript, profile, library, partition).recovered


def decode_random_delivery(
    user_id: int,
    placement: CachePlacement,
    transcript: DeliveryTranscript,
    profile: DemandProfile,
    library: Library,
) -> np.ndarray:
    """
    RANDOM DELIVERY 복호: 미지 비트 위치에 대한 GF(2) 연립방정식 풀이

    Raises:
        SingularSystemError: 해당 파일 조합이 없거나 계수 행렬이 특이
    """
    wanted = profile.demands[user_id]
    num_bits = placement.config.file_size_bits
    cached = placement.cached(user_id, wanted)
    known = np.zeros(num_bits, dtype=np.uint8)
    known[cached] = library.file(wanted)[cached]

    segment = next(
        (s for s in transcript.segments if s.combo is not None and s.combo.file_id == wanted), None
    )
    if segment is None:
        raise SingularSystemError(f"no random combinations of file {wanted} in transcript")

    combo = segment.combo
    coefficients = gf2.random_coefficients(combo.coefficient_seed, wanted, combo.num_combinations, num_bits)
    unknown = np.setdiff1d(np.arange(num_bits, dtype=np.int64), cached, assume_unique=True)

    rhs = segment.payload ^ gf2.combine(coefficients, known)
    restricted = gf2.select_columns(coefficients, num_bits, unknown)
    known[unknown] = gf2.solve(restricted, len(unknown), rhs)
    return known


def _is_random(transcript: DeliveryTranscript) -> bool:
    return any(s.combo is not None for s in transcript.segments)


def verify_transcript(
    placement: CachePlacement,
    transcript: DeliveryTranscript,
    profile: DemandProfile,
    library: Library,
    partition: Optional[SubfilePartition] = None,
) -> List[UserVerification]:
    """
    모든 사용자 복호 후 라이브러리와 비트 단위 비교

    Returns:
        사용자별 UserVerification (decoded, mismatched_bits, segments_consumed)
    """
    random_mode = _is_random(transcript)
    if not random_mode:
        partition = partition or partition_subfiles(placement)

    results = []
    num_bits = placement.config.file_size_bits
    for k in range(placement.config.num_users):
        truth = library.file(profile.demands[k])
        try:
            if random_mode:
                recovered = decode_random_delivery(k, placement, transcript, profile, library)
                consumed = 1
            else:
                state = _decode_coded(k, placement, transcript, profile, library, partition)
                recovered, consumed = state.recovered, state.segments_consumed
        except CacheLabError as e:
            logger.warning("user %d failed to decode: %s", k + 1, e)
            results.append(UserVerification(k, False, num_bits, 0, error=str(e)))
            continue
        mismatched = int(np.count_nonzero(recovered != truth))
        results.append(UserVerification(k, mismatched == 0, mismatched, consumed))
    return results


def minimality_check(
    placement: CachePlacement,
    transcript: DeliveryTranscript,
    profile: DemandProfile,
    library: Library,
    partition: Optional[SubfilePartition] = None,
) -> List[Tuple[int, DeliverySegment]]:
    """
    Part 1 / Part 2 세그먼트를 하나씩 지웠을 때 모든 사용자가 여전히 복호되는 경우를 찾기

    Returns:
        중복(redundant) 세그먼트의 (위치, 세그먼트) 목록. 빈 목록이면 최소 전송.
    """
    partition = partition or partition_subfiles(placement)
    redundant = []
    for position, segment in enumerate(transcript.segments):
        if segment.part_tag not in MINIMAL_PARTS:
            continue
        reduced = transcript.without(position)
        try:
            for k in range(placement.config.num_users):
                _decode_coded(k, placement, reduced, profile, library, partition)
        except UndecodableSegmentError:
            continue
        redundant.append((position, segment))
        logger.info("segment %d (%s) is redundant", position, segment.part_tag.value)
    return redundant
