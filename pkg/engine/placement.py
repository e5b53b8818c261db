"""
디센트럴라이즈드 캐시 배치 (Placement)
- 라이브러리 생성, 사용자별 캐시 배치, 요청 그룹화, 배타적 서브파일 분할
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from engine.config import MAX_PARTITION_USERS, PlacementMode, SystemConfig
from engine.exceptions import ConfigError
from engine.models import CachePlacement, DemandProfile, Library, SubfileIndex, SubfilePartition

logger = logging.getLogger(__name__)

# 난수 스트림 네임스페이스 (SeedSequence spawn_key 첫 원소)
LIBRARY_STREAM = 0
PLACEMENT_STREAM = 1
COMBINATION_STREAM = 2


def derived_rng(seed: int, *key: int) -> np.random.Generator:
    """루트 시드에서 카운터 기반(Philox) 독립 스트림 생성"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


# === 요청 그룹화 ===

def build_demand_profile(config: SystemConfig, demands: Sequence[int]) -> DemandProfile:
    """
    요청 벡터로부터 그룹 구조 생성

    Args:
        config: 시스템 설정
        demands: 원래 사용자 순서의 요청 파일 id (1-based)

    Returns:
        DemandProfile (그룹은 파일 id 순, 그룹 내부는 (M_k, k) 오름차순)
    """
    demands = tuple(int(d) for d in demands)
    if len(demands) != config.num_users:
        raise ConfigError(f"expected {config.num_users} demands, got {len(demands)}")
    for k, d in enumerate(demands):
        if not 1 <= d <= config.num_files:
            raise ConfigError(f"demand id out of range: user {k + 1} requests file {d}")

    groups = [[] for _ in range(config.num_files)]
    for k in config.capacity_order():
        groups[demands[k] - 1].append(k)

    sizes = tuple(len(g) for g in groups)
    prefix = [0]
    for size in sizes:
        prefix.append(prefix[-1] + size)
    order = tuple(k for g in groups for k in g)

    return DemandProfile(
        demands=demands,
        group_sizes=sizes,
        prefix_sums=tuple(prefix),
        user_order=order,
    )


def worst_case_demands(config: SystemConfig) -> DemandProfile:
    """
    최악 요청 벡터

    캐시가 가장 작은 min(N, K)명이 서로 다른 파일을 요청하고,
    나머지 사용자는 그룹에 라운드 로빈으로 배정된다.
    """
    demands = [0] * config.num_users
    for rank, k in enumerate(config.capacity_order()):
        demands[k] = rank % config.num_files + 1
    return build_demand_profile(config, demands)


def resolve_demands(config: SystemConfig) -> DemandProfile:
    """설정에 명시된 요청 벡터가 있으면 사용, 없으면 최악 요청"""
    if config.demands is not None:
        return build_demand_profile(config, config.demands)
    return worst_case_demands(config)


# === 라이브러리/캐시 배치 ===

def generate_library(config: SystemConfig, seed: Optional[int] = None) -> Library:
    """N개 파일의 균등 난수 비트 생성"""
    seed = config.seed if seed is None else seed
    files = np.empty((config.num_files, config.file_size_bits), dtype=np.uint8)
    for i in range(config.num_files):
        rng = derived_rng(seed, LIBRARY_STREAM, i)
        files[i] = rng.integers(0, 2, size=config.file_size_bits, dtype=np.uint8)
    files.setflags(write=False)
    return Library(files=files, seed=seed)


def place_caches(
    config: SystemConfig,
    mode: PlacementMode = PlacementMode.EXACT,
    seed: Optional[int] = None,
    max_users: int = MAX_PARTITION_USERS,
) -> CachePlacement:
    """
    사용자별 캐시 배치

    EXACT 모드는 파일마다 정확히 round(M_k F / N) 개의 비트 위치를 균등 추출하고,
    BERNOULLI 모드는 각 비트를 확률 M_k / N 로 독립 선택한다.
    (사용자, 파일) 쌍마다 독립 스트림을 쓰므로 배치 순서와 무관하게 재현된다.
    """
    if config.num_users > min(max_users, MAX_PARTITION_USERS):
        raise ConfigError(
            f"bit-level placement supports K <= {min(max_users, MAX_PARTITION_USERS)}, got {config.num_users}"
        )
    seed = config.seed if seed is None else seed
    num_bits = config.file_size_bits
    owner_masks = np.zeros((config.num_files, num_bits), dtype=np.int64)

    positions = []
    for k in range(config.num_users):
        per_file = []
        target = config.cached_bits_per_file(k)
        probability = float(config.cache_capacities[k] / config.num_files)
        for i in range(config.num_files):
            rng = derived_rng(seed, PLACEMENT_STREAM, k, i)
            if mode is PlacementMode.EXACT:
                chosen = np.sort(rng.choice(num_bits, size=target, replace=False))
            else:
                chosen = np.flatnonzero(rng.random(num_bits) < probability)
            chosen = chosen.astype(np.int64)
            chosen.setflags(write=False)
            owner_masks[i, chosen] |= np.int64(1) << k
            per_file.append(chosen)
        positions.append(tuple(per_file))

    owner_masks.setflags(write=False)
    logger.debug(
        "placed caches: N=%d K=%d F=%d seed=%d mode=%s",
        config.num_files, config.num_users, num_bits, seed, mode.value,
    )
    return CachePlacement(
        config=config,
        cached_positions=tuple(positions),
        owner_masks=owner_masks,
        rng_seed=seed,
        mode=mode,
    )


def partition_subfiles(placement: CachePlacement) -> SubfilePartition:
    """
    배타적 서브파일 분할 W_{i,V}

    Returns:
        비어 있지 않은 서브파일만 담은 SubfilePartition (비트 위치 오름차순)
    """
    subfiles: Dict[SubfileIndex, np.ndarray] = {}
    for row, masks in enumerate(placement.owner_masks):
        order = np.argsort(masks, kind="stable")
        values, starts = np.unique(masks[order], return_index=True)
        for mask, chunk in zip(values, np.split(order, starts[1:])):
            chunk = chunk.astype(np.int64)
            chunk.setflags(write=False)
            subfiles[SubfileIndex(row + 1, int(mask))] = chunk
    return SubfilePartition(file_size_bits=placement.config.file_size_bits, subfiles=subfiles)


def cache_contents(
    placement: CachePlacement, library: Library, user_id: int
) -> Dict[int, Tuple[np.ndarray, np.ndarray]]:
    """사용자 캐시 Z_k: 파일 id -> (비트 위치, 비트 값)"""
    contents = {}
    for i in range(1, placement.config.num_files + 1):
        positions = placement.cached(user_id, i)
        contents[i] = (positions, library.file(i)[positions])
    return contents
