"""
해석적 전송률/하한 계산기 (정확한 유리수)
- 그룹 기반 전송률 (CODED / RANDOM / 최소값), 기준 전송률, 비부호화 전송률
- 컷셋 하한, 새 하한 (γ floor/ceiling 규약)
- 요청 벡터별 파트 단위 기대 전송률, 서브파일 기대 비율

모든 공식은 용량 오름차순 M_1 <= ... <= M_K 를 가정하며 내부에서 정렬한다.
"""

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import List, NamedTuple, Optional, Tuple

from engine.config import GammaConvention, SystemConfig
from engine.exceptions import ConfigError
from engine.models import DemandProfile, LowerBoundWitness, PartRates, RateReport

logger = logging.getLogger(__name__)


class GBDRates(NamedTuple):
    r_cd: Fraction
    r_rd: Fraction
    r_gbd: Fraction


def _sorted(config: SystemConfig) -> List[Fraction]:
    return list(config.sorted_capacities())


def _miss_factors(config: SystemConfig) -> List[Fraction]:
    """정렬된 (1 - M_j / N)"""
    n = config.num_files
    return [1 - m / n for m in _sorted(config)]


def survival_product(config: SystemConfig) -> Fraction:
    """Π_l (1 - M_l / N): 아무도 캐시하지 않은 비트 비율"""
    product = Fraction(1)
    for factor in _miss_factors(config):
        product *= factor
    return product


def q_value(user_id: int, config: SystemConfig) -> Fraction:
    """
    Q_k = M_k / (N - M_k) · Π_l (1 - M_l / N)

    사용자 k 만 캐시한 비트의 기대 비율. user_id 는 0-based.
    """
    m = config.cache_capacities[user_id]
    if m >= config.num_files:
        raise ConfigError(f"user {user_id + 1}: Q undefined for M_k >= N")
    return m / (config.num_files - m) * survival_product(config)


def rate_baseline(config: SystemConfig) -> Fraction:
    """R_b = Σ_i Π_{j<=i} (1 - M_j / N)"""
    total = Fraction(0)
    running = Fraction(1)
    for factor in _miss_factors(config):
        running *= factor
        total += running
    return total


def delta_r1(config: SystemConfig) -> Fraction:
    """ΔR_1 = (K - N) · Π (1 - M_l / N), N >= K 이면 0"""
    n, k = config.num_files, config.num_users
    if n >= k:
        return Fraction(0)
    return (k - n) * survival_product(config)


def delta_r2(config: SystemConfig) -> Fraction:
    """ΔR_2 = [Σ_{k=1}^{K-N} (k-1) M_{k+N} / (N - M_{k+N})] · Π (1 - M_l / N), N >= K 이면 0"""
    n, k = config.num_files, config.num_users
    if n >= k:
        return Fraction(0)
    capacities = _sorted(config)
    weighted = sum(
        ((j - 1) * capacities[j + n - 1] / (n - capacities[j + n - 1]) for j in range(1, k - n + 1)),
        Fraction(0),
    )
    return weighted * survival_product(config)


def rate_coded(config: SystemConfig) -> Fraction:
    """최악 요청에서의 CODED DELIVERY 전송률 R_CD"""
    return rate_baseline(config) - delta_r1(config) - delta_r2(config)


def rate_random(config: SystemConfig) -> Fraction:
    """최악 요청에서의 RANDOM DELIVERY 전송률 R_RD (가장 작은 min(N,K)개 용량)"""
    limit = min(config.num_files, config.num_users)
    return sum(_miss_factors(config)[:limit], Fraction(0))


def rate_gbd(config: SystemConfig) -> GBDRates:
    """R_GBD = min(R_CD, R_RD)"""
    r_cd = rate_coded(config)
    r_rd = rate_random(config)
    return GBDRates(r_cd, r_rd, min(r_cd, r_rd))


def rate_uncoded(config: SystemConfig) -> Fraction:
    """비부호화 최악 전송률 Σ_{i<=min(N,K)} (1 - M_i / N)"""
    limit = min(config.num_files, config.num_users)
    return sum(_miss_factors(config)[:limit], Fraction(0))


def _uniform_pair_factor(K: int, M: Fraction, N: int) -> Fraction:
    p = Fraction(M) / N
    return p * (1 - p) ** (K - 1)


def rate_uniform_part2_gbd(n_prime: int, K: int, M, N: int) -> Fraction:
    """균일 용량 그룹 기반 Part 2: N′(K - (N′+1)/2)(M/N)(1 - M/N)^{K-1}"""
    if not 1 <= n_prime <= min(N, K):
        raise ConfigError(f"N′={n_prime} out of range [1:{min(N, K)}]")
    return n_prime * (K - Fraction(n_prime + 1, 2)) * _uniform_pair_factor(K, M, N)


def rate_uniform_part2_baseline(K: int, M, N: int) -> Fraction:
    """균일 용량 기준 Part 2: C(K,2)(M/N)(1 - M/N)^{K-1}"""
    return Fraction(K * (K - 1), 2) * _uniform_pair_factor(K, M, N)


def uniform_part_rates(N: int, K: int, M, n_prime: int) -> PartRates:
    """균일 용량에서 N′개 그룹 요청의 파트 단위 기대 전송률"""
    M = Fraction(M)
    miss = 1 - M / N
    q = _uniform_pair_factor(K, M, N)
    part2_total = rate_uniform_part2_gbd(n_prime, K, M, N)
    part2_1 = (K - n_prime) * q
    baseline = sum((miss ** i for i in range(1, K + 1)), Fraction(0))
    part3 = baseline - K * miss ** K - rate_uniform_part2_baseline(K, M, N)
    return PartRates(
        part1=n_prime * miss ** K,
        part2_1=part2_1,
        part2_2=part2_total - part2_1,
        part3=part3,
        random=n_prime * miss,
    )


def cut_set_bound(config: SystemConfig) -> Fraction:
    """컷셋 하한 max_{s<=min(N,K)} { s - Σ_{i<=s} M_i / ⌊N/s⌋ }, 0 에서 clamp"""
    capacities = _sorted(config)
    n = config.num_files
    best = Fraction(0)
    prefix = Fraction(0)
    for s in range(1, min(n, config.num_users) + 1):
        prefix += capacities[s - 1]
        best = max(best, s - prefix / (n // s))
    return best


def lower_bound_new(
    config: SystemConfig,
    gamma_convention: GammaConvention = GammaConvention.FLOOR,
) -> Tuple[Fraction, Optional[LowerBoundWitness]]:
    """
    새 하한: max_{s, l} (1/l){N - s/(s+γ) Σ_{i<=s+γ} M_i - γ(N - ls)^+/(s+γ) - (N - Kl)^+}

    s ∈ [1:K], l ∈ [1:⌈N/s⌉], γ = min((⌊N/l⌋ - s)^+, K - s) (ceiling 규약이면 ⌈N/l⌉).

    Returns:
        (0 에서 clamp 된 하한, 최댓값을 달성한 (s, l, γ))
    """
    gamma_convention = GammaConvention.parse(gamma_convention)
    n, k = config.num_files, config.num_users
    capacities = _sorted(config)
    prefix = [Fraction(0)]
    for m in capacities:
        prefix.append(prefix[-1] + m)

    best: Optional[Fraction] = None
    witness: Optional[LowerBoundWitness] = None
    for s in range(1, k + 1):
        for l in range(1, math.ceil(Fraction(n, s)) + 1):
            files_per_round = n // l if gamma_convention is GammaConvention.FLOOR else -(-n // l)
            gamma = min(max(files_per_round - s, 0), k - s)
            users = s + gamma
            if not 1 <= users <= k:
                logger.debug("skipping (s=%d, l=%d): s+γ=%d outside [1:%d]", s, l, users, k)
                continue
            value = (
                n
                - Fraction(s, users) * prefix[users]
                - Fraction(gamma * max(n - l * s, 0), users)
                - max(n - k * l, 0)
            ) / l
            if best is None or value > best:
                best, witness = value, LowerBoundWitness(s, l, gamma)

    if best is None:
        return Fraction(0), None
    return max(best, Fraction(0)), witness


def subfile_fraction(config: SystemConfig, user_subset: int) -> Fraction:
    """|W_{i,V}| / F 의 기대값 Π_{k∈V} (M_k/N) Π_{k∉V} (1 - M_k/N)"""
    n = config.num_files
    fraction = Fraction(1)
    for k, m in enumerate(config.cache_capacities):
        fraction *= m / n if user_subset >> k & 1 else 1 - m / n
    return fraction


def demand_rates(config: SystemConfig, profile: DemandProfile) -> PartRates:
    """
    임의 요청 벡터에 대한 CODED / RANDOM DELIVERY 파트별 기대 전송률

    체인의 ⊕̄ 길이는 용량이 큰 쪽 Q 가, Part 3 의 ⊕̄ 길이는 V 에서 용량이 가장 작은 사용자를 뺀
    서브파일이 결정한다. 따라서 Part 3 은 요청과 무관하게 R_b - K·P - Σ_b (b-1) Q_(b) 이다.
    """
    product = survival_product(config)
    q = [q_value(k, config) for k in range(config.num_users)]
    active = profile.active_files()

    def followers(file_id: int) -> Fraction:
        return sum((q[k] for k in profile.group(file_id)[1:]), Fraction(0))

    part2_1 = sum((followers(i) for i in active), Fraction(0))
    part2_2 = Fraction(0)
    for i, j in combinations(active, 2):
        part2_2 += followers(i) + followers(j) + max(q[profile.leader(i)], q[profile.leader(j)])

    ordered_q = sorted(q)
    part3 = (
        rate_baseline(config)
        - config.num_users * product
        - sum(((b - 1) * value for b, value in enumerate(ordered_q, start=1)), Fraction(0))
    )
    random = sum(
        (1 - config.cache_capacities[profile.leader(i)] / config.num_files for i in active),
        Fraction(0),
    )
    return PartRates(
        part1=len(active) * product,
        part2_1=part2_1,
        part2_2=part2_2,
        part3=part3,
        random=random,
    )


def rate_report(
    config: SystemConfig,
    gamma_convention: GammaConvention = GammaConvention.FLOOR,
) -> RateReport:
    """한 설정의 전체 RateReport"""
    gamma_convention = GammaConvention.parse(gamma_convention)
    gbd = rate_gbd(config)
    bound, witness = lower_bound_new(config, gamma_convention)
    return RateReport(
        r_cd=gbd.r_cd,
        r_rd=gbd.r_rd,
        r_gbd=gbd.r_gbd,
        r_baseline=rate_baseline(config),
        r_uncoded=rate_uncoded(config),
        delta_r1=delta_r1(config),
        delta_r2=delta_r2(config),
        lower_bound_new=bound,
        lower_bound_cut_set=cut_set_bound(config),
        argmax_witness=witness,
        gamma_convention=gamma_convention,
    )


class RateCalculator:
    """설정별 전송률 계산기"""

    def __init__(self, gamma_convention: GammaConvention = GammaConvention.FLOOR):
        self.gamma_convention = GammaConvention.parse(gamma_convention)

    def calculate(self, config: SystemConfig) -> RateReport:
        return rate_report(config, self.gamma_convention)

    def demand(self, config: SystemConfig, profile: DemandProfile) -> PartRates:
        return demand_rates(config, profile)
