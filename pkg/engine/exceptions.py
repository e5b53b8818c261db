"""
cachelab 예외 정의
"""

from typing import Optional


class CacheLabError(Exception):
    """cachelab 공통 예외"""


class ConfigError(CacheLabError, ValueError):
    """잘못된 시스템 설정 (N, K, F, 캐시 용량, 요청 벡터)"""


class EmptyArgumentError(CacheLabError, ValueError):
    """padded XOR 인자가 비어 있음"""


class UndecodableSegmentError(CacheLabError):
    """고정점 복호 후에도 필요한 서브파일이 남아 있음 (전송 측 버그 신호)"""

    def __init__(self, user_id: int, index, message: Optional[str] = None):
        self.user_id = user_id
        self.index = index
        super().__init__(
            message or f"undecodable segment: user {user_id + 1} cannot resolve {index.label()}"
        )


class InsufficientCombinationsError(CacheLabError):
    """RANDOM DELIVERY 조합 행렬이 사용자 미지 비트에 대해 full rank 가 아님"""

    def __init__(self, user_id: int, file_id: int, rank: int, needed: int):
        self.user_id = user_id
        self.file_id = file_id
        self.rank = rank
        self.needed = needed
        super().__init__(
            f"insufficient combinations: user {user_id + 1} on file {file_id} "
            f"has rank {rank} < {needed}"
        )


class SingularSystemError(CacheLabError, ArithmeticError):
    """GF(2) 연립방정식 해를 구할 수 없음"""


class ValidationAbortedError(CacheLabError):
    """Monte-Carlo 검증 중 복호 실패"""

    def __init__(self, seed: int, user_id: int, reason: str):
        self.seed = seed
        self.user_id = user_id
        super().__init__(f"validation aborted at seed {seed}, user {user_id + 1}: {reason}")


class StoreCorruptedError(CacheLabError):
    """결과 저장소 라인 파싱 실패"""

    def __init__(self, path: str, line_number: int, reason: str):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}: line {line_number} is corrupted ({reason})")


class SweepSpecError(CacheLabError, ValueError):
    """잘못된 스윕 명세"""
