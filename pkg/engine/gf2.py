"""
GF(2) 선형대수 (비트 패킹)
- 행 하나를 uint64 워드 배열로 패킹: 열 j 는 워드 j // 64 의 비트 j % 64
- RANDOM DELIVERY 계수 행렬 생성, 패리티 결합, 랭크 판정, 소거법 복호
"""

from typing import List

import numpy as np

from engine.exceptions import SingularSystemError
from engine.placement import COMBINATION_STREAM, derived_rng

WORD = 64
ROW_CHUNK = 1024
_ONE = np.uint64(1)


def num_words(cols: int) -> int:
    return -(-cols // WORD)


def _bit(col: int) -> np.uint64:
    return _ONE << np.uint64(col % WORD)


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """(r, c) 0/1 행렬 -> (r, ceil(c/64)) uint64"""
    bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    rows, cols = bits.shape
    if cols == 0:
        return np.zeros((rows, 0), dtype=np.uint64)
    padded = np.zeros((rows, num_words(cols) * WORD), dtype=np.uint8)
    padded[:, :cols] = bits & 1
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64)


def unpack_rows(packed: np.ndarray, cols: int) -> np.ndarray:
    """pack_rows 의 역변환 (r, cols) uint8"""
    if cols == 0:
        return np.zeros((packed.shape[0], 0), dtype=np.uint8)
    packed = np.ascontiguousarray(packed, dtype=np.uint64)
    return np.unpackbits(packed.view(np.uint8), axis=1, count=cols, bitorder="little")


def random_coefficients(seed: int, file_id: int, rows: int, cols: int) -> np.ndarray:
    """파일별 시드 고정 균등 GF(2) 계수 행렬 (패킹된 rows x cols)"""
    rng = derived_rng(seed, COMBINATION_STREAM, file_id)
    packed = rng.integers(
        0, np.iinfo(np.uint64).max, size=(rows, num_words(cols)), dtype=np.uint64, endpoint=True
    )
    if cols % WORD:
        packed[:, -1] &= _bit(cols) - _ONE
    return packed


def select_columns(packed: np.ndarray, cols: int, columns: np.ndarray) -> np.ndarray:
    """열 부분행렬 (패킹 유지, 행 블록 단위로 풀어서 선택)"""
    out = np.zeros((packed.shape[0], num_words(len(columns))), dtype=np.uint64)
    for start in range(0, packed.shape[0], ROW_CHUNK):
        block = unpack_rows(packed[start:start + ROW_CHUNK], cols)
        out[start:start + ROW_CHUNK] = pack_rows(block[:, columns])
    return out


def _parity(words: np.ndarray) -> np.ndarray:
    folded = words.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        folded ^= folded >> np.uint64(shift)
    return (folded & _ONE).astype(np.uint8)


def combine(packed: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """C @ w mod 2 (행마다 AND 후 패리티)"""
    result = np.zeros(packed.shape[0], dtype=np.uint8)
    if packed.shape[0] == 0 or len(bits) == 0:
        return result
    vector = pack_rows(bits)[0]
    for start in range(0, packed.shape[0], ROW_CHUNK):
        block = packed[start:start + ROW_CHUNK] & vector
        result[start:start + ROW_CHUNK] = _parity(np.bitwise_xor.reduce(block, axis=1))
    return result


def _eliminate(work: np.ndarray, cols: int, full: bool) -> List[int]:
    """
    제자리 가우스 소거

    Args:
        work: 패킹된 행렬 (수정됨)
        cols: 소거할 앞쪽 열 수
        full: True 면 피벗 위쪽 행도 소거 (기약 행사다리꼴)

    Returns:
        피벗 열 목록 (피벗 행 i 의 피벗이 pivots[i])
    """
    rows = work.shape[0]
    pivots: List[int] = []
    r = 0
    for col in range(cols):
        if r == rows:
            break
        word, mask = col // WORD, _bit(col)
        hits = np.flatnonzero(work[r:, word] & mask)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        scope = work[:, word] if full else work[r + 1:, word]
        others = np.flatnonzero(scope & mask)
        if full:
            others = others[others != r]
        else:
            others = others + r + 1
        if others.size:
            work[others, word:] ^= work[r, word:]
        pivots.append(col)
        r += 1
    return pivots


def rank(packed: np.ndarray, cols: int) -> int:
    if packed.size == 0 or cols == 0:
        return 0
    return len(_eliminate(packed.copy(), cols, full=False))


def solve(packed: np.ndarray, cols: int, rhs: np.ndarray) -> np.ndarray:
    """
    열 full rank 인 A x = y 를 GF(2) 에서 풀기

    Args:
        packed: 패킹된 (T, cols) 계수 행렬, T >= cols
        cols: 미지수 수
        rhs: 길이 T 비트 벡터

    Returns:
        길이 cols 비트 벡터 x
    """
    rows = packed.shape[0]
    if cols == 0:
        return np.zeros(0, dtype=np.uint8)
    if rows < cols:
        raise SingularSystemError(f"{rows} equations for {cols} unknowns")

    augmented = np.zeros((rows, num_words(cols + 1)), dtype=np.uint64)
    augmented[:, :packed.shape[1]] = packed
    augmented[:, cols // WORD] |= np.asarray(rhs, dtype=np.uint64) << np.uint64(cols % WORD)

    pivots = _eliminate(augmented, cols, full=True)
    if len(pivots) < cols:
        raise SingularSystemError(f"coefficient matrix has rank {len(pivots)} < {cols}")
    column = augmented[:cols, cols // WORD] >> np.uint64(cols % WORD)
    return (column & _ONE).astype(np.uint8)
