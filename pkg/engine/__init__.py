"""
engine 패키지 초기화
이종 캐시 용량 디센트럴라이즈드 코디드 캐싱 시뮬레이터/해석 엔진
"""

from engine.config import GammaConvention, PartTag, PlacementMode, SimulationConfig, SystemConfig
from engine.models import (
    CachePlacement,
    DeliverySegment,
    DeliveryTranscript,
    DemandProfile,
    Library,
    LowerBoundWitness,
    PartRates,
    RateReport,
    SubfileIndex,
    SubfilePartition,
    ValidationReport,
)
from engine.store import ARTIFACT_VERSION as __version__

__all__ = [
    'SystemConfig',
    'SimulationConfig',
    'GammaConvention',
    'PartTag',
    'PlacementMode',
    'CachePlacement',
    'DeliverySegment',
    'DeliveryTranscript',
    'DemandProfile',
    'Library',
    'LowerBoundWitness',
    'PartRates',
    'RateReport',
    'SubfileIndex',
    'SubfilePartition',
    'ValidationReport',
]
