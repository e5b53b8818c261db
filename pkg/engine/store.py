"""
실행 결과 저장소 (JSON Lines, append-only)
- 설정 해시별 RateReport 기록
- 기준(첫 기록) 대비 필드 단위 회귀 비교
"""

import hashlib
import json
import logging
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional

from engine.config import SystemConfig, format_rational
from engine.exceptions import CacheLabError, StoreCorruptedError
from engine.models import RATE_FIELDS, RateReport

logger = logging.getLogger(__name__)

ARTIFACT_VERSION = "1.0.0"


def canonical_json(data: Any) -> str:
    """정렬된 키, 공백 없는 JSON"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: SystemConfig) -> str:
    """정규화된 설정 JSON 의 SHA-256"""
    payload = canonical_json(config.to_dict(include_demands=False))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunRecord:
    """저장소 한 줄"""
    config_hash: str
    config: Dict[str, Any]
    report: RateReport
    validation: Optional[Dict[str, Any]] = None
    timestamp: str = field(default_factory=_utc_now)
    artifact_version: str = ARTIFACT_VERSION

    @classmethod
    def create(
        cls,
        config: SystemConfig,
        report: RateReport,
        validation: Optional[Dict[str, Any]] = None,
    ) -> "RunRecord":
        return cls(
            config_hash=config_hash(config),
            config=config.to_dict(include_demands=False),
            report=report,
            validation=validation,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "config": self.config,
            "report": self.report.to_dict(),
            "validation": self.validation,
            "timestamp": self.timestamp,
            "artifact_version": self.artifact_version,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        return cls(
            config_hash=data["config_hash"],
            config=data["config"],
            report=RateReport.from_dict(data["report"]),
            validation=data.get("validation"),
            timestamp=data["timestamp"],
            artifact_version=data["artifact_version"],
        )

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls.from_dict(json.loads(line))


class DiffStatus(Enum):
    NO_BASELINE = "no_baseline"
    MATCH = "match"
    CHANGED = "changed"


@dataclass
class FieldChange:
    field: str
    baseline: Any
    current: Any

    def to_dict(self) -> Dict[str, Any]:
        return {"field": self.field, "baseline": self.baseline, "current": self.current}


@dataclass
class BaselineDiff:
    config_hash: str
    status: DiffStatus
    changes: List[FieldChange] = field(default_factory=list)

    @property
    def changed_fields(self) -> List[str]:
        return [c.field for c in self.changes]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "status": self.status.value,
            "changes": [c.to_dict() for c in self.changes],
        }


def compare_records(baseline: RunRecord, current: RunRecord) -> List[FieldChange]:
    """정확한 유리수 비교로 바뀐 필드 목록"""
    changes = []
    for name in RATE_FIELDS:
        old, new = getattr(baseline.report, name), getattr(current.report, name)
        if old != new:
            changes.append(FieldChange(name, format_rational(old), format_rational(new)))

    old_witness, new_witness = baseline.report.argmax_witness, current.report.argmax_witness
    if old_witness != new_witness:
        changes.append(FieldChange(
            "argmax_witness",
            None if old_witness is None else old_witness.to_dict(),
            None if new_witness is None else new_witness.to_dict(),
        ))
    if baseline.report.gamma_convention != current.report.gamma_convention:
        changes.append(FieldChange(
            "gamma_convention",
            baseline.report.gamma_convention.value,
            current.report.gamma_convention.value,
        ))
    if baseline.artifact_version != current.artifact_version:
        changes.append(FieldChange("artifact_version", baseline.artifact_version, current.artifact_version))
    return changes


class RunStore:
    """JSON Lines 결과 저장소 (단일 writer, 다중 reader)"""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()

    def record_run(self, record: RunRecord) -> int:
        """
        레코드 추가

        Returns:
            저장 id (0부터 시작하는 줄 번호)
        """
        directory = os.path.dirname(os.path.abspath(self.path))
        os.makedirs(directory, exist_ok=True)
        with self._lock:
            record_id = self._count_lines()
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(record.to_json() + "\n")
        logger.debug("recorded run %d for %s", record_id, record.config_hash[:12])
        return record_id

    def _count_lines(self) -> int:
        if not os.path.exists(self.path):
            return 0
        with open(self.path, "r", encoding="utf-8") as f:
            return sum(1 for line in f if line.strip())

    def load(self) -> List[RunRecord]:
        """
        전체 레코드 로드

        Raises:
            StoreCorruptedError: 파싱 실패한 줄 번호 (1-based)
        """
        if not os.path.exists(self.path):
            return []
        records = []
        with open(self.path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(RunRecord.from_json(line))
                except (ValueError, KeyError, TypeError, CacheLabError) as e:
                    raise StoreCorruptedError(self.path, number, str(e)) from e
        return records

    def records_for(self, config_hash_value: str) -> List[RunRecord]:
        return [r for r in self.load() if r.config_hash == config_hash_value]

    def diff_against_baseline(
        self, config_hash_value: str, current: Optional[RunRecord] = None
    ) -> BaselineDiff:
        """
        기준(해당 해시의 첫 기록) 대비 비교

        Args:
            config_hash_value: 설정 해시
            current: 비교 대상, None 이면 해당 해시의 최신 기록
        """
        records = self.records_for(config_hash_value)
        if not records:
            return BaselineDiff(config_hash_value, DiffStatus.NO_BASELINE)
        current = current or records[-1]
        changes = compare_records(records[0], current)
        status = DiffStatus.CHANGED if changes else DiffStatus.MATCH
        return BaselineDiff(config_hash_value, status, changes)

    def status(self) -> Dict[str, Any]:
        """저장소 상태"""
        if not os.path.exists(self.path):
            return {"path": self.path, "exists": False, "records": 0, "configs": 0}
        records = self.load()
        return {
            "path": self.path,
            "exists": True,
            "records": len(records),
            "configs": len({r.config_hash for r in records}),
            "size_bytes": os.path.getsize(self.path),
            "updated_at": datetime.fromtimestamp(os.path.getmtime(self.path)).isoformat(),
        }
