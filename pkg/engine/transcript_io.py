"""
전송 기록 덤프/로드 (바이너리 페이로드 + JSON 사이드카)
"""

import json
import os
from typing import Tuple

import numpy as np

from engine.config import PartTag
from engine.models import DeliverySegment, DeliveryTranscript, RandomCombo, SubfileIndex


def dump_transcript(transcript: DeliveryTranscript, directory: str, stem: str = "transcript") -> Tuple[str, str]:
    """
    transcript 를 <stem>.bin (비트 연접 후 packbits) 과 <stem>.json 으로 저장

    Returns:
        (바이너리 경로, 사이드카 경로)
    """
    os.makedirs(directory, exist_ok=True)
    bin_path = os.path.join(directory, f"{stem}.bin")
    json_path = os.path.join(directory, f"{stem}.json")

    if transcript.segments:
        bits = np.concatenate([s.payload for s in transcript.segments]).astype(np.uint8)
    else:
        bits = np.zeros(0, dtype=np.uint8)
    with open(bin_path, "wb") as f:
        f.write(np.packbits(bits).tobytes())

    sidecar = transcript.to_dict()
    sidecar["payload_file"] = os.path.basename(bin_path)
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump(sidecar, f, ensure_ascii=False, indent=2, sort_keys=True)
    return bin_path, json_path


def load_transcript(json_path: str) -> DeliveryTranscript:
    """사이드카 JSON 경로로부터 DeliveryTranscript 복원"""
    with open(json_path, "r", encoding="utf-8") as f:
        sidecar = json.load(f)

    bin_path = os.path.join(os.path.dirname(json_path), sidecar["payload_file"])
    with open(bin_path, "rb") as f:
        packed = np.frombuffer(f.read(), dtype=np.uint8)
    bits = np.unpackbits(packed)[:sidecar["total_bits"]]

    segments = []
    offset = 0
    for entry in sidecar["segments"]:
        length = int(entry["bit_length"])
        payload = bits[offset:offset + length].copy()
        payload.setflags(write=False)
        offset += length
        combo = entry.get("combo")
        segments.append(DeliverySegment(
            part_tag=PartTag(entry["part_tag"]),
            payload=payload,
            bit_length=length,
            provenance=tuple(SubfileIndex.from_dict(p) for p in entry["provenance"]),
            combo=None if combo is None else RandomCombo.from_dict(combo),
        ))
    return DeliveryTranscript(segments, int(sidecar["file_size_bits"]), int(sidecar.get("slack_bits", 0)))
