import json

import numpy as np

from engine.decoder import verify_transcript
from engine.delivery import coded_delivery_hetero, random_delivery
from engine.placement import generate_library, partition_subfiles, place_caches, worst_case_demands
from engine.transcript_io import dump_transcript, load_transcript


def test_coded_transcript_reloads_and_decodes(four_users, tmp_path):
    library = generate_library(four_users)
    placement = place_caches(four_users)
    partition = partition_subfiles(placement)
    profile = worst_case_demands(four_users)
    transcript = coded_delivery_hetero(library, placement, profile, partition)

    bin_path, json_path = dump_transcript(transcript, str(tmp_path / "dump"))
    with open(json_path, encoding="utf-8") as f:
        sidecar = json.load(f)
    assert sidecar["payload_file"] == "transcript.bin"
    assert sidecar["total_bits"] == transcript.total_bits

    loaded = load_transcript(json_path)
    assert [s.part_tag for s in loaded.segments] == [s.part_tag for s in transcript.segments]
    assert [s.provenance for s in loaded.segments] == [s.provenance for s in transcript.segments]
    for a, b in zip(loaded.segments, transcript.segments):
        assert np.array_equal(a.payload, b.payload)

    results = verify_transcript(placement, loaded, profile, library, partition)
    assert all(r.decoded for r in results)


def test_random_transcript_keeps_combinations(four_users, tmp_path):
    config = four_users.with_file_size(256)
    library = generate_library(config)
    placement = place_caches(config)
    profile = worst_case_demands(config)
    transcript = random_delivery(library, placement, profile, slack_bits=32)

    _, json_path = dump_transcript(transcript, str(tmp_path), stem="rd")
    loaded = load_transcript(json_path)
    assert loaded.slack_bits == transcript.slack_bits == 64
    assert [s.combo for s in loaded.segments] == [s.combo for s in transcript.segments]
    assert all(r.decoded for r in verify_transcript(placement, loaded, profile, library))
