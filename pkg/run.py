#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
cachelab - Command Line Entry Point
이종 캐시 용량 코디드 캐싱 전송률 계산 / 시뮬레이션 / 스윕 / 검증

    python run.py rates    --config c.json
    python run.py bounds   --config c.json [--gamma floor|ceil]
    python run.py simulate --config c.json --demands worst|explicit --trials T
    python run.py sweep    --spec s.json --out out.csv
    python run.py verify   --config c.json

종료 코드: 0 = 통과, 1 = 불변식/복호 실패, 2 = 설정/입력 오류
"""

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, BASE_DIR)

from config import RuntimeSettings, SweepPresets
from engine.analytics import rate_report
from engine.config import GammaConvention, SimulationConfig, SystemConfig, format_decimal, format_rational
from engine.exceptions import CacheLabError, ConfigError, ValidationAbortedError
from engine.placement import resolve_demands
from engine.simulator import monte_carlo_validate, simulate
from engine.store import RunRecord, RunStore
from engine.transcript_io import dump_transcript
from models import SweepSpec
from sweep import SweepRunner
from verify import PASS, InvariantGate

logger = logging.getLogger("cachelab")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


# === 공통 ===

def load_config(args, settings: RuntimeSettings) -> SystemConfig:
    """설정 JSON 로드 (+ CACHELAB_SEED 덮어쓰기)"""
    with open(args.config, "r", encoding="utf-8") as f:
        data = json.load(f)
    config = SystemConfig.from_dict(data, drop_full_cache=args.drop_full_cache)
    if settings.seed_override is not None:
        logger.info("seed overridden by environment: %d", settings.seed_override)
        config = config.with_seed(settings.seed_override)
    return config


def open_store(args, settings: RuntimeSettings) -> Optional[RunStore]:
    path = args.store or settings.store_path
    return RunStore(path) if path else None


def print_report(report) -> None:
    rows = [
        ("R_GBD", report.r_gbd),
        ("R_CD", report.r_cd),
        ("R_RD", report.r_rd),
        ("R_baseline", report.r_baseline),
        ("R_uncoded", report.r_uncoded),
        ("ΔR1", report.delta_r1),
        ("ΔR2", report.delta_r2),
        ("LB new", report.lower_bound_new),
        ("LB cut-set", report.lower_bound_cut_set),
    ]
    for label, value in rows:
        print(f"   {label:<12} {format_decimal(value):>16}   ({format_rational(value)})")
    if report.argmax_witness is not None:
        w = report.argmax_witness
        print(f"   witness      s={w.s}, l={w.l}, γ={w.gamma} ({report.gamma_convention.value})")
    print(f"   reduction    {float(report.reduction) * 100:.2f}%")


# === 서브커맨드 ===

def cmd_rates(args, settings: RuntimeSettings) -> int:
    config = load_config(args, settings)
    report = rate_report(config, GammaConvention.parse(args.gamma))

    print("=" * 60)
    print(f"📊 전송률 (N={config.num_files}, K={config.num_users})")
    print("=" * 60)
    if args.json:
        print(json.dumps(report.to_dict(), ensure_ascii=False, indent=2))
    else:
        print_report(report)

    store = open_store(args, settings)
    if store:
        record_id = store.record_run(RunRecord.create(config, report))
        print(f"\n   저장: {store.path} #{record_id}")
    return EXIT_OK


def cmd_bounds(args, settings: RuntimeSettings) -> int:
    config = load_config(args, settings)
    gamma = GammaConvention.parse(args.gamma)
    report = rate_report(config, gamma)

    print("=" * 60)
    print(f"📉 하한 (γ: {gamma.value})")
    print("=" * 60)
    print(f"   new bound    {format_decimal(report.lower_bound_new):>16}   ({format_rational(report.lower_bound_new)})")
    print(f"   cut-set      {format_decimal(report.lower_bound_cut_set):>16}   ({format_rational(report.lower_bound_cut_set)})")
    if report.argmax_witness is not None:
        w = report.argmax_witness
        print(f"   witness      s={w.s}, l={w.l}, γ={w.gamma}")
    print(f"   R_GBD        {format_decimal(report.r_gbd):>16}")

    store = open_store(args, settings)
    if store:
        store.record_run(RunRecord.create(config, report))
    return EXIT_OK


def cmd_simulate(args, settings: RuntimeSettings) -> int:
    config = load_config(args, settings)
    if args.file_size:
        config = config.with_file_size(args.file_size)
    if args.demands == "explicit":
        if config.demands is None:
            raise ConfigError("--demands explicit needs a \"demands\" list in the config")
        demands = config.demands
    else:
        demands = None
        config = config.with_demands(None)

    sim_config = SimulationConfig(slack_bits=args.slack)
    print("=" * 60)
    print(f"🧪 시뮬레이션: {args.delivery} delivery, {args.trials} trials, F={config.file_size_bits}")
    print("=" * 60)

    try:
        report = monte_carlo_validate(
            config, demands, args.trials, delivery=args.delivery,
            sim_config=sim_config, progress=not args.quiet,
        )
    except ValidationAbortedError as e:
        print(f"❌ {e}")
        return EXIT_FAILED

    print(f"   expected     {format_decimal(report.expected_rate):>16}")
    print(f"   mean         {format_decimal(report.mean_rate):>16}")
    print(f"   deviation    mean {report.mean_rate_deviation:.4%}, max {report.max_relative_deviation:.4%}")
    print(f"   decodes      {report.decodes_ok}/{report.decodes_expected}")
    verdict = "✅ within" if report.within_tolerance else "⚠️ outside"
    print(f"   tolerance    {verdict} {format_rational(report.tolerance)}")

    if args.dump:
        profile = resolve_demands(config)
        artifacts = simulate(config, profile, args.delivery, sim_config)
        bin_path, json_path = dump_transcript(artifacts.transcript, args.dump)
        print(f"   transcript   {bin_path}, {json_path}")

    store = open_store(args, settings)
    if store:
        store.record_run(RunRecord.create(config, rate_report(config), validation=report.to_dict()))
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_sweep(args, settings: RuntimeSettings) -> int:
    if args.preset:
        spec = SweepPresets.get(args.preset)
    elif args.spec:
        with open(args.spec, "r", encoding="utf-8") as f:
            spec = SweepSpec.from_dict(json.load(f))
    else:
        raise ConfigError("sweep needs --spec or --preset")

    runner = SweepRunner(verbose=not args.quiet)
    result = runner.run(spec)
    output = args.out or os.path.join(settings.data_dir, f"{spec.name}.csv")
    runner.write_csv(result, output)

    store = open_store(args, settings)
    if store:
        for row in result.valid_rows:
            store.record_run(RunRecord.create(row.config, row.report, validation=row.validation))
    return EXIT_OK


def cmd_verify(args, settings: RuntimeSettings) -> int:
    config = load_config(args, settings)
    gate = InvariantGate(simulate=not args.no_simulation)
    result = gate.analyze(config, GammaConvention.parse(args.gamma), output_path=args.out)

    store = open_store(args, settings)
    if store:
        store.record_run(RunRecord.create(config, rate_report(config, GammaConvention.parse(args.gamma))))
    return EXIT_OK if result["gate"] == PASS else EXIT_FAILED


# === 파서 ===

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cachelab", description=__doc__.split("\n")[1])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings only, no progress bars")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config: bool = True):
        if needs_config:
            p.add_argument("--config", required=True, help="config JSON {N, K, M, F, seed}")
            p.add_argument("--drop-full-cache", action="store_true", help="exclude users with M_k >= N")
        p.add_argument("--store", help="append results to this JSONL store")
        return p

    p = common(sub.add_parser("rates", help="analytic delivery rates"))
    p.add_argument("--gamma", default="floor", choices=["floor", "ceil", "ceiling"])
    p.add_argument("--json", action="store_true", help="print the RateReport JSON")
    p.set_defaults(handler=cmd_rates)

    p = common(sub.add_parser("bounds", help="lower bounds"))
    p.add_argument("--gamma", default="floor", choices=["floor", "ceil", "ceiling"])
    p.set_defaults(handler=cmd_bounds)

    p = common(sub.add_parser("simulate", help="bit-level Monte-Carlo validation"))
    p.add_argument("--demands", default="worst", choices=["worst", "explicit"])
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--delivery", default="coded", choices=["coded", "random", "baseline"])
    p.add_argument("--file-size", type=int, help="override F")
    p.add_argument("--slack", type=int, default=32, help="RANDOM DELIVERY slack combinations")
    p.add_argument("--dump", help="directory for the transcript dump of the first trial")
    p.set_defaults(handler=cmd_simulate)

    p = common(sub.add_parser("sweep", help="parameter sweep to CSV"), needs_config=False)
    p.add_argument("--spec", help="sweep spec JSON")
    p.add_argument("--preset", choices=sorted(SweepPresets.all()))
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(handler=cmd_sweep)

    p = common(sub.add_parser("verify", help="full invariant suite"))
    p.add_argument("--gamma", default="floor", choices=["floor", "ceil", "ceiling"])
    p.add_argument("--no-simulation", action="store_true", help="analytic checks only")
    p.add_argument("--out", help="write the gate result JSON here")
    p.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    settings = RuntimeSettings.from_env()
    try:
        return args.handler(args, settings)
    except CacheLabError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
