# app/routes/rates.py
"""전송률/하한/스윕 API 라우트"""

import traceback

from flask import Blueprint, jsonify, request

from config import SweepPresets
from engine.analytics import demand_rates, rate_report
from engine.config import GammaConvention, SystemConfig, format_decimal, format_rational
from engine.exceptions import CacheLabError
from engine.placement import resolve_demands
from engine.store import config_hash
from models import CSV_COLUMNS, SweepSpec
from sweep import SweepRunner

rates_bp = Blueprint('rates', __name__)


def _error(e: Exception):
    """CacheLabError -> 400, 그 외 -> 500"""
    if isinstance(e, CacheLabError):
        return jsonify({"status": "error", "message": str(e)}), 400
    traceback.print_exc()
    return jsonify({"status": "error", "message": str(e)}), 500


def _config_from_request():
    body = request.get_json(silent=True) or {}
    config = SystemConfig.from_dict(body, drop_full_cache=bool(body.get("drop_full_cache", False)))
    gamma = GammaConvention.parse(body.get("gamma", "floor"))
    return config, gamma


@rates_bp.route('/rates', methods=['POST'])
def get_rates():
    """설정 JSON -> RateReport (+ 요청 벡터가 있으면 파트별 기대 전송률)"""
    try:
        config, gamma = _config_from_request()
        report = rate_report(config, gamma)
        parts = demand_rates(config, resolve_demands(config))
        return jsonify({
            "status": "ok",
            "config_hash": config_hash(config),
            "report": report.to_dict(),
            "parts": parts.to_dict(),
            "reduction_pct": round(float(report.reduction) * 100, 4),
        })
    except Exception as e:
        return _error(e)


@rates_bp.route('/bounds', methods=['POST'])
def get_bounds():
    """설정 JSON -> 하한 (γ 규약 선택)"""
    try:
        config, gamma = _config_from_request()
        report = rate_report(config, gamma)
        witness = report.argmax_witness
        return jsonify({
            "status": "ok",
            "gamma": gamma.value,
            "lower_bound_new": {
                "decimal": format_decimal(report.lower_bound_new),
                "exact": format_rational(report.lower_bound_new),
            },
            "cut_set_bound": {
                "decimal": format_decimal(report.lower_bound_cut_set),
                "exact": format_rational(report.lower_bound_cut_set),
            },
            "witness": None if witness is None else witness.to_dict(),
            "r_gbd": format_decimal(report.r_gbd),
        })
    except Exception as e:
        return _error(e)


@rates_bp.route('/presets')
def get_presets():
    """스윕 프리셋 목록"""
    try:
        presets = {name: factory().to_dict() for name, factory in SweepPresets.all().items()}
        return jsonify({"status": "ok", "presets": presets})
    except Exception as e:
        return _error(e)


@rates_bp.route('/sweep', methods=['POST'])
def run_sweep():
    """스윕 실행 (해석식만). body: 스윕 명세 또는 {"preset": "small_mmax"}"""
    try:
        body = request.get_json(silent=True) or {}
        if "preset" in body:
            spec = SweepPresets.get(body["preset"])
        else:
            spec = SweepSpec.from_dict(body)
        spec.simulate = False

        result = SweepRunner(verbose=False).run(spec)
        return jsonify({
            "status": "ok",
            "spec": spec.to_dict(),
            "columns": CSV_COLUMNS,
            "rows": [row.to_record(spec.curves) for row in result.rows],
            "flagged": [
                {"x": format_rational(row.x), "error": row.error} for row in result.flagged_rows
            ],
        })
    except Exception as e:
        return _error(e)
