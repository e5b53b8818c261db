# app/routes/common.py
"""공통 API 라우트 (실행 기록 / 데이터 상태)"""

import os
import traceback

import pandas as pd
from flask import Blueprint, current_app, jsonify

from engine.exceptions import CacheLabError
from engine.store import RunStore

common_bp = Blueprint('common', __name__)


def _store() -> RunStore:
    return RunStore(current_app.config['CACHELAB_STORE'])


@common_bp.route('/runs/<config_hash>')
def get_runs(config_hash):
    """설정 해시별 실행 기록"""
    try:
        records = _store().records_for(config_hash)
        return jsonify({
            "status": "ok",
            "config_hash": config_hash,
            "count": len(records),
            "records": [r.to_dict() for r in records],
        })
    except CacheLabError as e:
        return jsonify({"status": "error", "message": str(e)}), 400
    except Exception as e:
        traceback.print_exc()
        return jsonify({"status": "error", "message": str(e)}), 500


@common_bp.route('/runs/<config_hash>/diff')
def get_run_diff(config_hash):
    """기준 기록 대비 최신 기록 비교"""
    try:
        diff = _store().diff_against_baseline(config_hash)
        return jsonify({"status": "ok", **diff.to_dict()})
    except CacheLabError as e:
        return jsonify({"status": "error", "message": str(e)}), 400
    except Exception as e:
        traceback.print_exc()
        return jsonify({"status": "error", "message": str(e)}), 500


@common_bp.route('/system/data-status')
def get_data_status():
    """데이터 디렉터리 / 실행 기록 저장소 상태"""
    try:
        data_dir = current_app.config['CACHELAB_DATA_DIR']
        file_status = {}
        if os.path.isdir(data_dir):
            for filename in sorted(os.listdir(data_dir)):
                filepath = os.path.join(data_dir, filename)
                if not os.path.isfile(filepath):
                    continue
                stat = os.stat(filepath)
                file_status[filename] = {
                    "size_kb": round(stat.st_size / 1024, 2),
                    "modified": pd.Timestamp(stat.st_mtime, unit='s').isoformat(),
                }

        return jsonify({
            "status": "ok",
            "data_dir": data_dir,
            "files": file_status,
            "store": _store().status(),
        })
    except CacheLabError as e:
        return jsonify({"status": "error", "message": str(e)}), 400
    except Exception as e:
        traceback.print_exc()
        return jsonify({"status": "error", "message": str(e)}), 500
