#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Flask 애플리케이션 진입점
"""

import os
import sys

# 경로 설정
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, BASE_DIR)

from app import create_app
from config import RuntimeSettings

settings = RuntimeSettings.from_env()

# Flask 앱 생성
app = create_app(store_path=settings.store_path, data_dir=settings.data_dir)


if __name__ == '__main__':
    print("\n" + "=" * 60)
    print("🚀 cachelab API Server")
    print("=" * 60)
    print(f"  URL: http://localhost:{settings.flask_port}")
    print(f"  Debug: {settings.flask_debug}")
    print(f"  Data Dir: {settings.data_dir}")
    print(f"  Store: {settings.store_path}")
    print("=" * 60)
    print("\n📍 Endpoints:")
    print("  GET  /health                      - 헬스체크")
    print("  POST /api/rates                   - 전송률 계산")
    print("  POST /api/bounds                  - 하한 계산")
    print("  POST /api/sweep                   - 파라미터 스윕 (해석식)")
    print("  GET  /api/presets                 - 스윕 프리셋")
    print("  GET  /api/runs/<hash>             - 실행 기록")
    print("  GET  /api/runs/<hash>/diff        - 기준 대비 비교")
    print("  GET  /api/system/data-status      - 데이터 상태")
    print("=" * 60 + "\n")

    app.run(
        host='0.0.0.0',
        port=settings.flask_port,
        debug=settings.flask_debug,
    )
