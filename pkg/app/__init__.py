"""
Flask 앱 팩토리
"""

import os
from typing import Optional

from flask import Flask
from flask_cors import CORS


def create_app(store_path: Optional[str] = None, data_dir: Optional[str] = None):
    """Flask 앱 생성"""
    app = Flask(__name__)

    # CORS 설정
    CORS(app, origins=["http://localhost:3000", "http://localhost:3001"])

    # 설정
    base_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    app.config['JSON_AS_ASCII'] = False
    app.config['JSON_SORT_KEYS'] = False
    app.config['CACHELAB_DATA_DIR'] = data_dir or os.getenv('CACHELAB_DATA_DIR', os.path.join(base_dir, 'data'))
    app.config['CACHELAB_STORE'] = store_path or os.getenv(
        'CACHELAB_STORE', os.path.join(app.config['CACHELAB_DATA_DIR'], 'runs.jsonl')
    )

    # 라우트 등록
    from app.routes.rates import rates_bp
    from app.routes.common import common_bp

    app.register_blueprint(rates_bp, url_prefix='/api')
    app.register_blueprint(common_bp, url_prefix='/api')

    # 헬스체크
    @app.route('/health')
    def health():
        return {"status": "ok"}

    @app.route('/')
    def index():
        return {
            "name": "cachelab API",
            "version": "1.0",
            "endpoints": [
                "/api/rates",
                "/api/bounds",
                "/api/sweep",
                "/api/presets",
                "/api/runs/<config_hash>",
                "/api/runs/<config_hash>/diff",
                "/api/system/data-status",
            ]
        }

    return app
