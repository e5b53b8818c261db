# app/routes/__init__.py
"""라우트 모듈"""

from app.routes.rates import rates_bp
from app.routes.common import common_bp

__all__ = ['rates_bp', 'common_bp']
