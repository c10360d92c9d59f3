import pytest

from app.config import get_settings
from app.services.qcore import QBase


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch, tmp_path):
    """Cada teste parte de configurações limpas e banco temporário"""
    monkeypatch.setenv("DATABASE_URL", f"sqlite:///{tmp_path / 'runs.db'}")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def q_half():
    return QBase(0.5)


@pytest.fixture(params=[0.3, 0.5, 0.8], ids=lambda q: f"q={q}")
def base(request):
    return QBase(request.param)
