from pydantic_settings import BaseSettings
from pydantic import field_validator
from functools import lru_cache
from pathlib import Path
from typing import List

# Encontra a raiz do projeto
BASE_DIR = Path(__file__).resolve().parent.parent
ENV_FILE = BASE_DIR / ".env"

class Settings(BaseSettings):
    """Configurações da aplicação"""

    # App Config
    APP_NAME: str = "qhermite-ladder"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # qcore Config (produtos e séries)
    EPS_PROD: float = 1e-16
    EPS_SERIES: float = 1e-15
    MAX_TERMS: int = 10000
    POLE_TOL: float = 1e-13
    Q_MIN: float = 1e-6
    Q_MAX: float = 1 - 1e-6

    # Precisão estendida (mpmath) das séries terminantes
    MP_DPS_START: int = 30
    MP_DPS_MAX: int = 240
    MP_AGREE_TOL: float = 1e-20

    # Families Config
    DEGREE_CAP: int = 64

    # Integrate / Measures Config
    EPS_TAIL: float = 1e-14
    EPS_QUAD: float = 1e-11
    GL_ORDER: int = 32
    MAX_PANELS: int = 2 ** 14
    CIRCLE_NODES_START: int = 64
    CIRCLE_NODES_MAX: int = 2 ** 16
    MAX_ATOMS: int = 4096
    LINE_R_START: float = 8.0
    LINE_R_MAX: float = 2.0 ** 40

    # Verify Config
    CHECK_TOL: float = 1e-8
    ZERO_TOL: float = 1e-9
    TERMINATING_TOL: float = 1e-11
    REPR_TOL: float = 1e-9
    DEFAULT_Q_GRID: str = "0.3,0.5,0.8"

    # Database
    DATABASE_URL: str = "sqlite:///./qhermite_runs.db"
    SAVE_HISTORY: bool = False

    @field_validator(
        "EPS_PROD", "EPS_SERIES", "POLE_TOL", "EPS_TAIL", "EPS_QUAD",
        "CHECK_TOL", "ZERO_TOL", "TERMINATING_TOL", "REPR_TOL", "MP_AGREE_TOL",
    )
    @classmethod
    def tolerance_positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("tolerâncias devem ser > 0")
        return value

    @field_validator("MAX_TERMS", "DEGREE_CAP", "GL_ORDER", "MAX_PANELS",
                     "CIRCLE_NODES_START", "CIRCLE_NODES_MAX", "MAX_ATOMS",
                     "MP_DPS_START", "MP_DPS_MAX")
    @classmethod
    def count_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("contadores devem ser > 0")
        return value

    @property
    def q_grid(self) -> List[float]:
        """Grade padrão de q usada pela suíte"""
        return [float(v) for v in self.DEFAULT_Q_GRID.split(",") if v.strip()]

    class Config:
        env_file = str(ENV_FILE)
        env_file_encoding = 'utf-8'
        case_sensitive = True

@lru_cache()
def get_settings():
    """Retorna instância única das configurações"""
    return Settings()
