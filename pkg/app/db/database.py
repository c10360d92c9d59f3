from sqlalchemy import create_engine, select, Column, Integer, String, Float, DateTime, JSON, Boolean, ForeignKey
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, relationship, sessionmaker, Session
from contextlib import contextmanager
from datetime import datetime, timezone
from functools import lru_cache
from typing import Iterator, List, Sequence
from app.config import get_settings
from app.schemas import CheckResult
from app.utils.formatters import report_row


@lru_cache
def get_engine(url: str) -> Engine:
    """Engine síncrono por URL (o banco muda quando DATABASE_URL muda)"""
    return create_engine(url, echo=get_settings().DEBUG, future=True)


def session_factory() -> sessionmaker:
    return sessionmaker(bind=get_engine(get_settings().DATABASE_URL), expire_on_commit=False)


Base = declarative_base()

# Modelo de execução da suíte
class SuiteRun(Base):
    """Uma execução de `suite`"""
    __tablename__ = "suite_runs"

    id = Column(Integer, primary_key=True, index=True)
    selector = Column(String(200), nullable=False)
    q_grid = Column(JSON, nullable=False)
    total = Column(Integer, nullable=False)
    failed = Column(Integer, nullable=False)
    created_at = Column(DateTime, default=lambda: datetime.now(timezone.utc))

    records = relationship("CheckRecord", back_populates="run", cascade="all, delete-orphan")

# Modelo de registro individual
class CheckRecord(Base):
    """Um CheckResult persistido"""
    __tablename__ = "check_records"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("suite_runs.id"), index=True, nullable=False)
    check_id = Column(String(50), index=True, nullable=False)
    equation_ref = Column(String(50), nullable=False)
    params = Column(JSON, nullable=True)
    lhs_re = Column(Float, nullable=True)
    lhs_im = Column(Float, nullable=True)
    rhs_re = Column(Float, nullable=True)
    rhs_im = Column(Float, nullable=True)
    abs_err = Column(Float, nullable=True)
    rel_err = Column(Float, nullable=True)
    tolerance = Column(Float, nullable=False)
    passed = Column(Boolean, nullable=False)
    runtime_ms = Column(Float, default=0.0)

    run = relationship("SuiteRun", back_populates="records")

def init_db():
    """Inicializa o banco de dados"""
    Base.metadata.create_all(get_engine(get_settings().DATABASE_URL))

@contextmanager
def get_db() -> Iterator[Session]:
    """Sessão com commit ao final e rollback em erro"""
    session = session_factory()()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()

# Funções auxiliares de CRUD
def save_run(
    db: Session,
    selector: str,
    q_grid: Sequence[float],
    rows: Sequence[CheckResult]
) -> SuiteRun:
    """Salva uma execução e seus registros"""
    run = SuiteRun(
        selector=selector,
        q_grid=list(q_grid),
        total=len(rows),
        failed=sum(1 for row in rows if not row.passed)
    )
    for result in rows:
        row = report_row(result)
        run.records.append(CheckRecord(
            check_id=row["check_id"],
            equation_ref=row["equation_ref"],
            params=row["params"],
            lhs_re=row["lhs_re"],
            lhs_im=row["lhs_im"],
            rhs_re=row["rhs_re"],
            rhs_im=row["rhs_im"],
            abs_err=row["abs_err"],
            rel_err=row["rel_err"],
            tolerance=row["tolerance"],
            passed=row["pass"],
            runtime_ms=row["runtime_ms"]
        ))
    db.add(run)
    db.flush()
    return run

def get_run_history(db: Session, limit: int = 10) -> List[SuiteRun]:
    """Execuções mais recentes primeiro"""
    stmt = select(SuiteRun).order_by(SuiteRun.created_at.desc(), SuiteRun.id.desc()).limit(limit)
    return list(db.execute(stmt).scalars().all())
