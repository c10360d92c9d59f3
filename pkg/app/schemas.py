"""
Schemas Pydantic compartilhados pelos serviços e pela CLI
"""

import cmath
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class CheckResult(BaseModel):
    """Um registro de verificação (lado esquerdo vs lado direito)"""

    model_config = ConfigDict(populate_by_name=True)

    check_id: str = Field(..., description="Identificador do catálogo")
    equation_ref: str = Field(..., description="Âncora da equação verificada")
    params: Dict[str, Any] = Field(default_factory=dict)
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tolerance: float
    passed: bool = Field(..., alias="pass")
    runtime_ms: float = 0.0

    @classmethod
    def compare(
        cls,
        check_id: str,
        equation_ref: str,
        params: Dict[str, Any],
        lhs: complex,
        rhs: complex,
        tolerance: float,
        scale: Optional[float] = None,
        runtime_ms: float = 0.0,
    ) -> "CheckResult":
        """
        Monta o resultado comparando os dois lados

        Args:
            scale: para alvos nulos, o valor de grau 0 da mesma integral;
                o erro relativo passa a ser |lhs - rhs| / scale

        Returns:
            CheckResult com pass <=> abs_err <= tol ou rel_err <= tol
        """
        lhs, rhs = complex(lhs), complex(rhs)
        finite = all(cmath.isfinite(v) for v in (lhs, rhs))
        abs_err = abs(lhs - rhs) if finite else float("inf")
        denom = abs(scale) if scale is not None else abs(rhs)
        if denom > 0:
            rel_err = abs_err / denom
        else:
            rel_err = 0.0 if abs_err == 0 else float("inf")
        passed = finite and (abs_err <= tolerance or rel_err <= tolerance)
        return cls(
            check_id=check_id,
            equation_ref=equation_ref,
            params=params,
            lhs=lhs,
            rhs=rhs,
            abs_err=abs_err,
            rel_err=rel_err,
            tolerance=tolerance,
            passed=passed,
            runtime_ms=runtime_ms,
        )

    @classmethod
    def failure(cls, check_id: str, equation_ref: str, params: Dict[str, Any],
                error: Exception, tolerance: float) -> "CheckResult":
        """Registro de falha quando o check levanta exceção"""
        params = {**params, "error": f"{type(error).__name__}: {error}"}
        nan = complex(float("nan"), 0.0)
        return cls(
            check_id=check_id,
            equation_ref=equation_ref,
            params=params,
            lhs=nan,
            rhs=nan,
            abs_err=float("inf"),
            rel_err=float("inf"),
            tolerance=tolerance,
            passed=False,
        )


class GramReport(BaseModel):
    """Matriz de produtos internos vs normas previstas"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    family_a: str
    family_b: str
    params: Dict[str, Any] = Field(default_factory=dict)
    size: int
    matrix: List[List[complex]]
    predicted: List[complex]
    max_offdiag: float = Field(..., ge=0)
    max_diag_rel_err: float = Field(..., ge=0)

    @property
    def max_diagonal(self) -> float:
        return max(abs(self.matrix[i][i]) for i in range(self.size))

    def passes(self, tolerance: float) -> bool:
        """Off-diagonal < tol * maior diagonal e diagonal com erro relativo < tol"""
        return (self.max_offdiag <= tolerance * self.max_diagonal
                and self.max_diag_rel_err <= tolerance)


class RunConfig(BaseModel):
    """Configuração de uma execução da suíte"""

    selector: str = Field("all", description="all | section:<n> | check:<id>[,<id>...]")
    q_values: List[float] = Field(default_factory=list)
    tolerance: Optional[float] = Field(None, gt=0, description="Sobrescreve CHECK_TOL")
    output_format: str = Field("json", pattern="^(json|csv|human)$")
    output_path: Optional[str] = None
    jobs: int = Field(1, ge=1)
    seed: int = 0
    random_draws: int = Field(0, ge=0)
    save: bool = False

    @field_validator("q_values")
    @classmethod
    def q_in_domain(cls, values: List[float]) -> List[float]:
        from app.config import get_settings
        settings = get_settings()
        for q in values:
            if not settings.Q_MIN <= q <= settings.Q_MAX:
                raise ValueError(f"q={q} fora de [{settings.Q_MIN}, {settings.Q_MAX}]")
        return values
