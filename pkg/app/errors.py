"""
Exceções do domínio
Cada erro carrega o código de saída que a CLI devolve (0 ok, 1 falha de check, 2 uso/domínio)
"""

from typing import Any, Dict, Optional


class QHermiteError(Exception):
    """Erro base da biblioteca"""

    exit_code: int = 2

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


# ==============================================
# qcore
# ==============================================

class NonConvergent(QHermiteError):
    """Série não terminante não convergiu dentro de max_terms"""


class DenominatorPole(QHermiteError):
    """Parâmetro de denominador atinge q^(-k)"""


class DomainViolation(QHermiteError):
    """Parâmetros fora do domínio de validade"""


# ==============================================
# families
# ==============================================

class NoRecurrence(QHermiteError):
    """Família racional sem recorrência de três termos"""


class DegreeOverflow(QHermiteError):
    """Grau acima do limite configurado"""


class OutsideDisc(QHermiteError):
    """|t| fora do disco de convergência da função geradora"""


# ==============================================
# measures / integrate
# ==============================================

class PoleInNormalizer(QHermiteError):
    """t1 t2 = -q^(1-k) anula o normalizador (-t1 t2/q; q)_inf"""


class NonDecayingIntegrand(QHermiteError):
    """Integrando na reta real não decai ao dobrar R"""


class TailBoundFailure(QHermiteError):
    """Cauda da soma discreta não ficou abaixo da tolerância"""


class MaxPanelsExceeded(QHermiteError):
    """Quadratura adaptativa atingiu o máximo de painéis"""


class MaxNodesExceeded(QHermiteError):
    """Regra do trapézio no círculo atingiu o máximo de nós"""


# ==============================================
# verify / cli
# ==============================================

class UnknownCheck(QHermiteError):
    """Identificador fora do catálogo"""
