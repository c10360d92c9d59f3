"""
Núcleo escalar q
Fatoriais q-deslocados (finitos e infinitos), produtos múltiplos e séries
hipergeométricas básicas com controle de truncamento, em escalares complexos;
séries terminantes em precisão estendida (mpmath)
"""

import functools
import logging
import math
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from mpmath.ctx_mp import MPContext

from app.config import get_settings
from app.errors import DenominatorPole, DomainViolation, NonConvergent
from app.schemas import CheckResult

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex]


# ==============================================
# TIPOS
# ==============================================

@dataclass(frozen=True)
class QBase:
    """Base q, restrita a [Q_MIN, Q_MAX] dentro de (0, 1)"""

    q: float

    def __post_init__(self):
        settings = get_settings()
        q = float(self.q)
        if not math.isfinite(q) or not settings.Q_MIN <= q <= settings.Q_MAX:
            raise DomainViolation(
                f"q={self.q} fora de [{settings.Q_MIN}, {settings.Q_MAX}]",
                {"q": self.q},
            )
        object.__setattr__(self, "q", q)

    @property
    def sqrt(self) -> float:
        return math.sqrt(self.q)

    def power(self, k: float) -> float:
        return self.q ** k


@dataclass(frozen=True)
class QSeriesValue:
    """Valor numérico com estimativa do erro de truncamento"""

    value: complex
    err_bound: float = 0.0
    terms_used: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.err_bound < 0 or self.terms_used < 0:
            raise ValueError("err_bound e terms_used devem ser >= 0")

    @property
    def real(self) -> float:
        """Parte real; a parte imaginária deve estar abaixo do erro combinado"""
        tol = max(self.err_bound, 1e-12 * max(1.0, abs(self.value)))
        if abs(self.value.imag) > tol:
            raise ValueError(f"valor não real: {self.value}")
        return self.value.real

    def __complex__(self) -> complex:
        return self.value


@dataclass(frozen=True)
class PhiSeries:
    """
    Série r-phi-s: numeradores a_1..a_r, denominadores b_1..b_s, argumento z

    A construção rejeita denominadores em q^(-k) alcançáveis pela série.
    """

    numerator_params: Tuple[complex, ...]
    denominator_params: Tuple[complex, ...]
    argument: complex
    base: QBase
    terminating_degree: Optional[int] = field(default=None, init=False)

    def __post_init__(self):
        object.__setattr__(self, "numerator_params", tuple(complex(a) for a in self.numerator_params))
        object.__setattr__(self, "denominator_params", tuple(complex(b) for b in self.denominator_params))
        object.__setattr__(self, "argument", complex(self.argument))
        degrees = [m for m in (_q_power_index(a, self.base.q) for a in self.numerator_params) if m is not None]
        object.__setattr__(self, "terminating_degree", min(degrees) if degrees else None)
        reach = self.terminating_degree
        for b in self.denominator_params:
            k = _q_power_index(b, self.base.q)
            # o fator (b;q)_n usa 1 - b q^j com j <= n - 1
            if k is not None and (reach is None or k < reach):
                raise DenominatorPole(
                    f"parâmetro de denominador {b} = q^(-{k})",
                    {"b": str(b), "k": k},
                )

    @property
    def r(self) -> int:
        return len(self.numerator_params)

    @property
    def s(self) -> int:
        return len(self.denominator_params)

    @property
    def is_terminating(self) -> bool:
        return self.terminating_degree is not None


def _q_power_index(a: complex, q: float) -> Optional[int]:
    """Retorna k >= 0 quando a = q^(-k) dentro de POLE_TOL"""
    a = complex(a)
    if abs(a) < 0.5:
        return None
    k = int(round(-math.log(abs(a)) / math.log(q)))
    if k < 0:
        return None
    tol = get_settings().POLE_TOL * max(1, k)
    if abs(1 - a * q ** k) < tol:
        return k
    return None


def _as_q(base: Union[QBase, float]) -> float:
    return base.q if isinstance(base, QBase) else float(base)


# ==============================================
# FATORIAIS q-DESLOCADOS
# ==============================================

def qpoch_value(a: Scalar, q: float, n: int) -> complex:
    """(a; q)_n como número complexo"""
    result = 1 + 0j
    factor = complex(a)
    for _ in range(n):
        result *= 1 - factor
        factor *= q
    return result


def qpoch(a: Scalar, base: QBase, n: int) -> QSeriesValue:
    """
    Fatorial q-deslocado finito

    Args:
        a: parâmetro complexo
        base: base q
        n: número de fatores (n >= 0)

    Returns:
        QSeriesValue com prod_{k=1..n} (1 - a q^(k-1)) e err_bound = 0
    """
    if n < 0:
        raise DomainViolation(f"n={n} < 0", {"n": n})
    return QSeriesValue(qpoch_value(a, _as_q(base), n), 0.0, n)


def _inf_truncation(abs_a: float, q: float, eps: float) -> int:
    if abs_a == 0:
        return 0
    k = math.ceil(math.log(eps * (1 - q) / abs_a) / math.log(q))
    return max(k, 0)


def qpoch_inf(a: Scalar, base: QBase) -> QSeriesValue:
    """
    Fatorial q-deslocado infinito (a; q)_inf

    Trunca em K com |a| q^K < EPS_PROD (1 - q); o erro reportado é
    |a| q^K / (1 - q) vezes o produto parcial.
    """
    q = _as_q(base)
    a = complex(a)
    eps = get_settings().EPS_PROD
    k_max = _inf_truncation(abs(a), q, eps)
    partial = qpoch_value(a, q, k_max)
    err = abs(a) * q ** k_max / (1 - q) * abs(partial) if k_max else 0.0
    if a.imag == 0:
        partial = complex(partial.real, 0.0)
    return QSeriesValue(partial, err, k_max)


def qpoch_inf_value(a: Scalar, q: float) -> complex:
    return qpoch_inf(a, q).value


def qpoch_inf_array(a: np.ndarray, q: float) -> np.ndarray:
    """(a; q)_inf vetorizado sobre um array de parâmetros"""
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.ones_like(a)
    eps = get_settings().EPS_PROD
    k_max = _inf_truncation(float(np.max(np.abs(a))), q, eps)
    powers = q ** np.arange(k_max)
    return np.prod(1 - a[..., None] * powers, axis=-1)


def qpoch_multi(params: Sequence[Scalar], base: QBase, n: Optional[int] = None) -> QSeriesValue:
    """
    Produto múltiplo (a_1, ..., a_k; q)_n; n = None significa infinito

    O erro é combinado em primeira ordem: sum_i err_i prod_{j != i} |v_j|.
    """
    if not params:
        raise DomainViolation("lista de parâmetros vazia")
    parts = [qpoch_inf(a, base) if n is None else qpoch(a, base, n) for a in params]
    value = 1 + 0j
    for part in parts:
        value *= part.value
    err = 0.0
    for i, part in enumerate(parts):
        if part.err_bound:
            others = 1.0
            for j, other in enumerate(parts):
                if j != i:
                    others *= abs(other.value)
            err += part.err_bound * others
    return QSeriesValue(value, err, sum(p.terms_used for p in parts))


def qpoch_multi_value(params: Iterable[Scalar], q: float, n: Optional[int] = None) -> complex:
    result = 1 + 0j
    for a in params:
        result *= qpoch_inf(a, q).value if n is None else qpoch_value(a, q, n)
    return result


def qbinomial(n: int, k: int, q: float) -> float:
    """Coeficiente q-binomial [n k]_q"""
    if k < 0 or k > n:
        return 0.0
    return (qpoch_value(q, q, n) / (qpoch_value(q, q, k) * qpoch_value(q, q, n - k))).real


# ==============================================
# PRECISÃO ESTENDIDA
# Séries terminantes com q^(-n) cancelam em precisão dupla; aqui elas são
# somadas num contexto mpmath por thread, com a precisão dobrada até duas
# avaliações consecutivas concordarem.
# ==============================================

_threads = threading.local()


def mp_context() -> MPContext:
    """Contexto mpmath da thread corrente (o mpmath.mp global é compartilhado)"""
    ctx = getattr(_threads, "ctx", None)
    if ctx is None:
        ctx = MPContext()
        _threads.ctx = ctx
        _threads.active = False
    return ctx


def _is_mp(value: Any) -> bool:
    return hasattr(value, "_mpf_") or hasattr(value, "_mpc_")


def _leaves(value: Any) -> Iterator[complex]:
    """Folhas numéricas de um resultado (escalar, tupla, lista ou dict)"""
    if isinstance(value, dict):
        for item in value.values():
            yield from _leaves(item)
    elif isinstance(value, (tuple, list)):
        for item in value:
            yield from _leaves(item)
    elif _is_mp(value) or (isinstance(value, (int, float, complex)) and not isinstance(value, bool)):
        yield complex(value)


def _to_python(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _to_python(item) for key, item in value.items()}
    if isinstance(value, (tuple, list)):
        return type(value)(_to_python(item) for item in value)
    if _is_mp(value):
        return complex(value)
    return value


def _agree(previous: Any, current: Any, tol: float) -> bool:
    for old, new in zip(_leaves(previous), _leaves(current)):
        if not (math.isfinite(new.real) and math.isfinite(new.imag)):
            return False
        if abs(new - old) > tol * abs(new):
            return False
    return True


def high_precision(fn: Callable[..., Any]) -> Callable[..., Any]:
    """
    Avalia fn no contexto mpmath com precisão crescente

    Começa em MP_DPS_START dígitos e dobra até duas avaliações concordarem
    em MP_AGREE_TOL relativo (ou MP_DPS_MAX ser atingido: valores nulos não
    concordam em termos relativos e ficam com a última avaliação). Números
    mpmath do resultado voltam como complex. Chamadas aninhadas rodam na
    precisão corrente e devolvem os números mpmath intactos.
    """
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        ctx = mp_context()
        if _threads.active:
            return fn(*args, **kwargs)
        settings = get_settings()
        saved = ctx.dps
        _threads.active = True
        try:
            dps = settings.MP_DPS_START
            ctx.dps = dps
            current = fn(*args, **kwargs)
            while dps < settings.MP_DPS_MAX:
                previous = current
                dps = min(2 * dps, settings.MP_DPS_MAX)
                ctx.dps = dps
                current = fn(*args, **kwargs)
                if _agree(previous, current, settings.MP_AGREE_TOL):
                    break
            else:
                logger.debug(f"{fn.__name__}: precisão máxima {dps} dígitos atingida")
        finally:
            ctx.dps = saved
            _threads.active = False
        result = _to_python(current)
        return complex(result) if isinstance(result, (int, float)) else result

    return wrapper


def mp_qpoch(a: Any, q: Any, n: int) -> Any:
    """(a; q)_n no contexto mpmath corrente"""
    ctx = mp_context()
    a, q = ctx.convert(a), ctx.convert(q)
    result = ctx.one
    for j in range(n):
        result *= 1 - a * q ** j
    return result


def mp_qbinomial(n: int, k: int, q: Any) -> Any:
    ctx = mp_context()
    if k < 0 or k > n:
        return ctx.zero
    return mp_qpoch(q, q, n) / (mp_qpoch(q, q, k) * mp_qpoch(q, q, n - k))


def mp_phi(numerators: Sequence[Any], denominators: Sequence[Any], z: Any, q: Any, degree: int) -> Any:
    """
    r-phi-s terminante somado até o termo `degree` no contexto corrente

    Raises:
        DenominatorPole: |1 - b q^k| <= POLE_TOL para algum k < degree
    """
    ctx = mp_context()
    pole_tol = get_settings().POLE_TOL
    nums = [ctx.convert(a) for a in numerators]
    dens = [ctx.convert(b) for b in denominators]
    z, q = ctx.convert(z), ctx.convert(q)
    excess = 1 + len(dens) - len(nums)
    term = total = ctx.one
    for k in range(degree):
        qk = q ** k
        num = ctx.one
        for a in nums:
            num *= 1 - a * qk
        den = 1 - q * qk
        for b in dens:
            factor = 1 - b * qk
            if abs(factor) <= pole_tol:
                raise DenominatorPole(f"parâmetro de denominador {complex(b)} = q^(-{k})", {"k": k})
            den *= factor
        term *= num / den * z * (-qk) ** excess
        total += term
    return total


_terminating_sum = high_precision(mp_phi)


# ==============================================
# SÉRIES HIPERGEOMÉTRICAS BÁSICAS
# ==============================================

def phi(numerators: Sequence[Scalar], denominators: Sequence[Scalar],
        z: Scalar, base: Union[QBase, float]) -> complex:
    """Atalho: valor de phi_eval para parâmetros soltos"""
    if not isinstance(base, QBase):
        base = QBase(base)
    return phi_eval(PhiSeries(tuple(numerators), tuple(denominators), z, base)).value


def phi_eval(series: PhiSeries, max_terms: Optional[int] = None) -> QSeriesValue:
    """
    Avalia r-phi-s com o fator ((-1)^n q^(n(n-1)/2))^(1+s-r)

    Séries terminantes são somadas em precisão estendida (err_bound = 0);
    as demais param quando o termo e a cota geométrica da cauda ficam abaixo
    de EPS_SERIES vezes a soma parcial.

    Raises:
        NonConvergent: critério de convergência violado ou max_terms atingido
    """
    settings = get_settings()
    max_terms = max_terms or settings.MAX_TERMS
    q = series.base.q
    z = series.argument
    r, s = series.r, series.s
    excess = 1 + s - r

    def ratio(n: int) -> complex:
        qn = q ** n
        num = 1 + 0j
        for a in series.numerator_params:
            num *= 1 - a * qn
        den = 1 - q * qn
        for b in series.denominator_params:
            den *= 1 - b * qn
        if den == 0:
            raise DenominatorPole(f"denominador nulo no termo {n + 1}", {"n": n + 1})
        return num / den * z * (-qn) ** excess

    if series.is_terminating:
        m = series.terminating_degree
        total = _terminating_sum(series.numerator_params, series.denominator_params, z, q, m)
        return QSeriesValue(total, 0.0, m + 1)

    if z == 0:
        return QSeriesValue(1, 0.0, 1)
    if r > s + 1 or (r == s + 1 and abs(z) >= 1):
        raise NonConvergent(
            f"{r}phi{s} não terminante diverge para |z|={abs(z):.6g}",
            {"r": r, "s": s, "z": str(z)},
        )

    eps = settings.EPS_SERIES
    term, total = 1 + 0j, 1 + 0j
    largest = 1.0
    previous = abs(term)
    for n in range(max_terms):
        term *= ratio(n)
        total += term
        size = abs(term)
        largest = max(largest, size)
        scale = max(abs(total), largest * eps)
        rho = size / previous if previous > 0 else 0.0
        previous = size
        if size == 0:
            return QSeriesValue(total, 0.0, n + 2)
        if size < eps * scale and rho < 1:
            tail = size * rho / (1 - rho)
            if tail < eps * scale:
                logger.debug(f"phi_eval {r}phi{s}: {n + 2} termos")
                return QSeriesValue(total, size + tail, n + 2)
    raise NonConvergent(
        f"{r}phi{s} não convergiu em {max_terms} termos",
        {"max_terms": max_terms, "partial": str(total)},
    )


# ==============================================
# IDENTIDADE DE DESLOCAMENTO
# ==============================================

def qpoch_shift_identity_check(a: Scalar, base: QBase, n: int, k: int) -> CheckResult:
    """
    Verifica (a;q)_{n-k} = (a;q)_n / (q^{1-n}/a;q)_k (-q/a)^k q^{k(k-1)/2 - nk}
    e a variante (a;q)_k = (q^{1-k}/a;q)_k (-a)^k q^{k(k-1)/2}

    Returns:
        CheckResult com o maior dos dois resíduos relativos
    """
    if not 0 <= k <= n:
        raise DomainViolation(f"precisa 0 <= k <= n, recebeu k={k}, n={n}", {"n": n, "k": k})
    if a == 0:
        raise DomainViolation("a = 0 não é permitido")
    start = time.perf_counter()
    q = base.q
    a = complex(a)
    reflected = qpoch_value(q ** (1 - n) / a, q, k)
    if abs(reflected) < get_settings().POLE_TOL:
        raise DenominatorPole(f"(q^(1-n)/a; q)_k = 0 para a={a}", {"a": str(a), "n": n, "k": k})
    lhs = qpoch_value(a, q, n - k)
    rhs = qpoch_value(a, q, n) / reflected * (-q / a) ** k * q ** (k * (k - 1) / 2 - n * k)

    variant_lhs = qpoch_value(a, q, k)
    variant_rhs = qpoch_value(q ** (1 - k) / a, q, k) * (-a) ** k * q ** (k * (k - 1) / 2)
    variant_abs = abs(variant_lhs - variant_rhs)
    variant_rel = variant_abs / max(abs(variant_lhs), 1e-300)

    tol = get_settings().CHECK_TOL
    result = CheckResult.compare(
        "ID_2_12", "Eq. (2.12)", {"a": a.real if a.imag == 0 else str(a), "q": q, "n": n, "k": k},
        lhs, rhs, tol, runtime_ms=(time.perf_counter() - start) * 1e3,
    )
    abs_err = max(result.abs_err, variant_abs)
    rel_err = max(result.rel_err, variant_rel)
    return result.model_copy(update={
        "abs_err": abs_err,
        "rel_err": rel_err,
        "passed": abs_err <= tol or rel_err <= tol,
    })
