"""
Famílias de polinômios e funções racionais da escada q-Hermite

Cada família polinomial é avaliada de duas formas independentes (recorrência de
três termos e representação hipergeométrica explícita) e traz as constantes de
norma, o mapa de normalização entre as duas formas e a função geradora.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterator, Optional, Tuple, Union

import numpy as np

from app.config import get_settings
from app.errors import DegreeOverflow, DenominatorPole, DomainViolation, NoRecurrence, OutsideDisc
from app.services.qcore import (
    QBase, high_precision, mp_context, mp_phi, mp_qbinomial, mp_qpoch, phi, qpoch_inf_array, qpoch_inf_value,
    qpoch_value,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]


# ==============================================
# TIPOS
# ==============================================

class FamilyId(str, Enum):
    CONTINUOUS_Q_HERMITE = "ContinuousQHermite"
    DISCRETE_Q_HERMITE = "DiscreteQHermite"
    QINV_HERMITE = "QInvHermite"
    AS_CARLITZ_U = "ASCarlitzU"
    AS_CARLITZ_V = "ASCarlitzV"
    AS_CHIHARA = "ASChihara"
    ASKEY_WILSON = "AskeyWilson"
    BIG_Q_JACOBI = "BigQJacobi"
    SZEGO_CIRCLE = "SzegoCircle"
    PASTRO = "Pastro"
    AS_VERMA_RATIONAL = "ASVermaRational"
    AS_CHIHARA_QINV = "ASChiharaQinv"
    ISMAIL_MASSON_RATIONAL = "IsmailMassonRational"


class Parametrization(str, Enum):
    TRIG = "trig"      # x = cos(theta), theta em [0, pi]
    HYPER = "hyper"    # x = sinh(xi)
    LINE = "line"      # x real
    CIRCLE = "circle"  # z = e^(i theta)


@dataclass(frozen=True)
class EvalPoint:
    """
    Ponto de avaliação

    A coordenada é o ângulo theta (TRIG e CIRCLE), xi (HYPER) ou x (LINE),
    a mesma convenção usada pelas medidas nos arrays de nós.
    """

    parametrization: Parametrization
    coordinate: float

    def __post_init__(self):
        kind = Parametrization(self.parametrization)
        object.__setattr__(self, "parametrization", kind)
        value = complex(self.coordinate)
        if kind is not Parametrization.LINE and value.imag != 0:
            raise DomainViolation(f"coordenada {kind.value} deve ser real", {"coordinate": str(value)})
        if kind is Parametrization.TRIG and not -1e-14 <= value.real <= math.pi + 1e-14:
            raise DomainViolation(f"theta={value.real} fora de [0, pi]", {"theta": value.real})
        object.__setattr__(self, "coordinate", value.real if value.imag == 0 else value)

    @classmethod
    def trig(cls, theta: float) -> "EvalPoint":
        return cls(Parametrization.TRIG, theta)

    @classmethod
    def hyper(cls, xi: float) -> "EvalPoint":
        return cls(Parametrization.HYPER, xi)

    @classmethod
    def line(cls, x: Number) -> "EvalPoint":
        return cls(Parametrization.LINE, x)

    @classmethod
    def circle(cls, z: complex) -> "EvalPoint":
        """Ponto no círculo a partir de z com |z| = 1"""
        z = complex(z)
        if abs(abs(z) - 1) > 1e-14:
            raise DomainViolation(f"|z|={abs(z)} fora do círculo unitário", {"z": str(z)})
        return cls(Parametrization.CIRCLE, cmath.phase(z))

    @classmethod
    def circle_angle(cls, theta: float) -> "EvalPoint":
        return cls(Parametrization.CIRCLE, theta)

    @property
    def x(self) -> Number:
        kind = self.parametrization
        if kind is Parametrization.TRIG:
            return math.cos(self.coordinate)
        if kind is Parametrization.HYPER:
            return math.sinh(self.coordinate)
        if kind is Parametrization.LINE:
            return self.coordinate
        raise DomainViolation("ponto no círculo não tem coordenada real x")

    @property
    def w(self) -> complex:
        """e^(i theta) com x = (w + 1/w)/2"""
        kind = self.parametrization
        if kind in (Parametrization.TRIG, Parametrization.CIRCLE):
            return cmath.exp(1j * self.coordinate)
        if kind is Parametrization.LINE:
            x = complex(self.coordinate)
            return x + 1j * cmath.sqrt(1 - x * x)
        raise DomainViolation("ponto hiperbólico não tem representação e^(i theta)")

    @property
    def e_xi(self) -> complex:
        """e^xi com x = sinh(xi)"""
        kind = self.parametrization
        if kind is Parametrization.HYPER:
            return complex(math.exp(self.coordinate))
        if kind is Parametrization.LINE:
            x = complex(self.coordinate)
            return x + cmath.sqrt(x * x + 1)
        raise DomainViolation(f"ponto {kind.value} não tem representação x = sinh(xi)")

    @property
    def z(self) -> complex:
        if self.parametrization is not Parametrization.CIRCLE:
            raise DomainViolation("z só existe para pontos no círculo")
        return cmath.exp(1j * self.coordinate)

    def precise(self) -> "PrecisePoint":
        return PrecisePoint(self)


class PrecisePoint:
    """As mesmas coordenadas de EvalPoint, calculadas no contexto mpmath corrente"""

    def __init__(self, point: EvalPoint):
        self.point = point
        self.ctx = mp_context()
        self.coordinate = self.ctx.convert(point.coordinate)

    @property
    def kind(self) -> Parametrization:
        return self.point.parametrization

    @property
    def x(self) -> Any:
        if self.kind is Parametrization.TRIG:
            return self.ctx.cos(self.coordinate)
        if self.kind is Parametrization.HYPER:
            return self.ctx.sinh(self.coordinate)
        if self.kind is Parametrization.LINE:
            return self.coordinate
        raise DomainViolation("ponto no círculo não tem coordenada real x")

    @property
    def w(self) -> Any:
        if self.kind in (Parametrization.TRIG, Parametrization.CIRCLE):
            return self.ctx.expj(self.coordinate)
        if self.kind is Parametrization.LINE:
            x = self.coordinate
            return x + self.ctx.j * self.ctx.sqrt(1 - x * x)
        raise DomainViolation("ponto hiperbólico não tem representação e^(i theta)")

    @property
    def e_xi(self) -> Any:
        if self.kind is Parametrization.HYPER:
            return self.ctx.exp(self.coordinate)
        if self.kind is Parametrization.LINE:
            x = self.coordinate
            return x + self.ctx.sqrt(x * x + 1)
        raise DomainViolation(f"ponto {self.kind.value} não tem representação x = sinh(xi)")

    @property
    def z(self) -> Any:
        if self.kind is not Parametrization.CIRCLE:
            raise DomainViolation("z só existe para pontos no círculo")
        return self.ctx.expj(self.coordinate)


@dataclass(frozen=True)
class FamilyInfo:
    parametrization: Parametrization
    param_names: Tuple[str, ...]
    has_recurrence: bool
    norm_ref: str
    genfun_ref: Optional[str] = None


FAMILY_INFO: Dict[FamilyId, FamilyInfo] = {
    FamilyId.CONTINUOUS_Q_HERMITE: FamilyInfo(Parametrization.TRIG, (), True, "Eq. (2.1)", "Eq. (1.9)"),
    FamilyId.DISCRETE_Q_HERMITE: FamilyInfo(Parametrization.LINE, (), True, "Eq. (3.2)", "Eq. (1.8)"),
    FamilyId.QINV_HERMITE: FamilyInfo(Parametrization.HYPER, (), True, "Eq. (5.3)", "Eq. (5.4)"),
    FamilyId.AS_CARLITZ_U: FamilyInfo(Parametrization.LINE, ("a",), True, "Eq. (3.2)", "Eq. (3.1)"),
    FamilyId.AS_CARLITZ_V: FamilyInfo(Parametrization.LINE, ("a",), True, "Eq. (3.18)", "Eq. (3.19)"),
    FamilyId.AS_CHIHARA: FamilyInfo(Parametrization.TRIG, ("t1", "t2"), True, "Eq. (2.9)", "Eq. (2.15)"),
    FamilyId.ASKEY_WILSON: FamilyInfo(Parametrization.TRIG, ("t1", "t2", "t3", "t4"), True, "Eq. (2.18)", "Eq. (2.21)"),
    FamilyId.BIG_Q_JACOBI: FamilyInfo(Parametrization.LINE, ("a", "t1", "t2"), True, "Eq. (3.11)"),
    FamilyId.SZEGO_CIRCLE: FamilyInfo(Parametrization.CIRCLE, (), True, "Eq. (1.17)", "Eq. (4.1)"),
    FamilyId.PASTRO: FamilyInfo(Parametrization.CIRCLE, ("t1", "t2"), True, "Eq. (4.8)", "Eq. (4.9)"),
    FamilyId.AS_VERMA_RATIONAL: FamilyInfo(Parametrization.LINE, ("a", "t1", "t2"), False, "Eq. (3.24)"),
    FamilyId.AS_CHIHARA_QINV: FamilyInfo(Parametrization.HYPER, ("t1", "t2"), True, "Eq. (5.14)", "Eq. (5.15)"),
    FamilyId.ISMAIL_MASSON_RATIONAL: FamilyInfo(Parametrization.HYPER, ("t1", "t2", "t3", "t4"), False, "Eq. (5.22)"),
}


def _clean(value: Number) -> Number:
    value = complex(value)
    return value.real if value.imag == 0 else value


@dataclass(frozen=True)
class FamilySpec:
    """Família + base q + vetor de parâmetros (tupla ordenada de pares nome/valor)"""

    family_id: FamilyId
    base: QBase
    params: Tuple[Tuple[str, Number], ...] = ()

    @classmethod
    def make(cls, family: Union[str, FamilyId], q: Union[float, QBase], **params: Number) -> "FamilySpec":
        """
        Constrói e valida uma FamilySpec

        Args:
            family: FamilyId ou seu nome
            q: base (float ou QBase)
            **params: parâmetros nomeados; ausentes valem 0

        Raises:
            DomainViolation: família/parâmetro desconhecido ou fora do domínio
        """
        try:
            family_id = FamilyId(family)
        except ValueError:
            raise DomainViolation(f"família desconhecida: {family}", {"family": str(family)})
        base = q if isinstance(q, QBase) else QBase(q)
        info = FAMILY_INFO[family_id]
        unknown = set(params) - set(info.param_names)
        if unknown:
            raise DomainViolation(
                f"parâmetros {sorted(unknown)} não pertencem a {family_id.value}",
                {"allowed": list(info.param_names)},
            )
        values = {name: _clean(params.get(name, 0.0)) for name in info.param_names}
        spec = cls(family_id, base, tuple(sorted(values.items())))
        spec._validate()
        return spec

    def _validate(self):
        a = self.param("a")
        fid = self.family_id
        if fid in (FamilyId.AS_CARLITZ_U, FamilyId.BIG_Q_JACOBI):
            if not (isinstance(a, float) and a < 0):
                raise DomainViolation(f"{fid.value} exige a < 0, recebeu a={a}", {"a": str(a)})
        if fid in (FamilyId.AS_CARLITZ_V, FamilyId.AS_VERMA_RATIONAL):
            if not (isinstance(a, float) and a > 0):
                raise DomainViolation(f"{fid.value} exige a > 0, recebeu a={a}", {"a": str(a)})
        if fid is FamilyId.BIG_Q_JACOBI and self.param("t1") == 0:
            raise DomainViolation("BigQJacobi exige t1 != 0")

    @property
    def q(self) -> float:
        return self.base.q

    @property
    def info(self) -> FamilyInfo:
        return FAMILY_INFO[self.family_id]

    def param(self, name: str) -> Number:
        for key, value in self.params:
            if key == name:
                return value
        return 0.0

    def with_params(self, **params: Number) -> "FamilySpec":
        merged = dict(self.params)
        merged.update(params)
        return FamilySpec.make(self.family_id, self.base, **merged)

    def as_dict(self) -> Dict[str, Number]:
        return {"family": self.family_id.value, "q": self.q, **dict(self.params)}


@dataclass(frozen=True)
class NormConstant:
    family_id: FamilyId
    n: int
    value: complex
    equation_ref: str = ""

    @property
    def real(self) -> float:
        if abs(self.value.imag) > 1e-12 * max(1.0, abs(self.value)):
            raise ValueError(f"norma não real: {self.value}")
        return self.value.real


# ==============================================
# HELPERS
# ==============================================

def _log(value: Number) -> complex:
    value = complex(value)
    if value == 0:
        raise DenominatorPole("fator nulo em constante de norma")
    return cmath.log(value)


def _log_poch(a: Number, q: float, n: int) -> complex:
    """log (a; q)_n somado fator a fator"""
    total = 0j
    a = complex(a)
    for j in range(n):
        total += _log(1 - a * q ** j)
    return total


def _log_poch_inf(a: Number, q: float) -> complex:
    return _log(qpoch_inf_value(a, q))


def _shifted_product(c: Any, d: Any, q: Any, m: int) -> Any:
    """prod_{j<m} (c + d q^j), forma sem polos de (a; q)_m z^m"""
    result = mp_context().one
    for j in range(m):
        result *= c + d * q ** j
    return result


def _check_degree(n: int):
    if n < 0:
        raise DomainViolation(f"grau negativo n={n}", {"n": n})
    cap = get_settings().DEGREE_CAP
    if n > cap:
        raise DegreeOverflow(f"n={n} acima de DEGREE_CAP={cap}", {"n": n, "cap": cap})


# ==============================================
# RECORRÊNCIAS
# p_{n+1} = (A_n v + B_n) p_n - (D_n v + C_n) p_{n-1},  p_{-1} = 0, p_0 = 1
# v = x nas famílias reais e v = q^(-1/2) z nas do círculo
# ==============================================

Step = Tuple[complex, complex, complex, complex]


def _askey_wilson_step(spec: FamilySpec, n: int) -> Step:
    q = spec.q
    ts = sorted((complex(spec.param(k)) for k in ("t1", "t2", "t3", "t4")), key=abs, reverse=True)
    a, b, c, d = ts
    if a == 0:
        return 1, 0, 0, (0.25 * (1 - q ** n) if n > 0 else 0)
    abcd = a * b * c * d

    def big_a(k: int) -> complex:
        return ((1 - a * b * q ** k) * (1 - a * c * q ** k) * (1 - a * d * q ** k) * (1 - abcd * q ** (k - 1))
                / (a * (1 - abcd * q ** (2 * k - 1)) * (1 - abcd * q ** (2 * k))))

    def big_c(k: int) -> complex:
        if k == 0:
            return 0
        return (a * (1 - q ** k) * (1 - b * c * q ** (k - 1)) * (1 - b * d * q ** (k - 1)) * (1 - c * d * q ** (k - 1))
                / ((1 - abcd * q ** (2 * k - 2)) * (1 - abcd * q ** (2 * k - 1))))

    b_n = 0.5 * (a + 1 / a - (big_a(n) + big_c(n)))
    lam = 0.25 * big_a(n - 1) * big_c(n) if n > 0 else 0
    return 1, -b_n, 0, lam


def _big_q_jacobi_step(spec: FamilySpec, n: int) -> Step:
    """Mônico em x, via Andrews-Askey com X = x t1"""
    q = spec.q
    a, t1, t2 = (complex(spec.param(k)) for k in ("a", "t1", "t2"))
    alpha, beta, gamma = t1 / q, a * t2 / q, a * t1 / q
    ab = alpha * beta

    def big_a(k: int) -> complex:
        return ((1 - alpha * q ** (k + 1)) * (1 - ab * q ** (k + 1)) * (1 - gamma * q ** (k + 1))
                / ((1 - ab * q ** (2 * k + 1)) * (1 - ab * q ** (2 * k + 2))))

    def big_c(k: int) -> complex:
        if k == 0:
            return 0
        return (-q ** (k + 1) * (1 - q ** k) * (1 - beta * q ** k) * (alpha * gamma - alpha * alpha * beta * q ** k)
                / ((1 - ab * q ** (2 * k)) * (1 - ab * q ** (2 * k + 1))))

    b_n = (1 - big_a(n) - big_c(n)) / t1
    lam = big_a(n - 1) * big_c(n) / (t1 * t1) if n > 0 else 0
    return 1, -b_n, 0, lam


def _step(spec: FamilySpec, n: int) -> Step:
    q = spec.q
    qn = q ** n
    fid = spec.family_id
    if fid is FamilyId.CONTINUOUS_Q_HERMITE:
        return 2, 0, 0, 1 - qn
    if fid is FamilyId.DISCRETE_Q_HERMITE:
        return 1, 0, 0, q ** (n - 1) * (1 - qn)
    if fid is FamilyId.AS_CARLITZ_U:
        a = spec.param("a")
        return 1, -(1 + a) * qn, 0, -a * q ** (n - 1) * (1 - qn)
    if fid is FamilyId.AS_CARLITZ_V:
        a = spec.param("a")
        return 1, -(1 + a) / qn, 0, a * q ** (1 - 2 * n) * (1 - qn)
    if fid is FamilyId.QINV_HERMITE:
        return 2, 0, 0, (1 - qn) / qn
    if fid is FamilyId.AS_CHIHARA:
        t1, t2 = spec.param("t1"), spec.param("t2")
        return 2, -(t1 + t2) * qn, 0, (1 - qn) * (1 - t1 * t2 * q ** (n - 1))
    if fid is FamilyId.ASKEY_WILSON:
        return _askey_wilson_step(spec, n)
    if fid is FamilyId.BIG_Q_JACOBI:
        return _big_q_jacobi_step(spec, n)
    if fid is FamilyId.SZEGO_CIRCLE:
        return 1, 1, 1 - qn, 0
    if fid is FamilyId.PASTRO:
        big_a, b = spec.param("t1") * q, spec.param("t2")
        den = 1 - q * qn
        return (1 - big_a * qn) / den, (1 - b * qn) / den, (1 - big_a * b * q ** (n - 1)) / den, 0
    if fid is FamilyId.AS_CHIHARA_QINV:
        t1, t2 = spec.param("t1"), spec.param("t2")
        den = 1 - q * qn
        return 2 * qn / den, -(t1 + t2) / (q * den), 0, (t1 * t2 / (q * q) + q ** (n - 1)) / den
    raise NoRecurrence(f"{fid.value} não tem recorrência de três termos", {"family": fid.value})


def _run_recurrence(spec: FamilySpec, v, n_max: int, rescale: bool = False) -> Iterator[Tuple[int, object, float]]:
    """
    Gera (n, p_n, log_escala) para n = 0..n_max

    Com rescale=True (apenas escalares) p_n é devolvido como mantissa e o valor
    verdadeiro é p_n * exp(log_escala).
    """
    prev = v * 0
    cur = v * 0 + 1
    log_scale = 0.0
    yield 0, cur, log_scale
    for n in range(n_max):
        big_a, big_b, big_d, big_c = _step(spec, n)
        prev, cur = cur, (big_a * v + big_b) * cur - (big_d * v + big_c) * prev
        if rescale:
            size = max(abs(cur), abs(prev))
            if size > 1e100 or 0 < size < 1e-100:
                cur, prev = cur / size, prev / size
                log_scale += math.log(size)
        yield n + 1, cur, log_scale


def _variable(spec: FamilySpec, point: EvalPoint) -> complex:
    if spec.info.parametrization is Parametrization.CIRCLE:
        return point.z / spec.base.sqrt
    return point.x


def _variable_array(spec: FamilySpec, coords: np.ndarray, parametrization: Parametrization) -> np.ndarray:
    coords = np.asarray(coords)
    kind = Parametrization(parametrization)
    if spec.info.parametrization is Parametrization.CIRCLE:
        if kind is not Parametrization.CIRCLE:
            raise DomainViolation(f"{spec.family_id.value} só é avaliada no círculo")
        return np.exp(1j * coords) / spec.base.sqrt
    if kind is Parametrization.TRIG:
        return np.cos(coords).astype(complex)
    if kind is Parametrization.HYPER:
        return np.sinh(coords).astype(complex)
    if kind is Parametrization.LINE:
        return coords.astype(complex)
    raise DomainViolation(f"{spec.family_id.value} não é avaliada no círculo")


def eval_recurrence(spec: FamilySpec, n: int, point: EvalPoint) -> complex:
    """
    Avalia o polinômio de grau n pela recorrência de três termos

    Raises:
        NoRecurrence: famílias racionais
        DegreeOverflow: n acima de DEGREE_CAP
    """
    if not spec.info.has_recurrence:
        raise NoRecurrence(f"{spec.family_id.value} não tem recorrência", {"family": spec.family_id.value})
    _check_degree(n)
    v = complex(_variable(spec, point))
    value = 1 + 0j
    for _, value, _ in _run_recurrence(spec, v, n):
        pass
    return value


def recurrence_table(spec: FamilySpec, n_max: int, coords: np.ndarray,
                     parametrization: Parametrization) -> np.ndarray:
    """Valores p_0..p_{n_max} em todos os nós; shape (n_max + 1, len(coords))"""
    if not spec.info.has_recurrence:
        raise NoRecurrence(f"{spec.family_id.value} não tem recorrência", {"family": spec.family_id.value})
    _check_degree(n_max)
    v = _variable_array(spec, coords, parametrization)
    rows = [np.array(p, dtype=complex) for _, p, _ in _run_recurrence(spec, v, n_max)]
    return np.vstack(rows)


def leading_coefficient(spec: FamilySpec, n: int) -> complex:
    """Coeficiente líder da normalização de referência na variável v"""
    if not spec.info.has_recurrence:
        raise NoRecurrence(f"{spec.family_id.value} não tem recorrência")
    result = 1 + 0j
    for k in range(n):
        result *= _step(spec, k)[0]
    return result


# ==============================================
# REPRESENTAÇÕES EXPLÍCITAS
# ==============================================

ExplicitForm = Callable[[FamilySpec, int, EvalPoint], Any]

# As formas abaixo rodam no contexto mpmath corrente (ver qcore.high_precision):
# parâmetros, q e coordenadas são convertidos a partir dos valores de entrada,
# e todo produto derivado é formado já em precisão estendida.


def _mp_params(spec: FamilySpec, *names: str) -> Tuple[Any, ...]:
    """q seguido dos parâmetros pedidos, no contexto mpmath corrente"""
    ctx = mp_context()
    return (ctx.mpf(spec.q),) + tuple(ctx.convert(spec.param(name)) for name in names)


def _explicit_cqh(spec, n, point):
    (q,) = _mp_params(spec)
    w = point.precise().w
    return sum(mp_qbinomial(n, k, q) * w ** (n - 2 * k) for k in range(n + 1))


def _carlitz_u_sum(a, q, n: int, x):
    total = 0
    for k in range(n + 1):
        head = 1
        for i in range(k):
            head *= x - a * q ** i
        total += mp_qbinomial(n, k, q) * head * (-1) ** (n - k) * q ** ((n - k) * (n - k - 1) // 2)
    return total


def _explicit_discrete(spec, n, point):
    (q,) = _mp_params(spec)
    return _carlitz_u_sum(-1, q, n, point.precise().x)


def _explicit_u(spec, n, point):
    q, a = _mp_params(spec, "a")
    return _carlitz_u_sum(a, q, n, point.precise().x)


def _explicit_v(spec, n, point):
    q, a = _mp_params(spec, "a")
    x = point.precise().x
    total = sum(
        mp_qpoch(x, q, k) * a ** (n - k) / (mp_qpoch(q, q, k) * mp_qpoch(q, q, n - k))
        for k in range(n + 1)
    )
    return (-1) ** n * q ** -(n * (n - 1) // 2) * mp_qpoch(q, q, n) * total


def _explicit_qinv(spec, n, point):
    (q,) = _mp_params(spec)
    e = point.precise().e_xi
    return sum(
        mp_qbinomial(n, k, q) * (-1) ** k * q ** (k * (k - n)) * e ** (n - 2 * k)
        for k in range(n + 1)
    )


def _require_t1(spec: FamilySpec) -> complex:
    t1 = complex(spec.param("t1"))
    if t1 == 0:
        raise DomainViolation(f"representação explícita de {spec.family_id.value} exige t1 != 0")
    return t1


def _explicit_asc(spec, n, point):
    _require_t1(spec)
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    w = point.precise().w
    return mp_phi([q ** -n, t1 * w, t1 / w], [t1 * t2, 0], q, q, n)


def _explicit_asc_reversed(spec, n, point):
    _require_t1(spec)
    if spec.param("t2") == 0:
        raise DomainViolation("forma invertida exige t2 != 0")
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    w = point.precise().w
    prefactor = (mp_qpoch(t1 * w, q, n) * mp_qpoch(t1 / w, q, n) / mp_qpoch(t1 * t2, q, n)
                 * q ** -(n * (n - 1) // 2) * (-1) ** n)
    total = 0
    for k in range(n + 1):
        num = mp_qpoch(q ** -n, q, k) * mp_qpoch(q ** (1 - n) / (t1 * t2), q, k)
        den = mp_qpoch(q, q, k) * mp_qpoch(q ** (1 - n) * w / t1, q, k) * mp_qpoch(q ** (1 - n) / (w * t1), q, k)
        total += (-t2 / t1) ** k * num / den * q ** (k * (k + 1) // 2)
    return prefactor * total


def _explicit_asc_pfaff(spec, n, point):
    _require_t1(spec)
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    w = point.precise().w
    prefactor = mp_qpoch(t1 / w, q, n) * (t1 * w) ** n / mp_qpoch(t1 * t2, q, n)
    return prefactor * mp_phi([q ** -n, t2 * w], [q ** (1 - n) * w / t1], q / (w * t1), q, n)


def _explicit_asc_cauchy(spec, n, point):
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    w = point.precise().w
    total = sum(
        mp_qpoch(t2 * w, q, k) / mp_qpoch(q, q, k) * w ** -k
        * mp_qpoch(t1 / w, q, n - k) / mp_qpoch(q, q, n - k) * w ** (n - k)
        for k in range(n + 1)
    )
    return mp_qpoch(q, q, n) * t1 ** n / mp_qpoch(t1 * t2, q, n) * total


def _explicit_askey_wilson(spec, n, point):
    names = ["t1", "t2", "t3", "t4"]
    if all(spec.param(name) == 0 for name in names):
        return _explicit_cqh(spec, n, point)
    if spec.param("t1") == 0:
        # simetria nos quatro parâmetros
        names.sort(key=lambda name: spec.param(name) == 0)
    q, t1, t2, t3, t4 = _mp_params(spec, *names)
    w = point.precise().w
    prefactor = t1 ** -n * mp_qpoch(t1 * t2, q, n) * mp_qpoch(t1 * t3, q, n) * mp_qpoch(t1 * t4, q, n)
    series = mp_phi(
        [q ** -n, t1 * t2 * t3 * t4 * q ** (n - 1), t1 * w, t1 / w],
        [t1 * t2, t1 * t3, t1 * t4], q, q, n,
    )
    return prefactor * series


def _explicit_big_q_jacobi(spec, n, point):
    q, a, t1, t2 = _mp_params(spec, "a", "t1", "t2")
    x = point.precise().x
    return mp_phi([q ** -n, a * t1 * t2 * q ** (n - 1), x * t1], [t1, a * t1], q, q, n)


def _explicit_big_q_jacobi_symmetric(spec, n, point):
    q, a, t1 = _mp_params(spec, "a", "t1")
    return t1 ** -n * mp_qpoch(t1, q, n) * mp_qpoch(a * t1, q, n) * _explicit_big_q_jacobi(spec, n, point)


def andrews_askey_big_q_jacobi(n: int, big_x: Any, alpha: Any, beta: Any, gamma: Any, q: Any) -> Any:
    """P_n(X; alpha, beta, gamma : q) na normalização de Andrews-Askey, no contexto mpmath corrente"""
    q = mp_context().convert(q)
    return mp_phi([q ** -n, alpha * beta * q ** (n + 1), big_x], [alpha * q, gamma * q], q, q, n)


def _explicit_big_q_jacobi_andrews_askey(spec, n, point):
    q, a, t1, t2 = _mp_params(spec, "a", "t1", "t2")
    x = point.precise().x
    return andrews_askey_big_q_jacobi(n, x * t1, t1 / q, a * t2 / q, a * t1 / q, q)


def _explicit_szego(spec, n, point):
    (q,) = _mp_params(spec)
    y = point.precise().z / mp_context().sqrt(q)
    return sum(mp_qbinomial(n, k, q) * y ** k for k in range(n + 1))


def _explicit_pastro(spec, n, point):
    q, a, b = _mp_params(spec, "t1", "t2")
    y = point.precise().z / mp_context().sqrt(q)
    return sum(
        mp_qpoch(a * q, q, k) * mp_qpoch(b, q, n - k) / (mp_qpoch(q, q, k) * mp_qpoch(q, q, n - k)) * y ** k
        for k in range(n + 1)
    )


def _explicit_pastro_tilde(spec, n, point):
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    z = point.precise().z
    return mp_phi([q ** -n, t1 * mp_context().sqrt(q) * z, t1 * q], [0, t1 * t2 * q], q, q, n)


def _explicit_verma_psi(spec, n, point):
    q, a, t1, t2 = _mp_params(spec, "a", "t1", "t2")
    x = point.precise().x
    return mp_phi([q ** -n, t1, a * t1], [x * t1, a * t1 * t2 / q], q, q, n)


def verma_parameters(a: Number, t1: Number, t2: Number, alpha: Number = 1.0) -> Tuple[Any, Any, Any, Any]:
    """
    (alpha, beta, gamma, delta) de R_n equivalentes a psi_n(x; a, t1, t2)

    beta = t1, gamma = a t2, delta = alpha t2 / t1; alpha livre (absorvido pela
    variável). Os valores saem no contexto mpmath corrente.
    """
    if t1 == 0 or alpha == 0:
        raise DomainViolation("tradução para R_n exige t1 != 0 e alpha != 0")
    ctx = mp_context()
    a, t1, t2, alpha = (ctx.convert(v) for v in (a, t1, t2, alpha))
    return alpha, t1, a * t2, alpha * t2 / t1


def verma_rational(n: int, y: Any, alpha: Any, beta: Any, gamma: Any, delta: Any, q: Any) -> Any:
    """R_n(y; alpha, beta, gamma, delta; q) no contexto mpmath corrente"""
    q = mp_context().convert(q)
    return mp_phi([beta, alpha * gamma / delta, q ** -n], [beta * gamma / q, alpha * q * y], q, q, n)


def _explicit_verma_translated(spec, n, point):
    (q,) = _mp_params(spec)
    x = point.precise().x
    alpha, beta, gamma, delta = verma_parameters(spec.param("a"), spec.param("t1"), spec.param("t2"))
    return verma_rational(n, beta * x / (q * alpha), alpha, beta, gamma, delta, q)


def _explicit_u_qinv(spec, n, point):
    """Forma 2phi1 escrita sem polos em t1 = 0 ou t2 = 0"""
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    e = point.precise().e_xi
    prefactor = _shifted_product(-t2 / q, -1 / e, q, n) / mp_qpoch(q, q, n)
    total = 0
    for k in range(n + 1):
        den = mp_qpoch(q, q, k) * mp_qpoch(-t2 * e * q ** -n, q, k)
        if den == 0:
            raise DenominatorPole("(-t2 e^xi q^-n; q)_k = 0", {"k": k})
        total += mp_qpoch(q ** -n, q, k) / den * _shifted_product(-t1 * e, q * e * e, q, k)
    return prefactor * total


def _explicit_u_qinv_cauchy(spec, n, point):
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    e = point.precise().e_xi
    return sum(
        _shifted_product(-t1 / q, e, q, k) / mp_qpoch(q, q, k)
        * _shifted_product(-t2 / q, -1 / e, q, n - k) / mp_qpoch(q, q, n - k)
        for k in range(n + 1)
    )


def _explicit_u_qinv_3phi1(spec, n, point):
    if spec.param("t1") == 0 or spec.param("t2") == 0:
        raise DomainViolation("forma 3phi1 exige t1, t2 != 0")
    q, t1, t2 = _mp_params(spec, "t1", "t2")
    e = point.precise().e_xi
    prefactor = mp_qpoch(-q * q / (t1 * t2), q, n) / mp_qpoch(q, q, n) * (-t2 / q) ** n
    return prefactor * mp_phi(
        [q ** -n, q * e / t1, -q / (e * t1)], [-q * q / (t1 * t2)], t1 / t2 * q ** n, q, n,
    )


def _explicit_ismail_masson(spec, n, point):
    q, t1, t2, t3, t4 = _mp_params(spec, "t1", "t2", "t3", "t4")
    e = point.precise().e_xi
    if spec.param("t3") == 0 and spec.param("t4") == 0:
        return mp_phi([q ** -n, -t1 * t2 * q ** (n - 2), 0], [-t1 * e, t1 / e], q, q, n)
    return mp_phi(
        [q ** -n, -t1 * t2 * q ** (n - 2), -t1 * t3 / q, -t1 * t4 / q],
        [-t1 * e, t1 / e, t1 * t2 * t3 * t4 * q ** -3], q, q, n,
    )


EXPLICIT_FORMS: Dict[FamilyId, Dict[str, ExplicitForm]] = {
    FamilyId.CONTINUOUS_Q_HERMITE: {"default": _explicit_cqh},
    FamilyId.DISCRETE_Q_HERMITE: {"default": _explicit_discrete},
    FamilyId.QINV_HERMITE: {"default": _explicit_qinv},
    FamilyId.AS_CARLITZ_U: {"default": _explicit_u},
    FamilyId.AS_CARLITZ_V: {"default": _explicit_v},
    FamilyId.AS_CHIHARA: {
        "default": _explicit_asc,
        "reversed": _explicit_asc_reversed,
        "pfaff": _explicit_asc_pfaff,
        "cauchy": _explicit_asc_cauchy,
    },
    FamilyId.ASKEY_WILSON: {"default": _explicit_askey_wilson},
    FamilyId.BIG_Q_JACOBI: {
        "default": _explicit_big_q_jacobi,
        "symmetric": _explicit_big_q_jacobi_symmetric,
        "andrews_askey": _explicit_big_q_jacobi_andrews_askey,
    },
    FamilyId.SZEGO_CIRCLE: {"default": _explicit_szego},
    FamilyId.PASTRO: {"default": _explicit_pastro, "pastro_tilde": _explicit_pastro_tilde},
    FamilyId.AS_VERMA_RATIONAL: {"default": _explicit_verma_psi, "verma": _explicit_verma_translated},
    FamilyId.AS_CHIHARA_QINV: {
        "default": _explicit_u_qinv,
        "cauchy": _explicit_u_qinv_cauchy,
        "3phi1": _explicit_u_qinv_3phi1,
    },
    FamilyId.ISMAIL_MASSON_RATIONAL: {"default": _explicit_ismail_masson},
}

TARGET_VARIANTS = ("orthonormal", "monic")


def explicit_variants(spec: FamilySpec) -> Tuple[str, ...]:
    return tuple(EXPLICIT_FORMS[spec.family_id])


@high_precision
def explicit_value(spec: FamilySpec, n: int, point: EvalPoint, variant: str = "default") -> Any:
    """
    Forma explícita em precisão estendida

    Chamada de dentro de outra função @high_precision devolve o número mpmath
    na precisão corrente; chamada direta devolve complex.
    """
    if n < 0:
        raise DomainViolation(f"grau negativo n={n}", {"n": n})
    forms = EXPLICIT_FORMS[spec.family_id]
    if variant not in forms:
        raise DomainViolation(
            f"variante '{variant}' inexistente para {spec.family_id.value}",
            {"variants": list(forms)},
        )
    if n == 0:
        return mp_context().one
    return forms[variant](spec, n, point)


def eval_explicit(spec: FamilySpec, n: int, point: EvalPoint, variant: str = "default") -> complex:
    """
    Avalia pela representação hipergeométrica explícita

    Args:
        variant: representação alternativa (ver explicit_variants)

    Raises:
        DomainViolation: grau negativo ou variante inexistente
        DenominatorPole: propagado de qcore
    """
    return complex(explicit_value(spec, n, point, variant))


def explicit_table(spec: FamilySpec, n_max: int, coords: np.ndarray,
                   parametrization: Parametrization, variant: str = "default") -> np.ndarray:
    """Tabela da forma explícita nos nós, shape (n_max + 1, len(coords))"""
    points = [EvalPoint(parametrization, c) for c in np.asarray(coords)]
    table = np.empty((n_max + 1, len(points)), dtype=complex)
    for n in range(n_max + 1):
        table[n] = [eval_explicit(spec, n, p, variant) for p in points]
    return table


# ==============================================
# NORMALIZAÇÃO
# ==============================================

def _default_map(spec: FamilySpec, n: int) -> complex:
    q = spec.q
    fid = spec.family_id
    if fid is FamilyId.AS_CHIHARA:
        t1 = _require_t1(spec)
        return t1 ** -n * qpoch_value(t1 * spec.param("t2"), q, n)
    if fid is FamilyId.ASKEY_WILSON:
        abcd = 1 + 0j
        for k in ("t1", "t2", "t3", "t4"):
            abcd *= spec.param(k)
        lead = 2 ** n * qpoch_value(abcd * q ** (n - 1), q, n)
        if lead == 0:
            raise DenominatorPole("(t1 t2 t3 t4 q^(n-1); q)_n = 0", {"n": n})
        return 1 / lead
    if fid is FamilyId.BIG_Q_JACOBI:
        a, t1, t2 = spec.param("a"), spec.param("t1"), spec.param("t2")
        lead = t1 ** n * qpoch_value(a * t1 * t2 * q ** (n - 1), q, n) / (qpoch_value(t1, q, n) * qpoch_value(a * t1, q, n))
        if lead == 0:
            raise DenominatorPole("coeficiente líder nulo", {"n": n})
        return 1 / lead
    return 1 + 0j


def _variant_map(spec: FamilySpec, n: int, variant: str) -> complex:
    q = spec.q
    if spec.family_id is FamilyId.BIG_Q_JACOBI and variant == "symmetric":
        a, t1, t2 = spec.param("a"), spec.param("t1"), spec.param("t2")
        return 1 / qpoch_value(a * t1 * t2 * q ** (n - 1), q, n)
    if spec.family_id is FamilyId.PASTRO and variant == "pastro_tilde":
        t1, t2 = spec.param("t1"), spec.param("t2")
        return qpoch_value(t1 * t2 * q, q, n) / (qpoch_value(q, q, n) * (t1 * q) ** n)
    return _default_map(spec, n)


def normalization_map(spec: FamilySpec, n: int, variant: str = "default") -> complex:
    """
    Multiplicador que leva a forma explícita à normalização de referência

    Variantes de representação (default/recurrence, reversed, pfaff, cauchy,
    symmetric, andrews_askey, pastro_tilde, verma, 3phi1) satisfazem
    eval_explicit(variant) * map = eval_recurrence. As variantes-alvo
    "orthonormal" e "monic" satisfazem eval_recurrence * map = alvo.
    """
    if variant in ("default", "recurrence"):
        return _default_map(spec, n)
    if variant in TARGET_VARIANTS:
        if not spec.info.has_recurrence:
            raise NoRecurrence(f"{spec.family_id.value} não tem normalização de referência")
        if variant == "monic":
            return 1 / leading_coefficient(spec, n)
        return 1 / (_default_map(spec, n) * cmath.sqrt(norm_constant(spec, n).value))
    if variant not in EXPLICIT_FORMS[spec.family_id]:
        raise DomainViolation(f"variante '{variant}' inexistente para {spec.family_id.value}")
    return _variant_map(spec, n, variant)


def printed_table(spec: FamilySpec, n_max: int, coords: np.ndarray,
                  parametrization: Parametrization) -> np.ndarray:
    """
    Valores na normalização das relações de ortogonalidade impressas

    Famílias polinomiais usam a recorrência dividida pelo mapa; racionais usam
    a forma explícita.
    """
    if not spec.info.has_recurrence:
        return explicit_table(spec, n_max, coords, parametrization)
    table = recurrence_table(spec, n_max, coords, parametrization)
    for n in range(n_max + 1):
        table[n] /= _default_map(spec, n)
    return table


# ==============================================
# CONSTANTES DE NORMA
# ==============================================

def _pair_logs(ts, q: float, shift: int) -> complex:
    total = 0j
    for j in range(len(ts)):
        for k in range(j + 1, len(ts)):
            total += _log_poch_inf(ts[j] * ts[k] * q ** shift, q)
    return total


def _norm_log(spec: FamilySpec, n: int, variant: str) -> complex:
    q = spec.q
    fid = spec.family_id
    lq = n * math.log(q)
    log_qn = _log_poch(q, q, n)
    two_pi = math.log(2 * math.pi)

    if fid is FamilyId.CONTINUOUS_Q_HERMITE:
        return two_pi + log_qn - _log_poch_inf(q, q)
    if fid is FamilyId.DISCRETE_Q_HERMITE:
        return (n - 1) * lq / 2 + log_qn
    if fid is FamilyId.AS_CARLITZ_U:
        return n * _log(-spec.param("a")) + (n - 1) * lq / 2 + log_qn
    if fid is FamilyId.AS_CARLITZ_V:
        return n * _log(spec.param("a")) - n * lq + log_qn
    if fid is FamilyId.QINV_HERMITE:
        return -(n + 1) * lq / 2 + log_qn
    if fid is FamilyId.AS_CHIHARA:
        t1, t2 = spec.param("t1"), spec.param("t2")
        return (two_pi + log_qn + 2 * n * _log(t1) - _log_poch_inf(q, q) - _log_poch_inf(t1 * t2, q)
                - _log_poch(t1 * t2, q, n))
    if fid is FamilyId.ASKEY_WILSON:
        ts = [spec.param(k) for k in ("t1", "t2", "t3", "t4")]
        abcd = ts[0] * ts[1] * ts[2] * ts[3]
        return (two_pi + _log_poch_inf(abcd * q ** (2 * n), q) + _log_poch(abcd * q ** (n - 1), q, n)
                - _log_poch_inf(q ** (n + 1), q) - _pair_logs(ts, q, n))
    if fid is FamilyId.BIG_Q_JACOBI:
        a, t1, t2 = spec.param("a"), spec.param("t1"), spec.param("t2")
        s = a * t1 * t2
        common = (log_qn + _log_poch(t2, q, n) + _log_poch(a * t2, q, n) + _log_poch(s * q ** (n - 1), q, n)
                  + _log_poch_inf(s * q ** (2 * n), q)
                  - sum(_log_poch_inf(v, q) for v in (t1, a * t1, t2, a * t2))
                  + (n - 1) * lq / 2)
        if variant == "symmetric":
            return common + _log_poch(t1, q, n) + _log_poch(a * t1, q, n) + n * _log(-a)
        return common - _log_poch(t1, q, n) - _log_poch(a * t1, q, n) + n * _log(-a * t1 * t1)
    if fid is FamilyId.SZEGO_CIRCLE:
        return log_qn - lq - _log_poch_inf(q, q)
    if fid is FamilyId.PASTRO:
        t1, t2 = spec.param("t1"), spec.param("t2")
        s = t1 * t2 * q
        if variant == "pastro_tilde":
            return log_qn - _log_poch(s, q, n) + n * _log(s)
        return _log_poch(s, q, n) - lq - log_qn
    if fid is FamilyId.AS_VERMA_RATIONAL:
        a, t1, t2 = spec.param("a"), spec.param("t1"), spec.param("t2")
        s = a * t1 * t2 / q
        return (sum(_log_poch_inf(v, q) for v in (t1, a * t1, t2, a * t2)) + log_qn + n * _log(s)
                - _log_poch_inf(s, q) - _log_poch(s, q, n))
    if fid is FamilyId.AS_CHIHARA_QINV:
        t1, t2 = spec.param("t1"), spec.param("t2")
        return n * (n - 3) / 2 * math.log(q) + _log_poch(-t1 * t2 * q ** (-n - 1), q, n) - log_qn
    if fid is FamilyId.ISMAIL_MASSON_RATIONAL:
        return _ismail_masson_norm_log(spec, n)
    raise DomainViolation(f"sem constante de norma para {fid.value}")


def _ismail_masson_norm_log(spec: FamilySpec, n: int) -> complex:
    q = spec.q
    t1, t2, t3, t4 = (complex(spec.param(k)) for k in ("t1", "t2", "t3", "t4"))
    s = t1 * t2
    head = (_log(1 + s * q ** (n - 2)) - _log(1 + s * q ** (2 * n - 2)) + _log_poch_inf(-s * q ** (n - 1), q)
            + _log_poch(q, q, n))
    if t3 == 0 and t4 == 0:
        return head + n * (n - 3) / 2 * math.log(q) + n * _log(s)
    total = t1 * t2 * t3 * t4 * q ** -3
    # (-q^2/(t3 t4); q)_n (T q^-3)^n sem polo em t3 t4 = 0
    scaled = sum(_log(s * (t3 * t4 + q ** (k + 2)) * q ** -3) for k in range(n))
    ts = [t1, t2, t3, t4]
    return (head + scaled - _log_poch(total, q, n)
            + sum(_log_poch_inf(-ts[j] * ts[k] / q, q) for j in range(4) for k in range(j + 1, 4))
            - _log_poch_inf(total, q) - _log_poch_inf(-s / q, q))


def _validate_norm_domain(spec: FamilySpec):
    q = spec.q
    fid = spec.family_id
    if fid is FamilyId.AS_CHIHARA:
        ts = [spec.param("t1"), spec.param("t2")]
        if max(abs(t) for t in ts) >= 1:
            raise DomainViolation("Eq. (2.9) exige |t1|, |t2| < 1", spec.as_dict())
    if fid is FamilyId.ASKEY_WILSON:
        if max(abs(spec.param(k)) for k in ("t1", "t2", "t3", "t4")) >= 1:
            raise DomainViolation("Eq. (2.18) exige max |t_j| < 1", spec.as_dict())
    if fid is FamilyId.BIG_Q_JACOBI:
        a = spec.param("a")
        for name in ("t1", "t2"):
            t = spec.param(name)
            if not (isinstance(t, float) and 1 / a < t < 1):
                raise DomainViolation(f"Eq. (3.11) exige {name} em (1/a, 1)", spec.as_dict())
    if fid is FamilyId.PASTRO:
        if max(abs(spec.param("t1")), abs(spec.param("t2"))) >= 1 / math.sqrt(q):
            raise DomainViolation("Eq. (4.8) exige |t1|, |t2| < q^(-1/2)", spec.as_dict())
    if fid is FamilyId.AS_VERMA_RATIONAL:
        bound = math.sqrt(q / spec.param("a"))
        if max(abs(spec.param("t1")), abs(spec.param("t2"))) >= bound:
            raise DomainViolation("Eq. (3.24) exige |t1|, |t2| < sqrt(q/a)", spec.as_dict())
    if fid is FamilyId.ISMAIL_MASSON_RATIONAL:
        t1, t2, t3, t4 = (abs(spec.param(k)) for k in ("t1", "t2", "t3", "t4"))
        if t1 * t3 >= q ** 1.5 or t2 * t4 >= q ** 1.5:
            raise DomainViolation("Eq. (5.25) exige |t1 t3|, |t2 t4| < q^(3/2)", spec.as_dict())


def norm_constant(spec: FamilySpec, n: int, variant: str = "default") -> NormConstant:
    """
    Constante zeta_n da relação de ortogonalidade (ou biortogonalidade) impressa

    Args:
        variant: "symmetric" (BigQJacobi, Eq. (3.13)) ou "pastro_tilde"
            (Pastro, Eq. (4.5)); demais famílias usam a forma padrão

    Raises:
        DomainViolation: parâmetros fora da validade da relação
    """
    if n < 0:
        raise DomainViolation(f"grau negativo n={n}", {"n": n})
    _validate_norm_domain(spec)
    ref = spec.info.norm_ref
    if variant == "symmetric":
        ref = "Eq. (3.13)"
    elif variant == "pastro_tilde":
        ref = "Eq. (4.5)"
    elif spec.family_id is FamilyId.ISMAIL_MASSON_RATIONAL and (spec.param("t3") or spec.param("t4")):
        ref = "Eq. (5.25)"
    value = cmath.exp(_norm_log(spec, n, variant))
    return NormConstant(spec.family_id, n, _clean(value) if abs(complex(value).imag) < 1e-300 else value, ref)


def log_reference_norm(spec: FamilySpec, n: int) -> float:
    """log |zeta_n| na normalização de referência (recorrência)"""
    return (_norm_log(spec, n, "default") + 2 * _log(_default_map(spec, n))).real


# ==============================================
# FUNÇÕES GERADORAS
# sum_n p_n(x) t^n / c_n, com p_n na normalização de referência
# ==============================================

def _genfun_log_coefficient(spec: FamilySpec, n: int) -> complex:
    q = spec.q
    fid = spec.family_id
    log_qn = _log_poch(q, q, n)
    if fid in (FamilyId.CONTINUOUS_Q_HERMITE, FamilyId.DISCRETE_Q_HERMITE, FamilyId.AS_CARLITZ_U,
               FamilyId.AS_CHIHARA, FamilyId.SZEGO_CIRCLE):
        return log_qn
    if fid is FamilyId.AS_CARLITZ_V:
        return log_qn - n * (n - 1) / 2 * math.log(q) + 1j * math.pi * (n % 2)
    if fid is FamilyId.QINV_HERMITE:
        return log_qn - n * (n - 1) / 2 * math.log(q)
    if fid is FamilyId.ASKEY_WILSON:
        t1, t2, t3, t4 = (spec.param(k) for k in ("t1", "t2", "t3", "t4"))
        return (log_qn + _log_poch(t1 * t2, q, n) + _log_poch(t3 * t4, q, n)
                + _log(_default_map(spec, n)))
    if fid in (FamilyId.PASTRO, FamilyId.AS_CHIHARA_QINV):
        return 0j
    raise DomainViolation(f"{fid.value} não tem função geradora", {"family": fid.value})


def gen_function_radius(spec: FamilySpec, point: EvalPoint) -> float:
    """Raio do disco de convergência em t para o ponto dado"""
    q = spec.q
    fid = spec.family_id
    if fid in (FamilyId.CONTINUOUS_Q_HERMITE, FamilyId.AS_CHIHARA, FamilyId.ASKEY_WILSON):
        return 1.0
    if fid in (FamilyId.DISCRETE_Q_HERMITE, FamilyId.AS_CARLITZ_U):
        x = abs(point.x)
        return math.inf if x == 0 else 1 / x
    if fid is FamilyId.AS_CARLITZ_V:
        return min(1.0, 1 / spec.param("a"))
    if fid is FamilyId.QINV_HERMITE:
        return math.inf
    if fid in (FamilyId.SZEGO_CIRCLE, FamilyId.PASTRO):
        return min(1.0, math.sqrt(q))
    if fid is FamilyId.AS_CHIHARA_QINV:
        bounds = [q / abs(spec.param(k)) for k in ("t1", "t2") if spec.param(k) != 0]
        return min(bounds) if bounds else math.inf
    raise DomainViolation(f"{fid.value} não tem função geradora", {"family": fid.value})


def _check_disc(spec: FamilySpec, t: complex, point: EvalPoint):
    radius = gen_function_radius(spec, point)
    if abs(t) >= radius:
        raise OutsideDisc(
            f"|t|={abs(t):.6g} fora do disco de raio {radius:.6g} de {spec.family_id.value}",
            {"t": str(t), "radius": radius},
        )


def gen_function_partial(spec: FamilySpec, t: Number, point: EvalPoint, n_terms: int) -> complex:
    """
    Soma parcial sum_{n <= N} p_n(x) t^n / c_n

    A recorrência roda com reescala (mantissa + log) para suportar os fatores
    q^(-n^2/2) das famílias V e q^-1-Hermite.

    Raises:
        OutsideDisc: |t| fora do disco de convergência
    """
    t = complex(t)
    _genfun_log_coefficient(spec, 0)
    _check_disc(spec, t, point)
    if t == 0:
        return 1 + 0j
    _check_degree(n_terms)
    log_t = cmath.log(t)
    v = complex(_variable(spec, point))
    total = 0j
    for n, mantissa, log_scale in _run_recurrence(spec, v, n_terms, rescale=True):
        if mantissa == 0:
            continue
        total += mantissa * cmath.exp(log_scale + n * log_t - _genfun_log_coefficient(spec, n))
    return total


def gen_function_closed(spec: FamilySpec, t: Number, point: EvalPoint) -> complex:
    """Lado direito em forma de produto (ou produto de duas 2phi1 para Askey-Wilson)"""
    t = complex(t)
    _check_disc(spec, t, point)
    q = spec.q
    fid = spec.family_id

    def inf(*params):
        result = 1 + 0j
        for p in params:
            result *= qpoch_inf_value(p, q)
        return result

    if fid is FamilyId.CONTINUOUS_Q_HERMITE:
        w = point.w
        return 1 / inf(t * w, t / w)
    if fid in (FamilyId.DISCRETE_Q_HERMITE, FamilyId.AS_CARLITZ_U):
        a = -1.0 if fid is FamilyId.DISCRETE_Q_HERMITE else spec.param("a")
        return inf(t, a * t) / inf(point.x * t)
    if fid is FamilyId.AS_CARLITZ_V:
        return inf(point.x * t) / inf(t, spec.param("a") * t)
    if fid is FamilyId.QINV_HERMITE:
        e = point.e_xi
        return inf(-t * e, t / e)
    if fid is FamilyId.AS_CHIHARA:
        w = point.w
        return inf(t * spec.param("t1"), t * spec.param("t2")) / inf(t * w, t / w)
    if fid is FamilyId.ASKEY_WILSON:
        w = point.w
        t1, t2, t3, t4 = (spec.param(k) for k in ("t1", "t2", "t3", "t4"))
        return (phi([t1 * w, t2 * w], [t1 * t2], t / w, spec.base)
                * phi([t3 / w, t4 / w], [t3 * t4], t * w, spec.base))
    if fid is FamilyId.SZEGO_CIRCLE:
        return 1 / inf(t, t * point.z / spec.base.sqrt)
    if fid is FamilyId.PASTRO:
        z = point.z
        a, b = spec.param("t1"), spec.param("t2")
        return inf(a * t * z * spec.base.sqrt, b * t) / inf(t * z / spec.base.sqrt, t)
    if fid is FamilyId.AS_CHIHARA_QINV:
        e = point.e_xi
        t1, t2 = spec.param("t1"), spec.param("t2")
        return inf(-t * e, t / e) / inf(-t1 * t / q, -t2 * t / q)
    raise DomainViolation(f"{fid.value} não tem função geradora", {"family": fid.value})


def estimate_radius(spec: FamilySpec, degree_cap: Optional[int] = None) -> float:
    """
    Estimativa por teste da razão do raio de sum sqrt(zeta_n)/c_n z^n

    Retorna math.inf quando as razões decaem sem limite.
    """
    cap = degree_cap or get_settings().DEGREE_CAP
    logs = []
    for n in range(cap + 1):
        try:
            value = 0.5 * log_reference_norm(spec, n) - _genfun_log_coefficient(spec, n).real
        except (DenominatorPole, OverflowError, ValueError):
            break
        if not math.isfinite(value):
            break
        logs.append(value)
    if len(logs) < 4:
        raise DomainViolation(f"sequências insuficientes para estimar o raio de {spec.family_id.value}")
    diffs = [b - a for a, b in zip(logs, logs[1:])]
    trend = diffs[-1] - diffs[len(diffs) // 2]
    logger.debug(f"estimate_radius {spec.family_id.value}: última razão {diffs[-1]:.6g}, tendência {trend:.6g}")
    if trend < -0.5:
        return math.inf
    return math.exp(-diffs[-1])


# ==============================================
# FUNÇÕES chi_t E h~_n
# ==============================================

def chi(t: Number, xi: float, base: QBase) -> complex:
    """chi_t(sinh xi) = (-t e^xi, t e^-xi; q)_inf"""
    e = math.exp(xi)
    return qpoch_inf_value(-t * e, base.q) * qpoch_inf_value(t / e, base.q)


def chi_algebraic(t: Number, x: float, base: QBase) -> complex:
    """chi_t na forma algébrica (-t(sqrt(x^2+1) + x), t(sqrt(x^2+1) - x); q)_inf"""
    root = math.sqrt(x * x + 1)
    return qpoch_inf_value(-t * (root + x), base.q) * qpoch_inf_value(t * (root - x), base.q)


def chi_array(t: Number, xi: np.ndarray, q: float) -> np.ndarray:
    """chi_t vetorizado sobre xi"""
    e = np.exp(np.asarray(xi, dtype=float))
    return qpoch_inf_array(-t * e, q) * qpoch_inf_array(t / e, q)


def orthonormal_qinv_hermite(n_max: int, xi: Number, base: QBase) -> np.ndarray:
    """
    h~_0..h~_{n_max} em x = sinh(xi), xi complexo permitido

    h~_{n+1} = [2x q^((n+1)/2) h~_n - q^(1/2) sqrt(1-q^n) h~_{n-1}] / sqrt(1-q^(n+1))
    """
    q = base.q
    x = cmath.sinh(xi)
    values = np.zeros(n_max + 1, dtype=complex)
    values[0] = 1
    prev, cur = 0j, 1 + 0j
    for n in range(n_max):
        nxt = (2 * x * q ** ((n + 1) / 2) * cur - math.sqrt(q) * math.sqrt(1 - q ** n) * prev) / math.sqrt(1 - q ** (n + 1))
        prev, cur = cur, nxt
        values[n + 1] = cur
    return values
