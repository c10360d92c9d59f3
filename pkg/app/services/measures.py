"""
Medidas de ortogonalidade da escada q-Hermite

Três formatos: densidade em intervalo (theta em [0, pi] ou reta real), peso no
círculo (theta em [0, 2pi), convenção dtheta/2pi) e massas discretas
enumeradas sob demanda com cota de cauda geométrica.
"""

import csv
import io
import logging
import math
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import get_settings
from app.errors import DomainViolation, PoleInNormalizer
from app.services.families import Parametrization, chi_array
from app.services.qcore import QBase, qpoch_inf_array, qpoch_inf_value, qpoch_multi_value, qpoch_value

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]
Density = Callable[[np.ndarray], np.ndarray]


# ==============================================
# TIPOS
# ==============================================

class MeasureShape(str, Enum):
    INTERVAL = "interval"
    CIRCLE = "circle"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class Atom:
    """Massa pontual; point está na coordenada da parametrização da medida"""

    point: float
    mass: complex
    index: int


class AtomBranch:
    """
    Sequência de átomos gerada sob demanda

    O gerador é consumido uma única vez; os átomos ficam memorizados atrás de
    um lock, então leitores concorrentes enxergam a mesma lista.
    """

    def __init__(self, factory: Callable[[], Iterator[Atom]]):
        self._factory = factory
        self._iterator: Optional[Iterator[Atom]] = None
        self._atoms: List[Atom] = []
        self._lock = threading.Lock()

    def _extend(self, count: int):
        if self._iterator is None:
            self._iterator = self._factory()
        while len(self._atoms) < count:
            try:
                self._atoms.append(next(self._iterator))
            except StopIteration:
                break

    def take(self, count: int) -> List[Atom]:
        with self._lock:
            self._extend(count)
            return self._atoms[:count]

    def at(self, k: int) -> Optional[Atom]:
        with self._lock:
            self._extend(k + 1)
            return self._atoms[k] if k < len(self._atoms) else None


class Measure:
    """Medida imutável com metadados de suporte, massa total e positividade"""

    def __init__(
        self,
        name: str,
        shape: MeasureShape,
        parametrization: Parametrization,
        base: QBase,
        params: Optional[Dict[str, Number]] = None,
        density: Optional[Density] = None,
        support: Tuple[float, float] = (0.0, math.pi),
        branches: Sequence[AtomBranch] = (),
        total_mass: Optional[complex] = None,
        positive: bool = True,
        equation_ref: str = "",
    ):
        self.name = name
        self.shape = MeasureShape(shape)
        self.parametrization = Parametrization(parametrization)
        self.base = base
        self.params = dict(params or {})
        self._density = density
        self.support = support
        self.branches = tuple(branches)
        self.total_mass = total_mass
        self.positive = positive
        self.equation_ref = equation_ref

    def __repr__(self) -> str:
        return f"Measure({self.name}, {self.shape.value}, q={self.base.q}, {self.params})"

    @property
    def q(self) -> float:
        return self.base.q

    @property
    def is_discrete(self) -> bool:
        return self.shape is MeasureShape.DISCRETE

    @property
    def on_real_line(self) -> bool:
        return self.shape is MeasureShape.INTERVAL and math.isinf(self.support[1])

    def density(self, coords: np.ndarray) -> np.ndarray:
        if self._density is None:
            raise DomainViolation(f"medida {self.name} é discreta e não tem densidade")
        return self._density(np.asarray(coords, dtype=float))

    def atoms(self, count: int) -> List[Atom]:
        """Os primeiros count átomos de cada ramo"""
        if not self.is_discrete:
            raise DomainViolation(f"medida {self.name} não é discreta")
        result: List[Atom] = []
        for branch in self.branches:
            result.extend(branch.take(count))
        return result

    def tail_bound(self, count: int) -> float:
        """
        Cota geométrica para a massa além dos count primeiros átomos de cada ramo

        Usa a razão rho = |m_{K-1}| / |m_{K-2}|; as massas decaem de forma
        super-geométrica, então a cota decresce com count.
        """
        if count < 2:
            return math.inf
        bound = 0.0
        for branch in self.branches:
            atoms = branch.take(count)
            if len(atoms) < count:
                continue
            last, before = abs(atoms[-1].mass), abs(atoms[-2].mass)
            if last == 0:
                continue
            rho = last / before if before > 0 else math.inf
            if rho >= 1:
                return math.inf
            bound += last * rho / (1 - rho)
        return bound


# ==============================================
# HELPERS
# ==============================================

def _conjugate_pair(a: Number, theta: np.ndarray, q: float) -> np.ndarray:
    """(a e^(i theta), a e^(-i theta); q)_inf para a real, valor real"""
    w = np.exp(1j * theta)
    value = qpoch_inf_array(a * w, q) * qpoch_inf_array(a / w, q)
    scale = max(1.0, float(np.max(np.abs(value)))) if value.size else 1.0
    if value.size and np.max(np.abs(value.imag)) > 1e-12 * scale:
        raise DomainViolation("produto conjugado com parte imaginária não desprezível")
    return value.real


def _hermite_density(q: float) -> Density:
    return lambda theta: _conjugate_pair(1.0, 2 * theta, q)


def _require_real(name: str, value: Number) -> float:
    value = complex(value)
    if value.imag != 0:
        raise DomainViolation(f"{name} deve ser real", {name: str(value)})
    return value.real


def _ratio_branch(point: Callable[[int], float], first_mass: complex,
                  ratio: Callable[[int], complex]) -> AtomBranch:
    """Ramo com m_{k+1} = m_k * ratio(k)"""

    def factory() -> Iterator[Atom]:
        mass = complex(first_mass)
        k = 0
        while True:
            yield Atom(point(k), mass, k)
            mass *= ratio(k)
            k += 1

    return AtomBranch(factory)


# ==============================================
# ANEXAÇÃO
# ==============================================

def attach(mu: Measure, factor: Density, normalizer: complex = 1.0, name: Optional[str] = None,
           total_mass: Optional[complex] = None, positive: Optional[bool] = None,
           equation_ref: str = "", params: Optional[Dict[str, Number]] = None) -> Measure:
    """
    Medida anexada factor(x) dmu(x) / normalizer

    Args:
        mu: medida de partida
        factor: função vetorizada na coordenada de mu
        normalizer: constante que divide a nova medida

    Raises:
        PoleInNormalizer: normalizer nulo
    """
    if normalizer == 0:
        raise PoleInNormalizer("normalizador da medida anexada é zero")
    merged = {**mu.params, **(params or {})}
    new_name = name or f"{mu.name}*attached"
    keep_positive = mu.positive if positive is None else positive

    if mu.is_discrete:
        def wrap(branch: AtomBranch) -> AtomBranch:
            def factory() -> Iterator[Atom]:
                k = 0
                while True:
                    atom = branch.at(k)
                    if atom is None:
                        return
                    # massa nula dispensa avaliar o fator (pode estar num polo)
                    if atom.mass == 0:
                        yield Atom(atom.point, 0j, atom.index)
                    else:
                        value = complex(np.asarray(factor(np.array([atom.point])))[0])
                        yield Atom(atom.point, atom.mass * value / normalizer, atom.index)
                    k += 1
            return AtomBranch(factory)

        return Measure(new_name, mu.shape, mu.parametrization, mu.base, merged,
                       branches=[wrap(b) for b in mu.branches], total_mass=total_mass,
                       positive=keep_positive, equation_ref=equation_ref)

    def density(coords: np.ndarray) -> np.ndarray:
        return mu.density(coords) * factor(coords) / normalizer

    return Measure(new_name, mu.shape, mu.parametrization, mu.base, merged, density=density,
                   support=mu.support, total_mass=total_mass, positive=keep_positive,
                   equation_ref=equation_ref)


# ==============================================
# PESOS NO INTERVALO [0, pi]
# ==============================================

def hermite_trig_weight(base: QBase) -> Measure:
    """(e^(2i theta), e^(-2i theta); q)_inf em [0, pi]"""
    q = base.q
    return Measure(
        "hermite", MeasureShape.INTERVAL, Parametrization.TRIG, base,
        density=_hermite_density(q), total_mass=2 * math.pi / qpoch_inf_value(q, q).real,
        equation_ref="Eq. (2.1)",
    )


def asc_weight(t1: Number, t2: Number, base: QBase) -> Measure:
    """
    Peso w1 de Al-Salam-Chihara em theta (jacobiano 1/sqrt(1-x^2) absorvido)

    Raises:
        DomainViolation: |t1| ou |t2| >= 1
    """
    t1, t2 = _require_real("t1", t1), _require_real("t2", t2)
    if max(abs(t1), abs(t2)) >= 1:
        raise DomainViolation("asc_weight exige |t1|, |t2| < 1", {"t1": t1, "t2": t2})
    q = base.q

    def factor(theta: np.ndarray) -> np.ndarray:
        return 1 / (_conjugate_pair(t1, theta, q) * _conjugate_pair(t2, theta, q))

    total = 2 * math.pi / qpoch_multi_value([q, t1 * t2], q).real
    return attach(hermite_trig_weight(base), factor, name="asc", total_mass=total,
                  equation_ref="Eq. (2.4)", params={"t1": t1, "t2": t2})


def aw_weight(ts: Sequence[Number], base: QBase) -> Measure:
    """
    Peso de Askey-Wilson com quatro parâmetros

    Raises:
        DomainViolation: max |t_j| >= 1
    """
    values = [_require_real(f"t{i + 1}", t) for i, t in enumerate(ts)]
    if len(values) != 4:
        raise DomainViolation("aw_weight exige quatro parâmetros")
    if max(abs(t) for t in values) >= 1:
        raise DomainViolation("aw_weight exige max |t_j| < 1", {"t": values})
    q = base.q

    def factor(theta: np.ndarray) -> np.ndarray:
        result = np.ones_like(theta, dtype=float)
        for t in values:
            result = result / _conjugate_pair(t, theta, q)
        return result

    abcd = values[0] * values[1] * values[2] * values[3]
    pairs = [values[j] * values[k] for j in range(4) for k in range(j + 1, 4)]
    total = 2 * math.pi * qpoch_inf_value(abcd, q).real / qpoch_multi_value([q] + pairs, q).real
    params = {f"t{i + 1}": t for i, t in enumerate(values)}
    return attach(hermite_trig_weight(base), factor, name="aw", total_mass=total,
                  equation_ref="Eq. (2.19)", params=params)


# ==============================================
# MEDIDAS DISCRETAS NA RETA
# ==============================================

def carlitz_measure(a: float, base: QBase) -> Measure:
    """
    Medida de probabilidade de Al-Salam-Carlitz em [a, 1]

    Átomos em q^k com massa q^k / ((q, q/a; q)_k (a; q)_inf) e em a q^k com
    massa q^k / ((q, aq; q)_k (1/a; q)_inf).
    """
    a = _require_real("a", a)
    if a >= 0:
        raise DomainViolation(f"carlitz_measure exige a < 0, recebeu a={a}", {"a": a})
    q = base.q
    upper = _ratio_branch(
        lambda k: q ** k,
        1 / qpoch_inf_value(a, q),
        lambda k: q / ((1 - q ** (k + 1)) * (1 - q ** (k + 1) / a)),
    )
    lower = _ratio_branch(
        lambda k: a * q ** k,
        1 / qpoch_inf_value(1 / a, q),
        lambda k: q / ((1 - q ** (k + 1)) * (1 - a * q ** (k + 1))),
    )
    return Measure("carlitz", MeasureShape.DISCRETE, Parametrization.LINE, base, {"a": a},
                   branches=[upper, lower], total_mass=1.0, equation_ref="Eq. (3.3)")


def big_q_jacobi_measure(a: float, t1: float, t2: float, base: QBase) -> Measure:
    """dmu^(a)(x) / (x t1, x t2; q)_inf, sem normalização"""
    t1, t2 = _require_real("t1", t1), _require_real("t2", t2)
    if not (1 / a < t1 < 1 and 1 / a < t2 < 1):
        raise DomainViolation("big_q_jacobi_measure exige t1, t2 em (1/a, 1)", {"t1": t1, "t2": t2})
    q = base.q

    def factor(x: np.ndarray) -> np.ndarray:
        return 1 / (qpoch_inf_array(x * t1, q) * qpoch_inf_array(x * t2, q))

    total = qpoch_inf_value(a * t1 * t2, q) / qpoch_multi_value([t1, t2, a * t1, a * t2], q)
    return attach(carlitz_measure(a, base), factor, name="big_q_jacobi", total_mass=total.real,
                  equation_ref="Eq. (3.6)", params={"t1": t1, "t2": t2})


def _m_measure(a: float, base: QBase) -> Measure:
    q = base.q
    branch = _ratio_branch(
        lambda k: q ** -k,
        qpoch_inf_value(a * q, q),
        lambda k: a * q ** (2 * k + 1) / ((1 - q ** (k + 1)) * (1 - a * q ** (k + 1))),
    )
    return Measure("m", MeasureShape.DISCRETE, Parametrization.LINE, base, {"a": a},
                   branches=[branch], total_mass=1.0, equation_ref="Eq. (3.15)")


def _sigma_measure(a: float, base: QBase) -> Measure:
    q = base.q
    branch = _ratio_branch(
        lambda k: a * q ** -k,
        qpoch_inf_value(q / a, q),
        lambda k: q ** (2 * k + 1) / (a * (1 - q ** (k + 1)) * (1 - q ** (k + 1) / a)),
    )
    return Measure("sigma", MeasureShape.DISCRETE, Parametrization.LINE, base, {"a": a},
                   branches=[branch], total_mass=1.0, equation_ref="Eq. (3.16)")


def _nu_density_measure(a: float, gamma: float, base: QBase) -> Measure:
    q = base.q
    constant = gamma * abs(a - 1) * qpoch_multi_value([q, a * q, q / a], q).real / (math.pi * a)

    def density(x: np.ndarray) -> np.ndarray:
        first = qpoch_inf_array(x / a, q).real
        second = qpoch_inf_array(x, q).real
        return constant / (first ** 2 + gamma ** 2 * second ** 2)

    return Measure("nu", MeasureShape.INTERVAL, Parametrization.LINE, base, {"a": a, "gamma": gamma},
                   density=density, support=(-math.inf, math.inf), total_mass=1.0,
                   equation_ref="Eq. (3.17)")


def v_measures(a: float, base: QBase, gamma: Optional[float] = None) -> List[Measure]:
    """
    Medidas de ortogonalidade de V_n^(a)

    Returns:
        m^(a) quando a < 1/q, sigma^(a) quando a > q e, com gamma dado e
        q < a < 1/q (a != 1), a densidade nu(x; a, q, gamma) na reta
    """
    a = _require_real("a", a)
    q = base.q
    if a <= 0:
        raise DomainViolation(f"v_measures exige a > 0, recebeu a={a}", {"a": a})
    measures: List[Measure] = []
    if a < 1 / q:
        measures.append(_m_measure(a, base))
    if a > q:
        measures.append(_sigma_measure(a, base))
    if gamma is not None:
        if gamma <= 0 or not q < a < 1 / q or a == 1:
            raise DomainViolation("nu exige gamma > 0 e q < a < 1/q com a != 1", {"a": a, "gamma": gamma})
        measures.append(_nu_density_measure(a, gamma, base))
    return measures


# ==============================================
# PESOS NO CÍRCULO
# ==============================================

def circle_weights(base: QBase, t1: Number = 0.0, t2: Number = 0.0) -> Tuple[Measure, Measure]:
    """
    Peso de Szegő e peso de Pastro Omega(z), ambos na convenção dtheta/2pi

    Raises:
        DomainViolation: |t1| ou |t2| >= q^(-1/2)
    """
    q = base.q
    root = base.sqrt
    if max(abs(t1), abs(t2)) * root >= 1:
        raise DomainViolation("circle_weights exige |t1|, |t2| < q^(-1/2)", {"t1": str(t1), "t2": str(t2)})

    szego = Measure(
        "szego", MeasureShape.CIRCLE, Parametrization.CIRCLE, base,
        density=lambda theta: _conjugate_pair(root, theta, q),
        support=(0.0, 2 * math.pi), total_mass=1 / qpoch_inf_value(q, q).real,
        equation_ref="Eq. (1.17)",
    )
    constant = qpoch_multi_value([q, t1 * t2 * q], q) / qpoch_multi_value([t1 * q, t2 * q], q)

    def omega(theta: np.ndarray) -> np.ndarray:
        z = np.exp(1j * theta)
        top = qpoch_inf_array(root * z, q) * qpoch_inf_array(root / z, q)
        bottom = qpoch_inf_array(t1 * root * z, q) * qpoch_inf_array(t2 * root / z, q)
        return constant * top / bottom

    real_pair = complex(t1).imag == 0 and complex(t1) == complex(t2)
    pastro = Measure(
        "pastro", MeasureShape.CIRCLE, Parametrization.CIRCLE, base, {"t1": t1, "t2": t2},
        density=omega, support=(0.0, 2 * math.pi), total_mass=1.0, positive=real_pair,
        equation_ref="Eq. (4.3)",
    )
    return szego, pastro


# ==============================================
# q^-1-HERMITE
# ==============================================

def qinv_atom_location(n: int, t: float, base: QBase) -> float:
    """x_n = (t / q^(n+1) - q^(n+1) / t) / 2"""
    q = base.q
    return 0.5 * (t / q ** (n + 1) - q ** (n + 1) / t)


# massas abaixo de e^-600 viram zero: fatores anexados não são avaliados ali
_LOG_MASS_FLOOR = -600.0


def _log_one_plus_exp(y: float) -> float:
    return y + math.log1p(math.exp(-y)) if y > 0 else math.log1p(math.exp(y))


def _qinv_log_mass(n: int, t: float, q: float, log_denominator: float) -> float:
    log_q = math.log(q)
    return (4 * n * math.log(q / t) + n * (2 * n - 1) * log_q
            + _log_one_plus_exp((2 * n + 2) * log_q - 2 * math.log(t)) - log_denominator)


def qinv_hermite_measure(t: float, base: QBase) -> Measure:
    """
    Solução discreta N-extremal do problema de momentos de h_n(x|q)

    Átomos em xi_n = log t - (n+1) log q (x_n = sinh xi_n), n inteiro,
    enumerados para n >= 0 e n < 0 em dois ramos.

    Raises:
        DomainViolation: t fora de (q, 1)
    """
    t = _require_real("t", t)
    q = base.q
    if not q < t < 1:
        raise DomainViolation(f"qinv_hermite_measure exige t em (q, 1), recebeu t={t}", {"t": t})
    log_denominator = math.log(qpoch_multi_value([-q * q / (t * t), -t * t / q, q], q).real)
    log_t, log_q = math.log(t), math.log(q)

    def branch(sign: int) -> AtomBranch:
        def factory() -> Iterator[Atom]:
            k = 0 if sign > 0 else 1
            while True:
                n = sign * k
                log_mass = _qinv_log_mass(n, t, q, log_denominator)
                mass = math.exp(log_mass) if log_mass > _LOG_MASS_FLOOR else 0.0
                yield Atom(log_t - (n + 1) * log_q, mass, n)
                k += 1
        return AtomBranch(factory)

    return Measure("qinv", MeasureShape.DISCRETE, Parametrization.HYPER, base, {"t": t},
                   branches=[branch(1), branch(-1)], total_mass=1.0,
                   equation_ref="Eq. (5.3)")


def qinv_nu_mass(n: int, t: float, base: QBase) -> float:
    """c_n de nu_mu(t, 0) sobre a medida discreta de qinv_hermite_measure"""
    q = base.q
    ratio = q * q / (t * t)
    return (q ** (1.5 * n * (n + 1)) * (1 + q ** (2 * n + 2) / (t * t)) * qpoch_value(-ratio, q, n).real
            / (t ** (2 * n) * qpoch_value(q, q, n).real * qpoch_inf_value(-ratio, q).real))


def nu_measure(mu: Measure, t1: Number, t2: Number, base: Optional[QBase] = None) -> Measure:
    """
    Medida anexada chi_t1 chi_t2 dmu / (-t1 t2 / q; q)_inf

    Complexa quando t2 != conj(t1); a massa total é a soma simples.

    Raises:
        DomainViolation: mu não está na parametrização x = sinh(xi)
        PoleInNormalizer: t1 t2 = -q^(1-k)
    """
    base = base or mu.base
    if mu.parametrization is not Parametrization.HYPER:
        raise DomainViolation(f"nu_measure exige medida em x = sinh(xi), recebeu {mu.name}")
    q = base.q
    normalizer = qpoch_inf_value(-t1 * t2 / q, q)
    if abs(normalizer) < get_settings().POLE_TOL:
        raise PoleInNormalizer(
            f"(-t1 t2/q; q)_inf = 0 para t1 t2 = {t1 * t2}",
            {"t1": str(t1), "t2": str(t2)},
        )

    def factor(xi: np.ndarray) -> np.ndarray:
        return chi_array(t1, xi, q) * chi_array(t2, xi, q)

    hermitian = complex(t2) == complex(t1).conjugate()
    return attach(mu, factor, normalizer, name=f"nu[{mu.name}]", total_mass=1.0,
                  positive=mu.positive and hermitian, equation_ref="Eq. (5.7)",
                  params={"t1": t1, "t2": t2})


# ==============================================
# REGISTRO E TABELA
# ==============================================

def _param(params: Dict[str, Number], name: str, default: Optional[Number] = None) -> Number:
    if name in params:
        return params[name]
    if default is None:
        raise DomainViolation(f"parâmetro obrigatório ausente: {name}")
    return default


MEASURE_BUILDERS: Dict[str, Callable[[QBase, Dict[str, Number]], Measure]] = {
    "hermite": lambda base, p: hermite_trig_weight(base),
    "asc": lambda base, p: asc_weight(_param(p, "t1", 0.0), _param(p, "t2", 0.0), base),
    "aw": lambda base, p: aw_weight([_param(p, f"t{i}", 0.0) for i in range(1, 5)], base),
    "carlitz": lambda base, p: carlitz_measure(_param(p, "a"), base),
    "big_q_jacobi": lambda base, p: big_q_jacobi_measure(_param(p, "a"), _param(p, "t1"), _param(p, "t2"), base),
    "m": lambda base, p: _m_measure_checked(_param(p, "a"), base),
    "sigma": lambda base, p: _sigma_measure_checked(_param(p, "a"), base),
    "nu": lambda base, p: v_measures(_param(p, "a"), base, _param(p, "gamma", 1.0))[-1],
    "szego": lambda base, p: circle_weights(base)[0],
    "pastro": lambda base, p: circle_weights(base, _param(p, "t1", 0.0), _param(p, "t2", 0.0))[1],
    "qinv": lambda base, p: qinv_hermite_measure(_param(p, "t"), base),
    "nu_mu": lambda base, p: nu_measure(
        qinv_hermite_measure(_param(p, "t"), base), _param(p, "t1", 0.0), _param(p, "t2", 0.0), base,
    ),
}


def _m_measure_checked(a: float, base: QBase) -> Measure:
    for mu in v_measures(a, base):
        if mu.name == "m":
            return mu
    raise DomainViolation(f"m^(a) exige 0 < a < 1/q, recebeu a={a}")


def _sigma_measure_checked(a: float, base: QBase) -> Measure:
    for mu in v_measures(a, base):
        if mu.name == "sigma":
            return mu
    raise DomainViolation(f"sigma^(a) exige a > q, recebeu a={a}")


def build_measure(name: str, base: QBase, **params: Number) -> Measure:
    """Constrói uma medida do registro pelo nome"""
    if name not in MEASURE_BUILDERS:
        raise DomainViolation(f"medida desconhecida: {name}", {"available": sorted(MEASURE_BUILDERS)})
    return MEASURE_BUILDERS[name](base, params)


def measure_table(mu: Measure, atoms: int = 32, samples: int = 64) -> List[Tuple[float, complex, complex]]:
    """
    Linhas (location, mass_or_density, cumulative)

    Medidas discretas listam os átomos em ordem de ramo; densidades são
    amostradas em pontos igualmente espaçados, com cumulativo pela regra do
    trapézio (a reta real é cortada em [-LINE_R_START, LINE_R_START]).
    """
    rows: List[Tuple[float, complex, complex]] = []
    if mu.is_discrete:
        running = 0j
        for atom in mu.atoms(atoms):
            running += atom.mass
            rows.append((atom.point, atom.mass, running))
        return rows
    lo, hi = mu.support
    if math.isinf(hi):
        radius = get_settings().LINE_R_START
        lo, hi = -radius, radius
    coords = np.linspace(lo, hi, samples)
    values = mu.density(coords)
    cumulative = np.concatenate([[0], np.cumsum((values[1:] + values[:-1]) / 2 * np.diff(coords))])
    if mu.shape is MeasureShape.CIRCLE:
        cumulative = cumulative / (2 * math.pi)
    for x, v, c in zip(coords, values, cumulative):
        rows.append((float(x), complex(v), complex(c)))
    return rows


def measure_table_csv(mu: Measure, atoms: int = 32, samples: int = 64) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["location", "mass_or_density", "cumulative"])
    for location, value, cumulative in measure_table(mu, atoms, samples):
        writer.writerow([repr(location), _format_number(value), _format_number(cumulative)])
    return buffer.getvalue()


def _format_number(value: complex) -> str:
    value = complex(value)
    return repr(value.real) if value.imag == 0 else f"{value.real!r}{value.imag:+.17g}j"
