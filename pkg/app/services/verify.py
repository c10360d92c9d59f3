"""
Catálogo de verificações

Cada checagem compara um lado calculado por quadratura, soma ou série com
o lado fechado em produtos q e devolve CheckResult. Aqui ficam as
implementações (integrais q-beta, identidades de séries, matrizes de Gram,
funções geradoras, raio, massas, representações e o teorema de
ortogonalidade dos u_n contra medidas complexas); o registro com as grades
de parâmetros fica em app.services.catalog.
"""

import cmath
import logging
import math
import time
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from app.config import get_settings
from app.errors import DomainViolation, NonConvergent, PoleInNormalizer, UnknownCheck
from app.schemas import CheckResult, GramReport
from app.services.families import (
    EvalPoint, FamilyId, FamilySpec, Parametrization, andrews_askey_big_q_jacobi, chi_array, estimate_radius,
    eval_explicit, eval_recurrence, explicit_table, explicit_value, gen_function_closed, gen_function_partial,
    norm_constant, normalization_map, orthonormal_qinv_hermite, recurrence_table, verma_parameters, verma_rational,
)
from app.services.integrate import integrate, total_mass
from app.services.measures import (
    Measure, MeasureShape, asc_weight, attach, aw_weight, big_q_jacobi_measure, build_measure,
    carlitz_measure, circle_weights, hermite_trig_weight, measure_table, nu_measure, qinv_hermite_measure,
    v_measures,
)
from app.services.qcore import (
    QBase, high_precision, mp_context, mp_phi, mp_qpoch, phi, qpoch_inf_array, qpoch_multi_value,
    qpoch_shift_identity_check,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]
Params = Dict[str, Any]
Sides = Tuple[complex, ...]

RADIUS_TOL = 0.07


# ==============================================
# HELPERS
# ==============================================

def _tol(tolerance: Optional[float]) -> float:
    return tolerance if tolerance is not None else get_settings().CHECK_TOL


def _zero_tol(tolerance: Optional[float]) -> float:
    return tolerance if tolerance is not None else get_settings().ZERO_TOL


def _elapsed(start: float) -> float:
    return (time.perf_counter() - start) * 1e3


def json_safe(value: Any) -> Any:
    """Converte um valor de parâmetro para tipo serializável (complexo vira texto)"""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return json_safe(value.real) if value.imag == 0 else str(value)
    return value


def record_params(base: QBase, params: Params) -> Params:
    return {"q": base.q, **{key: json_safe(value) for key, value in params.items()}}


def _inf(q: float, *params: Number) -> complex:
    return qpoch_multi_value(params, q)


def _require_below(bound: float, **values: Number):
    for name, value in values.items():
        if abs(value) >= bound:
            raise DomainViolation(
                f"|{name}|={abs(value):.6g} fora do domínio (< {bound:.6g})",
                {name: str(value), "bound": bound},
            )


def _pairs(ts) -> List[complex]:
    return [ts[j] * ts[k] for j in range(len(ts)) for k in range(j + 1, len(ts))]


def _phi21_array(a, b, c, z, q: float) -> np.ndarray:
    """2phi1(a, b; c; q, z) termo a termo sobre arrays, |z| < 1"""
    settings = get_settings()
    a, b, c, z = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, z)))
    modulus = np.abs(z)
    if np.any(modulus >= 1):
        raise DomainViolation("2phi1 vetorizada exige |z| < 1")
    tail = float(np.max(modulus / (1 - modulus))) if modulus.size else 0.0
    term = np.ones(a.shape, dtype=complex)
    total = term.copy()
    for k in range(settings.MAX_TERMS):
        qk = q ** k
        term = term * (1 - a * qk) * (1 - b * qk) / ((1 - q * qk) * (1 - c * qk)) * z
        total = total + term
        if np.max(np.abs(term)) * max(tail, 1.0) <= settings.EPS_SERIES * np.max(np.abs(total)):
            return total
    raise NonConvergent(f"2phi1 vetorizada não convergiu em {settings.MAX_TERMS} termos")


def _point(spec: FamilySpec, coordinate: Number) -> EvalPoint:
    return EvalPoint(spec.info.parametrization, coordinate)


# ==============================================
# INTEGRAIS q-BETA
# ==============================================

def int_2_2(base: QBase, t1: Number, t2: Number) -> Sides:
    """Massa total do peso de Al-Salam-Chihara"""
    q = base.q
    mu = asc_weight(t1, t2, base)
    return total_mass(mu).value, 2 * math.pi / _inf(q, q, t1 * t2)


def int_2_16(base: QBase, t1: Number, t2: Number, t3: Number, t4: Number) -> Sides:
    """Integral de Askey-Wilson"""
    q = base.q
    ts = [t1, t2, t3, t4]
    mu = aw_weight(ts, base)
    rhs = 2 * math.pi * _inf(q, t1 * t2 * t3 * t4) / (_inf(q, q) * _inf(q, *_pairs(ts)))
    return total_mass(mu).value, rhs


def int_2_22(base: QBase, t1: Number, t2: Number, t3: Number, t4: Number, t5: Number, t6: Number) -> Sides:
    """
    Produto de duas funções geradoras de Askey-Wilson contra o peso

    O lado direito é o prefator de Askey-Wilson vezes uma 6phi5 com
    argumento t5 t6; a raiz sqrt(t1 t2 t3 t4 / q) exige produto positivo.
    """
    q = base.q
    _require_below(1.0, t5=t5, t6=t6)
    product = complex(t1 * t2 * t3 * t4)
    if product.imag != 0 or product.real < 0:
        raise DomainViolation("Eq. (2.22) exige t1 t2 t3 t4 >= 0", {"product": str(product)})
    product = product.real
    mu = aw_weight([t1, t2, t3, t4], base)

    def integrand(theta: np.ndarray) -> np.ndarray:
        w = np.exp(1j * theta)
        value = np.ones_like(w)
        for t in (t5, t6):
            value = (value * _phi21_array(t1 * w, t2 * w, t1 * t2, t / w, q)
                     * _phi21_array(t3 / w, t4 / w, t3 * t4, t * w, q))
        return value

    lhs = integrate(integrand, mu).value
    root, root_q = math.sqrt(product / q), math.sqrt(product * q)
    series = phi(
        [root, -root, t1 * t3, t1 * t4, t2 * t3, t2 * t4],
        [root_q, -root_q, t1 * t2, t3 * t4, product / q],
        t5 * t6, base,
    )
    prefactor = 2 * math.pi * _inf(q, product) / (_inf(q, q) * _inf(q, *_pairs([t1, t2, t3, t4])))
    return lhs, prefactor * series


def _carlitz_domain(a: float, t1: Number, t2: Number):
    _require_below(1.0, t1=t1, t2=t2, a_t1=a * t1, a_t2=a * t2)


def int_3_6(base: QBase, a: float, t1: Number, t2: Number) -> Sides:
    """1/(x t1, x t2)_inf contra a medida de Al-Salam-Carlitz"""
    q = base.q
    _carlitz_domain(a, t1, t2)
    mu = carlitz_measure(a, base)

    def integrand(x: np.ndarray) -> np.ndarray:
        return 1 / (qpoch_inf_array(x * t1, q) * qpoch_inf_array(x * t2, q))

    return integrate(integrand, mu).value, _inf(q, a * t1 * t2) / _inf(q, t1, t2, a * t1, a * t2)


def sum_3_7(base: QBase, a: float, t1: Number, t2: Number) -> Sides:
    """Os dois ramos de átomos de int_3_6 somados como duas 2phi1"""
    q = base.q
    if a >= 0:
        raise DomainViolation(f"SUM_3_7 exige a < 0, recebeu a={a}", {"a": a})
    _carlitz_domain(a, t1, t2)
    upper = phi([t1, t2], [q / a], q, base) / _inf(q, a, t1, t2)
    lower = phi([a * t1, a * t2], [a * q], q, base) / _inf(q, 1 / a, a * t1, a * t2)
    return upper + lower, _inf(q, a * t1 * t2) / _inf(q, t1, t2, a * t1, a * t2)


def int_3_21(base: QBase, a: float, gamma: float, t1: Number, t2: Number) -> Sides:
    """(x t1, x t2)_inf contra a densidade nu de V_n na reta"""
    q = base.q
    nu = v_measures(a, base, gamma=gamma)[-1]
    _require_below(math.sqrt(q / a), t1=t1, t2=t2)
    constant = gamma * abs(a - 1) * _inf(q, q, a * q, q / a) / (math.pi * a)

    def integrand(x: np.ndarray) -> np.ndarray:
        return qpoch_inf_array(x * t1, q) * qpoch_inf_array(x * t2, q)

    lhs = integrate(integrand, nu).value / constant
    rhs = (math.pi * a * _inf(q, t1, a * t1, t2, a * t2)
           / (abs(a - 1) * gamma * _inf(q, q, a * q, q / a, a * t1 * t2 / q)))
    return lhs, rhs


def int_4_2(base: QBase, t1: Number, t2: Number) -> Sides:
    """Integral de Ramanujan sobre o peso de Szegő"""
    q = base.q
    _require_below(base.sqrt, t1=t1, t2=t2)
    szego, _ = circle_weights(base)

    def integrand(theta: np.ndarray) -> np.ndarray:
        z = np.exp(1j * theta)
        return 1 / (qpoch_inf_array(t1 * z / base.sqrt, q) * qpoch_inf_array(t2 / (z * base.sqrt), q))

    return integrate(integrand, szego).value, _inf(q, t1, t2) / _inf(q, q, t1 * t2 / q)


def _chi_product(ts, q: float) -> Callable[[np.ndarray], np.ndarray]:
    def product(xi: np.ndarray) -> np.ndarray:
        value = np.ones(np.shape(xi), dtype=complex)
        for t in ts:
            value = value * chi_array(t, xi, q)
        return value
    return product


def int_5_5(base: QBase, t: float, t1: Number, t2: Number) -> Sides:
    """chi_t1 chi_t2 contra a medida N-extremal de q^-1-Hermite"""
    q = base.q
    mu = qinv_hermite_measure(t, base)
    return integrate(_chi_product([t1, t2], q), mu).value, _inf(q, -t1 * t2 / q)


def _four_parameter_rhs(q: float, ts) -> complex:
    total = ts[0] * ts[1] * ts[2] * ts[3] * q ** -3
    return _inf(q, *[-p / q for p in _pairs(ts)]) / _inf(q, total)


def int_5_10(base: QBase, t: float, t1: Number, t2: Number, t3: Number, t4: Number) -> Sides:
    """Produto de quatro chi_t contra a medida N-extremal"""
    q = base.q
    bound = q ** 1.5
    if abs(t1 * t3) >= bound or abs(t2 * t4) >= bound:
        raise DomainViolation("Prop. 5.1 exige |t1 t3|, |t2 t4| < q^(3/2)", {"q": q})
    ts = [t1, t2, t3, t4]
    mu = qinv_hermite_measure(t, base)
    return integrate(_chi_product(ts, q), mu).value, _four_parameter_rhs(q, ts)


def int_5_24(base: QBase, t: float, t1: Number, t2: Number, t3: Number, t4: Number) -> Sides:
    """chi_t3 chi_t4 contra nu_mu(t1, t2) no caso positivo definido"""
    q = base.q
    t1, t2 = complex(t1), complex(t2)
    hermitian = t2 == t1.conjugate()
    same_sign_real = t1.imag == 0 and t2.imag == 0 and t1.real * t2.real >= 0
    if not (hermitian or same_sign_real):
        raise DomainViolation("Eq. (5.24) exige t2 = conj(t1) ou t1 t2 >= 0 reais", {"t1": str(t1), "t2": str(t2)})
    radius = q ** 1.5 / math.sqrt(abs(t1 * t2)) if t1 * t2 != 0 else math.inf
    _require_below(radius, t3=t3, t4=t4)
    alpha = nu_measure(qinv_hermite_measure(t, base), t1, t2)
    return integrate(_chi_product([t3, t4], q), alpha).value, _four_parameter_rhs(q, [t1, t2, t3, t4])


INTEGRAL_CHECKS: Dict[str, Tuple[str, Callable[..., Sides]]] = {
    "INT_2_2": ("Eq. (2.2)", int_2_2),
    "INT_2_16": ("Eq. (2.16)", int_2_16),
    "INT_2_22": ("Eq. (2.22)", int_2_22),
    "INT_3_6": ("Eq. (3.6)", int_3_6),
    "SUM_3_7": ("Eq. (3.7)", sum_3_7),
    "INT_3_21": ("Eq. (3.21)", int_3_21),
    "INT_4_2": ("Eq. (4.2)", int_4_2),
    "INT_5_5": ("Eq. (5.5)", int_5_5),
    "INT_5_10": ("Prop. 5.1", int_5_10),
    "INT_5_24": ("Eq. (5.24)", int_5_24),
}


# ==============================================
# IDENTIDADES
# ==============================================

def id_2_3(base: QBase, a: Number, z: Number) -> Sides:
    q = base.q
    _require_below(1.0, z=z)
    return phi([a], [], z, base), _inf(q, a * z) / _inf(q, z)


def _mp(base: QBase, *values: Number) -> Tuple[Any, ...]:
    """q e os valores dados no contexto mpmath corrente"""
    ctx = mp_context()
    return (ctx.mpf(base.q),) + tuple(ctx.convert(v) for v in values)


@high_precision
def id_2_7(base: QBase, n: int, a: Number, c: Number) -> Sides:
    """q-Chu-Vandermonde terminante"""
    q, a, c = _mp(base, a, c)
    lhs = mp_phi([q ** -n, a], [c], q, q, n)
    return lhs, mp_qpoch(c / a, q, n) * a ** n / mp_qpoch(c, q, n)


def _asc_series(q: Any, n: int, t1: Any, t2: Any, w: Any) -> Any:
    return mp_phi([q ** -n, t1 * w, t1 / w], [t1 * t2, 0], q, q, n)


@high_precision
def id_2_11(base: QBase, n: int, t1: Number, t2: Number, theta: float) -> Sides:
    """Simetria da 3phi2 de Al-Salam-Chihara em t1 e t2"""
    if t1 == 0 or t2 == 0:
        raise DomainViolation("ID_2_11 exige t1, t2 != 0")
    q, t1, t2, theta = _mp(base, t1, t2, theta)
    w = mp_context().expj(theta)
    return _asc_series(q, n, t1, t2, w), (t1 / t2) ** n * _asc_series(q, n, t2, t1, w)


def id_2_14(base: QBase, a: Number, b: Number, c: Number, z: Number) -> Sides:
    """q-Pfaff-Kummer"""
    q = base.q
    _require_below(1.0, z=z)
    if b == 0:
        raise DomainViolation("ID_2_14 exige b != 0")
    lhs = phi([a, c / b], [c, a * z], b * z, base)
    return lhs, _inf(q, z) / _inf(q, a * z) * phi([a, b], [c], z, base)


@high_precision
def id_2_20(base: QBase, n: int, a: Number, b: Number, c: Number, d: Number, e: Number) -> Sides:
    """
    Transformação de Sears; f é construído pelo balanceamento abc = def q^(n-1)
    """
    q, a, b, c, d, e = _mp(base, a, b, c, d, e)
    f = a * b * c * q ** (1 - n) / (d * e)
    lhs = mp_phi([q ** -n, a, b, c], [d, e, f], q, q, n)
    prefactor = mp_qpoch(e / a, q, n) * mp_qpoch(f / a, q, n) * a ** n / (mp_qpoch(e, q, n) * mp_qpoch(f, q, n))
    rhs = prefactor * mp_phi([q ** -n, a, d / b, d / c], [d, a * q ** (1 - n) / e, a * q ** (1 - n) / f], q, q, n)
    return lhs, rhs, {"f": f}


def id_3_5(base: QBase, z: Number) -> Sides:
    """Euler: sum q^(n(n-1)/2) z^n / (q)_n = (-z)_inf"""
    return phi([], [], -z, base), _inf(base.q, -z)


def id_3_7(base: QBase, a: Number, b: Number, c: Number) -> Sides:
    """Chu-Vandermonde não terminante"""
    q = base.q
    lhs = (phi([a, b], [c], q, base)
           + _inf(q, q / c, a, b) / _inf(q, c / q, a * q / c, b * q / c)
           * phi([a * q / c, b * q / c], [q * q / c], q, base))
    return lhs, _inf(q, q / c, a * b * q / c) / _inf(q, a * q / c, b * q / c)


def _big_q_jacobi_symmetric(q: Any, n: int, a: Any, t1: Any, t2: Any, x: Any) -> Any:
    series = mp_phi([q ** -n, a * t1 * t2 * q ** (n - 1), x * t1], [t1, a * t1], q, q, n)
    return t1 ** -n * mp_qpoch(t1, q, n) * mp_qpoch(a * t1, q, n) * series


@high_precision
def id_3_14(base: QBase, n: int, a: float, t1: Number, t2: Number, x: Number) -> Sides:
    """t1^-n (t1, a t1)_n phi_n simétrico em t1 e t2"""
    if t1 == 0 or t2 == 0:
        raise DomainViolation("ID_3_14 exige t1, t2 != 0")
    q, a, t1, t2, x = _mp(base, a, t1, t2, x)
    return (_big_q_jacobi_symmetric(q, n, a, t1, t2, x),
            _big_q_jacobi_symmetric(q, n, a, t2, t1, x))


def id_3_20(base: QBase, a: Number, b: Number, c: Number) -> Sides:
    """q-Gauss"""
    q = base.q
    _require_below(1.0, c_over_ab=c / (a * b))
    return phi([a, b], [c], c / (a * b), base), _inf(q, c / a, c / b) / _inf(q, c, c / (a * b))


def id_5_9(base: QBase, xi: Number, eta: Number, z: Number, n_terms: int = 80) -> Sides:
    """q-Mehler para os q^-1-Hermite ortonormais"""
    q = base.q
    _require_below(1 / base.sqrt, z=z)
    left = orthonormal_qinv_hermite(n_terms, xi, base)
    right = orthonormal_qinv_hermite(n_terms, eta, base)
    lhs = complex(np.sum(left * right * complex(z) ** np.arange(n_terms + 1)))
    plus, minus = cmath.exp(xi + eta), cmath.exp(xi - eta)
    rhs = (_inf(q, -z * q * plus, -z * q / plus, z * q * minus, z * q / minus) / _inf(q, z * z * q))
    return lhs, rhs


@high_precision
def id_3_12(base: QBase, n: int, a: float, t1: Number, t2: Number, x: Number) -> Sides:
    """Tradução para a normalização de Andrews-Askey"""
    spec = FamilySpec.make(FamilyId.BIG_Q_JACOBI, base, a=a, t1=t1, t2=t2)
    lhs = explicit_value(spec, n, EvalPoint.line(x))
    q, a, t1, t2, x = _mp(base, a, t1, t2, x)
    rhs = andrews_askey_big_q_jacobi(n, x * t1, t1 / q, a * t2 / q, a * t1 / q, q)
    return lhs, rhs


@high_precision
def id_3_28(base: QBase, n: int, a: float, t1: Number, t2: Number, x: Number, alpha: Number = 1.0) -> Sides:
    """psi_n(x; a, t1, t2) = R_n(t1 x / (q alpha); alpha, beta, gamma, delta)"""
    spec = FamilySpec.make(FamilyId.AS_VERMA_RATIONAL, base, a=a, t1=t1, t2=t2)
    lhs = explicit_value(spec, n, EvalPoint.line(x))
    params = verma_parameters(a, t1, t2, alpha)
    q, t1, x, alpha = _mp(base, t1, x, alpha)
    return lhs, verma_rational(n, t1 * x / (q * alpha), *params, q)


@high_precision
def id_4_6(base: QBase, n: int, t1: Number, t2: Number, theta: float) -> Sides:
    """p~_n = (q)_n (t1 q)^n / (t1 t2 q)_n p_n"""
    spec = FamilySpec.make(FamilyId.PASTRO, base, t1=t1, t2=t2)
    point = EvalPoint.circle_angle(theta)
    q, t1, t2 = _mp(base, t1, t2)
    factor = mp_qpoch(q, q, n) * (t1 * q) ** n / mp_qpoch(t1 * t2 * q, q, n)
    return explicit_value(spec, n, point, "pastro_tilde"), factor * explicit_value(spec, n, point)


def id_5_17(base: QBase, n: int, t1: Number, t2: Number, xi: float) -> Sides:
    """As três formas explícitas de u_n contra a recorrência; reporta a pior"""
    spec = FamilySpec.make(FamilyId.AS_CHIHARA_QINV, base, t1=t1, t2=t2)
    point = EvalPoint.hyper(xi)
    reference = eval_recurrence(spec, n, point)
    variants = ["default", "cauchy"]
    if t1 != 0 and t2 != 0:
        variants.append("3phi1")
    worst, worst_value = variants[0], None
    for variant in variants:
        value = eval_explicit(spec, n, point, variant) * normalization_map(spec, n, variant)
        if worst_value is None or abs(value - reference) > abs(worst_value - reference):
            worst, worst_value = variant, value
    return worst_value, reference, {"variant": worst}


def id_1_3(base: QBase, n: int, t: float) -> Sides:
    """int H_n dmu com mu = peso de Hermite anexado por 1/(t e^(i theta), t e^(-i theta))_inf"""
    q = base.q
    spec = FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, base)
    mu = asc_weight(t, 0.0, base)
    lhs = integrate(lambda theta: recurrence_table(spec, n, theta, Parametrization.TRIG)[n], mu).value
    return lhs, 2 * math.pi * t ** n / _inf(q, q)


IDENTITY_CHECKS: Dict[str, Tuple[str, Callable[..., Sides]]] = {
    "ID_1_3": ("Prop. 1.1", id_1_3),
    "ID_2_3": ("Eq. (2.3)", id_2_3),
    "ID_2_7": ("Eq. (2.7)", id_2_7),
    "ID_2_11": ("Eq. (2.11)", id_2_11),
    "ID_2_14": ("Eq. (2.14)", id_2_14),
    "ID_2_20": ("Eq. (2.20)", id_2_20),
    "ID_3_5": ("Eq. (3.5)", id_3_5),
    "ID_3_7": ("Eq. (3.7)", id_3_7),
    "ID_3_12": ("Eq. (3.12)", id_3_12),
    "ID_3_14": ("Eq. (3.14)", id_3_14),
    "ID_3_20": ("Eq. (3.20)", id_3_20),
    "ID_3_28": ("Eq. (3.28)", id_3_28),
    "ID_4_6": ("Eq. (4.6)", id_4_6),
    "ID_5_9": ("Eq. (5.9)", id_5_9),
    "ID_5_17": ("Eq. (5.17)", id_5_17),
}

# somas finitas em precisão estendida, verificadas com TERMINATING_TOL
TERMINATING_IDENTITIES = frozenset({"ID_2_7", "ID_2_11", "ID_2_20", "ID_3_12", "ID_3_14", "ID_3_28", "ID_4_6"})


def _run_sides(check_id: str, equation_ref: str, fn: Callable[..., Sides], base: QBase,
               params: Params, tolerance: Optional[float]) -> CheckResult:
    start = time.perf_counter()
    outcome = fn(base, **params)
    extra = outcome[2] if len(outcome) > 2 else {}
    return CheckResult.compare(
        check_id, equation_ref, record_params(base, {**params, **extra}),
        outcome[0], outcome[1], _tol(tolerance), runtime_ms=_elapsed(start),
    )


def check_integral(check_id: str, params: Params, base: QBase, tolerance: Optional[float] = None) -> CheckResult:
    """
    Executa uma checagem de integral do catálogo

    Raises:
        UnknownCheck: id fora de INTEGRAL_CHECKS
        DomainViolation: parâmetros fora do domínio da identidade
    """
    if check_id not in INTEGRAL_CHECKS:
        raise UnknownCheck(f"integral desconhecida: {check_id}", {"check_id": check_id})
    equation_ref, fn = INTEGRAL_CHECKS[check_id]
    return _run_sides(check_id, equation_ref, fn, base, params, tolerance)


def check_identity(check_id: str, params: Params, base: QBase, tolerance: Optional[float] = None) -> CheckResult:
    """
    Executa uma checagem de identidade do catálogo

    Raises:
        UnknownCheck / DomainViolation / DenominatorPole
    """
    if check_id == "ID_2_12":
        result = qpoch_shift_identity_check(params["a"], base, params["n"], params["k"])
        if tolerance is None:
            return result
        passed = result.abs_err <= tolerance or result.rel_err <= tolerance
        return result.model_copy(update={"tolerance": tolerance, "passed": passed})
    if check_id not in IDENTITY_CHECKS:
        raise UnknownCheck(f"identidade desconhecida: {check_id}", {"check_id": check_id})
    equation_ref, fn = IDENTITY_CHECKS[check_id]
    if tolerance is None and check_id in TERMINATING_IDENTITIES:
        tolerance = get_settings().TERMINATING_TOL
    return _run_sides(check_id, equation_ref, fn, base, params, tolerance)


# ==============================================
# MATRIZES DE GRAM
# ==============================================

def _rows(spec: FamilySpec, n_max: int, coords: np.ndarray, parametrization: Parametrization,
          variant: str) -> np.ndarray:
    """Valores na normalização da relação impressa (variant escolhe a forma)"""
    if not spec.info.has_recurrence:
        return explicit_table(spec, n_max, coords, parametrization)
    table = recurrence_table(spec, n_max, coords, parametrization)
    for n in range(n_max + 1):
        table[n] /= normalization_map(spec, n, variant)
    return table


def gram(spec_a: FamilySpec, spec_b: FamilySpec, mu: Measure, size: int, variant: str = "default") -> GramReport:
    """
    Matriz <A_m, B_n>_mu para m, n < size, com B conjugada no círculo

    A diagonal prevista vem de norm_constant(spec_b, n, variant).
    """
    if size < 1:
        raise DomainViolation(f"tamanho da matriz de Gram deve ser >= 1, recebeu {size}")
    n_max = size - 1
    kind = mu.parametrization
    conjugate = mu.shape is MeasureShape.CIRCLE

    def products(coords: np.ndarray) -> np.ndarray:
        rows_a = _rows(spec_a, n_max, coords, kind, variant)
        rows_b = _rows(spec_b, n_max, coords, kind, variant)
        if conjugate:
            rows_b = np.conj(rows_b)
        return (rows_a[:, None, :] * rows_b[None, :, :]).reshape(size * size, -1)

    result = integrate(products, mu)
    matrix = np.asarray(result.value, dtype=complex).reshape(size, size)
    predicted = [complex(norm_constant(spec_b, n, variant).value) for n in range(size)]
    offdiag = matrix[~np.eye(size, dtype=bool)]
    max_offdiag = float(np.max(np.abs(offdiag))) if offdiag.size else 0.0
    max_diag_rel_err = max(abs(matrix[n, n] - predicted[n]) / abs(predicted[n]) for n in range(size))
    logger.debug(f"gram {spec_a.family_id.value} x {spec_b.family_id.value} em {mu.name}: "
                 f"offdiag {max_offdiag:.3g}, diag {max_diag_rel_err:.3g}")
    return GramReport(
        family_a=spec_a.family_id.value,
        family_b=spec_b.family_id.value,
        params={"a": {k: json_safe(v) for k, v in spec_a.params}, "b": {k: json_safe(v) for k, v in spec_b.params}},
        size=size,
        matrix=matrix.tolist(),
        predicted=predicted,
        max_offdiag=max_offdiag,
        max_diag_rel_err=float(max_diag_rel_err),
    )


def gram_results(check_id: str, equation_ref: str, report: GramReport, params: Params,
                 tolerance: float, runtime_ms: float = 0.0) -> List[CheckResult]:
    """Dois registros: pior diagonal vs norma prevista e pior fora da diagonal vs 0"""
    size = report.size
    matrix = np.asarray(report.matrix, dtype=complex)
    errors = [abs(matrix[n, n] - report.predicted[n]) / abs(report.predicted[n]) for n in range(size)]
    n_diag = int(np.argmax(errors))
    diagonal = CheckResult.compare(
        check_id, equation_ref, {**params, "part": "diag", "n": n_diag},
        matrix[n_diag, n_diag], report.predicted[n_diag], tolerance, runtime_ms=runtime_ms,
    )
    if size == 1:
        return [diagonal]
    masked = np.abs(matrix) * ~np.eye(size, dtype=bool)
    m, n = (int(i) for i in np.unravel_index(np.argmax(masked), masked.shape))
    offdiagonal = CheckResult.compare(
        check_id, equation_ref, {**params, "part": "offdiag", "m": m, "n": n},
        matrix[m, n], 0.0, tolerance, scale=report.max_diagonal, runtime_ms=runtime_ms,
    )
    return [diagonal, offdiagonal]


GramCase = Tuple[FamilySpec, FamilySpec, Measure, str]


def _same(spec: FamilySpec, mu: Measure, variant: str = "default") -> GramCase:
    return spec, spec, mu, variant


def _gram_hermite(base: QBase) -> GramCase:
    return _same(FamilySpec.make(FamilyId.CONTINUOUS_Q_HERMITE, base), hermite_trig_weight(base))


def _gram_asc(base: QBase, t1: float, t2: float) -> GramCase:
    return _same(FamilySpec.make(FamilyId.AS_CHIHARA, base, t1=t1, t2=t2), asc_weight(t1, t2, base))


def _gram_aw(base: QBase, t1: float, t2: float, t3: float, t4: float) -> GramCase:
    spec = FamilySpec.make(FamilyId.ASKEY_WILSON, base, t1=t1, t2=t2, t3=t3, t4=t4)
    return _same(spec, aw_weight([t1, t2, t3, t4], base))


def _gram_carlitz_u(base: QBase, a: float) -> GramCase:
    return _same(FamilySpec.make(FamilyId.AS_CARLITZ_U, base, a=a), carlitz_measure(a, base))


def _gram_big_q_jacobi(base: QBase, a: float, t1: float, t2: float) -> GramCase:
    spec = FamilySpec.make(FamilyId.BIG_Q_JACOBI, base, a=a, t1=t1, t2=t2)
    return _same(spec, big_q_jacobi_measure(a, t1, t2, base))


def _gram_big_q_jacobi_symmetric(base: QBase, a: float, t1: float, t2: float) -> GramCase:
    spec, _, mu, _ = _gram_big_q_jacobi(base, a, t1, t2)
    return _same(spec, mu, "symmetric")


def _gram_carlitz_v(base: QBase, a: float, measure: str) -> GramCase:
    return _same(FamilySpec.make(FamilyId.AS_CARLITZ_V, base, a=a), build_measure(measure, base, a=a))


def _gram_szego(base: QBase) -> GramCase:
    return _same(FamilySpec.make(FamilyId.SZEGO_CIRCLE, base), circle_weights(base)[0])


def _gram_qinv(base: QBase, t: float) -> GramCase:
    return _same(FamilySpec.make(FamilyId.QINV_HERMITE, base), qinv_hermite_measure(t, base))


def _gram_u_qinv(base: QBase, t: float, t1: Number, t2: Number) -> GramCase:
    spec = FamilySpec.make(FamilyId.AS_CHIHARA_QINV, base, t1=t1, t2=t2)
    return _same(spec, nu_measure(qinv_hermite_measure(t, base), t1, t2))


def _gram_verma(base: QBase, a: float, t1: float, t2: float) -> GramCase:
    q = base.q
    spec_a = FamilySpec.make(FamilyId.AS_VERMA_RATIONAL, base, a=a, t1=t2, t2=t1)
    spec_b = FamilySpec.make(FamilyId.AS_VERMA_RATIONAL, base, a=a, t1=t1, t2=t2)
    m_measure = v_measures(a, base)[0]
    if m_measure.name != "m":
        raise DomainViolation(f"Eq. (3.24) usa m^(a), que exige a < 1/q; recebeu a={a}")

    def factor(x: np.ndarray) -> np.ndarray:
        return qpoch_inf_array(x * t1, q) * qpoch_inf_array(x * t2, q)

    return spec_a, spec_b, attach(m_measure, factor, name="nu_verma", params={"t1": t1, "t2": t2}), "default"


def _gram_pastro(base: QBase, t1: float, t2: float, variant: str = "default") -> GramCase:
    spec_a = FamilySpec.make(FamilyId.PASTRO, base, t1=t1, t2=t2)
    spec_b = FamilySpec.make(FamilyId.PASTRO, base, t1=t2, t2=t1)
    return spec_a, spec_b, circle_weights(base, t1, t2)[1], variant


def _gram_pastro_tilde(base: QBase, t1: float, t2: float) -> GramCase:
    return _gram_pastro(base, t1, t2, "pastro_tilde")


def _gram_ismail_masson(base: QBase, t: float, t1: Number, t2: Number, t3: Number = 0.0,
                        t4: Number = 0.0) -> GramCase:
    q = base.q
    spec_a = FamilySpec.make(FamilyId.ISMAIL_MASSON_RATIONAL, base, t1=t1, t2=t2, t3=t3, t4=t4)
    spec_b = FamilySpec.make(FamilyId.ISMAIL_MASSON_RATIONAL, base, t1=t2, t2=t1, t3=t3, t4=t4)
    ts = [v for v in (t1, t2, t3, t4) if v != 0]
    mu = attach(qinv_hermite_measure(t, base), _chi_product(ts, q), name="qinv*chi",
                params={"t1": t1, "t2": t2, "t3": t3, "t4": t4})
    return spec_a, spec_b, mu, "default"


GRAM_CHECKS: Dict[str, Tuple[str, int, Callable[..., GramCase]]] = {
    "ORTH_1_17": ("Eq. (1.17)", 8, _gram_szego),
    "ORTH_2_1": ("Eq. (2.1)", 8, _gram_hermite),
    "ORTH_2_9": ("Eq. (2.9)", 8, _gram_asc),
    "ORTH_2_18": ("Eq. (2.18)", 8, _gram_aw),
    "ORTH_3_2": ("Eq. (3.2)", 8, _gram_carlitz_u),
    "ORTH_3_11": ("Eq. (3.11)", 8, _gram_big_q_jacobi),
    "ORTH_3_13": ("Eq. (3.13)", 8, _gram_big_q_jacobi_symmetric),
    "ORTH_3_18": ("Eq. (3.18)", 8, _gram_carlitz_v),
    "ORTH_5_3": ("Eq. (5.3)", 8, _gram_qinv),
    "ORTH_5_14": ("Eq. (5.14)", 8, _gram_u_qinv),
    "BIORTH_3_24": ("Eq. (3.24)", 6, _gram_verma),
    "BIORTH_4_5": ("Eq. (4.5)", 6, _gram_pastro_tilde),
    "BIORTH_4_8": ("Eq. (4.8)", 6, _gram_pastro),
    "BIORTH_5_22": ("Eq. (5.22)", 6, _gram_ismail_masson),
    "BIORTH_5_25": ("Eq. (5.25)", 6, _gram_ismail_masson),
}


def check_gram(check_id: str, params: Params, base: QBase, tolerance: Optional[float] = None) -> List[CheckResult]:
    """
    Monta o caso de Gram do catálogo e devolve os registros diag/offdiag

    params pode trazer "N" (tamanho); os demais vão para o construtor do caso.
    """
    if check_id not in GRAM_CHECKS:
        raise UnknownCheck(f"matriz de Gram desconhecida: {check_id}", {"check_id": check_id})
    equation_ref, default_size, builder = GRAM_CHECKS[check_id]
    start = time.perf_counter()
    case_params = {k: v for k, v in params.items() if k != "N"}
    size = int(params.get("N", default_size))
    spec_a, spec_b, mu, variant = builder(base, **case_params)
    report = gram(spec_a, spec_b, mu, size, variant)
    return gram_results(check_id, equation_ref, report, record_params(base, {**case_params, "N": size}),
                        _tol(tolerance), _elapsed(start))


# ==============================================
# FUNÇÕES GERADORAS E RAIO
# ==============================================

GENFUN_CHECKS: Dict[str, FamilyId] = {
    "GENFUN_1_8": FamilyId.DISCRETE_Q_HERMITE,
    "GENFUN_1_9": FamilyId.CONTINUOUS_Q_HERMITE,
    "GENFUN_2_15": FamilyId.AS_CHIHARA,
    "GENFUN_2_21": FamilyId.ASKEY_WILSON,
    "GENFUN_3_1": FamilyId.AS_CARLITZ_U,
    "GENFUN_3_19": FamilyId.AS_CARLITZ_V,
    "GENFUN_4_1": FamilyId.SZEGO_CIRCLE,
    "GENFUN_4_9": FamilyId.PASTRO,
    "GENFUN_5_4": FamilyId.QINV_HERMITE,
    "GENFUN_5_15": FamilyId.AS_CHIHARA_QINV,
}


def _genfun_id(spec: FamilySpec) -> str:
    for check_id, family_id in GENFUN_CHECKS.items():
        if family_id is spec.family_id:
            return check_id
    raise DomainViolation(f"{spec.family_id.value} não tem função geradora")


def check_genfun(spec: FamilySpec, t: Number, point: EvalPoint, n_terms: int = 60,
                 tolerance: Optional[float] = None) -> CheckResult:
    """
    Soma parcial com n_terms termos contra a forma fechada

    Raises:
        OutsideDisc: |t| fora do disco de convergência
    """
    start = time.perf_counter()
    lhs = gen_function_partial(spec, t, point, n_terms)
    rhs = gen_function_closed(spec, t, point)
    params = {**dict(spec.params), "t": t, "coordinate": point.coordinate, "N": n_terms}
    return CheckResult.compare(_genfun_id(spec), spec.info.genfun_ref, record_params(spec.base, params),
                               lhs, rhs, _tol(tolerance), runtime_ms=_elapsed(start))


def check_genfun_case(check_id: str, params: Params, base: QBase, tolerance: Optional[float] = None) -> CheckResult:
    if check_id not in GENFUN_CHECKS:
        raise UnknownCheck(f"função geradora desconhecida: {check_id}", {"check_id": check_id})
    family_params = {k: v for k, v in params.items() if k not in ("t", "coordinate", "N")}
    spec = FamilySpec.make(GENFUN_CHECKS[check_id], base, **family_params)
    return check_genfun(spec, params["t"], _point(spec, params["coordinate"]), int(params.get("N", 60)), tolerance)


def predicted_radius(spec: FamilySpec) -> float:
    """Raio de sum sqrt(zeta_n)/c_n z^n conhecido em forma fechada"""
    q = spec.q
    fid = spec.family_id
    if fid is FamilyId.SZEGO_CIRCLE:
        return math.sqrt(q)
    if fid is FamilyId.AS_CARLITZ_V:
        return math.sqrt(q / spec.param("a"))
    if fid is FamilyId.CONTINUOUS_Q_HERMITE:
        return 1.0
    if fid in (FamilyId.AS_CARLITZ_U, FamilyId.DISCRETE_Q_HERMITE, FamilyId.QINV_HERMITE):
        return math.inf
    raise DomainViolation(f"sem raio previsto para {fid.value}", {"family": fid.value})


def check_radius(params: Params, base: QBase, tolerance: Optional[float] = None) -> CheckResult:
    """
    Compara 1/raio estimado com 1/raio previsto (1/inf = 0)

    A tolerância mínima é RADIUS_TOL: o teste da razão em grau finito é uma
    aproximação.
    """
    start = time.perf_counter()
    family_params = {k: v for k, v in params.items() if k != "family"}
    spec = FamilySpec.make(params["family"], base, **family_params)
    estimate = estimate_radius(spec)
    expected = predicted_radius(spec)
    inverse = lambda value: 0.0 if math.isinf(value) else 1 / value
    return CheckResult.compare(
        "RADIUS_1_4", "Eq. (1.4)",
        record_params(base, {**params, "estimate": estimate, "expected": expected}),
        inverse(estimate), inverse(expected), max(_tol(tolerance), RADIUS_TOL), runtime_ms=_elapsed(start),
    )


# ==============================================
# TEOREMA 5.2
# ==============================================

def theorem52_check(t1: Number, t2: Number, base: QBase, mu: Measure, n_max: int,
                    tolerance: Optional[float] = None) -> CheckResult:
    """
    int u_n dnu_mu(t1, t2) = 0 para 1 <= n <= n_max, somando diretamente

    O pior |int u_n| é comparado com 0 na escala do valor de grau 0.

    Raises:
        PoleInNormalizer: t1 t2 = -q^(n+1) para algum n <= n_max
    """
    start = time.perf_counter()
    q = base.q
    pole_tol = get_settings().POLE_TOL
    for n in range(0, n_max + 1):
        if abs(t1 * t2 + q ** (n + 1)) < pole_tol:
            raise PoleInNormalizer(f"t1 t2 = -q^{n + 1}", {"t1": str(t1), "t2": str(t2), "n": n})
    spec = FamilySpec.make(FamilyId.AS_CHIHARA_QINV, base, t1=t1, t2=t2)
    nu = nu_measure(mu, t1, t2, base)
    values = np.asarray(
        integrate(lambda xi: recurrence_table(spec, n_max, xi, Parametrization.HYPER), nu).value,
        dtype=complex,
    )
    worst = int(np.argmax(np.abs(values[1:]))) + 1
    params = {"t1": t1, "t2": t2, "t": mu.params.get("t"), "N": n_max, "n": worst}
    return CheckResult.compare(
        "THM_5_2", "Thm 5.2", record_params(base, params), values[worst], 0.0,
        _zero_tol(tolerance), scale=abs(values[0]), runtime_ms=_elapsed(start),
    )


def check_theorem52(params: Params, base: QBase, tolerance: Optional[float] = None) -> CheckResult:
    mu = qinv_hermite_measure(params["t"], base)
    return theorem52_check(params["t1"], params["t2"], base, mu, int(params.get("N", 6)), tolerance)


# ==============================================
# MASSAS E REPRESENTAÇÕES
# ==============================================

def _mass_carlitz(base: QBase, a: float) -> Measure:
    return carlitz_measure(a, base)


def _mass_named(name: str) -> Callable[..., Measure]:
    return lambda base, **params: build_measure(name, base, **params)


def _mass_nu_mu(base: QBase, t: float, t1: Number, t2: Number) -> Measure:
    return nu_measure(qinv_hermite_measure(t, base), t1, t2)


MASS_CHECKS: Dict[str, Tuple[str, Callable[..., Measure]]] = {
    "MASS_3_3": ("Eq. (3.3)", _mass_carlitz),
    "MASS_3_15": ("Eq. (3.15)", _mass_named("m")),
    "MASS_3_16": ("Eq. (3.16)", _mass_named("sigma")),
    "MASS_3_17": ("Eq. (3.17)", _mass_named("nu")),
    "MASS_5_3": ("Eq. (5.3)", _mass_named("qinv")),
    "MASS_5_7": ("Eq. (5.7)", _mass_nu_mu),
}


def _nonnegative(mu: Measure) -> bool:
    values = np.array([row[1] for row in measure_table(mu, atoms=64, samples=257)], dtype=complex)
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return bool(np.all(np.abs(values.imag) <= 1e-12 * scale) and np.all(values.real >= -1e-15 * scale))


def check_mass(check_id: str, params: Params, base: QBase, tolerance: Optional[float] = None) -> CheckResult:
    """Massa total somada/integrada contra a declarada, mais amostragem de sinal"""
    if check_id not in MASS_CHECKS:
        raise UnknownCheck(f"checagem de massa desconhecida: {check_id}", {"check_id": check_id})
    equation_ref, builder = MASS_CHECKS[check_id]
    start = time.perf_counter()
    mu = builder(base, **params)
    declared = mu.total_mass if mu.total_mass is not None else 1.0
    nonnegative = _nonnegative(mu) if mu.positive else None
    result = CheckResult.compare(
        check_id, equation_ref, record_params(base, {**params, "nonnegative": nonnegative}),
        total_mass(mu).value, declared, _tol(tolerance), runtime_ms=_elapsed(start),
    )
    if nonnegative is False:
        return result.model_copy(update={"passed": False})
    return result


def check_representation(params: Params, base: QBase, tolerance: Optional[float] = None) -> CheckResult:
    """
    Recorrência contra forma explícita normalizada para n = 1..n_max

    Famílias racionais comparam a variante com a forma padrão. Reporta o
    grau de maior resíduo relativo.
    """
    start = time.perf_counter()
    reserved = ("family", "variant", "coordinate", "n_max")
    family_params = {k: v for k, v in params.items() if k not in reserved}
    spec = FamilySpec.make(params["family"], base, **family_params)
    variant = params.get("variant", "default")
    point = _point(spec, params["coordinate"])
    worst: Optional[Tuple[float, int, complex, complex]] = None
    for n in range(1, int(params["n_max"]) + 1):
        value = eval_explicit(spec, n, point, variant) * normalization_map(spec, n, variant)
        if spec.info.has_recurrence:
            reference = eval_recurrence(spec, n, point)
        else:
            reference = eval_explicit(spec, n, point) * normalization_map(spec, n)
        residual = abs(value - reference) / max(abs(reference), 1e-300)
        if worst is None or residual > worst[0]:
            worst = (residual, n, value, reference)
    _, n, value, reference = worst
    tol = tolerance if tolerance is not None else get_settings().REPR_TOL
    return CheckResult.compare(
        "REPR", "recurrence vs explicit", record_params(base, {**params, "n": n}),
        value, reference, tol, runtime_ms=_elapsed(start),
    )
