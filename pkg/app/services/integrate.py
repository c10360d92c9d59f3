"""
Motor de produtos internos

Quadratura adaptativa de Gauss-Legendre por painéis (intervalos e reta real),
regra do trapézio no círculo e soma discreta com cota de cauda. Integrandos
são funções vetorizadas na coordenada da medida e podem devolver arrays de
forma (k, m); o resultado então tem forma (k,).
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Tuple, Union

import numpy as np

from app.config import get_settings
from app.errors import MaxNodesExceeded, MaxPanelsExceeded, NonDecayingIntegrand, TailBoundFailure
from app.services.measures import Measure, MeasureShape

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
Value = Union[complex, np.ndarray]


@dataclass(frozen=True)
class QuadResult:
    value: Value
    err_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.err_estimate >= 0:
            object.__setattr__(self, "err_estimate", float("inf"))

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(self.value + other.value, self.err_estimate + other.err_estimate,
                          self.evaluations + other.evaluations)


def _finish(value: np.ndarray) -> Value:
    value = np.asarray(value, dtype=complex)
    return complex(value) if value.ndim == 0 else value


def _magnitude(value) -> float:
    return float(np.max(np.abs(value))) if np.size(value) else 0.0


# ==============================================
# GAUSS-LEGENDRE ADAPTATIVO
# ==============================================

@lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _panel(integrand: Integrand, lo: float, hi: float, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """(integral, integral de |.|) num painel"""
    nodes, weights = _gauss_legendre(order)
    half = 0.5 * (hi - lo)
    values = np.asarray(integrand(0.5 * (hi + lo) + half * nodes), dtype=complex)
    return half * (values @ weights), half * (np.abs(values) @ weights)


def _adaptive(integrand: Integrand, lo: float, hi: float, eps: float, scale: float = 0.0) -> QuadResult:
    """
    Divide painéis até a diferença entre o painel e suas duas metades ficar
    abaixo de eps * escala * (largura / comprimento total)

    A escala é a integral de |integrando|, o que cobre integrais nulas.
    """
    settings = get_settings()
    order = settings.GL_ORDER
    length = hi - lo
    edges = np.linspace(lo, hi, 5)
    pending: List[Tuple[float, float, np.ndarray]] = []
    evaluations = 0
    mass = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value, absolute = _panel(integrand, a, b, order)
        evaluations += order
        mass += _magnitude(absolute)
        pending.append((a, b, value))
    scale = max(scale, mass)
    if scale == 0:
        return QuadResult(_finish(sum(p[2] for p in pending)), 0.0, evaluations)

    total = 0j
    err = 0.0
    panels = len(pending)
    while pending:
        a, b, whole = pending.pop()
        mid = 0.5 * (a + b)
        left, _ = _panel(integrand, a, mid, order)
        right, _ = _panel(integrand, mid, b, order)
        evaluations += 2 * order
        refined = left + right
        diff = _magnitude(refined - whole)
        if diff <= eps * scale * (b - a) / length or (b - a) <= 1e-15 * length:
            total = total + refined
            err += diff
            continue
        panels += 1
        if panels > settings.MAX_PANELS:
            raise MaxPanelsExceeded(
                f"quadratura adaptativa excedeu {settings.MAX_PANELS} painéis em [{lo}, {hi}]",
                {"lo": lo, "hi": hi},
            )
        pending.append((a, mid, left))
        pending.append((mid, b, right))
    logger.debug(f"integrate_interval [{lo:.4g}, {hi:.4g}]: {panels} painéis, {evaluations} avaliações")
    return QuadResult(_finish(total), err, evaluations)


def _integrate_real_line(integrand: Integrand, eps: float) -> QuadResult:
    """
    Integra em [-R, R] dobrando R até a última faixa acrescentar menos que
    eps em termos relativos

    Raises:
        NonDecayingIntegrand: faixas não decaem ou R passa de LINE_R_MAX
    """
    settings = get_settings()
    radius = settings.LINE_R_START
    result = _adaptive(integrand, -radius, radius, eps)
    previous_piece = math.inf
    while True:
        new_radius = 2 * radius
        if new_radius > settings.LINE_R_MAX:
            raise NonDecayingIntegrand(
                f"integrando não decaiu até R={radius:.4g}",
                {"radius": radius},
            )
        scale = _magnitude(result.value) or 1.0
        piece = (_adaptive(integrand, radius, new_radius, eps, scale)
                 + _adaptive(integrand, -new_radius, -radius, eps, scale))
        result = result + piece
        size = _magnitude(piece.value)
        radius = new_radius
        if size <= eps * _magnitude(result.value) or size == 0:
            logger.debug(f"reta real: R final {radius:.4g}")
            return QuadResult(result.value, result.err_estimate + size, result.evaluations)
        if size > previous_piece and radius > 64 * settings.LINE_R_START:
            raise NonDecayingIntegrand(
                f"faixa [{radius / 2:.4g}, {radius:.4g}] não decaiu ({size:.3g} > {previous_piece:.3g})",
                {"radius": radius},
            )
        previous_piece = size


def integrate_interval(f: Integrand, density: Measure) -> QuadResult:
    """
    Integral de f(x) w(x) sobre o suporte da densidade

    Raises:
        MaxPanelsExceeded / NonDecayingIntegrand
    """
    eps = get_settings().EPS_QUAD

    def integrand(coords: np.ndarray) -> np.ndarray:
        return np.asarray(f(coords)) * density.density(coords)

    if density.on_real_line:
        return _integrate_real_line(integrand, eps)
    lo, hi = density.support
    return _adaptive(integrand, lo, hi, eps)


# ==============================================
# CÍRCULO
# ==============================================

def integrate_circle(f: Integrand, weight: Measure, n_nodes: int = 0) -> QuadResult:
    """
    (1/2pi) int_0^{2pi} f(e^{i theta}) w(e^{i theta}) dtheta pela regra do trapézio

    Os nós dobram a partir de n_nodes (ou CIRCLE_NODES_START) até dois
    resultados sucessivos concordarem em EPS_QUAD.

    Raises:
        MaxNodesExceeded
    """
    settings = get_settings()
    eps = settings.EPS_QUAD
    count = n_nodes or settings.CIRCLE_NODES_START

    def samples(theta: np.ndarray) -> np.ndarray:
        return np.asarray(f(theta), dtype=complex) * weight.density(theta)

    theta = 2 * math.pi * np.arange(count) / count
    values = samples(theta)
    current = values.mean(axis=-1)
    scale = _magnitude(np.abs(values).mean(axis=-1))
    evaluations = count
    while True:
        if 2 * count > settings.CIRCLE_NODES_MAX:
            raise MaxNodesExceeded(
                f"regra do trapézio não convergiu com {count} nós",
                {"nodes": count},
            )
        odd = 2 * math.pi * (np.arange(count) + 0.5) / count
        odd_values = samples(odd)
        evaluations += count
        refined = 0.5 * (current + odd_values.mean(axis=-1))
        diff = _magnitude(refined - current)
        scale = max(scale, _magnitude(np.abs(odd_values).mean(axis=-1)))
        count *= 2
        current = refined
        if diff <= eps * max(scale, 1e-300):
            logger.debug(f"integrate_circle: {count} nós")
            return QuadResult(_finish(current), diff, evaluations)


# ==============================================
# SOMA DISCRETA
# ==============================================

def sum_discrete(f: Integrand, mu: Measure) -> QuadResult:
    """
    Soma f(x_i) m_i ramo a ramo, em blocos que dobram de tamanho

    Um ramo termina quando o bloco mais recente contribui menos que
    EPS_TAIL vezes o maior bloco do ramo; o erro reportado é a soma
    absoluta desses últimos blocos (as massas decaem ao menos geometricamente).

    Raises:
        TailBoundFailure: MAX_ATOMS atingido sem estabilizar
    """
    settings = get_settings()
    eps = settings.EPS_TAIL
    total = 0j
    err = 0.0
    evaluations = 0
    for index, branch in enumerate(mu.branches):
        done, chunk = 0, 16
        scale = 0.0
        while True:
            atoms = branch.take(done + chunk)[done:]
            if not atoms:
                break
            points = np.array([a.point for a in atoms], dtype=float)
            masses = np.array([a.mass for a in atoms], dtype=complex)
            # átomos aniquilados (massa nula) não avaliam f
            live = masses != 0
            if live.any():
                contributions = np.asarray(f(points[live]), dtype=complex) * masses[live]
            else:
                contributions = np.zeros(0, dtype=complex)
            evaluations += int(live.sum())
            done += len(atoms)
            block_size = _magnitude(np.abs(contributions).sum(axis=-1))
            total = total + contributions.sum(axis=-1)
            scale = max(scale, block_size)
            if block_size <= eps * scale or len(atoms) < chunk:
                err += block_size
                break
            if done >= settings.MAX_ATOMS:
                raise TailBoundFailure(
                    f"{mu.name}: ramo {index} não estabilizou em {settings.MAX_ATOMS} átomos",
                    {"measure": mu.name, "branch": index},
                )
            chunk *= 2
        logger.debug(f"sum_discrete {mu.name} ramo {index}: {done} átomos")
    return QuadResult(_finish(total), err, evaluations)


# ==============================================
# DESPACHO
# ==============================================

def integrate(h: Integrand, mu: Measure) -> QuadResult:
    """int h dmu conforme o formato da medida"""
    if mu.shape is MeasureShape.DISCRETE:
        return sum_discrete(h, mu)
    if mu.shape is MeasureShape.CIRCLE:
        return integrate_circle(h, mu)
    return integrate_interval(h, mu)


def inner_product(f: Integrand, g: Integrand, mu: Measure) -> QuadResult:
    """
    int f g dmu sem conjugação; o produto hermitiano no círculo conjuga g
    no chamador (as matrizes de Gram fazem isso)

    Raises:
        NonDecayingIntegrand / TailBoundFailure / MaxPanelsExceeded / MaxNodesExceeded
    """
    return integrate(lambda c: np.asarray(f(c)) * np.asarray(g(c)), mu)


def total_mass(mu: Measure) -> QuadResult:
    return integrate(lambda c: np.ones_like(c, dtype=complex), mu)
