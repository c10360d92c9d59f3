"""
Registro de checagens

CHECK_CATALOG descreve cada checagem (id, âncora, seção, tipo, grade de
parâmetros por q e sorteio opcional); CHECK_MAP liga o id à função que a
executa, no formato dos registros de ferramentas.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from app.config import get_settings
from app.errors import QHermiteError, UnknownCheck
from app.schemas import CheckResult, RunConfig
from app.services.families import FAMILY_INFO, FamilyId
from app.services.qcore import QBase
from app.services.verify import (
    GENFUN_CHECKS, GRAM_CHECKS, IDENTITY_CHECKS, INTEGRAL_CHECKS, MASS_CHECKS, check_gram, check_genfun_case,
    check_identity, check_integral, check_mass, check_radius, check_representation, check_theorem52,
    record_params,
)

logger = logging.getLogger(__name__)

Params = Dict[str, Any]
Grid = Callable[[float], List[Params]]
Sampler = Callable[[np.random.Generator, float], Union[Params, List[Params]]]
Runner = Callable[[QBase, Params, Optional[float]], List[CheckResult]]


# ==============================================
# GRAUS E PARÂMETROS COMUNS
# ==============================================

TERMINATING_DEGREE_MAX = 10
REPR_DEGREE_MAX = 12


def t_mu(q: float) -> float:
    """Parâmetro t da medida N-extremal usado nas grades (precisa q < t < 1)"""
    return 0.8 if q < 0.7 else (1 + q) / 2


def _degrees(start: int = 0) -> range:
    return range(start, TERMINATING_DEGREE_MAX + 1)


# ==============================================
# GRADES - INTEGRAIS
# ==============================================

def _grid_int_2_2(q: float) -> List[Params]:
    return [{"t1": t1, "t2": t2} for t1, t2 in [(0.0, 0.0), (0.3, -0.2), (0.5, 0.5), (-0.7, 0.4)]]


AW_POINTS = [(0.3, -0.2, 0.25, 0.1), (0.5, 0.4, -0.3, -0.6), (0.1, 0.2, 0.3, 0.4), (0.6, 0.0, 0.0, -0.5)]


def _grid_int_2_16(q: float) -> List[Params]:
    return [dict(zip(("t1", "t2", "t3", "t4"), ts)) for ts in AW_POINTS]


def _grid_int_2_22(q: float) -> List[Params]:
    points = [
        (0.3, -0.2, 0.25, -0.1, 0.4, 0.5),
        (0.2, 0.3, 0.4, 0.5, -0.3, 0.6),
        (0.5, 0.5, 0.2, 0.2, 0.5, 0.5),
        (0.4, -0.4, 0.3, -0.3, 0.7, -0.2),
    ]
    return [dict(zip(("t1", "t2", "t3", "t4", "t5", "t6"), ts)) for ts in points]


def _grid_carlitz(q: float) -> List[Params]:
    points = [(-1.0, 0.3, -0.4), (-0.5, 0.6, 0.2), (-2.0, 0.3, -0.2), (-1.0, 0.2 + 0.3j, 0.2 - 0.3j)]
    return [{"a": a, "t1": t1, "t2": t2} for a, t1, t2 in points]


def _grid_int_3_21(q: float) -> List[Params]:
    grid = []
    for a in ((1 + q) / 2, 2 / (1 + q)):
        bound = math.sqrt(q / a)
        for gamma in (0.5, 2.0):
            grid.append({"a": a, "gamma": gamma, "t1": 0.5 * bound, "t2": -0.3 * bound})
    return grid


def _grid_int_4_2(q: float) -> List[Params]:
    root = math.sqrt(q)
    return [{"t1": c1 * root, "t2": c2 * root}
            for c1, c2 in [(0.0, 0.0), (0.5, -0.3), (0.8, 0.8), (-0.6, 0.2 + 0.4j)]]


def _grid_int_5_5(q: float) -> List[Params]:
    pairs = [(0.4, -0.3), (0.3 + 0.2j, 0.3 - 0.2j), (1.0, 0.5), (-0.7, -0.2)]
    return [{"t": t_mu(q), "t1": t1, "t2": t2} for t1, t2 in pairs]


def _grid_int_5_10(q: float) -> List[Params]:
    scale = q ** 0.75
    points = [(0.5, 0.5, 0.5, 0.5), (0.8, -0.6, 0.3, 0.7), (0.3 + 0.4j, 0.3 - 0.4j, 0.5, -0.2), (0.9, 0.2, -0.4, 0.6)]
    return [{"t": t_mu(q), **{f"t{j + 1}": c * scale for j, c in enumerate(cs)}} for cs in points]


# pares (t1, t2) com nu_mu(t1, t2) positiva
POSITIVE_PAIRS = [(0.3 + 0.2j, 0.3 - 0.2j), (0.5, 0.2), (-0.4, -0.6), (0.2 + 0.5j, 0.2 - 0.5j)]


def _grid_int_5_24(q: float) -> List[Params]:
    grid = []
    for t1, t2 in POSITIVE_PAIRS:
        radius = min(q ** 1.5 / math.sqrt(abs(t1 * t2)), 1.0)
        grid.append({"t": t_mu(q), "t1": t1, "t2": t2, "t3": 0.5 * radius, "t4": -0.3 * radius})
    return grid


# ==============================================
# GRADES - IDENTIDADES
# ==============================================

def _grid_id_2_3(q: float) -> List[Params]:
    points = [(0.3, 0.5), (-0.7, 0.9), (2.5, -0.6), (0.5j, 0.3), (0.0, 0.4), (1.5, 0.2 + 0.3j), (-3.0, 0.1)]
    return [{"a": a, "z": z} for a, z in points]


def _grid_id_2_7(q: float) -> List[Params]:
    return [{"n": n, "a": -2.5, "c": 0.4} for n in _degrees()] + [{"n": 1, "a": 0.3, "c": 0.7}]


def _grid_id_2_11(q: float) -> List[Params]:
    grid = [{"n": n, "t1": 0.4, "t2": -0.3, "theta": 0.9} for n in _degrees(1)]
    return grid + [{"n": 3, "t1": 0.7, "t2": 0.2, "theta": 2.0}]


def _grid_id_2_14(q: float) -> List[Params]:
    points = [
        (0.3, -0.5, 0.7, 0.4), (-0.6, 0.2, 0.45, -0.7), (0.8, 0.8, -0.3, 0.5), (0.1 + 0.2j, 0.5, 0.6, 0.3),
        (1.7, 0.4, -0.9, 0.2), (0.5, 1.3, 0.35, 0.6), (-0.2, -0.9, 0.15, -0.3),
    ]
    return [dict(zip(("a", "b", "c", "z"), p)) for p in points]


def _grid_id_2_20(q: float) -> List[Params]:
    return [{"n": n, "a": 0.3, "b": -0.4, "c": 0.6, "d": 0.5, "e": -0.7} for n in _degrees()]


def _grid_id_3_5(q: float) -> List[Params]:
    return [{"z": z} for z in (0.5, -0.9, 3.0, 0.2 + 0.7j, -0.3, 10.0, 1.7)]


def _grid_id_3_7(q: float) -> List[Params]:
    points = [
        (0.3, -0.4, 0.55), (0.2, 0.5, -0.7), (0.6, 0.1, 1.7), (-0.5, -0.5, -1.3),
        (0.9, 0.4, 0.27j), (0.45, 0.35, 2.9), (0.1, -0.8, -0.35),
    ]
    return [dict(zip(("a", "b", "c"), p)) for p in points]


def _grid_big_q_jacobi_series(q: float) -> List[Params]:
    return [{"n": n, "a": -0.8, "t1": 0.3, "t2": 0.2, "x": 0.45} for n in _degrees(1)]


def _grid_id_3_14(q: float) -> List[Params]:
    return _grid_big_q_jacobi_series(q) + [{"n": 2, "a": -2.0, "t1": 0.4, "t2": -0.25, "x": -0.7}]


def _grid_id_3_20(q: float) -> List[Params]:
    points = [
        (0.5, 0.6, 0.2), (-0.7, 0.8, 0.3), (2.0, 1.5, -0.9), (0.3 + 0.4j, 0.3 - 0.4j, 0.1),
        (-1.2, -0.9, 0.5), (0.9, 0.95, 0.6), (3.0, -2.0, 1.5),
    ]
    return [dict(zip(("a", "b", "c"), p)) for p in points]


def _grid_id_5_9(q: float) -> List[Params]:
    points = [
        (0.0, 0.0, 0.5), (0.3, -0.2, -0.4), (1.0, 0.5, 0.3 + 0.3j), (0.5, 0.5, 0.6), (-0.4, 0.1, -0.6),
        (0.2, 0.2, 0.2j), (0.8, -0.8, 0.4), (1.2, -0.3, 0.25), (0.0, 0.6, -0.55), (0.7, 0.3, 0.45),
    ]
    return [{"xi": xi, "eta": eta, "z": z} for xi, eta, z in points]


def _grid_id_2_12(q: float) -> List[Params]:
    points = [(0.7, 3, 2), (-1.3, 6, 3), (0.4 + 0.3j, 5, 5), (2.5, 4, 0), (0.35, 6, 1), (-0.6, 2, 2), (1.1j, 7, 4)]
    return [{"a": a, "n": n, "k": k} for a, n, k in points]


def _grid_id_3_28(q: float) -> List[Params]:
    return [{"n": n, "a": 0.7, "t1": 0.2, "t2": -0.3, "x": 1.3, "alpha": 1.7} for n in _degrees(1)]


def _grid_id_4_6(q: float) -> List[Params]:
    return [{"n": n, "t1": 0.4, "t2": -0.2, "theta": 1.1} for n in _degrees(1)]


def _grid_id_5_17(q: float) -> List[Params]:
    grid = [{"n": n, "t1": 0.3 + 0.2j, "t2": 0.3 - 0.2j, "xi": 0.4} for n in _degrees(1)]
    return grid + [{"n": 3, "t1": 0.5, "t2": -0.4, "xi": -0.3}]


def _grid_id_1_3(q: float) -> List[Params]:
    return [{"n": n, "t": t} for t in (0.5, -0.7) for n in range(5)]


# ==============================================
# GRADES - GRAM, FUNÇÕES GERADORAS, RESTANTES
# ==============================================

def _grid_verma(q: float) -> List[Params]:
    bound = math.sqrt(q / 0.7)
    return [{"a": 0.7, "t1": 0.5 * bound, "t2": -0.4 * bound}]


GRAM_GRIDS: Dict[str, Grid] = {
    "ORTH_1_17": lambda q: [{}],
    "ORTH_2_1": lambda q: [{}],
    "ORTH_2_9": lambda q: [{"t1": 0.4, "t2": -0.3}, {"t1": 0.7, "t2": 0.5}],
    "ORTH_2_18": lambda q: [dict(zip(("t1", "t2", "t3", "t4"), ts)) for ts in AW_POINTS[:2]],
    "ORTH_3_2": lambda q: [{"a": -1.0}, {"a": -0.5}],
    "ORTH_3_11": lambda q: [{"a": -0.8, "t1": 0.3, "t2": 0.2}],
    "ORTH_3_13": lambda q: [{"a": -0.8, "t1": 0.3, "t2": 0.2}],
    "ORTH_3_18": lambda q: [{"a": 0.7, "measure": "m"}, {"a": 1.5, "measure": "sigma"}],
    "ORTH_5_3": lambda q: [{"t": t_mu(q)}],
    "ORTH_5_14": lambda q: [{"t": t_mu(q), "t1": t1, "t2": t2} for t1, t2 in POSITIVE_PAIRS[:2]],
    "BIORTH_3_24": _grid_verma,
    "BIORTH_4_5": lambda q: [{"t1": 0.4, "t2": -0.3}],
    "BIORTH_4_8": lambda q: [{"t1": 0.4, "t2": -0.3}, {"t1": 0.9, "t2": 0.6}],
    "BIORTH_5_22": lambda q: [{"t": t_mu(q), "t1": 0.3, "t2": 0.5}, {"t": t_mu(q), "t1": -0.4, "t2": 0.2}],
    "BIORTH_5_25": lambda q: [
        {"t": t_mu(q), **{f"t{j + 1}": c * q ** 0.75 for j, c in enumerate((0.6, 0.5, 0.4, -0.3))}}
    ],
}

GENFUN_GRIDS: Dict[str, Grid] = {
    "GENFUN_1_8": lambda q: [{"coordinate": 0.5, "t": 0.4}],
    "GENFUN_1_9": lambda q: [{"coordinate": 0.9, "t": t} for t in (0.3, -0.6, 0.5j)],
    "GENFUN_2_15": lambda q: [{"t1": 0.4, "t2": -0.3, "coordinate": 0.9, "t": 0.5}],
    "GENFUN_2_21": lambda q: [{"t1": 0.2, "t2": -0.2, "t3": 0.2, "t4": -0.2, "coordinate": 0.9, "t": 0.2}],
    "GENFUN_3_1": lambda q: [{"a": -1.5, "coordinate": 0.3, "t": 0.5}],
    "GENFUN_3_19": lambda q: [{"a": 2.0, "coordinate": 0.7, "t": 0.3}],
    "GENFUN_4_1": lambda q: [{"coordinate": 0.7, "t": 0.3}],
    "GENFUN_4_9": lambda q: [{"t1": 0.4, "t2": -0.2, "coordinate": 0.7, "t": 0.3}],
    "GENFUN_5_4": lambda q: [{"coordinate": 0.5, "t": 0.6}],
    "GENFUN_5_15": lambda q: [{"t1": 0.3 + 0.2j, "t2": 0.3 - 0.2j, "coordinate": 0.3, "t": 0.5}],
}


def _grid_radius(q: float) -> List[Params]:
    return [
        {"family": FamilyId.SZEGO_CIRCLE.value},
        {"family": FamilyId.AS_CARLITZ_V.value, "a": 2.0},
        {"family": FamilyId.AS_CARLITZ_U.value, "a": -1.0},
        {"family": FamilyId.QINV_HERMITE.value},
    ]


def _grid_theorem52(q: float) -> List[Params]:
    pairs = POSITIVE_PAIRS[:2] + [(0.6 + 0.1j, -0.2 + 0.4j)]
    return [{"t": t_mu(q), "t1": t1, "t2": t2, "N": 6} for t1, t2 in pairs]


MASS_GRIDS: Dict[str, Grid] = {
    "MASS_3_3": lambda q: [{"a": a} for a in (-1.0, -0.4, -2.5)],
    "MASS_3_15": lambda q: [{"a": 0.7}],
    "MASS_3_16": lambda q: [{"a": 1.5}, {"a": 3.0}],
    "MASS_3_17": lambda q: [{"a": (1 + q) / 2, "gamma": 1.3}],
    "MASS_5_3": lambda q: [{"t": t_mu(q)}],
    "MASS_5_7": lambda q: [{"t": t_mu(q), "t1": 0.3 + 0.2j, "t2": 0.3 - 0.2j},
                           {"t": t_mu(q), "t1": 0.4, "t2": -0.5}],
}

# (família, coordenada, parâmetros, variantes)
REPRESENTATIONS = [
    (FamilyId.CONTINUOUS_Q_HERMITE, 0.7, {}, ["default"]),
    (FamilyId.DISCRETE_Q_HERMITE, 0.37, {}, ["default"]),
    (FamilyId.QINV_HERMITE, 0.4, {}, ["default"]),
    (FamilyId.AS_CARLITZ_U, 0.37, {"a": -0.6}, ["default"]),
    (FamilyId.AS_CARLITZ_V, 0.37, {"a": 1.7}, ["default"]),
    (FamilyId.AS_CHIHARA, 0.8, {"t1": 0.4, "t2": -0.3}, ["default", "reversed", "pfaff", "cauchy"]),
    (FamilyId.ASKEY_WILSON, 0.8, {"t1": 0.3, "t2": -0.2, "t3": 0.25, "t4": 0.1}, ["default"]),
    (FamilyId.BIG_Q_JACOBI, 0.45, {"a": -0.8, "t1": 0.3, "t2": 0.2}, ["default", "symmetric", "andrews_askey"]),
    (FamilyId.SZEGO_CIRCLE, 1.1, {}, ["default"]),
    (FamilyId.PASTRO, 1.1, {"t1": 0.4, "t2": -0.3}, ["default", "pastro_tilde"]),
    (FamilyId.AS_CHIHARA_QINV, 0.4, {"t1": 0.3 + 0.2j, "t2": 0.3 - 0.2j}, ["default", "cauchy", "3phi1"]),
    (FamilyId.AS_VERMA_RATIONAL, 1.3, {"a": 0.7, "t1": 0.2, "t2": -0.3}, ["verma"]),
]


def _grid_representation(q: float) -> List[Params]:
    return [
        {"family": family.value, "variant": variant, "coordinate": coordinate, "n_max": REPR_DEGREE_MAX, **params}
        for family, coordinate, params, variants in REPRESENTATIONS
        for variant in variants
    ]


# ==============================================
# SORTEIOS
# ==============================================

def _uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(rng.uniform(lo, hi))


def _signed(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Módulo em [lo, hi) com sinal aleatório"""
    return _uniform(rng, lo, hi) * (1 if rng.random() < 0.5 else -1)


def _degree(rng: np.random.Generator, start: int = 0) -> int:
    return int(rng.integers(start, TERMINATING_DEGREE_MAX + 1))


def _pair(rng: np.random.Generator, lo: float = 0.1, hi: float = 0.8) -> Params:
    return {"t1": _signed(rng, lo, hi), "t2": _signed(rng, lo, hi)}


# coordenada e parâmetros sorteados dentro do domínio de cada família polinomial
REPR_DRAWERS: Dict[FamilyId, Callable[[np.random.Generator], Tuple[float, Params]]] = {
    FamilyId.CONTINUOUS_Q_HERMITE: lambda rng: (_uniform(rng, 0.0, math.pi), {}),
    FamilyId.DISCRETE_Q_HERMITE: lambda rng: (_uniform(rng, -1.0, 1.0), {}),
    FamilyId.QINV_HERMITE: lambda rng: (_uniform(rng, -1.0, 1.0), {}),
    FamilyId.AS_CARLITZ_U: lambda rng: (_uniform(rng, -1.0, 1.0), {"a": _uniform(rng, -2.0, -0.2)}),
    FamilyId.AS_CARLITZ_V: lambda rng: (_uniform(rng, -1.0, 1.0), {"a": _uniform(rng, 0.2, 3.0)}),
    FamilyId.AS_CHIHARA: lambda rng: (_uniform(rng, 0.0, math.pi), _pair(rng)),
    FamilyId.ASKEY_WILSON: lambda rng: (
        _uniform(rng, 0.0, math.pi), {f"t{j}": _signed(rng, 0.1, 0.7) for j in range(1, 5)},
    ),
    FamilyId.BIG_Q_JACOBI: lambda rng: (
        _uniform(rng, -1.0, 1.0), {"a": _uniform(rng, -1.2, -0.3), **_pair(rng, 0.1, 0.7)},
    ),
    FamilyId.SZEGO_CIRCLE: lambda rng: (_uniform(rng, -math.pi, math.pi), {}),
    FamilyId.PASTRO: lambda rng: (_uniform(rng, -math.pi, math.pi), _pair(rng)),
    FamilyId.AS_CHIHARA_QINV: lambda rng: (_uniform(rng, -1.0, 1.0), _pair(rng)),
}

REPR_VARIANTS: Dict[FamilyId, List[str]] = {family: variants for family, _, _, variants in REPRESENTATIONS}


def _draw_representations(rng: np.random.Generator, q: float) -> List[Params]:
    """Um sorteio por família polinomial: ponto, parâmetros e variante"""
    draws = []
    for family, draw in REPR_DRAWERS.items():
        coordinate, params = draw(rng)
        variants = REPR_VARIANTS[family]
        variant = variants[int(rng.integers(len(variants)))]
        draws.append({"family": family.value, "variant": variant, "coordinate": coordinate,
                      "n_max": REPR_DEGREE_MAX, **params})
    return draws


SAMPLERS: Dict[str, Sampler] = {
    "INT_2_2": lambda rng, q: {"t1": _uniform(rng, -0.8, 0.8), "t2": _uniform(rng, -0.8, 0.8)},
    "INT_2_16": lambda rng, q: {f"t{j}": _uniform(rng, -0.7, 0.7) for j in range(1, 5)},
    "INT_3_6": lambda rng, q: {"a": _uniform(rng, -2.0, -0.3), "t1": _uniform(rng, -0.4, 0.4),
                               "t2": _uniform(rng, -0.4, 0.4)},
    "SUM_3_7": lambda rng, q: {"a": _uniform(rng, -2.0, -0.3), "t1": _uniform(rng, -0.4, 0.4),
                               "t2": _uniform(rng, -0.4, 0.4)},
    "INT_4_2": lambda rng, q: {"t1": _uniform(rng, -0.8, 0.8) * math.sqrt(q),
                               "t2": _uniform(rng, -0.8, 0.8) * math.sqrt(q)},
    "INT_5_5": lambda rng, q: {"t": t_mu(q), "t1": _uniform(rng, -1.0, 1.0), "t2": _uniform(rng, -1.0, 1.0)},
    "ID_2_3": lambda rng, q: {"a": _uniform(rng, -2.0, 2.0), "z": _uniform(rng, -0.8, 0.8)},
    "ID_2_7": lambda rng, q: {"n": _degree(rng), "a": _uniform(rng, -2.0, -0.2), "c": _uniform(rng, -0.8, 0.8)},
    "ID_2_11": lambda rng, q: {"n": _degree(rng, 1), "t1": _signed(rng, 0.1, 0.8),
                               "t2": _signed(rng, 0.1, 0.8), "theta": _uniform(rng, 0.0, math.pi)},
    "ID_2_14": lambda rng, q: {"a": _uniform(rng, -0.9, 0.9), "b": _signed(rng, 0.3, 0.9),
                               "c": _uniform(rng, -0.9, -0.1), "z": _uniform(rng, -0.8, 0.8)},
    "ID_3_5": lambda rng, q: {"z": complex(_uniform(rng, -3.0, 3.0), _uniform(rng, -3.0, 3.0))},
    "ID_3_20": lambda rng, q: {"a": _signed(rng, 1.2, 2.0), "b": _signed(rng, 1.2, 2.0),
                               "c": _uniform(rng, -0.9, -0.1)},
    "ID_5_9": lambda rng, q: {"xi": _uniform(rng, -1.0, 1.0), "eta": _uniform(rng, -1.0, 1.0),
                              "z": _uniform(rng, -0.5, 0.5)},
    "ID_2_12": lambda rng, q: _draw_shift(rng),
    "REPR": _draw_representations,
}


def _draw_shift(rng: np.random.Generator) -> Params:
    n = int(rng.integers(0, 8))
    return {"a": _uniform(rng, -1.5, -0.2), "n": n, "k": int(rng.integers(0, n + 1))}


# ==============================================
# CATÁLOGO
# ==============================================

def _section(check_id: str) -> int:
    parts = check_id.split("_")
    return int(parts[1]) if len(parts) > 1 else 1


def _entry(check_id: str, equation_ref: str, kind: str, description: str, grid: Grid) -> Dict[str, Any]:
    return {
        "id": check_id,
        "equation_ref": equation_ref,
        "section": _section(check_id),
        "kind": kind,
        "description": description,
        "grid": grid,
        "sampler": SAMPLERS.get(check_id),
    }


INTEGRAL_GRIDS: Dict[str, Grid] = {
    "INT_2_2": _grid_int_2_2,
    "INT_2_16": _grid_int_2_16,
    "INT_2_22": _grid_int_2_22,
    "INT_3_6": _grid_carlitz,
    "SUM_3_7": _grid_carlitz,
    "INT_3_21": _grid_int_3_21,
    "INT_4_2": _grid_int_4_2,
    "INT_5_5": _grid_int_5_5,
    "INT_5_10": _grid_int_5_10,
    "INT_5_24": _grid_int_5_24,
}

IDENTITY_GRIDS: Dict[str, Grid] = {
    "ID_1_3": _grid_id_1_3,
    "ID_2_3": _grid_id_2_3,
    "ID_2_7": _grid_id_2_7,
    "ID_2_11": _grid_id_2_11,
    "ID_2_12": _grid_id_2_12,
    "ID_2_14": _grid_id_2_14,
    "ID_2_20": _grid_id_2_20,
    "ID_3_5": _grid_id_3_5,
    "ID_3_7": _grid_id_3_7,
    "ID_3_12": _grid_big_q_jacobi_series,
    "ID_3_14": _grid_id_3_14,
    "ID_3_20": _grid_id_3_20,
    "ID_3_28": _grid_id_3_28,
    "ID_4_6": _grid_id_4_6,
    "ID_5_9": _grid_id_5_9,
    "ID_5_17": _grid_id_5_17,
}

CHECK_CATALOG: List[Dict[str, Any]] = (
    [_entry(cid, INTEGRAL_CHECKS[cid][0], "integral", "integral q-beta contra forma fechada", grid)
     for cid, grid in INTEGRAL_GRIDS.items()]
    + [_entry(cid, "Eq. (2.12)" if cid == "ID_2_12" else IDENTITY_CHECKS[cid][0], "identity",
              "identidade de séries q", grid)
       for cid, grid in IDENTITY_GRIDS.items()]
    + [_entry(cid, GRAM_CHECKS[cid][0], "gram", "matriz de Gram contra normas impressas", grid)
       for cid, grid in GRAM_GRIDS.items()]
    + [_entry(cid, FAMILY_INFO[GENFUN_CHECKS[cid]].genfun_ref, "genfun", "soma parcial vs função geradora", grid)
       for cid, grid in GENFUN_GRIDS.items()]
    + [_entry(cid, MASS_CHECKS[cid][0], "mass", "massa total e sinal da medida", grid)
       for cid, grid in MASS_GRIDS.items()]
    + [
        _entry("RADIUS_1_4", "Eq. (1.4)", "radius", "raio pelo teste da razão", _grid_radius),
        _entry("THM_5_2", "Thm 5.2", "theorem", "int u_n dnu_mu = 0 para n >= 1", _grid_theorem52),
        _entry("REPR", "recurrence vs explicit", "repr", "recorrência vs formas explícitas", _grid_representation),
    ]
)

KIND_RUNNERS: Dict[str, Callable[[str], Runner]] = {
    "integral": lambda cid: lambda base, params, tol: [check_integral(cid, params, base, tol)],
    "identity": lambda cid: lambda base, params, tol: [check_identity(cid, params, base, tol)],
    "gram": lambda cid: lambda base, params, tol: check_gram(cid, params, base, tol),
    "genfun": lambda cid: lambda base, params, tol: [check_genfun_case(cid, params, base, tol)],
    "mass": lambda cid: lambda base, params, tol: [check_mass(cid, params, base, tol)],
    "radius": lambda cid: lambda base, params, tol: [check_radius(params, base, tol)],
    "theorem": lambda cid: lambda base, params, tol: [check_theorem52(params, base, tol)],
    "repr": lambda cid: lambda base, params, tol: [check_representation(params, base, tol)],
}

# Mapeamento de checagens para execução
CHECK_MAP: Dict[str, Runner] = {entry["id"]: KIND_RUNNERS[entry["kind"]](entry["id"]) for entry in CHECK_CATALOG}

CATALOG_BY_ID: Dict[str, Dict[str, Any]] = {entry["id"]: entry for entry in CHECK_CATALOG}


# ==============================================
# SELEÇÃO E EXECUÇÃO
# ==============================================

@dataclass(frozen=True)
class CheckTask:
    check_id: str
    q: float
    params: Params = field(default_factory=dict)


def resolve_selector(selector: str) -> List[Dict[str, Any]]:
    """
    all | section:<n> | check:<id>[,<id>...]

    Raises:
        UnknownCheck: seletor malformado, seção vazia ou id inexistente
    """
    selector = selector.strip()
    if selector == "all":
        return list(CHECK_CATALOG)
    kind, _, value = selector.partition(":")
    if kind == "section":
        try:
            section = int(value)
        except ValueError:
            raise UnknownCheck(f"seção inválida: {value!r}", {"selector": selector})
        entries = [entry for entry in CHECK_CATALOG if entry["section"] == section]
        if not entries:
            raise UnknownCheck(f"nenhuma checagem na seção {section}", {"selector": selector})
        return entries
    if kind == "check":
        ids = [item.strip() for item in value.split(",") if item.strip()]
        unknown = [cid for cid in ids if cid not in CATALOG_BY_ID]
        if unknown or not ids:
            raise UnknownCheck(f"checagens desconhecidas: {unknown or value!r}", {"selector": selector})
        return [CATALOG_BY_ID[cid] for cid in ids]
    raise UnknownCheck(f"seletor inválido: {selector!r}", {"selector": selector})


def plan_suite(config: RunConfig) -> List[CheckTask]:
    """Tarefas (id, q, params) da grade padrão mais os sorteios semeados"""
    q_values = config.q_values or get_settings().q_grid
    rng = np.random.default_rng(config.seed)
    tasks: List[CheckTask] = []
    for entry in resolve_selector(config.selector):
        for q in q_values:
            for params in entry["grid"](q):
                tasks.append(CheckTask(entry["id"], q, params))
            sampler = entry["sampler"]
            if sampler is None:
                continue
            for _ in range(config.random_draws):
                drawn = sampler(rng, q)
                for params in drawn if isinstance(drawn, list) else [drawn]:
                    tasks.append(CheckTask(entry["id"], q, params))
    logger.info(f"📦 {len(tasks)} tarefas planejadas para '{config.selector}'")
    return tasks


def run_check(check_id: str, q: float, params: Params, tolerance: Optional[float] = None) -> List[CheckResult]:
    """
    Executa uma checagem; erros numéricos viram registros reprovados

    Raises:
        UnknownCheck: id fora do catálogo
    """
    if check_id not in CHECK_MAP:
        raise UnknownCheck(f"checagem desconhecida: {check_id}", {"check_id": check_id})
    entry = CATALOG_BY_ID[check_id]
    base = QBase(q)
    start = time.perf_counter()
    try:
        results = CHECK_MAP[check_id](base, params, tolerance)
    except UnknownCheck:
        raise
    except (QHermiteError, ArithmeticError, ValueError) as error:
        logger.error(f"❌ {check_id} q={q} {params}: {error}")
        failure = CheckResult.failure(
            check_id, entry["equation_ref"], record_params(base, params), error,
            tolerance if tolerance is not None else get_settings().CHECK_TOL,
        )
        return [failure.model_copy(update={"runtime_ms": (time.perf_counter() - start) * 1e3})]
    for result in results:
        if not result.passed:
            logger.warning(f"❌ {check_id} q={q}: rel_err={result.rel_err:.3g} (tol {result.tolerance:.1g})")
    return results
