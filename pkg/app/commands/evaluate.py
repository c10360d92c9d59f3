"""
Subcomando eval: avalia uma família por recorrência e pela forma explícita
"""

import logging
from typing import Any, Dict, List, Optional, Union

from app.errors import DomainViolation, NoRecurrence
from app.services.families import (
    TARGET_VARIANTS, EvalPoint, FamilySpec, Parametrization, eval_explicit, eval_recurrence, normalization_map,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, complex]


def parse_number(text: str) -> Number:
    """Aceita 0.5, -2, 0.3+0.2j (ou 0.3+0.2i)"""
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text.replace("i", "j"))
    except ValueError:
        raise DomainViolation(f"número inválido: {text!r}")


def parse_params(items: Optional[List[str]]) -> Dict[str, Any]:
    """
    Lista k=v com valores numéricos (reais ou complexos)

    Raises:
        DomainViolation: item sem "=" ou valor não numérico
    """
    params: Dict[str, Any] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        name = key.strip()
        if not sep or not name:
            raise DomainViolation(f"parâmetro deve ser k=v, recebeu {item!r}")
        try:
            params[name] = parse_number(value)
        except DomainViolation:
            raise DomainViolation(f"valor não numérico para {name}: {value.strip()!r}", {"param": name})
    return params


def parse_point(text: str) -> EvalPoint:
    """KIND:VALUE com KIND em trig | hyper | line | circle (ângulo)"""
    kind, sep, value = text.partition(":")
    if not sep:
        raise DomainViolation(f"ponto deve ser KIND:VALUE, recebeu {text!r}")
    try:
        parametrization = Parametrization(kind.strip().lower())
    except ValueError:
        raise DomainViolation(f"tipo de ponto desconhecido: {kind!r}", {"kinds": [p.value for p in Parametrization]})
    return EvalPoint(parametrization, parse_number(value))


def evaluate(spec: FamilySpec, n: int, point: EvalPoint, variant: str = "default") -> Dict[str, Any]:
    """
    Valores por recorrência e forma explícita, com o resíduo entre eles

    Famílias racionais não têm recorrência: a resposta traz só a forma
    explícita e uma nota. As variantes-alvo (orthonormal, monic) aplicam o
    mapa ao valor da recorrência.
    """
    if variant in TARGET_VARIANTS:
        recurrence = eval_recurrence(spec, n, point)
        return {"explicit": None, "recurrence": recurrence, "residual": None, "note": None,
                "target": recurrence * normalization_map(spec, n, variant)}
    explicit = eval_explicit(spec, n, point, variant)
    outcome: Dict[str, Any] = {"explicit": explicit, "recurrence": None, "residual": None, "note": None}
    try:
        recurrence = eval_recurrence(spec, n, point)
    except NoRecurrence as error:
        outcome["note"] = f"{error}; apenas a forma explícita"
        return outcome
    mapped = explicit * normalization_map(spec, n, variant)
    outcome["recurrence"] = recurrence
    outcome["mapped"] = mapped
    outcome["residual"] = abs(mapped - recurrence)
    return outcome


def _show(value: complex) -> str:
    value = complex(value)
    return repr(value.real) if value.imag == 0 else repr(value)


def cmd_eval(family: str, n: int, point: str, params: Optional[List[str]], q: float,
             variant: str = "default") -> int:
    spec = FamilySpec.make(family, q, **parse_params(params))
    location = parse_point(point)
    logger.info(f"📥 {spec.family_id.value} n={n} em {location.parametrization.value}:{location.coordinate}")
    outcome = evaluate(spec, n, location, variant)

    print(f"{spec.family_id.value} n={n} q={spec.q} {location.parametrization.value}:{location.coordinate}")
    if outcome["recurrence"] is not None:
        print(f"recurrence: {_show(outcome['recurrence'])}")
    if outcome["explicit"] is None:
        print(f"{variant}: {_show(outcome['target'])}")
        return 0
    print(f"explicit[{variant}]: {_show(outcome['explicit'])}")
    if outcome["residual"] is not None:
        print(f"explicit * map: {_show(outcome['mapped'])}")
        print(f"residual: {outcome['residual']:.3e}")
    if outcome["note"]:
        print(f"nota: {outcome['note']}")
    return 0
