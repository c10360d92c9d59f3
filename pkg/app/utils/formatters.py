import csv
import io
import json
import math
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional

from app.schemas import CheckResult

REPORT_FIELDS = [
    "check_id", "equation_ref", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
    "abs_err", "rel_err", "tolerance", "pass", "runtime_ms",
]


def _finite(value: float) -> Optional[float]:
    """NaN/inf viram null para manter o JSON válido"""
    return value if math.isfinite(value) else None


def report_row(result: CheckResult) -> Dict[str, Any]:
    """
    Linha do relatório com os campos de REPORT_FIELDS, nesta ordem
    """
    return {
        "check_id": result.check_id,
        "equation_ref": result.equation_ref,
        "params": result.params,
        "lhs_re": _finite(result.lhs.real),
        "lhs_im": _finite(result.lhs.imag),
        "rhs_re": _finite(result.rhs.real),
        "rhs_im": _finite(result.rhs.imag),
        "abs_err": _finite(result.abs_err),
        "rel_err": _finite(result.rel_err),
        "tolerance": result.tolerance,
        "pass": result.passed,
        "runtime_ms": round(result.runtime_ms, 3),
    }


def sort_results(results: Iterable[CheckResult]) -> List[CheckResult]:
    """Ordem determinística: check_id, depois os parâmetros serializados"""
    return sorted(results, key=lambda r: (r.check_id, json.dumps(r.params, sort_keys=True, default=str)))


def render_json(results: Iterable[CheckResult]) -> str:
    return json.dumps([report_row(r) for r in results], indent=2, ensure_ascii=False) + "\n"


def render_csv(results: Iterable[CheckResult]) -> str:
    """Projeção plana do JSON; params vira uma coluna JSON"""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=REPORT_FIELDS)
    writer.writeheader()
    for result in results:
        row = report_row(result)
        row["params"] = json.dumps(row["params"], sort_keys=True)
        writer.writerow(row)
    return buffer.getvalue()


def render_human(results: Iterable[CheckResult]) -> str:
    """
    Uma linha por registro com a âncora da equação ao lado, mais um resumo
    """
    results = list(results)
    lines = []
    for r in results:
        mark = "✅" if r.passed else "❌"
        params = ", ".join(f"{k}={v}" for k, v in r.params.items())
        lines.append(f"{mark} {r.check_id:<12} {r.equation_ref:<24} rel_err={r.rel_err:.2e}  [{params}]")
    failed = sum(1 for r in results if not r.passed)
    lines.append(f"{len(results) - failed}/{len(results)} aprovados, {failed} reprovados")
    return "\n".join(lines) + "\n"


RENDERERS = {
    "json": render_json,
    "csv": render_csv,
    "human": render_human,
}


def format_error(error: Exception, exit_code: int = 2) -> Dict[str, Any]:
    """
    Formata resposta de erro
    """
    return {
        "success": False,
        "error": f"{type(error).__name__}: {error}",
        "detail": getattr(error, "detail", {}),
        "exit_code": exit_code,
        "timestamp": datetime.now(timezone.utc).isoformat()
    }


def format_run_history(runs: list) -> list:
    """
    Formata histórico de execuções
    """
    return [
        {
            "id": run.id,
            "selector": run.selector,
            "q_grid": run.q_grid,
            "total": run.total,
            "failed": run.failed,
            "timestamp": run.created_at.isoformat()
        }
        for run in runs
    ]
