"""
Subcomando suite: executa checagens do catálogo e escreve o relatório
"""

import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

from app.config import get_settings
from app.db.database import get_db, get_run_history, init_db, save_run
from app.errors import QHermiteError
from app.schemas import CheckResult, RunConfig
from app.services.catalog import CheckTask, plan_suite, run_check
from app.utils.formatters import RENDERERS, format_error, format_run_history, sort_results

logger = logging.getLogger(__name__)


def run_suite(config: RunConfig) -> List[CheckResult]:
    """
    Executa as tarefas planejadas (em paralelo se jobs > 1)

    A saída é sempre ordenada por (check_id, parâmetros), independente da
    ordem de término das threads.
    """
    tasks = plan_suite(config)

    def execute(task: CheckTask) -> List[CheckResult]:
        return run_check(task.check_id, task.q, task.params, config.tolerance)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            batches = list(pool.map(execute, tasks))
    else:
        batches = [execute(task) for task in tasks]
    return sort_results(result for batch in batches for result in batch)


def write_report(results: List[CheckResult], output_format: str, output_path: Optional[str] = None):
    text = RENDERERS[output_format](results)
    if output_path:
        Path(output_path).write_text(text, encoding="utf-8")
        logger.info(f"📤 Relatório gravado em {output_path}")
    else:
        sys.stdout.write(text)


def cmd_suite(config: RunConfig) -> int:
    """
    Returns:
        0 se tudo passou, 1 se alguma checagem reprovou, 2 em erro de uso/domínio
    """
    settings = get_settings()
    q_values = config.q_values or settings.q_grid
    logger.info(f"🚀 Suite '{config.selector}' em q={q_values}")
    tol = f"{config.tolerance:g}" if config.tolerance is not None else "padrão"
    logger.info(f"📦 tol={tol}, jobs={config.jobs}, seed={config.seed}, sorteios={config.random_draws}")

    try:
        results = run_suite(config)
    except QHermiteError as error:
        logger.error(f"❌ {error}")
        print(json.dumps(format_error(error, error.exit_code), ensure_ascii=False, default=str), file=sys.stderr)
        return error.exit_code

    write_report(results, config.output_format, config.output_path)

    if config.save or settings.SAVE_HISTORY:
        init_db()
        with get_db() as db:
            run = save_run(db, config.selector, q_values, results)
            logger.info(f"✅ Execução {run.id} salva no histórico")

    failed = sum(1 for r in results if not r.passed)
    logger.info(f"🛑 {len(results) - failed}/{len(results)} aprovados")
    return 1 if failed else 0


def cmd_history(limit: int) -> int:
    """Lista as últimas execuções salvas"""
    init_db()
    with get_db() as db:
        runs = format_run_history(get_run_history(db, limit))
    print(json.dumps(runs, indent=2, ensure_ascii=False))
    return 0
