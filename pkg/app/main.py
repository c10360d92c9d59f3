import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.config import get_settings
from app.errors import QHermiteError
from app.schemas import RunConfig
from app.commands.evaluate import cmd_eval
from app.commands.measure import cmd_measure
from app.commands.suite import cmd_history, cmd_suite
from app.utils.formatters import format_error

logger = logging.getLogger(__name__)

USAGE_ERROR = 2


def configure_logging(verbose: bool = False):
    """Logs vão para stderr; stdout fica reservado ao relatório"""
    logging.basicConfig(
        level=logging.DEBUG if verbose or get_settings().DEBUG else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )


# ==============================================
# PARSER
# ==============================================

def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="qhermite",
        description=f"{settings.APP_NAME} {settings.APP_VERSION}: identidades da escada q-Hermite",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="logs em nível DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    suite = sub.add_parser("suite", help="executa checagens do catálogo")
    scope = suite.add_mutually_exclusive_group()
    scope.add_argument("--section", type=int, help="apenas as checagens de uma seção")
    scope.add_argument("--check", nargs="+", metavar="ID", help="apenas os ids dados")
    suite.add_argument("--q", nargs="+", type=float, dest="q_values", help="grade de q (padrão DEFAULT_Q_GRID)")
    suite.add_argument("--format", choices=["json", "csv", "human"], default="json", dest="output_format")
    suite.add_argument("--output", "-o", dest="output_path", help="arquivo de saída (padrão stdout)")
    suite.add_argument("--jobs", "-j", type=int, default=1)
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--random", type=int, default=0, dest="random_draws",
                       help="pontos sorteados extras por checagem")
    suite.add_argument("--tol", type=float, dest="tolerance", help="sobrescreve CHECK_TOL e ZERO_TOL")
    suite.add_argument("--save", action="store_true", help="grava a execução no histórico")
    suite.add_argument("--history", type=int, metavar="N", help="lista as N últimas execuções e sai")

    evaluate = sub.add_parser("eval", help="avalia um polinômio de uma família")
    evaluate.add_argument("family")
    evaluate.add_argument("n", type=int)
    evaluate.add_argument("--point", required=True, help="KIND:VALUE, ex.: trig:0.3, hyper:0.1, line:0.5")
    evaluate.add_argument("--param", action="append", metavar="K=V")
    evaluate.add_argument("--q", type=float, required=True)
    evaluate.add_argument("--variant", default="default")

    measure = sub.add_parser("measure", help="tabela de uma medida de ortogonalidade")
    measure.add_argument("name")
    measure.add_argument("--param", action="append", metavar="K=V")
    measure.add_argument("--q", type=float, required=True)
    measure.add_argument("--atoms", type=int, default=32)
    measure.add_argument("--samples", type=int, default=64)
    measure.add_argument("--format", choices=["csv", "human"], default="csv", dest="output_format")
    return parser


def selector_from(args: argparse.Namespace) -> str:
    if args.section is not None:
        return f"section:{args.section}"
    if args.check:
        return "check:" + ",".join(args.check)
    return "all"


# ==============================================
# DESPACHO
# ==============================================

def dispatch(args: argparse.Namespace) -> int:
    if args.command == "suite":
        if args.history is not None:
            return cmd_history(args.history)
        config = RunConfig(
            selector=selector_from(args),
            q_values=args.q_values or [],
            tolerance=args.tolerance,
            output_format=args.output_format,
            output_path=args.output_path,
            jobs=args.jobs,
            seed=args.seed,
            random_draws=args.random_draws,
            save=args.save,
        )
        return cmd_suite(config)
    if args.command == "eval":
        return cmd_eval(args.family, args.n, args.point, args.param, args.q, args.variant)
    return cmd_measure(args.name, args.param, args.q, args.atoms, args.samples, args.output_format)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Ponto de entrada da CLI

    Returns:
        código de saída: 0 sucesso, 1 checagem reprovada, 2 erro de uso/domínio
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else USAGE_ERROR
    configure_logging(args.verbose)

    try:
        return dispatch(args)
    except ValidationError as error:
        logger.error(f"❌ Configuração inválida: {error.error_count()} erro(s)")
        print(json.dumps(format_error(error, USAGE_ERROR), ensure_ascii=False, default=str), file=sys.stderr)
        return USAGE_ERROR
    except QHermiteError as error:
        logger.error(f"❌ {error}")
        print(json.dumps(format_error(error, error.exit_code), ensure_ascii=False, default=str), file=sys.stderr)
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
