"""
Motor de invariantes de T(M) y L(M,f): punto de entrada de la línea de comandos.

    python app.py count T 4
    python app.py count L41 --a12 1 --a23 0 --a34 -1
    python app.py verify T 4 --expr n_1_2
    python app.py certify-all --out informe.xlsx

Códigos de salida: 0 correcto, 1 verificación fallida, 2 error de uso o de entrada.
"""
import argparse
import logging
import os
import sys

from components.certify_command import CertifyCommand
from components.count_command import CountCommand
from components.gen_command import GenCommand
from components.invariants_command import InvariantsCommand
from components.verify_command import VerifyCommand
from utils.config import EngineSettings
from utils.errors import InvariantEngineError

logger = logging.getLogger(__name__)

COMMANDS = (GenCommand, CountCommand, InvariantsCommand, VerifyCommand, CertifyCommand)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=None, help="semilla de toda la aleatoriedad (por defecto 0)")
    common.add_argument('--trials', type=int, default=None, help="evaluaciones aleatorias del rango")
    common.add_argument('--format', choices=('text', 'json'), default='text')
    common.add_argument('--out', default=None, help="fichero de salida en lugar de la salida estándar")
    common.add_argument('--log-level', default=None, choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'))

    parser = argparse.ArgumentParser(
        prog='invariants',
        description="Invariantes generalizadas de Casimir de T(M) y sus extensiones resolubles L(M,f)",
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    for command in COMMANDS:
        sub = subparsers.add_parser(command.name, help=command.help, parents=[common])
        command.add_arguments(sub)
        sub.set_defaults(command_class=command)
    return parser


def configure_logging(level):
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _write_output(text, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(text)
        handle.write('\n')


def run(argv=None):
    """Ejecuta la CLI y devuelve el código de salida"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    settings = EngineSettings.from_environment().with_overrides(
        seed=args.seed, trials=args.trials, log_level=args.log_level,
    )
    configure_logging(settings.log_level)
    command = args.command_class(settings)
    try:
        code, text = command.run(args)
    except (InvariantEngineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.out and not getattr(command, 'exports_table', False):
        _write_output(text, args.out)
        logger.info("salida escrita en %s", args.out)
    else:
        print(text)
    return code


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
