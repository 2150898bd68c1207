"""
Comando verify: certificado de anulación de una invariante
"""
import json
import logging

from components.target_selector import TargetSelector
from utils.algebra_io import load_algebra
from utils.expression_parser import parse_expression
from utils.verification import verify_invariant

logger = logging.getLogger(__name__)


class VerifyCommand:
    name = 'verify'
    help = "Aplica todos los operadores coadjuntos a una invariante"

    def __init__(self, settings):
        self.settings = settings
        self.selector = TargetSelector(settings)

    @staticmethod
    def add_arguments(parser):
        TargetSelector.add_arguments(parser, required=False)
        parser.add_argument('--algebra', default=None, help="JSON del álgebra (en lugar del selector)")
        parser.add_argument('--expr', action='append', default=None,
                            help="invariante en texto; sin --expr se verifican las del catálogo")

    def run(self, args):
        if args.algebra:
            algebra = load_algebra(args.algebra, self.settings)
            entry_invariants = None
        elif args.target:
            target = self.selector.resolve(args)
            algebra = target.algebra
            entry_invariants = None if args.expr else target.entry().invariants
        else:
            raise ValueError("indique un selector de álgebra o --algebra FICHERO")
        if args.expr:
            invariants = [parse_expression(text, algebra.universe) for text in args.expr]
        elif entry_invariants is not None:
            invariants = list(entry_invariants)
        else:
            raise ValueError("--expr es obligatorio con --algebra")
        certificates = [verify_invariant(algebra, expr) for expr in invariants]
        code = 0 if all(cert.passed for cert in certificates) else 1
        if args.format == 'json':
            payload = [cert.to_dict() for cert in certificates]
            return code, json.dumps(payload if len(payload) > 1 else payload[0], ensure_ascii=False, indent=2)
        lines = []
        for cert in certificates:
            status = "PASA" if cert.passed else "FALLA"
            lines.append(f"{status} {cert.algebra}: {cert.invariant}")
            lines += [f"  {check.generator}: {check.residual}" for check in cert.failures]
        return code, "\n".join(lines)
