"""
Comando invariants: entradas del catálogo de invariantes en forma cerrada
"""
import json
import logging

from components.target_selector import TargetSelector
from utils.invariant_catalog import catalog

logger = logging.getLogger(__name__)


class InvariantsCommand:
    name = 'invariants'
    help = "Escribe las invariantes catalogadas de un álgebra o de todo el catálogo"

    def __init__(self, settings):
        self.settings = settings
        self.selector = TargetSelector(settings)

    @staticmethod
    def add_arguments(parser):
        TargetSelector.add_arguments(parser, required=False)

    def run(self, args):
        if args.target:
            entries = [self.selector.resolve(args).entry()]
        else:
            entries = catalog()
        if args.format == 'json':
            payload = [entry.to_dict() for entry in entries]
            return 0, json.dumps(payload if len(payload) > 1 else payload[0], ensure_ascii=False, indent=2)
        blocks = []
        for entry in entries:
            lines = [f"{entry.family.value} {entry.algebra.name}: {entry.expected_count} invariantes"]
            lines += [f"  I{idx} = {expr.to_text()}" for idx, expr in enumerate(entry.invariants, start=1)]
            if entry.notes:
                lines.append(f"  ({entry.notes})")
            blocks.append("\n".join(lines))
        return 0, "\n".join(blocks)
