"""
Comando count: número de invariantes y rango genérico de la matriz de estructura
"""
import json
import logging

from components.target_selector import TargetSelector
from utils.rank_calculations import rank_report

logger = logging.getLogger(__name__)


class CountCommand:
    name = 'count'
    help = "Cuenta las invariantes funcionalmente independientes (dim - rango de S)"

    def __init__(self, settings):
        self.settings = settings
        self.selector = TargetSelector(settings)

    @staticmethod
    def add_arguments(parser):
        TargetSelector.add_arguments(parser)
        confirm = parser.add_mutually_exclusive_group()
        confirm.add_argument('--symbolic', dest='confirm', action='store_const', const=True, default=None,
                             help="fuerza la confirmación simbólica del rango")
        confirm.add_argument('--no-symbolic', dest='confirm', action='store_const', const=False,
                             help="omite la confirmación simbólica")

    def run(self, args):
        target = self.selector.resolve(args)
        report = rank_report(target.algebra, settings=self.settings, confirm=args.confirm)
        if args.format == 'json':
            return 0, json.dumps(report.to_dict(), ensure_ascii=False, indent=2)
        return 0, report.summary()
