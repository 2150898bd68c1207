"""
Comando gen: escribe el JSON del álgebra seleccionada
"""
import logging

from components.target_selector import TargetSelector
from utils.algebra_io import algebra_to_json

logger = logging.getLogger(__name__)


class GenCommand:
    name = 'gen'
    help = "Genera el JSON de un álgebra T(M) o L(M,f)"

    def __init__(self, settings):
        self.settings = settings
        self.selector = TargetSelector(settings)

    @staticmethod
    def add_arguments(parser):
        TargetSelector.add_arguments(parser)

    def run(self, args):
        target = self.selector.resolve(args)
        logger.info("generando %s (dim %d)", target.label, target.algebra.dim)
        return 0, algebra_to_json(target.algebra)
