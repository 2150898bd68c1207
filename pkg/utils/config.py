"""
Configuración del motor leída desde variables de entorno
"""
import logging
import os
from dataclasses import dataclass, replace

logger = logging.getLogger(__name__)


def _env_int(name, default, minimum=None):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning("Valor inválido para %s=%r, se usa %s", name, raw, default)
        return default
    if minimum is not None and value < minimum:
        logger.warning("%s=%s por debajo del mínimo %s, se usa %s", name, value, minimum, default)
        return default
    return value


@dataclass(frozen=True)
class EngineSettings:
    seed: int = 0
    trials: int = 5
    sample_bound: int = 10 ** 6
    symbolic_rank_limit: int = 45
    jacobi_exhaustive_limit: int = 30
    jacobi_random_triples: int = 500
    bracket_check_limit: int = 15
    max_bad_samples: int = 50
    log_level: str = "WARNING"

    @classmethod
    def from_environment(cls):
        """Construye la configuración a partir de INVARIANTS_*"""
        defaults = cls()
        level = os.environ.get('INVARIANTS_LOG_LEVEL', defaults.log_level).upper()
        # getLevelName devuelve un entero solo para nombres registrados
        if not isinstance(logging.getLevelName(level), int):
            logger.warning("Nivel de log desconocido %r, se usa %s", level, defaults.log_level)
            level = defaults.log_level
        return cls(
            seed=_env_int('INVARIANTS_SEED', defaults.seed, minimum=0),
            trials=_env_int('INVARIANTS_TRIALS', defaults.trials, minimum=1),
            sample_bound=_env_int('INVARIANTS_SAMPLE_BOUND', defaults.sample_bound, minimum=1),
            symbolic_rank_limit=_env_int('INVARIANTS_SYMBOLIC_LIMIT', defaults.symbolic_rank_limit, minimum=0),
            jacobi_exhaustive_limit=_env_int('INVARIANTS_JACOBI_EXHAUSTIVE', defaults.jacobi_exhaustive_limit, minimum=0),
            jacobi_random_triples=_env_int('INVARIANTS_JACOBI_TRIPLES', defaults.jacobi_random_triples, minimum=1),
            bracket_check_limit=_env_int('INVARIANTS_BRACKET_EXHAUSTIVE', defaults.bracket_check_limit, minimum=0),
            max_bad_samples=_env_int('INVARIANTS_MAX_BAD_SAMPLES', defaults.max_bad_samples, minimum=1),
            log_level=level,
        )

    def with_overrides(self, **overrides):
        """Aplica los flags de la CLI que no son None"""
        values = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **values) if values else self


DEFAULT_SETTINGS = EngineSettings()
